"""
Validation against the Autonomous Greenhouse Challenge recordings.

The dataset is not redistributed. Point ``GHOC_AGC_DIR`` at a directory
holding the recorded climate as ``daily_climate.csv`` (schema of
``data/example_daily_climate.csv``) and, optionally, the harvest series as
``fresh_weight.csv``; the packaged experimental series is used otherwise.
"""

import os
import unittest

from test_case_base import DATA_DIR, TestCaseBase

from ghoc.scenario import (
    ScenarioConfig,
    load_daily_climate,
    load_experiment,
    simulate_crop,
    validate,
)

AGC_DIR = os.environ.get("GHOC_AGC_DIR")

# target signed final error (kg/m2) and accepted distance from it
TARGETS = {"tomgro": (2.0, 2.0), "simple": (-4.0, 2.0)}


@unittest.skipUnless(AGC_DIR, "GHOC_AGC_DIR is not set, the AGC climate series is not available")
class TestAgcValidation(TestCaseBase):
    def setUp(self):
        self.climate = load_daily_climate(os.path.join(AGC_DIR, "daily_climate.csv"))
        harvest = os.path.join(AGC_DIR, "fresh_weight.csv")
        if not os.path.exists(harvest):
            harvest = os.path.join(DATA_DIR, "experiment_fresh_weight.csv")
        self.experiment = load_experiment(harvest)
        self.config = ScenarioConfig.from_dict()

    def test_final_error_signs(self):
        for model, (target, spread) in TARGETS.items():
            trajectory = simulate_crop(
                model,
                self.config.initial_state(model).crop,
                self.climate,
                self.config.model_params(),
                self.config.economics().dry_matter_fraction,
            )
            report = validate(trajectory, self.experiment)
            error = report.signed_final_error
            self.assertLessEqual(abs(error - target), spread, msg=f"{model}: {report.to_dict()}")
            if target > 0:
                self.assertGreater(error, 0.0)
            else:
                self.assertLess(error, 0.0)


if __name__ == "__main__":
    unittest.main()
