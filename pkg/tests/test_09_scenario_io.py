import json
import os
import unittest

import numpy as np
import pandas as pd
from test_case_base import (
    DATA_DIR,
    TOY_CONFIG,
    TOY_DISTURBANCES,
    TempDirCase,
    TestCaseBase,
    scenario,
    small_problem,
)

from ghoc.models import CropStateSimple
from ghoc.ocp import cost, simulate
from ghoc.scenario import (
    ScenarioConfig,
    Trajectory,
    economics_summary,
    load_config,
    load_control_schedule,
    load_daily_climate,
    load_disturbances,
    load_experiment,
    load_trajectory,
    save_trajectory,
    simulate_crop,
    synthetic_disturbances,
    validate,
    write_solver_history,
    write_summary,
)
from ghoc.scenario.disturbances import SCHEMA
from ghoc.utils import ConfigError, DataError, ShapeError

HEADER = ",".join(SCHEMA)


def hourly_rows(hours, R=lambda h: 10.0 * h):
    return [
        f"2021-03-15T{h:02d}:00:00,{R(h)},8.0,3.0,10.0,0.006,400" for h in hours
    ]


class TestDisturbanceLoader(TempDirCase):
    def csv(self, rows, header=HEADER):
        return self.write("weather.csv", "\n".join([header, *rows]) + "\n")

    def test_toy_file(self):
        series = load_disturbances(TOY_DISTURBANCES)
        self.assertEqual(series.n_hours, 48)
        self.assertEqual(series.n_days, 2)
        self.assertFalse(series.interpolated.any())
        days = series.days(2)
        self.assertEqual(days.shape, (2, 24, 6))
        np.testing.assert_array_equal(series.days(1, offset=1)[0], series.values[24:])
        with self.assertRaises(ShapeError):
            series.days(3)

    def test_short_gaps_are_interpolated(self):
        hours = [h for h in range(24) if h not in (3, 4)]
        series = load_disturbances(self.csv(hourly_rows(hours)))
        self.assertEqual(series.n_hours, 24)
        self.assertEqual(series.interpolated.nonzero()[0].tolist(), [3, 4])
        np.testing.assert_allclose(series.values[3:5, 0], [30.0, 40.0], atol=1e-12)
        report = series.report()
        self.assertEqual(report["interpolated_hours"], 2)
        self.assertTrue(report["interpolated_timestamps"][0].startswith("2021-03-15T03"))

    def test_long_gap_names_the_line(self):
        hours = [0, 1, 2, 6, 7]
        with self.assertRaises(DataError) as ctx:
            load_disturbances(self.csv(hourly_rows(hours)))
        self.assertEqual(ctx.exception.line, 5)
        self.assertTrue(ctx.exception.message.startswith("line 5:"))
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_out_of_range_value(self):
        rows = hourly_rows(range(24), R=lambda h: -1.0 if h == 5 else 0.0)
        with self.assertRaises(DataError) as ctx:
            load_disturbances(self.csv(rows))
        self.assertEqual(ctx.exception.line, 7)
        self.assertIn("R_out_Wm2", ctx.exception.message)

    def test_non_finite_value(self):
        rows = hourly_rows(range(24), R=lambda h: "nan" if h == 2 else 0.0)
        with self.assertRaises(DataError) as ctx:
            load_disturbances(self.csv(rows))
        self.assertEqual(ctx.exception.line, 4)

    def test_timeline_errors(self):
        with self.assertRaises(DataError) as ctx:
            load_disturbances(self.csv(hourly_rows(range(1, 24))))
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(DataError):
            load_disturbances(self.csv(hourly_rows([0, 2, 1])))
        rows = hourly_rows(range(3))
        rows[1] = rows[1].replace("01:00:00", "01:30:00")
        with self.assertRaises(DataError):
            load_disturbances(self.csv(rows))
        with self.assertRaises(DataError):
            load_disturbances(self.csv(["not-a-date,0,8,3,10,0.006,400"]))

    def test_header_and_column_map(self):
        header = HEADER.replace("timestamp_iso8601", "time").replace("T_out_C", "outside")
        path = self.csv(hourly_rows(range(24)), header=header)
        with self.assertRaises(DataError) as ctx:
            load_disturbances(path)
        self.assertEqual(ctx.exception.line, 1)
        series = load_disturbances(path, {"time": "timestamp_iso8601", "outside": "T_out_C"})
        self.assertEqual(series.n_days, 1)
        with self.assertRaises(DataError):
            load_disturbances(path, {"time": "timestamp_iso8601"})

    def test_missing_or_empty_file(self):
        with self.assertRaises(DataError):
            load_disturbances(self.path("absent.csv"))
        with self.assertRaises(DataError):
            load_disturbances(self.csv([]))
        with self.assertRaises(DataError) as ctx:
            load_disturbances(self.write("blank.csv", ""))
        self.assertEqual(ctx.exception.line, 1)

    def test_extra_field_names_the_line(self):
        rows = hourly_rows(range(24))
        rows[3] += ",7"
        with self.assertRaises(DataError) as ctx:
            load_disturbances(self.csv(rows))
        self.assertEqual(ctx.exception.line, 5)
        self.assertEqual(ctx.exception.exit_code, 3)

    def test_undecodable_bytes_name_the_line(self):
        lines = [line.encode() for line in (HEADER, *hourly_rows(range(24)))]
        lines[2] += b"\xff\xfe"
        data = b"\n".join(lines) + b"\n"
        with self.assertRaises(DataError) as ctx:
            load_disturbances(self.write_bytes("weather.csv", data))
        self.assertEqual(ctx.exception.line, 3)


class TestSyntheticWeather(TestCaseBase):
    def setUp(self):
        self.weather = ScenarioConfig.from_dict().data["scenario"]["weather"]

    def test_shape_and_daily_cycle(self):
        d = synthetic_disturbances(3, self.weather, seed=0)
        self.assertEqual(d.shape, (3, 24, 6))
        self.assertEqual(d[0, 3, 0], 0.0)
        self.assertGreater(d[0, 13, 0], 0.0)
        self.assertTrue(np.all(d[:, :, 5] == 400.0))
        self.assertTrue(np.all(d[:, :, 2] >= 0.0))

    def test_seeded_noise(self):
        noisy = dict(self.weather, noise=0.3)
        a = synthetic_disturbances(4, noisy, seed=1)
        np.testing.assert_array_equal(a, synthetic_disturbances(4, noisy, seed=1))
        self.assertFalse(np.array_equal(a, synthetic_disturbances(4, noisy, seed=2)))
        np.testing.assert_array_equal(
            synthetic_disturbances(2, self.weather, seed=1),
            synthetic_disturbances(2, self.weather, seed=2),
        )

    def test_horizon(self):
        with self.assertRaises(ConfigError):
            synthetic_disturbances(0, self.weather)


class TestTrajectoryFiles(TempDirCase):
    def test_save_and_load(self):
        problem = small_problem("tomgro")
        U = np.tile([0.4, 0.3, 0.6], (problem.N, 1))
        trajectory = simulate(U, problem, config_hash="abc123")
        save_trajectory(trajectory, self.path("run"))
        for name in ("daily.csv", "hourly.csv", "controls.csv", "trajectory.json"):
            self.assertTrue(os.path.exists(self.path("run", name)))
        hourly = pd.read_csv(self.path("run", "hourly.csv"))
        self.assertEqual(len(hourly), 24 * problem.N)
        loaded = load_trajectory(self.path("run"))
        self.assertTrue(trajectory.allclose(loaded))
        np.testing.assert_array_equal(loaded.fruit_fresh, trajectory.fruit_fresh)
        self.assertEqual(loaded.config_hash, "abc123")
        self.assertEqual(loaded.crop_states, trajectory.crop_states)

    def test_missing_metadata(self):
        with self.assertRaises(DataError):
            load_trajectory(self.tmp)

    def test_corrupt_files(self):
        problem = small_problem("simple", horizon=1)
        save_trajectory(simulate(np.full((1, 3), 0.5), problem), self.path("run"))
        with open(self.path("run", "daily.csv"), "a") as fp:
            fp.write("1,2,3,4,5,6,7\n")
        with self.assertRaises(DataError) as ctx:
            load_trajectory(self.path("run"))
        self.assertEqual(ctx.exception.line, 4)
        self.write(os.path.join("run", "trajectory.json"), '{\n  "model": "simple",\n}\n')
        with self.assertRaises(DataError) as ctx:
            load_trajectory(self.path("run"))
        self.assertEqual(ctx.exception.line, 3)

    def test_shape_checks(self):
        states = [CropStateSimple(0.0, 0.0, 400.0)] * 3
        with self.assertRaises(ShapeError):
            Trajectory("simple", states, [0.0, 0.0])
        with self.assertRaises(ShapeError):
            Trajectory("simple", states, [0.0] * 3, controls=np.zeros((1, 3)), stage_costs=[0.0])
        self.assertIsNone(Trajectory("simple", states, [0.0] * 3).mean_temperature())


class TestValidation(TempDirCase):
    def test_experiment_file(self):
        frame = load_experiment(os.path.join(DATA_DIR, "experiment_fresh_weight.csv"))
        self.assertEqual(len(frame), 22)
        self.assertEqual(frame["day_index"].iloc[0], 70)

    def test_experiment_errors(self):
        path = self.write("obs.csv", "day_index,fruit_fresh_kg_m2\n1,0.5\n2,-0.1\n")
        with self.assertRaises(DataError) as ctx:
            load_experiment(path)
        self.assertEqual(ctx.exception.line, 3)
        path = self.write("obs.csv", "day_index,fruit_fresh_kg_m2\n2,0.5\n2,0.6\n")
        with self.assertRaises(DataError):
            load_experiment(path)
        path = self.write("obs.csv", "day,weight\n1,0.5\n")
        with self.assertRaises(DataError):
            load_experiment(path)
        path = self.write("obs.csv", "day_index,fruit_fresh_kg_m2\n1,0.5\n2,0.6,9\n")
        with self.assertRaises(DataError) as ctx:
            load_experiment(path)
        self.assertEqual(ctx.exception.line, 3)
        path = self.write_bytes("obs.csv", b"day_index,fruit_fresh_kg_m2\n1,0.5\xff\n")
        with self.assertRaises(DataError) as ctx:
            load_experiment(path)
        self.assertEqual(ctx.exception.line, 2)

    def test_validate(self):
        states = [CropStateSimple(0.0, 0.0, 400.0)] * 4
        t = Trajectory("simple", states, [0.0, 1.0, 2.0, 3.0], start_day=10)
        obs = pd.DataFrame({"day_index": [11, 13, 20], "fruit_fresh_kg_m2": [1.5, 2.0, 9.0]})
        report = validate(t, obs)
        self.assertEqual(report.final_day, 13)
        self.assertEqual(report.signed_final_error, 1.0)
        self.assertAlmostEqual(report.rmse, np.sqrt((0.25 + 1.0) / 2.0), places=15)
        self.assertEqual(report.to_dict()["points"], 2)
        with self.assertRaises(DataError):
            validate(t, obs.assign(day_index=[30, 31, 32]))


class TestDailyClimate(TempDirCase):
    def setUp(self):
        super().setUp()
        self.climate = load_daily_climate(os.path.join(DATA_DIR, "example_daily_climate.csv"))

    def test_load(self):
        self.assertEqual(self.climate.N, 166)
        self.assertEqual(self.climate.values.shape, (166, 4))
        self.assertEqual(self.climate.day_index[0], 0)

    def test_errors(self):
        header = "day_index,T_mean_C,T_day_C,R_MJm2,C_CO2_ppm\n"
        with self.assertRaises(DataError) as ctx:
            load_daily_climate(self.write("c.csv", header + "0,19,22,6,600\n2,19,22,6,600\n"))
        self.assertEqual(ctx.exception.line, 3)
        with self.assertRaises(DataError):
            load_daily_climate(self.write("c.csv", header + "0,19,22,-6,600\n"))
        with self.assertRaises(DataError):
            load_daily_climate(self.write("c.csv", header + "0,19,22,6,0\n"))
        with self.assertRaises(DataError):
            load_daily_climate(self.write("c.csv", "day,T\n0,19\n"))
        with self.assertRaises(DataError) as ctx:
            load_daily_climate(self.write("c.csv", header + "0,19,22,6,600\n1,19,22,6,600,1\n"))
        self.assertEqual(ctx.exception.line, 3)
        with self.assertRaises(DataError) as ctx:
            load_daily_climate(self.write("c.csv", ""))
        self.assertEqual(ctx.exception.line, 1)

    def test_simulate_crop(self):
        config = ScenarioConfig.from_dict()
        for model in ("simple", "tomgro"):
            trajectory = simulate_crop(
                model,
                config.initial_state(model).crop,
                self.climate,
                config.model_params(),
                config.economics().dry_matter_fraction,
                N=20,
            )
            self.assertEqual(trajectory.N, 20)
            self.assertEqual(trajectory.gh_hours, [])
            self.assertGreaterEqual(trajectory.final_fruit_fresh, trajectory.fruit_fresh[0])
        with self.assertRaises(ShapeError):
            simulate_crop(
                "simple",
                config.initial_state("simple").crop,
                self.climate,
                config.model_params(),
                0.06,
                N=500,
            )


class TestScenarioConfig(TempDirCase):
    def test_toy_config_resolves_relative_paths(self):
        config = load_config(TOY_CONFIG)
        self.assertEqual(config.model, "simple")
        self.assertEqual(config.horizon, 2)
        self.assertEqual(
            os.path.normpath(config.file("disturbance_file")), os.path.normpath(TOY_DISTURBANCES)
        )
        self.assertEqual(config.disturbances().shape, (2, 24, 6))
        self.assertEqual(config.build_problem().N, 2)

    def test_unknown_key(self):
        with self.assertRaises(ConfigError) as ctx:
            ScenarioConfig.from_dict({"scenario": {"colour": "red"}})
        self.assertEqual(ctx.exception.details["key"], "scenario.colour")
        self.assertEqual(ctx.exception.exit_code, 2)
        with self.assertRaises(ConfigError):
            ScenarioConfig.from_dict({"weather": {}})

    def test_wrong_types(self):
        cases = [
            ({"solver": {"tol": "small"}}, "solver.tol"),
            ({"scenario": {"horizon": True}}, "scenario.horizon"),
            ({"scenario": {"horizon": 2.5}}, "scenario.horizon"),
            ({"greenhouse": {"crop_feedback": 1}}, "greenhouse.crop_feedback"),
            ({"controls": {"constant": [0.5, 0.0]}}, "controls.constant"),
            ({"scenario": {"weather": 3}}, "scenario.weather"),
        ]
        for update, key in cases:
            with self.assertRaises(ConfigError, msg=key) as ctx:
                ScenarioConfig.from_dict(update)
            self.assertEqual(ctx.exception.details.get("key"), key)

    def test_ranges(self):
        for update in (
            {"scenario": {"model": "maize"}},
            {"scenario": {"horizon": 0}},
            {"controls": {"constant": [0.5, 3.0, 0.5]}},
            {"scenario": {"weather": {"sunrise": 20, "sunset": 6}}},
            {"greenhouse": {"substeps": 0}},
            {"solver": {"method": "newton"}},
            {"disturbance_columns": {"time": 3}},
            {"scenario": {"disturbance_file": "absent.csv"}},
        ):
            with self.assertRaises(ConfigError, msg=str(update)):
                ScenarioConfig.from_dict(update)

    def test_files(self):
        with self.assertRaises(ConfigError):
            load_config(self.path("absent.yaml"))
        with self.assertRaises(ConfigError):
            load_config(self.write("broken.yaml", "scenario: [\n"))
        with self.assertRaises(ConfigError):
            load_config(self.write("list.yaml", "- 1\n- 2\n"))
        self.assertEqual(load_config(self.write("empty.yaml", "")).model, "simple")

    def test_parse_errors_carry_the_line(self):
        path = self.write("s.json", '{\n  "scenario": {\n    "horizon": 3,\n  }\n}\n')
        with self.assertRaises(ConfigError) as ctx:
            load_config(path)
        self.assertEqual(ctx.exception.details["line"], 4)
        path = self.write("broken.yaml", "scenario:\n  model: simple\n  horizon: [1\n")
        with self.assertRaises(ConfigError) as ctx:
            load_config(path)
        self.assertGreaterEqual(ctx.exception.details["line"], 3)
        path = self.write_bytes("latin.yaml", b"scenario:\n  model: simple\n# \xe9t\xe9\n")
        with self.assertRaises(ConfigError) as ctx:
            load_config(path)
        self.assertEqual(ctx.exception.details["line"], 3)
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_json_config(self):
        path = self.write("s.json", json.dumps({"scenario": {"model": "tomgro", "horizon": 3}}))
        config = load_config(path)
        self.assertEqual((config.model, config.horizon), ("tomgro", 3))

    def test_config_hash(self):
        a = scenario("simple", 2)
        b = scenario("simple", 2)
        self.assertEqual(a.config_hash(), b.config_hash())
        self.assertEqual(len(a.config_hash()), 64)
        self.assertNotEqual(a.config_hash(), a.config_hash(seed=1))
        longer = a.with_overrides(horizon=5, seed=None)
        self.assertEqual((longer.horizon, longer.seed), (5, a.seed))
        self.assertNotEqual(longer.config_hash(), a.config_hash())
        self.assertEqual(a.horizon, 2)
        with self.assertRaises(ConfigError):
            a.with_overrides(horizon=0)

    def test_control_schedule(self):
        header = "day_index,u_q,u_v,u_co2\n"
        path = self.write("u.csv", header + "0,0.2,0.0,0.3\n1,1.0,2.0,1.0\n")
        np.testing.assert_array_equal(
            load_control_schedule(path, 2), [[0.2, 0.0, 0.3], [1.0, 2.0, 1.0]]
        )
        with self.assertRaises(DataError):
            load_control_schedule(path, 3)
        bad = self.write("bad.csv", header + "0,0.2,0.0,0.3\n1,1.0,2.5,1.0\n")
        with self.assertRaises(DataError) as ctx:
            load_control_schedule(bad, 2)
        self.assertEqual(ctx.exception.line, 3)
        with self.assertRaises(DataError):
            load_control_schedule(self.write("h.csv", "day,a,b,c\n0,0,0,0\n"), 1)
        config = ScenarioConfig.from_dict({"scenario": {"horizon": 2, "control_file": path}})
        self.assertEqual(config.control_schedule().shape, (2, 3))
        self.assertEqual(
            ScenarioConfig.from_dict().control_schedule(2).tolist(), [[0.5, 0.0, 0.5]] * 2
        )

    def test_control_schedule_day_index(self):
        header = "day_index,u_q,u_v,u_co2\n"
        path = self.write("u.csv", header + "5,0.1,0,0\n6,0.2,0,0\n7,0.3,0,0\n")
        np.testing.assert_array_equal(load_control_schedule(path, 2, start_day=6)[:, 0], [0.2, 0.3])
        with self.assertRaises(DataError):
            load_control_schedule(path, 1, start_day=4)
        with self.assertRaises(DataError):
            load_control_schedule(path, 2, start_day=7)
        config = ScenarioConfig.from_dict(
            {"scenario": {"horizon": 1, "start_day": 7, "control_file": path}}
        )
        self.assertEqual(config.control_schedule().tolist(), [[0.3, 0.0, 0.0]])
        gap = self.write("gap.csv", header + "0,0.1,0,0\n2,0.2,0,0\n")
        with self.assertRaises(DataError) as ctx:
            load_control_schedule(gap, 1)
        self.assertEqual(ctx.exception.line, 3)
        for rows in ("0,0.1,0,0\n0.5,0.2,0,0\n", "0,0.1,0,0\n,0.2,0,0\n", "1,0.1,0,0\n0,0.2,0,0\n"):
            with self.assertRaises(DataError, msg=rows) as ctx:
                load_control_schedule(self.write("odd.csv", header + rows), 1)
            self.assertEqual(ctx.exception.line, 3)
        with self.assertRaises(DataError) as ctx:
            load_control_schedule(self.write("wide.csv", header + "0,0,0,0\n1,0,0,0,1\n"), 1)
        self.assertEqual(ctx.exception.line, 3)


class TestReports(TempDirCase):
    def test_economics_summary(self):
        problem = small_problem("simple")
        U = np.tile([0.5, 0.0, 0.5], (problem.N, 1))
        trajectory = simulate(U, problem)
        J = cost(U, problem)
        summary = economics_summary(trajectory, problem, J)
        self.assertEqual(summary["economic_yield_eur_m2"], -J)
        self.assertAlmostEqual(summary["heating_kwh_m2"], 1.0 * 120.0 / 1000.0 * 24, places=12)
        self.assertAlmostEqual(summary["co2_kg_m2"], 1.0 * 1e-6 * 86400.0, places=12)
        self.assertEqual(summary["mean_controls"], {"u_q": 0.5, "u_v": 0.0, "u_co2": 0.5})
        self.assertEqual(summary["harvest_kg_m2"], trajectory.final_fruit_fresh)

        path = self.path("out", "summary.json")
        write_summary(path, dict(summary, extra=np.float64(1.5), arr=np.arange(2)))
        with open(path) as fp:
            loaded = json.load(fp)
        self.assertEqual(loaded["extra"], 1.5)
        self.assertEqual(loaded["arr"], [0, 1])
        self.assertEqual(loaded["N"], problem.N)

    def test_solver_history(self):
        path = self.path("history.csv")
        write_solver_history(path, [3.0, 2.0, 1.5], [0.5, 0.1])
        frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), ["iteration", "J_eur_m2", "projected_gradient"])
        self.assertEqual(frame["J_eur_m2"].tolist(), [3.0, 2.0, 1.5])
        self.assertTrue(np.isnan(frame["projected_gradient"].iloc[2]))


if __name__ == "__main__":
    unittest.main()
