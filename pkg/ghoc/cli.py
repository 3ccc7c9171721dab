"""
Command line front end.

::

    ghoc simulate  --config scenario.yaml --model tomgro --out out/
    ghoc optimize  --config scenario.yaml --model both --threads 2
    ghoc gradcheck --config scenario.yaml
    ghoc cross     --config a.yaml --other-config b.yaml

Every command writes its artifacts below ``--out`` together with a JSON
summary (``summary.json``, ``gradcheck.json`` or ``cross.json``) carrying
the config hash. A ``GhocError`` escaping a command is printed as
JSON on stderr, written to ``error.json`` and mapped to its exit code.
``optimize`` and ``cross`` write all artifacts of a solve that stopped
before its tolerance and then report it the same way, with exit code 4.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from typing import Any, Callable

from .diff.gradcheck import combined_check, smoothing_check, zero_weights_check
from .models.registry import crop_model_names
from .ocp import cost, cross_matrix, simulate, solve
from .scenario import (
    ScenarioConfig,
    economics_summary,
    load_config,
    load_daily_climate,
    load_experiment,
    save_trajectory,
    simulate_crop,
    validate,
    write_solver_history,
    write_summary,
)
from .utils import ConfigError, GhocError, NonConvergenceError, ProfileGuard, log, profile_path

GRADCHECK_DAYS = 3


def _load(path: str | None, args: argparse.Namespace) -> ScenarioConfig:
    config = load_config(path) if path else ScenarioConfig.from_dict()
    return config.with_overrides(seed=args.seed, horizon=args.horizon)


def _models(args: argparse.Namespace, config: ScenarioConfig) -> list[str]:
    if args.model == "both":
        return crop_model_names()
    return [args.model or config.model]


def _run_models(fn: Callable[[str], Any], models: list[str], threads: int) -> dict[str, Any]:
    """``fn`` per model, concurrently up to ``threads``; results in model order."""
    workers = max(1, min(threads, len(models)))
    if workers == 1:
        return {m: fn(m) for m in models}
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return dict(zip(models, pool.map(fn, models)))


def _comparison(wall_times: dict[str, float]) -> dict[str, float] | None:
    if set(wall_times) != {"simple", "tomgro"} or wall_times["simple"] <= 0:
        return None
    return {
        "wall_time_simple_s": wall_times["simple"],
        "wall_time_tomgro_s": wall_times["tomgro"],
        "wall_time_ratio_tomgro_simple": wall_times["tomgro"] / wall_times["simple"],
    }


def _validation(config: ScenarioConfig, trajectory) -> dict | None:
    path = config.file("experiment_file")
    if path is None:
        return None
    return validate(trajectory, load_experiment(path)).to_dict()


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load(args.config, args)
    config_hash = config.config_hash()
    climate_path = config.file("climate_file")
    climate = load_daily_climate(climate_path) if climate_path else None

    def run(model: str):
        start = time.perf_counter()
        if climate is not None:
            trajectory = simulate_crop(
                model,
                config.initial_state(model).crop,
                climate,
                config.model_params(),
                config.economics().dry_matter_fraction,
                N=config.horizon,
            )
            trajectory.config_hash = config_hash
            summary = {
                "model": model,
                "N": trajectory.N,
                "harvest_kg_m2": trajectory.final_fruit_fresh,
            }
        else:
            problem = config.build_problem(model)
            U = config.control_schedule()
            trajectory = simulate(U, problem, config_hash=config_hash)
            summary = economics_summary(trajectory, problem, cost(U, problem))
        return trajectory, summary, time.perf_counter() - start

    results = _run_models(run, _models(args, config), args.threads)
    runs = {}
    for model, (trajectory, summary, _) in results.items():
        save_trajectory(trajectory, os.path.join(args.out, model))
        summary["validation"] = _validation(config, trajectory)
        summary["driving"] = "daily_climate" if climate is not None else "greenhouse"
        runs[model] = summary
    output = {"command": "simulate", "config_hash": config_hash, "seed": config.seed, "runs": runs}
    if len(results) > 1:
        output["comparison"] = _comparison({m: r[2] for m, r in results.items()})
    write_summary(os.path.join(args.out, "summary.json"), output)
    log(1, f"[cli] simulate wrote {len(runs)} run(s) to {args.out}\n")
    return 0


def _solver_config(config: ScenarioConfig, args: argparse.Namespace):
    cfg = config.solver_config()
    if args.threads > 1:
        cfg = dataclasses.replace(cfg, threads=args.threads)
    return cfg


def _solve_and_save(config: ScenarioConfig, model: str, args, out_dir: str) -> tuple[Any, dict]:
    problem = config.build_problem(model)
    cfg = _solver_config(config, args)
    solution = solve(problem, cfg, config_hash=config.config_hash())
    save_trajectory(solution.trajectory, out_dir)
    write_solver_history(
        os.path.join(out_dir, "solver_history.csv"), solution.cost_history, solution.pg_history
    )
    summary = economics_summary(solution.trajectory, problem, solution.J_star)
    summary.update(
        J_star=solution.J_star,
        iterations=solution.iterations,
        converged=solution.converged,
        message=solution.message,
        wall_time_s=solution.wall_time,
        method=cfg.method,
    )
    return solution, summary


def _report_non_convergence(models: list[str], out_dir: str) -> int:
    """Exit status of a command whose artifacts are written; 4 if any solve stopped early."""
    if not models:
        return 0
    error = NonConvergenceError(
        f"solver stopped without convergence for {', '.join(models)}", models=models
    )
    _report_error(error, out_dir)
    return error.exit_code


def cmd_optimize(args: argparse.Namespace) -> int:
    config = _load(args.config, args)
    models = _models(args, config)
    for model in models:
        os.makedirs(os.path.join(args.out, model), exist_ok=True)
    results = _run_models(
        lambda m: _solve_and_save(config, m, args, os.path.join(args.out, m)), models, args.threads
    )
    runs = {m: summary for m, (_, summary) in results.items()}
    output = {
        "command": "optimize",
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "runs": runs,
    }
    if len(models) > 1:
        output["comparison"] = _comparison({m: s["wall_time_s"] for m, s in runs.items()})
    write_summary(os.path.join(args.out, "summary.json"), output)
    totals = ", ".join(f"{m} J*={s['J_star']:.6g}" for m, s in runs.items())
    log(1, f"[cli] optimize: {totals}\n")
    return _report_non_convergence([m for m, s in runs.items() if not s["converged"]], args.out)


def cmd_gradcheck(args: argparse.Namespace) -> int:
    config = _load(args.config, args)
    N = args.horizon or min(config.horizon, GRADCHECK_DAYS)
    cfg = _solver_config(config, args)
    reports = [smoothing_check(config.model_params().smoothing, seed=config.seed)]
    for model in _models(args, config):
        problem = config.build_problem(model, N)
        reports.append(
            combined_check(
                problem,
                seed=config.seed,
                batch_size=cfg.batch_size,
                threads=cfg.threads,
            )
        )
        reports.append(zero_weights_check(problem, seed=config.seed))
    passed = all(r.passed for r in reports)
    output = {
        "command": "gradcheck",
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "N": N,
        "checks": [r.to_dict() for r in reports],
        "max_rel_error": max(r.max_rel_error for r in reports if r.threshold > 0),
        "passed": passed,
    }
    write_summary(os.path.join(args.out, "gradcheck.json"), output)
    if not passed:
        failed = [r.name for r in reports if not r.passed]
        print(f"gradient check failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def cmd_cross(args: argparse.Namespace) -> int:
    config = _load(args.config, args)
    if args.other_config:
        other = _load(args.other_config, args)
        sides = [("a", config, config.model), ("b", other, other.model)]
    else:
        sides = [(m, config, m) for m in crop_model_names()]
    if len({c.horizon for _, c, _ in sides}) != 1:
        raise ConfigError("cross-evaluation needs both scenarios on the same horizon")
    labels = [f"{side}:{model}" if args.other_config else model for side, _, model in sides]

    def controls_of(index: int):
        label, (_, scenario, model) = labels[index], sides[index]
        if scenario.file("control_file") is not None:
            return scenario.control_schedule(), True
        solution, _ = _solve_and_save(
            scenario, model, args, os.path.join(args.out, label.replace(":", "_"))
        )
        return solution.U_star, solution.converged

    solved = _run_models(controls_of, list(range(len(sides))), args.threads)
    controls = {i: U for i, (U, _) in solved.items()}
    not_converged = [labels[i] for i, (_, converged) in solved.items() if not converged]
    problems = {
        label: scenario.build_problem(model)
        for label, (_, scenario, model) in zip(labels, sides)
    }
    table = cross_matrix({labels[i]: U for i, U in controls.items()}, problems)
    table.to_csv(os.path.join(args.out, "cross.csv"), index=False, float_format="%.17g")
    write_summary(
        os.path.join(args.out, "cross.json"),
        {
            "command": "cross",
            "config_hash": {label: s.config_hash() for label, (_, s, _) in zip(labels, sides)},
            "rows": table.to_dict(orient="records"),
        },
    )
    return _report_non_convergence(not_converged, args.out)


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "simulate": cmd_simulate,
    "optimize": cmd_optimize,
    "gradcheck": cmd_gradcheck,
    "cross": cmd_cross,
}


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ghoc",
        description="Coupled tomato crop and greenhouse climate simulation "
        "and economic optimal control",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        type=str,
        default=None,
        help="scenario file (YAML, or JSON by extension); packaged defaults when omitted",
    )
    common.add_argument(
        "--model",
        choices=[*crop_model_names(), "both"],
        default=None,
        help="crop model (default: scenario.model); 'both' runs simple and tomgro",
    )
    common.add_argument(
        "--out", type=str, default="out", help="output directory (default: out)"
    )
    common.add_argument(
        "--seed",
        type=_non_negative_int,
        default=None,
        help="seed for synthetic weather and random initial controls (default: scenario.seed)",
    )
    common.add_argument(
        "--threads",
        type=_positive_int,
        default=1,
        help="concurrent model runs and derivative sweeps (default: 1)",
    )
    common.add_argument(
        "--horizon",
        type=_positive_int,
        default=None,
        help="override scenario.horizon in days",
    )

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser(
        "simulate",
        parents=[common],
        help="roll the model out under the scenario controls",
    )
    sub.add_parser(
        "optimize",
        parents=[common],
        help="solve the economic-yield control problem",
    )
    sub.add_parser(
        "gradcheck",
        parents=[common],
        help="compare analytic and finite-difference gradients "
        f"(horizon defaults to {GRADCHECK_DAYS} days)",
    )
    cross = sub.add_parser(
        "cross",
        parents=[common],
        help="apply each optimized control sequence to each model",
    )
    cross.add_argument(
        "--other-config",
        type=str,
        default=None,
        help="second scenario; without it simple and tomgro of --config are crossed",
    )
    return parser


def _report_error(error: GhocError, out_dir: str):
    payload = json.dumps(error.to_dict(), sort_keys=True, default=str)
    print(payload, file=sys.stderr)
    try:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "error.json"), "w") as fp:
            fp.write(payload + "\n")
    except OSError as e:
        log(1, f"[cli] cannot write error.json: {e}\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    path = profile_path()
    guard = ProfileGuard(path) if path else nullcontext()
    try:
        os.makedirs(args.out, exist_ok=True)
        with guard:
            return COMMANDS[args.command](args)
    except GhocError as e:
        _report_error(e, args.out)
        return e.exit_code
    except OSError as e:
        error = GhocError(f"{type(e).__name__}: {e}")
        _report_error(error, args.out)
        return error.exit_code


if __name__ == "__main__":
    sys.exit(main())
