"""
Command-line front end.

    python -m nnem solve    --config run.yaml [--out DIR] [--resume CKPT] [--seed N]
    python -m nnem baseline --config run.yaml
    python -m nnem study    --config run.yaml
    python -m nnem check    --config run.yaml

Exit codes: 0 ok, 1 other solver error, 2 configuration error, 3 training diverged, 4 self-test failed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

import torch

from . import NNEMFactory, __version__
from .analysis import (
    ConvergenceTable,
    comparison_table,
    compute_errors,
    convergence_study,
    fem_solve,
    method_label,
    raise_on_failure,
    run_self_tests,
)
from .config import load_config
from .constants import EXIT_CONFIG, EXIT_DIVERGED, EXIT_OK, EXIT_SELF_TEST
from .errors import (
    ConfigError,
    InvalidArgumentError,
    MeshFormatError,
    MeshValidationError,
    NNEMError,
    SelfTestError,
    TrainingDivergedError,
)
from .solver import (
    TrainState,
    checkpoint_load,
    checkpoint_save,
    train,
)

logger = logging.getLogger("nnem")

HISTORY_FIELDS = ("step", "loss", "e_L2", "e_H1")


def _fmt(value: Any) -> str:
    return "" if value is None else repr(float(value))


def write_history(path: Path, state: TrainState) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=HISTORY_FIELDS, lineterminator="\n")
        w.writeheader()
        for h in state.history:
            w.writerow({"step": h.step, "loss": _fmt(h.loss), "e_L2": _fmt(h.e_L2), "e_H1": _fmt(h.e_H1)})


def write_json(path: Path, data: dict[str, Any]) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def thread_count(config: dict[str, Any]) -> int:
    """Configured thread count; 0 means every available core."""
    return int(config["threads"]) or os.cpu_count() or 1


def _configure_runtime(config: dict[str, Any]) -> None:
    torch.set_num_threads(thread_count(config))
    torch.use_deterministic_algorithms(bool(config["deterministic"]))


def _load(args: argparse.Namespace) -> dict[str, Any]:
    overrides = {"train.seed": args.seed, "output.dir": args.out}
    config = load_config(args.config, overrides)
    _configure_runtime(config)
    return config


def _output_dir(config: dict[str, Any]) -> Path:
    out = Path(config["output.dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_solve(args: argparse.Namespace) -> int:
    config = _load(args)
    factory = NNEMFactory(config)
    parts = factory.create_components()
    out = _output_dir(config)
    state = None
    if args.resume:
        state = checkpoint_load(args.resume, parts.space, config)

    start = time.perf_counter()
    try:
        solution, state = train(
            parts.space, parts.problem, parts.rule, parts.train_config, state, parts.edge_rule
        )
    except TrainingDivergedError as e:
        if e.last_state is not None:
            checkpoint_save(out / "checkpoint.nnem", e.last_state, parts.space, config)
            write_history(out / "history.csv", e.last_state)
        raise
    seconds = time.perf_counter() - start

    checkpoint_save(out / "checkpoint.nnem", state, parts.space, config)
    write_history(out / "history.csv", state)
    report: dict[str, Any] = {
        "method": method_label("nnem" if parts.space.networks else "fem", parts.family),
        "problem": parts.problem.name,
        "h": parts.mesh.h,
        "N": solution.dimension,
        "steps": state.step,
        "seconds": seconds,
        "loss": state.history[-1].loss,
    }
    if parts.problem.has_exact:
        errors = compute_errors(solution, parts.problem, parts.rule, state.step, seconds, report["method"])
        report.update(e_L2=errors.e_L2, e_H1=errors.e_H1, e_energy=errors.e_energy)
    if parts.problem.is_homogeneous:
        fem_space = factory.create_space(parts.mesh, parts.family, parts.problem, networks=False)
        galerkin = dataclasses.replace(parts.train_config, max_steps=0)
        _, fem_state = train(fem_space, parts.problem, parts.rule, galerkin)
        report["fem_loss"] = fem_state.history[-1].loss
    write_json(out / "report.json", report)
    logger.info("Wrote %s", out)
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace) -> int:
    config = _load(args)
    factory = NNEMFactory(config)
    mesh = factory.create_mesh()
    family = factory.create_family()
    problem = factory.create_problem()
    solution, report = fem_solve(
        mesh, family, problem, factory.create_rule(), factory.create_edge_rule(), factory.create_train_config()
    )
    data: dict[str, Any] = {"method": method_label("fem", family), "h": mesh.h, "N": solution.dimension}
    if report is not None:
        data.update(report.to_dict())
    write_json(_output_dir(config) / "report.json", data)
    print(json.dumps(data, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_study(args: argparse.Namespace) -> int:
    config = _load(args)
    factory = NNEMFactory(config)
    if config["mesh.kind"] == "file":
        raise ConfigError("a study needs a generated mesh family", key="mesh.kind")
    family = factory.create_family()
    problem = factory.create_problem()
    rule = factory.create_rule()
    out = _output_dir(config)
    tables: list[ConvergenceTable] = []
    for method in config["study.methods"]:
        table = convergence_study(
            problem,
            family,
            config["study.sizes"],
            factory.create_train_config(),
            method=method,
            mesh_factory=factory.create_mesh,
            rule=rule,
            edge_rule=factory.create_edge_rule(),
            net_config=factory.create_net_config(),
            augment_constant=bool(config["space.augment_constant"]),
        )
        table.to_csv(out / f"{method}.csv")
        tables.append(table)
        print(table.to_csv(include_seconds=False), end="")
    comparison_table(tables, out / "comparison.csv")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    config = _load(args)
    factory = NNEMFactory(config)
    try:
        mesh = factory.create_mesh()
    except (MeshFormatError, MeshValidationError) as e:
        raise SelfTestError("mesh", str(e)) from e
    results, report = run_self_tests(
        mesh,
        factory.create_family(),
        factory.create_rule(),
        int(config["quad.edge_points"]),
        factory.create_problem(),
        seed=int(config["train.seed"]),
    )
    for r in results:
        print(f"{r.name:20s} {'ok' if r.passed else 'FAILED':6s} {r.detail}")
    if report is not None:
        print(
            f"overlap M={report.overlap}  C_inf={report.c_inf:.6g}  C_G={report.c_grad:.6g}  "
            f"min angle={report.min_angle:.4g} deg  regularity={report.shape_regularity:.6g}"
        )
    raise_on_failure(results)
    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "solve": cmd_solve,
    "baseline": cmd_baseline,
    "study": cmd_study,
    "check": cmd_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Path to the run's YAML config (defaults apply when omitted)")
    common.add_argument("--out", help="Output directory (overrides output.dir)")
    common.add_argument("--seed", type=int, help="Seed (overrides train.seed)")
    common.add_argument(
        "--log-level",
        default="INFO",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        help="Logging level",
    )
    parser = argparse.ArgumentParser(prog="nnem", description="NN element method solver")
    parser.add_argument("--version", action="version", version=f"nnem {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", parents=[common], help="Train and solve one problem")
    solve.add_argument("--resume", help="Checkpoint to continue from")
    sub.add_parser("baseline", parents=[common], help="Classical FEM solve")
    sub.add_parser("study", parents=[common], help="Convergence study over study.sizes")
    sub.add_parser("check", parents=[common], help="Diagnostics and self-tests")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entry point; returns the exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, InvalidArgumentError) as e:
        logger.error("Configuration error: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except TrainingDivergedError as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIVERGED
    except SelfTestError as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SELF_TEST
    except NNEMError as e:
        logger.exception("Run failed: %s", e)
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
