"""Command-line front end.

Subcommands: ``analyze`` prints the smoothness report of a matrix file as
JSON, ``run`` executes one configured optimization and emits its trace as
CSV, and ``quadgrid`` emits the paired benchmark grid as CSV.  Output is
deterministic for a given config; every float is printed with 17
significant digits.  Exit codes: 0 on success, 2 on input errors, 3 on
divergence (with the partial trace flushed).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import BRUTE_FORCE_CAP, analyze, smoothness_constant
from .experiments import GridConfig, grid_csv_lines, run_quad_grid
from .matrices import MatrixFormatError, parse_matrix_text
from .norms import BlockMax, BlockPartition, Euclidean, Max, NormKind, One, kind_from_json
from .optimizers import (
    AdamConfig,
    Constant,
    DivergenceError,
    InvSqrt,
    StepSchedule,
    Trace,
    run_adam_family,
    run_normalized_sd,
    run_relaxed_nsd,
    run_signsgd,
    run_steepest_descent,
)
from .problems import (
    CoshProblem,
    QuadraticProblem,
    cosh_oracle,
    make_quadratic,
    quad_noisy_oracle,
    quad_oracle,
)

TRACE_CSV_HEADER = "t,f,dual_grad_norm,dist_sq"

_STEEPEST_KINDS = {
    "gd": Euclidean(),
    "signgd_normscaled": Max(),
    "cd": One(),
}


class ConfigError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_lines(lines: list[str], out: str | None) -> None:
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _trace_csv_lines(trace: Trace) -> list[str]:
    lines = [TRACE_CSV_HEADER]
    for t in range(len(trace)):
        dist = trace.dist_sq[t] if trace.dist_sq is not None else float("nan")
        lines.append(
            f"{t},{_fmt(trace.f[t])},{_fmt(trace.dual_grad_norm[t])},{_fmt(dist)}"
        )
    return lines


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config root must be a JSON object")
    return obj


def _build_problem(obj):
    """Returns (problem, oracle, dim) from the problem config object."""
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ConfigError("problem config must be an object with exactly one key")
    if "quadratic" in obj:
        spec = dict(obj["quadratic"])
        try:
            d = int(spec.pop("d"))
            lambda_max = float(spec.pop("lambda_max"))
        except KeyError as exc:
            raise ConfigError(f"quadratic problem requires {exc}") from exc
        theta = float(spec.pop("theta", 0.0))
        seed = int(spec.pop("seed", 0))
        sigma = float(spec.pop("sigma", 0.0))
        noise_seed = spec.pop("noise_seed", None)
        if spec:
            raise ConfigError(f"unknown quadratic keys: {sorted(spec)}")
        problem = make_quadratic(d, lambda_max, theta, seed)
        if sigma > 0.0:
            stream = np.random.default_rng(
                [seed, 1] if noise_seed is None else int(noise_seed)
            )
            oracle = quad_noisy_oracle(problem, sigma, stream)
        else:
            oracle = quad_oracle(problem)
        return problem, oracle, d
    if "cosh" in obj:
        spec = dict(obj["cosh"])
        try:
            d = int(spec.pop("d"))
        except KeyError as exc:
            raise ConfigError(f"cosh problem requires {exc}") from exc
        if spec:
            raise ConfigError(f"unknown cosh keys: {sorted(spec)}")
        problem = CoshProblem(d)
        return problem, cosh_oracle(problem), d
    raise ConfigError(f"unknown problem family: {sorted(obj)}")


def _parse_schedule(obj) -> StepSchedule:
    if obj is None or obj == "inv_sqrt":
        return InvSqrt()
    if isinstance(obj, dict) and set(obj) == {"constant"}:
        return Constant(float(obj["constant"]))
    raise ConfigError(f"unrecognized step schedule: {obj!r}")


def _smoothness_or_config(spec: dict, problem, kind: NormKind) -> float:
    if "L" in spec:
        return float(spec.pop("L"))
    if isinstance(problem, QuadraticProblem):
        return smoothness_constant(problem.matrix, kind)
    raise ConfigError("explicit 'L' required for non-quadratic problems")


def _build_runner(obj, problem):
    """Returns a closure (oracle, x0, T, x_star) -> Trace from the optimizer config."""
    if not isinstance(obj, dict) or "method" not in obj:
        raise ConfigError("optimizer config must be an object with a 'method' key")
    spec = dict(obj)
    method = spec.pop("method")

    if method in _STEEPEST_KINDS or method == "blocknorm":
        if method == "blocknorm":
            try:
                blocks = spec.pop("blocks")
            except KeyError as exc:
                raise ConfigError("blocknorm requires 'blocks'") from exc
            kind: NormKind = BlockMax(BlockPartition(tuple(tuple(b) for b in blocks)))
        else:
            kind = _STEEPEST_KINDS[method]
        L = _smoothness_or_config(spec, problem, kind)
        if spec:
            raise ConfigError(f"unknown optimizer keys: {sorted(spec)}")
        return lambda oracle, x0, T, x_star: run_steepest_descent(
            oracle, kind, L, x0, T, x_star=x_star
        )

    if method == "nsd":
        kind = kind_from_json(spec.pop("norm", "max"))
        L = _smoothness_or_config(spec, problem, kind)
        if spec:
            raise ConfigError(f"unknown optimizer keys: {sorted(spec)}")
        return lambda oracle, x0, T, x_star: run_normalized_sd(
            oracle, kind, L, x0, T, x_star=x_star
        )

    if method == "relaxed_nsd":
        kind = kind_from_json(spec.pop("norm", "max"))
        try:
            L0 = float(spec.pop("L0"))
        except KeyError as exc:
            raise ConfigError("relaxed_nsd requires 'L0'") from exc
        L1 = float(spec.pop("L1", 0.0))
        eps = float(spec.pop("eps", 1e-6))
        if spec:
            raise ConfigError(f"unknown optimizer keys: {sorted(spec)}")
        return lambda oracle, x0, T, x_star: run_relaxed_nsd(
            oracle, kind, L0, L1, x0, T, eps, x_star=x_star
        )

    if method in ("signgd", "signsgd"):
        schedule = _parse_schedule(spec.pop("step", None))
        if spec:
            raise ConfigError(f"unknown optimizer keys: {sorted(spec)}")
        return lambda oracle, x0, T, x_star: run_signsgd(
            oracle, schedule, x0, T, x_star=x_star
        )

    if method in ("adam", "adam_shuffled", "adam_averaged", "momentum_sign"):
        variant = {
            "adam": "standard",
            "adam_shuffled": "shuffled",
            "adam_averaged": "averaged",
            "momentum_sign": "momentum_sign",
        }[method]
        blocks = spec.pop("blocks", None)
        partition = (
            BlockPartition(tuple(tuple(b) for b in blocks)) if blocks is not None else None
        )
        seed = int(spec.pop("seed", 0))
        cfg = AdamConfig(
            step=float(spec.pop("step", 1e-3)),
            beta1=float(spec.pop("beta1", 0.9)),
            beta2=float(spec.pop("beta2", 0.999)),
            epsilon=float(spec.pop("epsilon", 1e-8)),
            variant=variant,
            blocks=partition,
        )
        if spec:
            raise ConfigError(f"unknown optimizer keys: {sorted(spec)}")
        return lambda oracle, x0, T, x_star: run_adam_family(
            oracle, cfg, x0, T, np.random.default_rng(seed), x_star=x_star
        )

    raise ConfigError(f"unknown method: {method!r}")


def _resolve_x0(cfg: dict, d: int) -> np.ndarray:
    if "x0" in cfg:
        x0 = np.asarray(cfg["x0"], dtype=float)
        if x0.shape != (d,):
            raise ConfigError(f"x0 must have length {d}")
        return x0
    seed = int(cfg.get("x0_seed", 0))
    return np.random.default_rng(seed).standard_normal(d)


def cmd_analyze(args) -> int:
    try:
        text = Path(args.matrix).read_text()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        matrix = parse_matrix_text(text)
        if matrix.dim > BRUTE_FORCE_CAP:
            print(
                f"warning: d={matrix.dim} exceeds the exact-norm cap "
                f"{BRUTE_FORCE_CAP}; Linf_exact omitted",
                file=sys.stderr,
            )
        report = analyze(matrix)
    except (MatrixFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    fields = report.to_json_dict()
    body = ", ".join(f'"{k}": {_fmt(v)}' for k, v in fields.items())
    sys.stdout.write("{" + body + "}\n")
    return 0


def cmd_run(args) -> int:
    try:
        cfg = _load_json(args.config)
        known = {"problem", "optimizer", "T", "x0", "x0_seed"}
        unknown = set(cfg) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "problem" not in cfg or "optimizer" not in cfg:
            raise ConfigError("config requires 'problem' and 'optimizer'")
        problem, oracle, d = _build_problem(cfg["problem"])
        runner = _build_runner(cfg["optimizer"], problem)
        T = int(cfg.get("T", 100))
        if T < 1:
            raise ConfigError("T must be positive")
        x0 = _resolve_x0(cfg, d)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    x_star = np.zeros(d)
    try:
        trace = runner(oracle, x0, T, x_star)
    except DivergenceError as exc:
        _write_lines(_trace_csv_lines(exc.trace), args.out)
        print(f"error: {exc}", file=sys.stderr)
        return 3
    _write_lines(_trace_csv_lines(trace), args.out)
    return 0


def _workers_from_env() -> int:
    raw = os.environ.get("NORM_DESCENT_THREADS")
    if raw is None:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def cmd_quadgrid(args) -> int:
    try:
        cfg = GridConfig.from_json(_load_json(args.config))
        if cfg.d > BRUTE_FORCE_CAP:
            raise ConfigError(
                f"grid requires the exact max-norm constant; d={cfg.d} exceeds "
                f"cap {BRUTE_FORCE_CAP}"
            )
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    def progress(cell):
        print(
            f"cell lambda_max={cell.lambda_max:g} theta={cell.theta:g} done",
            file=sys.stderr,
        )

    cells = run_quad_grid(
        cfg,
        workers=_workers_from_env(),
        dump_dir=args.dump_x0,
        progress=progress,
    )
    _write_lines(grid_csv_lines(cells), args.out)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="norm-descent",
        description="Matrix smoothness analysis and norm-geometry descent experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="print the smoothness report of a matrix file")
    p_analyze.add_argument("matrix", help="matrix text file (line 1: d; then d rows)")
    p_analyze.set_defaults(func=cmd_analyze)

    p_run = sub.add_parser("run", help="run one configured optimization, emit trace CSV")
    p_run.add_argument("--config", required=True, help="JSON config file")
    p_run.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p_run.set_defaults(func=cmd_run)

    p_grid = sub.add_parser("quadgrid", help="run the paired benchmark grid, emit CSV")
    p_grid.add_argument("--config", required=True, help="JSON grid config file")
    p_grid.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p_grid.add_argument("--dump-x0", default=None, help="directory for per-cell x0 dumps")
    p_grid.set_defaults(func=cmd_quadgrid)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
