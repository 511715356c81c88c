"""``canonica`` command-line interface.

Exit codes: 0 success, 1 a numerical check failed, 2 malformed input,
3 parameter or admissibility violation.  Failures print one line starting
with ``E<code>:`` to stderr.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CanonicaError, GridMismatchError, ParameterError, SolverError
from .lattices import (
    SamplingSet,
    SqrtLatticeSpec,
    bandlimited_lattice,
    counterexample_lines,
    explicit,
    sqrt_lattice,
)
from .lct import LctParams, NormalizationMode, transform
from .phase_retrieval import (
    GABOR_WINDOW,
    PROP_VARIANTS,
    MeasurementSet,
    SolverConfig,
    bandlimited_experiment,
    counterexample_mu_grid,
    counterexample_pair,
    default_pair_grid,
    distinguishability_experiment,
    solve,
    sqrt_uniqueness_experiment,
    verify_ambiguity,
)
from .signal import Grid, Signal
from .stlct import stlct
from .suites import GAP_TOL, MIN_OFF_LINE_GAP, MIN_PHASE_DISTANCE, SUITES, run_suite
from .windows import WindowSpec

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PARAM = 0, 1, 2, 3


class InputError(CanonicaError):
    """Malformed or missing input file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def g17(v) -> str:
    return format(float(v), ".17g")


# ----------------------------------------------------------------------
# input helpers


def _load_json(value: str):
    """Parse ``value`` as inline JSON if it looks like JSON, else as a file path."""
    text = value.strip()
    try:
        if text[:1] in "{[":
            return json.loads(text)
        return json.loads(Path(value).read_text())
    except FileNotFoundError:
        raise InputError(f"file not found: {value}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON in {value!r}: {exc}") from None


def _parse(kind: str, builder, value, *, data_file: bool = False):
    # a broken data file (e.g. re/im length mismatch) is malformed input;
    # a well-formed file with bad parameters is a parameter violation
    try:
        return builder(_load_json(value))
    except (KeyError, TypeError, AttributeError) as exc:
        raise InputError(f"malformed {kind}: {exc!r}") from None
    except ParameterError as exc:
        if data_file:
            raise InputError(f"malformed {kind}: {exc}") from None
        raise


def load_params(value) -> LctParams:
    return _parse("LCT parameters", LctParams.from_dict, value)


def load_window(value) -> WindowSpec:
    return _parse("window", WindowSpec.from_dict, value)


def load_grid(value) -> Grid:
    return _parse("grid", Grid.from_dict, value)


def load_signal(value) -> Signal:
    return _parse("signal", Signal.from_json_dict, value, data_file=True)


def load_points(value) -> np.ndarray:
    data = _load_json(value)
    if isinstance(data, dict):
        return _parse("sampling set", SamplingSet.from_dict, value).points
    try:
        pts = np.asarray(data, dtype=float).reshape(-1, 2)
    except (TypeError, ValueError) as exc:
        raise InputError(f"malformed point list: {exc}") from None
    return pts


def load_measurements(value) -> MeasurementSet:
    return _parse("measurement set", MeasurementSet.from_dict, value, data_file=True)


# ----------------------------------------------------------------------
# output helpers


class Run:
    """Collects outputs and writes the manifest and runtimes at the end."""

    def __init__(self, args, command: str):
        self.args = args
        self.command = command
        self.out_dir = Path(args.out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.outputs: list[str] = []
        self.t_start = time.perf_counter()
        self.timings: dict[str, float] = {}

    def path(self, name) -> Path:
        return self.out_dir / name

    def write_json(self, path, data) -> None:
        Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        self.outputs.append(str(path))

    def write_csv(self, path, header, rows) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([g17(v) if isinstance(v, (float, np.floating)) else v for v in row])
        self.outputs.append(str(path))

    def added(self, path) -> None:
        self.outputs.append(str(path))

    def config(self) -> dict:
        cfg = {k: v for k, v in vars(self.args).items() if k not in ("func", "out_dir")}
        cfg["command"] = self.command
        return cfg

    def finish(self) -> None:
        cfg = self.config()
        canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"), default=str)
        manifest = {
            "command": self.command,
            "config_digest": hashlib.sha256(canon.encode()).hexdigest(),
            "seed": self.args.seed,
            "tool_version": __version__,
            "outputs": list(self.outputs),
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        self.path("manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        self.timings["total_s"] = time.perf_counter() - self.t_start
        self.path("runtimes.json").write_text(json.dumps(self.timings, indent=2, sort_keys=True) + "\n")


def _checks_csv(run: Run, path, checks) -> None:
    rows = [(c.case, float(c.value), float(c.tol), "<=" if c.upper else ">=", "pass" if c.passed else "fail") for c in checks]
    run.write_csv(path, ["case", "value", "tol", "rule", "status"], rows)


# ----------------------------------------------------------------------
# commands


def cmd_transform(args) -> int:
    run = Run(args, "transform")
    A = load_params(args.params)
    f = load_signal(getattr(args, "in"))
    F = transform(A, NormalizationMode.parse(args.mode), f)
    out = Path(args.out) if args.out else run.path("transformed.json")
    F.save(out)
    run.added(out)
    run.finish()
    return EXIT_OK


def cmd_stlct(args) -> int:
    run = Run(args, "stlct")
    A = load_params(args.params)
    g = load_window(args.window)
    f = load_signal(getattr(args, "in"))
    pts = load_points(args.points)
    spec = stlct(A, g, f, pts, mode=NormalizationMode.parse(args.mode))
    out = Path(args.out) if args.out else run.path("spectrogram.csv")
    spec.to_csv(out)
    run.added(out)
    run.finish()
    return EXIT_OK


def _build_sampling(args) -> SamplingSet:
    if args.kind == "sqrt":
        return sqrt_lattice(SqrtLatticeSpec(args.tau, args.v, args.K))
    if args.kind == "lines":
        return counterexample_lines(args.b, args.u, args.x_count, counterexample_mu_grid(args.u, args.b, args.mu_n))
    if args.kind == "bandlimited":
        return bandlimited_lattice(args.B, args.m, args.b, args.x_max, args.mu_count)
    return explicit(load_points(args.points))


def cmd_sample(args) -> int:
    run = Run(args, "sample")
    s = _build_sampling(args)
    out = Path(args.out) if args.out else run.path("sampling.json")
    run.write_json(out, s.to_dict() | {"points": s.points.tolist()})
    s.to_csv(run.path("sampling.csv"))
    run.added(run.path("sampling.csv"))
    run.finish()
    return EXIT_OK


def cmd_counterexample(args) -> int:
    run = Run(args, "counterexample")
    A = load_params(args.params) if args.params else LctParams(1.0, 1.0, 0.0, 1.0)
    u = args.u
    pair = counterexample_pair(u, A, default_pair_grid())
    mus = counterexample_mu_grid(u, A.b, args.mu_n)
    lines = counterexample_lines(A.b, u, args.x_count, mus)
    for name, f in (("f_plus.json", pair.f_plus), ("f_minus.json", pair.f_minus)):
        f.save(run.path(name))
        run.added(run.path(name))
    for name, f in (("meas_plus.csv", pair.f_plus), ("meas_minus.csv", pair.f_minus)):
        stlct(A, GABOR_WINDOW, f, lines.points).to_csv(run.path(name))
        run.added(run.path(name))
    gap, dist = verify_ambiguity(pair, lines)
    x_off = math.pi * A.b / (2.0 * u)
    off_gap, _ = verify_ambiguity(pair, explicit(np.column_stack([np.full(mus.n, x_off), mus.points])))
    ok = gap <= GAP_TOL * args.tol_scale and dist >= MIN_PHASE_DISTANCE and off_gap >= MIN_OFF_LINE_GAP
    report = {
        "u": u,
        "params": A.to_dict(),
        "max_gap": gap,
        "phase_distance": dist,
        "x_off": x_off,
        "off_line_gap": off_gap,
        "passed": bool(ok),
    }
    run.write_json(run.path("gap_report.json"), report)
    run.finish()
    print(json.dumps({k: report[k] for k in ("max_gap", "phase_distance", "off_line_gap", "passed")}))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    run = Run(args, "verify")
    t0 = time.perf_counter()
    kw = {}
    if args.suite == "counterexample":
        if args.u:
            kw["us"] = tuple(args.u)
        if args.b:
            kw["bs"] = tuple(args.b)
    checks = run_suite(args.suite, seed=args.seed, tol_scale=args.tol_scale, **kw)
    run.timings[args.suite + "_s"] = time.perf_counter() - t0
    _checks_csv(run, run.path(f"verify_{args.suite}.csv"), checks)
    run.finish()
    failed = [c for c in checks if not c.passed]
    for c in failed:
        print(f"FAIL {c.case}: {c.value:.3e} (tol {c.tol:.1e})", file=sys.stderr)
    print(f"{args.suite}: {len(checks) - len(failed)}/{len(checks)} passed")
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_retrieve(args) -> int:
    run = Run(args, "retrieve")
    meas = load_measurements(args.meas)
    grid = load_grid(args.grid)
    cfg = SolverConfig(restarts=args.restarts, max_iters=args.max_iters, seed=args.seed)
    try:
        res = solve(meas, grid, cfg)
    except SolverError as exc:
        print(f"E{EXIT_FAIL}: {exc}", file=sys.stderr)
        run.finish()
        return EXIT_FAIL
    out = Path(args.out) if args.out else run.path("estimate.json")
    res.estimate.save(out)
    run.added(out)
    run.write_json(
        run.path("solver_report.json"),
        {"residual": res.residual, "restart_index": res.restart_index, "iterations_used": res.iterations_used},
    )
    run.finish()
    print(f"residual {res.residual:.3e} (restart {res.restart_index})")
    return EXIT_OK


def _summary_rows(rows, keys):
    return [[r[k] for k in keys] for r in rows]


def cmd_experiment(args) -> int:
    run = Run(args, "experiment")
    t0 = time.perf_counter()
    if args.kind == "sqrt_uniqueness":
        A = load_params(args.params) if args.params else LctParams(1.0, 1.0, 0.0, 1.0)
        rep = sqrt_uniqueness_experiment(
            args.gamma, args.tau, args.v, args.K, args.trials, args.seed,
            A=A, restarts=args.restarts, max_iters=args.max_iters, strict=args.strict,
        )
        keys = ["trial", "phase_distance", "residual", "restart_index", "iterations", "success"]
        passed = rep["success_rate"] >= 0.8
    elif args.kind == "bandlimited":
        b = args.b if args.b is not None else 1.0
        A = load_params(args.params) if args.params else LctParams(1.0, b, 0.0, 1.0)
        rep = bandlimited_experiment(args.B, args.m, A, args.trials, args.seed)
        keys = ["trial", "equivalent_gap", "gap", "phase_distance"]
        passed = rep["passed"]
    else:
        A = load_params(args.params) if args.params else LctParams(1.0, 1.0, 0.0, 1.0)
        rows, rates = [], {}
        for kind in PROP_VARIANTS:
            r = distinguishability_experiment(kind, A, trials=args.trials, seed=args.seed)
            rates[kind] = r["distinguish_rate"]
            rows += [dict(row, variant=kind) for row in r["rows"]]
        rep = {"trials": args.trials, "distinguish_rate": min(rates.values()), "rates": rates, "rows": rows}
        keys = ["variant", "trial", "gap", "phase_distance"]
        passed = rep["distinguish_rate"] >= 0.99
    run.timings[args.kind + "_s"] = time.perf_counter() - t0
    run.write_csv(run.path(f"{args.kind}_trials.csv"), keys, _summary_rows(rep["rows"], keys))
    summary = {k: v for k, v in rep.items() if k != "rows"}
    summary["kind"] = args.kind
    summary["passed"] = bool(passed)
    run.write_json(run.path(f"{args.kind}_summary.json"), summary)
    run.finish()
    print(json.dumps(summary, sort_keys=True))
    return EXIT_OK if passed else EXIT_FAIL


# ----------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    def global_flags(parser, suppress):
        # subcommands repeat the flags without defaults so that a value given
        # before the subcommand is not overwritten
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        parser.add_argument("--seed", type=int, default=d(0))
        parser.add_argument("--out-dir", default=d("."))
        parser.add_argument("--tol-scale", type=float, default=d(1.0))

    common = _Parser(add_help=False)
    global_flags(common, True)

    p = _Parser(prog="canonica", description=__doc__.splitlines()[0])
    global_flags(p, False)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=func)
        return sp

    sp = add("transform", cmd_transform, "apply an LCT to a signal JSON file")
    sp.add_argument("--params", required=True)
    sp.add_argument("--mode", default="unitary", choices=["unitary", "paper"])
    sp.add_argument("--in", required=True)
    sp.add_argument("--out")

    sp = add("stlct", cmd_stlct, "evaluate the short-time LCT at given points")
    sp.add_argument("--params", required=True)
    sp.add_argument("--window", default='{"kind":"gaussian","gamma":1.0}')
    sp.add_argument("--mode", default="paper", choices=["unitary", "paper"])
    sp.add_argument("--in", required=True)
    sp.add_argument("--points", required=True)
    sp.add_argument("--out")

    sp = add("sample", cmd_sample, "build a sampling set")
    sp.add_argument("--kind", required=True, choices=["sqrt", "lines", "bandlimited", "explicit"])
    sp.add_argument("--tau", type=float, default=0.4)
    sp.add_argument("--v", type=float, default=0.4)
    sp.add_argument("--K", type=int, default=20)
    sp.add_argument("--b", type=float, default=1.0)
    sp.add_argument("--u", type=float, default=2.0)
    sp.add_argument("--x-count", type=int, default=4)
    sp.add_argument("--mu-n", type=int, default=257)
    sp.add_argument("--B", type=float, default=1.0)
    sp.add_argument("--m", type=float, default=0.2)
    sp.add_argument("--x-max", type=int, default=15)
    sp.add_argument("--mu-count", type=int, default=16)
    sp.add_argument("--points")
    sp.add_argument("--out")

    sp = add("counterexample", cmd_counterexample, "build and check the ambiguous pair")
    sp.add_argument("--u", type=float, default=2.0)
    sp.add_argument("--params")
    sp.add_argument("--x-count", type=int, default=4)
    sp.add_argument("--mu-n", type=int, default=257)

    sp = add("verify", cmd_verify, "run a residual suite")
    sp.add_argument("suite", choices=sorted(SUITES) + ["counterexample"])
    sp.add_argument("--u", type=float, action="append")
    sp.add_argument("--b", type=float, action="append")

    sp = add("retrieve", cmd_retrieve, "reconstruct a signal from measurements")
    sp.add_argument("--meas", required=True)
    sp.add_argument("--grid", required=True)
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--out")

    sp = add("experiment", cmd_experiment, "run a seeded uniqueness experiment")
    sp.add_argument("kind", choices=["sqrt_uniqueness", "bandlimited", "forward_variants"])
    sp.add_argument("--params")
    sp.add_argument("--gamma", type=float, default=0.5)
    sp.add_argument("--tau", type=float, default=0.4)
    sp.add_argument("--v", type=float, default=0.4)
    sp.add_argument("--K", type=int, default=20)
    sp.add_argument("--strict", action="store_true")
    sp.add_argument("--restarts", type=int, default=8)
    sp.add_argument("--max-iters", type=int, default=500)
    sp.add_argument("--trials", type=int, default=10)
    sp.add_argument("--B", type=float, default=1.0)
    sp.add_argument("--m", type=float, default=0.2)
    sp.add_argument("--b", type=float)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        code, msg = EXIT_INPUT, str(exc)
    except (GridMismatchError, ValueError) as exc:
        # ParameterError (and its subclasses) are ValueErrors
        code = EXIT_PARAM if isinstance(exc, ParameterError) else EXIT_INPUT
        msg = str(exc)
    except OSError as exc:
        code, msg = EXIT_INPUT, str(exc)
    print(f"E{code}: {' '.join(msg.split())}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
