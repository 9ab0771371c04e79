"""Command-line surface: generation, evaluation, analysis, reproduction.

Subcommands
-----------
gen        write a generated point set as CSV
disc       closed-form squared discrepancy of a CSV point set
oracle     Monte-Carlo geometric estimate vs the closed form
pathology  replicated-point pathology table as CSV
greedy     greedy extension of a point set
optimize   multi-restart projected-gradient optimization
crosseval  ratio matrix across per-measure optimized sets
tables     reproduce published comparison tables side by side

File formats: point sets are CSV with header ``x1,...,xd`` and one row
per point, 17-significant-digit decimals, rejecting coordinates outside
[0,1] with row/column diagnostics.  Every command writes a run record —
a flat JSON object with sorted keys — next to its primary output
(``<out>.run.json``) and prints it to stdout.  Measured elapsed time
goes to stderr only and is serialized as null, so rerunning a command
with identical flags and seeds reproduces every output file
bit-for-bit.  The DISC_THREADS environment variable caps worker
parallelism; evaluation is single-threaded and deterministic, so any
setting produces identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .core import (
    BudgetExhaustedError,
    MeasureId,
    NumericGuardError,
    PointSet,
    ValidationError,
)
from .construct import (
    GreedyConfig,
    OptimizerConfig,
    cross_evaluate,
    greedy_extend,
    optimize,
)
from .evaluator import squared_discrepancy
from .generators import fibonacci_lattice, grid, iid_uniform, replicated_point, sobol
from .kernels import kernel_spec
from .oracle import mc_squared_discrepancy
from .pathology import pathology_table, reference_row
from .reference import (
    TABLE3_NS,
    TABLE3_OPT,
    TABLE3_ORDER,
    TABLE3_SOBOL,
    TABLE4_NS,
    TABLE4_OPT,
    TABLE4_ORDER,
)

__all__ = ["main", "RunRecord", "read_points", "write_points"]

_GEN_KINDS = ("iid", "sobol", "point", "fib", "grid")

_CROSSEVAL_MEASURES = ("star", "ext", "per", "ctr", "sym", "asd")

#: Optimizer budgets per preset: (restarts, iterations).
_PRESET_BUDGETS = {
    "smoke": (2, 1_500),
    "desk": (6, 12_000),
    "full": (12, 30_000),
}

_PRESET_TABLE3_NS = {"smoke": (16,), "desk": (16, 32), "full": TABLE3_NS}
_PRESET_TABLE4_NS = {
    "smoke": (10, 20),
    "desk": tuple(range(10, 61, 10)),
    "full": TABLE4_NS,
}
_PRESET_FIG2_NS = {"smoke": (16,), "desk": (32, 64), "full": (16, 32, 64, 128, 256)}


@dataclass(frozen=True)
class RunRecord:
    """Flat, reproducible description of one command invocation.

    ``elapsed_ms`` is always null in serialized records (timing goes to
    stderr) so output files are bit-identical across reruns.
    """

    command: str
    measure: Optional[str]
    n: Optional[int]
    d: Optional[int]
    gamma: Optional[tuple]
    squared: Optional[float]
    root: Optional[float]
    seeds: tuple
    samples: Optional[int]
    evaluations: Optional[int]
    elapsed_ms: None
    version: str
    extra: Optional[dict] = None

    def to_json(self) -> str:
        payload = asdict(self)
        extra = payload.pop("extra") or {}
        payload.update(extra)
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _record(command: str, *, measure=None, n=None, d=None, gamma=None,
            squared=None, root=None, seeds=(), samples=None,
            evaluations=None, **extra) -> RunRecord:
    return RunRecord(
        command=command,
        measure=None if measure is None else MeasureId.parse(measure).value,
        n=n, d=d,
        gamma=None if gamma is None else tuple(float(g) for g in gamma),
        squared=squared, root=root,
        seeds=tuple(int(s) for s in seeds),
        samples=samples, evaluations=evaluations,
        elapsed_ms=None, version=__version__,
        extra=extra or None,
    )


def _emit_record(record: RunRecord, out_path: Optional[str],
                 started: float) -> None:
    text = record.to_json()
    if out_path is not None:
        with open(out_path + ".run.json", "w", newline="\n") as fh:
            fh.write(text)
    sys.stdout.write(text)
    elapsed = (time.perf_counter() - started) * 1000.0
    print(f"elapsed_ms={elapsed:.1f}", file=sys.stderr)


# ---------------------------------------------------------------------------
# point-set CSV
# ---------------------------------------------------------------------------


def write_points(path: str, points: PointSet) -> None:
    """CSV with header x1..xd and 17-significant-digit coordinates."""
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(f"x{j + 1}" for j in range(points.d)) + "\n")
        for row in points.coords:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def read_points(path: str) -> PointSet:
    """Parse a point-set CSV, with row/column diagnostics on bad cells."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty point-set file") from None
        expected = [f"x{j + 1}" for j in range(len(header))]
        if [h.strip() for h in header] != expected:
            raise ValidationError(
                f"{path}: header {header!r} does not match x1..x{len(header)}")
        d = len(header)
        rows = []
        for i, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != d:
                raise ValidationError(
                    f"{path}: row {i} has {len(row)} fields, expected {d}")
            parsed = []
            for j, cell in enumerate(row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise ValidationError(
                        f"{path}: row {i}, column x{j + 1}: "
                        f"not a number: {cell!r}") from None
            rows.append(parsed)
    if not rows:
        raise ValidationError(f"{path}: no points in file")
    try:
        return PointSet(np.asarray(rows, dtype=float))
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def _write_csv(path: str, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(v) for v in row) + "\n")


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


# ---------------------------------------------------------------------------
# shared argument plumbing
# ---------------------------------------------------------------------------


def _parse_gamma(text: Optional[str]):
    if text is None:
        return None
    try:
        return tuple(float(part) for part in text.split(","))
    except ValueError:
        raise ValidationError(f"--gamma expects a comma list of numbers, "
                              f"got {text!r}") from None


def _check_disc_threads() -> None:
    raw = os.environ.get("DISC_THREADS")
    if raw is None:
        return
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError(
            f"DISC_THREADS must be a positive integer, got {raw!r}") from None
    if cap < 1:
        raise ValidationError(
            f"DISC_THREADS must be a positive integer, got {cap}")


def _load_input_set(args) -> PointSet:
    if getattr(args, "in_path", None):
        return read_points(args.in_path)
    if args.n is None or args.d is None:
        raise ValidationError("provide --in, or both --n and --d")
    return sobol(args.n, args.d)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_gen(args) -> int:
    started = time.perf_counter()
    kind = args.kind
    seeds = ()
    if kind == "iid":
        if args.n is None or args.d is None:
            raise ValidationError("gen iid needs --n and --d")
        points = iid_uniform(args.n, args.d, args.seed)
        seeds = (args.seed,)
    elif kind == "sobol":
        if args.n is None or args.d is None:
            raise ValidationError("gen sobol needs --n and --d")
        points = sobol(args.n, args.d)
    elif kind == "point":
        if args.point is None or args.n is None:
            raise ValidationError("gen point needs --point and --n")
        coords = _parse_gamma(args.point)
        points = replicated_point(coords, args.n)
    elif kind == "fib":
        if args.n is None:
            raise ValidationError("gen fib needs --n")
        points = fibonacci_lattice(args.n)
    elif kind == "grid":
        if args.grid_k is None or args.d is None:
            raise ValidationError("gen grid needs --grid-k and --d")
        points = grid(args.grid_k, args.d)
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown generator kind {kind!r}")
    write_points(args.out, points)
    record = _record("gen", n=points.n, d=points.d, seeds=seeds, kind=kind,
                     out=args.out)
    _emit_record(record, args.out, started)
    return 0


def _cmd_disc(args) -> int:
    started = time.perf_counter()
    points = read_points(args.in_path)
    gamma = _parse_gamma(args.gamma)
    spec = kernel_spec(args.measure, points.d, gamma)
    result = squared_discrepancy(spec, points)
    record = _record("disc", measure=args.measure, n=points.n, d=points.d,
                     gamma=gamma, squared=result.value, root=result.root)
    _emit_record(record, args.out, started)
    return 0


def _cmd_oracle(args) -> int:
    started = time.perf_counter()
    points = read_points(args.in_path)
    spec = kernel_spec(args.measure, points.d)
    closed = squared_discrepancy(spec, points)
    estimate = mc_squared_discrepancy(args.measure, points,
                                      samples=args.samples, seed=args.seed)
    record = _record(
        "oracle", measure=args.measure, n=points.n, d=points.d,
        squared=closed.value, root=closed.root,
        seeds=(args.seed,), samples=args.samples,
        oracle_mean=estimate.mean, oracle_stderr=estimate.stderr,
        agrees_within_4_stderr=estimate.agrees_with(closed.value),
    )
    _emit_record(record, args.out, started)
    return 0


def _cmd_pathology(args) -> int:
    started = time.perf_counter()
    if args.d is None or args.d < 1:
        raise ValidationError("pathology needs --d (maximum dimension) >= 1")
    rows = pathology_table(range(1, args.d + 1))
    header = ["measure", "d", "n_times_expected", "anchor", "single_value",
              "threshold", "table1_match", "expected_match", "single_match",
              "threshold_match", "notes"]
    _write_csv(args.out, header, (
        [r.measure.value, r.d, r.n_times_expected, r.anchor, r.single_value,
         r.threshold, r.table1_match, r.expected_match, r.single_match,
         r.threshold_match, r.notes]
        for r in rows))
    mismatches = sorted({r.measure.value for r in rows
                         if r.table1_match == "mismatch"})
    record = _record("pathology", d=args.d, out=args.out,
                     rows=len(rows), mismatched_measures=mismatches)
    _emit_record(record, args.out, started)
    return 0


def _cmd_greedy(args) -> int:
    started = time.perf_counter()
    points = read_points(args.in_path)
    gamma = _parse_gamma(args.gamma)
    spec = kernel_spec(args.measure, points.d, gamma)
    cfg = GreedyConfig(batch=args.batch, grid_k=args.grid_k)
    final, trace = greedy_extend(spec, points, args.steps, cfg)
    write_points(args.out, final)
    _write_trace(args.out + ".trace.json", trace)
    record = _record("greedy", measure=args.measure, n=final.n, d=final.d,
                     gamma=gamma, squared=trace.final_value,
                     root=math.sqrt(max(trace.final_value, 0.0)),
                     evaluations=trace.evaluations,
                     steps=args.steps, batch=args.batch, grid_k=args.grid_k)
    _emit_record(record, args.out, started)
    return 0


def _write_trace(path: str, trace) -> None:
    payload = {
        "values": list(trace.values),
        "best_values": list(trace.best_values),
        "final_value": trace.final_value,
        "winner_restart": trace.winner_restart,
        "evaluations": trace.evaluations,
    }
    with open(path, "w", newline="\n") as fh:
        fh.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _cmd_optimize(args) -> int:
    started = time.perf_counter()
    init = _load_input_set(args)
    gamma = _parse_gamma(args.gamma)
    spec = kernel_spec(args.measure, init.d, gamma)
    cfg = OptimizerConfig(restarts=args.restarts, iterations=args.iters,
                          seed=args.seed)
    final, trace = optimize(spec, init, cfg)
    write_points(args.out, final)
    _write_trace(args.out + ".trace.json", trace)
    root = math.sqrt(max(trace.final_value, 0.0))
    record = _record("optimize", measure=args.measure, n=final.n, d=final.d,
                     gamma=gamma, squared=trace.final_value, root=root,
                     seeds=(args.seed,), evaluations=trace.evaluations,
                     restarts=args.restarts, iterations=args.iters,
                     winner_restart=trace.winner_restart,
                     target=args.target)
    _emit_record(record, args.out, started)
    if args.target is not None and root > args.target:
        raise BudgetExhaustedError(
            f"optimized root {root:.6g} missed the requested target "
            f"{args.target:.6g} within {args.restarts} restarts x "
            f"{args.iters} iterations")
    return 0


def _cmd_crosseval(args) -> int:
    started = time.perf_counter()
    measures = [m.strip() for m in args.measure.split(",")]
    if len(measures) < 2:
        raise ValidationError("crosseval needs >= 2 comma-separated measures")
    sets = {}
    for m in measures:
        MeasureId.parse(m)
        path = os.path.join(args.in_path, f"{m}.csv")
        if not os.path.exists(path):
            raise ValidationError(f"missing optimized set file {path}")
        sets[m] = read_points(path)
    ratios = cross_evaluate(sets, measures)
    header = ["evaluated_measure"] + [f"optimized_for_{m}" for m in measures]
    _write_csv(args.out, header, (
        [m] + list(ratios[i]) for i, m in enumerate(measures)))
    record = _record("crosseval", d=next(iter(sets.values())).d,
                     measures=measures, out=args.out,
                     min_offdiag=float(min(ratios[i, k]
                                           for i in range(len(measures))
                                           for k in range(len(measures))
                                           if i != k)))
    _emit_record(record, args.out, started)
    return 0


# ---------------------------------------------------------------------------
# published-table reproduction
# ---------------------------------------------------------------------------


def _optimized_root(measure: str, n: int, preset: str, seed: int) -> float:
    restarts, iters = _PRESET_BUDGETS[preset]
    spec = kernel_spec(measure, 2)
    init = sobol(n, 2)
    _, trace = optimize(spec, init,
                        OptimizerConfig(restarts=restarts, iterations=iters,
                                        seed=seed))
    return math.sqrt(max(trace.final_value, 0.0))


def _sobol_root(measure: str, n: int) -> float:
    spec = kernel_spec(measure, 2)
    return squared_discrepancy(spec, sobol(n, 2)).root


def _rel_dev(computed: float, published: float) -> float:
    return (computed - published) / published


def _tables_table1(out_dir: str) -> str:
    path = os.path.join(out_dir, "table1.csv")
    header = ["measure", "d",
              "n_times_expected", "published_n_times_expected",
              "single_value", "published_single_value",
              "threshold", "published_threshold",
              "table1_match", "expected_match", "single_match",
              "threshold_match", "notes"]
    rows = []
    for r in pathology_table(range(1, 11)):
        ref = reference_row(r.measure)
        pub_single = ("" if ref.single_value is None
                      else ref.single_value(r.d))
        rows.append([
            r.measure.value, r.d,
            r.n_times_expected, ref.n_times_expected(r.d),
            r.single_value, pub_single,
            r.threshold, ref.threshold(r.d),
            r.table1_match, r.expected_match, r.single_match,
            r.threshold_match, r.notes])
    _write_csv(path, header, rows)
    return path


def _tables_table3(out_dir: str, preset: str, seed: int) -> str:
    path = os.path.join(out_dir, "table3.csv")
    header = ["measure", "n", "opt_root", "published_opt",
              "opt_rel_dev", "sobol_root", "published_sobol",
              "sobol_rel_dev"]
    rows = []
    for measure in TABLE3_ORDER:
        for n in _PRESET_TABLE3_NS[preset]:
            opt = _optimized_root(measure, n, preset, seed)
            sob = _sobol_root(measure, n)
            rows.append([
                measure, n,
                opt, TABLE3_OPT[measure][n],
                _rel_dev(opt, TABLE3_OPT[measure][n]),
                sob, TABLE3_SOBOL[measure][n],
                _rel_dev(sob, TABLE3_SOBOL[measure][n])])
    _write_csv(path, header, rows)
    return path


def _tables_table4(out_dir: str, preset: str, seed: int) -> str:
    path = os.path.join(out_dir, "table4.csv")
    header = ["measure", "n", "opt_root", "published_opt", "opt_rel_dev"]
    rows = []
    for measure in TABLE4_ORDER:
        for n in _PRESET_TABLE4_NS[preset]:
            opt = _optimized_root(measure, n, preset, seed)
            rows.append([measure, n, opt, TABLE4_OPT[measure][n],
                         _rel_dev(opt, TABLE4_OPT[measure][n])])
    _write_csv(path, header, rows)
    return path


def _tables_fig2(out_dir: str, preset: str, seed: int) -> list:
    restarts, iters = _PRESET_BUDGETS[preset]
    measures = list(_CROSSEVAL_MEASURES)
    paths = []
    for n in _PRESET_FIG2_NS[preset]:
        sets = {}
        init = sobol(n, 2)
        for m in measures:
            spec = kernel_spec(m, 2)
            final, _ = optimize(spec, init,
                                OptimizerConfig(restarts=restarts,
                                                iterations=iters, seed=seed))
            sets[m] = final
        ratios = cross_evaluate(sets, measures)
        path = os.path.join(out_dir, f"fig2_n{n}.csv")
        header = ["evaluated_measure"] + [f"optimized_for_{m}"
                                          for m in measures]
        _write_csv(path, header, (
            [m] + list(ratios[i]) for i, m in enumerate(measures)))
        paths.append(path)
    return paths


def _cmd_tables(args) -> int:
    started = time.perf_counter()
    os.makedirs(args.out, exist_ok=True)
    if args.which == "table1":
        outputs = [_tables_table1(args.out)]
    elif args.which == "table3":
        outputs = [_tables_table3(args.out, args.preset, args.seed)]
    elif args.which == "table4":
        outputs = [_tables_table4(args.out, args.preset, args.seed)]
    elif args.which == "fig2":
        outputs = _tables_fig2(args.out, args.preset, args.seed)
    else:  # pragma: no cover - argparse restricts choices
        raise ValidationError(f"unknown table {args.which!r}")
    record = _record("tables", seeds=(args.seed,), which=args.which,
                     preset=args.preset,
                     outputs=[os.path.basename(p) for p in outputs])
    _emit_record(record, os.path.join(args.out, args.which), started)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l2disc",
        description="Unified L2 discrepancy toolkit: closed forms, "
                    "geometric Monte-Carlo oracle, pathology analysis, and "
                    "point-set construction.",
        epilog="DISC_THREADS caps worker parallelism (evaluation is "
               "single-threaded and deterministic, so results are "
               "bit-identical at any setting).")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, measure=False, gamma=False, out_required=True):
        if measure:
            p.add_argument("--measure", required=True,
                           help="measure id, e.g. star, ext, per, ctr, cad, "
                                "sym, mix, asd, ctr_weighted, sym_weighted")
        if gamma:
            p.add_argument("--gamma", default=None,
                           help="comma list of per-coordinate weights "
                                "(weighted measures only)")
        p.add_argument("--out", required=out_required,
                       help="output path")

    p = sub.add_parser("gen", help="generate a point set CSV")
    p.add_argument("kind", choices=_GEN_KINDS)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--point", default=None,
                   help="comma list of coordinates for kind=point")
    p.add_argument("--grid-k", type=int, default=None, dest="grid_k",
                   help="points per axis for kind=grid")
    add_common(p)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("disc", help="closed-form squared discrepancy")
    p.add_argument("--in", dest="in_path", required=True)
    add_common(p, measure=True, gamma=True, out_required=False)
    p.set_defaults(func=_cmd_disc)

    p = sub.add_parser("oracle", help="Monte-Carlo geometric estimate")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    add_common(p, measure=True, out_required=False)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("pathology", help="pathology table CSV for d=1..D")
    p.add_argument("--d", type=int, required=True,
                   help="maximum dimension")
    add_common(p)
    p.set_defaults(func=_cmd_pathology)

    p = sub.add_parser("greedy", help="greedy extension of a point set")
    p.add_argument("--in", dest="in_path", required=True)
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--batch", type=int, default=1)
    p.add_argument("--grid-k", type=int, default=65, dest="grid_k")
    add_common(p, measure=True, gamma=True)
    p.set_defaults(func=_cmd_greedy)

    p = sub.add_parser("optimize", help="projected-gradient optimization")
    p.add_argument("--in", dest="in_path", default=None,
                   help="initial set CSV (default: sobol --n --d)")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--iters", type=int, default=20_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", type=float, default=None,
                   help="root-discrepancy target; exit 4 if missed")
    add_common(p, measure=True, gamma=True)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("crosseval", help="cross-evaluation ratio matrix")
    p.add_argument("--in", dest="in_path", required=True,
                   help="directory of {measure}.csv optimized sets")
    p.add_argument("--measure", required=True,
                   help="comma list of measures (row/column order)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_crosseval)

    p = sub.add_parser("tables", help="reproduce published tables")
    p.add_argument("--which", required=True,
                   choices=("table1", "table3", "table4", "fig2"))
    p.add_argument("--preset", default="smoke",
                   choices=tuple(_PRESET_BUDGETS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="report directory")
    p.set_defaults(func=_cmd_tables)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _check_disc_threads()
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericGuardError as exc:
        print(f"numeric guard: {exc}", file=sys.stderr)
        return 3
    except BudgetExhaustedError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
