"""``walshlab`` command line: run library operations and print JSON or CSV reports.

Exit codes: 0 success, 1 a verification failed, 2 bad arguments, 3 output error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import config
from .dyadic import DyadicSet, DyadicStep
from .khintchine import (
    DEFAULT_MAJORIZATION_GRID,
    check_bound_eq1,
    eq1_bound,
    equidistribution_tables,
    find_local_N,
    majorization_constant,
    scan_constants,
)
from .norms import INF, Lp, format_spec, norm, parse_spec
from .projection import averaging, build_Qn, verify_averaging_identity
from .walsh import (
    as_fraction,
    l2_norm,
    synthesize,
    theta_matrix,
    walsh,
    walsh_product_index,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _float_token(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    if not any(c in text for c in ".en"):
        text += ".0"
    return text


def to_json(obj) -> str:
    """Deterministic JSON: insertion-ordered keys, floats with 17 significant digits."""
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _float_token(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, Fraction):
        return json.dumps(str(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {to_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(to_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        header = list(rows[0])
        writer.writerow(header)
        for row in rows:
            writer.writerow([_csv_cell(row[k]) for k in header])
    return buf.getvalue()


def _csv_cell(v) -> str:
    if isinstance(v, (list, tuple, dict)):
        return to_json(v)
    if isinstance(v, float):
        return _float_token(v)
    return str(v)


def emit(report, fmt: str = "json", rows: Sequence[dict] | None = None) -> bytes:
    """Serialize a report; CSV uses ``rows`` when given, else the report as one row."""
    if fmt == "json":
        return (to_json(report) + "\n").encode()
    if fmt == "csv":
        return to_csv(rows if rows is not None else [report]).encode()
    raise ValueError(f"unknown format {fmt!r}")


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _load_list(value: str, parse) -> list:
    """Inline comma list, or ``@path`` to a JSON array."""
    if value.startswith("@"):
        with open(value[1:]) as fh:
            return list(json.load(fh))
    return parse(value)


def _coeffs_and_indices(args) -> tuple[list[float], list[int]]:
    indices = [int(i) for i in _load_list(args.indices, _ints)]
    if args.coeffs is None:
        coeffs = [1.0] * len(indices)
    else:
        coeffs = [float(c) for c in _load_list(args.coeffs, _floats)]
    if len(coeffs) != len(indices):
        raise ValueError(f"{len(coeffs)} coefficients for {len(indices)} indices")
    return coeffs, indices


def _cmd_walsh_eval(args):
    if args.index is not None:
        f = walsh(args.index, args.order)
        return {"index": args.index, **f.to_dict()}
    if args.indices is None:
        raise ValueError("give --index or --indices")
    coeffs, indices = _coeffs_and_indices(args)
    f = synthesize(coeffs, indices, args.order)
    return {"indices": indices, "coeffs": coeffs, **f.to_dict()}


def _cmd_theta(args):
    theta = theta_matrix(args.order)
    gram = theta.gram()
    return {
        "n": args.order,
        "entries": theta.entries.tolist(),
        "symmetric": theta.is_symmetric(),
        "orthogonal": bool(np.array_equal(gram, (1 << args.order) * np.eye(1 << args.order, dtype=np.int64))),
    }


def _cmd_norm(args):
    spec = parse_spec(args.spec)
    if args.step is not None:
        with open(args.step) as fh:
            f = DyadicStep.from_dict(json.load(fh))
        return {"spec": format_spec(spec), "norm": norm(f, spec)}
    if args.indices is None:
        raise ValueError("give --indices/--coeffs or --step")
    coeffs, indices = _coeffs_and_indices(args)
    value = norm(synthesize(coeffs, indices), spec)
    l2 = l2_norm(coeffs)
    return {
        "spec": format_spec(spec),
        "norm": value,
        "l2": l2,
        "ratio": value / l2 if l2 > 0 else None,
    }


def _cmd_scan(args):
    spec = parse_spec(args.spec)
    trace = [] if args.per_sample else None
    report = scan_constants(
        spec, args.q, args.M, args.samples, args.seed, args.search, args.workers, trace
    )
    out = report.to_dict()
    if isinstance(spec, Lp) and spec.p is not INF:
        half = spec.p / 2
        if half >= 1 and half.is_integer():
            n = int(half)
            out["eq1_bound"] = eq1_bound(n, args.q)
            out["eq1_ok"] = check_bound_eq1(n, args.q, report)
    rows = [{"sample_index": i, "ratio": r} for i, r in trace] if trace is not None else None
    return out, rows


def _cmd_verify(args):
    check = args.check
    if check == "equidistribution":
        coeffs, indices = _coeffs_and_indices(args)
        w_table, r_table = equidistribution_tables(coeffs, indices)
        equal = w_table == r_table
        report = {
            "check": check,
            "equal": equal,
            "walsh_distribution": w_table.to_list(),
            "rademacher_distribution": r_table.to_list(),
        }
        return report, equal
    n = args.order
    if check == "theta":
        theta = theta_matrix(n)
        sym = theta.is_symmetric()
        orth = bool(np.array_equal(theta.gram(), (1 << n) * np.eye(1 << n, dtype=np.int64)))
        return {"check": check, "n": n, "symmetric": sym, "orthogonal": orth}, sym and orth
    if check == "xor":
        size = 1 << n
        table = np.stack([walsh(k, n).values for k in range(size)])
        bad = 0
        for i in range(size):
            prods = table[i] * table
            target = table[[walsh_product_index(i, j) for j in range(size)]]
            bad += int(np.sum(np.any(prods != target, axis=1)))
        return {"check": check, "n": n, "pairs": size * size, "mismatches": bad}, bad == 0
    if check == "averaging":
        bad = 0
        for s in range(n + 1):
            for k in range(1 << n):
                w = walsh(k, n)
                want = w if k < (1 << s) else DyadicStep.zero(n)
                bad += averaging(w, s) != want
        return {"check": check, "n": n, "mismatches": int(bad)}, bad == 0
    raise ValueError(f"unknown check {check!r}")


def _parse_perturbation(text: str | None) -> list[tuple[int, int, Fraction]]:
    out = []
    for item in (text or "").split(";"):
        item = item.strip()
        if not item:
            continue
        m, i0, c = item.split(":")
        out.append((int(m), int(i0), Fraction(c.strip())))
    return out


def _cmd_project_verify(args):
    selected = _ints(args.selected)
    Q = build_Qn(args.order, selected, _parse_perturbation(args.perturb))
    ok, residual = verify_averaging_identity(args.order, selected, Q)
    report = {
        "status": "PASS" if ok else "FAIL",
        "n": args.order,
        "selected": selected,
        "max_residual": residual,
        "max_residual_float": float(residual),
    }
    return report, ok


def _cmd_local_find_n(args):
    E = DyadicSet.parse(args.set)
    spec = parse_spec(args.spec)
    N = find_local_N(E, args.q, spec, args.M, args.samples, args.seed, args.floor)
    return {
        "set": E.format(),
        "spec": format_spec(spec),
        "q": str(as_fraction(args.q)),
        "M": args.M,
        "samples": args.samples,
        "seed": args.seed,
        "floor_A": args.floor,
        "N": N,
        "heuristic": True,
        "note": "sampling estimate; not the existence constant of the local inequality",
    }


def _cmd_majorize(args):
    coeffs, indices = _coeffs_and_indices(args)
    grid = DEFAULT_MAJORIZATION_GRID if args.grid is None else [Fraction(t) for t in args.grid.split(",")]
    C = majorization_constant(coeffs, indices, grid, reverse=args.reverse)
    return {
        "indices": indices,
        "coeffs": coeffs,
        "direction": "rademacher_by_walsh" if args.reverse else "walsh_by_rademacher",
        "experimental": bool(args.reverse),
        "C": C,
        "grid_min": min(grid),
        "grid_max": max(grid),
    }


def _add_series_args(p, required: bool = False):
    p.add_argument("--indices", required=required, help="comma list, or @file.json")
    p.add_argument("--coeffs", help="comma list, or @file.json (default: all ones)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walshlab", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--max-order", type=int, help=f"order cap (at most {config.DEFAULT_MAX_ORDER})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walsh-eval", parents=[common], help="evaluate w_k or a Walsh sum")
    p.add_argument("--index", type=int)
    p.add_argument("--order", type=int)
    _add_series_args(p)
    p.set_defaults(func=_cmd_walsh_eval)

    p = sub.add_parser("theta", parents=[common], help="sign matrix theta_{j,k} = w_k(I^n_j)")
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=_cmd_theta)

    p = sub.add_parser("norm", parents=[common], help="norm of a Walsh sum or a stored step function")
    p.add_argument("--spec", required=True, help="lp:2, lp:inf, mp:2, local:0/2,3/2|lp:2")
    p.add_argument("--step", help="JSON file {order, values}")
    _add_series_args(p)
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("khintchine-scan", parents=[common], help="empirical Khintchine constants")
    p.add_argument("--spec", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--search", choices=("random", "ascent"), default="random")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--per-sample", action="store_true", help="CSV rows (sample_index, ratio)")
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("verify", parents=[common], help="exact identity checks")
    p.add_argument("check", choices=("equidistribution", "theta", "xor", "averaging"))
    p.add_argument("--order", type=int, default=8)
    _add_series_args(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("local-find-n", parents=[common], help="heuristic local threshold N")
    p.add_argument("--set", required=True, help="dyadic set, e.g. 0/2,3/2")
    p.add_argument("--q", required=True)
    p.add_argument("--spec", default="lp:2")
    p.add_argument("--M", type=int, default=4)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--floor", type=float, default=0.5)
    p.set_defaults(func=_cmd_local_find_n)

    p = sub.add_parser("project-verify", parents=[common], help="check P_n = 2^-n sum T_j Q T_j")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--selected", required=True)
    p.add_argument("--perturb", help="semicolon list of m:i0:c, e.g. '1:5:1;2:7:-3/4'")
    p.set_defaults(func=_cmd_project_verify)

    p = sub.add_parser("majorize", parents=[common], help="distributional majorization constant")
    _add_series_args(p, required=True)
    p.add_argument("--grid", help="comma list of candidates > 1 (default 1.1..4.0)")
    p.add_argument("--reverse", action="store_true", help="Rademacher by Walsh (experimental)")
    p.set_defaults(func=_cmd_majorize)
    return parser


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout.buffer if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    saved = os.environ.get(config.MAX_ORDER_ENV)
    status = EXIT_OK
    try:
        if args.max_order is not None:
            if not 0 <= args.max_order <= config.DEFAULT_MAX_ORDER:
                raise ValueError(f"--max-order must lie in [0, {config.DEFAULT_MAX_ORDER}]")
            os.environ[config.MAX_ORDER_ENV] = str(args.max_order)
        result = args.func(args)
        rows = None
        if args.func is _cmd_scan:
            result, rows = result
        elif isinstance(result, tuple):
            result, ok = result
            status = EXIT_OK if ok else EXIT_FAILED
        payload = emit(result, args.format, rows)
    except (ValueError, TypeError, KeyError, OSError) as exc:
        if isinstance(exc, OSError) and not isinstance(exc, FileNotFoundError):
            print(f"walshlab: {exc}", file=stderr)
            return EXIT_IO
        print(f"walshlab: error: {exc}", file=stderr)
        return EXIT_USAGE
    finally:
        if args.max_order is not None:
            if saved is None:
                os.environ.pop(config.MAX_ORDER_ENV, None)
            else:
                os.environ[config.MAX_ORDER_ENV] = saved

    try:
        if args.out:
            with open(args.out, "wb") as fh:
                fh.write(payload)
        else:
            stdout.write(payload)
            stdout.flush()
    except OSError as exc:
        print(f"walshlab: cannot write report: {exc}", file=stderr)
        return EXIT_IO
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
