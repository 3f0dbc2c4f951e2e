"""Command-line front end.

Subcommands write CSV or JSON for external plotting.  CSV files begin with a
``#`` line holding the invocation as JSON, and floats carry 17 significant
digits.  Exit codes: 0 success, 1 usage, 2 bad input data, 3 the convexity
condition is indeterminate.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import sys

import numpy as np

from . import __version__
from .exceptions import ConditionIndeterminateError, EntropyBoundsError, SpecError
from .extremal import CSV_HEADER, bound_curve, classify_condition, hg_range
from .measures import GRAMMAR, eval_display, make_measure
from .oracle import bracket_centers, default_slab, grid_extrema, structural_flags
from .sampling import THREADS_ENV, SampleConfig, resolve_threads, scan_violations
from .spectra import bipartite_from_json, density_spectrum, matrix_from_json, schmidt_probs

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INDETERMINATE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    return f"{float(x):.17g}"


def _header(args) -> str:
    meta = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    meta["version"] = __version__
    return "# " + json.dumps(meta, sort_keys=True)


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="\n") as fh:
            yield fh


def _dump(obj):
    sys.stdout.write(json.dumps(obj) + "\n")


def _measures(args):
    try:
        return make_measure(args.f), make_measure(args.g)
    except SpecError as exc:
        raise UsageError(str(exc)) from None


# --- subcommands ----------------------------------------------------------------


def cmd_check(args) -> int:
    f, g = _measures(args)
    report = classify_condition(f, g, args.grid)
    _dump(report.to_dict())
    return EXIT_OK if report.bounding else EXIT_INDETERMINATE


def cmd_bounds(args) -> int:
    f, g = _measures(args)
    try:
        curve = bound_curve(f, g, args.d, args.points, unchecked=args.unchecked)
    except ConditionIndeterminateError as exc:
        print(f"error: {exc} (pass --unchecked to emit the family curves)", file=sys.stderr)
        return EXIT_INDETERMINATE
    lines = [_header(args), CSV_HEADER]
    lines += [",".join(_fmt(v) for v in row) for row in curve.rows()]
    with _open_out(args.out) as fh:
        fh.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_sample(args) -> int:
    f, g = _measures(args)
    d = args.d
    if args.ensemble == "pure":
        if args.da is None or args.db is None:
            raise UsageError("--ensemble pure needs --da and --db")
        d = min(args.da, args.db)
    cfg = SampleConfig(d=d, n=args.n, seed=args.seed, ensemble=args.ensemble,
                       d_a=args.da, d_b=args.db)
    want_scatter = args.out is not None
    res = scan_violations(f, g, None, cfg, with_scatter=want_scatter)
    report = res[0] if want_scatter else res
    if want_scatter:
        scatter = res[1]
        with _open_out(args.out) as fh:
            fh.write(_header(args) + "\nHg,Hf,violation\n")
            fh.writelines(
                f"{_fmt(a)},{_fmt(b)},{c}\n"
                for a, b, c in zip(scatter.hg, scatter.hf, scatter.violation)
            )
    _dump(report.to_dict())
    return EXIT_OK


def cmd_oracle(args) -> int:
    f, g = _measures(args)
    if args.bracket:
        centers = bracket_centers(f, g, args.d, args.step, args.centers)
    else:
        lo, hi = hg_range(g, args.d)
        slab = args.slab if args.slab is not None else default_slab(g, args.step)
        t = lo + (hi - lo) * (np.arange(args.centers) + 0.5) / args.centers
        centers = [(float(c), slab) for c in t]
    tol = 2.0 * args.step
    for center, slab in centers:
        r = grid_extrema(f, g, args.d, args.step, center, slab)
        lo_flags = structural_flags(r.min_p, tol)
        hi_flags = structural_flags(r.max_p, tol)
        _dump({
            "Hg_center": center,
            "slab": slab,
            "n_in_slab": r.n_in_slab,
            "Hf_min": r.hf_min,
            "Hf_max": r.hf_max,
            "min_p": list(r.min_p),
            "max_p": list(r.max_p),
            "min_flags": sorted(s.value for s in lo_flags),
            "max_flags": sorted(s.value for s in hi_flags),
            "structure_tol": tol,
        })
    return EXIT_OK


def cmd_spectrum(args) -> int:
    try:
        f = make_measure(args.f)
    except SpecError as exc:
        raise UsageError(str(exc)) from None
    if args.input == "-":
        text = sys.stdin.read()
    else:
        with open(args.input) as fh:
            text = fh.read()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise EntropyBoundsError(f"{args.input}: invalid JSON ({exc})") from None
    if args.bipartite:
        lam = schmidt_probs(bipartite_from_json(obj))
    else:
        lam = density_spectrum(matrix_from_json(obj))
    raw = float(np.sum(f.f(lam.values)))
    _dump({
        "eigenvalues": list(lam),
        "H_f": float(eval_display(f, raw)),
        "display": f.display.name if f.display else "trace",
    })
    return EXIT_OK


# --- parser ---------------------------------------------------------------------


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="entropy-bounds",
        description="Bounds on one trace-form entropy given another.",
        epilog=f"Measure specs: {GRAMMAR}.  {THREADS_ENV} caps worker threads (0 = auto).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def pair(p):
        p.add_argument("--f", required=True, help="bounded measure")
        p.add_argument("--g", required=True, help="given measure")

    p = sub.add_parser("check", help="classify the convexity condition")
    pair(p)
    p.add_argument("--grid", type=_positive_int, default=4096)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bounds", help="write both family curves as CSV")
    pair(p)
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--points", type=_positive_int, default=201)
    p.add_argument("--out", default="-")
    p.add_argument("--unchecked", action="store_true",
                   help="emit curves even when they are not certified bounds")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sample", help="scan random states for bound violations")
    pair(p)
    p.add_argument("--d", type=_positive_int, default=None)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--ensemble", choices=["simplex", "hs", "pure"], default="hs")
    p.add_argument("--da", type=_positive_int)
    p.add_argument("--db", type=_positive_int)
    p.add_argument("--out", default=None, help="scatter CSV path")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("oracle", help="brute-force grid extrema in thin H_g slabs")
    pair(p)
    p.add_argument("--d", type=_positive_int, required=True)
    p.add_argument("--step", type=float, default=1e-2)
    p.add_argument("--centers", type=_positive_int, default=10)
    p.add_argument("--slab", type=float, default=None)
    p.add_argument("--bracket", action="store_true",
                   help="place slab edges on family grid points")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("spectrum", help="eigenvalues and entropy of a matrix from JSON")
    p.add_argument("--in", dest="input", required=True, help="JSON file, or - for stdin")
    p.add_argument("--f", required=True)
    p.add_argument("--bipartite", action="store_true",
                   help="input is a pure-state amplitude matrix; report Schmidt probabilities")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "sample" and args.ensemble != "pure" and args.d is None:
            raise UsageError("sample: --d is required unless --ensemble pure")
        if args.command == "bounds" or args.command == "oracle":
            if args.d < 2:
                raise UsageError(f"{args.command}: --d must be >= 2")
        resolve_threads()
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConditionIndeterminateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INDETERMINATE
    except (EntropyBoundsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
