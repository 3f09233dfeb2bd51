"""Command-line driver: build, census, bounds-batch, verify-theorem."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Sequence

from ._parallel import default_workers
from .bounds import check_batch, rows_to_csv
from .census import flat_census, hyperplane_census, line_census
from .errors import BadParameters, HermGeomError
from .gf import hermitian_field
from .hermitian import diagonal_form, expected_count, variety_points
from .polyhyp import HomoPoly, fermat, rational_points
from .projgeom import PointSet, ProjSpace, Subspace, point_unindex, sample_points
from .theorem import DEFAULT_CURVES, DEFAULT_POINTS, DEFAULT_SEED, DEFAULT_SOLIDS, GROUPS, verify_theorem

FAMILIES = {"lines": 1, "solids": 3, "4spaces": 4, "5spaces": 5}


def _dump(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _write(path: str | Path, text: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(text)


def _field_info(F) -> dict:
    return {"p": F.p, "k": F.k, "modulus": list(F.modulus)}


# -- build ------------------------------------------------------------------------------


def cmd_build(args) -> int:
    if args.kind == "poly":
        if not args.poly:
            raise SystemExit("build poly needs --poly FILE")
        f = HomoPoly.load(args.poly)
        space = ProjSpace(f.nvars - 1, f.field)
        X = rational_points(f, space, args.workers)
        expected = args.expect
        params = {"kind": "poly", "file": str(args.poly), "degree": f.degree}
    else:
        F = hermitian_field(args.q)
        if args.kind == "hermitian":
            if not 0 <= args.t <= args.r:
                raise SystemExit(f"t={args.t} must lie in [0, r]")
            diag = [1] * (args.r + 1 - args.t) + [0] * args.t
            form = diagonal_form(diag, F)
            space = form.space
            X = variety_points(form, args.workers)
            expected = expected_count(args.r, args.q, args.t)
            params = {"kind": "hermitian", "r": args.r, "q": args.q, "t": args.t}
        else:
            space = ProjSpace(args.r, F)
            X = rational_points(fermat(args.r + 1, F), space, args.workers)
            expected = expected_count(args.r, args.q, 0)
            params = {"kind": "fermat", "r": args.r, "q": args.q}
    X.save(args.out)
    summary = {"parameters": params, "field": _field_info(space.field), "n": space.n,
               "card": X.card, "expected": expected, "points_file": str(args.out)}
    summary["pass"] = None if expected is None else X.card == expected
    _write(Path(args.out).with_suffix(".summary.json"), _dump(summary))
    print(f"card {X.card}" + ("" if expected is None else f" expected {expected} {'pass' if summary['pass'] else 'FAIL'}"))
    return 0 if summary["pass"] in (None, True) else 1


# -- census ------------------------------------------------------------------------------


def _pivot(space: ProjSpace, args) -> Subspace | None:
    if args.pivot:
        return Subspace.from_rows(space, json.loads(args.pivot))
    if args.pivot_point is not None:
        return Subspace(space, (point_unindex(space, args.pivot_point).coords,))
    return None


def cmd_census(args) -> int:
    X = PointSet.load(args.input)
    space = X.space
    family = args.family
    if (args.mode == "sample" or args.pivot_random) and (args.seed is None or not (args.samples or args.pivot_random)):
        raise BadParameters("sampling needs an explicit --seed and a count (--samples or --pivot-random)")
    if family == "hyperplanes" and args.mode == "full":
        hist = hyperplane_census(X, args.method, args.workers)
    elif family == "lines" and args.mode == "through" and args.pivot_random:
        idx = sample_points(space, args.pivot_random, args.seed)
        pivots = [space.point(r.tolist()) for r in space.unindex(idx)]
        hist = line_census(X, "through", pivots=pivots, workers=args.workers)
    else:
        d = space.n - 1 if family == "hyperplanes" else FAMILIES[family]
        hist = flat_census(X, d, args.mode, pivot=_pivot(space, args), count=args.samples,
                           seed=args.seed, workers=args.workers)
    report = {"family": family, "mode": hist.mode, "seed": args.seed, "field": _field_info(space.field), "n": space.n, "card": X.card,
              "histogram": hist.to_json()}
    status = 0
    if args.expect:
        want = {int(k): int(v) for k, v in json.loads(args.expect).items()}
        report["expect"] = {str(k): v for k, v in sorted(want.items())}
        report["pass"] = want == hist.bins
        status |= not report["pass"]
    if args.expect_sizes:
        allowed = {int(s) for s in json.loads(args.expect_sizes)}
        report["expect_sizes"] = sorted(allowed)
        report["sizes_pass"] = set(hist.bins) <= allowed
        status |= not report["sizes_pass"]
    if args.out:
        _write(Path(args.out).with_suffix(".json"), _dump(report))
        _write(Path(args.out).with_suffix(".csv"), hist.to_csv())
    print(hist.to_csv(), end="")
    if status:
        print("expectation mismatch", file=sys.stderr)
    return int(status)


# -- bounds-batch ---------------------------------------------------------------------------


def cmd_bounds_batch(args) -> int:
    with open(args.input) as fh:
        rows = list(check_batch(fh))
    text = rows_to_csv(rows)
    if args.out:
        _write(args.out, text)
    else:
        print(text, end="")
    bad = sum(any(v == "VIOLATED" for k, v in r.items() if k.startswith("verdict_")) for r in rows)
    print(f"{len(rows)} curves, {bad} with violated bounds", file=sys.stderr)
    return 1 if bad else 0


# -- verify-theorem -----------------------------------------------------------------------------


def cmd_verify(args, argv: Sequence[str]) -> int:
    skip = list(args.skip or [])
    if args.no_hyperplane_census:
        skip.append("hyperplanes")
    points = PointSet.load(args.points) if args.points else None
    rep = verify_theorem(args.q, points=points, skip=skip, seed=args.seed, npoints=args.npoints,
                         solid_samples=args.samples, curve_samples=args.curve_samples, workers=args.workers,
                         allow_other_q=args.allow_other_q, hyperplane_method=args.method)
    rep.run["command"] = ["hermgeom", *argv]
    for c in rep.checks:
        line = f"[{c.status.upper():4}] criterion {c.criterion} {c.name}"
        if c.status == "fail":
            line += f": expected {c.expected!r}, observed {c.observed!r}"
        print(line)
    s = rep.summary()
    print(f"{s['pass']} passed, {s['fail']} failed, {s['skip']} skipped")
    if args.out:
        _write(args.out, rep.dumps())
    return rep.exit_code


# -- parser ------------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hermgeom", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--workers", type=int, default=default_workers())
        return p

    b = common(sub.add_parser("build", help="enumerate a variety and save it as a PGPS point set"))
    b.add_argument("kind", choices=["hermitian", "fermat", "poly"])
    b.add_argument("--r", type=int, default=6, help="projective dimension")
    b.add_argument("--q", type=int, default=3, help="the field is GF(q^2)")
    b.add_argument("--t", type=int, default=0, help="radical dimension (hermitian only)")
    b.add_argument("--poly", help="polynomial JSON file (poly only)")
    b.add_argument("--expect", type=int, help="expected cardinality (poly only)")
    b.add_argument("--out", required=True, help="PGPS output path; the summary goes next to it as .summary.json")

    c = common(sub.add_parser("census", help="intersection census of a point set"))
    c.add_argument("--in", dest="input", required=True, help="PGPS point set")
    c.add_argument("--family", required=True, choices=[*FAMILIES, "hyperplanes"])
    c.add_argument("--mode", default="full", choices=["full", "through", "sample"])
    c.add_argument("--pivot", help="through mode: pivot flat as JSON rows")
    c.add_argument("--pivot-point", type=int, help="through mode: pivot point index")
    c.add_argument("--pivot-random", type=int, help="lines through this many seeded random points")
    c.add_argument("--samples", type=int, help="sample mode: number of flats")
    c.add_argument("--seed", type=int, help="required for sample mode and --pivot-random")
    c.add_argument("--method", default="auto", choices=["auto", "accumulate", "transform"])
    c.add_argument("--expect", help="expected bins as JSON {size: count}")
    c.add_argument("--expect-sizes", help="allowed sizes as a JSON list")
    c.add_argument("--out", help="output prefix for .json and .csv")

    bb = sub.add_parser("bounds-batch", help="check plane curves from a JSON-lines file")
    bb.add_argument("--in", dest="input", required=True)
    bb.add_argument("--out", help="CSV output (stdout when omitted)")

    v = common(sub.add_parser("verify-theorem", help="run the full acceptance pipeline"))
    v.add_argument("--q", type=int, default=3)
    v.add_argument("--allow-other-q", action="store_true", help="lift the q = 3 guard")
    v.add_argument("--points", help="PGPS point set to test instead of the constructed variety")
    v.add_argument("--skip", action="append", choices=sorted(GROUPS), help="skip a check group (repeatable)")
    v.add_argument("--no-hyperplane-census", action="store_true")
    v.add_argument("--mode", dest="method", default="auto", choices=["auto", "accumulate", "transform"],
                   help="hyperplane census engine")
    v.add_argument("--seed", type=int, default=DEFAULT_SEED)
    v.add_argument("--npoints", type=int, default=DEFAULT_POINTS, help="random points for the line check")
    v.add_argument("--samples", type=int, default=DEFAULT_SOLIDS, help="random solids")
    v.add_argument("--curve-samples", type=int, default=DEFAULT_CURVES)
    v.add_argument("--out", help="JSON report path")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        if args.command == "build":
            code = cmd_build(args)
        elif args.command == "census":
            code = cmd_census(args)
        elif args.command == "bounds-batch":
            code = cmd_bounds_batch(args)
        else:
            code = cmd_verify(args, argv)
    except (HermGeomError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(f"done in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
