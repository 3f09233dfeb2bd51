"""End-to-end numeric verification for the non-singular Hermitian variety of PG(6, q^2).

Every check records an exact expected value and the observed one; a check
passes exactly when the two are equal.  Checks are grouped, and a group can
be skipped as a whole.  Run-dependent data (timings, worker count, command
line) lives under the ``run`` key of the report so that everything else is
byte-identical across reruns and worker counts.
"""

from __future__ import annotations

import json
import time
import traceback
from dataclasses import dataclass, field as dc_field
from typing import Any, Callable, Iterable

import numpy as np

from .bounds import check_curve, homma_piecewise, random_component_free
from .census import (
    Histogram,
    flat_census,
    flat_counts,
    hyperplane_census,
    hyperplane_system,
    line_census,
    min_solid_search,
    spectrum_solve,
)
from .errors import BadParameters
from .gf import Field, hermitian_field
from .hermitian import (
    cone_decomposition,
    cone_points,
    expected_count,
    flat_perp,
    hermitian_count,
    random_form,
    secant_section_count,
    standard_form,
    standard_generator,
    tangent_section_count,
    variety_points,
)
from .polyhyp import fermat, linear_form, product, rational_points
from .projgeom import PointSet, ProjSpace, gaussian_binomial, sample_points, theta

GROUPS = {
    "cardinality": 1,
    "lines": 2,
    "solids": 3,
    "sections": 4,
    "hyperplanes": 5,
    "eq2": 6,
    "rehearsal": 7,
    "curves": 8,
    "cones": 9,
}

DEFAULT_SEED = 20260
DEFAULT_POINTS = 100
DEFAULT_SOLIDS = 10_000
DEFAULT_CURVES = 10_000


@dataclass
class Check:
    name: str
    criterion: int
    expected: Any
    observed: Any
    status: str
    info: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "criterion": self.criterion, "expected": _plain(self.expected),
                "observed": _plain(self.observed), "status": self.status, "info": _plain(self.info)}


@dataclass
class RunReport:
    parameters: dict
    modulus: list[int]
    checks: list[Check]
    run: dict

    @property
    def executed(self) -> list[Check]:
        return [c for c in self.checks if c.status != "skip"]

    @property
    def ok(self) -> bool:
        return all(c.status == "pass" for c in self.executed)

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def summary(self) -> dict:
        tally = {"pass": 0, "fail": 0, "skip": 0}
        for c in self.checks:
            tally[c.status] += 1
        return {**tally, "ok": self.ok}

    def to_json(self, with_run: bool = True) -> dict:
        out = {"parameters": self.parameters, "modulus": self.modulus,
               "checks": [c.to_json() for c in self.checks], "summary": self.summary()}
        if with_run:
            out["run"] = self.run
        return out

    def dumps(self, with_run: bool = True) -> str:
        return json.dumps(self.to_json(with_run), sort_keys=True, indent=2)


def _plain(x: Any) -> Any:
    """JSON-ready copy: dict keys become strings, numpy scalars become ints."""
    if isinstance(x, Histogram):
        x = x.bins
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


class _Recorder:
    def __init__(self, skip: Iterable[str]):
        self.skip = set(skip)
        unknown = self.skip - set(GROUPS)
        if unknown:
            raise BadParameters(f"unknown check groups {sorted(unknown)}")
        self.checks: list[Check] = []
        self.timing: dict[str, float] = {}

    def group(self, name: str, body: Callable[[Callable], None], names: list[str]) -> None:
        crit = GROUPS[name]
        if name in self.skip:
            for n in names:
                self.checks.append(Check(n, crit, None, None, "skip"))
            return
        t0 = time.perf_counter()
        done = len(self.checks)

        def record(check_name: str, expected: Any, observed: Any, **info):
            e, o = _plain(expected), _plain(observed)
            self.checks.append(Check(check_name, crit, e, o, "pass" if e == o else "fail", info))

        try:
            body(record)
        except Exception as exc:  # a failing group must not stop the others
            recorded = {c.name for c in self.checks[done:]}
            for n in names:
                if n not in recorded:
                    self.checks.append(Check(n, crit, None, f"error: {type(exc).__name__}: {exc}", "fail",
                                             {"traceback": traceback.format_exc().splitlines()[-3:]}))
        self.timing[name] = round(time.perf_counter() - t0, 3)


def _two_bin(section_t: int, section_s: int, card: int, total: int) -> dict[int, int]:
    return {section_t: card, section_s: total - card}


def verify_theorem(q: int = 3, *, points: PointSet | None = None, skip: Iterable[str] = (),
                   seed: int = DEFAULT_SEED, npoints: int = DEFAULT_POINTS, solid_samples: int = DEFAULT_SOLIDS,
                   curve_samples: int = DEFAULT_CURVES, workers: int = 1, allow_other_q: bool = False,
                   hyperplane_method: str = "auto") -> RunReport:
    """Run criteria 1-9 on H(6, q^2) (or on ``points`` when given) and collect a report.

    Seeds derived from ``seed``: points seed, solids seed + 1, curves seed + 2,
    degenerate forms seed + 3.
    """
    if q != 3 and not allow_other_q:
        raise BadParameters("verify_theorem is budgeted for q = 3; pass allow_other_q to override")
    t_start = time.perf_counter()
    F = hermitian_field(q)
    m = F.order
    space = ProjSpace(6, F)
    form = standard_form(6, F)
    if points is not None and points.space != space:
        raise BadParameters(f"point set lives on {points.space!r}, expected {space!r}")
    rec = _Recorder(skip)
    state: dict[str, Any] = {}

    def S() -> PointSet:
        if "S" not in state:
            state["S"] = points if points is not None else variety_points(form, workers)
        return state["S"]

    # 1. cardinalities
    def cardinality(record):
        for r in range(2, 7):
            Fr = standard_form(r, F)
            X = S() if r == 6 and points is None else variety_points(Fr, workers)
            record(f"card_H({r},{m})", hermitian_count(r, q), X.card)
        record("card_formula_r6", q**11 + q**9 + q**7 + q**4 + q**2 + 1, hermitian_count(6, q))
        fer = rational_points(fermat(7, F), space, workers)
        record("card_fermat", hermitian_count(6, q), fer.card)
        record("card_input", hermitian_count(6, q), S().card)

    rec.group("cardinality", cardinality,
              [f"card_H({r},{m})" for r in range(2, 7)] + ["card_formula_r6", "card_fermat", "card_input"])

    # 2. blocking and line spectrum through random points
    allowed = {1, q + 1, q * q + 1}

    def lines(record):
        idx = sample_points(space, npoints, seed)
        pivots = [space.point(row.tolist()) for row in space.unindex(idx)]
        h = line_census(S(), "through", pivots=pivots, workers=workers)
        record("lines_through_points", npoints * theta(space.n - 1, m), h.family_size)
        record("line_sizes_outside_spectrum", [], sorted(set(h.bins) - allowed), bins=h.bins)
        record("lines_missing_variety", 0, h.bins.get(0, 0))

    rec.group("lines", lines, ["lines_through_points", "line_sizes_outside_spectrum", "lines_missing_variety"])

    # 3. minimal solids
    plane_size = theta(2, m)

    def solids(record):
        G = standard_generator(form)
        state["solid"] = W = flat_perp(form, G)
        record("generator_plane_dim", 2, G.dim)
        record("generator_plane_in_variety", plane_size, S().count_in(G))
        record("perp_solid_dim", 3, W.dim)
        record("perp_solid_section", plane_size, S().count_in(W))
        counts, _ = flat_counts(S(), 3, "sample", count=solid_samples, seed=seed + 1, workers=workers)
        record("sampled_solids", solid_samples, len(counts))
        record("sampled_solids_below_bound", 0, int((counts < plane_size).sum()), min=int(counts.min()))
        found = min_solid_search(S(), [G], workers=workers)
        record("min_solid_search_hint", plane_size, found.size, searched=found.searched)

    rec.group("solids", solids, ["generator_plane_dim", "generator_plane_in_variety", "perp_solid_dim",
                                 "perp_solid_section", "sampled_solids", "sampled_solids_below_bound",
                                 "min_solid_search_hint"])

    # 4. 4- and 5-spaces through the minimal solid
    def sections(record):
        W = state.get("solid") or flat_perp(form, standard_generator(form))
        h4 = flat_census(S(), 4, "through", pivot=W, workers=workers)
        record("four_spaces_through_solid", {expected_count(4, q, 2): gaussian_binomial(3, 1, m)}, h4)
        h5 = flat_census(S(), 5, "through", pivot=W, workers=workers)
        record("five_spaces_through_solid", {expected_count(5, q, 1): gaussian_binomial(3, 2, m)}, h5)

    rec.group("sections", sections, ["four_spaces_through_solid", "five_spaces_through_solid"])

    # 5. hyperplane spectrum
    n_hyp = gaussian_binomial(7, 6, m)
    tan6, sec6 = tangent_section_count(6, q), secant_section_count(6, q)
    spectrum6 = _two_bin(tan6, sec6, hermitian_count(6, q), n_hyp)

    def hyperplanes(record):
        h = hyperplane_census(S(), hyperplane_method, workers)
        state["hyp"] = h
        record("hyperplanes_total", n_hyp, h.family_size)
        record("hyperplane_spectrum", spectrum6, h)

    rec.group("hyperplanes", hyperplanes, ["hyperplanes_total", "hyperplane_spectrum"])

    # 6. the double-counting system
    mid = sec6 - q**4

    def eq2(record):
        sys = hyperplane_system(space, S().card, (tan6, mid, sec6))
        record("eq2_totals", [n_hyp, hermitian_count(6, q) * theta(5, m),
                              hermitian_count(6, q) * (hermitian_count(6, q) - 1) * theta(4, m)], list(sys.totals))
        sol = spectrum_solve(sys)
        record("eq2_middle_size_zero", 0, sol[mid], middle_size=mid)
        record("eq2_solution", {tan6: hermitian_count(6, q), mid: 0, sec6: n_hyp - hermitian_count(6, q)}, sol)
        census = state["hyp"].bins if "hyp" in state else spectrum6
        record("eq2_matches_census", _plain(census), {k: v for k, v in sol.items() if v},
                source="census" if "hyp" in state else "expected")

    rec.group("eq2", eq2, ["eq2_totals", "eq2_middle_size_zero", "eq2_solution", "eq2_matches_census"])

    # 7. rehearsal on H(4, q^2)
    def rehearsal(record):
        f4 = standard_form(4, F)
        X4 = variety_points(f4, workers)
        nh4 = gaussian_binomial(5, 4, m)
        c4 = hermitian_count(4, q)
        h = hyperplane_census(X4, "auto", workers)
        record("h4_hyperplane_spectrum",
               _two_bin(tangent_section_count(4, q), secant_section_count(4, q), c4, nh4), h)
        lc = line_census(X4, "full", workers=workers)
        record("h4_lines_total", gaussian_binomial(5, 2, m), lc.family_size)
        record("h4_line_sizes_outside_spectrum", [], sorted(set(lc.bins) - allowed), bins=lc.bins)
        record("h4_blocking_number", 1, lc.min)

    rec.group("rehearsal", rehearsal, ["h4_hyperplane_spectrum", "h4_lines_total",
                                       "h4_line_sizes_outside_spectrum", "h4_blocking_number"])

    # 8. plane curves of degree q + 1
    def curves(record):
        fc = check_curve(fermat(3, F))
        record("fermat_curve", {"N": q**3 + 1, "components": 0, "hermitian_candidate": True},
               {"N": fc.N, "components": fc.components, "hermitian_candidate": fc.hermitian_candidate})
        pencil = product([linear_form(F, [1, int(F.neg[a]), 0]) for a in range(q + 1)])
        pc = check_curve(pencil)
        record("pencil_curve", {"N": (q + 1) * m + 1, "components": q + 1},
               {"N": pc.N, "components": pc.components})
        _, N = random_component_free(F, q + 1, curve_samples, seed + 2)
        bad = (N > homma_piecewise(q)) & (N != q**3 + 1)
        vals, cnt = np.unique(N, return_counts=True)
        record("random_curves", curve_samples, len(N))
        record("random_curve_violations", 0, int(bad.sum()), N_histogram=dict(zip(vals.tolist(), cnt.tolist())))

    rec.group("curves", curves, ["fermat_curve", "pencil_curve", "random_curves", "random_curve_violations"])

    # 9. degenerate forms are cones
    def cones(record):
        rng = np.random.Generator(np.random.Philox(key=seed + 3))
        mism, cards = [], {}
        for r in range(2, 5):
            sp = ProjSpace(r, F)
            for t in range(1, min(3, r) + 1):
                f = random_form(sp, r + 1 - t, rng)
                V = variety_points(f, workers)
                vertex, base, base_flat = cone_decomposition(f)
                C = cone_points(vertex, base, base_flat)
                cards[f"r={r},t={t}"] = V.card
                if V != C or V.card != expected_count(r, q, t):
                    mism.append(f"r={r},t={t}")
        record("cone_cases", sum(min(3, r) for r in range(2, 5)), len(cards))
        record("cone_mismatches", [], mism, cards=cards)

    rec.group("cones", cones, ["cone_cases", "cone_mismatches"])

    params = {"p": F.p, "k": F.k, "n": 6, "q": q, "seed": seed, "points": npoints,
              "solid_samples": solid_samples, "curve_samples": curve_samples,
              "input": "override" if points is not None else "standard",
              "skip": sorted(rec.skip), "hyperplane_method": hyperplane_method}
    run = {"workers": workers, "wall_time": round(time.perf_counter() - t_start, 3), "timing": rec.timing}
    return RunReport(params, list(F.modulus), rec.checks, run)


def strip_run(text: str) -> str:
    """Report JSON with the run-dependent section removed."""
    obj = json.loads(text)
    obj.pop("run", None)
    return json.dumps(obj, sort_keys=True, indent=2)
