"""Homogeneous polynomials over a finite field and their zero loci.

A :class:`HomoPoly` stores only its nonzero terms, keyed by exponent vector.
Whole-space evaluation uses per-exponent power tables so each monomial costs
a handful of table lookups per point.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._parallel import pmap, split_range
from .errors import DegreeTooHighForCriterion, DimensionMismatch
from .gf import Field, field_build
from .projgeom import PointSet, ProjPoint, ProjSpace, Subspace, enumerate_flats, flat_batches, flat_point_indices

Exps = tuple[int, ...]


def monomials(nvars: int, degree: int) -> list[Exps]:
    """Exponent vectors of all monomials of the given degree, lex-descending."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), degree):
        e = [0] * nvars
        for v in combo:
            e[v] += 1
        out.append(tuple(e))
    return out


@dataclass(frozen=True)
class HomoPoly:
    """A homogeneous polynomial; ``terms`` is empty only for the zero polynomial."""

    field: Field
    nvars: int
    degree: int
    terms: tuple[tuple[Exps, int], ...]

    @classmethod
    def from_terms(cls, field: Field, nvars: int, degree: int,
                   terms: Mapping[Exps, int] | Iterable[tuple[Exps, int]]) -> HomoPoly:
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exps, int] = {}
        for e, c in items:
            e = tuple(int(x) for x in e)
            if len(e) != nvars:
                raise DimensionMismatch(f"exponent vector {e} has wrong length")
            if sum(e) != degree or min(e) < 0:
                raise ValueError(f"exponent vector {e} is not of degree {degree}")
            acc[e] = int(field.add(acc.get(e, 0), int(c)))
        return cls(field, nvars, degree, tuple(sorted((e, c) for e, c in acc.items() if c)))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, e: Exps) -> int:
        return dict(self.terms).get(tuple(e), 0)

    def __repr__(self) -> str:
        return f"HomoPoly({self.field!r}, nvars={self.nvars}, degree={self.degree}, {len(self.terms)} terms)"

    def __mul__(self, other: HomoPoly) -> HomoPoly:
        if other.nvars != self.nvars:
            raise DimensionMismatch("different numbers of variables")
        return HomoPoly.from_terms(self.field, self.nvars, self.degree + other.degree,
                                   _poly_mul(self.field, dict(self.terms), dict(other.terms)))

    # -- JSON ------------------------------------------------------------------

    def to_json(self) -> dict:
        return {"p": self.field.p, "k": self.field.k, "nvars": self.nvars, "degree": self.degree,
                "terms": [{"exps": list(e), "coeff": c} for e, c in self.terms]}

    @classmethod
    def from_json(cls, obj: dict) -> HomoPoly:
        F = field_build(obj["p"], obj["k"])
        return cls.from_terms(F, obj["nvars"], obj["degree"],
                              [(tuple(t["exps"]), t["coeff"]) for t in obj["terms"]])

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path: str | Path) -> HomoPoly:
        return cls.from_json(json.loads(Path(path).read_text()))


def _poly_mul(F: Field, a: Mapping[Exps, int], b: Mapping[Exps, int]) -> dict[Exps, int]:
    add, mul = F._scalar_tables
    out: dict[Exps, int] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = add(out.get(e, 0), mul(ca, cb))
    return {e: c for e, c in out.items() if c}


def fermat(nvars: int, field: Field) -> HomoPoly:
    """sum x_i^(q+1) over GF(q^2)."""
    q = field.require_quadratic()
    return HomoPoly.from_terms(field, nvars, q + 1,
                               {tuple(q + 1 if i == j else 0 for i in range(nvars)): 1 for j in range(nvars)})


def linear_form(field: Field, coeffs: Sequence[int]) -> HomoPoly:
    n = len(coeffs)
    return HomoPoly.from_terms(field, n, 1, {tuple(int(i == j) for i in range(n)): c for j, c in enumerate(coeffs)})


def product(polys: Sequence[HomoPoly]) -> HomoPoly:
    return functools.reduce(lambda a, b: a * b, polys)


# -- evaluation ------------------------------------------------------------------


@functools.lru_cache(maxsize=32)
def _power_table(F: Field, max_e: int) -> np.ndarray:
    """pow_table[e, x] = x**e for e <= max_e (with 0**0 = 1)."""
    xs = np.arange(F.order)
    return np.stack([np.asarray(F.pow(xs, e)) for e in range(max_e + 1)]).astype(np.int32)


def evaluate_many(f: HomoPoly, X: np.ndarray) -> np.ndarray:
    """f at every coordinate row of X."""
    X = np.asarray(X)
    if X.shape[-1] != f.nvars:
        raise DimensionMismatch(f"points have {X.shape[-1]} coordinates, polynomial has {f.nvars} variables")
    F = f.field
    T = _power_table(F, max(f.degree, 1))
    acc = np.zeros(X.shape[:-1], dtype=np.int32)
    for e, c in f.terms:
        term = np.full(X.shape[:-1], c, dtype=np.int32)
        for v, ev in enumerate(e):
            if ev:
                term = F.mul(term, T[ev][X[..., v]])
        acc = F.add(acc, term)
    return acc


def evaluate(f: HomoPoly, P: ProjPoint | Sequence[int]) -> int:
    coords = P.coords if isinstance(P, ProjPoint) else tuple(P)
    if len(coords) != f.nvars:
        raise DimensionMismatch(f"point has {len(coords)} coordinates, polynomial has {f.nvars} variables")
    return int(evaluate_many(f, np.asarray([coords]))[0])


def _zero_chunk(f: HomoPoly, space: ProjSpace, bounds: tuple[int, int]) -> np.ndarray:
    a, b = bounds
    X = space.unindex(np.arange(a, b))
    return np.flatnonzero(evaluate_many(f, X) == 0) + a


def rational_points(f: HomoPoly, space: ProjSpace, workers: int = 1, chunk: int = 1 << 17) -> PointSet:
    """The zero locus of f among the points of ``space``."""
    if space.n + 1 != f.nvars or space.field != f.field:
        raise DimensionMismatch(f"{f!r} does not live on {space!r}")
    N = space.npoints
    parts = split_range(N, max(workers, -(-N // chunk)))
    found = pmap(functools.partial(_zero_chunk, f, space), parts, workers)
    return PointSet.from_indices(space, np.concatenate(found))


# -- restriction ------------------------------------------------------------------


def restrict(f: HomoPoly, S: Subspace) -> HomoPoly:
    """Pull f back along x = sum_i u_i b_i, where b_i are the basis rows of S."""
    if S.space.n + 1 != f.nvars:
        raise DimensionMismatch("flat and polynomial live in different spaces")
    F = f.field
    r = S.dim + 1
    unit = [tuple(int(i == j) for i in range(r)) for j in range(r)]
    linear = []
    for col in range(f.nvars):
        linear.append({unit[i]: S.basis[i][col] for i in range(r) if S.basis[i][col]})

    powers: dict[tuple[int, int], dict[Exps, int]] = {}

    def power(v: int, e: int) -> dict[Exps, int]:
        if e == 0:
            return {(0,) * r: 1}
        key = (v, e)
        if key not in powers:
            powers[key] = _poly_mul(F, power(v, e - 1), linear[v])
        return powers[key]

    add, mul = F._scalar_tables
    out: dict[Exps, int] = {}
    for e, c in f.terms:
        term: dict[Exps, int] = {(0,) * r: c}
        for v, ev in enumerate(e):
            if ev:
                term = _poly_mul(F, term, power(v, ev))
                if not term:
                    break
        for te, tc in term.items():
            out[te] = add(out.get(te, 0), tc)
    return HomoPoly.from_terms(F, r, f.degree, out)


def contains_flat(f: HomoPoly, S: Subspace) -> bool:
    """True when f vanishes on every point of S."""
    if S.dim >= 3:
        return restrict(f, S).is_zero
    vals = evaluate_many(f, S.space.all_points[S.point_indices()] if S.space.npoints <= 1 << 22
                         else S.space.unindex(S.point_indices()))
    return bool(np.all(vals == 0))


# -- plane curves -------------------------------------------------------------------


@dataclass(frozen=True)
class CurveReport:
    degree: int
    N: int
    has_linear_component: bool
    lines: tuple[Subspace, ...]


@functools.lru_cache(maxsize=8)
def plane_lines(F: Field) -> tuple[tuple[Subspace, ...], np.ndarray]:
    """All lines of PG(2, F) and their point indices, shape (lines, m+1)."""
    plane = ProjSpace(2, F)
    bases = np.concatenate(list(flat_batches(plane, 1, "full")))
    pts = flat_point_indices(plane, bases, normalized=True)
    lines = tuple(Subspace(plane, tuple(tuple(int(x) for x in r) for r in b)) for b in bases)
    return lines, pts


def linear_components(f_plane: HomoPoly, plane_space: ProjSpace | None = None) -> CurveReport:
    """Lines of PG(2, m) contained in the curve f = 0.

    A line not inside the curve meets it in at most deg f points, so when
    deg f <= m a line is a component exactly when all its m + 1 points vanish.
    """
    F = f_plane.field
    if f_plane.nvars != 3:
        raise DimensionMismatch("plane curves take 3 variables")
    if f_plane.degree > F.order:
        raise DegreeTooHighForCriterion(f"degree {f_plane.degree} exceeds field order {F.order}")
    plane_space = plane_space or ProjSpace(2, F)
    zero = evaluate_many(f_plane, plane_space.all_points) == 0
    lines, pts = plane_lines(F)
    full = zero[pts].all(axis=1)
    comps = tuple(L for L, hit in zip(lines, full) if hit)
    return CurveReport(f_plane.degree, int(zero.sum()), bool(comps), comps)
