"""Hermitian forms over GF(q^2) and their varieties.

The form attached to a conjugate-symmetric Gram matrix H is

    eta(x, y) = sum_ij x_i H_ij conj(y_j),

linear in x and semilinear in y.  Its variety is the set of points with
eta(x, x) = 0, a hypersurface of degree q + 1.  A form with a radical of
vector dimension t gives a cone with the projectivised radical as vertex over
a nondegenerate variety in a complementary flat.
"""

from __future__ import annotations

import functools
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ._parallel import pmap, split_range
from .errors import (
    BadParameters,
    DegenerateForm,
    NotComplementary,
    NotHyperplane,
)
from .gf import Field, field_build, linear_solve
from .projgeom import (
    PointSet,
    ProjPoint,
    ProjSpace,
    Subspace,
    normalize,
    theta,
)


def hermitian_count(r: int, q: int) -> int:
    """Points of a nondegenerate H(r, q^2); 0 for r <= 0."""
    if r < 0:
        return 0
    return (q ** (r + 1) + (-1) ** r) * (q**r - (-1) ** r) // (q * q - 1)


def expected_count(r: int, q: int, t: int) -> int:
    """Points of the cone R_t H(r - t, q^2) in PG(r, q^2).

    The vertex contributes theta(t - 1) points and each base point spans a
    line with the vertex, adding q^(2t) further points.
    """
    if r < 0 or q < 2 or t < 0:
        raise BadParameters(f"bad parameters r={r}, q={q}, t={t}")
    if t > r:
        raise BadParameters(f"radical of dimension {t} in PG({r}) leaves a form of rank <= 0")
    return theta(t - 1, q * q) + hermitian_count(r - t, q) * q ** (2 * t)


def tangent_section_count(r: int, q: int) -> int:
    return 1 + q * q * hermitian_count(r - 2, q)


def secant_section_count(r: int, q: int) -> int:
    return hermitian_count(r - 1, q)


@dataclass(frozen=True)
class HermitianForm:
    space: ProjSpace
    gram: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        F = self.space.field
        F.require_quadratic()
        n1 = self.space.n + 1
        if len(self.gram) != n1 or any(len(r) != n1 for r in self.gram):
            raise ValueError(f"Gram matrix must be {n1}x{n1}")
        for i in range(n1):
            for j in range(n1):
                if self.gram[i][j] != int(F.conj(self.gram[j][i])):
                    raise ValueError(f"Gram matrix not conjugate-symmetric at ({i},{j})")

    @property
    def field(self) -> Field:
        return self.space.field

    @property
    def q(self) -> int:
        return self.space.field.q

    @functools.cached_property
    def array(self) -> np.ndarray:
        return np.array(self.gram, dtype=np.int32)

    def eta(self, x: Sequence[int], y: Sequence[int]) -> int:
        F = self.field
        cy = [int(F.conj(c)) for c in y]
        acc = 0
        for i, xi in enumerate(x):
            if xi:
                acc = int(F.add(acc, F.mul(xi, F.dot(self.gram[i], cy))))
        return acc

    def values(self, X: np.ndarray) -> np.ndarray:
        """eta(x, x) for every row of X (vectorised)."""
        F = self.field
        X = np.asarray(X)
        cX = F.conj(X)
        acc = np.zeros(len(X), dtype=np.int32)
        for i in range(self.space.n + 1):
            for j in range(self.space.n + 1):
                h = self.gram[i][j]
                if h:
                    acc = F.add(acc, F.mul(X[:, i], F.mul(h, cX[:, j])))
        return acc

    def functional(self, P: Sequence[int]) -> list[int]:
        """Coefficients a with eta(X, P) = sum a_i X_i, i.e. a = H conj(P)."""
        F = self.field
        cP = [int(F.conj(c)) for c in P]
        return [F.dot(row, cP) for row in self.gram]

    def to_json(self) -> dict:
        F = self.field
        return {"p": F.p, "k": F.k, "n": self.space.n, "gram": [x for r in self.gram for x in r]}

    @classmethod
    def from_json(cls, obj: dict) -> HermitianForm:
        F = field_build(obj["p"], obj["k"])
        n1 = obj["n"] + 1
        g = obj["gram"]
        return cls(ProjSpace(obj["n"], F), tuple(tuple(g[i * n1:(i + 1) * n1]) for i in range(n1)))

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))

    @classmethod
    def load(cls, path: str | Path) -> HermitianForm:
        return cls.from_json(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class DegeneracyClass:
    t: int
    radical: Subspace | None


def standard_form(r: int, field: Field) -> HermitianForm:
    """Identity Gram matrix: the variety sum x_i^(q+1) = 0."""
    field.require_quadratic()
    n1 = r + 1
    return HermitianForm(ProjSpace(r, field), tuple(tuple(int(i == j) for j in range(n1)) for i in range(n1)))


def diagonal_form(diag: Sequence[int], field: Field) -> HermitianForm:
    """Diagonal Gram matrix; entries must lie in GF(q)."""
    n1 = len(diag)
    return HermitianForm(ProjSpace(n1 - 1, field),
                         tuple(tuple(int(diag[i]) if i == j else 0 for j in range(n1)) for i in range(n1)))


def random_form(space: ProjSpace, rank: int, rng: np.random.Generator) -> HermitianForm:
    """A conjugate-symmetric form of the given rank, A* D A with A invertible."""
    F = space.field
    n1 = space.n + 1
    while True:
        A = rng.integers(0, F.order, size=(n1, n1))
        if len(F.rref(A.tolist())[1]) == n1:
            break
    sub = F.subfield_elements()[1:]
    D = [int(rng.choice(sub)) if k < rank else 0 for k in range(n1)]
    cA = F.conj(A)
    H = [[0] * n1 for _ in range(n1)]
    for i in range(n1):
        for j in range(n1):
            acc = 0
            for k in range(n1):
                if D[k]:
                    acc = int(F.add(acc, F.mul(F.mul(int(cA[k, i]), D[k]), int(A[k, j]))))
            H[i][j] = acc
    return HermitianForm(space, tuple(tuple(r) for r in H))


def radical_classify(form: HermitianForm) -> DegeneracyClass:
    """Radical {w : eta(v, w) = 0 for all v} = conj(ker H)."""
    F = form.field
    ker, _ = linear_solve(form.gram, "kernel", field=F)
    if not ker:
        return DegeneracyClass(0, None)
    rad = [[int(F.conj(c)) for c in v] for v in ker]
    return DegeneracyClass(len(ker), Subspace.from_rows(form.space, rad))


def _variety_chunk(form: HermitianForm, bounds: tuple[int, int]) -> np.ndarray:
    a, b = bounds
    X = form.space.unindex(np.arange(a, b))
    return np.flatnonzero(form.values(X) == 0) + a


def variety_points(form: HermitianForm, workers: int = 1, chunk: int = 1 << 17) -> PointSet:
    """All points P with eta(P, P) = 0."""
    N = form.space.npoints
    parts = split_range(N, max(workers, -(-N // chunk)))
    found = pmap(functools.partial(_variety_chunk, form), parts, workers)
    return PointSet.from_indices(form.space, np.concatenate(found))


def induced_form(form: HermitianForm, S: Subspace) -> HermitianForm:
    """The restriction of eta to the basis of S, as a form on PG(dim S)."""
    B = S.basis
    gram = tuple(tuple(form.eta(u, v) for v in B) for u in B)
    return HermitianForm(ProjSpace(S.dim, form.field), gram)


def section_size(form: HermitianForm, S: Subspace) -> int:
    """|variety ∩ S| from the radical dimension of the induced form."""
    ind = induced_form(form, S)
    t = radical_classify(ind).t
    if t == S.dim + 1:
        return theta(S.dim, form.field.order)
    return expected_count(S.dim, form.q, t)


def hyperplane_functional(h: Subspace) -> list[int]:
    """Normalized a with h = {X : sum a_i X_i = 0}."""
    if h.dim != h.space.n - 1:
        raise NotHyperplane(f"flat of dimension {h.dim} in {h.space!r}")
    ker, _ = linear_solve(h.basis, "kernel", field=h.space.field)
    return list(normalize(h.space.field, [ker[0]])[0])


def hyperplane_from_functional(space: ProjSpace, a: Sequence[int]) -> Subspace:
    ker, _ = linear_solve([list(a)], "kernel", field=space.field)
    return Subspace.from_rows(space, ker)


def _require_nondegenerate(form: HermitianForm) -> None:
    if radical_classify(form).t:
        raise DegenerateForm("operation needs a nondegenerate form")


def perp(form: HermitianForm, P: ProjPoint | Sequence[int]) -> Subspace:
    """The hyperplane {X : eta(X, P) = 0}."""
    _require_nondegenerate(form)
    coords = P.coords if isinstance(P, ProjPoint) else tuple(P)
    return hyperplane_from_functional(form.space, form.functional(coords))


def flat_perp(form: HermitianForm, S: Subspace) -> Subspace:
    """{X : eta(X, s) = 0 for all s in S}."""
    _require_nondegenerate(form)
    rows = [form.functional(b) for b in S.basis]
    ker, _ = linear_solve(rows, "kernel", field=form.field)
    return Subspace.from_rows(form.space, ker)


def pole(form: HermitianForm, h: Subspace) -> ProjPoint:
    """The point P with perp(P) = h, from one solve of H y = a; P = conj(y)."""
    _require_nondegenerate(form)
    F = form.field
    a = hyperplane_functional(h)
    aug = [list(row) + [a_i] for row, a_i in zip(form.gram, a)]
    ker, _ = linear_solve(aug, "kernel", field=F)
    v = ker[0]
    # v = (y, c) with H y + c a = 0, so H (-y/c) = a
    scale = int(F.neg[F.inv[v[-1]]])
    y = [int(F.mul(scale, x)) for x in v[:-1]]
    return form.space.point([int(F.conj(x)) for x in y])


def classify_hyperplane(form: HermitianForm, h: Subspace) -> tuple[str, ProjPoint | None]:
    """("tangent", pole) when the pole lies on the variety, else ("secant", None)."""
    P = pole(form, h)
    if form.eta(P.coords, P.coords) == 0:
        return "tangent", P
    return "secant", None


def _vertex_vectors(F: Field, vertex: Subspace) -> np.ndarray:
    """Every vector (zero included) of the vector space under ``vertex``."""
    t = vertex.dim + 1
    coefs = np.indices((F.order,) * t).reshape(t, -1).T
    V = np.zeros((len(coefs), vertex.space.n + 1), dtype=np.int32)
    for i, row in enumerate(vertex.array):
        V = F.add(V, F.mul(coefs[:, i, None], row[None, :]))
    return V


def cone_points(vertex: Subspace, base: PointSet, base_flat: Subspace) -> PointSet:
    """Union of the vertex and all lines joining it to base points."""
    space = vertex.space
    F = space.field
    if vertex.dim + base_flat.dim != space.n - 1:
        raise NotComplementary("dimensions of vertex and base flat do not add up")
    R, _ = F.rref(list(vertex.basis) + list(base_flat.basis))
    if len(R) != space.n + 1:
        raise NotComplementary("vertex and base flat intersect")
    flat_bits = base_flat.points().bits
    if np.any(base.bits & ~flat_bits):
        raise ValueError("base is not contained in the base flat")
    idx = [vertex.point_indices()]
    Q = base.coords()
    if len(Q):
        V = _vertex_vectors(F, vertex)
        X = F.add(Q[:, None, :], V[None, :, :]).reshape(-1, space.n + 1)
        idx.append(space.index(normalize(F, X)))
    return PointSet.from_indices(space, np.concatenate(idx))


def coordinate_flat(space: ProjSpace, cols: Sequence[int]) -> Subspace:
    rows = [[int(c == j) for c in range(space.n + 1)] for j in cols]
    return Subspace(space, tuple(tuple(r) for r in rows))


def cone_decomposition(form: HermitianForm) -> tuple[Subspace, PointSet, Subspace]:
    """(vertex, base variety, base flat) for a degenerate form.

    The base flat is spanned by the unit vectors of the non-pivot columns of
    the radical's echelon basis.
    """
    cls = radical_classify(form)
    if cls.t == 0:
        raise BadParameters("form is nondegenerate: no vertex")
    vertex = cls.radical
    base_flat = coordinate_flat(form.space, vertex.coordinate_complement())
    pts = base_flat.point_indices()
    X = form.space.all_points[pts] if form.space.npoints <= 1 << 22 else form.space.unindex(pts)
    base = PointSet.from_indices(form.space, pts[form.values(X) == 0])
    return vertex, base, base_flat


def standard_generator(form: HermitianForm) -> Subspace:
    """A generator of the identity-Gram variety.

    Spans the vectors e_{2i} + e * e_{2i+1}, where e is the first element
    with norm -1.  Any two vectors u = sum c_i (...) and w = sum d_i (...)
    of the span give eta(u, w) = sum c_i conj(d_i) (1 + N(e)) = 0.
    """
    F = form.field
    n1 = form.space.n + 1
    if any(form.gram[i][j] != int(i == j) for i in range(n1) for j in range(n1)):
        raise BadParameters("standard_generator needs the identity Gram matrix")
    minus_one = int(F.neg[1])
    e = next(x for x in range(1, F.order) if int(F.norm(x)) == minus_one)
    rows = []
    for i in range(n1 // 2):
        v = [0] * n1
        v[2 * i] = 1
        v[2 * i + 1] = e
        rows.append(v)
    return Subspace.from_rows(form.space, rows)
