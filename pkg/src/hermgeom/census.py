"""Intersection-size censuses of a point set against families of flats.

Every census returns a :class:`Histogram` mapping ``|X ∩ S|`` to the number
of flats S of the family with that intersection size.

Hyperplane censuses have two exact engines:

``accumulate``
    For each point of X, bump a counter for every hyperplane through it.
    Work is ``|X| * theta(n-1)`` increments.

``transform``
    Counts through additive characters.  With V the cone of nonzero vectors
    over X and a a dual vector,

        |V ∩ a^perp| = (|V| + (m - 1) * Vhat(a)) / m,
        Vhat(a) = sum_{v in V} zeta^{Tr(a . v)},

    and Vhat for all a at once is a discrete Fourier transform over
    GF(p)^(k(n+1)).  The indicator of V is real and scaling-invariant, so
    Vhat is an integer; the floating point transform is rounded and the
    rounding error is checked.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ._parallel import pmap
from .errors import InfeasibleSolution, NoHintAndNoBudget, SingularSystem, TooManyFlats
from .projgeom import (
    PointSet,
    ProjPoint,
    ProjSpace,
    Subspace,
    flat_batches,
    flat_point_indices,
    gaussian_binomial,
    theta,
)

HYPERPLANE_GUARD = 10**7
ACCUMULATE_GUARD = 2 * 10**8
ACCUMULATE_AUTO = 2 * 10**7
TRANSFORM_GUARD = 1 << 25


@dataclass
class Histogram:
    bins: dict[int, int]
    family_size: int
    mode: str

    def __post_init__(self):
        self.bins = {int(k): int(v) for k, v in sorted(self.bins.items()) if v}
        if sum(self.bins.values()) != self.family_size:
            raise ValueError("histogram counts do not add up to the family size")

    @property
    def exact(self) -> bool:
        return not self.mode.startswith("sample")

    @property
    def sizes(self) -> list[int]:
        return sorted(self.bins)

    @property
    def min(self) -> int:
        return min(self.bins)

    @property
    def incidences(self) -> int:
        return sum(k * v for k, v in self.bins.items())

    def __add__(self, other: Histogram) -> Histogram:
        bins = dict(self.bins)
        for k, v in other.bins.items():
            bins[k] = bins.get(k, 0) + v
        mode = self.mode if self.mode == other.mode else f"{self.mode}+{other.mode}"
        return Histogram(bins, self.family_size + other.family_size, mode)

    def to_json(self) -> dict:
        return {"mode": self.mode, "family_size": self.family_size,
                "bins": {str(k): v for k, v in self.bins.items()}}

    @classmethod
    def from_json(cls, obj: dict) -> Histogram:
        return cls({int(k): int(v) for k, v in obj["bins"].items()}, int(obj["family_size"]), obj["mode"])

    def to_csv(self) -> str:
        return "size,count\n" + "".join(f"{k},{v}\n" for k, v in self.bins.items())


def _hist_from_counts(counts: np.ndarray, mode: str) -> Histogram:
    vals, cnt = np.unique(counts, return_counts=True)
    return Histogram(dict(zip(vals.tolist(), cnt.tolist())), int(len(counts)), mode)


def _count_batch(bits: np.ndarray, space: ProjSpace, normalized: bool, bases: np.ndarray) -> np.ndarray:
    idx = flat_point_indices(space, bases, normalized=normalized)
    return bits[idx].sum(axis=1)


def _rebatch(batches: Iterable[np.ndarray], target: int) -> list[np.ndarray]:
    """Concatenate small batches so each holds about ``target`` flats."""
    out, buf, size = [], [], 0
    for b in batches:
        buf.append(b)
        size += len(b)
        if size >= target:
            out.append(np.concatenate(buf))
            buf, size = [], 0
    if buf:
        out.append(np.concatenate(buf))
    return out


def flat_counts(X: PointSet, d: int, mode: str = "full", *, pivot: Subspace | ProjPoint | None = None,
                count: int | None = None, seed: int | None = None, workers: int = 1) -> tuple[np.ndarray, list[np.ndarray]]:
    """Per-flat intersection sizes and the bases they belong to."""
    space = X.space
    if isinstance(pivot, ProjPoint):
        pivot = Subspace(space, (pivot.coords,))
    npts = theta(d, space.m)
    target = max(1, (1 << 21) // npts)
    batches = _rebatch(flat_batches(space, d, mode, pivot=pivot, count=count, seed=seed, batch=target), target)
    fn = functools.partial(_count_batch, X.bits, space, mode != "through")
    parts = pmap(fn, batches, workers)
    counts = np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
    return counts, batches


def _mode_label(mode: str, d: int, pivot=None, count=None, seed=None) -> str:
    if mode == "sample":
        return f"sample(d={d},count={count},seed={seed})"
    if mode == "through":
        return f"through(d={d},pivot_dim={0 if isinstance(pivot, ProjPoint) else pivot.dim})"
    return f"full(d={d})"


def flat_census(X: PointSet, d: int, mode: str = "full", *, pivot: Subspace | ProjPoint | None = None,
                count: int | None = None, seed: int | None = None, workers: int = 1) -> Histogram:
    """Histogram of |X ∩ S| over d-flats S in the chosen family."""
    counts, _ = flat_counts(X, d, mode, pivot=pivot, count=count, seed=seed, workers=workers)
    return _hist_from_counts(counts, _mode_label(mode, d, pivot, count, seed))


def _pivot_counts(X: PointSet, d: int, pivot: Subspace | ProjPoint) -> np.ndarray:
    return flat_counts(X, d, "through", pivot=pivot)[0]


def line_census(X: PointSet, mode: str = "full", *, pivots: Sequence[Subspace | ProjPoint] | None = None,
                count: int | None = None, seed: int | None = None, workers: int = 1) -> Histogram:
    """Line census; in ``through`` mode the histograms over all pivots are summed."""
    if mode != "through":
        return flat_census(X, 1, mode, count=count, seed=seed, workers=workers)
    if not pivots:
        raise ValueError("through mode needs at least one pivot")
    parts = pmap(functools.partial(_pivot_counts, X, 1), list(pivots), workers)
    return _hist_from_counts(np.concatenate(parts), f"through(d=1,pivots={len(pivots)})")


# -- hyperplanes ------------------------------------------------------------------


def _dual_hyperplane_bases(space: ProjSpace, X: np.ndarray) -> np.ndarray:
    """Basis of {a : a . x = 0} for each point x (rows of X, normalized).

    With j the leading position of x (x_j = 1), the vectors
    e_c - x_c e_j for c != j span the solution space.
    """
    F = space.field
    n1 = space.n + 1
    j = (X != 0).argmax(axis=1)
    # others[r] lists the columns != j[r] in increasing order
    cols = np.arange(n1 - 1)
    others = cols[None, :] + (cols[None, :] >= j[:, None])
    B = np.zeros((len(X), n1 - 1, n1), dtype=np.int32)
    rows = np.arange(len(X))[:, None]
    B[rows, cols[None, :], others] = 1
    B[rows, cols[None, :], j[:, None]] = F.neg[X[rows, others]]
    return B


def _accumulate_chunk(space: ProjSpace, coords: np.ndarray) -> np.ndarray:
    B = _dual_hyperplane_bases(space, coords)
    idx = flat_point_indices(space, B)
    return np.bincount(idx.ravel(), minlength=space.npoints)


def hyperplane_counts_accumulate(X: PointSet, workers: int = 1) -> np.ndarray:
    """|X ∩ h| for every hyperplane h, indexed like points of the dual space."""
    space = X.space
    work = X.card * theta(space.n - 1, space.m)
    if work > ACCUMULATE_GUARD:
        raise TooManyFlats(f"accumulation needs {work} increments (guard {ACCUMULATE_GUARD})")
    coords = X.coords()
    step = max(1, (1 << 21) // max(1, theta(space.n - 1, space.m)))
    chunks = [coords[i:i + step] for i in range(0, len(coords), step)]
    parts = pmap(functools.partial(_accumulate_chunk, space), chunks, workers)
    total = np.zeros(space.npoints, dtype=np.int64)
    for p in parts:
        total += p
    return total


def hyperplane_counts_transform(X: PointSet) -> np.ndarray:
    """|X ∩ h| for every hyperplane h via a character-sum transform."""
    space = X.space
    F = space.field
    p, k, m, n1 = F.p, F.k, F.order, space.n + 1
    size = m**n1
    if size > TRANSFORM_GUARD:
        raise TooManyFlats(f"transform over {size} vectors exceeds guard {TRANSFORM_GUARD}")
    weights = m ** np.arange(n1 - 1, -1, -1, dtype=np.int64)
    coords = X.coords()
    ind = np.zeros(size, dtype=np.float64)
    for c in range(1, m):
        scaled = F.mul(c, coords)
        ind[F.code[scaled] @ weights] = 1.0
    vhat = np.fft.fftn(ind.reshape((p,) * (k * n1))).real.ravel()
    # code of the dual vector u(a): digit j of block c is Tr(a_c * x^j)
    root_powers = [int(F.from_code[p**j]) for j in range(k)]
    dual_code = np.zeros(m, dtype=np.int64)
    for j, b in enumerate(root_powers):
        dual_code += F.abs_trace[F.mul(np.arange(m), b)] * p**j
    A = space.all_points
    vals = vhat[dual_code[A] @ weights]
    rounded = np.rint(vals)
    if np.max(np.abs(vals - rounded), initial=0.0) > 1e-3:
        raise ArithmeticError("transform lost integrality; point set too large for float64")
    Vsize = (m - 1) * X.card
    num = Vsize + (m - 1) * rounded.astype(np.int64)
    if np.any(num % (m * (m - 1))):
        raise ArithmeticError("transform produced non-integral counts")
    return num // (m * (m - 1))


def hyperplane_counts(X: PointSet, method: str = "auto", workers: int = 1) -> np.ndarray:
    space = X.space
    nh = space.npoints
    if nh > HYPERPLANE_GUARD:
        raise TooManyFlats(f"{nh} hyperplanes exceed the guard {HYPERPLANE_GUARD}")
    if method == "auto":
        method = "accumulate" if X.card * theta(space.n - 1, space.m) <= ACCUMULATE_AUTO else "transform"
    if method == "accumulate":
        return hyperplane_counts_accumulate(X, workers)
    if method == "transform":
        return hyperplane_counts_transform(X)
    raise ValueError(f"unknown method {method!r}")


def hyperplane_census(X: PointSet, method: str = "auto", workers: int = 1) -> Histogram:
    """Exact histogram of |X ∩ h| over all hyperplanes h."""
    return _hist_from_counts(hyperplane_counts(X, method, workers), "full(hyperplanes)")


def blocking_number(X: PointSet, d: int, mode: str = "full", **kw) -> int:
    """Smallest |X ∩ S| over the family (a lower estimate only when sampled)."""
    if d == X.space.n - 1 and mode == "full":
        return hyperplane_census(X, workers=kw.get("workers", 1)).min
    return flat_census(X, d, mode, **kw).min


# -- double counting ----------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumSystem:
    """sum x_i = T0, sum i x_i = T1, sum i(i-1) x_i = T2."""

    sizes: tuple[int, ...]
    totals: tuple[int, int, int]

    def __post_init__(self):
        if any(t <= 0 for t in self.totals):
            raise ValueError("totals must be positive")


def hyperplane_system(space: ProjSpace, card: int, sizes: Sequence[int]) -> SpectrumSystem:
    """Moments of the hyperplane spectrum of any set of ``card`` points."""
    n, m = space.n, space.m
    return SpectrumSystem(tuple(sizes), (
        gaussian_binomial(n + 1, n, m),
        card * theta(n - 1, m),
        card * (card - 1) * theta(n - 2, m),
    ))


def moments(hist: Histogram) -> tuple[int, int, int]:
    return (sum(hist.bins.values()),
            sum(i * x for i, x in hist.bins.items()),
            sum(i * (i - 1) * x for i, x in hist.bins.items()))


def spectrum_solve(sys: SpectrumSystem) -> dict[int, int]:
    """Exact nonnegative integer solution of the moment equations."""
    sizes = list(sys.sizes)
    k = len(sizes)
    if k == 0 or k > 3:
        raise SingularSystem("need between 1 and 3 candidate sizes")
    if len(set(sizes)) != k:
        raise SingularSystem("candidate sizes are not distinct")
    rows = [[Fraction(1)] * k, [Fraction(i) for i in sizes], [Fraction(i * (i - 1)) for i in sizes]]
    rhs = [Fraction(t) for t in sys.totals]
    # Gaussian elimination on the first k equations
    A = [rows[r][:] + [rhs[r]] for r in range(k)]
    for c in range(k):
        piv = next((r for r in range(c, k) if A[r][c] != 0), None)
        if piv is None:
            raise SingularSystem("moment system is singular")
        A[c], A[piv] = A[piv], A[c]
        A[c] = [x / A[c][c] for x in A[c]]
        for r in range(k):
            if r != c and A[r][c] != 0:
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
    sol = [A[r][k] for r in range(k)]
    for r in range(k, 3):
        if sum(a * x for a, x in zip(rows[r], sol)) != rhs[r]:
            raise InfeasibleSolution(f"moment equation {r} is not satisfied")
    if any(x.denominator != 1 for x in sol):
        raise InfeasibleSolution(f"non-integral solution {sol}")
    if any(x < 0 for x in sol):
        raise InfeasibleSolution(f"negative solution {sol}")
    return {s: int(x) for s, x in zip(sizes, sol)}


# -- minimal solids --------------------------------------------------------------------


@dataclass
class SolidSearch:
    solid: Subspace
    size: int
    bound: int
    below_bound: bool
    searched: list[str] = dc_field(default_factory=list)


def min_solid_search(X: PointSet, hints: Sequence[Subspace] = (), *, samples: int | None = None,
                     seed: int | None = None, workers: int = 1) -> SolidSearch:
    """Smallest solid section found among the hinted and sampled families.

    A plane hint is extended to every solid through it; a solid hint is
    counted directly; ``samples`` random solids are added when given.  The
    search stops at the first solid that reaches the plane-size bound.
    """
    space = X.space
    if space.n < 3:
        raise ValueError("solids need a space of dimension >= 3")
    if not hints and not samples:
        raise NoHintAndNoBudget("give hint flats or a sample budget")
    bound = theta(2, space.m)
    best: tuple[int, Subspace] | None = None
    searched: list[str] = []

    def consider(size: int, S: Subspace):
        nonlocal best
        if best is None or size < best[0]:
            best = (size, S)

    for h in hints:
        if h.dim == 3:
            consider(X.count_in(h), h)
            searched.append("solid")
        elif h.dim < 3:
            counts, batches = flat_counts(X, 3, "through", pivot=h, workers=workers)
            i = int(np.argmin(counts))
            flat = np.concatenate(batches)[i]
            consider(int(counts[i]), Subspace.from_rows(space, flat.tolist()))
            searched.append(f"through(dim={h.dim}, solids={len(counts)})")
        else:
            raise ValueError("hints must be flats of dimension <= 3")
        if best[0] <= bound:
            break
    if samples and (best is None or best[0] > bound):
        if seed is None:
            raise ValueError("sampling requires a seed")
        counts, batches = flat_counts(X, 3, "sample", count=samples, seed=seed, workers=workers)
        i = int(np.argmin(counts))
        consider(int(counts[i]), Subspace.from_rows(space, np.concatenate(batches)[i].tolist()))
        searched.append(f"sample(count={samples}, seed={seed})")
    size, S = best
    return SolidSearch(S, size, bound, size < bound, searched)
