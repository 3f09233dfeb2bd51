"""Points, flats and point sets of PG(n, m).

Points are indexed lexicographically by their normalized coordinate vectors
(first nonzero coordinate equal to 1).  Points whose first nonzero
coordinate sits at position ``j`` form a contiguous block of ``m**(n-j)``
indices, so index and unindex are closed-form and vectorise over numpy
arrays of coordinates.

Flats are stored by their reduced row echelon basis, which makes equality a
tuple comparison.  Large families of flats are produced in numpy batches of
bases, shape ``(B, d+1, n+1)``; :func:`flat_point_indices` turns such a batch
into the point indices of every flat at once.
"""

from __future__ import annotations

import functools
import io
import itertools
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import BadPivot, IndexOutOfRange, TooManyFlats, ZeroVector
from .gf import Field, field_build, linear_solve

FLAT_GUARD = 10**8
PGPS_MAGIC = b"PGPS"
PGPS_VERSION = 1


def gaussian_binomial(n: int, k: int, m: int) -> int:
    """Number of k-dimensional subspaces of an n-dimensional space over GF(m)."""
    if not 0 <= k <= n:
        return 0
    num = den = 1
    for i in range(k):
        num *= m ** (n - i) - 1
        den *= m ** (k - i) - 1
    return num // den


def theta(d: int, m: int) -> int:
    """Number of points of PG(d, m); 0 for d < 0."""
    return (m ** (d + 1) - 1) // (m - 1) if d >= 0 else 0


@dataclass(frozen=True)
class ProjSpace:
    n: int
    field: Field

    @property
    def m(self) -> int:
        return self.field.order

    @property
    def npoints(self) -> int:
        return theta(self.n, self.m)

    def __repr__(self) -> str:
        return f"PG({self.n},{self.m})"

    def __reduce__(self):
        # drop cached coordinate tables when shipping to worker processes
        return (ProjSpace, (self.n, self.field))

    # -- indexing ------------------------------------------------------------

    @functools.cached_property
    def _powers(self) -> np.ndarray:
        return self.m ** np.arange(self.n, -1, -1, dtype=np.int64)

    @functools.cached_property
    def _block_start(self) -> np.ndarray:
        # index of the first point whose leading coordinate is at position j
        m, n = self.m, self.n
        return np.array([theta(n - j - 1, m) for j in range(n + 1)], dtype=np.int64)

    def index(self, coords) -> np.ndarray | int:
        """Point indices of normalized coordinate rows (vectorised)."""
        X = np.asarray(coords, dtype=np.int64)
        scalar = X.ndim == 1
        X = np.atleast_2d(X)
        nz = X != 0
        if not nz.any(axis=1).all():
            raise ZeroVector("zero vector has no projective point")
        j = nz.argmax(axis=1)
        val = X @ self._powers
        idx = self._block_start[j] + val - self._powers[j]
        return int(idx[0]) if scalar else idx

    def unindex(self, idx) -> np.ndarray:
        """Normalized coordinate rows for point indices (vectorised)."""
        I = np.asarray(idx, dtype=np.int64)
        scalar = I.ndim == 0
        I = np.atleast_1d(I)
        if (I < 0).any() or (I >= self.npoints).any():
            raise IndexOutOfRange(f"point index out of range for {self!r}")
        starts = self._block_start  # decreasing in j
        j = self.n - np.searchsorted(starts[::-1], I, side="right") + 1
        val = I - starts[j] + self._powers[j]
        X = (val[:, None] // self._powers[None, :]) % self.m
        X = X.astype(np.int32)
        return X[0] if scalar else X

    @functools.cached_property
    def all_points(self) -> np.ndarray:
        """Coordinates of every point, row i = point index i (read-only)."""
        X = self.unindex(np.arange(self.npoints))
        X.setflags(write=False)
        return X

    def point(self, coords: Sequence[int]) -> ProjPoint:
        X = normalize(self.field, np.asarray([coords]))
        return ProjPoint(self, tuple(int(x) for x in X[0]))


def normalize(F: Field, X) -> np.ndarray:
    """Scale every row so its first nonzero entry is 1."""
    X = np.atleast_2d(np.asarray(X))
    nz = X != 0
    if not nz.any(axis=1).all():
        raise ZeroVector("zero vector has no projective point")
    j = nz.argmax(axis=1)
    lead = X[np.arange(len(X)), j]
    return F.mul(F.inv[lead][:, None], X)


@dataclass(frozen=True)
class ProjPoint:
    space: ProjSpace
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.space.n + 1:
            raise ValueError("wrong number of coordinates")
        nzs = [c for c in self.coords if c]
        if not nzs:
            raise ZeroVector("zero vector has no projective point")
        if nzs[0] != 1:
            raise ValueError("coordinates are not normalized")

    @property
    def index(self) -> int:
        return point_index(self)


def point_index(P: ProjPoint) -> int:
    return P.space.index(P.coords)


def point_unindex(space: ProjSpace, i: int) -> ProjPoint:
    return ProjPoint(space, tuple(int(x) for x in space.unindex(i)))


@dataclass(frozen=True)
class Subspace:
    """A flat given by its reduced row echelon basis."""

    space: ProjSpace
    basis: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.basis) - 1

    @classmethod
    def from_rows(cls, space: ProjSpace, rows) -> Subspace:
        rows = [list(map(int, r)) for r in rows]
        if not rows or all(not any(r) for r in rows):
            raise ZeroVector("span of zero vectors")
        R, _ = space.field.rref(rows)
        return cls(space, tuple(tuple(r) for r in R))

    @functools.cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(r) if x) for r in self.basis)

    @functools.cached_property
    def array(self) -> np.ndarray:
        return np.array(self.basis, dtype=np.int32)

    def contains_vector(self, v: Sequence[int]) -> bool:
        R, _ = self.space.field.rref(list(self.basis) + [list(v)])
        return len(R) == len(self.basis)

    def contains(self, other: Subspace | ProjPoint) -> bool:
        if isinstance(other, ProjPoint):
            return self.contains_vector(other.coords)
        R, _ = self.space.field.rref(list(self.basis) + list(other.basis))
        return len(R) == len(self.basis)

    def point_indices(self) -> np.ndarray:
        return flat_point_indices(self.space, self.array[None], normalized=True)[0]

    def points(self) -> PointSet:
        return subspace_points(self)

    def coordinate_complement(self) -> list[int]:
        """Columns not used as pivots: their unit vectors span a complement."""
        return [c for c in range(self.space.n + 1) if c not in self.pivots]


def span(points: Sequence[ProjPoint | Sequence[int]], space: ProjSpace | None = None) -> Subspace:
    rows = []
    for P in points:
        if isinstance(P, ProjPoint):
            space = space or P.space
            rows.append(P.coords)
        else:
            rows.append(tuple(P))
    if space is None:
        raise ValueError("space required for raw coordinate vectors")
    return Subspace.from_rows(space, rows)


def join(*flats: Subspace | ProjPoint) -> Subspace:
    """Smallest flat containing all arguments."""
    rows = []
    for F in flats:
        rows.extend([F.coords] if isinstance(F, ProjPoint) else F.basis)
    return Subspace.from_rows(flats[0].space, rows)


def meet(A: Subspace, B: Subspace) -> Subspace | None:
    """Intersection of two flats (None when empty)."""
    F = A.space.field
    # v = sum a_i A_i = sum b_j B_j  <=>  [A; -B]^T (a, b) = 0
    rows = list(A.basis) + [[int(F.neg[x]) for x in r] for r in B.basis]
    cols = [list(c) for c in zip(*rows)]
    ker, _ = linear_solve(cols, "kernel", field=F)
    if not ker:
        return None
    vecs = []
    for kv in ker:
        a = kv[: len(A.basis)]
        v = [0] * (A.space.n + 1)
        for coef, r in zip(a, A.basis):
            if coef:
                v = [int(F.add(x, F.mul(coef, y))) for x, y in zip(v, r)]
        vecs.append(v)
    return Subspace.from_rows(A.space, vecs)


# -- point sets ---------------------------------------------------------------


class PointSet:
    """Membership bitmap over the point indices of a projective space."""

    __slots__ = ("space", "bits", "card")

    def __init__(self, space: ProjSpace, bits: np.ndarray):
        bits = np.asarray(bits, dtype=bool)
        if bits.shape != (space.npoints,):
            raise ValueError(f"bitmap has shape {bits.shape}, expected ({space.npoints},)")
        bits = bits.copy()
        bits.setflags(write=False)
        self.space = space
        self.bits = bits
        self.card = int(np.count_nonzero(bits))

    @classmethod
    def from_indices(cls, space: ProjSpace, idx) -> PointSet:
        bits = np.zeros(space.npoints, dtype=bool)
        bits[np.asarray(idx, dtype=np.int64)] = True
        return cls(space, bits)

    @classmethod
    def empty(cls, space: ProjSpace) -> PointSet:
        return cls(space, np.zeros(space.npoints, dtype=bool))

    @classmethod
    def full(cls, space: ProjSpace) -> PointSet:
        return cls(space, np.ones(space.npoints, dtype=bool))

    def __len__(self) -> int:
        return self.card

    def __contains__(self, P: ProjPoint) -> bool:
        return bool(self.bits[point_index(P)])

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, PointSet) and self.space == other.space
                and bool(np.array_equal(self.bits, other.bits)))

    def __hash__(self):
        return hash((self.space, self.card))

    def __or__(self, other: PointSet) -> PointSet:
        return PointSet(self.space, self.bits | other.bits)

    def __and__(self, other: PointSet) -> PointSet:
        return PointSet(self.space, self.bits & other.bits)

    def __sub__(self, other: PointSet) -> PointSet:
        return PointSet(self.space, self.bits & ~other.bits)

    def __repr__(self) -> str:
        return f"PointSet({self.space!r}, card={self.card})"

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    def coords(self) -> np.ndarray:
        return self.space.all_points[self.bits]

    def count_in(self, S: Subspace) -> int:
        return int(self.bits[S.point_indices()].sum())

    def with_flipped(self, i: int) -> PointSet:
        bits = self.bits.copy()
        bits[i] = ~bits[i]
        return PointSet(self.space, bits)

    # -- PGPS binary format --------------------------------------------------

    def to_bytes(self) -> bytes:
        F = self.space.field
        head = PGPS_MAGIC + bytes([PGPS_VERSION])
        head += struct.pack("<IIIQ", F.p, F.k, self.space.n, self.space.npoints)
        return head + np.packbits(self.bits, bitorder="little").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> PointSet:
        buf = io.BytesIO(data)
        if buf.read(4) != PGPS_MAGIC:
            raise ValueError("not a PGPS point-set file")
        version = buf.read(1)
        if version != bytes([PGPS_VERSION]):
            raise ValueError(f"unsupported PGPS version {version!r}")
        p, k, n, count = struct.unpack("<IIIQ", buf.read(20))
        space = ProjSpace(n, field_build(p, k))
        if count != space.npoints:
            raise ValueError(f"point count {count} does not match {space!r}")
        raw = np.frombuffer(buf.read((count + 7) // 8), dtype=np.uint8)
        if len(raw) != (count + 7) // 8:
            raise ValueError("truncated PGPS bit array")
        bits = np.unpackbits(raw, count=count, bitorder="little").astype(bool)
        return cls(space, bits)

    def save(self, path: str | Path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def load(cls, path: str | Path) -> PointSet:
        return cls.from_bytes(Path(path).read_bytes())


def subspace_points(S: Subspace) -> PointSet:
    return PointSet.from_indices(S.space, S.point_indices())


# -- batch point enumeration ---------------------------------------------------


@functools.lru_cache(maxsize=64)
def _coef_points(d: int, F: Field) -> np.ndarray:
    return ProjSpace(d, F).all_points


def combine(F: Field, coefs: np.ndarray, bases: np.ndarray) -> np.ndarray:
    """Linear combinations ``coefs @ bases`` over F.

    coefs: (P, r), bases: (B, r, n+1) -> (B, P, n+1).
    """
    B, r, w = bases.shape
    out = np.zeros((B, len(coefs), w), dtype=np.int32)
    for i in range(r):
        term = F.mul(coefs[None, :, i, None], bases[:, None, i, :])
        out = F.add(out, term)
    return out


def flat_point_indices(space: ProjSpace, bases: np.ndarray, normalized: bool = False) -> np.ndarray:
    """Point indices of each flat in a batch of bases.

    ``bases`` has shape (B, d+1, n+1), rows independent.  When the bases are
    in reduced echelon form the combinations of normalized coefficient
    vectors are already normalized and the normalization pass is skipped.
    """
    bases = np.asarray(bases)
    B, r, w = bases.shape
    U = _coef_points(r - 1, space.field)
    X = combine(space.field, U, bases).reshape(-1, w)
    if not normalized:
        X = normalize(space.field, X)
    return space.index(X).reshape(B, len(U))


# -- flat enumeration ------------------------------------------------------------


def _rref_batches(n: int, d: int, F: Field, batch: int) -> Iterator[np.ndarray]:
    """All RREF (d+1) x (n+1) matrices of rank d+1, in canonical order."""
    m = F.order
    for piv in itertools.combinations(range(n + 1), d + 1):
        free = [(i, c) for i, pc in enumerate(piv) for c in range(pc + 1, n + 1) if c not in piv]
        total = m ** len(free)
        template = np.zeros((d + 1, n + 1), dtype=np.int32)
        for i, pc in enumerate(piv):
            template[i, pc] = 1
        rows = np.array([i for i, _ in free], dtype=np.int64)
        cols = np.array([c for _, c in free], dtype=np.int64)
        weights = m ** np.arange(len(free) - 1, -1, -1, dtype=np.int64)
        for start in range(0, total, batch):
            vals = np.arange(start, min(total, start + batch), dtype=np.int64)
            out = np.broadcast_to(template, (len(vals), d + 1, n + 1)).copy()
            if len(free):
                out[:, rows, cols] = (vals[:, None] // weights[None, :]) % m
            yield out


def count_flats(space: ProjSpace, d: int) -> int:
    return gaussian_binomial(space.n + 1, d + 1, space.m)


def _check_dim(space: ProjSpace, d: int) -> None:
    if not 0 <= d < space.n:
        raise ValueError(f"flat dimension {d} not in [0, {space.n})")


def flat_batches(space: ProjSpace, d: int, mode: str = "full", *, pivot: Subspace | None = None,
                 count: int | None = None, seed: int | None = None,
                 batch: int = 4096) -> Iterator[np.ndarray]:
    """Bases of a family of d-flats in numpy batches.

    Modes: ``full`` (all d-flats, RREF), ``through`` (flats containing
    ``pivot``; bases are the pivot rows followed by a quotient flat and are
    not reduced), ``sample`` (``count`` distinct uniformly random flats,
    keyed by ``seed``).
    """
    _check_dim(space, d)
    if mode == "full":
        total = count_flats(space, d)
        if total > FLAT_GUARD:
            raise TooManyFlats(f"{total} {d}-flats in {space!r} exceed the guard {FLAT_GUARD}")
        yield from _rref_batches(space.n, d, space.field, batch)
    elif mode == "through":
        if pivot is None or pivot.space != space:
            raise BadPivot("through mode needs a pivot flat of the same space")
        s = pivot.dim
        if not s < d:
            raise BadPivot(f"pivot of dimension {s} cannot lie in a proper way inside a {d}-flat")
        comp = pivot.coordinate_complement()
        e = d - s - 1
        qn = len(comp) - 1
        total = gaussian_binomial(qn + 1, e + 1, space.m)
        if total > FLAT_GUARD:
            raise TooManyFlats(f"{total} flats through the pivot exceed the guard")
        head = pivot.array
        for qb in _rref_batches(qn, e, space.field, batch):
            out = np.zeros((len(qb), d + 1, space.n + 1), dtype=np.int32)
            out[:, : s + 1, :] = head
            out[:, s + 1:, comp] = qb
            yield out
    elif mode == "sample":
        if count is None or seed is None:
            raise ValueError("sample mode requires count and seed")
        flats = sample_flats(space, d, count, seed)
        for i in range(0, len(flats), batch):
            yield np.stack([S.array for S in flats[i:i + batch]])
    else:
        raise ValueError(f"unknown mode {mode!r}")


def draw_rng(seed: int, i: int) -> np.random.Generator:
    """Counter-based generator for draw ``i`` under ``seed``."""
    return np.random.Generator(np.random.Philox(key=(int(i) << 64) | (int(seed) & (2**64 - 1))))


def sample_flats(space: ProjSpace, d: int, count: int, seed: int) -> list[Subspace]:
    """``count`` distinct random d-flats; reproducible for a given seed."""
    _check_dim(space, d)
    if count > count_flats(space, d):
        raise TooManyFlats("more samples requested than flats exist")
    seen: set = set()
    out: list[Subspace] = []
    i = 0
    F = space.field
    while len(out) < count:
        M = draw_rng(seed, i).integers(0, space.m, size=(d + 1, space.n + 1))
        i += 1
        R, piv = F.rref(M.tolist())
        if len(piv) < d + 1:
            continue
        key = tuple(tuple(r) for r in R)
        if key in seen:
            continue
        seen.add(key)
        out.append(Subspace(space, key))
    return out


def sample_points(space: ProjSpace, count: int, seed: int) -> np.ndarray:
    """``count`` distinct point indices drawn reproducibly."""
    if count > space.npoints:
        raise TooManyFlats("more samples requested than points exist")
    seen: dict[int, None] = {}
    i = 0
    while len(seen) < count:
        seen.setdefault(int(draw_rng(seed, i).integers(0, space.npoints)), None)
        i += 1
    return np.fromiter(seen, dtype=np.int64, count=count)


def enumerate_flats(space: ProjSpace, d: int, mode: str = "full", *, pivot: Subspace | None = None,
                    count: int | None = None, seed: int | None = None) -> Iterator[Subspace]:
    """Stream of canonical :class:`Subspace` objects for a family of d-flats."""
    if mode == "sample":
        yield from sample_flats(space, d, count, seed)
        return
    canonical = mode == "full"
    for bases in flat_batches(space, d, mode, pivot=pivot, count=count, seed=seed):
        for b in bases:
            if canonical:
                yield Subspace(space, tuple(tuple(int(x) for x in r) for r in b))
            else:
                yield Subspace.from_rows(space, b.tolist())
