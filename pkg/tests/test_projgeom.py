from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hermgeom.errors import BadPivot, TooManyFlats, ZeroVector
from hermgeom.gf import field_build, hermitian_field
from hermgeom.projgeom import (
    PointSet,
    ProjPoint,
    ProjSpace,
    Subspace,
    count_flats,
    enumerate_flats,
    flat_batches,
    gaussian_binomial,
    join,
    meet,
    normalize,
    point_index,
    point_unindex,
    sample_flats,
    sample_points,
    span,
    subspace_points,
    theta,
)

F4 = field_build(2, 2)
F9 = hermitian_field(3)


def _random_flat(space, d, seed):
    rng = np.random.default_rng(seed)
    while True:
        M = rng.integers(0, space.m, size=(d + 1, space.n + 1))
        R, piv = space.field.rref(M.tolist())
        if len(piv) == d + 1:
            return Subspace(space, tuple(tuple(r) for r in R))


def _brute_normalized(space):
    out = []
    for v in itertools.product(range(space.m), repeat=space.n + 1):
        nz = [x for x in v if x]
        if nz and nz[0] == 1:
            out.append(v)
    return out


def test_gaussian_binomial_values():
    assert gaussian_binomial(7, 1, 9) == 597871
    assert gaussian_binomial(4, 2, 2) == 35
    assert all(gaussian_binomial(n, 0, 9) == 1 for n in range(6))
    assert gaussian_binomial(7, 6, 9) == 3**12 + 3**10 + 3**8 + 3**6 + 3**4 + 3**2 + 1
    assert gaussian_binomial(3, 5, 2) == 0
    for n in range(1, 6):
        for k in range(n + 1):
            assert gaussian_binomial(n, k, 4) == gaussian_binomial(n, n - k, 4)


def test_point_counts():
    assert ProjSpace(2, F9).npoints == 91
    assert ProjSpace(6, F9).npoints == 597871
    assert theta(3, 9) == 820 and theta(-1, 9) == 0


@pytest.mark.parametrize("n,F", [(2, F9), (3, F4), (4, F4), (2, field_build(5, 1))])
def test_index_is_a_bijection_onto_normalized_vectors(n, F):
    space = ProjSpace(n, F)
    brute = _brute_normalized(space)
    assert len(brute) == space.npoints
    X = space.all_points
    assert sorted(map(tuple, X.tolist())) == sorted(brute)
    assert np.array_equal(space.index(X), np.arange(space.npoints))
    assert np.array_equal(space.unindex(np.arange(space.npoints)), X)


def test_unindex_roundtrip_large_space():
    space = ProjSpace(6, F9)
    idx = sample_points(space, 1000, seed=5)
    for i in idx[:200]:
        P = point_unindex(space, int(i))
        assert point_index(P) == i
    assert np.array_equal(space.index(space.unindex(idx)), idx)


@given(st.lists(st.integers(0, 8), min_size=7, max_size=7).filter(any), st.integers(1, 8))
def test_normalize_is_scale_invariant(v, lam):
    a = normalize(F9, [v])
    b = normalize(F9, [[int(F9.mul(lam, x)) for x in v]])
    assert np.array_equal(a, b)
    P = ProjPoint(ProjSpace(6, F9), tuple(int(x) for x in a[0]))
    assert P.coords[next(i for i, x in enumerate(P.coords) if x)] == 1


def test_point_validation():
    space = ProjSpace(2, F9)
    with pytest.raises(ZeroVector):
        ProjPoint(space, (0, 0, 0))
    with pytest.raises(ValueError):
        ProjPoint(space, (2, 1, 0))
    with pytest.raises(ZeroVector):
        normalize(F9, [[0, 0, 0]])


def test_span_examples(F9=F9):
    space = ProjSpace(6, F9)
    P, Q = point_unindex(space, 17), point_unindex(space, 123456)
    assert span([P, Q]).dim == 1
    assert span([P, P, P]).dim == 0
    e = next(x for x in range(1, 9) if int(F9.norm(x)) == int(F9.neg[1]))
    rows = [(1, e, 0, 0, 0, 0, 0), (0, 0, 1, e, 0, 0, 0), (0, 0, 0, 0, 1, e, 0)]
    G = span(rows, space)
    assert G.dim == 2 and len(G.points()) == 91


def test_subspace_point_counts():
    space = ProjSpace(6, F9)
    for d, size in [(0, 1), (1, 10), (2, 91), (3, 820)]:
        assert subspace_points(_random_flat(space, d, d)).card == size


@given(st.integers(0, 3), st.integers(0, 2**31))
def test_span_of_points_recovers_flat(d, seed):
    space = ProjSpace(4, F9)
    S = _random_flat(space, d, seed)
    pts = S.points()
    assert pts.card == theta(d, 9)
    assert span([tuple(r) for r in pts.coords().tolist()], space) == S
    for P in pts.coords()[:20]:
        assert S.contains_vector(P.tolist())


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 2**31))
def test_join_meet_dimension_formula(a, b, seed):
    space = ProjSpace(4, F4)
    A, B = _random_flat(space, a, seed), _random_flat(space, b, seed + 1)
    J, M = join(A, B), meet(A, B)
    dm = -1 if M is None else M.dim
    assert J.dim + dm == A.dim + B.dim
    assert J.contains(A) and J.contains(B)
    if M is not None:
        assert A.contains(M) and B.contains(M)
        assert (A.points() & B.points()) == M.points()
    else:
        assert (A.points() & B.points()).card == 0


def test_lines_of_pg32_by_exhaustion():
    space = ProjSpace(3, field_build(2, 1))
    X = space.all_points.tolist()
    lines = {span([P, Q], space) for P, Q in itertools.combinations(X, 2)}
    assert len(lines) == 35 == gaussian_binomial(4, 2, 2)
    assert set(enumerate_flats(space, 1)) == lines


@pytest.mark.parametrize("n,F", [(2, F4), (3, F4), (4, F4), (2, F9), (3, F9)])
def test_full_enumeration_is_exact(n, F):
    space = ProjSpace(n, F)
    for d in range(n):
        B = np.concatenate(list(flat_batches(space, d, "full")))
        assert len(B) == count_flats(space, d)
        assert len({b.tobytes() for b in B}) == len(B)
        # every basis is already canonical
        for b in B[:: max(1, len(B) // 200)]:
            assert Subspace.from_rows(space, b.tolist()).basis == tuple(map(tuple, b.tolist()))


@pytest.mark.parametrize("s,d", [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])
def test_through_mode_is_subset_of_full(s, d):
    space = ProjSpace(4, F4)
    pivot = _random_flat(space, s, 10 * s + d)
    through = list(enumerate_flats(space, d, "through", pivot=pivot))
    assert len(through) == gaussian_binomial(4 - s, d - s, 4)
    assert len(set(through)) == len(through)
    assert all(S.contains(pivot) and S.dim == d for S in through)
    full = {S for S in enumerate_flats(space, d) if S.contains(pivot)}
    assert set(through) == full


def test_through_counts_in_pg69():
    space = ProjSpace(6, F9)
    plane = _random_flat(space, 2, 1)
    solid = _random_flat(space, 3, 2)
    # solids through a plane: the quotient is PG(3, 9)
    assert sum(len(b) for b in flat_batches(space, 3, "through", pivot=plane)) == 820
    fours = list(enumerate_flats(space, 4, "through", pivot=solid))
    assert len(fours) == 91 and all(S.contains(solid) for S in fours)
    assert sum(len(b) for b in flat_batches(space, 1, "through", pivot=Subspace(space, (point_unindex(space, 0).coords,)))) == 66430


def test_guards_and_pivots():
    space = ProjSpace(6, F9)
    with pytest.raises(TooManyFlats):
        next(flat_batches(space, 3, "full"))
    with pytest.raises(BadPivot):
        next(flat_batches(space, 2, "through", pivot=_random_flat(space, 2, 0)))
    with pytest.raises(BadPivot):
        next(flat_batches(space, 2, "through"))
    with pytest.raises(ValueError):
        next(flat_batches(space, 2, "sample", count=3))
    with pytest.raises(ValueError):
        next(flat_batches(space, 7, "full"))


def test_sampling_is_deterministic_and_distinct():
    space = ProjSpace(6, F9)
    a = sample_flats(space, 3, 300, seed=42)
    b = sample_flats(space, 3, 300, seed=42)
    c = sample_flats(space, 3, 300, seed=43)
    assert a == b and a != c
    assert len(set(a)) == 300
    assert sample_flats(space, 3, 100, seed=42) == a[:100]
    pts = sample_points(space, 50, seed=1)
    assert len(set(pts.tolist())) == 50 and np.array_equal(pts, sample_points(space, 50, seed=1))
    small = ProjSpace(2, F4)
    assert len(set(sample_flats(small, 1, 21, seed=0))) == 21
    with pytest.raises(TooManyFlats):
        sample_flats(small, 1, 22, seed=0)


def test_pointset_algebra():
    space = ProjSpace(2, F9)
    A = PointSet.from_indices(space, [0, 1, 2, 50])
    B = PointSet.from_indices(space, [2, 50, 90])
    assert (A | B).card == 5 and (A & B).card == 2 and (A - B).card == 2
    assert PointSet.full(space).card == 91 and PointSet.empty(space).card == 0
    assert A.with_flipped(0).card == 3 and A.with_flipped(3).card == 5
    assert point_unindex(space, 50) in A and point_unindex(space, 51) not in A
    with pytest.raises(ValueError):
        A.bits[0] = False
    L = _random_flat(space, 1, 3)
    assert PointSet.full(space).count_in(L) == 10
