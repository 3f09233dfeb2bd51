from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hermgeom.errors import (
    DivisionByZero,
    FieldMismatch,
    NoModulusAvailable,
    NonPrime,
    NoQuadraticSubfieldDeclared,
    OrderTooLarge,
)
from hermgeom.gf import CONWAY, Felt, arith, conj, field_build, hermitian_field, linear_solve, norm_trace

SMALL = [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 2), (7, 2), (3, 3)]


# -- an independent model of GF(p)[x]/(f) ------------------------------------------


def _pmulmod(a, b, f, p):
    k = len(f) - 1
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    for d in range(len(out) - 1, k - 1, -1):
        c = out[d]
        if c:
            for j in range(k + 1):
                out[d - k + j] = (out[d - k + j] - c * f[j]) % p
    out = out[:k] + [0] * (k - len(out))
    return out


def _ppow(a, e, f, p):
    k = len(f) - 1
    res = [1] + [0] * (k - 1)
    while e:
        if e & 1:
            res = _pmulmod(res, a, f, p)
        a = _pmulmod(a, a, f, p)
        e >>= 1
    return res


def _prime_divisors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    return out + ([n] if n > 1 else [])


def _eval_poly_at(g, e, f, p):
    """g(x^e) modulo f."""
    k = len(f) - 1
    xe = _ppow([0, 1] + [0] * (k - 2) if k > 1 else [0], e, f, p) if k > 1 else None
    acc = [0] * k
    term = [1] + [0] * (k - 1)
    for c in g:
        acc = [(u + c * v) % p for u, v in zip(acc, term)]
        term = _pmulmod(term, xe, f, p) if k > 1 else term
    return acc


def conway_search(p, k, known):
    """Least primitive compatible polynomial under the alternating-sign ordering."""
    N = p**k - 1
    one = [1] + [0] * (k - 1)
    x = [0, 1] + [0] * (k - 2) if k > 1 else None
    for seq in itertools.product(range(p), repeat=k):
        f = [0] * (k + 1)
        f[k] = 1
        for j, a in enumerate(seq, start=1):
            f[k - j] = ((-1) ** j * a) % p
        if f[0] == 0:
            continue
        if k == 1:
            root = (-f[0]) % p
            if all(pow(root, N // r, p) != 1 for r in _prime_divisors(N)):
                return tuple(f)
            continue
        if _ppow(x, N, f, p) != one:
            continue
        if any(_ppow(x, N // r, f, p) == one for r in _prime_divisors(N)):
            continue
        ok = True
        for d in range(1, k):
            if k % d == 0 and _eval_poly_at(list(known[(p, d)]), N // (p**d - 1), f, p) != [0] * k:
                ok = False
                break
        if ok:
            return tuple(f)
    raise AssertionError("no candidate")


def test_conway_table_matches_brute_force():
    known = {}
    for (p, k) in sorted(CONWAY, key=lambda t: (t[0], t[1])):
        known[(p, k)] = conway_search(p, k, known)
        assert known[(p, k)] == CONWAY[(p, k)], (p, k)


@pytest.mark.parametrize("p,k", SMALL)
def test_tables_match_polynomial_model(p, k):
    F = field_build(p, k)
    m = F.order
    digits = [list(map(int, F.digits[i])) for i in range(m)]
    f = list(F.modulus)
    for a in range(m):
        for b in range(m):
            s = [(x + y) % p for x, y in zip(digits[a], digits[b])]
            assert digits[int(F.add(a, b))] == s
            if k > 1:
                assert digits[int(F.mul(a, b))] == _pmulmod(digits[a], digits[b], f, p)
            else:
                assert digits[int(F.mul(a, b))][0] == digits[a][0] * digits[b][0] % p


@pytest.mark.parametrize("p,k", SMALL + [(5, 4), (3, 4), (7, 3)])
def test_group_laws_exhaustive(p, k):
    F = field_build(p, k)
    m = F.order
    a = np.arange(m)
    assert np.all(F.pow(a, m) == a)
    assert np.all(F.pow(a[1:], m - 1) == 1)
    assert np.all(F.mul(a[1:], F.inv[a[1:]]) == 1)
    assert np.all(F.add(a, F.neg[a]) == 0)
    # the generator has full multiplicative order
    g = F.gen_power(1)
    orders = [e for e in range(1, m) if int(F.pow(g, e)) == 1]
    assert orders[0] == m - 1


def test_zech_path_agrees_with_digits():
    F = field_build(7, 4)
    assert F.add_table is None
    rng = np.random.default_rng(0)
    a = rng.integers(0, F.order, 5000)
    b = rng.integers(0, F.order, 5000)
    s = F.add(a, b)
    assert np.array_equal(F.digits[s], (F.digits[a] + F.digits[b]) % 7)
    add, mul = F._scalar_tables
    assert [add(int(x), int(y)) for x, y in zip(a[:300], b[:300])] == s[:300].tolist()


@given(st.sampled_from(SMALL), st.data())
def test_field_axioms_property(pk, data):
    F = field_build(*pk)
    el = st.integers(0, F.order - 1)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.sub(F.add(a, b), b) == a
    if b:
        assert F.mul(F.div(a, b), b) == a


@pytest.mark.parametrize("q", [2, 3, 4, 5, 7])
def test_conjugation_is_order_two_automorphism(q):
    F = hermitian_field(q)
    a = np.arange(F.order)
    c = F.conj(a)
    assert np.array_equal(F.conj(c), a)
    assert not np.array_equal(c, a)
    assert int((c == a).sum()) == q
    A, B = np.meshgrid(a, a, indexing="ij")
    assert np.array_equal(F.conj(F.add(A, B)), F.add(F.conj(A), F.conj(B)))
    assert np.array_equal(F.conj(F.mul(A, B)), F.mul(F.conj(A), F.conj(B)))


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_norm_and_trace_land_in_subfield(q):
    F = hermitian_field(q)
    a = np.arange(F.order)
    sub = set(F.subfield_elements().tolist())
    N, T = F.norm(a), F.trace(a)
    assert set(N.tolist()) == sub and set(T.tolist()) == sub
    vals, cnt = np.unique(N[1:], return_counts=True)
    assert np.all(cnt == q + 1) and len(vals) == q - 1
    # the embedding of GF(q) is a ring map
    S = F.subfield
    x = np.arange(q)
    X, Y = np.meshgrid(x, x, indexing="ij")
    assert np.array_equal(F.from_subfield(S.mul(X, Y)), F.mul(F.from_subfield(X), F.from_subfield(Y)))
    assert np.array_equal(F.from_subfield(S.add(X, Y)), F.add(F.from_subfield(X), F.from_subfield(Y)))


def test_small_frozen_examples(F4, F9):
    assert F9.order == 9 and field_build(3, 1).inv[2] == 2
    w = F4.element(2)
    assert w * w * w == F4.element(1)
    assert w + w * w == F4.element(1)
    assert conj(w) == w * w
    N, T = norm_trace(w)
    assert N.index == 1 and N.field.order == 2
    assert all(int(F9.mul(a, F9.conj(a))) in F9.subfield_elements() for a in range(9))
    assert norm_trace(F9.element(0))[0].index == 0 and norm_trace(F9.element(0))[1].index == 0
    assert sum(1 for a in range(9) if int(F9.to_subfield(F9.norm(a))) == 2) == 4


def test_felt_operations(F9, F4):
    a, b = F9.element(3), F9.element(7)
    assert arith(a, b, "add") == a + b
    assert arith(a, b, "div") * b == a
    assert arith(a, 9, "pow") == a
    assert -a + a == F9.element(0)
    with pytest.raises(DivisionByZero):
        a / F9.element(0)
    with pytest.raises(FieldMismatch):
        a + F4.element(1)
    with pytest.raises(FieldMismatch):
        arith(a, F4.element(1), "mul")


def test_errors():
    with pytest.raises(NonPrime):
        field_build(4, 1)
    with pytest.raises(NoModulusAvailable):
        field_build(2, 12)
    with pytest.raises(OrderTooLarge):
        field_build(2, 40)
    with pytest.raises(NoQuadraticSubfieldDeclared):
        field_build(2, 3).conj(1)
    with pytest.raises(NonPrime):
        hermitian_field(6)


def test_generic_prime_fields():
    F = field_build(11, 1)
    a = np.arange(11)
    assert np.array_equal(F.digits[F.mul(a[:, None], a[None, :])][..., 0], np.outer(F.digits[:, 0], F.digits[:, 0]) % 11)


def test_linear_solve_examples(F9):
    I = [[int(i == j) for j in range(3)] for i in range(3)]
    basis, rank = linear_solve(I, field=F9)
    assert basis == [] and rank == 3
    basis, rank = linear_solve([[0, 0, 0], [0, 0, 0]], field=F9)
    assert len(basis) == 3 and rank == 0
    r1, r2 = [1, 2, 3, 4], [5, 0, 7, 1]
    r3 = [int(F9.add(x, y)) for x, y in zip(r1, r2)]
    M = [r1, r2, r3, [0, 0, 0, 0]]
    basis, rank = linear_solve(M, field=F9)
    assert rank == 2 and len(basis) == 2
    for v in basis:
        assert all(F9.dot(row, v) == 0 for row in M)
    felts = [[F9.element(x) for x in r] for r in M]
    assert linear_solve(felts) == (basis, rank)
    R, rank2 = linear_solve(M, "rref", field=F9)
    assert rank2 == 2 and len(R) == 2


@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_linear_solve_property(rows, cols, seed):
    F = hermitian_field(3)
    M = np.random.default_rng(seed).integers(0, 9, size=(rows, cols)).tolist()
    basis, rank = linear_solve(M, field=F)
    assert rank + len(basis) == cols
    for v in basis:
        assert all(F.dot(r, v) == 0 for r in M)
    if basis:
        assert len(F.rref(basis)[1]) == len(basis)


def test_pickle_roundtrip_keeps_cache_identity(F9):
    import pickle

    assert pickle.loads(pickle.dumps(F9)) is F9
