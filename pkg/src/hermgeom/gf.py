"""Table-backed arithmetic in GF(p^k).

Elements are plain integers in ``[0, m)``: index 0 is zero and index
``i >= 1`` stands for ``g**(i - 1)``, where ``g`` is the root of the Conway
polynomial (a primitive element).  With that ordering multiplication,
inversion, Frobenius and norm are index arithmetic modulo ``m - 1``;
addition goes through a table (or Zech logarithms for large fields).

Every table is a numpy array, so the same operations work on scalars and on
whole arrays of element indices.  :class:`Felt` wraps a single index with
operator overloading for interactive use and tests.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DivisionByZero,
    FieldMismatch,
    NoModulusAvailable,
    NonPrime,
    NoQuadraticSubfieldDeclared,
    OrderTooLarge,
)

MAX_ORDER = 1 << 20
FULL_TABLE_LIMIT = 1 << 10

# Conway polynomials, coefficients low-to-high (monic).
CONWAY: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (1, 1),
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (3, 1): (1, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (5, 1): (3, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (5, 4): (2, 4, 4, 0, 1),
    (7, 1): (4, 1),
    (7, 2): (3, 6, 1),
    (7, 3): (4, 0, 6, 1),
    (7, 4): (3, 4, 5, 0, 1),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _primitive_root(p: int) -> int:
    if p == 2:
        return 1
    fs = _prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in fs):
            return g
    raise AssertionError("unreachable")


def _modulus_for(p: int, k: int) -> tuple[int, ...]:
    if (p, k) in CONWAY:
        return CONWAY[(p, k)]
    if k == 1:
        # Conway polynomial of degree 1 is x - (least primitive root).
        return ((-_primitive_root(p)) % p, 1)
    raise NoModulusAvailable(f"no built-in modulus for GF({p}^{k})")


def _poly_irreducible(mod: Sequence[int], p: int) -> bool:
    """Irreducibility over GF(p) by trial division by monic polys of degree <= k/2."""
    k = len(mod) - 1

    def rem(a: list[int], b: list[int]) -> list[int]:
        a = a[:]
        db = len(b) - 1
        while len(a) - 1 >= db and any(a):
            if a[-1] == 0:
                a.pop()
                continue
            c = a[-1]
            shift = len(a) - 1 - db
            for j, bj in enumerate(b):
                a[shift + j] = (a[shift + j] - c * bj) % p
            a.pop()
        return a

    for d in range(1, k // 2 + 1):
        for tail in np.ndindex(*([p] * d)):
            div = list(tail) + [1]
            if not any(rem(list(mod), div)):
                return False
    return True


class Field:
    """The finite field GF(p^k) with precomputed lookup tables.

    Use :func:`field_build` rather than constructing directly; it caches one
    instance per ``(p, k)``.
    """

    def __init__(self, p: int, k: int):
        if not is_prime(p):
            raise NonPrime(p)
        if k < 1:
            raise NoModulusAvailable(f"extension degree must be >= 1, got {k}")
        m = p**k
        if m > MAX_ORDER:
            raise OrderTooLarge(f"GF({p}^{k}) has {m} > {MAX_ORDER} elements")
        mod = _modulus_for(p, k)
        if not _poly_irreducible(mod, p):
            raise NoModulusAvailable(f"modulus {mod} is reducible over GF({p})")

        self.p = p
        self.k = k
        self.order = m
        self.modulus = mod
        dtype = np.int32

        # Powers of the root x as coefficient vectors; code = sum c_j p^j.
        digits = np.zeros((m, k), dtype=np.int64)
        vec = [1] + [0] * (k - 1)
        for e in range(m - 1):
            digits[e + 1] = vec
            if k == 1:
                vec = [(vec[0] * (-mod[0])) % p]
            else:
                top = vec[-1]
                vec = [0] + vec[:-1]
                vec = [(v - top * c) % p for v, c in zip(vec, mod[:-1])]
        if vec != [1] + [0] * (k - 1):
            raise NoModulusAvailable(f"modulus {mod} is not primitive")
        weights = p ** np.arange(k, dtype=np.int64)
        code = digits @ weights
        if len(set(code.tolist())) != m:
            raise NoModulusAvailable(f"modulus {mod} is not primitive")
        self.digits = digits
        self.code = code  # element index -> additive code
        self.from_code = np.empty(m, dtype=dtype)
        self.from_code[code] = np.arange(m, dtype=dtype)

        idx = np.arange(m, dtype=np.int64)
        self.neg = self.from_code[(((-digits) % p) @ weights)].astype(dtype)
        self.inv = np.where(idx == 0, 0, 1 + (-(idx - 1)) % (m - 1)).astype(dtype)
        one_plus = self.from_code[(((digits + np.eye(1, k, 0, dtype=np.int64)) % p) @ weights)]
        # zech[i] = index of 1 + g^(i-1); zech[0] = index of 1 + 0 = 1
        self.zech = one_plus.astype(dtype)

        if m <= FULL_TABLE_LIMIT:
            sums = (digits[:, None, :] + digits[None, :, :]) % p
            self.add_table = self.from_code[sums @ weights].astype(dtype)
            a, b = np.meshgrid(idx, idx, indexing="ij")
            prod = 1 + ((a - 1) + (b - 1)) % (m - 1)
            self.mul_table = np.where((a == 0) | (b == 0), 0, prod).astype(dtype)
        else:
            self.add_table = None
            self.mul_table = None

        # absolute trace GF(p^k) -> GF(p), as an integer in [0, p)
        tr = np.zeros((m, k), dtype=np.int64)
        cur = idx.copy()
        for _ in range(k):
            tr = (tr + digits[cur]) % p
            cur = self.frobenius(cur, 1)
        # the trace lies in the prime field: only the constant digit survives
        self.abs_trace = tr[:, 0].copy()

        if k % 2 == 0:
            self.q = p ** (k // 2)
        else:
            self.q = None

    # -- identity / pickling ------------------------------------------------

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.k})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self) -> int:
        return hash((self.p, self.k))

    def __reduce__(self):
        return (field_build, (self.p, self.k))

    # -- element helpers ----------------------------------------------------

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def gen_power(self, e: int) -> int:
        """Index of g**e."""
        return 1 + e % (self.order - 1)

    def from_int(self, c: int) -> int:
        """Index of the prime-field element c mod p."""
        return int(self.from_code[c % self.p])

    def element(self, i: int) -> Felt:
        return Felt(self, int(i))

    def elements(self) -> list[Felt]:
        return [Felt(self, i) for i in range(self.order)]

    # -- vectorised arithmetic on index arrays ------------------------------

    def add(self, a, b):
        if self.add_table is not None:
            return self.add_table[a, b]
        a = np.asarray(a)
        b = np.asarray(b)
        m1 = self.order - 1
        # a + b = a * (1 + b/a) for a != 0
        ratio = np.where(b == 0, 0, 1 + ((b - 1) - (a - 1)) % m1)
        z = self.zech[ratio]
        out = np.where(z == 0, 0, 1 + ((a - 1) + (z - 1)) % m1)
        out = np.where(a == 0, b, np.where(b == 0, a, out))
        return out.astype(np.int32) if out.ndim else int(out)

    def sub(self, a, b):
        return self.add(a, self.neg[b])

    def mul(self, a, b):
        if self.mul_table is not None:
            return self.mul_table[a, b]
        a = np.asarray(a)
        b = np.asarray(b)
        out = np.where((a == 0) | (b == 0), 0, 1 + ((a - 1) + (b - 1)) % (self.order - 1))
        return out.astype(np.int32) if out.ndim else int(out)

    def div(self, a, b):
        if np.any(np.asarray(b) == 0):
            raise DivisionByZero("division by zero field element")
        return self.mul(a, self.inv[b])

    def pow(self, a, e: int):
        a = np.asarray(a)
        m1 = self.order - 1
        if e == 0:
            out = np.ones_like(a)
        elif e < 0:
            if np.any(a == 0):
                raise DivisionByZero("negative power of zero")
            out = 1 + ((a - 1) * (e % m1)) % m1
        else:
            out = np.where(a == 0, 0, 1 + ((a - 1) * (e % m1)) % m1)
        return out.astype(np.int32) if out.ndim else int(out)

    def frobenius(self, a, j: int = 1):
        """x -> x**(p**j)."""
        return self.pow(a, self.p**j) if j else np.asarray(a)

    def conj(self, a):
        """x -> x**q on GF(q^2)."""
        q = self.require_quadratic()
        return self.pow(a, q)

    def norm(self, a):
        """x -> x**(q+1), an element of GF(q)."""
        q = self.require_quadratic()
        return self.pow(a, q + 1)

    def trace(self, a):
        """x -> x + x**q, an element of GF(q)."""
        return self.add(a, self.conj(a))

    def require_quadratic(self) -> int:
        if self.q is None:
            raise NoQuadraticSubfieldDeclared(f"{self!r} is not of the form GF(q^2)")
        return self.q

    @functools.cached_property
    def subfield(self) -> Field:
        """GF(q) for a field GF(q^2), built with its own Conway polynomial."""
        self.require_quadratic()
        return field_build(self.p, self.k // 2)

    def to_subfield(self, a):
        """Map elements of GF(q) inside GF(q^2) to indices of :attr:`subfield`.

        Conway compatibility makes g**(q+1) the Conway generator of GF(q), so
        the map is index arithmetic.
        """
        q = self.require_quadratic()
        a = np.asarray(a)
        if np.any((a != 0) & ((a - 1) % (q + 1) != 0)):
            raise ValueError("element does not lie in GF(q)")
        out = np.where(a == 0, 0, 1 + (a - 1) // (q + 1))
        return out if out.ndim else int(out)

    def from_subfield(self, a):
        q = self.require_quadratic()
        a = np.asarray(a)
        out = np.where(a == 0, 0, 1 + (a - 1) * (q + 1))
        return out if out.ndim else int(out)

    def subfield_elements(self) -> np.ndarray:
        """Indices (in this field) of the q elements of GF(q)."""
        return self.from_subfield(np.arange(self.require_quadratic()))

    # -- small dense linear algebra -----------------------------------------

    @functools.cached_property
    def _scalar_tables(self):
        m = self.order
        if self.add_table is not None:
            add = self.add_table.tolist()
            mul = self.mul_table.tolist()
            return (lambda a, b: add[a][b]), (lambda a, b: mul[a][b])
        m1 = m - 1
        zech = self.zech.tolist()

        def mul_(a, b):
            return 0 if a == 0 or b == 0 else 1 + (a + b - 2) % m1

        def add_(a, b):
            if a == 0:
                return b
            if b == 0:
                return a
            z = zech[1 + (b - a) % m1]
            return 0 if z == 0 else 1 + (a + z - 2) % m1

        return add_, mul_

    def dot(self, u, v) -> int:
        add, mul = self._scalar_tables
        acc = 0
        for a, b in zip(u, v):
            if a and b:
                acc = add(acc, mul(int(a), int(b)))
        return acc

    def rref(self, rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
        """Reduced row echelon form.

        Pivot search runs left to right over columns and takes the lowest
        row index holding a nonzero entry.  Returns the nonzero rows and the
        pivot columns.
        """
        add, mul = self._scalar_tables
        inv = self.inv.tolist()
        neg = self.neg.tolist()
        M = [[int(x) for x in r] for r in rows]
        if not M:
            return [], []
        ncols = len(M[0])
        pivots: list[int] = []
        r = 0
        for c in range(ncols):
            if r == len(M):
                break
            piv = next((i for i in range(r, len(M)) if M[i][c]), None)
            if piv is None:
                continue
            M[r], M[piv] = M[piv], M[r]
            iv = inv[M[r][c]]
            M[r] = [mul(iv, x) for x in M[r]]
            pr = M[r]
            for i in range(len(M)):
                if i != r and M[i][c]:
                    f = neg[M[i][c]]
                    M[i] = [add(x, mul(f, y)) if y else x for x, y in zip(M[i], pr)]
            pivots.append(c)
            r += 1
        return M[:r], pivots


@functools.lru_cache(maxsize=None)
def field_build(p: int, k: int = 1) -> Field:
    """Build (or fetch the cached) GF(p^k)."""
    return Field(p, k)


def hermitian_field(q: int) -> Field:
    """GF(q^2) for a prime power q."""
    fs = _prime_factors(q)
    if len(fs) != 1:
        raise NonPrime(f"q={q} is not a prime power")
    p = fs[0]
    e = 0
    while q > 1:
        q //= p
        e += 1
    return field_build(p, 2 * e)


@dataclass(frozen=True)
class Felt:
    """A single field element: an index into a :class:`Field`."""

    field: Field
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.field.order:
            raise ValueError(f"index {self.index} out of range for {self.field!r}")

    def _other(self, other) -> int:
        if isinstance(other, Felt):
            if other.field != self.field:
                raise FieldMismatch(f"{self.field!r} vs {other.field!r}")
            return other.index
        if isinstance(other, int):
            return self.field.from_int(other)
        return NotImplemented

    def __add__(self, other):
        b = self._other(other)
        return Felt(self.field, int(self.field.add(self.index, b)))

    __radd__ = __add__

    def __sub__(self, other):
        b = self._other(other)
        return Felt(self.field, int(self.field.sub(self.index, b)))

    def __rsub__(self, other):
        b = self._other(other)
        return Felt(self.field, int(self.field.sub(b, self.index)))

    def __mul__(self, other):
        b = self._other(other)
        return Felt(self.field, int(self.field.mul(self.index, b)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._other(other)
        return Felt(self.field, int(self.field.div(self.index, b)))

    def __neg__(self):
        return Felt(self.field, int(self.field.neg[self.index]))

    def __pow__(self, e: int):
        return Felt(self.field, int(self.field.pow(self.index, e)))

    def __bool__(self) -> bool:
        return self.index != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, Felt):
            return self.field == other.field and self.index == other.index
        if isinstance(other, int):
            return self.index == self.field.from_int(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.field.p, self.field.k, self.index))

    def __repr__(self) -> str:
        if self.index == 0:
            return f"{self.field!r}(0)"
        return f"{self.field!r}(g^{self.index - 1})"


def arith(a: Felt, b: Felt | int, op: str) -> Felt:
    """Apply ``op`` in {add, sub, mul, div, pow} to two elements.

    For ``pow`` the second argument is an integer exponent.
    """
    if op == "pow":
        if not isinstance(b, int):
            raise TypeError("pow takes an integer exponent")
        return a**b
    if not isinstance(b, Felt) or b.field != a.field:
        raise FieldMismatch("operands live in different fields")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def conj(a: Felt) -> Felt:
    return Felt(a.field, int(a.field.conj(a.index)))


def norm_trace(a: Felt) -> tuple[Felt, Felt]:
    """(a**(q+1), a + a**q) as elements of the subfield GF(q)."""
    F = a.field
    sub = F.subfield
    n = F.to_subfield(F.norm(a.index))
    t = F.to_subfield(F.trace(a.index))
    return Felt(sub, int(n)), Felt(sub, int(t))


def linear_solve(M: Sequence[Sequence[int | Felt]], mode: str = "kernel",
                 field: Field | None = None) -> tuple[list[list[int]], int]:
    """Row-reduce ``M`` over its field.

    ``mode="rref"`` returns the nonzero rows of the reduced row echelon form;
    ``mode="kernel"`` returns a basis of the right kernel ``{v : M v = 0}``,
    itself in reduced echelon form.  Entries may be :class:`Felt` or raw
    indices (then ``field`` is required).  The rank is returned in both modes.
    """
    if not M or not len(M[0]):
        raise ValueError("empty matrix")
    rows = []
    for r in M:
        row = []
        for x in r:
            if isinstance(x, Felt):
                if field is None:
                    field = x.field
                elif x.field != field:
                    raise FieldMismatch("matrix entries from different fields")
                row.append(x.index)
            else:
                row.append(int(x))
        rows.append(row)
    if field is None:
        raise FieldMismatch("field could not be inferred from raw indices")
    R, pivots = field.rref(rows)
    rank = len(pivots)
    if mode == "rref":
        return R, rank
    if mode != "kernel":
        raise ValueError(f"unknown mode {mode!r}")
    ncols = len(rows[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for r, pc in enumerate(pivots):
            v[pc] = int(field.neg[R[r][f]])
        basis.append(v)
    if basis:
        basis, _ = field.rref(basis)
    return basis, rank
