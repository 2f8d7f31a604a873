"""Arithmetic over small finite fields GF(q), q = p^m <= 256, and dense
linear algebra (rank / solve / inverse) used by every other module.

Field elements are encoded as integers in [0, q): for prime fields the
residue itself, for extension fields the base-p digit expansion of the
polynomial representative (digit i = coefficient of x^i).  All operations
are table driven; q is capped at 256 so the tables stay tiny.

Elimination uses a fixed pivot rule (first nonzero column, lowest row) so
every trace and certificate is reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Sequence

MAX_FIELD_ORDER = 256


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# -- polynomial helpers over GF(p), coefficient tuples, index i = coeff of x^i


def _poly_trim(c: tuple[int, ...]) -> tuple[int, ...]:
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return c[:i]


def _poly_mod(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    """Remainder of a modulo b over GF(p); b must be nonzero."""
    a = list(_poly_trim(a))
    b = _poly_trim(b)
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) - 1 >= db and a:
        factor = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - db
        for i, coeff in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * coeff) % p
        while a and a[-1] == 0:
            a.pop()
    return tuple(a)


def _poly_mul(a: tuple[int, ...], b: tuple[int, ...], p: int) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(tuple(out))


def _is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Exhaustive trial division; fine for the degrees used here (<= 8)."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        # all monic divisor candidates of degree d
        for v in range(p**d):
            cand = _digits(v, p, d) + (1,)
            if not _poly_mod(poly, cand, p):
                return False
    # degree-1 factors are caught above for deg >= 2; for deg 1 irreducible
    return True


def _digits(v: int, p: int, m: int) -> tuple[int, ...]:
    out = []
    for _ in range(m):
        out.append(v % p)
        v //= p
    return tuple(out)


def _digits_to_int(digits: Sequence[int], p: int) -> int:
    v = 0
    for d in reversed(digits):
        v = v * p + d
    return v


class FieldError(ValueError):
    pass


class Field:
    """GF(p^m) with precomputed addition / multiplication / inverse tables.

    The reduction polynomial for m > 1 is the canonical one: the monic
    irreducible of degree m whose non-leading coefficient vector encodes
    the smallest integer sum(c_i * p^i).  (x^2+x+1 for GF(4), x^3+x+1 for
    GF(8), x^4+x+1 for GF(16), ...)
    """

    def __init__(self, p: int, m: int = 1):
        if not is_prime(p):
            raise FieldError(f"characteristic {p} is not prime")
        if m < 1:
            raise FieldError("extension degree must be >= 1")
        q = p**m
        if q > MAX_FIELD_ORDER:
            raise FieldError(f"field order {q} exceeds cap {MAX_FIELD_ORDER}")
        self.p = p
        self.m = m
        self.q = q
        self.reduction: Optional[tuple[int, ...]] = None
        if m > 1:
            self.reduction = self._canonical_reduction(p, m)
        self._build_tables()

    @staticmethod
    def _canonical_reduction(p: int, m: int) -> tuple[int, ...]:
        for v in range(p**m):
            poly = _digits(v, p, m) + (1,)
            if _is_irreducible(poly, p):
                return poly
        raise FieldError(f"no irreducible polynomial of degree {m} over GF({p})")

    def _build_tables(self) -> None:
        p, m, q = self.p, self.m, self.q
        if m == 1:
            self._add = [[(a + b) % p for b in range(q)] for a in range(q)]
            self._mul = [[(a * b) % p for b in range(q)] for a in range(q)]
            self._neg = [(-a) % p for a in range(q)]
        else:
            red = self.reduction
            assert red is not None
            self._add = [
                [
                    _digits_to_int(
                        [(x + y) % p for x, y in zip(_digits(a, p, m), _digits(b, p, m))], p
                    )
                    for b in range(q)
                ]
                for a in range(q)
            ]
            self._neg = [
                _digits_to_int([(-x) % p for x in _digits(a, p, m)], p) for a in range(q)
            ]
            self._mul = [[0] * q for _ in range(q)]
            for a in range(q):
                pa = _poly_trim(_digits(a, p, m))
                for b in range(a, q):
                    pb = _poly_trim(_digits(b, p, m))
                    prod = _poly_mod(_poly_mul(pa, pb, p), red, p)
                    v = _digits_to_int(prod + (0,) * (m - len(prod)), p)
                    self._mul[a][b] = v
                    self._mul[b][a] = v
        self._inv = [0] * q
        for a in range(1, q):
            for b in range(1, q):
                if self._mul[a][b] == 1:
                    self._inv[a] = b
                    break
            else:
                raise FieldError(f"element {a} has no inverse; field tables inconsistent")

    # element operations -------------------------------------------------

    def add(self, a: int, b: int) -> int:
        return self._add[a][b]

    def sub(self, a: int, b: int) -> int:
        return self._add[a][self._neg[b]]

    def neg(self, a: int) -> int:
        return self._neg[a]

    def mul(self, a: int, b: int) -> int:
        return self._mul[a][b]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return self._inv[a]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def check_element(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise FieldError(f"{a} is not an element of GF({self.q})")
        return a

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"GF({self.q})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and (self.p, self.m) == (other.p, other.m)

    def __hash__(self) -> int:
        return hash((self.p, self.m))


@lru_cache(maxsize=None)
def field_for_order(q: int) -> Field:
    """Field of order q, factoring q as p^m."""
    for p in range(2, q + 1):
        if not is_prime(p):
            continue
        m = 0
        v = q
        while v % p == 0:
            v //= p
            m += 1
        if v == 1 and m >= 1:
            return Field(p, m)
    raise FieldError(f"{q} is not a prime power")


# -- matrices -----------------------------------------------------------


@dataclass(frozen=True)
class Matrix:
    """Immutable row-major matrix of field elements (plain ints)."""

    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match dimensions")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> "Matrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        if any(len(row) != c for row in rows):
            raise ValueError("ragged rows")
        return cls(r, c, tuple(x for row in rows for x in row))

    def at(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def row_list(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]


def identity(n: int) -> Matrix:
    return Matrix(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))


def mat_transpose(a: Matrix) -> Matrix:
    return Matrix(a.cols, a.rows, tuple(a.at(i, j) for j in range(a.cols) for i in range(a.rows)))


def mat_mul(f: Field, a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch: {a.rows}x{a.cols} times {b.rows}x{b.cols}")
    out = []
    for i in range(a.rows):
        arow = a.row(i)
        for j in range(b.cols):
            acc = 0
            for t, av in enumerate(arow):
                if av:
                    acc = f.add(acc, f.mul(av, b.at(t, j)))
            out.append(acc)
    return Matrix(a.rows, b.cols, tuple(out))


def vec_mat_mul(f: Field, v: Sequence[int], a: Matrix) -> tuple[int, ...]:
    if len(v) != a.rows:
        raise ValueError("vector length does not match matrix rows")
    out = []
    for j in range(a.cols):
        acc = 0
        for i, vi in enumerate(v):
            if vi:
                acc = f.add(acc, f.mul(vi, a.at(i, j)))
        out.append(acc)
    return tuple(out)


def _eliminate(f: Field, work: list[list[int]]) -> list[int]:
    """In-place forward elimination; returns pivot column per pivot row.

    Pivot rule: scan columns left to right, take the lowest remaining row
    with a nonzero entry.
    """
    nrows = len(work)
    ncols = len(work[0]) if nrows else 0
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if work[i][col] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        work[r], work[pivot_row] = work[pivot_row], work[r]
        inv = f.inv(work[r][col])
        if inv != 1:
            work[r] = [f.mul(inv, x) for x in work[r]]
        for i in range(nrows):
            if i != r and work[i][col] != 0:
                factor = work[i][col]
                work[i] = [f.sub(x, f.mul(factor, y)) for x, y in zip(work[i], work[r])]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return pivots


def mat_rank(f: Field, a: Matrix) -> int:
    if a.rows == 0 or a.cols == 0:
        return 0
    work = a.row_list()
    return len(_eliminate(f, work))


def mat_solve(f: Field, a: Matrix, b: Matrix) -> Optional[Matrix]:
    """Any x with a @ x = b, or None when the system is inconsistent.

    Free variables are set to zero, so the result is deterministic.
    """
    if a.rows != b.rows:
        raise ValueError("a and b must have the same number of rows")
    n, m = a.rows, a.cols
    work = [list(a.row(i)) + list(b.row(i)) for i in range(n)]
    pivots = _eliminate(f, work)
    pivots = [c for c in pivots if c < m]
    rank = len(pivots)
    for i in range(rank, n):
        if any(work[i][m:]):
            return None
    out = [[0] * b.cols for _ in range(m)]
    for r, col in enumerate(pivots):
        for j in range(b.cols):
            out[col][j] = work[r][m + j]
    return Matrix.from_rows(out) if m else Matrix(0, b.cols, ())


def mat_inverse(f: Field, a: Matrix) -> Optional[Matrix]:
    if a.rows != a.cols:
        return None
    x = mat_solve(f, a, identity(a.rows))
    if x is None:
        return None
    # solve() guarantees a @ x = I; for square full-rank a this is the inverse
    return x


# -- bit-packed GF(2) helpers -------------------------------------------
#
# Hot paths (information-set enumeration, rate-matrix search) run over
# binary codes; representing vectors as ints makes rank checks cheap.


def bit_rank(vectors: Iterable[int]) -> int:
    basis: dict[int, int] = {}
    rank = 0
    for v in vectors:
        while v:
            h = v.bit_length() - 1
            if h in basis:
                v ^= basis[h]
            else:
                basis[h] = v
                rank += 1
                break
    return rank


class BitBasis:
    """Incremental GF(2) span of bit-vectors."""

    def __init__(self) -> None:
        self._pivots: dict[int, int] = {}

    def reduce(self, v: int) -> int:
        while v:
            h = v.bit_length() - 1
            if h not in self._pivots:
                return v
            v ^= self._pivots[h]
        return 0

    def add(self, v: int) -> bool:
        """Insert v; returns True when it enlarged the span."""
        v = self.reduce(v)
        if v == 0:
            return False
        self._pivots[v.bit_length() - 1] = v
        return True

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    @property
    def rank(self) -> int:
        return len(self._pivots)
