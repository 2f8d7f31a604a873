"""Linear block codes over GF(q) and the structure analysis the retrieval
protocols rely on: information sets, puncturing/shortening, generalized
Hamming weights, direct-sum decomposition and erasure-determination tests.

Coordinates are 1-based everywhere in the public API, matching the usual
coding-theory convention; serialized forms state this explicitly.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

from .galois import (
    BitBasis,
    Field,
    Matrix,
    bit_rank,
    field_for_order,
    mat_rank,
    mat_solve,
    mat_transpose,
    vec_mat_mul,
)

ENUM_MAX_N = 24  # guard for exhaustive information-set enumeration
GHW_MAX_CODEWORDS = 1 << 20  # guard for subspace enumeration (q^k)
DECOMPOSE_MAX_N = 16  # guard for the subset split search


class CodeError(ValueError):
    pass


class ParseError(CodeError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


CoordSet = tuple[int, ...]  # sorted, 1-based


def coord_set(coords: Sequence[int]) -> CoordSet:
    out = tuple(sorted(set(coords)))
    if len(out) != len(tuple(coords)):
        raise CodeError(f"duplicate coordinates in {tuple(coords)}")
    return out


class LinearCode:
    """An [n, k] code given by a full-rank generator matrix."""

    def __init__(
        self,
        field: Field,
        gen: Matrix,
        parent_coords: Optional[CoordSet] = None,
    ):
        self.field = field
        self.gen = gen
        self.k = gen.rows
        self.n = gen.cols
        if self.k == 0 or self.n == 0:
            raise CodeError("empty generator matrix")
        if self.k > self.n:
            raise CodeError(f"dimension {self.k} exceeds blocklength {self.n}")
        for x in gen.entries:
            field.check_element(x)
        if mat_rank(field, gen) != self.k:
            raise CodeError("generator matrix is rank deficient")
        # column j (0-based) of G, and a bitmask form when binary
        self.columns = tuple(gen.column(j) for j in range(self.n))
        self.col_masks: Optional[tuple[int, ...]] = None
        if field.q == 2:
            self.col_masks = tuple(
                sum(bit << i for i, bit in enumerate(col)) for col in self.columns
            )
        # identity map when this code was not punctured out of a parent
        self.parent_coords: CoordSet = (
            parent_coords if parent_coords is not None else tuple(range(1, self.n + 1))
        )
        if len(self.parent_coords) != self.n:
            raise CodeError("parent coordinate map length mismatch")

    def __repr__(self) -> str:
        return f"LinearCode[{self.n},{self.k}]@GF({self.field.q})"

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LinearCode)
            and self.field == other.field
            and self.gen == other.gen
        )

    def __hash__(self) -> int:
        return hash((self.field, self.gen))

    def check_coords(self, coords: Sequence[int]) -> CoordSet:
        out = coord_set(coords)
        if out and (out[0] < 1 or out[-1] > self.n):
            raise CodeError(f"coordinates {out} out of range 1..{self.n}")
        return out

    def rank_of_columns(self, coords: Sequence[int]) -> int:
        if self.col_masks is not None:
            return bit_rank(self.col_masks[j - 1] for j in coords)
        sub = Matrix.from_rows(
            [[self.gen.at(i, j - 1) for j in coords] for i in range(self.k)]
        )
        return mat_rank(self.field, sub)

    def columns_matrix(self, coords: Sequence[int]) -> Matrix:
        """G restricted to the given 1-based columns (k x |coords|)."""
        return Matrix.from_rows(
            [[self.gen.at(i, j - 1) for j in coords] for i in range(self.k)]
        )

    def codewords(self):
        """All q^k codewords, message-lexicographic order."""
        f = self.field
        for msg in itertools.product(range(f.q), repeat=self.k):
            yield encode(self, msg)


# -- parsing -------------------------------------------------------------


def _parse_row(token: str, q: int, line_no: int) -> list[int]:
    token = token.strip()
    if "," in token or " " in token:
        parts = [p for p in token.replace(",", " ").split() if p]
    elif q <= 10:
        parts = list(token)
    else:
        parts = [token]
    try:
        row = [int(p) for p in parts]
    except ValueError:
        raise ParseError(line_no, f"bad row entry in {token!r}")
    for x in row:
        if not 0 <= x < q:
            raise ParseError(line_no, f"entry {x} is not in GF({q})")
    return row


def parse_code_spec(text: str) -> LinearCode:
    """Parse a code-spec document.

    Two body variants against a `field q=N` header::

        field q=2
        rows: 10010 / 01010 / 00101      # explicit rows

        field q=2
        dec k=4: 1,2,4,8,8,14,5          # decimal columns, LSB = row 1

    '#' starts a comment; blank lines are ignored.
    """
    field: Optional[Field] = None
    rows: list[list[int]] = []
    dec_cols: Optional[tuple[int, list[int]]] = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        low = line.lower()
        if low.startswith("field"):
            body = line[len("field") :].strip()
            if not body.startswith("q=") and not body.startswith("q ="):
                raise ParseError(line_no, "expected 'field q=<order>'")
            try:
                q = int(body.split("=", 1)[1])
            except ValueError:
                raise ParseError(line_no, "bad field order")
            try:
                field = field_for_order(q)
            except Exception as exc:
                raise ParseError(line_no, str(exc))
        elif low.startswith("rows:") or low.startswith("rows "):
            if field is None:
                raise ParseError(line_no, "field must be declared before rows")
            body = line.split(":", 1)[1] if ":" in line else line[4:]
            for token in body.split("/"):
                if token.strip():
                    rows.append(_parse_row(token, field.q, line_no))
        elif low.startswith("dec"):
            if field is None:
                raise ParseError(line_no, "field must be declared before columns")
            head, _, body = line.partition(":")
            head = head[3:].strip()
            if not head.startswith("k="):
                raise ParseError(line_no, "expected 'dec k=<dimension>: v1,v2,...'")
            try:
                k = int(head[2:])
                values = [int(v) for v in body.replace(",", " ").split()]
            except ValueError:
                raise ParseError(line_no, "bad decimal column list")
            for v in values:
                if not 0 <= v < field.q**k:
                    raise ParseError(
                        line_no, f"decimal column {v} out of range for k={k}"
                    )
            dec_cols = (k, values)
        elif "/" in line and field is not None and not rows and dec_cols is None:
            for token in line.split("/"):
                if token.strip():
                    rows.append(_parse_row(token, field.q, line_no))
        else:
            raise ParseError(line_no, f"unrecognized directive: {line!r}")
    if field is None:
        raise ParseError(1, "missing 'field q=...' header")
    if dec_cols is not None:
        k, values = dec_cols
        p = field.p
        cols = []
        for v in values:
            digits = []
            for _ in range(k):
                digits.append(v % p)
                v //= p
            cols.append(digits)
        gen = Matrix.from_rows([[col[i] for col in cols] for i in range(k)])
    elif rows:
        if any(len(r) != len(rows[0]) for r in rows):
            raise ParseError(1, "rows have inconsistent lengths")
        gen = Matrix.from_rows(rows)
    else:
        raise ParseError(1, "no generator rows given")
    try:
        return LinearCode(field, gen)
    except CodeError as exc:
        raise ParseError(1, str(exc))


def code_spec_text(code: LinearCode) -> str:
    """Round-trippable explicit-rows spec document (1-based coordinates)."""
    if code.field.q <= 10:
        rows = " / ".join("".join(str(x) for x in code.gen.row(i)) for i in range(code.k))
    else:
        rows = " / ".join(
            ",".join(str(x) for x in code.gen.row(i)) for i in range(code.k)
        )
    return f"field q={code.field.q}\nrows: {rows}\n"


# -- basic operations ----------------------------------------------------


def encode(code: LinearCode, msg: Sequence[int]) -> tuple[int, ...]:
    if len(msg) != code.k:
        raise CodeError(f"message length {len(msg)} != k={code.k}")
    return vec_mat_mul(code.field, msg, code.gen)


def is_information_set(code: LinearCode, coords: Sequence[int]) -> bool:
    s = code.check_coords(coords)
    if len(s) != code.k:
        raise CodeError(f"information set must have size k={code.k}, got {len(s)}")
    return code.rank_of_columns(s) == code.k


def enumerate_information_sets(code: LinearCode) -> list[CoordSet]:
    """All k-subsets with invertible restriction, lexicographic order."""
    if code.n > ENUM_MAX_N:
        raise CodeError(f"blocklength {code.n} exceeds enumeration guard {ENUM_MAX_N}")
    out = []
    for combo in itertools.combinations(range(1, code.n + 1), code.k):
        if code.rank_of_columns(combo) == code.k:
            out.append(combo)
    return out


def first_information_set(
    code: LinearCode, within: Optional[Sequence[int]] = None
) -> Optional[CoordSet]:
    """Lexicographically smallest information set, optionally inside a
    coordinate support.  Greedy rank growth gives the lex-min matroid basis.
    """
    pool = code.check_coords(within) if within is not None else tuple(
        range(1, code.n + 1)
    )
    if code.col_masks is not None:
        basis = BitBasis()
        chosen = []
        for j in pool:
            if basis.add(code.col_masks[j - 1]):
                chosen.append(j)
                if len(chosen) == code.k:
                    return tuple(chosen)
        return None
    chosen = []
    for j in pool:
        trial = chosen + [j]
        if code.rank_of_columns(trial) == len(trial):
            chosen = trial
            if len(chosen) == code.k:
                return tuple(chosen)
    return None


def puncture(code: LinearCode, coords: Sequence[int]) -> LinearCode:
    """Code generated by G restricted to the given columns, dependent rows
    removed (keeping the earliest independent rows).  The result addresses
    its position in the parent through ``parent_coords``.
    """
    s = code.check_coords(coords)
    if not s:
        raise CodeError("cannot puncture to the empty coordinate set")
    restricted = [[code.gen.at(i, j - 1) for j in s] for i in range(code.k)]
    kept: list[list[int]] = []
    if code.field.q == 2:
        basis = BitBasis()
        for row in restricted:
            if basis.add(sum(b << i for i, b in enumerate(row))):
                kept.append(row)
    else:
        for row in restricted:
            trial = Matrix.from_rows(kept + [row])
            if mat_rank(code.field, trial) == len(kept) + 1:
                kept.append(row)
    if not kept:
        raise CodeError(f"restriction to {s} has dimension 0")
    parent = tuple(code.parent_coords[j - 1] for j in s)
    return LinearCode(code.field, Matrix.from_rows(kept), parent_coords=parent)


def shortened_dimension(code: LinearCode, coords: Sequence[int]) -> int:
    """Dimension of the code shortened to `coords` (codewords supported
    inside `coords`, restricted to them): k - rank(G outside coords).
    """
    s = code.check_coords(coords)
    inside = set(s)
    outside = [j for j in range(1, code.n + 1) if j not in inside]
    if not outside:
        return code.k
    return code.k - code.rank_of_columns(outside)


# -- generalized Hamming weights ------------------------------------------


def _rref_matrices(q: int, s: int, k: int):
    """All s x k matrices over GF(q) in reduced row-echelon form: one
    canonical generator per s-dimensional subspace of GF(q)^k.
    """
    for pivots in itertools.combinations(range(k), s):
        free_positions = [
            (r, c)
            for r in range(s)
            for c in range(pivots[r] + 1, k)
            if c not in pivots
        ]
        for values in itertools.product(range(q), repeat=len(free_positions)):
            m = [[0] * k for _ in range(s)]
            for r, c in zip(range(s), pivots):
                m[r][c] = 1
            for (r, c), v in zip(free_positions, values):
                m[r][c] = v
            yield m


def generalized_hamming_weight(code: LinearCode, s: int) -> int:
    """d_s: the smallest support of an s-dimensional subcode, by exhaustive
    enumeration of message-space subspaces (canonical RREF generators).
    """
    if not 1 <= s <= code.k:
        raise CodeError(f"subcode dimension {s} out of range 1..{code.k}")
    q = code.field.q
    if q**code.k > GHW_MAX_CODEWORDS:
        raise CodeError("code too large for exhaustive subcode enumeration")
    f = code.field
    best = code.n
    for m in _rref_matrices(q, s, code.k):
        support = 0
        for j in range(code.n):
            col = code.columns[j]
            for row in m:
                acc = 0
                for t, rv in enumerate(row):
                    if rv and col[t]:
                        acc = f.add(acc, f.mul(rv, col[t]))
                if acc:
                    support += 1
                    break
            if support >= best:
                break
        if support < best:
            best = support
    return best


def ghw_profile(code: LinearCode) -> tuple[int, ...]:
    return tuple(generalized_hamming_weight(code, s) for s in range(1, code.k + 1))


# -- direct-sum decomposition ----------------------------------------------


@dataclass(frozen=True)
class DirectSumDecomposition:
    parts: tuple[CoordSet, ...]
    subcodes: tuple[LinearCode, ...]
    dims: tuple[int, ...] = dc_field(default=())

    @property
    def is_trivial(self) -> bool:
        return len(self.parts) == 1


def finest_direct_sum(code: LinearCode) -> DirectSumDecomposition:
    """Finest coordinate partition {A_p} with sum_p dim(shorten(code, A_p))
    = k; parts need not be contiguous.  Returns the punctured subcode per
    part.  Splits are searched smallest-first with lexicographic tie-break
    and recursion on both sides, so the (unique) finest partition comes out
    in a deterministic order.
    """
    if code.n > DECOMPOSE_MAX_N:
        raise CodeError(f"blocklength {code.n} exceeds decomposition guard {DECOMPOSE_MAX_N}")
    for j in range(code.n):
        if all(x == 0 for x in code.columns[j]):
            raise CodeError(f"coordinate {j + 1} is outside the code support")

    def split(coords: tuple[int, ...]) -> list[tuple[int, ...]]:
        total = shortened_dimension(code, coords)
        rest_pool = coords[1:]
        for size_a in range(1, len(coords) // 2 + 1):
            for extra in itertools.combinations(rest_pool, size_a - 1):
                a = (coords[0],) + extra
                b = tuple(j for j in coords if j not in set(a))
                if (
                    shortened_dimension(code, a) + shortened_dimension(code, b)
                    == total
                ):
                    return split(a) + split(b)
        return [coords]

    parts = sorted(split(tuple(range(1, code.n + 1))))
    subcodes = tuple(puncture(code, p) for p in parts)
    dims = tuple(shortened_dimension(code, p) for p in parts)
    return DirectSumDecomposition(tuple(parts), subcodes, dims)


# -- erasure determination --------------------------------------------------


def determines(
    code: LinearCode, s: Sequence[int], e: Sequence[int]
) -> tuple[bool, Optional[Matrix]]:
    """Whether code symbols at `e` are linear functions of symbols at `s`.

    True iff rank(G|_{s+e}) = rank(G|_s).  On success also returns the
    |e| x |s| reconstruction matrix R with c_e = R @ c_s for every codeword.
    """
    ss = code.check_coords(s)
    ee = code.check_coords(e)
    if set(ss) & set(ee):
        raise CodeError("source and erasure sets overlap")
    if not ee:
        return True, Matrix(0, len(ss), ())
    a = code.columns_matrix(ss)
    b = code.columns_matrix(ee)
    x = mat_solve(code.field, a, b)
    if x is None:
        return False, None
    return True, mat_transpose(x)


def determines_fast(code: LinearCode, s_coords: Sequence[int], e_coords: Sequence[int]) -> bool:
    """Rank-only version of `determines` for search loops."""
    if code.col_masks is not None:
        basis = BitBasis()
        for j in s_coords:
            basis.add(code.col_masks[j - 1])
        return all(basis.contains(code.col_masks[j - 1]) for j in e_coords)
    joint = list(s_coords) + list(e_coords)
    return code.rank_of_columns(joint) == code.rank_of_columns(list(s_coords))
