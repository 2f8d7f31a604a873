"""PIR achievable rate matrices: validation, minimal kappa/nu search, the
capacity-achieving certificate, and the generalized-Hamming-weight
necessary condition.

A rate matrix for an [n, k] code is a nu x n binary matrix whose columns
all have Hamming weight exactly kappa and whose every row support contains
an information set.  The smaller kappa/nu is, the better the retrieval
rates it certifies; kappa/nu = k/n is the floor and certifies the MDS-PIR
capacity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .galois import bit_rank
from .lincode import (
    CodeError,
    CoordSet,
    LinearCode,
    enumerate_information_sets,
    first_information_set,
    generalized_hamming_weight,
)

DEFAULT_NU_MAX = 8
PACKING_FILTER_MAX_N = 16


class RateMatrixViolation(CodeError):
    """A supplied matrix fails one of the two defining conditions."""

    def __init__(self, message: str, column: Optional[int] = None, row: Optional[int] = None):
        super().__init__(message)
        self.column = column
        self.row = row


@dataclass(frozen=True)
class RateMatrix:
    """Validated rate matrix plus one information-set certificate per row."""

    kappa: int
    nu: int
    n: int
    rows: tuple[tuple[int, ...], ...]
    certificates: tuple[CoordSet, ...]

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.kappa, self.nu)

    def row_support(self, i: int) -> CoordSet:
        return tuple(j + 1 for j, b in enumerate(self.rows[i]) if b)

    def row_complement(self, i: int) -> CoordSet:
        return tuple(j + 1 for j, b in enumerate(self.rows[i]) if not b)

    def to_text(self) -> str:
        head = f"{self.kappa} {self.nu} {self.n}"
        body = "\n".join("".join(str(b) for b in row) for row in self.rows)
        return f"{head}\n{body}\n"


def rate_matrix_from_text(code: LinearCode, text: str) -> RateMatrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise RateMatrixViolation("empty rate-matrix document")
    parts = lines[0].split()
    if len(parts) != 3:
        raise RateMatrixViolation("header must be 'kappa nu n'")
    kappa, nu, n = (int(p) for p in parts)
    rows = [[int(c) for c in ln] for ln in lines[1:]]
    if len(rows) != nu or any(len(r) != n for r in rows):
        raise RateMatrixViolation("matrix body does not match header dimensions")
    rm = validate_rate_matrix(code, rows)
    if rm.kappa != kappa:
        raise RateMatrixViolation(f"declared kappa {kappa} but column weight is {rm.kappa}")
    return rm


def validate_rate_matrix(code: LinearCode, rows: Sequence[Sequence[int]]) -> RateMatrix:
    """Check the two defining conditions and attach fresh certificates.

    Raises RateMatrixViolation naming the failing column weight / row.
    """
    nu = len(rows)
    if nu == 0:
        raise RateMatrixViolation("rate matrix needs at least one row")
    if any(len(r) != code.n for r in rows):
        raise RateMatrixViolation(f"rows must have length n={code.n}")
    for i, r in enumerate(rows):
        for b in r:
            if b not in (0, 1):
                raise RateMatrixViolation(f"non-binary entry in row {i + 1}", row=i + 1)
    weights = [sum(rows[i][j] for i in range(nu)) for j in range(code.n)]
    kappa = weights[0]
    for j, w in enumerate(weights):
        if w != kappa:
            raise RateMatrixViolation(
                f"column {j + 1} has weight {w}, expected {kappa}", column=j + 1
            )
    certs = []
    for i, r in enumerate(rows):
        support = tuple(j + 1 for j, b in enumerate(r) if b)
        cert = first_information_set(code, within=support)
        if cert is None:
            raise RateMatrixViolation(
                f"row {i + 1} support contains no information set", row=i + 1
            )
        certs.append(cert)
    rm = RateMatrix(
        kappa=kappa,
        nu=nu,
        n=code.n,
        rows=tuple(tuple(r) for r in rows),
        certificates=tuple(certs),
    )
    # implied counting floor; cannot fail once both conditions hold
    assert rm.kappa <= rm.nu and rm.ratio >= Fraction(code.k, code.n)
    return rm


# -- feasibility machinery -------------------------------------------------


def _coverage_frontier(code: LinearCode) -> list[tuple[int, int]]:
    """Pareto pairs (free coordinates, rank deficit) over all column subsets.

    A multiset of nu information sets with per-coordinate multiplicity at
    most kappa exists iff kappa * free >= nu * deficit for every pair
    (matroid base packing on the kappa-fold parallel extension).
    """
    n = code.n
    best: dict[int, int] = {}
    for mask in range(1 << n):
        coords = [j + 1 for j in range(n) if mask >> j & 1]
        deficit = code.k - code.rank_of_columns(coords) if coords else code.k
        free = n - len(coords)
        if deficit > best.get(free, -1):
            best[free] = deficit
    return sorted(best.items())


def _packing_feasible(frontier: list[tuple[int, int]], kappa: int, nu: int) -> bool:
    return all(kappa * free >= nu * deficit for free, deficit in frontier)


def _cover_search(
    masks: Sequence[int], n: int, k: int, nu: int, kappa: int
) -> Optional[list[int]]:
    """Backtracking: indices (non-decreasing) of nu information sets whose
    per-coordinate coverage never exceeds kappa.  Lexicographically first
    solution, so results are reproducible.
    """
    counts = [0] * n
    chosen: list[int] = []
    total_capacity = kappa * n

    def dfs(start: int, used: int, saturated: int) -> bool:
        if len(chosen) == nu:
            return True
        if total_capacity - used < (nu - len(chosen)) * k:
            return False
        for idx in range(start, len(masks)):
            m = masks[idx]
            if m & saturated:
                continue
            new_sat = saturated
            bits = m
            while bits:
                low = bits & -bits
                j = low.bit_length() - 1
                counts[j] += 1
                if counts[j] == kappa:
                    new_sat |= 1 << j
                bits ^= low
            chosen.append(idx)
            if dfs(idx, used + k, new_sat):
                return True
            chosen.pop()
            bits = m
            while bits:
                low = bits & -bits
                counts[low.bit_length() - 1] -= 1
                bits ^= low
        return False

    return list(chosen) if dfs(0, 0, 0) else None


def _build_from_cover(
    code: LinearCode, info_sets: Sequence[CoordSet], picked: Sequence[int], kappa: int
) -> RateMatrix:
    """Pad the chosen information sets with extra 1s until every column
    weight is exactly kappa (always completable because kappa <= nu), then
    assemble the validated matrix.  Padding goes to the earliest rows
    lacking the coordinate.
    """
    nu = len(picked)
    rows = [set(info_sets[idx]) for idx in picked]
    for j in range(1, code.n + 1):
        have = sum(1 for r in rows if j in r)
        deficit = kappa - have
        for r in rows:
            if deficit == 0:
                break
            if j not in r:
                r.add(j)
                deficit -= 1
        assert deficit == 0, "padding must always complete"
    binary = [[1 if j in r else 0 for j in range(1, code.n + 1)] for r in rows]
    rm = validate_rate_matrix(code, binary)
    # keep the search's certificates (the padded support may admit an
    # earlier information set, but the chosen one is the search witness)
    return RateMatrix(
        kappa=rm.kappa,
        nu=rm.nu,
        n=rm.n,
        rows=rm.rows,
        certificates=tuple(info_sets[idx] for idx in picked),
    )


def _candidate_fractions(code: LinearCode, nu_max: int) -> list[tuple[int, int]]:
    floor = Fraction(code.k, code.n)
    cands = [
        (kappa, nu)
        for nu in range(1, nu_max + 1)
        for kappa in range(1, nu + 1)
        if Fraction(kappa, nu) >= floor
    ]
    cands.sort(key=lambda kn: (Fraction(kn[0], kn[1]), kn[1]))
    return cands


def _search_at(
    code: LinearCode,
    kappa: int,
    nu: int,
    info_sets: Sequence[CoordSet],
    masks: Sequence[int],
    frontier: Optional[list[tuple[int, int]]],
) -> Optional[RateMatrix]:
    if frontier is not None and not _packing_feasible(frontier, kappa, nu):
        return None
    picked = _cover_search(masks, code.n, code.k, nu, kappa)
    if picked is None:
        return None
    return _build_from_cover(code, info_sets, picked, kappa)


def search_min_rate_matrix(code: LinearCode, nu_max: int = DEFAULT_NU_MAX) -> RateMatrix:
    """Rate matrix minimizing kappa/nu over nu <= nu_max.

    Fractions are tried in increasing value (ties broken by smaller nu,
    so smaller protocols win).  Each candidate is screened by the exact
    base-packing bound, then constructed by backtracking over the
    lexicographically enumerated information sets.  The all-ones nu=1
    matrix is always feasible, so the search cannot fail.
    """
    if nu_max < 1:
        raise CodeError("nu_max must be >= 1")
    info_sets = enumerate_information_sets(code)
    masks = [sum(1 << (j - 1) for j in s) for s in info_sets]
    frontier = _coverage_frontier(code) if code.n <= PACKING_FILTER_MAX_N else None
    for kappa, nu in _candidate_fractions(code, nu_max):
        rm = _search_at(code, kappa, nu, info_sets, masks, frontier)
        if rm is not None:
            return rm
    raise AssertionError("unreachable: the (1, 1) all-ones matrix is always valid")


def is_mds_pir_capacity_achieving(
    code: LinearCode, nu_max: int = DEFAULT_NU_MAX
) -> Optional[RateMatrix]:
    """Certificate matrix with kappa/nu = k/n if one exists within the nu
    bound, else None.  The weight condition is checked first as a cheap
    provably-sound rejection.
    """
    ok, _ = ghw_necessary_condition(code)
    if not ok:
        return None
    ratio = Fraction(code.k, code.n)
    kappa0, nu0 = ratio.numerator, ratio.denominator
    info_sets = enumerate_information_sets(code)
    masks = [sum(1 << (j - 1) for j in s) for s in info_sets]
    frontier = _coverage_frontier(code) if code.n <= PACKING_FILTER_MAX_N else None
    t = 1
    while t * nu0 <= nu_max:
        rm = _search_at(code, t * kappa0, t * nu0, info_sets, masks, frontier)
        if rm is not None:
            return rm
        t += 1
    return None


def ghw_necessary_condition(code: LinearCode) -> tuple[bool, Optional[int]]:
    """Necessary condition for a capacity-achieving matrix: every
    generalized Hamming weight satisfies d_s >= (n/k) * s.  Returns
    (True, None) or (False, smallest violating s).
    """
    bound = Fraction(code.n, code.k)
    for s in range(1, code.k + 1):
        if generalized_hamming_weight(code, s) < bound * s:
            return False, s
    return True, None
