"""Executable retrieval plans.

A plan is file independent: a list of rounds, each naming the coordinates
(nodes) that return pure interference combinations (S), the nodes that
return interference plus a desired symbol (E), and the reconstruction
matrix that recovers the interference at E from the responses at S.  Four
builders are provided:

* build_plan_symmetric - every node of a matrix row's support responds;
* build_plan_a         - only the row's information-set certificate responds;
* build_plan_b         - per-part plans on a direct sum of capacity-achieving
                         subcodes;
* build_plan_c         - code-dependent cost minimization over erasure
                         assignments and minimal pure sets (or validated
                         caller-supplied round hints).

The module also carries the fixed two-file download schedule for the [5,3]
benchmark code (full and pruned variants) used as a golden end-to-end
fixture, and a renderer that regenerates the per-node subresponse grid of
a plan for documentation tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .galois import Matrix, mat_mul, mat_transpose
from .lincode import (
    CodeError,
    CoordSet,
    LinearCode,
    determines,
    determines_fast,
    finest_direct_sum,
    first_information_set,
    puncture,
)
from .ratematrix import RateMatrix, is_mds_pir_capacity_achieving

ASSIGNMENT_SEARCH_LIMIT = 4096


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class Round:
    """One retrieval round.

    ``support`` holds the coordinates of the punctured subcode the round
    works in; ``pure_set`` (S) and ``erasure_set`` (E) partition the
    queried nodes; ``recon`` maps S-responses to the interference values
    at E; ``row_support`` records the generating matrix row for audits.
    """

    support: CoordSet
    pure_set: CoordSet
    erasure_set: CoordSet
    subcode: LinearCode
    recon: Matrix
    row_index: int
    row_support: CoordSet

    @property
    def cost(self) -> int:
        return len(self.pure_set) + len(self.erasure_set)


@dataclass(frozen=True)
class RoundPlan:
    code: LinearCode
    rounds: tuple[Round, ...]
    target_set: CoordSet
    beta: int = 1
    rate_matrix: Optional[RateMatrix] = None

    @property
    def download_cost(self) -> int:
        return sum(r.cost for r in self.rounds)

    @property
    def measured_rate(self) -> Fraction:
        # beta * k retrieved symbols for beta * download_cost downloads
        return Fraction(self.code.k, self.download_cost)

    def validate(self) -> None:
        code = self.code
        if not self.rounds:
            raise PlanError("plan has no rounds")
        if self.beta < 1:
            raise PlanError("beta must be >= 1")
        seen_erasures: set[int] = set()
        for idx, r in enumerate(self.rounds, start=1):
            s, e = set(r.pure_set), set(r.erasure_set)
            if s & e:
                raise PlanError(f"round {idx}: pure and erasure sets overlap")
            if not (s | e) <= set(r.support):
                raise PlanError(f"round {idx}: queried nodes outside round support")
            if not e:
                raise PlanError(f"round {idx}: empty erasure set")
            if code.rank_of_columns(r.pure_set) != code.rank_of_columns(r.support):
                raise PlanError(f"round {idx}: pure set does not span the round support")
            if e & set(r.row_support):
                raise PlanError(f"round {idx}: erasures not in the row complement")
            if not s <= set(r.row_support):
                raise PlanError(f"round {idx}: pure set outside the row support")
            g_s = code.columns_matrix(r.pure_set)
            g_e = code.columns_matrix(r.erasure_set)
            if mat_mul(code.field, g_s, mat_transpose(r.recon)) != g_e:
                raise PlanError(f"round {idx}: reconstruction matrix is inconsistent")
            if e & seen_erasures:
                raise PlanError(f"round {idx}: erasure coordinate repeated across rounds")
            seen_erasures |= e
        if seen_erasures != set(self.target_set):
            raise PlanError("round erasures do not assemble the target set")
        if code.rank_of_columns(self.target_set) != code.k:
            raise PlanError("target set does not determine the file")

    def to_text(self) -> str:
        def fmt(coords: CoordSet) -> str:
            return "{" + ",".join(str(c) for c in coords) + "}"

        lines = [
            f"round {i}: support={fmt(r.support)}, pure={fmt(r.pure_set)}, "
            f"erasure={fmt(r.erasure_set)}"
            for i, r in enumerate(self.rounds, start=1)
        ]
        return "\n".join(lines) + "\n"


def plan_cost(plan: RoundPlan) -> tuple[int, Fraction]:
    """(download count per stripe sweep, measured rate)."""
    return plan.download_cost, plan.measured_rate


def _make_round(
    code: LinearCode,
    row_index: int,
    row_support: CoordSet,
    pure: CoordSet,
    erasure: CoordSet,
    support: Optional[CoordSet] = None,
) -> Round:
    support = support if support is not None else tuple(range(1, code.n + 1))
    ok, recon = determines(code, pure, erasure)
    if not ok:
        raise PlanError(
            f"coordinates {pure} do not determine erasures {erasure}"
        )
    assert recon is not None
    return Round(
        support=support,
        pure_set=pure,
        erasure_set=erasure,
        subcode=puncture(code, support),
        recon=recon,
        row_index=row_index,
        row_support=row_support,
    )


def _rows_cover_target(
    code: LinearCode,
    rm: RateMatrix,
    pure_for_row: Callable[[int], CoordSet],
) -> tuple[list[Round], CoordSet]:
    """Shared construction for the symmetric and certificate-only plans:
    sweep matrix rows in order, each taking the still-uncovered target
    coordinates its complement reaches; rows contributing nothing are
    skipped (they stay unused, as in the asymmetric accounting).
    """
    target = first_information_set(code)
    assert target is not None
    remaining = set(target)
    rounds: list[Round] = []
    for i in range(rm.nu):
        if not remaining:
            break
        erasure = tuple(sorted(set(rm.row_complement(i)) & remaining))
        if not erasure:
            continue
        rounds.append(
            _make_round(
                code,
                row_index=i + 1,
                row_support=rm.row_support(i),
                pure=pure_for_row(i),
                erasure=erasure,
            )
        )
        remaining -= set(erasure)
    if remaining:
        raise PlanError(
            f"row complements cover no information set (missing {sorted(remaining)})"
        )
    return rounds, target


def build_plan_symmetric(code: LinearCode, rm: RateMatrix) -> RoundPlan:
    """Every node in the generating row's support returns a sum."""
    rounds, target = _rows_cover_target(code, rm, rm.row_support)
    plan = RoundPlan(code=code, rounds=tuple(rounds), target_set=target, rate_matrix=rm)
    plan.validate()
    return plan


def build_plan_a(code: LinearCode, rm: RateMatrix) -> RoundPlan:
    """Redundant coordinates are discarded: only the row's information-set
    certificate responds, shrinking every round's pure set to k nodes."""
    rounds, target = _rows_cover_target(code, rm, lambda i: rm.certificates[i])
    plan = RoundPlan(code=code, rounds=tuple(rounds), target_set=target, rate_matrix=rm)
    plan.validate()
    return plan


# -- code-dependent plan ----------------------------------------------------


def _minimal_pure_set(code: LinearCode, row_support: CoordSet, erasure: CoordSet) -> CoordSet:
    """Smallest subset of the row support whose span determines the
    erasures; exhaustive by (size, lexicographic) order, so deterministic.
    A row certificate always works, so a solution of size <= k exists.
    """
    for size in range(1, len(row_support) + 1):
        for combo in itertools.combinations(row_support, size):
            if determines_fast(code, combo, erasure):
                return combo
    raise PlanError(f"row support {row_support} cannot determine {erasure}")


def _hint_rounds(
    code: LinearCode, rm: RateMatrix, hints: Sequence[tuple[Sequence[int], Sequence[int], Sequence[int]]]
) -> list[Round]:
    rounds = []
    for idx, (support, pure, erasure) in enumerate(hints, start=1):
        support = code.check_coords(support)
        pure = code.check_coords(pure)
        erasure = code.check_coords(erasure)
        row_index = None
        for i in range(rm.nu):
            if set(erasure) <= set(rm.row_complement(i)) and set(pure) <= set(
                rm.row_support(i)
            ):
                row_index = i
                break
        if row_index is None:
            raise PlanError(f"hint round {idx}: no matrix row admits this pure/erasure split")
        if not (set(pure) | set(erasure)) <= set(support):
            raise PlanError(f"hint round {idx}: queried nodes outside declared support")
        if code.rank_of_columns(pure) != code.rank_of_columns(support):
            raise PlanError(f"hint round {idx}: pure set does not span the declared support")
        rnd = _make_round(
            code,
            row_index=row_index + 1,
            row_support=rm.row_support(row_index),
            pure=pure,
            erasure=erasure,
            support=support,
        )
        rounds.append(rnd)
    return rounds


def build_plan_c(
    code: LinearCode,
    rm: RateMatrix,
    hints: Optional[Sequence[tuple[Sequence[int], Sequence[int], Sequence[int]]]] = None,
) -> RoundPlan:
    """Code-dependent plan.

    With hints: validates the (support, pure, erasure) triples and
    assembles them.  Without hints: assigns every target coordinate to one
    of the nu-kappa matrix rows avoiding it (all assignments enumerated
    lexicographically while the space is small; greedy first-avoiding-row
    fallback beyond that), then minimizes each round's pure set by
    exhaustive subset search.  Minimal total download cost wins, first
    assignment on ties.
    """
    if hints is not None:
        rounds = _hint_rounds(code, rm, hints)
        target = tuple(sorted(set().union(*(set(r.erasure_set) for r in rounds))))
        plan = RoundPlan(code=code, rounds=tuple(rounds), target_set=target, rate_matrix=rm)
        plan.validate()
        return plan

    target = first_information_set(code)
    assert target is not None
    avoiding: list[list[int]] = []
    for j in target:
        rows = [i for i in range(rm.nu) if rm.rows[i][j - 1] == 0]
        if not rows:
            raise PlanError(f"no matrix row avoids target coordinate {j}")
        avoiding.append(rows)

    total_assignments = 1
    for rows in avoiding:
        total_assignments *= len(rows)

    pure_cache: dict[tuple[int, CoordSet], CoordSet] = {}

    def min_pure(row: int, erasure: CoordSet) -> CoordSet:
        key = (row, erasure)
        if key not in pure_cache:
            pure_cache[key] = _minimal_pure_set(code, rm.row_support(row), erasure)
        return pure_cache[key]

    def grouped(assign: Sequence[int]) -> dict[int, list[int]]:
        groups: dict[int, list[int]] = {}
        for j, row in zip(target, assign):
            groups.setdefault(row, []).append(j)
        return groups

    if total_assignments > ASSIGNMENT_SEARCH_LIMIT:
        candidates = [tuple(rows[0] for rows in avoiding)]
    else:
        candidates = list(itertools.product(*avoiding))

    best: Optional[tuple[int, tuple[int, ...]]] = None
    for assign in candidates:
        cost = 0
        for row, coords in grouped(assign).items():
            erasure = tuple(sorted(coords))
            cost += len(min_pure(row, erasure)) + len(erasure)
        if best is None or cost < best[0]:
            best = (cost, assign)
    assert best is not None
    groups = grouped(best[1])
    rounds = []
    for row in sorted(groups):
        erasure = tuple(sorted(groups[row]))
        pure = min_pure(row, erasure)
        rounds.append(
            _make_round(
                code,
                row_index=row + 1,
                row_support=rm.row_support(row),
                pure=pure,
                erasure=erasure,
                support=tuple(sorted(set(pure) | set(erasure))),
            )
        )
    plan = RoundPlan(code=code, rounds=tuple(rounds), target_set=target, rate_matrix=rm)
    plan.validate()
    return plan


# -- direct-sum plan ---------------------------------------------------------


def build_plan_b(code: LinearCode, nu_max: int = 8) -> RoundPlan:
    """Concatenation of certificate-only plans on the parts of the finest
    direct-sum decomposition; every part must be MDS-PIR capacity-achieving.

    Per-part file-independent plans need a single stripe each, so the
    combined plan keeps beta = lcm(1, ..., 1) = 1.
    """
    try:
        decomp = finest_direct_sum(code)
    except CodeError as exc:
        raise PlanError(str(exc))
    if decomp.is_trivial:
        raise PlanError("code does not decompose into a direct sum")
    rounds: list[Round] = []
    target: list[int] = []
    row_offset = 0
    for part, sub in zip(decomp.parts, decomp.subcodes):
        if sub.k >= sub.n:
            raise PlanError(f"part {part} is a [{sub.n},{sub.k}] code with no capacity")
        cert = is_mds_pir_capacity_achieving(sub, nu_max=nu_max)
        if cert is None:
            raise PlanError(f"part {part} is not MDS-PIR capacity-achieving")
        subplan = build_plan_a(sub, cert)

        def lift(coords: CoordSet) -> CoordSet:
            return tuple(sub.parent_coords[j - 1] for j in coords)

        for r in subplan.rounds:
            rounds.append(
                Round(
                    support=lift(r.support),
                    pure_set=lift(r.pure_set),
                    erasure_set=lift(r.erasure_set),
                    subcode=puncture(code, lift(r.support)),
                    recon=r.recon,
                    row_index=row_offset + r.row_index,
                    row_support=lift(r.row_support),
                )
            )
        target.extend(lift(subplan.target_set))
        row_offset += cert.nu
    plan = RoundPlan(
        code=code, rounds=tuple(rounds), target_set=tuple(sorted(target)), beta=1
    )
    plan.validate()
    return plan


# -- subresponse grid (documentation rendering) ------------------------------


def render_subresponse_grid(plan: RoundPlan) -> list[list[str]]:
    """Per-round, per-node symbolic subresponses.

    Interference symbols are numbered (h-1)*k + h' for round h and message
    coordinate h' of the parent code; indices whose message coordinate
    touches no queried node are allocated but never appear.  Erasure nodes
    additionally carry their stripe-1 desired symbol.  Cells of nodes not
    queried in a round are empty strings.
    """
    code = plan.code
    k = code.k
    grid: list[list[str]] = []
    for h, rnd in enumerate(plan.rounds, start=1):
        row_cells = []
        queried = set(rnd.pure_set) | set(rnd.erasure_set)
        for node in range(1, code.n + 1):
            if node not in queried:
                row_cells.append("")
                continue
            terms = []
            for hp in range(1, k + 1):
                coeff = code.gen.at(hp - 1, node - 1)
                if coeff == 0:
                    continue
                label = f"I_{(h - 1) * k + hp}"
                terms.append(label if coeff == 1 else f"{coeff}*{label}")
            if node in rnd.erasure_set:
                terms.append(f"x_{{1,{node}}}")
            row_cells.append("+".join(terms) if terms else "0")
        grid.append(row_cells)
    return grid


# -- fixed two-file schedule for the [5,3] benchmark code --------------------

GoldenTerm = tuple[int, int]  # (file, stripe)


@dataclass(frozen=True)
class GoldenEntry:
    repetition: int
    node: int
    terms: tuple[GoldenTerm, ...]


@dataclass(frozen=True)
class GoldenSchedule:
    """The complete f=2, beta=9 download schedule for the [5,3] code with
    the identity stripe permutation; 2 repetitions x 5 sums x 5 nodes = 50
    downloads, or 45 after pruning node 5's five redundant sums.
    """

    requested: int
    pruned: bool
    entries: tuple[GoldenEntry, ...]
    f: int = 2
    beta: int = 9

    @property
    def download_cost(self) -> int:
        return len(self.entries)

    @property
    def rate(self) -> Fraction:
        return Fraction(self.beta * 3, self.download_cost)


# per node: the stripe-block index never used for that node's singles
_GOLDEN_SKIP = {1: 1, 2: 2, 3: 2, 4: 3, 5: 3}
# positions (repetition, entry index) of node 5's prunable sums
_GOLDEN_PRUNE = {(1, 0), (1, 1), (1, 2), (1, 4), (2, 2)}


def golden_schedule_5_3(requested: int = 1, pruned: bool = False) -> GoldenSchedule:
    if requested not in (1, 2):
        raise PlanError("the reference schedule stores f=2 files")
    other = 3 - requested
    entries: list[GoldenEntry] = []
    for rep in (1, 2):
        q = rep - 1
        for node in range(1, 6):
            blocks = sorted({1, 2, 3} - {_GOLDEN_SKIP[node]})
            a = blocks[q]
            node_entries: list[tuple[GoldenTerm, ...]] = [
                ((requested, 2 * (a - 1) + 1),),
                ((requested, 2 * (a - 1) + 2),),
                ((other, 3 * q + blocks[0]),),
                ((other, 3 * q + blocks[1]),),
                ((requested, 6 + a), (other, 3 * q + _GOLDEN_SKIP[node])),
            ]
            for idx, terms in enumerate(node_entries):
                if pruned and node == 5 and (rep, idx) in _GOLDEN_PRUNE:
                    continue
                entries.append(GoldenEntry(repetition=rep, node=node, terms=terms))
    return GoldenSchedule(requested=requested, pruned=pruned, entries=tuple(entries))
