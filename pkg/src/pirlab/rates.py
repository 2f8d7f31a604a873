"""Closed-form PIR rate and capacity formulas, exact over the rationals,
plus reproduction of the benchmark rate table for the bundled codes.

All formulas work for a finite file count f or the asymptotic regime,
which is selected with the dedicated INFINITE_FILES marker (never a
sentinel number).  Floats appear only at the formatting boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .lincode import DirectSumDecomposition, LinearCode
from .ratematrix import DEFAULT_NU_MAX, RateMatrix, is_mds_pir_capacity_achieving


class _InfiniteFiles:
    """Marker for the f -> infinity regime."""

    _instance: Optional["_InfiniteFiles"] = None

    def __new__(cls) -> "_InfiniteFiles":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "inf"


INFINITE_FILES = _InfiniteFiles()
FileCount = Union[int, _InfiniteFiles]


class RateError(ValueError):
    pass


def _check_files(f: FileCount) -> FileCount:
    if isinstance(f, _InfiniteFiles):
        return f
    if isinstance(f, bool) or not isinstance(f, int) or f < 1:
        raise RateError(f"file count must be a positive integer or INFINITE_FILES, got {f!r}")
    return f


def parse_file_count(text: str) -> FileCount:
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return INFINITE_FILES
    return _check_files(int(text))


def _geometric_factor(ratio: Fraction, f: FileCount) -> Fraction:
    """1 / (1 - ratio^f); equals 1 in the asymptotic regime (ratio < 1)."""
    if isinstance(f, _InfiniteFiles):
        return Fraction(1)
    return 1 / (1 - ratio**f)


def mds_pir_capacity(n: int, k: int, f: FileCount) -> Fraction:
    """Optimal PIR rate of an [n, k] MDS-coded system with f files:
    (n-k)/n * [1 - (k/n)^f]^{-1}; (n-k)/n when f is infinite.
    """
    if not 1 <= k < n:
        raise RateError(f"capacity needs 1 <= k < n, got [n,k]=[{n},{k}]")
    _check_files(f)
    return Fraction(n - k, n) * _geometric_factor(Fraction(k, n), f)


def rate_symmetric(kappa: int, nu: int, k: int, n: int, f: FileCount) -> Fraction:
    """Rate certified by a kappa/nu matrix under the symmetric protocol:
    (nu-kappa)k/(kappa n) * [1 - (kappa/nu)^f]^{-1}.
    """
    if kappa > nu:
        raise RateError(f"kappa={kappa} exceeds nu={nu}")
    if kappa < 1:
        raise RateError("kappa must be >= 1")
    _check_files(f)
    if kappa == nu:
        return Fraction(0)  # degenerate matrix certifies nothing
    return Fraction((nu - kappa) * k, kappa * n) * _geometric_factor(Fraction(kappa, nu), f)


def rate_protocol_a(kappa: int, nu: int, f: FileCount) -> Fraction:
    """Rate of the asymmetric variant that downloads only information-set
    coordinates per row: (1 - kappa/nu) * [1 - (kappa/nu)^f]^{-1}.
    """
    if kappa > nu:
        raise RateError(f"kappa={kappa} exceeds nu={nu}")
    if kappa < 1:
        raise RateError("kappa must be >= 1")
    _check_files(f)
    if kappa == nu:
        return Fraction(0)
    ratio = Fraction(kappa, nu)
    return (1 - ratio) * _geometric_factor(ratio, f)


def rate_direct_sum(
    code: LinearCode,
    decomp: DirectSumDecomposition,
    f: FileCount,
    nu_max: int = DEFAULT_NU_MAX,
) -> Fraction:
    """Rate of the per-part protocol on a code split into capacity-achieving
    parts: [sum_p (k_p/k) / C_f^{[n_p, k_p]}]^{-1}.

    Every part must certify at kappa/nu = k_p/n_p; degenerate [m, m] parts
    have no capacity and are rejected.
    """
    _check_files(f)
    total = Fraction(0)
    for part, sub, dim in zip(decomp.parts, decomp.subcodes, decomp.dims):
        if sub.k >= sub.n:
            raise RateError(f"part {part} is a [{sub.n},{sub.k}] code with no capacity")
        if is_mds_pir_capacity_achieving(sub, nu_max=nu_max) is None:
            raise RateError(f"part {part} is not MDS-PIR capacity-achieving")
        total += Fraction(dim, code.k) / mds_pir_capacity(sub.n, sub.k, f)
    return 1 / total


# -- formatting -----------------------------------------------------------


def decimal4(value: Fraction) -> str:
    """Exact half-up rounding to 4 fixed decimal places (0.3750, 0.3333)."""
    scaled = value * 10_000
    units = scaled.numerator // scaled.denominator
    if 2 * (scaled.numerator - units * scaled.denominator) >= scaled.denominator:
        units += 1
    sign = "-" if units < 0 else ""
    units = abs(units)
    return f"{sign}{units // 10_000}.{units % 10_000:04d}"


def rounded4(value: Fraction) -> float:
    return float(decimal4(value))


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator} ({decimal4(value)})"


@dataclass(frozen=True)
class RateReport:
    """One row of the benchmark table, everything exact."""

    code_id: str
    n: int
    k: int
    kappa: int
    nu: int
    r_s: Fraction
    r_a: Fraction
    capacity: Fraction
    r_b: Optional[Fraction] = None
    r_c: Optional[Fraction] = None
    r_c_target: Optional[Fraction] = None

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.kappa, self.nu)

    @property
    def r_c_annotation(self) -> Optional[str]:
        """'matched' when the measured plan rate reaches the recorded
        published target at 4 decimals, 'gap' when it falls short."""
        if self.r_c is None or self.r_c_target is None:
            return None
        return "matched" if rounded4(self.r_c) >= rounded4(self.r_c_target) else "gap"


def reproduce_rate_table(
    codes: Sequence[tuple[str, LinearCode]],
    f: FileCount = INFINITE_FILES,
    nu_max: int = DEFAULT_NU_MAX,
    targets: Optional[dict[str, Fraction]] = None,
) -> list[RateReport]:
    """Per code: minimal kappa/nu, the closed-form rates, the measured
    plan rate for the code-dependent protocol, and the capacity.
    """
    from . import protocol  # local import keeps the layering one-way
    from .lincode import CodeError, finest_direct_sum
    from .ratematrix import search_min_rate_matrix

    targets = targets or {}
    out = []
    for code_id, code in codes:
        rm = search_min_rate_matrix(code, nu_max=nu_max)
        r_b: Optional[Fraction] = None
        try:
            decomp = finest_direct_sum(code)
            if not decomp.is_trivial:
                r_b = rate_direct_sum(code, decomp, f, nu_max=nu_max)
        except (RateError, CodeError):
            r_b = None
        try:
            plan = protocol.build_plan_c(code, rm)
            r_c: Optional[Fraction] = plan.measured_rate
        except protocol.PlanError:
            r_c = None
        out.append(
            RateReport(
                code_id=code_id,
                n=code.n,
                k=code.k,
                kappa=rm.kappa,
                nu=rm.nu,
                r_s=rate_symmetric(rm.kappa, rm.nu, code.k, code.n, f),
                r_a=rate_protocol_a(rm.kappa, rm.nu, f),
                capacity=mds_pir_capacity(code.n, code.k, f),
                r_b=r_b,
                r_c=r_c,
                r_c_target=targets.get(code_id),
            )
        )
    return out


def _cell(value: Optional[Fraction]) -> str:
    return decimal4(value) if value is not None else "-"


def rate_table_text(reports: Sequence[RateReport]) -> str:
    header = f"{'code':<12}{'k/n':<10}{'kappa/nu':<10}{'R_S':<9}{'R_A':<9}{'R_B':<9}{'R_C':<9}{'capacity':<10}{'R_C note'}"
    lines = [header, "-" * len(header)]
    for r in reports:
        note = ""
        if r.r_c_target is not None:
            note = f"target {decimal4(r.r_c_target)}: {r.r_c_annotation}"
        lines.append(
            f"{r.code_id:<12}"
            f"{f'[{r.n},{r.k}]':<10}"
            f"{f'{r.kappa}/{r.nu}':<10}"
            f"{_cell(r.r_s):<9}{_cell(r.r_a):<9}{_cell(r.r_b):<9}{_cell(r.r_c):<9}"
            f"{_cell(r.capacity):<10}{note}"
        )
    return "\n".join(lines) + "\n"


def rate_table_csv(reports: Sequence[RateReport]) -> str:
    lines = ["code,kappa_nu,RS,RA,RB,RC,capacity"]
    for r in reports:
        lines.append(
            ",".join(
                [
                    r.code_id,
                    f"{r.kappa}/{r.nu}",
                    _cell(r.r_s),
                    _cell(r.r_a),
                    _cell(r.r_b),
                    _cell(r.r_c),
                    _cell(r.capacity),
                ]
            )
        )
    return "\n".join(lines) + "\n"
