#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - Contractivity
Diagonal contractivity, weak contractivity and its index n(x,y), the
equivalence with contractivity of the second iterate, c-contraction, and
the sufficient conditions read off one-sided strictness reports.

All strict inequalities are exact floating comparisons.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple
import logging

from config_system import DEFAULTS
from errors import EmptySampleError, ParameterError
from iteration import MeanTypeMapping, RecentStates, check_point
from mean_core import Point, StrictnessReport, Verdict, off_diagonal

logger = logging.getLogger(__name__)


class ContractivityKind(Enum):
    DIAGONAL = "diagonal"
    WEAK = "weak"
    C_CONTRACTION = "c-contraction"


@dataclass(frozen=True)
class ContractivityVerdict:
    """Outcome of a contractivity check at one point or over a sample.

    index is n(x,y) for a single-point weak / c-contraction check.
    certificate names why no index can exist ("fixed-point", "period-2",
    "cycle"); None means the budget simply ran out.
    """
    kind: ContractivityKind
    holds: bool
    witness: Optional[Point] = None
    index: Optional[int] = None
    c: Optional[float] = None
    certificate: Optional[str] = None
    per_point: Tuple[Tuple[Point, Optional[int]], ...] = ()
    sample_size: int = 1

    def __post_init__(self):
        if self.kind is ContractivityKind.C_CONTRACTION and not (self.c is not None and 0.0 <= self.c < 1.0):
            raise ParameterError(f"c must lie in [0, 1), got {self.c}")


def _off_diagonal_point(mapping: MeanTypeMapping, x: float, y: float) -> None:
    check_point(mapping, x, y)
    if x == y:
        raise ParameterError(f"contractivity conditions need x != y, got ({x!r}, {y!r})")


def diag_contractive_at(mapping: MeanTypeMapping, x: float, y: float) -> bool:
    """|M(x,y) - N(x,y)| < |x - y|"""
    _off_diagonal_point(mapping, x, y)
    u, v = mapping.step(x, y)
    return abs(u - v) < abs(x - y)


def weak_contractivity_index(mapping: MeanTypeMapping, x: float, y: float,
                             n_max: int = DEFAULTS.weak_n_max) -> ContractivityVerdict:
    """Smallest n <= n_max with |M_n(x,y) - N_n(x,y)| < |x - y|"""
    _off_diagonal_point(mapping, x, y)
    if n_max < 1:
        raise ParameterError(f"n_max must be at least 1, got {n_max}")
    d = abs(x - y)

    u, v = mapping.step(x, y)
    if abs(u - v) < d:
        return ContractivityVerdict(ContractivityKind.WEAK, True, index=1)
    if (u, v) == (x, y):
        return ContractivityVerdict(ContractivityKind.WEAK, False, witness=(x, y), certificate="fixed-point")
    if (u, v) == (y, x):
        again = mapping.step(y, x)
        if again == (x, y):
            return ContractivityVerdict(ContractivityKind.WEAK, False, witness=(x, y), certificate="period-2")
        if again == (y, x):
            return ContractivityVerdict(ContractivityKind.WEAK, False, witness=(x, y), certificate="fixed-point")

    # If any index exists, n = 2 already works; later steps only cover noisy user means
    for n in range(2, n_max + 1):
        u, v = mapping.step(u, v)
        if abs(u - v) < d:
            if n > 2:
                logger.warning(f"{mapping} at ({x!r}, {y!r}): first contraction at n={n} > 2")
            return ContractivityVerdict(ContractivityKind.WEAK, True, index=n)
    return ContractivityVerdict(ContractivityKind.WEAK, False, witness=(x, y))


def c_contraction_index(mapping: MeanTypeMapping, x: float, y: float, c: float,
                        n_max: int = DEFAULTS.weak_n_max,
                        window: int = DEFAULTS.cycle_window) -> ContractivityVerdict:
    """Smallest n <= n_max with |M_n(x,y) - N_n(x,y)| < c |x - y|"""
    if not 0.0 <= c < 1.0:
        raise ParameterError(f"c must lie in [0, 1), got {c}")
    _off_diagonal_point(mapping, x, y)
    if n_max < 1:
        raise ParameterError(f"n_max must be at least 1, got {n_max}")
    bound = c * abs(x - y)

    u, v = x, y
    recent = RecentStates(window)
    recent.add((u, v), 0)
    for n in range(1, n_max + 1):
        u, v = mapping.step(u, v)
        if abs(u - v) < bound:
            return ContractivityVerdict(ContractivityKind.C_CONTRACTION, True, index=n, c=c)
        if recent.seen_at((u, v)) is not None:
            return ContractivityVerdict(ContractivityKind.C_CONTRACTION, False, witness=(x, y),
                                        c=c, certificate="cycle")
        recent.add((u, v), n)
    return ContractivityVerdict(ContractivityKind.C_CONTRACTION, False, witness=(x, y), c=c)


def _sample(sample: Sequence[Point], what: str) -> Sequence[Point]:
    points = off_diagonal(sample)
    if not points:
        raise EmptySampleError(f"{what} needs at least one off-diagonal sample point")
    return points


def diag_contractive_on_sample(mapping: MeanTypeMapping, sample: Sequence[Point]) -> ContractivityVerdict:
    points = _sample(sample, "diagonal contractivity check")
    for x, y in points:
        if not diag_contractive_at(mapping, x, y):
            return ContractivityVerdict(ContractivityKind.DIAGONAL, False, witness=(x, y),
                                        sample_size=len(points))
    return ContractivityVerdict(ContractivityKind.DIAGONAL, True, sample_size=len(points))


def weakly_contractive_on_sample(mapping: MeanTypeMapping, sample: Sequence[Point],
                                 n_max: int = DEFAULTS.weak_n_max) -> ContractivityVerdict:
    points = _sample(sample, "weak contractivity check")
    per_point, witness = [], None
    for x, y in points:
        result = weak_contractivity_index(mapping, x, y, n_max)
        per_point.append(((x, y), result.index))
        if not result.holds and witness is None:
            witness = (x, y)
    return ContractivityVerdict(ContractivityKind.WEAK, witness is None, witness=witness,
                                per_point=tuple(per_point), sample_size=len(points))


def c_contraction_on_sample(mapping: MeanTypeMapping, sample: Sequence[Point], c: float,
                            n_max: int = DEFAULTS.weak_n_max) -> ContractivityVerdict:
    points = _sample(sample, "c-contraction check")
    per_point, witness = [], None
    for x, y in points:
        result = c_contraction_index(mapping, x, y, c, n_max)
        per_point.append(((x, y), result.index))
        if not result.holds and witness is None:
            witness = (x, y)
    return ContractivityVerdict(ContractivityKind.C_CONTRACTION, witness is None, witness=witness, c=c,
                                per_point=tuple(per_point), sample_size=len(points))


@dataclass(frozen=True)
class LemmaReport:
    """Weak contractivity of (M, N) against contractivity of (M_2, N_2), point by point"""
    sample_size: int
    both_true: int
    both_false: int
    disagreements: Tuple[Point, ...]

    @property
    def equivalent(self) -> bool:
        return not self.disagreements


def lemma_equivalence_check(mapping: MeanTypeMapping, sample: Sequence[Point],
                            n_max: int = DEFAULTS.weak_n_max) -> LemmaReport:
    points = _sample(sample, "lemma equivalence check")
    second = mapping.iterated(2)
    both_true = both_false = 0
    disagreements = []
    for x, y in points:
        weak = weak_contractivity_index(mapping, x, y, n_max).holds
        contracted = diag_contractive_at(second, x, y)
        if weak and contracted:
            both_true += 1
        elif not weak and not contracted:
            both_false += 1
        else:
            disagreements.append((x, y))
    if disagreements:
        logger.warning(f"{mapping}: {len(disagreements)} lemma disagreements, first at {disagreements[0]}")
    return LemmaReport(len(points), both_true, both_false, tuple(disagreements))


# ---------------------------------------------------------------------------
# Sufficient conditions from one-sided strictness
# ---------------------------------------------------------------------------

def _holds(verdict) -> bool:
    v = verdict.verdict if hasattr(verdict, "verdict") else verdict
    return v is Verdict.HOLDS


def prop1_applies(report_m: StrictnessReport, report_n: StrictnessReport) -> Optional[bool]:
    """Both left-strict or both right-strict; None when a verdict is untestable"""
    if report_m.has_untestable or report_n.has_untestable:
        return None
    both_left = _holds(report_m.left_strict) and _holds(report_n.left_strict)
    both_right = _holds(report_m.right_strict) and _holds(report_n.right_strict)
    return both_left or both_right


def prop2_applies(report_m: StrictnessReport, report_n: StrictnessReport) -> Optional[bool]:
    """Conditions (i)-(iii) on one-sided strictness; None when a verdict is untestable"""
    if report_m.has_untestable or report_n.has_untestable:
        return None
    m, n = report_m, report_n
    cond_i = _holds(m.right_var1) or _holds(n.left_var2)
    cond_ii = (_holds(m.left_var2) or _holds(m.right_var2)
               or _holds(n.left_var1) or _holds(n.right_var1))
    cond_iii = _holds(m.left_var1) or _holds(n.right_var2)
    return cond_i and cond_ii and cond_iii


def orbit_leaves_swap_set(mapping: MeanTypeMapping, x: float, y: float) -> bool:
    """False when the orbit of (x, y) stays inside {(x, y), (y, x)} forever"""
    _off_diagonal_point(mapping, x, y)
    first = mapping.step(x, y)
    if first == (x, y):
        return False
    if first == (y, x):
        return mapping.step(y, x) not in ((x, y), (y, x))
    return True


@dataclass(frozen=True)
class Prop2SampleReport:
    """Both readings of the second sufficient condition, checked separately"""
    sample_size: int
    diagonal_failures: Tuple[Point, ...]
    swap_set_failures: Tuple[Point, ...]


def prop2_sample_report(mapping: MeanTypeMapping, sample: Sequence[Point]) -> Prop2SampleReport:
    points = _sample(sample, "second sufficient condition report")
    diagonal = tuple(p for p in points if not diag_contractive_at(mapping, *p))
    swap = tuple(p for p in points if not orbit_leaves_swap_set(mapping, *p))
    return Prop2SampleReport(len(points), diagonal, swap)
