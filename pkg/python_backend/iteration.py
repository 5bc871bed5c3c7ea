#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - Iteration
Iterates of mean-type mappings, monotone envelopes, Gauss limits with
convergence / non-convergence diagnosis, diagonal-basin membership and
estimates of the smallest and biggest invariant means.
"""

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Deque, Dict, List, Optional, Tuple
import logging

from config_system import DEFAULTS
from errors import DomainError, ParameterError
from mean_core import Interval, Point, call_mean

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeanTypeMapping:
    """The pair map (M, N) on a common interval"""
    M: Any
    N: Any
    domain: Optional[Interval] = None

    def __post_init__(self):
        common = self.M.domain.intersection(self.N.domain)
        if self.domain is None:
            object.__setattr__(self, "domain", common)
        elif not self.domain.is_subset(common):
            raise ParameterError(f"mapping domain {self.domain} not inside both mean domains ({common})")

    @property
    def name(self) -> str:
        return f"({self.M}, {self.N})"

    def __str__(self) -> str:
        return self.name

    def __call__(self, x: float, y: float) -> Point:
        check_point(self, x, y)
        return self.step(x, y)

    def step(self, u: float, v: float) -> Point:
        """One simultaneous update: both coordinates from the previous pair"""
        return call_mean(self.M, u, v), call_mean(self.N, u, v)

    def iterated(self, n: int) -> "MeanTypeMapping":
        """The mapping (M_n, N_n) = (M, N)^n, again a mean-type mapping"""
        if n < 1:
            raise ParameterError(f"iterate order must be at least 1, got {n}")
        return MeanTypeMapping(IteratedMean(self, n, 0), IteratedMean(self, n, 1), self.domain)


@dataclass(frozen=True)
class IteratedMean:
    """One coordinate of (M, N)^n, usable wherever a mean is expected"""
    mapping: MeanTypeMapping
    n: int
    coordinate: int

    @property
    def domain(self) -> Interval:
        return self.mapping.domain

    def __call__(self, x: float, y: float) -> float:
        return iterate(self.mapping, x, y, self.n)[self.coordinate]

    def __str__(self) -> str:
        letter = "M" if self.coordinate == 0 else "N"
        return f"{letter}_{self.n}{self.mapping.name}"


def check_point(mapping: MeanTypeMapping, x: float, y: float) -> None:
    if not mapping.domain.contains_point(x, y):
        raise DomainError((x, y), mapping.domain)


def iterate(mapping: MeanTypeMapping, x: float, y: float, n: int) -> Point:
    """n-fold composition of the pair map; n = 0 is the identity"""
    check_point(mapping, x, y)
    if n < 0:
        raise ParameterError(f"iterate count must be non-negative, got {n}")
    u, v = x, y
    for _ in range(n):
        u, v = mapping.step(u, v)
    return u, v


@dataclass(frozen=True)
class Orbit:
    start: Point
    points: Tuple[Point, ...]
    min_env: Tuple[float, ...]
    max_env: Tuple[float, ...]
    gap: Tuple[float, ...]

    def envelope_violations(self) -> List[int]:
        """Indices k where min_env decreases or max_env increases from k-1 to k"""
        bad = []
        for k in range(1, len(self.points)):
            if self.min_env[k] < self.min_env[k - 1] or self.max_env[k] > self.max_env[k - 1]:
                bad.append(k)
        return bad

    @property
    def is_monotone(self) -> bool:
        return not self.envelope_violations()


def orbit(mapping: MeanTypeMapping, x: float, y: float, n: int) -> Orbit:
    """Trajectory (M_k, N_k)(x, y) for k = 1..n with its envelopes"""
    check_point(mapping, x, y)
    if n < 0:
        raise ParameterError(f"orbit length must be non-negative, got {n}")
    points, lows, highs, gaps = [], [], [], []
    u, v = x, y
    for _ in range(n):
        u, v = mapping.step(u, v)
        lo, hi = min(u, v), max(u, v)
        points.append((u, v))
        lows.append(lo)
        highs.append(hi)
        gaps.append(hi - lo)
    return Orbit((x, y), tuple(points), tuple(lows), tuple(highs), tuple(gaps))


class RecentStates:
    """Bounded record of the last visited states, for exact recurrence checks"""

    def __init__(self, window: int):
        self.order: Deque[Point] = deque()
        self.step_of: Dict[Point, int] = {}
        self.window = window

    def add(self, state: Point, step: int) -> None:
        if len(self.order) == self.window:
            self.step_of.pop(self.order.popleft(), None)
        self.order.append(state)
        self.step_of[state] = step

    def seen_at(self, state: Point) -> Optional[int]:
        return self.step_of.get(state)


class LimitStatus(Enum):
    CONVERGED = "converged"
    NON_CONVERGENT = "non-convergent"
    BUDGET_EXHAUSTED = "iteration-budget-exhausted"


@dataclass(frozen=True)
class LimitResult:
    status: LimitStatus
    value: Optional[float]
    final_gap: float
    iterations_used: int
    min_env: float
    max_env: float
    period: Optional[int] = None

    @property
    def converged(self) -> bool:
        return self.status is LimitStatus.CONVERGED


def _validate_budget(tol: float, max_iter: int) -> None:
    if not tol > 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    if max_iter < 1:
        raise ParameterError(f"max_iter must be at least 1, got {max_iter}")


def _settle(mapping: MeanTypeMapping, u: float, v: float, window: int) -> Tuple[float, float, int]:
    """Keep stepping a converged orbit until a state recurs, so the reported
    value sits on the same final cycle the tail estimates see"""
    recent = RecentStates(window)
    recent.add((u, v), 0)
    for extra in range(1, window + 1):
        if u == v:
            return u, v, extra - 1
        u, v = mapping.step(u, v)
        if recent.seen_at((u, v)) is not None:
            return u, v, extra
        recent.add((u, v), extra)
    return u, v, window


def gauss_limit(mapping: MeanTypeMapping, x: float, y: float,
                tol: float = DEFAULTS.tol, max_iter: int = DEFAULTS.max_iter,
                window: int = DEFAULTS.cycle_window) -> LimitResult:
    """Iterate until the gap |M_n - N_n| drops to tol, a state recurs, or the budget runs out"""
    check_point(mapping, x, y)
    _validate_budget(tol, max_iter)
    if x == y:
        return LimitResult(LimitStatus.CONVERGED, x, 0.0, 0, x, x)

    u, v = x, y
    recent = RecentStates(window)
    recent.add((u, v), 0)
    for k in range(1, max_iter + 1):
        u, v = mapping.step(u, v)
        lo, hi = min(u, v), max(u, v)
        gap = hi - lo
        if gap <= tol:
            u, v, extra = _settle(mapping, u, v, window)
            lo, hi = min(u, v), max(u, v)
            logger.debug(f"{mapping} at ({x!r}, {y!r}) converged after {k} steps, settled after {extra} more")
            return LimitResult(LimitStatus.CONVERGED, (u + v) / 2.0, hi - lo, k + extra, lo, hi)
        seen = recent.seen_at((u, v))
        if seen is not None:
            logger.debug(f"{mapping} at ({x!r}, {y!r}): state recurs with period {k - seen}")
            return LimitResult(LimitStatus.NON_CONVERGENT, None, gap, k, lo, hi, period=k - seen)
        recent.add((u, v), k)

    logger.warning(f"{mapping} at ({x!r}, {y!r}): budget of {max_iter} steps exhausted, gap={gap:g}")
    return LimitResult(LimitStatus.BUDGET_EXHAUSTED, None, gap, max_iter, lo, hi)


@dataclass(frozen=True)
class ExtremalEstimate:
    L_est: float
    U_est: float
    tail_length: int

    @property
    def spread(self) -> float:
        return self.U_est - self.L_est


def extremal_invariant_estimates(mapping: MeanTypeMapping, x: float, y: float,
                                 n_max: int = DEFAULTS.extremal_n_max,
                                 tail: int = DEFAULTS.extremal_tail,
                                 window: int = DEFAULTS.cycle_window) -> ExtremalEstimate:
    """Tail min / max of the shuffled sequence x, y, M_1, N_1, ..., M_n_max, N_n_max"""
    check_point(mapping, x, y)
    length = 2 * n_max + 2
    if n_max < 0 or tail < 1 or tail > length:
        raise ParameterError(f"tail must lie in [1, {length}] for n_max={n_max}, got {tail}")

    states: List[Point] = [(x, y)]
    recent = RecentStates(window)
    recent.add((x, y), 0)
    cycle_start, period = None, None
    for k in range(1, n_max + 1):
        state = mapping.step(*states[-1])
        seen = recent.seen_at(state)
        if seen is not None:
            # The rest of the orbit repeats states[seen:k]
            cycle_start, period = seen, k - seen
            break
        states.append(state)
        recent.add(state, k)

    def state_at(k: int) -> Point:
        if k < len(states):
            return states[k]
        return states[cycle_start + (k - cycle_start) % period]

    entries = [state_at(i // 2)[i % 2] for i in range(length - tail, length)]
    return ExtremalEstimate(min(entries), max(entries), tail)


class BasinVerdict(Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class BasinMembership:
    verdict: BasinVerdict
    limit: LimitResult

    @property
    def certificate(self) -> Optional[str]:
        if self.verdict is BasinVerdict.OUTSIDE:
            return f"period-{self.limit.period}"
        return None


def in_diagonal_basin(mapping: MeanTypeMapping, x: float, y: float,
                      tol: float = DEFAULTS.tol, max_iter: int = DEFAULTS.max_iter) -> BasinMembership:
    """Inside iff the Gauss iteration converges; outside only with a periodicity certificate"""
    result = gauss_limit(mapping, x, y, tol, max_iter)
    if result.status is LimitStatus.CONVERGED:
        verdict = BasinVerdict.INSIDE
    elif result.status is LimitStatus.NON_CONVERGENT:
        verdict = BasinVerdict.OUTSIDE
    else:
        verdict = BasinVerdict.UNDECIDED
    return BasinMembership(verdict, result)
