#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - Invariant Means
Invariant means as Gauss limits, invariance residuals, complementary means
and independent oracles for the built-in pairs.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Sequence, Tuple
import logging

import numpy as np
from scipy.optimize import bisect

from config_system import DEFAULTS
from errors import (BudgetExhaustedError, EmptySampleError, MeanError, NonConvergenceError,
                    ParameterError, PreconditionError, ResidualEvaluationError,
                    RootNotBracketedError, RootSearchError)
from iteration import LimitStatus, MeanTypeMapping, gauss_limit
from mean_core import Interval, Point, call_mean

logger = logging.getLogger(__name__)

# Floats tried on each side of the bisection result
POLISH_STEPS = 16


def invariant_mean_value(mapping: MeanTypeMapping, x: float, y: float,
                         tol: float = DEFAULTS.tol, max_iter: int = DEFAULTS.max_iter) -> float:
    """Value K(x, y) of the invariant mean, or an error when the iteration does not converge"""
    result = gauss_limit(mapping, x, y, tol, max_iter)
    if result.status is LimitStatus.CONVERGED:
        return result.value
    if result.status is LimitStatus.NON_CONVERGENT:
        raise NonConvergenceError(result)
    raise BudgetExhaustedError(result)


@dataclass(frozen=True)
class ComputedInvariantMean:
    """K evaluated pointwise as the Gauss limit of a mapping"""
    mapping: MeanTypeMapping
    tol: float = DEFAULTS.tol
    max_iter: int = DEFAULTS.max_iter

    @property
    def domain(self) -> Interval:
        return self.mapping.domain

    def __call__(self, x: float, y: float) -> float:
        return invariant_mean_value(self.mapping, x, y, self.tol, self.max_iter)

    def __str__(self) -> str:
        return f"K{self.mapping.name}"


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    argmax: Point
    sample_size: int


def invariance_residual(K: Any, mapping: MeanTypeMapping, sample: Sequence[Point]) -> ResidualReport:
    """max |K(M(x,y), N(x,y)) - K(x,y)| over the sample, with the point attaining it"""
    if not sample:
        raise EmptySampleError("invariance residual needs at least one sample point")

    # Memo lives for this sweep only
    memo: Dict[Point, float] = {}

    def k_at(u: float, v: float) -> float:
        key = (u, v)
        if key not in memo:
            memo[key] = call_mean(K, u, v)
        return memo[key]

    worst, worst_point = -1.0, sample[0]
    for x, y in sample:
        try:
            u, v = mapping(x, y)
            residual = abs(k_at(u, v) - k_at(x, y))
        except MeanError as e:
            raise ResidualEvaluationError((x, y), e)
        if residual > worst:
            worst, worst_point = residual, (x, y)
    logger.info(f"Invariance residual of {K} under {mapping}: {worst:g} at {worst_point} "
                f"({len(sample)} points, {len(memo)} evaluations of K)")
    return ResidualReport(worst, worst_point, len(sample))


# ---------------------------------------------------------------------------
# Complementary means
# ---------------------------------------------------------------------------

def check_complement_preconditions(K: Any, probes: int = DEFAULTS.precondition_probes,
                                   seed: int = DEFAULTS.precondition_seed) -> None:
    """Sample symmetry and strict increase in the second variable; raise with a witness on failure"""
    a, b = K.domain.bounded_box()
    rng = np.random.default_rng(seed)
    for u, v, w in rng.uniform(a, b, size=(probes, 3)):
        u, v, w = float(u), float(v), float(w)
        if call_mean(K, u, v) != call_mean(K, v, u):
            raise PreconditionError((u, v), f"{K} is not symmetric at ({u!r}, {v!r})")
        lo, hi = min(v, w), max(v, w)
        if lo < hi and not call_mean(K, u, lo) < call_mean(K, u, hi):
            raise PreconditionError((u, lo, hi),
                                    f"{K} is not strictly increasing in its second variable at "
                                    f"x={u!r} between {lo!r} and {hi!r}")


def complementary_value(K: Any, M: Any, x: float, y: float, tol: float = DEFAULTS.tol,
                        max_iter: int = DEFAULTS.bisection_max_iter, verify: bool = True) -> float:
    """The t in [min(x,y), max(x,y)] with K(M(x,y), t) = K(x,y), found by bisection"""
    if not tol > 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    if verify:
        check_complement_preconditions(K)
    target = call_mean(K, x, y)
    m = call_mean(M, x, y)
    if x == y:
        return x
    if tol < math.ulp(target):
        raise ParameterError(f"tolerance {tol:g} is below the float spacing "
                             f"{math.ulp(target):g} at K(x, y)={target!r}")

    lo, hi = min(x, y), max(x, y)

    def g(t: float) -> float:
        return call_mean(K, m, t) - target

    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0:
        return lo
    if g_hi == 0:
        return hi
    if (g_lo > 0) == (g_hi > 0):
        raise RootNotBracketedError((x, y), f"K({m!r}, t) - K(x, y) has the same sign at t={lo!r} "
                                            f"and t={hi!r}; K is not increasing in t")
    logger.debug(f"Bracket for complement at ({x!r}, {y!r}): g({lo!r})={g_lo:g}, g({hi!r})={g_hi:g}")

    xtol = 4 * np.finfo(float).eps * max(abs(lo), abs(hi))
    t, info = bisect(g, lo, hi, xtol=xtol, maxiter=max_iter, full_output=True, disp=False)
    t, residual = _polish(g, float(t), lo, hi)
    if residual > tol:
        raise RootSearchError((x, y), f"bisection stopped at t={t!r} with residual {residual:g} > {tol:g} "
                                      f"after {info.iterations} iterations")
    return t


def _polish(g: Any, t: float, lo: float, hi: float, steps: int = POLISH_STEPS) -> Tuple[float, float]:
    """Best |g| among the floats within a few steps of t, staying inside [lo, hi]"""
    best, best_residual = t, abs(g(t))
    for toward in (lo, hi):
        u = t
        for _ in range(steps):
            if u == toward or best_residual == 0:
                break
            u = math.nextafter(u, toward)
            residual = abs(g(u))
            if residual < best_residual:
                best, best_residual = u, residual
    return best, best_residual


@dataclass(frozen=True)
class ComplementaryMean:
    """The mean N complementary to M with respect to K"""
    K: Any
    M: Any
    tol: float = DEFAULTS.tol

    @property
    def domain(self) -> Interval:
        return self.K.domain.intersection(self.M.domain)

    def __call__(self, x: float, y: float) -> float:
        return complementary_value(self.K, self.M, x, y, self.tol, verify=False)

    def __str__(self) -> str:
        return f"complement({self.M} wrt {self.K})"


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def agm_oracle(x: float, y: float, quad_points: int = DEFAULTS.quad_points) -> float:
    """pi / (2 Q), Q the integral of 1/sqrt(x^2 cos^2 + y^2 sin^2) over [0, pi/2].

    The integrand is smooth and periodic, so the composite trapezoid rule
    converges geometrically in the number of nodes.
    """
    if not (x > 0 and y > 0):
        raise ParameterError(f"agm_oracle needs positive arguments, got ({x!r}, {y!r})")
    if quad_points < 1:
        raise ParameterError(f"quad_points must be positive, got {quad_points}")
    theta = np.linspace(0.0, np.pi / 2, quad_points + 1)
    f = 1.0 / np.sqrt((x * np.cos(theta)) ** 2 + (y * np.sin(theta)) ** 2)
    h = (np.pi / 2) / quad_points
    q = h * (f.sum() - 0.5 * (f[0] + f[-1]))
    return float(np.pi / (2.0 * q))


def geometric_oracle(x: float, y: float) -> float:
    """Invariant mean of (arithmetic, harmonic): A(x,y) * H(x,y) = xy"""
    if not (x > 0 and y > 0):
        raise ParameterError(f"geometric_oracle needs positive arguments, got ({x!r}, {y!r})")
    return math.sqrt(x * y)
