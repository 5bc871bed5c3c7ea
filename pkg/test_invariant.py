#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - Invariant Mean Tests
Gauss-limit invariant means, invariance residuals, complementary means and oracles
"""

import math

import pytest

from contractivity import diag_contractive_at
from errors import (NonConvergenceError, ParameterError, PreconditionError, ResidualEvaluationError,
                    RootNotBracketedError)
from invariant import (ComplementaryMean, ComputedInvariantMean, agm_oracle, check_complement_preconditions,
                       complementary_value, geometric_oracle, invariance_residual, invariant_mean_value)
from iteration import MeanTypeMapping, gauss_limit
from mean_core import (arithmetic, catalog, check_internality, geometric, grid_points, maximum, minimum,
                       off_diagonal, proj1, random_points)


def test_invariant_mean_value(ah, ag):
    assert invariant_mean_value(ah, 2, 8) == pytest.approx(4.0, abs=1e-10)
    assert invariant_mean_value(ag, 1, 2) == pytest.approx(1.4567910310469068, abs=1e-12)


def test_invariant_mean_value_reports_non_convergence(projections):
    with pytest.raises(NonConvergenceError) as info:
        invariant_mean_value(projections, 1, 2)
    assert info.value.result.final_gap == 1
    assert "non-convergent" in str(info.value)


def test_computed_invariant_mean_is_a_mean(ag):
    K = ComputedInvariantMean(ag)
    assert K.domain == ag.domain
    assert check_internality(K, grid_points((0.5, 5.0), (0.5, 5.0), (6, 6))).holds


# ---------------------------------------------------------------------------
# Invariance residuals
# ---------------------------------------------------------------------------

def test_geometric_is_invariant_for_arithmetic_harmonic(ah):
    sample = random_points((1.0, 10.0), (1.0, 10.0), 100, seed=31)
    report = invariance_residual(geometric(), ah, sample)
    assert report.max_residual <= 1e-14
    assert report.sample_size == 100
    assert report.argmax in sample


def test_every_catalog_mean_is_invariant_for_projections(projections):
    """(P1, P2) fixes every point, so every mean is invariant"""
    for name, K in catalog().items():
        box = K.domain.bounded_box()
        sample = random_points(box, box, 100, seed=13)
        assert invariance_residual(K, projections, sample).max_residual == 0, name


def test_min_max_invariance_exactly_for_symmetric_means(minmax):
    sample = random_points((-5.0, 5.0), (-5.0, 5.0), 50, seed=2)
    assert invariance_residual(arithmetic(), minmax, sample).max_residual == 0
    assert invariance_residual(maximum(), minmax, sample).max_residual == 0
    assert invariance_residual(proj1(), minmax, sample).max_residual > 0


def test_arithmetic_is_invariant_for_min_max_but_not_contractive(minmax):
    """(min, max) preserves A yet never contracts the diagonal distance"""
    sample = grid_points((1.0, 9.0), (1.0, 9.0), (5, 5))
    assert invariance_residual(arithmetic(), minmax, sample).max_residual == 0
    assert not any(diag_contractive_at(minmax, x, y) for x, y in off_diagonal(sample))


def test_residual_under_second_iterate(ah):
    sample = random_points((1.0, 10.0), (1.0, 10.0), 50, seed=3)
    once = invariance_residual(geometric(), ah, sample).max_residual
    twice = invariance_residual(geometric(), ah.iterated(2), sample).max_residual
    assert once <= 1e-14
    assert twice <= 4e-14


def test_computed_invariant_mean_residual(ag):
    K = ComputedInvariantMean(ag)
    sample = random_points((0.5, 5.0), (0.5, 5.0), 20, seed=4)
    assert invariance_residual(K, ag, sample).max_residual <= 2e-12


def test_residual_wraps_evaluation_failures(projections):
    K = ComputedInvariantMean(projections)
    with pytest.raises(ResidualEvaluationError) as info:
        invariance_residual(K, projections, [(1.0, 2.0)])
    assert info.value.point == (1.0, 2.0)


# ---------------------------------------------------------------------------
# Complementary means
# ---------------------------------------------------------------------------

def test_complementary_value_examples():
    assert complementary_value(geometric(), arithmetic(), 2, 8) == pytest.approx(3.2, abs=1e-12)
    assert complementary_value(arithmetic(), minimum(), 2, 8) == 8
    assert complementary_value(arithmetic(), arithmetic(), 2, 8) == 5
    assert complementary_value(geometric(), arithmetic(), 4, 4) == 4


def test_complement_preconditions():
    check_complement_preconditions(geometric())
    check_complement_preconditions(arithmetic())
    with pytest.raises(PreconditionError):
        check_complement_preconditions(minimum())
    with pytest.raises(PreconditionError) as info:
        check_complement_preconditions(proj1())
    assert info.value.witness is not None
    with pytest.raises(PreconditionError):
        complementary_value(proj1(), arithmetic(), 2, 8)


def test_complement_without_bracket():
    with pytest.raises(RootNotBracketedError):
        complementary_value(proj1(), arithmetic(), 2, 8, verify=False)


def test_complement_rejects_bad_tolerance():
    with pytest.raises(ParameterError):
        complementary_value(geometric(), arithmetic(), 2, 8, tol=0)


def test_complement_at_moderate_magnitudes():
    G, A = geometric(), arithmetic()
    t = complementary_value(G, A, 3000, 7000)
    assert t == pytest.approx(4200, abs=1e-9)
    assert abs(G(A(3000, 7000), t) - G(3000, 7000)) <= 1e-12
    assert complementary_value(G, A, 2e4, 8e4, tol=1e-9) == pytest.approx(32000, rel=1e-12)


def test_complement_rejects_tolerance_below_float_spacing():
    # ulp(40000) is about 7e-12, so a 1e-12 residual is unreachable
    with pytest.raises(ParameterError):
        complementary_value(geometric(), arithmetic(), 2e4, 8e4, tol=1e-12)


def test_complement_of_arithmetic_wrt_geometric_is_harmonic():
    """Testing the complement against 2xy/(x+y) on a 20x20 grid..."""
    G, A = geometric(), arithmetic()
    check_complement_preconditions(G)
    N = ComplementaryMean(G, A)
    sample = grid_points((0.5, 20.0), (0.5, 20.0), (20, 20))
    for x, y in sample:
        assert abs(N(x, y) - 2 * x * y / (x + y)) <= 1e-10
    report = invariance_residual(G, MeanTypeMapping(A, N), sample)
    assert report.max_residual <= 1e-10


def test_complementary_mean_is_a_mean():
    N = ComplementaryMean(geometric(), arithmetic())
    assert check_internality(N, random_points((0.5, 5.0), (0.5, 5.0), 50, seed=6)).holds


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def test_agm_oracle():
    assert agm_oracle(1, 1) == pytest.approx(1.0, abs=1e-15)
    assert agm_oracle(1, 2) == pytest.approx(1.4567910310469068, abs=1e-12)
    with pytest.raises(ParameterError):
        agm_oracle(0, 1)
    with pytest.raises(ParameterError):
        agm_oracle(1, 2, quad_points=0)


def test_agm_against_oracle_on_random_points(ag):
    """Testing (A, G) limits against the quadrature oracle at 100 seeded points..."""
    for x, y in random_points((0.1, 10.0), (0.1, 10.0), 100, seed=42):
        result = gauss_limit(ag, x, y)
        assert result.converged
        assert abs(result.value - agm_oracle(x, y)) <= 1e-10


def test_geometric_oracle(ah):
    assert geometric_oracle(2, 8) == 4.0
    assert geometric_oracle(2, 8) == pytest.approx(invariant_mean_value(ah, 2, 8), abs=1e-10)
    with pytest.raises(ParameterError):
        geometric_oracle(-1, 2)
    assert math.isclose(geometric_oracle(3, 12), 6.0)
