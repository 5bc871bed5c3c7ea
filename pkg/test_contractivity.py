#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - Contractivity Tests
"""

import pytest

from contractivity import (ContractivityKind, ContractivityVerdict, c_contraction_index,
                           c_contraction_on_sample, diag_contractive_at, diag_contractive_on_sample,
                           lemma_equivalence_check, orbit_leaves_swap_set, prop1_applies, prop2_applies,
                           prop2_sample_report, weak_contractivity_index, weakly_contractive_on_sample)
from errors import EmptySampleError, ParameterError
from iteration import MeanTypeMapping, gauss_limit, orbit
from mean_core import (ProbePlan, arithmetic, catalog, classify_strictness, grid_points, harmonic,
                       maximum, minimum, off_diagonal, random_points)


def _off_diagonal_sample(mapping, count, seed):
    box = mapping.domain.bounded_box()
    return off_diagonal(random_points(box, box, count, seed))


def test_diagonal_contractivity_examples(ah, minmax, projections):
    assert diag_contractive_at(ah, 2, 8)
    assert not diag_contractive_at(minmax, 2, 8)
    assert not diag_contractive_at(projections, 1, 2)
    with pytest.raises(ParameterError):
        diag_contractive_at(ah, 3, 3)


def test_weak_contractivity_index_examples(ah, projections, swapped_projections):
    assert weak_contractivity_index(ah, 2, 8).index == 1

    fixed = weak_contractivity_index(projections, 1, 2)
    assert not fixed.holds
    assert fixed.index is None
    assert fixed.certificate == "fixed-point"

    swap = weak_contractivity_index(swapped_projections, 1, 2)
    assert not swap.holds
    assert swap.certificate == "period-2"


def test_weak_index_two_without_diagonal_contraction():
    # (min, proj1) swaps (x, y) with x > y, then lands on the diagonal
    mapping = MeanTypeMapping(minimum(), catalog()["proj1"])
    assert not diag_contractive_at(mapping, 5, 2)
    verdict = weak_contractivity_index(mapping, 5, 2)
    assert verdict.holds and verdict.index == 2


def test_weak_index_swap_onto_a_fixed_point(minmax):
    # (min, max) sends (5, 2) to (2, 5), which it then fixes
    verdict = weak_contractivity_index(minmax, 5, 2)
    assert not verdict.holds
    assert verdict.index is None
    assert verdict.certificate == "fixed-point"
    assert verdict.witness == (5, 2)


def test_weak_index_validates_budget(ah):
    with pytest.raises(ParameterError):
        weak_contractivity_index(ah, 1, 2, n_max=0)


def test_diagonal_contractivity_implies_index_one():
    means = catalog()
    for m, n in [("arithmetic", "geometric"), ("min", "harmonic"), ("power(2.0)", "max")]:
        mapping = MeanTypeMapping(means[m], means[n])
        for x, y in _off_diagonal_sample(mapping, 50, seed=3):
            if diag_contractive_at(mapping, x, y):
                assert weak_contractivity_index(mapping, x, y).index == 1


def test_gap_never_expands(ag, minmax):
    for mapping in [ag, minmax]:
        for x, y in _off_diagonal_sample(mapping, 20, seed=6):
            gaps = (abs(x - y),) + orbit(mapping, x, y, 30).gap
            assert all(b <= a for a, b in zip(gaps, gaps[1:]))


def test_sample_checks(ag, minmax):
    sample = grid_points((1.0, 9.0), (1.0, 9.0), (5, 5))
    verdict = diag_contractive_on_sample(ag, sample)
    assert verdict.holds and verdict.kind is ContractivityKind.DIAGONAL
    assert verdict.sample_size == 20

    failing = diag_contractive_on_sample(minmax, sample)
    assert not failing.holds and failing.witness == (1.0, 3.0)

    weak = weakly_contractive_on_sample(ag, sample)
    assert weak.holds
    assert all(index == 1 for _, index in weak.per_point)

    assert not weakly_contractive_on_sample(minmax, sample).holds

    with pytest.raises(EmptySampleError):
        diag_contractive_on_sample(ag, [(2.0, 2.0)])


# ---------------------------------------------------------------------------
# Second-iterate equivalence
# ---------------------------------------------------------------------------

def test_lemma_examples(ag, swapped_projections):
    report = lemma_equivalence_check(ag, _off_diagonal_sample(ag, 100, seed=1))
    assert report.equivalent
    assert report.both_true == report.sample_size

    swapped = lemma_equivalence_check(swapped_projections, _off_diagonal_sample(swapped_projections, 50, seed=1))
    assert swapped.equivalent
    assert swapped.both_false == swapped.sample_size


def test_lemma_holds_for_every_catalog_pair():
    """Testing weak contractivity against (M_2, N_2) for all ordered catalog pairs..."""
    means = list(catalog().values())
    for m in means:
        for n in means:
            mapping = MeanTypeMapping(m, n)
            report = lemma_equivalence_check(mapping, _off_diagonal_sample(mapping, 50, seed=17))
            assert report.equivalent, f"{mapping}: disagreement at {report.disagreements[0]}"
            assert report.both_true + report.both_false == report.sample_size


# ---------------------------------------------------------------------------
# c-contraction
# ---------------------------------------------------------------------------

def test_c_contraction_examples(ah, minmax):
    assert c_contraction_index(ah, 2, 8, 0.5).index == 1
    for c in [0.5, 0.9, 0.99]:
        verdict = c_contraction_index(minmax, 2, 8, c)
        assert not verdict.holds
        assert verdict.index is None
        assert verdict.certificate == "cycle"
    with pytest.raises(ParameterError):
        c_contraction_index(ah, 2, 8, 1.0)
    with pytest.raises(ParameterError):
        c_contraction_index(ah, 2, 8, -0.1)


def test_verdict_validates_c():
    with pytest.raises(ParameterError):
        ContractivityVerdict(ContractivityKind.C_CONTRACTION, True, c=1.5)


def test_c_contraction_index_one_for_classical_pairs(ag, ah):
    for mapping in [ag, ah]:
        verdict = c_contraction_on_sample(mapping, _off_diagonal_sample(mapping, 100, seed=21), 0.9)
        assert verdict.holds
        assert all(index == 1 for _, index in verdict.per_point)


def test_c_contraction_index_is_monotone_in_c():
    means = catalog()
    mapping = MeanTypeMapping(means["min"], means["arithmetic"])
    for x, y in _off_diagonal_sample(mapping, 30, seed=2):
        indices = [c_contraction_index(mapping, x, y, c).index for c in (0.1, 0.5, 0.9)]
        assert all(i is not None for i in indices)
        assert indices[0] >= indices[1] >= indices[2]


def test_c_contraction_means_convergence(ag, ah):
    for mapping in [ag, ah]:
        for x, y in grid_points((0.5, 20.0), (0.5, 20.0), (20, 20)):
            assert gauss_limit(mapping, x, y).converged


# ---------------------------------------------------------------------------
# Sufficient conditions
# ---------------------------------------------------------------------------

def test_prop1_examples():
    a, h = classify_strictness(arithmetic()), classify_strictness(harmonic())
    lo, hi = classify_strictness(minimum()), classify_strictness(maximum())
    assert prop1_applies(a, h) is True
    assert prop1_applies(lo, hi) is False
    assert prop1_applies(lo, lo) is True
    assert prop1_applies(hi, hi) is True


def test_prop2_examples():
    means = catalog()
    reports = {name: classify_strictness(mean) for name, mean in means.items()}
    assert prop2_applies(reports["arithmetic"], reports["harmonic"]) is True
    assert prop2_applies(reports["proj1"], reports["proj2"]) is False
    assert prop2_applies(reports["min"], reports["max"]) is False


def test_untestable_reports_are_inapplicable():
    plan = ProbePlan(anchors=(1.0,), below=((),), above=((2.0,),))
    partial = classify_strictness(arithmetic(), plan)
    full = classify_strictness(arithmetic())
    assert prop1_applies(partial, full) is None
    assert prop2_applies(full, partial) is None


def test_prop1_is_sound_on_catalog():
    """Where the first sufficient condition applies, (M, N) contracts at 1000 random points"""
    means = catalog()
    reports = {name: classify_strictness(mean) for name, mean in means.items()}
    for m, n in [(m, n) for m in means for n in means]:
        if not prop1_applies(reports[m], reports[n]):
            continue
        mapping = MeanTypeMapping(means[m], means[n])
        verdict = diag_contractive_on_sample(mapping, _off_diagonal_sample(mapping, 1000, seed=99))
        assert verdict.holds, f"{mapping} fails at {verdict.witness}"


def test_prop2_sample_report(ah, projections):
    report = prop2_sample_report(ah, _off_diagonal_sample(ah, 50, seed=5))
    assert report.diagonal_failures == ()
    assert report.swap_set_failures == ()

    stuck = prop2_sample_report(projections, [(1.0, 2.0)])
    assert stuck.diagonal_failures == ((1.0, 2.0),)
    assert stuck.swap_set_failures == ((1.0, 2.0),)


def test_orbit_leaves_swap_set(ah, projections, swapped_projections):
    assert orbit_leaves_swap_set(ah, 2, 8)
    assert not orbit_leaves_swap_set(projections, 1, 2)
    assert not orbit_leaves_swap_set(swapped_projections, 1, 2)
