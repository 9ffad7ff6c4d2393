"""Exact rational obstruction arithmetic."""

from fractions import Fraction

import pytest

from conekit.obstruction import (
    GROUPS,
    TopologicalData,
    betti_constraints,
    eta_invariant,
    hitchin_check,
)


def test_eta_table():
    assert eta_invariant("Q8") == Fraction(3, 4)
    assert eta_invariant("BinaryIcosahedral") == Fraction(361, 180)
    with pytest.raises(KeyError):
        eta_invariant("Lens44")


def test_group_table_consistency():
    assert GROUPS["Q8"].order == 8
    assert GROUPS["BinaryIcosahedral"].order == 120


def test_hitchin_contradiction_q8():
    data = TopologicalData(chi=Fraction(1), tau=Fraction(0))
    verdict = hitchin_check(data, GROUPS["Q8"])
    assert verdict.lhs == Fraction(7, 4)
    assert verdict.rhs == Fraction(9, 4)
    assert not verdict.consistent
    assert "contradiction" in verdict.describe()


def test_hitchin_contradiction_binary_icosahedral():
    data = TopologicalData(chi=Fraction(1), tau=Fraction(0))
    verdict = hitchin_check(data, GROUPS["BinaryIcosahedral"])
    assert verdict.lhs == Fraction(2) - Fraction(1, 60)
    assert verdict.rhs == Fraction(361, 60)
    assert not verdict.consistent


def test_hitchin_sign_choice_irrelevant_for_zero_signature():
    data = TopologicalData(chi=Fraction(1), tau=Fraction(0))
    plus = hitchin_check(data, GROUPS["Q8"], eta_sign=1)
    minus = hitchin_check(data, GROUPS["Q8"], eta_sign=-1)
    assert plus.rhs == minus.rhs
    with pytest.raises(ValueError):
        hitchin_check(data, GROUPS["Q8"], eta_sign=2)


def test_hitchin_consistent_for_large_euler_number():
    data = TopologicalData(chi=Fraction(10), tau=Fraction(0))
    assert hitchin_check(data, GROUPS["Q8"]).consistent


def test_results_are_exact_fractions():
    verdict = hitchin_check(TopologicalData(chi=Fraction(1), tau=Fraction(0)),
                            GROUPS["BinaryIcosahedral"])
    assert isinstance(verdict.lhs, Fraction)
    assert isinstance(verdict.rhs, Fraction)


def test_betti_constraints():
    data = betti_constraints((1, 0, 0, 0, 0))
    assert data.chi == 1 and data.tau == 0
    data = betti_constraints((1, 0, 0, 2, 0))
    assert data.chi == -1
    with pytest.raises(ValueError, match="pattern"):
        betti_constraints((1, 0, 1, 0, 0))
    with pytest.raises(ValueError):
        betti_constraints((1, 0, 0, 0))


def test_topological_data_chi_consistency():
    with pytest.raises(ValueError, match="inconsistent"):
        TopologicalData(chi=Fraction(2), tau=Fraction(0), betti=(1, 0, 0, 0, 0))
    data = TopologicalData(chi=Fraction(0), tau=Fraction(0), betti=(1, 0, 0, 1, 0))
    assert data.betti == (1, 0, 0, 1, 0)
