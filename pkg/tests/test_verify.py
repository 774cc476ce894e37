from math import factorial

import pytest

from fieldalg import verify as V
from fieldalg.field_algebra import (diagonal_algebra, holomorphic, matrix_algebra,
                                    mutate_associativity, mutate_translation, mutate_vacuum)
from fieldalg.fock import monomial
from fieldalg.linear import Vector
from fieldalg.report import CheckReport

VAC = Vector.basis(())
X1 = Vector.basis(monomial(1))
E = {k: Vector.basis(k) for k in [(1, 1), (1, 2), (2, 1), (2, 2)]}


def assert_witness_reproduces(fa, report):
    assert report.fails
    lhs, rhs = V.reevaluate(fa, report.witness)
    assert lhs != rhs


def test_report_requires_witness_on_failure():
    with pytest.raises(ValueError):
        CheckReport("x", "fails")
    with pytest.raises(ValueError):
        CheckReport("x", "maybe")


@pytest.mark.parametrize("check", [V.check_vacuum, V.check_partial_vacuum, V.check_translation,
                                   V.check_nth_product_axiom, V.check_weak_locality,
                                   V.classify_skewsymmetry, V.check_conformal_surrogates])
def test_free_boson_small_grid(boson, check):
    r = check(boson, degree_cap=4, mode_window=3, depth=2)
    assert r.holds, r.witness


def test_recursion_and_opposite(boson):
    assert V.check_recursion_consistency(boson, 3, 2, 2).holds
    assert all(r.holds for r in V.check_opposite_field_algebra(boson, 3, 2, 2))


def test_associativity_found_N(boson):
    r = V.check_associativity(boson, X1, X1, X1)
    assert r.holds and r.details["N"] == 2


def test_associativity_N_is_forced_to_six_at_depth_three(boson):
    a = Vector.basis(monomial(1, 1, 1))
    # Wick: three alpha_1 against three alpha_-1 pair up in 3! ways
    assert boson.Y_mode(a, 5, a) == factorial(3) * VAC
    r = V.check_associativity(boson, a, X1, a, n_max=8, bound=3)
    assert r.holds and r.details["N"] == 6
    assert V.check_associativity(boson, a, X1, a, n_max=5, bound=3).fails


def test_associativity_with_correction(boson, matrices):
    r = V.check_associativity_correction(boson, X1, X1, X1, 5)
    assert r.holds and r.details["correction_nonzero"]
    dropped = V.check_associativity_correction(boson, X1, X1, X1, 5, drop_correction=True)
    assert_witness_reproduces(boson, dropped)
    # a_(j)|0> = 0 for j >= 0, so the correction vanishes against the vacuum
    r = V.check_associativity_correction(boson, X1, X1, VAC, 5)
    assert r.holds and not r.details["correction_nonzero"]
    # holomorphic fields have no modes n >= 0: the correction is zero there too
    r = V.check_associativity_correction(matrices, E[(1, 2)], E[(2, 1)], matrix_algebra().unit, 5)
    assert r.holds and not r.details["correction_nonzero"]
    r = V.check_associativity(matrices, E[(1, 2)], E[(2, 1)], matrix_algebra().unit)
    assert r.holds and r.details["N"] == 0


def test_matrix_locality_witness(matrices):
    r = V.check_locality(matrices, pairs=[(E[(1, 2)], E[(2, 1)])])
    assert_witness_reproduces(matrices, r)
    assert r.witness["point"]["N"] == 6


def test_diagonal_algebra_is_vertex():
    fa = holomorphic(diagonal_algebra())
    assert V.check_locality(fa).holds
    assert V.classify_skewsymmetry(fa).details["classification"] == "vertex algebra"


def test_matrix_classification(matrices):
    r = V.classify_skewsymmetry(matrices)
    assert r.details["classification"] == "strict field algebra"
    assert_witness_reproduces(matrices, r)
    assert V.check_opposite_at_zero(matrices, matrix_algebra()).holds


@pytest.mark.parametrize("mutate", [mutate_vacuum, mutate_translation, mutate_associativity])
def test_mutations_fail_both_axiom_sets(boson, mutate):
    m = mutate(boson)
    a = V.axiom_set_local(m, 4, 3, 2, 8, 2, 3)
    b = V.axiom_set_product(m, 4, 3, 2)
    assert any(r.fails for r in a) and any(r.fails for r in b)
    for r in a + b:
        if r.fails:
            assert_witness_reproduces(m, r)


def test_translation_mutation_breaks_covariance(boson):
    r = V.check_translation(mutate_translation(boson), 4, 3, 2)
    assert_witness_reproduces(mutate_translation(boson), r)


def test_counterexample_suite_small():
    rs = V.counterexample_suite(6, 6)
    assert [r.verdict for r in rs] == ["holds", "holds", "holds", "fails"]
    assert rs[2].details == {"bound_alpha_beta": 0, "bound_beta_alpha": 1}
    lhs, _ = V.reevaluate(None, rs[3].witness)
    assert lhs == VAC


def test_field_labels_resolve():
    f = V.resolve_field(":alpha alpha:_(0)alpha")
    g = V.resolve_field("alpha_(-1)beta")
    assert f.label == ":alpha alpha:_(0)alpha" and g.label == "alpha_(-1)beta"
    with pytest.raises(KeyError):
        V.resolve_field("gamma")


def test_kernel_self_tests():
    assert all(r.holds for r in V.kernel_self_tests())


def test_uniqueness_never_refutes(boson):
    rs = V.uniqueness_suite(boson, X1, range(5))
    assert rs[0].holds
    assert all(r.verdict == "inapplicable" for r in rs[1:])


def test_reports_are_deterministic(boson):
    a = V.check_translation(mutate_translation(boson), 4, 3, 2).to_dict()
    b = V.check_translation(mutate_translation(boson), 4, 3, 2).to_dict()
    assert a == b
