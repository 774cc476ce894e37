from fractions import Fraction
from math import factorial

import pytest

from fieldalg.distributions import UnivariateSeries
from fieldalg.field_algebra import (VACUUM_STATE, AssocAlgebraModel, BuildError, StateKey,
                                    apply_exp_zT, build, diagonal_algebra, exp_zT_coefficient,
                                    free_boson_algebra, matrix_algebra,
                                    mutate_translation, twist, uniqueness_check)
from fieldalg.fields import (alpha_field, beta_field, derivative, first_disagreement,
                             fock_vectors, identity_field, mode_range, normal_ordered)
from fieldalg.fock import monomial, translate
from fieldalg.linear import Vector

VAC = Vector.basis(())
X1 = Vector.basis(monomial(1))
E = {k: Vector.basis(k) for k in [(1, 1), (1, 2), (2, 1), (2, 2)]}


def same_field(f, g, D=5, W=4):
    return first_disagreement(f, g, fock_vectors(D), mode_range(W)) is None


def test_free_boson_state_field_map(boson):
    assert same_field(boson.Y(X1), alpha_field())
    assert same_field(boson.Y(Vector.basis(monomial(2))), derivative(alpha_field()))
    assert same_field(boson.Y(VAC), identity_field())
    assert same_field(boson.Y(Vector.basis(monomial(1, 1))),
                      normal_ordered(alpha_field(), alpha_field()))


def test_recursion_matches_alternative_presentation(boson):
    # alpha_1 alpha_-1 alpha_-1 |0> = 2 alpha_-1 |0>
    key = StateKey(((0, 1), (0, -1), (0, -1)))
    assert boson.evaluate(key) == 2 * X1
    assert same_field(boson.Y_key(key), 2 * alpha_field(), 4, 3)


def test_state_key_rendering():
    assert StateKey(((0, -2), (0, -1))).render() == "a[-2]a[-1]|0>"
    assert VACUUM_STATE.render() == "|0>"


def test_twist_is_the_z_to_minus_z_sign():
    # mode m sits at z^(-m-1)
    assert [twist(m) for m in (-1, -2, 0, 1)] == [1, -1, -1, 1]


def test_build_refuses_non_spanning_generators():
    with pytest.raises(BuildError, match="unreached"):
        build([beta_field()], degree_cap=2)


def test_build_refuses_non_weakly_local_generators():
    a = alpha_field()
    with pytest.raises(BuildError, match="not weakly local") as info:
        build([normal_ordered(a, a), beta_field()], degree_cap=6)
    assert info.value.witness["check"] == "weak-locality"


def test_exp_zT_on_a_constant():
    alg = matrix_algebra()
    a = E[(2, 1)]
    out = apply_exp_zT(UnivariateSeries({0: a}, 0), alg.T, 3)
    t = a
    for j in range(4):
        assert out[j] == t * Fraction(1, factorial(j))
        t = alg.T(t)
    assert out[1] == E[(1, 1)] - E[(2, 2)]


def test_exp_zT_lowest_coefficient_is_untouched():
    s = UnivariateSeries({-1: X1, 0: VAC}, -1, 2)
    assert exp_zT_coefficient(s, translate, -1) == X1
    assert exp_zT_coefficient(s, translate, 0) == VAC + translate(X1)


def test_free_boson_opposite_equals_Y(boson):
    for a in boson.test_states(3):
        assert first_disagreement(boson.X(a), boson.Y(a), fock_vectors(4), mode_range(4)) is None
    assert same_field(boson.X(VAC), identity_field())


def test_holomorphic_matrices(matrices):
    alg = matrix_algebra()
    unit = alg.unit
    assert matrices.Y_mode(E[(2, 1)], -2, unit) == E[(1, 1)] - E[(2, 2)]
    for b in E.values():
        for n in range(-4, 4):
            assert matrices.Y_mode(unit, n, b) == (b if n == -1 else Vector())
    for a in E.values():
        for b in E.values():
            assert matrices.X(a).mode(-1, b) == alg.mul(b, a)
            assert matrices.Y(a).mode(-1, b) == alg.mul(a, b)
            for n in range(0, 4):
                assert matrices.Y(a).mode(n, b) == 0


def test_matrix_commutator_constant_term(matrices):
    # [Y(a,z), Y(b,w)] unit at z^0 w^0 is ab - ba
    a, b, u = E[(1, 2)], E[(2, 1)], matrix_algebra().unit
    comm = matrices.Y_mode(a, -1, matrices.Y_mode(b, -1, u)) - \
        matrices.Y_mode(b, -1, matrices.Y_mode(a, -1, u))
    assert comm == E[(1, 1)] - E[(2, 2)]


def test_assoc_model_validation():
    alg = diagonal_algebra()
    with pytest.raises(ValueError, match="derivation"):
        AssocAlgebraModel("bad", alg.basis, alg.mult, alg.unit,
                          {(1, 1): Vector.basis((1, 1))})
    with pytest.raises(ValueError, match="unit"):
        AssocAlgebraModel("bad", alg.basis, alg.mult, Vector.basis((1, 1)), {})


def test_uniqueness_instances(boson):
    assert uniqueness_check(boson, boson.Y(X1), X1).holds
    r = uniqueness_check(boson, beta_field(), X1)
    assert r.verdict == "inapplicable" and r.details["failed_hypothesis"] == "created-state"
    r = uniqueness_check(boson, boson.Y(X1) + identity_field(), X1)
    assert r.verdict == "inapplicable"


def test_translation_mutation_splices_beta(boson):
    m = mutate_translation(boson)
    assert m.basis_field(monomial(1)).label == "beta"
    assert m.basis_field(monomial(2)) is boson.basis_field(monomial(2))


def test_free_boson_builds_at_small_degree():
    fa = free_boson_algebra(3)
    assert len(fa.presentations(3)[0]) == 7
