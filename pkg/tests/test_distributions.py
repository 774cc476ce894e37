from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fieldalg.distributions import (IN_W, IN_Z, Bivariate, ExponentWindow, UnivariateSeries,
                                    WindowError, binom, delta_derivative, delta_derivative_cell,
                                    expand_power, expansion_cell, first_difference,
                                    multiply_scalar, residue_z, taylor_delta_check)

from oracles import series_power

SQ = ExponentWindow.square(-6, 6)


def test_binom_generalized():
    assert [binom(-1, k) for k in range(5)] == [1, -1, 1, -1, 1]
    assert binom(5, 2) == 10 and binom(2, 5) == 0 and binom(3, -1) == 0
    assert binom(-2, 3) == -4


@pytest.mark.parametrize("n", [-4, -3, -2, -1, 0, 1, 2, 5])
def test_expansion_in_z_matches_series_oracle(n):
    row = series_power(n, 8)
    for q in range(8):
        assert expansion_cell(n, IN_Z, n - q, q) == row[q]
    assert expansion_cell(n, IN_Z, n + 1, -1) == 0


@pytest.mark.parametrize("n", [-3, -1, 2])
def test_expansion_in_w_is_the_mirror(n):
    # (z - w)^n = (-1)^n (w - z)^n, and i_{w,z} expands in nonnegative powers of z
    row = series_power(n, 8)
    for p in range(8):
        assert expansion_cell(n, IN_W, p, n - p) == (-1) ** n * row[p]


def test_inverse_difference_cells():
    # i_{z,w}(z-w)^-1 - i_{w,z}(z-w)^-1 = sum_n z^(-n-1) w^n
    d = expand_power(-1, IN_Z, SQ) - expand_power(-1, IN_W, SQ)
    assert d.cells == {(-n - 1, n): 1 for n in range(-6, 6)}


@given(st.integers(0, 5), st.integers(-6, 6), st.integers(-6, 6))
def test_higher_difference_is_divided_delta_derivative(j, p, q):
    lhs = expansion_cell(-j - 1, IN_Z, p, q) - expansion_cell(-j - 1, IN_W, p, q)
    assert lhs == Fraction(delta_derivative_cell(j, p, q), factorial(j))


def test_delta_derivative_cells():
    # d_w^j sum_n z^(-n-1) w^n = sum_n n(n-1)..(n-j+1) z^(-n-1) w^(n-j)
    assert delta_derivative_cell(0, -1, 0) == 1
    assert delta_derivative_cell(2, -4, 1) == 3 * 2
    assert delta_derivative_cell(1, 0, -2) == -1
    assert delta_derivative_cell(1, -1, 0) == 0
    with pytest.raises(ValueError):
        delta_derivative(-1, SQ)


@pytest.mark.parametrize("j", range(7))
def test_delta_annihilated_by_power(j):
    big = ExponentWindow.square(-12, 12)
    poly = expand_power(j + 1, IN_Z, ExponentWindow.of(z=(0, j + 1), w=(0, j + 1)))
    assert multiply_scalar(poly, delta_derivative(j, big)).cells == {}
    lower = expand_power(j, IN_Z, ExponentWindow.of(z=(0, j), w=(0, j)))
    assert multiply_scalar(lower, delta_derivative(j, big)).cells != {}


def test_multiply_scalar_shrinks_window():
    poly = expand_power(2, IN_Z, ExponentWindow.of(z=(0, 2), w=(0, 2)))
    out = multiply_scalar(poly, expand_power(-1, IN_Z, SQ))
    assert out.window.bounds == ((-4, 6), (-4, 6))
    # (z - w)^2 i_{z,w}(z - w)^-1 = z - w
    assert out.cells == {(1, 0): 1, (0, 1): -1}


def test_multiply_scalar_refuses_infinite_factor():
    with pytest.raises(WindowError):
        multiply_scalar(expand_power(-1, IN_Z, SQ), delta_derivative(0, SQ))
    poly = expand_power(3, IN_Z, ExponentWindow.square(0, 1))
    assert not poly.finite_support


def test_residue_row():
    d = expand_power(-2, IN_Z, SQ)
    r = residue_z(d)
    # (z - w)^-2 = sum (q+1) w^q z^(-2-q); the z^-1 row is empty
    assert r[0] == 0
    assert residue_z(expand_power(-1, IN_Z, SQ))[0] == 1
    with pytest.raises(WindowError):
        r[-7]
    with pytest.raises(WindowError):
        r[7]
    with pytest.raises(WindowError):
        residue_z(expand_power(-1, IN_Z, ExponentWindow.square(0, 3)))


def test_series_below_min_is_zero_when_exact():
    s = UnivariateSeries({0: 1}, 0)
    assert s[-3] == 0
    with pytest.raises(ValueError):
        UnivariateSeries({-1: 1}, 0)


def test_window_rejects_cells_outside():
    with pytest.raises(WindowError):
        Bivariate(ExponentWindow.square(0, 1), {(2, 0): 1})
    with pytest.raises(WindowError):
        ExponentWindow.of(z=(1, 0))


def test_first_difference():
    a = expand_power(-1, IN_Z, SQ)
    assert first_difference(a, a) is None
    assert first_difference(a, expand_power(-1, IN_W, SQ)) == (-6, 5)


def test_taylor_delta_identity():
    win = ExponentWindow.square(-6, 6, names=("z", "w", "x"))
    assert taylor_delta_check(win).holds
    r = taylor_delta_check(win, drop_terms=(2,))
    assert r.fails and r.witness["cell"][2] == 2


def test_to_json_uses_rational_strings():
    d = expand_power(-2, IN_W, ExponentWindow.square(-2, 0))
    out = d.to_json()
    assert out["window"] == {"z": [-2, 0], "w": [-2, 0]}
    # i_{w,z}(z-w)^-2 = sum_{p>=0} (p+1) z^p w^(-2-p): one cell in this window
    assert out["cells"] == [{"p": 0, "q": -2, "value": "1/1"}]
    d = expand_power(-2, IN_Z, ExponentWindow.square(-4, 1))
    assert d.to_json()["cells"][-1] == {"p": -2, "q": 0, "value": "1/1"}
    assert d[(-3, 1)] == 2


@given(st.integers(-5, 5), st.integers(-8, 8), st.integers(-8, 8))
def test_nonnegative_powers_agree_in_both_domains(n, p, q):
    if n >= 0:
        assert expansion_cell(n, IN_Z, p, q) == expansion_cell(n, IN_W, p, q)
        if p + q == n and p >= 0 and q >= 0:
            assert expansion_cell(n, IN_Z, p, q) == comb(n, q) * (-1) ** q
