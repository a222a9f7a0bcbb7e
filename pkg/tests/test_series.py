from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gibbslog import series as ps
from gibbslog.models import central_multinomials, cube_total_series


small = st.lists(st.integers(-5, 5), min_size=1, max_size=9)
unit = small.filter(lambda c: c[0] != 0)


def test_binomial_square():
    a = ps.series([1, 1])
    assert ps.mul(a, a, 2).tolist() == [1, 2, 1]


def test_geometric_reciprocal():
    assert ps.reciprocal(ps.series([1, -1]), 3).tolist() == [1, 1, 1, 1]


def test_cube_reciprocal_coefficients():
    P = cube_total_series(10)
    inv = ps.reciprocal(P, 10)
    assert inv[1] == -6 and inv[2] == -54
    assert ps.mul(P, inv, 10) == ps.one(10)


def test_first_return_square():
    A1 = ps.one(4) - ps.reciprocal(cube_total_series(4), 4)
    assert ps.power(A1, 2, 4)[2] == 36


def test_power_edge_cases():
    z = ps.monomial(1, 5)
    assert ps.power(z, 3, 5) == ps.monomial(3, 5)
    a = ps.series([2, 3, 5])
    assert ps.power(a, 0, 2) == ps.one(2)
    assert ps.power(a, 1, 2) == a


def test_hadamard_central_binomials():
    c = ps.series([1, 2, 6, 20])
    assert ps.hadamard(c, c)[2] == 36
    assert ps.hadamard(c, ps.series([1] * 4)) == c
    assert ps.hadamard(c, ps.zeros(3)) == ps.zeros(3)


def test_hadamard_mismatch():
    with pytest.raises(ps.SeriesError):
        ps.hadamard(ps.series([1, 2]), ps.series([1, 2, 3]))


def test_substitute_examples():
    T = 6
    inner = ps.mul(ps.monomial(1, T), ps.power(ps.geometric(T), 3, T), T)  # z/(1-z)^3
    assert ps.substitute(ps.monomial(1, T), inner, T)[2] == 3
    a = ps.series([3, 1, 4, 1, 5, 9, 2])
    assert ps.substitute(a, ps.monomial(1, T), T) == a
    D = ps.mul(ps.geometric(T), ps.substitute(cube_total_series(T), inner, T), T)
    assert D[1] == 7 and D[2] == 115


def test_substitute_needs_zero_constant():
    with pytest.raises(ps.CompositionDivergenceError):
        ps.substitute(ps.series([1, 1]), ps.series([1, 1]), 1)


def test_singular_reciprocal():
    with pytest.raises(ps.SingularReciprocalError):
        ps.reciprocal(ps.series([0, 1]), 3)
    with pytest.raises(ps.SingularReciprocalError):
        ps.reciprocal(ps.series([1e-14, 1.0], mode=ps.FLOAT), 3)


def test_mode_mismatch():
    with pytest.raises(ps.ModeMismatchError):
        ps.mul(ps.series([1]), ps.series([1.0], mode=ps.FLOAT), 0)


def test_truncation_cap():
    with pytest.raises(ps.TruncationLimitError):
        ps.zeros(ps.MAX_TRUNCATION + 1)


def test_float_overflow_is_an_error():
    with pytest.raises(ps.NonFiniteError):
        ps.PowerSeries([np.inf], ps.FLOAT)
    big = ps.series([1e200, 1e200], mode=ps.FLOAT)
    with pytest.raises(ps.NonFiniteError):
        ps.mul(big, big, 1)


def test_exact_rationals_stay_exact():
    a = ps.series([Fraction(1, 3), Fraction(2, 7)])
    b = ps.reciprocal(a, 4)
    assert ps.mul(a, b, 4) == ps.one(4)
    assert all(isinstance(c, (int, Fraction)) for c in b)


def test_big_integer_products():
    a = ps.series(central_multinomials(60))
    b = ps.mul(a, a, 60)
    naive = sum(a[i] * a[60 - i] for i in range(61))
    assert b[60] == naive


def test_float_matches_exact_to_1e9():
    T = 200
    A1 = ps.one(T) - ps.reciprocal(cube_total_series(T), T)
    A1f = ps.one(T, ps.FLOAT) - ps.reciprocal(cube_total_series(T, ps.FLOAT), T)
    exact = np.array([float(Fraction(A1[n], 27**n)) for n in range(T + 1)])
    got = np.asarray(A1f.coeffs)
    nz = exact != 0
    assert np.max(np.abs(got[nz] / exact[nz] - 1)) <= 1e-9


@given(unit)
def test_reciprocal_is_inverse(c):
    a = ps.series(c)
    T = len(c) - 1
    assert ps.mul(a, ps.reciprocal(a, T), T) == ps.one(T)


@given(small, st.integers(0, 4), st.integers(0, 4))
def test_power_additive(c, i, j):
    a = ps.series(c)
    T = len(c) - 1
    assert ps.power(a, i + j, T) == ps.mul(ps.power(a, i, T), ps.power(a, j, T), T)


@given(small, small, small)
def test_hadamard_commutative_associative(a, b, c):
    T = min(len(a), len(b), len(c)) - 1
    a, b, c = (ps.series(x, T) for x in (a, b, c))
    assert ps.hadamard(a, b) == ps.hadamard(b, a)
    assert ps.hadamard(ps.hadamard(a, b), c) == ps.hadamard(a, ps.hadamard(b, c))


@given(small, small)
@settings(max_examples=50)
def test_mul_commutes_and_matches_naive(a, b):
    T = max(len(a), len(b)) - 1
    got = ps.mul(ps.series(a), ps.series(b), T)
    for n in range(T + 1):
        assert got[n] == sum(a[i] * b[n - i] for i in range(len(a)) if 0 <= n - i < len(b))
    assert got == ps.mul(ps.series(b), ps.series(a), T)


@given(st.lists(st.integers(0, 10**30), min_size=1, max_size=40), st.lists(st.integers(0, 10**30), min_size=1, max_size=40))
@settings(max_examples=30)
def test_large_nonnegative_products(a, b):
    T = len(a) + len(b) - 2
    got = ps.mul(ps.series(a), ps.series(b), T)
    for n in range(T + 1):
        assert got[n] == sum(a[i] * b[n - i] for i in range(len(a)) if 0 <= n - i < len(b))


def test_series_values_are_immutable():
    s = ps.series([1.0, 2.0], mode=ps.FLOAT)
    with pytest.raises(ValueError):
        s.coeffs[0] = 5.0
