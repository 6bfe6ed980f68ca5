import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellq.theta import (
    AffineShift,
    EllipticParams,
    ThetaStripError,
    eval_shift,
    parse_shift,
    theta,
    theta_reduced,
)

from conftest import HBAR, TAU, random_z


def brute_theta(z, tau, J):
    """Independent direct summation of the defining series (oracle)."""
    total = 0.0 + 0j
    for j in range(-J, J):
        h = j + 0.5
        total += cmath.exp(1j * math.pi * h * h * tau + 2j * math.pi * h * (z + 0.5))
    return -total


def test_theta_zero_is_zero(params):
    assert abs(theta(0.0, params)) < params.tol


def test_one_periodicity_example(params):
    z = 0.3 + 0.1j
    assert abs(theta(z + 1, params) + theta(z, params)) < params.tol


def test_truncation_agreement_j50_vs_j200():
    p50 = EllipticParams(tau=TAU, hbar=HBAR, series_terms=50)
    p200 = EllipticParams(tau=TAU, hbar=HBAR, series_terms=200)
    assert abs(theta(0.25, p50) - theta(0.25, p200)) < 1e-12


def test_oddness_at_100_random_points(params, rng):
    for _ in range(100):
        z = random_z(rng)
        assert abs(theta(-z, params) + theta(z, params)) < 1e-12


def test_quasi_periodicity_both_periods(params, rng):
    tau = params.tau
    for _ in range(100):
        z = random_z(rng)
        lhs1 = theta_reduced(z + 1, params) + theta_reduced(z, params)
        assert abs(lhs1) < 1e-12
        lhs2 = theta_reduced(z + tau, params) \
            + cmath.exp(-1j * math.pi * tau - 2j * math.pi * z) * theta_reduced(z, params)
        assert abs(lhs2) < 1e-12


def test_lattice_zeros(params):
    for m in range(-2, 3):
        for n in range(-2, 3):
            assert abs(theta_reduced(m + n * params.tau, params)) < 1e-12


def test_reduced_matches_high_j_series(params):
    z = 3 + 2 * params.tau + 0.1
    oracle = brute_theta(z, params.tau, 400)
    assert abs(theta_reduced(z, params) - oracle) / abs(oracle) < 1e-10
    # explicit cocycle form
    mult = (-1) ** 5 * cmath.exp(-1j * math.pi * 4 * params.tau - 2j * math.pi * 2 * 0.1)
    assert abs(theta_reduced(z, params) - mult * theta(0.1, params)) < 1e-9 * abs(oracle)


def test_reduced_equals_theta_on_strip(params, rng):
    for _ in range(20):
        z = random_z(rng)
        assert theta_reduced(z, params) == pytest.approx(theta(z, params))


def test_overflow_guard_outside_strip(params):
    with pytest.raises(ThetaStripError):
        theta(40 * params.tau, params)


def test_params_validation():
    with pytest.raises(ValueError):
        EllipticParams(tau=-0.5j, hbar=HBAR)
    with pytest.raises(ValueError):
        EllipticParams(tau=TAU, hbar=0.5)  # 2*hbar = 1 in the lattice
    with pytest.raises(ValueError):
        EllipticParams(tau=TAU, hbar=Fraction(1, 3) + 0j)


# -- AffineShift ---------------------------------------------------------------


def test_eval_shift_examples():
    assert eval_shift(AffineShift.of(Fraction(1, 2))) == 0.5
    s = AffineShift.var("k") + Fraction(3, 2)
    assert eval_shift(s, {"k": 2}) == 3.5
    s2 = AffineShift.var("k") - AffineShift.var("t")
    assert eval_shift(s2, {"k": 1.25, "t": 0.25}) == 1.0


def test_eval_shift_missing_indeterminate():
    with pytest.raises(KeyError):
        eval_shift(AffineShift.var("k"), {})


small_fractions = st.fractions(
    min_value=-4, max_value=4, max_denominator=6)
shift_strategy = st.builds(
    lambda c, names, coeffs: AffineShift(c, tuple(zip(names, coeffs))),
    small_fractions,
    st.lists(st.sampled_from(["k", "t", "d"]), unique=True, max_size=3),
    st.lists(small_fractions, min_size=3, max_size=3),
)


@settings(max_examples=120, deadline=None)
@given(shift_strategy, shift_strategy, shift_strategy)
def test_affine_shift_group_axioms(a, b, c):
    zero = AffineShift.of(0)
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert a + zero == a
    assert a + (-a) == zero
    assert (a - b) + b == a


@settings(max_examples=60, deadline=None)
@given(shift_strategy, small_fractions, small_fractions)
def test_affine_shift_scaling(a, x, y):
    assert a * x + a * y == a * (x + y)
    assert (a * x) * y == a * (x * y)


def test_no_zero_coefficients_in_canonical_form():
    s = AffineShift.var("k") - AffineShift.var("k") + Fraction(1, 2)
    assert s.linear == ()
    assert s == AffineShift.of(Fraction(1, 2))


def test_parse_shift_round_trip():
    for text in ["3/2", "-1", "k", "k+1/2", "k-t", "2*k+3/2", "-k-1"]:
        s = parse_shift(text)
        assert parse_shift(str(s)) == s
