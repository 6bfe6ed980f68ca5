import math
from fractions import Fraction
from itertools import product

import pytest

from ellq.cartan import (
    Weight,
    alpha,
    enumerate_zero_weight_states,
    eps,
    lambda_ij,
    varpi,
    weight_depth,
    zero_weight,
)
from ellq.theta import AffineShift


def brute_zero_weight(n, ell):
    """Oracle: filter all tuples by vanishing canonical weight sum."""
    out = []
    for state in product(range(1, n + 1), repeat=ell):
        w = zero_weight(n)
        for letter in state:
            w = w + eps(letter, n)
        if w.is_zero():
            out.append(state)
    return out


def test_lambda_ij_examples():
    lam = (1, 2, 3)
    assert lambda_ij(lam, 1, 3) == -2
    assert lambda_ij(lam, 2, 2) == 0


def test_lambda_ij_diagonal_invariance(rng):
    lam = [complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3)]
    c = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    shifted = [x + c for x in lam]
    assert lambda_ij(lam, 1, 3) == pytest.approx(lambda_ij(shifted, 1, 3))


def test_lambda_ij_range_check():
    with pytest.raises(IndexError):
        lambda_ij((1, 2), 0, 1)


def test_zero_weight_states_n2_l2():
    basis = enumerate_zero_weight_states(2, 2)
    assert basis.states == ((1, 2), (2, 1))


def test_zero_weight_states_n3_l3():
    basis = enumerate_zero_weight_states(3, 3)
    assert basis.size == 6
    assert set(basis.states) == set(brute_zero_weight(3, 3))
    assert list(basis.states) == sorted(basis.states)


def test_zero_weight_states_n2_l4():
    assert enumerate_zero_weight_states(2, 4).size == 6


@pytest.mark.parametrize("n,ell", [(2, 2), (2, 4), (2, 6), (3, 3), (3, 6)])
def test_zero_weight_count_multinomial(n, ell):
    basis = enumerate_zero_weight_states(n, ell)
    kappa = ell // n
    expected = math.factorial(ell) // math.factorial(kappa) ** n
    assert basis.size == expected
    assert basis.states == tuple(brute_zero_weight(n, ell))


def test_zero_weight_states_rejects_bad_ell():
    with pytest.raises(ValueError):
        enumerate_zero_weight_states(3, 4)


def test_alpha_in_eps_coordinates():
    for n in (2, 3, 4):
        for i in range(1, n):
            assert alpha(i, n) == eps(i, n) - eps(i + 1, n)


def test_varpi_n_is_zero():
    for n in (2, 3, 4):
        assert varpi(n, n).is_zero()


def test_weight_depth_examples():
    n = 2
    assert weight_depth(varpi(1, n), varpi(1, n)) == (0,)
    assert weight_depth(varpi(1, n) - alpha(1, n), varpi(1, n)) == (1,)
    n = 3
    anchor = varpi(1, n).scale(2)
    beta = anchor - alpha(1, n) - alpha(2, n)
    assert weight_depth(beta, anchor) == (1, 1)


def test_weight_depth_rejects_non_root_difference():
    n = 3
    with pytest.raises(ValueError):
        weight_depth(zero_weight(n), varpi(1, n))  # varpi_1 not in root lattice
    with pytest.raises(ValueError):
        weight_depth(varpi(1, n), varpi(1, n) - alpha(1, n))  # negative


def test_symbolic_weights():
    lam = AffineShift.var("Lambda")
    w = Weight.make([lam - 2, AffineShift.of(2)])
    anchor = Weight.make([lam, AffineShift.of(0)])
    assert weight_depth(w, anchor) == (2,)
    vec = w.to_vector({"Lambda": 1.5 + 0.5j})
    assert vec[0] - vec[1] == pytest.approx((1.5 + 0.5j) - 4)
