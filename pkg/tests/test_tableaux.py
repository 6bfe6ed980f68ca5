from fractions import Fraction

import pytest

from ellq.eweights import (
    EWeight,
    QCharacter,
    components,
    factor_into_A_inverses,
    gen_A,
    gen_box,
    gen_psi,
    gen_Y,
    is_right_negative,
)
from ellq.tableaux import (
    Partition,
    enumerate_tableaux,
    highest_weight,
    kr_leading_term,
    qchar_KR,
    qchar_evaluation,
)
from ellq.theta import AffineShift, theta_reduced

from conftest import random_z

HALF = Fraction(1, 2)


def hook_content_count(parts, n):
    """Oracle: number of semistandard tableaux with entries <= n, by the
    hook content formula on the standard (left-justified) diagram."""
    from fractions import Fraction as F

    parts = [p for p in parts if p > 0]
    cells = [(i, j) for i, p in enumerate(parts) for j in range(p)]
    conj = [sum(1 for p in parts if p > j) for j in range(parts[0])] if parts else []
    val = F(1)
    for i, j in cells:
        arm = parts[i] - j - 1
        leg = conj[j] - i - 1
        hook = arm + leg + 1
        val *= F(n + j - i, hook)
    assert val.denominator == 1
    return int(val)


def brute_count(parts, n):
    """Second oracle: direct enumeration under the paper's constraints."""
    cells = [(i + 1, j + 1) for i, p in enumerate(parts) for j in range(p)]
    cells.sort(key=lambda c: (-c[0], c[1]))
    count = 0
    filled = {}

    def rec(pos):
        nonlocal count
        if pos == len(cells):
            count += 1
            return
        i, j = cells[pos]
        hi = filled.get((i, j - 1), n)
        lo = filled.get((i + 1, j), 0) + 1
        for v in range(lo, hi + 1):
            filled[(i, j)] = v
            rec(pos + 1)
        filled.pop((i, j), None)

    rec(0)
    return count


def test_partition_validation():
    with pytest.raises(ValueError):
        Partition((1, 2))
    with pytest.raises(ValueError):
        Partition((2, -1))


def test_count_2_1_0_is_8():
    assert len(enumerate_tableaux(Partition((2, 1, 0)), 3)) == 8


def test_single_box_count():
    for n in (2, 3, 4):
        assert len(enumerate_tableaux(Partition((1,) + (0,) * (n - 1)), n)) == n


@pytest.mark.parametrize("k", range(7))
def test_row_shape_count_n2(k):
    assert len(enumerate_tableaux(Partition((k, 0)), 2)) == k + 1


@pytest.mark.parametrize("parts,n", [
    ((2, 1, 0), 3), ((3, 2, 0), 3), ((2, 2, 1), 3), ((4, 0), 2),
    ((3, 3, 0, 0), 4), ((2, 2, 2, 0), 4), ((4, 3, 2, 1), 4), ((5, 4, 3), 4),
])
def test_counts_match_hook_content_and_brute_force(parts, n):
    got = len(enumerate_tableaux(Partition(parts), n))
    assert got == hook_content_count(parts, n)
    assert got == brute_count(parts, n)


def test_deterministic_order():
    ts = enumerate_tableaux(Partition((2, 1, 0)), 3)
    words = [t.reading_word() for t in ts]
    assert words == sorted(words)


# -- q-characters ------------------------------------------------------------------


def test_fourth_tableau_monomial_present():
    n = 3
    a = AffineShift.var("a")
    q = qchar_evaluation(Partition((2, 1, 0)), a, n)
    target = gen_box(n, 2, a + 1) * gen_box(n, 3, a) * gen_box(n, 1, a - 1)
    assert q.coefficient(target) == 1
    assert sum(c for _, c in q.terms) == 8


def test_qchar_vector_rep():
    for n in (2, 3):
        a = AffineShift.var("a")
        q = qchar_evaluation(Partition((1,) + (0,) * (n - 1)), a, n)
        expected = {gen_box(n, k, a): 1 for k in range(1, n + 1)}
        assert q.terms_dict() == expected


def test_qchar_n1_row():
    q = qchar_evaluation(Partition((3,)), AffineShift.of(0), 1)
    expected = EWeight.one(1)
    for j in (0, 1, 2):
        expected = expected * gen_box(1, 1, j)
    assert q.terms_dict() == {expected: 1}


def test_highest_weight_matches_theta_mu_a(params, rng):
    """The anchor term's components must equal theta(z+(a+mu_i)h)/theta(z+a h)."""
    n = 3
    mu = Partition((3, 1, 0))
    a = Fraction(1, 4)
    hw = highest_weight(mu, AffineShift.of(a), n)
    q = qchar_evaluation(mu, a, n)
    assert q.coefficient(hw) == 1
    hbar = params.hbar
    for _ in range(5):
        z = random_z(rng)
        for i in range(n):
            val = 1.0 + 0j
            for sh, expo in components(hw)[i].items():
                val *= theta_reduced(z + complex(sh.as_fraction()) * hbar, params) ** expo
            expect = theta_reduced(z + (complex(a) + mu.parts[i]) * hbar, params) \
                / theta_reduced(z + complex(a) * hbar, params)
            assert val == pytest.approx(expect, rel=1e-10)


def test_kr_n2_k1_explicit():
    n = 2
    q = qchar_KR(1, 1, 0, n)
    box1 = gen_Y(n, 1, HALF)
    box2 = gen_Y(n, 2, 0) * gen_Y(n, 1, -HALF).inv()
    assert q.terms_dict() == {box1: 1, box2: 1}


@pytest.mark.parametrize("n,r,k", [(2, 1, 1), (2, 1, 3), (3, 1, 2), (3, 2, 2), (3, 2, 4)])
def test_kr_leading_term(n, r, k):
    a = AffineShift.var("a")
    q = qchar_KR(r, k, a, n)
    lead = kr_leading_term(r, k, a, n)
    assert lead == gen_psi(n, r, a + k) * gen_psi(n, r, a).inv()
    assert q.coefficient(lead) == 1
    assert [e for e, _ in q.leading_terms()] == [lead]


@pytest.mark.parametrize("n,r,k", [(2, 1, 2), (2, 1, 4), (3, 1, 3), (3, 2, 3)])
def test_kr_non_leading_right_negative(n, r, k):
    q = qchar_KR(r, k, 0, n)
    lead = kr_leading_term(r, k, 0, n)
    for e, _c in q.terms:
        if e != lead:
            assert is_right_negative(e), f"{e} not right negative"


@pytest.mark.parametrize("n,r,k", [(2, 1, 2), (2, 1, 4), (3, 1, 3), (3, 2, 2)])
def test_kr_a_chain_multiplicity_one(n, r, k):
    a = Fraction(0)
    q = qchar_KR(r, k, a, n)
    probe = kr_leading_term(r, k, a, n)
    for l in range(1, k + 1):
        probe = probe * gen_A(n, r, a + (l - 1)).inv()
        assert q.coefficient(probe) == 1


def test_kr_level_n_one_dimensional():
    n = 2
    q = qchar_KR(n, 1, HALF, n)
    w = gen_psi(n, n, HALF + 1) * gen_psi(n, n, HALF).inv()
    assert q.terms_dict() == {w: 1}


@pytest.mark.parametrize("parts,n", [((2, 1, 0), 3), ((2, 0), 2), ((2, 2, 0), 3)])
def test_every_term_in_highest_weight_times_Qminus(parts, n):
    """ewt(S_{mu,a}) is contained in theta_{mu,a} Q_a^- (A-factorization)."""
    mu = Partition(parts)
    q = qchar_evaluation(mu, 0, n)
    hw = highest_weight(mu, AffineShift.of(0), n)
    for e, _c in q.terms:
        ratio = e * hw.inv()
        assert factor_into_A_inverses(ratio) is not None, f"{ratio} not in Q^-"
