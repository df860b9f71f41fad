import math
from fractions import Fraction

import pytest

from nilseq.exactreal import (
    exact_add,
    exact_compare,
    exact_enclosure,
    exact_mul,
    exact_neg,
    exact_sign,
)
from nilseq.genpoly import PrecisionPolicy
from nilseq.recurrence import (
    InvalidPisot,
    best_approximations,
    cubic_terms,
    fibonacci_like_set,
    increasing_from,
    leading_coefficient,
    nearest_power_set_equiv,
    pisot_cubic_check,
    pisot_gp_set,
    quadratic_margin,
    quadratic_member,
    quadratic_terms,
    rauzy_norm_sq,
    scan_quadratic_set,
    variable_coefficient_terms,
)


# --- quadratic ---------------------------------------------------------


def test_quadratic_terms_fibonacci():
    assert quadratic_terms(1, 8) == [0, 1, 1, 2, 3, 5, 8, 13]
    assert quadratic_terms(2, 6) == [0, 1, 2, 5, 12, 29]


def test_member_examples():
    for n in (1, 2, 3, 5, 8, 13):
        assert quadratic_member(1, n)
    assert not quadratic_member(1, 4)
    assert not quadratic_member(1, 6)


@pytest.mark.parametrize("a", [1, 2, 3])
def test_legendre_inclusion(a):
    # every solution of ||n alpha|| < 1/(2n) below 10^6 is a recurrence term
    members = scan_quadratic_set(a, 10**6)
    terms = set(quadratic_terms(a, 64))
    assert all(m in terms for m in members)
    # and for a = 1..3 the head difference is in fact empty
    in_range = {t for t in terms if 1 <= t <= 10**6}
    assert set(members) == in_range


@pytest.mark.parametrize("a", [1, 2, 3])
def test_tail_inclusion_terms_only(a):
    # scan terms only (not all n) up to 10^12; find the index from which
    # membership holds and check it is stable under doubling the precision
    terms = [t for t in quadratic_terms(a, 80) if 0 < t <= 10**12]
    flags = [quadratic_member(a, t) for t in terms]
    first_always = len(flags)
    while first_always > 0 and flags[first_always - 1]:
        first_always -= 1
    assert all(flags[first_always:])
    assert first_always <= 2  # membership holds from the very start here


def test_margin_limit():
    # n_i ||n_i alpha|| -> 1/sqrt(a^2+4); the squared comparison is exact
    for a in (1, 2):
        terms = quadratic_terms(a, 34)
        m = quadratic_margin(a, terms[30])
        msq = exact_mul(m, m)
        diff = exact_add(msq, Fraction(-1, a * a + 4))
        if exact_sign(diff) < 0:
            diff = exact_neg(diff)
        assert exact_compare(diff, Fraction(1, 10**6)) < 0


def test_margin_fibonacci_window():
    # value within 1e-4 of 0.4472 for i in [20, 40]
    terms = quadratic_terms(1, 41)
    lo, hi = Fraction(4471, 10000), Fraction(4473, 10000)
    for i in range(20, 41):
        m = quadratic_margin(1, terms[i])
        assert exact_compare(m, lo) > 0 and exact_compare(m, hi) < 0


def test_fibonacci_like_set_indicator_matches_scanner():
    ind = fibonacci_like_set(1)
    members = set(scan_quadratic_set(1, 2000))
    for n in range(2000):
        want = 1 if n in members else 0
        assert ind.semantic(n) == want, n
    # the closed-form route agrees on a sample (n >= 1: the defining
    # inequality is vacuous at n = 0), at two precision ceilings
    for bits in (256, 1024):
        ind_b = fibonacci_like_set(1, PrecisionPolicy(start_bits=64, max_bits=bits))
        for n in list(range(1, 30)) + [55, 89, 144, 610, 987]:
            assert ind_b.formal_eval(n) == (1 if n in members else 0), (bits, n)


def test_variable_coefficient_demo():
    terms = variable_coefficient_terms([2, 3], 10)
    assert terms[:2] == [0, 1]
    assert all(terms[i + 2] in (2 * terms[i + 1] + terms[i],
                                3 * terms[i + 1] + terms[i])
               for i in range(len(terms) - 2))


# --- cubic validity ------------------------------------------------------


def test_cubic_terms_examples():
    assert cubic_terms(1, 0, 9) == [1, 1, 1, 2, 3, 4, 6, 9, 13]
    assert cubic_terms(2, -1, 6) == [1, 2, 3, 5, 9, 16]


def test_pisot_validity_table():
    assert abs(exact_enclosure(pisot_cubic_check(1, 0).beta, 64).to_float()
               - 1.46557) < 1e-4
    assert exact_enclosure(pisot_cubic_check(2, -1).beta, 64).to_float() > 1
    with pytest.raises(InvalidPisot):
        pisot_cubic_check(0, 2)   # b > a + 1
    with pytest.raises(InvalidPisot):
        pisot_cubic_check(0, 0)   # rational root 1
    with pytest.raises(InvalidPisot):
        pisot_cubic_check(1, -1)  # outside both branches


def test_root_identities():
    p = pisot_cubic_check(1, 0)
    # p(beta) = 0
    b = p.beta
    b2 = exact_mul(b, b)
    b3 = exact_mul(b2, b)
    residue = exact_add(b3, exact_neg(exact_add(b2, Fraction(1))))
    assert residue.is_zero()
    # beta * beta_inv = 1 and |alpha|^2 = 1/beta, checked to 200 bits
    assert exact_mul(b, p.beta_inv) == p.field.element(1)
    alpha_abs_sq = exact_add(exact_mul(p.alpha_re, p.alpha_re), p.alpha_im_sq)
    diff = exact_add(alpha_abs_sq, exact_neg(p.beta_inv))
    assert diff.is_zero()
    iv = exact_enclosure(p.alpha_im_sq, 200)
    assert iv.lower > 0
    # |alpha| < 1 (Pisot property): 1/beta < 1
    assert exact_compare(p.beta_inv, Fraction(1)) < 0


def test_rauzy_norm_examples():
    p = pisot_cubic_check(1, 0)
    assert rauzy_norm_sq(p, 0, 0).is_zero()
    # N((1,0))^2 = |alpha|^2 = 1/beta, N((0,1))^2 = 1/beta^2 for b = 0
    assert exact_add(rauzy_norm_sq(p, 1, 0), exact_neg(p.beta_inv)).is_zero()
    assert exact_add(rauzy_norm_sq(p, 0, 1), exact_neg(p.beta_inv2)).is_zero()


def test_recurrence_increasing_threshold():
    terms = cubic_terms(1, 0, 40)
    assert increasing_from(terms) <= 6
    terms2 = cubic_terms(2, -1, 40)
    assert increasing_from(terms2) <= 6


# --- best approximations ---------------------------------------------------


def test_q1_always_flagged():
    p = pisot_cubic_check(1, 0)
    rep = best_approximations(p, 1)
    assert rep.flagged_qs == [1]


def test_best_approx_matches_terms_up_to_finite():
    p = pisot_cubic_check(1, 0)
    rep = best_approximations(p, 2000)
    terms = {t for t in cubic_terms(1, 0, 32) if t <= 2000}
    diff = set(rep.flagged_qs) ^ terms
    assert len(diff) <= 3  # finite head, stable across the scan


def test_best_approx_scale_free():
    p = pisot_cubic_check(1, 0)
    small = best_approximations(p, 700)
    big = best_approximations(p, 1400)
    assert [q for q in big.flagged_qs if q <= 700] == small.flagged_qs


def test_m_ratio_along_best_sequence():
    # m_{q_n} = m1 |alpha|^n along the flagged sequence, checked exactly
    p = pisot_cubic_check(1, 0)
    rep = best_approximations(p, 1300, track=())
    flagged = rep.flagged
    beta_pow = p.field.element(1)
    for j, rec in enumerate(flagged[:20]):
        if j > 0:
            beta_pow = exact_mul(beta_pow, p.beta)
        ratio_num = exact_mul(rec.norm_sq, beta_pow)
        lo = exact_mul(p.m1_sq, Fraction(9801, 10000))
        hi = exact_mul(p.m1_sq, Fraction(10201, 10000))
        assert exact_compare(ratio_num, lo) > 0
        assert exact_compare(ratio_num, hi) < 0


# --- the gp predicate -------------------------------------------------------


def test_gp_predicate_on_terms():
    p = pisot_cubic_check(1, 0)
    pred = pisot_gp_set(p)
    terms = cubic_terms(1, 0, 26)
    for n in range(10, 26):
        assert pred(terms[n]) == 1
        assert pred(terms[n] + 1) == 0


def test_gp_predicate_vs_flags_small():
    p = pisot_cubic_check(1, 0)
    pred = pisot_gp_set(p)
    rep = best_approximations(p, 1500)
    members = {q for q in range(1, 1501) if pred(q)}
    assert members == set(rep.flagged_qs)


def test_gp_predicate_precision_independent():
    p = pisot_cubic_check(1, 0)
    pred = pisot_gp_set(p)
    probes = [1, 2, 9, 10, 60, 61, 406, 872, 1278, 1279]
    for q in probes:
        r256 = pred.interval_replay(q, 256)
        r1024 = pred.interval_replay(q, 1024)
        assert r256 == r1024 == pred(q)


def test_gp_predicate_other_family():
    p = pisot_cubic_check(2, -1)
    pred = pisot_gp_set(p)
    rep = best_approximations(p, 800)
    members = {q for q in range(1, 801) if pred(q)}
    assert len(members ^ set(rep.flagged_qs)) <= 3


# --- nearest powers ----------------------------------------------------------


def test_nearest_power_equivalence():
    p = pisot_cubic_check(1, 0)
    rep = nearest_power_set_equiv(p)
    assert rep.residual_ok and rep.translation_ok
    u = leading_coefficient(p)
    assert not u.is_zero()
    assert exact_sign(u) > 0


def test_nearest_power_other_family():
    rep = nearest_power_set_equiv(pisot_cubic_check(2, -1))
    assert rep.ok
