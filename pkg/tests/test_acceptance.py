"""Acceptance gate: every criterion at its stated tolerance and horizon.

Each test prints one PASS/FAIL line (run pytest with -s to see them all) and
enforces the stated wall-clock budget.  Interval-path evaluations run with a
1024-bit ceiling so nothing here depends on precision tuning.
"""

import functools
import math
import time
from fractions import Fraction

from nilseq.automaton import (
    baum_sweet,
    count_accepted_below,
    kernel,
    powers_acceptor,
    thue_morse,
)
from nilseq.exactreal import (
    ExactReal,
    exact_add,
    exact_compare,
    exact_floor,
    exact_mul,
    exact_neg,
    exact_sign,
    make_quad,
)
from nilseq.fixtures import eleven_free_acceptor, fixture_suite
from nilseq.genpoly import (
    Floor,
    PrecisionPolicy,
    VAR,
    Const,
    equidistribution_test,
    eval_gp_int,
    floor_poly_mod,
    gp_mul,
    kernel_census,
    parse_gp,
    Seq,
    weak_periodicity_search,
)
from nilseq.ipsets import contains_fs, geometric_generators
from nilseq.orbits import TorusSkewSystem, residue_indicator, skew_orbit_point, \
    heisenberg_fracpart
from nilseq.recurrence import (
    best_approximations,
    cubic_terms,
    fibonacci_like_set,
    pisot_cubic_check,
    pisot_gp_set,
    quadratic_margin,
    quadratic_terms,
    scan_quadratic_set,
)
from nilseq.sparsity import classify, enumerate_members, ips_witness, \
    normalize_arith_progression, make_decomposition

POLICY = PrecisionPolicy(start_bits=64, max_bits=1024)


def criterion(number, budget_seconds, label):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper():
            start = time.time()
            try:
                fn()
            except BaseException:
                print(f"ACCEPTANCE {number:2d} FAIL  {label}")
                raise
            elapsed = time.time() - start
            print(f"ACCEPTANCE {number:2d} PASS  {label}  ({elapsed:.2f}s)")
            assert elapsed <= budget_seconds, (
                f"criterion {number} exceeded its {budget_seconds}s budget")
        return wrapper
    return deco


@criterion(1, 1, "Thue-Morse kernel has exactly 2 classes")
def test_criterion_01_thue_morse_kernel():
    assert kernel(thue_morse()).size == 2


@criterion(2, 5, "powers-of-2: very sparse, rank 1, exact members and counts")
def test_criterion_02_powers_structure():
    cls = classify(powers_acceptor(2))
    assert cls.variant == "very_sparse"
    assert cls.decomposition.rank == 1
    members = enumerate_members(cls.decomposition, 1 << 40)
    assert members == [1 << l for l in range(40)]
    for j in range(1, 31):
        assert count_accepted_below(powers_acceptor(2), 1 << j) == j


@criterion(3, 30, "Baum-Sweet: branching side, witness identities to 1e5, depth 10")
def test_criterion_03_baum_sweet_ips():
    bs = baum_sweet()
    assert classify(bs).variant == "condition_i"
    wit = ips_witness(bs, horizon=10**5, depth=10)
    # ips_witness re-verifies internally; re-check the identities here too
    k = wit.base
    for n in range(0, 10**5 + 1, 9973):
        v = bs.eval(k**wit.l * n + wit.p)
        assert bs.eval(k**wit.m * n + wit.r1) == v
        assert bs.eval(k**wit.m * n + wit.r2) == v
    for _, _, value in wit.members(10):
        assert bs.eval(value) == 1


@criterion(4, 60, "growth gap across the ten-automaton fixture suite")
def test_criterion_04_growth_gap():
    polylog_cap = 21**8
    power_floor = 2 ** (0.2 * 20)
    for name, dfao in fixture_suite():
        cls = classify(dfao)
        nu = count_accepted_below(dfao, 1 << 20)
        if cls.variant == "very_sparse":
            assert nu <= polylog_cap, (name, nu)
        else:
            assert nu >= power_floor, (name, nu)


@criterion(5, 60, "Fibonacci construction: exact set, stable head, margins")
def test_criterion_05_fibonacci():
    horizon = 10**6
    members = scan_quadratic_set(1, horizon)
    terms = [t for t in quadratic_terms(1, 64) if 1 <= t <= horizon]
    head = sorted(set(terms) - set(members))
    assert sorted(set(members) - set(terms)) == []  # Legendre inclusion
    assert len(head) < 10  # finite head, here in fact empty
    assert head == []
    # the closed-form evaluator reproduces the same head set at both
    # precision ceilings (the samples cover every term and its neighbours)
    samples = sorted({t + d for t in terms for d in (-1, 0, 1) if 1 <= t + d}
                     | set(range(1, 64)))
    verdile = {}
    for bits in (256, 1024):
        ind = fibonacci_like_set(1, PrecisionPolicy(start_bits=64, max_bits=bits))
        verdile[bits] = [ind.semantic(n) for n in samples]
    assert verdile[256] == verdile[1024]
    member_set = set(members)
    assert verdile[1024] == [1 if n in member_set else 0 for n in samples]
    # n_i ||n_i phi|| within 1e-4 of 0.4472 for 20 <= i <= 40
    all_terms = quadratic_terms(1, 41)
    lo, hi = Fraction(4472, 10000) - Fraction(1, 10**4), \
        Fraction(4472, 10000) + Fraction(1, 10**4)
    for i in range(20, 41):
        m = quadratic_margin(1, all_terms[i])
        assert exact_compare(m, lo) > 0 and exact_compare(m, hi) < 0


@criterion(6, 600, "cubic Pisot (1,0): best approximations, norm decay, gp predicate")
def test_criterion_06_pisot():
    params = pisot_cubic_check(1, 0)
    qmax = 10**5
    rep = best_approximations(params, qmax)
    flagged = rep.flagged_qs
    terms = [t for t in cubic_terms(1, 0, 64) if t <= qmax]
    diff = sorted(set(flagged) ^ set(terms))
    assert len(diff) <= 4, diff  # finite, explicitly listed difference
    print(f"    best-approximation difference vs terms: {diff}")
    # m_{q_n} = m1 |alpha|^n along the best-approximation sequence: the
    # ratio stays inside [0.99, 1.01] for 5 <= n <= 20 (it is exactly 1)
    beta_pow = params.field.element(1)
    for j, rec in enumerate(rep.flagged[:21]):
        if j > 0:
            beta_pow = exact_mul(beta_pow, params.beta)
        if j < 5:
            continue
        scaled = exact_mul(rec.norm_sq, beta_pow)
        lo = exact_mul(params.m1_sq, Fraction(9801, 10000))
        hi = exact_mul(params.m1_sq, Fraction(10201, 10000))
        assert exact_compare(scaled, lo) > 0 and exact_compare(scaled, hi) < 0
    # gp predicate vs flags up to qmax: finite, explicitly listed difference
    pred = pisot_gp_set(params)
    members = {q for q in range(1, qmax + 1) if pred(q)}
    gp_diff = sorted(members ^ set(flagged))
    assert len(gp_diff) <= 4, gp_diff
    print(f"    gp-predicate difference vs flags: {gp_diff}")


@criterion(7, 60, "skew-torus representation of floor(p(n)) mod 2")
def test_criterion_07_skew_torus():
    s2 = make_quad(0, 1, 2)
    sys_ = TorusSkewSystem.from_poly([Fraction(0), Fraction(1, 3), s2], 2)
    # last coordinate equals {p(n)/2} within 2^-40 (they are equal exactly)
    tol = Fraction(1, 1 << 40)
    for n in range(0, 10**4 + 1):
        pt = sys_.closed_form(sys_.base_point(), n)
        direct = exact_mul(exact_add(exact_mul(s2, Fraction(n * n)),
                                     Fraction(n, 3)), Fraction(1, 2))
        direct_frac = exact_add(direct, Fraction(-exact_floor(direct)))
        delta = exact_add(pt[-1], exact_neg(direct_frac))
        if exact_sign(delta) < 0:
            delta = exact_neg(delta)
        assert exact_compare(delta, tol) < 0
    # residue indicator equals floor(p(n)) mod 2 exactly for n <= 1e5
    seq = floor_poly_mod([Fraction(0), Fraction(1, 3), ExactReal.sqrt(2)], 2,
                         POLICY)
    for n in range(0, 10**5 + 1, 7):
        want = seq(n)
        assert residue_indicator(sys_, None, 2, want, n) == 1
    for n in range(0, 10**4 + 1):
        assert residue_indicator(sys_, None, 2, seq(n), n) == 1


@criterion(8, 30, "Heisenberg fractional part: closed form == lattice reduction")
def test_criterion_08_heisenberg():
    s2 = make_quad(0, 1, 2)
    s3 = make_quad(0, 1, 3)
    for n in range(10**4 + 1):
        # raises internally if the two computations resolve differently
        heisenberg_fracpart(s2, s3, n, cross_check=True)


@criterion(9, 300, "weak periodicity: rational witness vs irrational exhaustion")
def test_criterion_09_weak_periodicity():
    rational = floor_poly_mod([Fraction(1, 2), Fraction(0), Fraction(3, 7)], 5,
                              POLICY)
    witness = weak_periodicity_search(rational, 98, 512, 10**5)
    assert witness is not None and witness[0] <= 98
    q, r, s = witness
    assert all(rational(q * n + r) == rational(q * n + s) for n in range(500))
    irrational = floor_poly_mod([0, 0, ExactReal.sqrt(2)], 2, POLICY)
    assert weak_periodicity_search(irrational, 64, 512, 10**5) is None


@criterion(10, 10, "FS(2^{2i}) inside the eleven-free set at depth 16")
def test_criterion_10_ip_containment():
    dfao = eleven_free_acceptor()
    gens = geometric_generators(4, 4, 16)
    chk = contains_fs(dfao.eval, gens, 16)
    assert chk.ok and chk.depth == 16


@criterion(11, 30, "progression normal form of the rank-2 pattern, exact to 2^40")
def test_criterion_11_normal_form():
    decomp = make_decomposition(2, [[(1,), (0,), (1,), (0,), (1,)]])
    nf = normalize_arith_progression(decomp, verify_bound=1 << 40)
    got = set(enumerate_members(nf.decomposition(), 1 << 40))
    want = {v for v in enumerate_members(decomp, 1 << 40)
            if v % nf.modulus == nf.residue}
    assert got == want and got


@criterion(12, 300, "equidistribution probe and kernel census blowup")
def test_criterion_12_equidistribution():
    expr = gp_mul(Const(ExactReal.sqrt(2)), VAR,
                  Floor(gp_mul(Const(ExactReal.sqrt(3)), VAR)))
    rep = equidistribution_test(expr, 1, Fraction(1), 10**5, 50, POLICY)
    assert rep.star_discrepancy < 0.02, rep.star_discrepancy
    mod_expr = Floor(expr)
    seq = Seq(lambda n: eval_gp_int(mod_expr, n, POLICY) % 10)
    census = kernel_census(seq, 2, 10, 64)
    assert census > 50, census
