import math
import random

import pytest

from nilseq.automaton import (
    base_power,
    constant,
    count_accepted_below,
    equivalent,
    is_zero_invariant,
    map_outputs,
    minimize,
    parity_acceptor,
    powers_acceptor,
    product,
    to_msd,
)
from nilseq.fixtures import (
    contains_101_acceptor,
    eleven_free_acceptor,
    finite_set_acceptor,
    fixture_suite,
    rank1_tail_acceptor,
    rank2_acceptor,
)
from nilseq.ipsets import IpGenerators, finite_sums
from nilseq.sparsity import (
    BasicPattern,
    classify,
    decomposition_to_dfao,
    enumerate_members,
    factor_universality,
    factor_universality_report,
    growth_census,
    ip_plus_witness,
    ips_witness,
    is_member,
    make_decomposition,
    normalize_arith_progression,
    promising_states,
    very_sparse_decomposition,
    window_count,
)

RANK2 = make_decomposition(2, [[(1,), (0,), (1,), (0,), (1,)]])


# --- promising states ---------------------------------------------------


def test_promising_constant_automata(const0, const1):
    assert promising_states(const1) == frozenset({0})
    assert promising_states(const0) == frozenset()


def test_promising_powers(powers2):
    # start and seen-1 are promising, the dead state is not
    assert sorted(promising_states(powers2)) == [0, 1]


def test_promising_requires_binary(tm):
    bad = map_outputs(tm, lambda o: "ab"[o])
    with pytest.raises(ValueError):
        promising_states(bad)


# --- classification ------------------------------------------------------


def test_classify_powers_very_sparse(powers2):
    cls = classify(powers2)
    assert cls.variant == "very_sparse"
    assert cls.decomposition.rank == 1
    members = enumerate_members(cls.decomposition, 1 << 20)
    assert members == [1 << j for j in range(20)]


def test_classify_constant_zero(const0):
    cls = classify(const0)
    assert cls.variant == "very_sparse"
    assert cls.decomposition.basic_sets == ()


def test_classify_baum_sweet(bs):
    cls = classify(bs)
    assert cls.variant == "condition_i"
    w = cls.witness
    assert len(w.v1) == len(w.v2) and w.v1 != w.v2
    assert cls.lsd.run(w.state, w.v1) == w.state
    assert cls.lsd.run(w.state, w.v2) == w.state
    assert w.state in promising_states(cls.lsd)


def test_classify_rejects_nonbinary(tm):
    bad = map_outputs(tm, lambda o: o + 5)
    with pytest.raises(ValueError):
        classify(bad)


def test_classify_dichotomy_exclusive_on_fixtures():
    for name, dfao in fixture_suite():
        cls = classify(dfao)
        assert cls.variant in ("very_sparse", "condition_i"), name
        if cls.variant == "very_sparse":
            assert cls.decomposition is not None and cls.witness is None
            # member counts below 2^L stay polynomial in L
            r = cls.decomposition.rank
            for lexp in (10, 16, 20):
                nu = count_accepted_below(dfao, 1 << lexp)
                bound = max(1, len(cls.decomposition.basic_sets)) * (lexp + 2) ** r
                assert nu <= bound, (name, nu, bound)
        else:
            assert cls.witness is not None and cls.decomposition is None
            # branching implies fast growth of accepted-word counts
            lsd = cls.lsd
            counts = [count_accepted_below(dfao, 1 << lexp)
                      for lexp in (12, 16, 20)]
            assert counts[-1] >= 16, name


def test_classify_base_power_consistency():
    for name, dfao in fixture_suite():
        v1 = classify(dfao).variant
        v2 = classify(base_power(to_msd(dfao), 2)).variant
        assert v1 == v2, name


# --- decomposition soundness ---------------------------------------------


def test_decomposition_roundtrip_equivalence():
    # decomposition -> value automaton == original acceptor, for all n
    for name, dfao in fixture_suite():
        cls = classify(dfao)
        if not cls.is_very_sparse:
            continue
        value_dfao = decomposition_to_dfao(cls.decomposition)
        assert is_zero_invariant(value_dfao)
        assert equivalent(minimize(value_dfao), minimize(to_msd(dfao))), name


def test_decomposition_membership_sampled():
    rng = random.Random(11)
    for name, dfao in [("powers", powers_acceptor(2)), ("rank2", rank2_acceptor())]:
        cls = classify(dfao)
        members = set(enumerate_members(cls.decomposition, 1 << 16))
        for n in range(1 << 12):
            assert (n in members) == (to_msd(dfao).eval(n) == 1), (name, n)
        for _ in range(10**3):
            n = rng.randrange(1 << 48)
            assert is_member(cls.decomposition, n) == (to_msd(dfao).eval(n) == 1)


def test_rank2_fixture_counts():
    members = enumerate_members(RANK2, 1 << 20)
    # |E cap [N]| grows like (log N)^2 / 2
    assert 100 <= len(members) <= 400
    dfao = decomposition_to_dfao(RANK2)
    assert count_accepted_below(dfao, 1 << 20) == len(members)


def test_finite_pattern_rank_zero():
    decomp = make_decomposition(2, [[(1, 0, 1)], [(1, 1, 1, 0)]])
    assert decomp.rank == 0
    assert enumerate_members(decomp, 100) == [5, 14]


def test_rank_collapse_rule():
    # u w u with u = w = "0" collapses: [1 0^a 0 0^b 0] = {1 0^(a+b+1) 0}
    decomp = make_decomposition(2, [[(1,), (0,), (0,), (0,), (0,)]])
    assert decomp.rank == 1
    members = enumerate_members(decomp, 1 << 12)
    assert members == [2**j for j in range(2, 12)]


def test_window_counts():
    cls = classify(powers_acceptor(2))
    count, cap = window_count(cls.decomposition, 10**6, 10**6)
    assert count == 1  # only 2^20
    assert count <= cap
    count0, _ = window_count(cls.decomposition, 10**6, 1)
    assert count0 in (0, 1)
    rng = random.Random(3)
    for _ in range(20):
        m0 = rng.randrange(1 << 30)
        c, cap = window_count(RANK2, m0, 1 << 20)
        assert c <= cap <= 10 * (21 + 2) ** 2


# --- growth census ---------------------------------------------------------


def test_growth_powers_polylog(powers2):
    grid = [2**j for j in range(4, 21, 4)]
    rep = growth_census(powers2, grid)
    assert rep.regime[0] == "poly_log"
    assert [c for _, c in rep.samples] == [4, 8, 12, 16, 20]


def test_growth_constant_one_powerlaw(const1):
    rep = growth_census(const1, [2**j for j in range(4, 21, 4)])
    assert rep.regime[0] == "power_law"
    assert abs(rep.regime[1] - 1.0) < 1e-6


def test_growth_eleven_free_exponent(eleven_free):
    rep = growth_census(eleven_free, [2**j for j in range(6, 21, 2)])
    assert rep.regime[0] == "power_law"
    assert abs(rep.regime[1] - math.log2((1 + 5**0.5) / 2)) < 0.02


def test_growth_window_stats_bounded(powers2):
    rep = growth_census(powers2, [1 << 16])
    for n, c in rep.window_stats:
        assert c <= 17


# --- ips witnesses -----------------------------------------------------------


def test_ips_witness_baum_sweet(bs):
    w = ips_witness(bs, horizon=10**4, depth=10)
    k = w.base
    assert 0 <= w.p < k**w.l and w.l < w.m
    assert w.r1 % k**w.l == w.p and w.r2 % k**w.l == w.p and w.r1 != w.r2
    # witness data re-verifies independently
    for n in range(2000):
        v = bs.eval(k**w.l * n + w.p)
        assert bs.eval(k**w.m * n + w.r1) == v
        assert bs.eval(k**w.m * n + w.r2) == v
    assert any(bs.eval(k**w.l * n + w.p) == 1 for n in range(50))
    for _, _, value in w.members(10):
        assert bs.eval(value) == 1


def test_ips_witness_eleven_free(eleven_free):
    w = ips_witness(eleven_free, horizon=10**4, depth=10)
    for _, _, value in w.members(10):
        assert eleven_free.eval(value) == 1


def test_ips_witness_synthetic_branching():
    # two self-loops at an accepting state: a 2-cycle-branching fixture
    d = constant(2, 1)
    w = ips_witness(d, horizon=10**3, depth=12)
    for _, _, value in w.members(12):
        assert d.eval(value) == 1


def test_ips_witness_rejected_on_very_sparse(powers2):
    with pytest.raises(ValueError):
        ips_witness(powers2)


# --- factor universality ------------------------------------------------------


def test_factor_universality_basic(const1, bs, eleven_free):
    assert factor_universality(const1)
    rep = factor_universality_report(bs)
    assert not rep.universal and rep.missing_factor == (1, 0, 1)
    rep2 = factor_universality_report(eleven_free)
    assert not rep2.universal and rep2.missing_factor == (1, 1)


def test_factor_universality_contains_101():
    assert factor_universality(contains_101_acceptor())


def test_ip_plus_witness_contains_101():
    dfao = contains_101_acceptor()
    w = ip_plus_witness(dfao, depth=10)
    sums = finite_sums(IpGenerators(w.generators), 10)
    for v in sums:
        assert dfao.eval(v + w.shift) == 1


def test_ip_plus_witness_constant_one(const1):
    w = ip_plus_witness(const1, depth=10)
    assert all(const1.eval(v + w.shift) == 1
               for v in finite_sums(IpGenerators(w.generators), 10))


def test_ip_plus_rejects_baum_sweet(bs):
    with pytest.raises(ValueError):
        ip_plus_witness(bs)


# --- normal form ---------------------------------------------------------------


def test_normalize_powers():
    decomp = classify(powers_acceptor(2)).decomposition
    nf = normalize_arith_progression(decomp, verify_bound=1 << 40)
    assert nf.modulus == 2 and nf.residue == 0
    assert nf.branches == (((1,), (0,)),)
    assert nf.suffix == (0,)


def test_normalize_single_branch_fixed_point():
    # {[1 0^l 0]_2}: already in (v, w, u) shape
    decomp = make_decomposition(2, [[(1,), (0,), (0,)]])
    nf = normalize_arith_progression(decomp, verify_bound=1 << 36)
    assert nf.modulus == 2**len(nf.suffix)
    got = set(enumerate_members(nf.decomposition(), 1 << 36))
    want = {v for v in enumerate_members(decomp, 1 << 36)
            if v % nf.modulus == nf.residue}
    assert got == want


def test_normalize_rank2():
    nf = normalize_arith_progression(RANK2, verify_bound=1 << 40)
    # each surviving branch has a single pump
    for v, w in nf.branches:
        assert len(w) >= 1
    got = set(enumerate_members(nf.decomposition(), 1 << 40))
    want = {v for v in enumerate_members(RANK2, 1 << 40)
            if v % nf.modulus == nf.residue}
    assert got == want and got


def test_normalize_mixed_pump_lengths():
    # pumps "0" and "00": lcm alignment and exponent-residue splitting
    decomp = make_decomposition(2, [[(1,), (0,), (1,)],
                                    [(1, 1), (0, 0), (1, 1)]])
    nf = normalize_arith_progression(decomp, verify_bound=1 << 34)
    got = set(enumerate_members(nf.decomposition(), 1 << 34))
    want = {v for v in enumerate_members(decomp, 1 << 34)
            if v % nf.modulus == nf.residue}
    assert got == want


def test_normalize_rejects_finite():
    decomp = make_decomposition(2, [[(1, 0, 1)]])
    with pytest.raises(ValueError):
        normalize_arith_progression(decomp)


def test_powers_reduction_demo():
    from nilseq.sparsity import powers_reduction_demo

    cls = classify(powers_acceptor(2))
    rep = powers_reduction_demo(cls.decomposition, horizon=1 << 40)
    assert rep.ok
    assert [st.name for st in rep.stages] == [
        "A_cap_progression", "B_coefficient_powers", "C_unit_leading",
        "D_pure_powers"]
    # the terminal stage is exactly the even powers of the final base
    final = rep.stages[-1]
    assert final.sample[:4] == [rep.final_base ** (2 * l) for l in range(4)]

    rep2 = powers_reduction_demo(RANK2, horizon=1 << 40)
    assert rep2.ok
