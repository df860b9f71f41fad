"""Structure of the 1-set of a {0,1}-valued automaton.

The central dichotomy: either some strongly connected component of the
promising subgraph branches (two distinct equal-length return words exist
at a promising state, from which shifted-finite-sums witnesses are built),
or the accepted words factor through a condensation of cycles and the set
is a finite union of digit patterns w0 u1^l1 w1 ... ur^lr wr with exact,
enumerable membership.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .automaton import (
    BudgetExceeded,
    Dfao,
    ReadingOrder,
    count_accepted_below,
    is_zero_invariant,
    minimize,
    product,
    to_lsd,
    to_msd,
)
from .digits import DigitWord, from_digits, to_digits, to_digits_lsd


def _val_lsd(digits: Sequence[int], k: int) -> int:
    v = 0
    for i, d in enumerate(digits):
        v += d * k**i
    return v


# ---------------------------------------------------------------------------
# promising subgraph


def promising_states(dfao: Dfao) -> frozenset[int]:
    """States from which some word reaches an output-1 state (backward closure)."""
    if not dfao.is_binary():
        raise ValueError("promising states require {0,1} outputs")
    rev: dict[int, set[int]] = {s: set() for s in range(dfao.n_states)}
    for s in range(dfao.n_states):
        for d in range(dfao.base):
            rev[dfao.step(s, d)].add(s)
    frontier = [s for s in range(dfao.n_states) if dfao.outputs[s] == 1]
    seen = set(frontier)
    while frontier:
        s = frontier.pop()
        for prev in rev[s]:
            if prev not in seen:
                seen.add(prev)
                frontier.append(prev)
    return frozenset(seen)


def _tarjan_scc(vertices: Sequence[int], succ: Callable[[int], Iterable[int]]):
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    comps: list[tuple[int, ...]] = []
    counter = [0]

    for root in vertices:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                pv = work[-1][0]
                low[pv] = min(low[pv], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(tuple(sorted(comp)))
    return comps


@dataclass(frozen=True)
class PromisingGraph:
    """Promising states of an LSD automaton with their SCC condensation."""

    vertices: frozenset[int]
    edges: tuple[tuple[int, int, int], ...]  # (state, digit, target)
    comps: tuple[tuple[int, ...], ...]
    comp_of: dict[int, int]
    comp_dag: dict[int, frozenset[int]]


def promising_graph(lsd: Dfao) -> PromisingGraph:
    verts = promising_states(lsd)
    edges = tuple((s, d, lsd.step(s, d)) for s in sorted(verts)
                  for d in range(lsd.base) if lsd.step(s, d) in verts)
    adj: dict[int, list[int]] = {s: [] for s in verts}
    for s, _, t in edges:
        adj[s].append(t)
    comps = tuple(_tarjan_scc(sorted(verts), lambda v: adj[v]))
    comp_of = {}
    for i, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = i
    dag: dict[int, set[int]] = {i: set() for i in range(len(comps))}
    for s, _, t in edges:
        if comp_of[s] != comp_of[t]:
            dag[comp_of[s]].add(comp_of[t])
    return PromisingGraph(verts, edges, comps,
                          comp_of, {i: frozenset(v) for i, v in dag.items()})


# ---------------------------------------------------------------------------
# basic patterns and decompositions


@dataclass(frozen=True)
class BasicPattern:
    """MSD digit pattern w0 u1^l1 w1 ... ur^lr wr (parts alternate, odd count).

    Members are the integers [w0 u1^l1 w1 ... ur^lr wr]_k over all
    exponent choices l_i >= 0.
    """

    base: int
    parts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.parts) % 2 != 1:
            raise ValueError("parts must alternate connector/pump, odd count")

    @property
    def rank(self) -> int:
        return (len(self.parts) - 1) // 2

    @property
    def pumps(self) -> tuple[tuple[int, ...], ...]:
        return self.parts[1::2]

    @property
    def connectors(self) -> tuple[tuple[int, ...], ...]:
        return self.parts[0::2]

    def word(self, exponents: Sequence[int]) -> tuple[int, ...]:
        out: list[int] = []
        for i, part in enumerate(self.parts):
            if i % 2 == 0:
                out.extend(part)
            else:
                out.extend(part * exponents[i // 2])
        return tuple(out)


@dataclass(frozen=True)
class VerySparseDecomposition:
    base: int
    basic_sets: tuple[BasicPattern, ...]

    @property
    def rank(self) -> int:
        return max((p.rank for p in self.basic_sets), default=0)

    def to_jsonable(self) -> dict:
        return {"base": self.base,
                "basic_sets": [[list(part) for part in p.parts]
                               for p in self.basic_sets]}


def _strip_leading_zero_words(parts: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Value-preserving cleanup: drop empty pumps, zero pumps in the leading-
    zero region, and leading zeros of the first connector."""
    parts = list(parts)
    changed = True
    while changed:
        changed = False
        # drop empty pumps
        for j in range(1, len(parts), 2):
            if len(parts[j]) == 0:
                conn = parts[j - 1] + parts[j + 1]
                parts[j - 1:j + 2] = [conn]
                changed = True
                break
        if changed:
            continue
        # drop all-zero pumps that sit before any nonzero digit
        seen_nonzero = False
        for j, part in enumerate(parts):
            if j % 2 == 1 and not seen_nonzero and part and not any(part):
                conn = parts[j - 1] + parts[j + 1]
                parts[j - 1:j + 2] = [conn]
                changed = True
                break
            if any(part):
                seen_nonzero = True
        if changed:
            continue
        # strip leading zeros of the first connector
        w0 = parts[0]
        if w0 and w0[0] == 0:
            i = 0
            while i < len(w0) and w0[i] == 0:
                i += 1
            # keep zeros only if a pump precedes a nonzero (none does: this is w0)
            parts[0] = w0[i:]
            changed = True
    return parts


def _collapse_rank(parts: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Apply the u_j = w_j = u_{j+1} collapse until none remains."""
    parts = list(parts)
    changed = True
    while changed:
        changed = False
        for j in range(1, len(parts) - 2, 2):
            u, w, u2 = parts[j], parts[j + 1], parts[j + 2]
            if u and u == w == u2:
                # u^a u u^b w_next = u^c (u w_next), c >= 0
                parts[j + 1:j + 3] = []
                parts[j + 1] = u + parts[j + 1]
                changed = True
                break
    return parts


def normalize_pattern(p: BasicPattern) -> BasicPattern:
    parts = _strip_leading_zero_words(list(p.parts))
    parts = _collapse_rank(parts)
    parts = _strip_leading_zero_words(parts)
    return BasicPattern(p.base, tuple(parts))


def make_decomposition(base: int, raw_patterns: Iterable[Sequence[Sequence[int]]]
                       ) -> VerySparseDecomposition:
    pats = []
    seen = set()
    for raw in raw_patterns:
        p = normalize_pattern(BasicPattern(base, tuple(tuple(w) for w in raw)))
        if p.parts not in seen:
            seen.add(p.parts)
            pats.append(p)
    return VerySparseDecomposition(base, tuple(pats))


def enumerate_members(decomp: VerySparseDecomposition, bound: int) -> list[int]:
    """All members < bound, exactly, by bounded digit enumeration."""
    out: set[int] = set()
    for pat in decomp.basic_sets:
        _enumerate_pattern(pat, bound, out)
    return sorted(out)


def _enumerate_pattern(pat: BasicPattern, bound: int, out: set[int]):
    if bound <= 0:
        return
    k = pat.base
    parts = pat.parts

    def min_completion(prefix: list[int], idx: int) -> int:
        digits = list(prefix)
        for j in range(idx, len(parts)):
            if j % 2 == 0:
                digits.extend(parts[j])
        return from_digits(digits, k)

    def rec(idx: int, prefix: list[int]):
        if idx == len(parts):
            v = from_digits(prefix, k)
            if v < bound:
                out.add(v)
            return
        if idx % 2 == 0:
            rec(idx + 1, prefix + list(parts[idx]))
            return
        u = list(parts[idx])
        if not u:
            rec(idx + 1, prefix)
            return
        if not any(prefix) and not any(u):
            # pumping zeros before any nonzero digit repeats the same value
            rec(idx + 1, prefix)
            return
        cur = list(prefix)
        while True:
            if min_completion(cur, idx + 1) >= bound:
                # appending more digits can only grow the value here
                if any(cur) or any(u):
                    break
            rec(idx + 1, cur)
            cur = cur + u
            if len(cur) > len(prefix) + (len(u) * (bound.bit_length() + 8)):
                break

    rec(0, [])


def is_member(decomp: VerySparseDecomposition, n: int) -> bool:
    if n < 0:
        return False
    members = set()
    for pat in decomp.basic_sets:
        _enumerate_pattern(pat, n + 1, members)
        if n in members:
            return True
    return False


def window_count(decomp: VerySparseDecomposition, m0: int, n_len: int
                 ) -> tuple[int, int]:
    """Exact |members cap [m0, m0+n_len)| plus the shape-derived cap
    C * (log n_len + 1)^r it is asserted against."""
    members = enumerate_members(decomp, m0 + n_len)
    count = sum(1 for v in members if v >= m0)
    r = decomp.rank
    k = decomp.base
    a = max((len(u) for p in decomp.basic_sets for u in p.pumps if u), default=1)
    log_n = max(1, math.ceil(math.log(max(n_len, 2), k)))
    cap = len(decomp.basic_sets) * (a ** max(r, 1)) * (k + 1) * (log_n + 2) ** r
    if count > cap:
        raise AssertionError(
            f"window count {count} exceeded the shape bound {cap}")
    return count, cap


# ---------------------------------------------------------------------------
# decomposition -> value acceptor


def decomposition_to_dfao(decomp: VerySparseDecomposition,
                          state_budget: int = 10**6) -> Dfao:
    """Zero-invariant MSD acceptor of the member set (value semantics)."""
    k = decomp.base
    # epsilon-NFA over pattern positions
    eps: list[list[int]] = []
    trans: list[dict[int, list[int]]] = []
    accepting: set[int] = set()

    def new_state() -> int:
        eps.append([])
        trans.append({})
        return len(eps) - 1

    starts = []
    for pat in decomp.basic_sets:
        cur = new_state()
        starts.append(cur)
        for idx, part in enumerate(pat.parts):
            if idx % 2 == 0:
                for d in part:
                    nxt = new_state()
                    trans[cur].setdefault(d, []).append(nxt)
                    cur = nxt
            else:
                if not part:
                    continue
                loop_start = cur
                inner = cur
                for d in part[:-1]:
                    nxt = new_state()
                    trans[inner].setdefault(d, []).append(nxt)
                    inner = nxt
                # closing the loop
                trans[inner].setdefault(part[-1], []).append(loop_start)
                cur = loop_start
        accepting.add(cur)

    def eps_closure(states: frozenset[int]) -> frozenset[int]:
        seen = set(states)
        stack = list(states)
        while stack:
            s = stack.pop()
            for t in eps[s]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    init = eps_closure(frozenset(starts))
    # leading-zero semantics: accept 0^j x whenever some 0^i x is a pattern word
    zclosure = set(init)
    frontier = list(init)
    while frontier:
        s = frontier.pop()
        for t in trans[s].get(0, []):
            if t not in zclosure:
                zclosure.add(t)
                frontier.append(t)
    pad = new_state()  # absorbs leading zeros
    trans[pad][0] = [pad]
    eps[pad].extend(sorted(zclosure))
    init = eps_closure(frozenset([pad]))

    # subset construction
    index = {init: 0}
    table: list[tuple[int, ...]] = []
    outputs: list[int] = []
    queue = [init]
    while queue:
        cur = queue.pop(0)
        row = []
        for d in range(k):
            nxt = set()
            for s in cur:
                nxt.update(trans[s].get(d, []))
            nxt = eps_closure(frozenset(nxt))
            j = index.get(nxt)
            if j is None:
                j = len(index)
                if j >= state_budget:
                    raise BudgetExceeded("value-acceptor subset construction")
                index[nxt] = j
                queue.append(nxt)
            row.append(j)
        table.append(tuple(row))
        outputs.append(1 if cur & accepting else 0)
    dfa = Dfao(k, tuple(table), tuple(outputs), 0, ReadingOrder.MSD)
    return minimize(dfa)


# ---------------------------------------------------------------------------
# classification


@dataclass(frozen=True)
class BranchWitness:
    """A promising state with two distinct equal-length return words."""

    state: int
    v1: tuple[int, ...]
    v2: tuple[int, ...]


@dataclass
class Classification:
    variant: str  # "very_sparse" | "condition_i"
    lsd: Dfao
    decomposition: Optional[VerySparseDecomposition] = None
    witness: Optional[BranchWitness] = None

    @property
    def is_very_sparse(self) -> bool:
        return self.variant == "very_sparse"


def _bfs_word(dfao: Dfao, source: int, target: int,
              allowed: Optional[frozenset[int]] = None) -> Optional[tuple[int, ...]]:
    """Shortest word from source to target (restricted to allowed states)."""
    if source == target:
        return ()
    prev: dict[int, tuple[int, int]] = {}
    queue = [source]
    seen = {source}
    while queue:
        s = queue.pop(0)
        for d in range(dfao.base):
            t = dfao.step(s, d)
            if allowed is not None and t not in allowed:
                continue
            if t not in seen:
                seen.add(t)
                prev[t] = (s, d)
                if t == target:
                    word = []
                    cur = t
                    while cur != source:
                        p, dd = prev[cur]
                        word.append(dd)
                        cur = p
                    return tuple(reversed(word))
                queue.append(t)
    return None


def classify(dfao: Dfao, state_budget: int = 10**6) -> Classification:
    """The structure dichotomy for the set {n : eval(n) = 1}.

    Reported branch condition: some SCC of the promising subgraph contains
    a vertex with >= 2 outgoing edges staying in its SCC; the two distinct
    cycles there yield the equal-length return words v1 = c1^{|c2|},
    v2 = c2^{|c1|}.  Otherwise every component is a cycle or trivial and the
    condensation-path enumeration emits the digit-pattern decomposition.
    """
    if not dfao.is_binary():
        raise ValueError("classification requires a {0,1} output alphabet")
    lsd = to_lsd(dfao, state_budget)
    graph = promising_graph(lsd)
    intra: dict[int, list[tuple[int, int]]] = {v: [] for v in graph.vertices}
    for s, d, t in graph.edges:
        if graph.comp_of[s] == graph.comp_of[t]:
            intra[s].append((d, t))
    for s in sorted(graph.vertices):
        if len(intra[s]) >= 2:
            comp = frozenset(graph.comps[graph.comp_of[s]])
            (d1, t1), (d2, t2) = intra[s][0], intra[s][1]
            back1 = _bfs_word(lsd, t1, s, comp)
            back2 = _bfs_word(lsd, t2, s, comp)
            c1 = (d1,) + back1
            c2 = (d2,) + back2
            v1 = c1 * len(c2)
            v2 = c2 * len(c1)
            assert len(v1) == len(v2) and v1 != v2
            assert lsd.run(s, v1) == s and lsd.run(s, v2) == s
            return Classification("condition_i", lsd,
                                  witness=BranchWitness(s, v1, v2))
    decomposition = _enumerate_condensation_paths(lsd, graph)
    return Classification("very_sparse", lsd, decomposition=decomposition)


def _cycle_next(graph: PromisingGraph, comp_id: int,
                intra: dict[int, list[tuple[int, int]]]):
    """For a cycle component: vertex -> (digit, successor) along the cycle."""
    nxt = {}
    for v in graph.comps[comp_id]:
        moves = intra[v]
        if len(moves) == 1:
            nxt[v] = moves[0]
        elif len(moves) > 1:
            raise AssertionError("branching component reached in cycle walk")
    return nxt


def _enumerate_condensation_paths(lsd: Dfao, graph: PromisingGraph
                                  ) -> VerySparseDecomposition:
    k = lsd.base
    if lsd.initial not in graph.vertices:
        return VerySparseDecomposition(k, ())
    intra: dict[int, list[tuple[int, int]]] = {v: [] for v in graph.vertices}
    bridges: dict[int, list[tuple[int, int]]] = {v: [] for v in graph.vertices}
    for s, d, t in graph.edges:
        if graph.comp_of[s] == graph.comp_of[t]:
            intra[s].append((d, t))
        else:
            bridges[s].append((d, t))

    raw_patterns: list[list[tuple[int, ...]]] = []

    def comp_paths(comp_id: int, entry: int):
        """(word_to_x, pump_at_x, x) choices inside one component."""
        comp = graph.comps[comp_id]
        nxt = _cycle_next(graph, comp_id, intra)
        if entry not in nxt:
            # trivial vertex without intra edge
            yield ((), None, entry)
            return
        # walk the cycle from entry
        path: list[int] = []
        v = entry
        visited = []
        while True:
            visited.append((tuple(path), v))
            d, t = nxt[v]
            path.append(d)
            v = t
            if v == entry:
                break
        cycle_len = len(path)
        for word_to_x, x in visited:
            # pump = cycle word starting at x
            pump = []
            w = x
            for _ in range(cycle_len):
                d, t = nxt[w]
                pump.append(d)
                w = t
            yield (word_to_x, tuple(pump), x)

    def rec(comp_id: int, entry: int, acc: list):
        # acc: alternating [conn, pump, conn, pump, ...] starting with conn
        for word_to_x, pump, x in comp_paths(comp_id, entry):
            # finalize here if x accepts
            if lsd.outputs[x] == 1:
                pattern = acc[:-1] + [acc[-1] + list(word_to_x)]
                if pump is not None:
                    pattern = pattern + [list(pump), []]
                raw_patterns.append([tuple(p) for p in pattern])
            for d, t in bridges[x]:
                new_acc = acc[:-1] + [acc[-1] + list(word_to_x)]
                if pump is not None:
                    new_acc = new_acc + [list(pump)]
                else:
                    new_acc = new_acc + [[]]
                new_acc = new_acc + [[d]]
                rec(graph.comp_of[t], t, new_acc)

    rec(graph.comp_of[lsd.initial], lsd.initial, [[]])

    # convert LSD patterns (alternating conn/pump/.../conn) to MSD basic sets
    msd_raw = []
    for pat in raw_patterns:
        rev = [tuple(reversed(part)) for part in reversed(pat)]
        msd_raw.append(rev)
    return make_decomposition(k, msd_raw)


def very_sparse_decomposition(dfao: Dfao) -> VerySparseDecomposition:
    cls = classify(dfao)
    if not cls.is_very_sparse:
        raise ValueError("automaton is on the branching side of the dichotomy")
    return cls.decomposition


# ---------------------------------------------------------------------------
# shifted-finite-sums witnesses


@dataclass
class IpsWitness:
    """Levels, residues, and the derived shifted-finite-sums family.

    Identities a(k^l n + p) = a(k^m n + r1) = a(k^m n + r2) hold for all n;
    members N_t + n_alpha realize iterated applications of the two digit
    substitutions and all lie inside the 1-set.
    """

    base: int
    l: int
    m: int
    p: int
    r1: int
    r2: int
    n0: int
    generators: tuple[int, ...]
    shifts: tuple[int, ...]
    verified_depth: int
    verified_horizon: int

    def members(self, depth: int) -> list[tuple[int, tuple[int, ...], int]]:
        from .ipsets import IpsFamily, IpGenerators, shifted_finite_sums

        fam = IpsFamily(IpGenerators(self.generators[:depth]),
                        self.shifts[:depth])
        return shifted_finite_sums(fam, depth)


def ips_witness(dfao: Dfao, horizon: int = 10**5, depth: int = 10) -> IpsWitness:
    """Convert a branching classification into explicit (l, m, p, r1, r2)
    data plus generator and shift families, every claim re-verified."""
    cls = classify(dfao)
    if cls.is_very_sparse:
        raise ValueError("ips witness requires the branching classification")
    lsd, wit = cls.lsd, cls.witness
    k = lsd.base
    entry = _bfs_word(lsd, lsd.initial, wit.state)
    if entry is None:
        raise AssertionError("witness state unreachable; classification bug")
    l = len(entry)
    d_len = len(wit.v1)
    m = l + d_len
    p = _val_lsd(entry, k)
    s1 = _val_lsd(wit.v1, k)
    s2 = _val_lsd(wit.v2, k)
    if s1 > s2:
        s1, s2 = s2, s1
    r1 = p + k**l * s1
    r2 = p + k**l * s2
    # smallest n0 with a(k^l n0 + p) = 1
    accept_word = None
    for target in range(lsd.n_states):
        if lsd.outputs[target] == 1:
            w = _bfs_word(lsd, wit.state, target)
            if w is not None and (accept_word is None or len(w) < len(accept_word)):
                accept_word = w
    if accept_word is None:
        raise AssertionError("promising witness state cannot accept")
    n0 = _val_lsd(accept_word, k)
    gens = tuple(k**l * (s2 - s1) * k**((i - 1) * d_len)
                 for i in range(1, depth + 1))
    shifts = []
    for t in range(1, depth + 1):
        geom_sum = (k**(t * d_len) - 1) // (k**d_len - 1)
        shifts.append(k**l * (k**(t * d_len) * n0 + s1 * geom_sum) + p)
    witness = IpsWitness(k, l, m, p, r1, r2, n0, gens, tuple(shifts),
                         depth, horizon)
    _verify_ips(witness, lsd.eval, depth)
    return witness


def _verify_ips(w: IpsWitness, a: Callable[[int], int], depth: int):
    k = w.base
    for n in range(w.verified_horizon + 1):
        v0 = a(k**w.l * n + w.p)
        if a(k**w.m * n + w.r1) != v0 or a(k**w.m * n + w.r2) != v0:
            raise AssertionError(f"ips identity failed at n={n}")
    if a(k**w.l * w.n0 + w.p) != 1:
        raise AssertionError("n0 does not witness membership")
    for _, _, value in w.members(depth):
        if a(value) != 1:
            raise AssertionError(f"shifted finite sum {value} not a member")


# ---------------------------------------------------------------------------
# growth census


@dataclass
class GrowthReport:
    samples: list[tuple[int, int]]
    regime: tuple
    window_stats: list[tuple[int, int]]
    fit: dict
    seed: int


def _linreg(xs: Sequence[float], ys: Sequence[float]):
    n = len(xs)
    if n < 2:
        return 0.0, 0.0, 0.0
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    if sxx == 0:
        return 0.0, my, 0.0
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - my) ** 2 for y in ys)
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r2


def growth_census(dfao: Dfao, n_grid: Sequence[int], window_count_: int = 6,
                  seed: int = 20160517, window_span: int = 1 << 31) -> GrowthReport:
    """Exact counts nu(N) on the grid with a regime classification.

    Power-law when the (log N, log nu) slope is >= 0.2 with R^2 >= 0.99;
    otherwise poly-log when nu(N) <= (log2 N)^8 throughout; else
    inconclusive.
    """
    if not dfao.is_binary():
        raise ValueError("growth census requires {0,1} outputs")
    samples = [(n, count_accepted_below(dfao, n)) for n in n_grid]
    rng = random.Random(seed)
    window_stats = []
    for n, _ in samples:
        best = 0
        for _ in range(window_count_):
            m0 = rng.randrange(window_span)
            cnt = count_accepted_below(dfao, m0 + n) - count_accepted_below(dfao, m0)
            best = max(best, cnt)
        window_stats.append((n, best))
    pos = [(n, c) for n, c in samples if c > 0 and n > 1]
    fit = {}
    regime: tuple = ("inconclusive",)
    if len(pos) >= 2:
        lx = [math.log(n) for n, _ in pos]
        ly = [math.log(c) for _, c in pos]
        slope, _, r2 = _linreg(lx, ly)
        fit["loglog_slope"] = slope
        fit["loglog_r2"] = r2
        llx = [math.log(math.log(n)) for n, _ in pos]
        pslope, _, pr2 = _linreg(llx, ly)
        fit["polylog_degree"] = pslope
        fit["polylog_r2"] = pr2
        if slope >= 0.2 and r2 >= 0.99:
            regime = ("power_law", slope)
        elif all(c <= math.log2(n) ** 8 for n, c in pos):
            regime = ("poly_log", pslope)
    elif all(c == 0 for _, c in samples):
        regime = ("poly_log", 0.0)
    return GrowthReport(samples, regime, window_stats, fit, seed)


# ---------------------------------------------------------------------------
# factor universality and shifted IP witnesses


@dataclass
class FactorUniversality:
    universal: bool
    missing_factor: Optional[tuple[int, ...]]


def factor_universality(dfao: Dfao, subset_budget: int = 1 << 20) -> bool:
    return factor_universality_report(dfao, subset_budget).universal


def factor_universality_report(dfao: Dfao, subset_budget: int = 1 << 20
                               ) -> FactorUniversality:
    """Decide whether every digit word occurs as a factor of the canonical
    expansion of some accepted n, by subset tracking of possible factor
    positions (determinized factor closure + emptiness of the complement)."""
    msd = to_msd(dfao)
    if not msd.is_binary():
        raise ValueError("factor universality requires {0,1} outputs")
    promising = promising_states(msd)
    k = msd.base
    # states reachable via a nonempty canonical prefix (first digit nonzero)
    frontier = [msd.step(msd.initial, d) for d in range(1, k)]
    prefix_reachable = set(frontier)
    while frontier:
        s = frontier.pop()
        for d in range(k):
            t = msd.step(s, d)
            if t not in prefix_reachable:
                prefix_reachable.add(t)
                frontier.append(t)

    full = frozenset(prefix_reachable | {msd.initial})
    bare = frozenset(prefix_reachable)
    if not full & promising:
        return FactorUniversality(False, ())

    def image(subset: frozenset[int], d: int) -> frozenset[int]:
        return frozenset(msd.step(s, d) for s in subset)

    seen: dict[frozenset[int], tuple] = {}
    queue = []
    for d in range(k):
        start = image(full if d != 0 else bare, d)
        if start not in seen:
            seen[start] = ((d,),)
            queue.append(start)
    while queue:
        cur = queue.pop(0)
        word = seen[cur][0]
        if not cur & promising:
            return FactorUniversality(False, word)
        if len(seen) > subset_budget:
            raise BudgetExceeded("factor-closure subset construction")
        for d in range(k):
            nxt = image(cur, d)
            if nxt not in seen:
                seen[nxt] = (word + (d,),)
                queue.append(nxt)
    return FactorUniversality(True, None)


@dataclass
class IpPlusWitness:
    """Shift N and generators m * k^(l(i-1)+h) realizing a shifted sums family."""

    base: int
    shift: int
    m_value: int
    l: int
    h: int
    state: int
    state_prime: int
    generators: tuple[int, ...]
    verified_depth: int


def ip_plus_witness(dfao: Dfao, depth: int = 10) -> IpPlusWitness:
    """States s, s' and words u = 0^l, v with the four-arrow diagram
    (s -u-> s', s -v-> s, s' -u-> s', s' -v-> s), turned into a shift and
    geometric generators; every finite sum + shift is verified a member."""
    report = factor_universality_report(dfao)
    if not report.universal:
        raise ValueError(
            f"hypothesis fails: word {report.missing_factor} is never a factor")
    lsd = to_lsd(dfao)
    k = lsd.base
    reachable = lsd.reachable_states()
    stages = []
    for s in reachable:
        if lsd.outputs[s] != 1:
            continue
        # rho shape of the 0-chain from s
        chain = [s]
        pos = {s: 0}
        while True:
            nxt = lsd.step(chain[-1], 0)
            if nxt in pos:
                tail, cycle = pos[nxt], len(chain) - pos[nxt]
                break
            pos[nxt] = len(chain)
            chain.append(nxt)
        p_steps = cycle * max(1, -(-max(tail, 1) // cycle))  # lcm-ish multiple >= tail
        s_prime = chain[tail + ((p_steps - tail) % cycle)]
        # word from s' back to s whose final digit is nonzero
        w = None
        for x in reachable:
            for d in range(1, k):
                if lsd.step(x, d) == s:
                    path = _bfs_word(lsd, s_prime, x)
                    if path is not None:
                        cand = path + (d,)
                        if w is None or len(cand) < len(w):
                            w = cand
        if w is None:
            stages.append((s, "no return word with nonzero final digit"))
            continue
        v = ((0,) * p_steps + w) * p_steps
        l = p_steps * (p_steps + len(w))
        u = (0,) * l
        if not (lsd.run(s, u) == s_prime and lsd.run(s, v) == s
                and lsd.run(s_prime, u) == s_prime and lsd.run(s_prime, v) == s):
            stages.append((s, "diagram check failed"))
            continue
        m_value = _val_lsd(v, k)
        entry = None
        for c_word in _short_words_to(lsd, s):
            if c_word == () or c_word[-1] != 0:
                entry = c_word
                break
        if entry is None:
            stages.append((s, "no canonical entry word"))
            continue
        n0 = _val_lsd(entry, k)
        h = len(to_digits(n0, k))
        gens = tuple(m_value * k**(l * (i - 1) + h) for i in range(1, depth + 1))
        witness = IpPlusWitness(k, n0, m_value, l, h, s, s_prime, gens, depth)
        _verify_ip_plus(witness, lsd.eval, depth)
        return witness
    raise BudgetExceeded(f"diagram search exhausted; stages: {stages}")


def _short_words_to(lsd: Dfao, target: int):
    """Words from the initial state to target, shortest first (BFS, all paths
    up to a modest budget)."""
    out = []
    if lsd.initial == target:
        out.append(())
    queue = [(lsd.initial, ())]
    seen_words = 0
    while queue and seen_words < 4096:
        s, word = queue.pop(0)
        if len(word) > 2 * lsd.n_states + 2:
            continue
        for d in range(lsd.base):
            t = lsd.step(s, d)
            w2 = word + (d,)
            if t == target:
                out.append(w2)
                seen_words += 1
            queue.append((t, w2))
    return out


def _verify_ip_plus(w: IpPlusWitness, a: Callable[[int], int], depth: int):
    from .ipsets import IpGenerators, finite_sums

    for v in finite_sums(IpGenerators(w.generators[:depth]), depth):
        if a(v + w.shift) != 1:
            raise AssertionError(f"shifted sum {v + w.shift} not a member")


# ---------------------------------------------------------------------------
# arithmetic-progression normal form


@dataclass
class NormalForm:
    base: int
    block_base: int
    modulus: int
    residue: int
    suffix: tuple[int, ...]           # u in block-base digits
    branches: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]  # (v_i, w)
    verified_bound: int

    def decomposition(self) -> VerySparseDecomposition:
        pats = [BasicPattern(self.block_base, (v, w, self.suffix))
                for v, w in self.branches]
        return VerySparseDecomposition(self.block_base, tuple(pats))


class _Blocks:
    """One basic set in block form: member = prod v_i w_i^{l_i} (MSD)."""

    def __init__(self, pairs: list[tuple[tuple[int, ...], tuple[int, ...]]]):
        self.pairs = pairs  # list of (connector, pump); only last pump may be empty

    @classmethod
    def from_pattern(cls, pat: BasicPattern) -> "_Blocks":
        parts = list(pat.parts)
        pairs = []
        for i in range(1, len(parts), 2):
            pairs.append((parts[i - 1], parts[i]))
        if parts[-1]:
            pairs.append((parts[-1], ()))
        elif not pairs:
            pairs.append(((), ()))
        # merge interior empty pumps
        merged = []
        for conn, pump in pairs:
            if merged and not merged[-1][1]:
                pc, _ = merged.pop()
                merged.append((pc + conn, pump))
            else:
                merged.append((conn, pump))
        return cls(merged)

    def to_pattern(self, base: int) -> BasicPattern:
        parts: list[tuple[int, ...]] = []
        for conn, pump in self.pairs:
            parts.append(conn)
            parts.append(pump)
        if parts and not parts[-1]:
            parts.pop()
        else:
            parts.append(())
        return BasicPattern(base, tuple(parts))


def normalize_arith_progression(decomp: VerySparseDecomposition,
                                verify_bound: int = 1 << 40) -> NormalForm:
    """Rewriting pipeline to a common-pump normal form on a progression.

    Steps: make all pump lengths equal to their lcm by exponent-residue
    splitting; re-align connector lengths to multiples of that length by
    rotating pumps (with the separate exponent-0 branch); pass to the block
    base; absorb connectors that are pump powers; then pick the separating
    suffix u from powered pumps of a maximal branch, intersect, and verify
    by enumeration that the members of the output equal the members of the
    input meeting the progression.
    """
    k = decomp.base
    if not decomp.basic_sets:
        raise ValueError("finite (empty) set has no progression normal form")
    all_pump_lengths = [len(u) for p in decomp.basic_sets for u in p.pumps if u]
    if not all_pump_lengths:
        raise ValueError("finite set input: no pumps to normalize")
    big_m = math.lcm(*all_pump_lengths)

    # step 1: exponent-residue split so every pump has length big_m
    split_sets: list[_Blocks] = []

    def split_set(pairs, idx, acc):
        if idx == len(pairs):
            split_sets.append(_Blocks(list(acc)))
            return
        conn, pump = pairs[idx]
        if not pump:
            split_set(pairs, idx + 1, acc + [(conn, pump)])
            return
        reps = big_m // len(pump)
        for rho in range(reps):
            new_conn = conn + pump * rho
            split_set(pairs, idx + 1, acc + [(new_conn, pump * reps)])

    for pat in decomp.basic_sets:
        blocks = _Blocks.from_pattern(pat)
        split_set(blocks.pairs, 0, [])

    # step 2: connector alignment (right to left), spawning exponent-0 branches
    aligned: list[_Blocks] = []
    work = list(split_sets)
    while work:
        blocks = work.pop()
        pairs = [list(p) for p in blocks.pairs]
        i = len(pairs) - 1
        restart = False
        while i >= 1:
            conn = pairs[i][0]
            if len(conn) % big_m != 0:
                prev_pump = pairs[i - 1][1]
                if not prev_pump:
                    raise AssertionError("interior empty pump after merging")
                need = (-len(conn)) % big_m
                w1, w2 = prev_pump[:big_m - need], prev_pump[big_m - need:]
                # l = 0 branch: drop the pump, merge connectors
                zero_pairs = pairs[: i - 1] + \
                    [[pairs[i - 1][0] + tuple(conn), pairs[i][1]]] + pairs[i + 1:]
                work.append(_Blocks([(tuple(c), tuple(p)) for c, p in zero_pairs]))
                # l >= 1 branch: v_{i-1} w' (w'' w')^{l-1} w'' v_i
                pairs[i - 1][0] = tuple(pairs[i - 1][0]) + w1
                pairs[i - 1][1] = w2 + w1
                pairs[i][0] = w2 + tuple(conn)
                restart = True
            i -= 1
        first_conn = pairs[0][0]
        pad = (-len(first_conn)) % big_m
        pairs[0][0] = (0,) * pad + tuple(first_conn)
        aligned.append(_Blocks([(tuple(c), tuple(p)) for c, p in pairs]))

    # step 3: pass to the block base K = k^big_m
    big_k = k**big_m

    def group(word: tuple[int, ...]) -> tuple[int, ...]:
        assert len(word) % big_m == 0
        return tuple(from_digits(word[i:i + big_m], k)
                     for i in range(0, len(word), big_m))

    block_sets: list[_Blocks] = []
    for blocks in aligned:
        pairs = [(group(c), group(p)) for c, p in blocks.pairs]
        block_sets.append(_Blocks(pairs))

    # step 4: absorb connectors that are powers of equal flanking pumps
    for blocks in block_sets:
        changed = True
        while changed:
            changed = False
            pairs = blocks.pairs
            for i in range(1, len(pairs)):
                conn, pump = pairs[i]
                prev_conn, prev_pump = pairs[i - 1]
                same = prev_pump and (pump == prev_pump or
                                      (not pump and i == len(pairs) - 1))
                if same and conn and all(d == prev_pump[0] for d in conn) \
                        and len(prev_pump) == 1:
                    if pump == prev_pump:
                        # merge the two pumps; push the power right
                        nxt = pairs[i + 1] if i + 1 < len(pairs) else None
                        pairs[i - 1] = (prev_conn, prev_pump)
                        if nxt is not None:
                            pairs[i + 1] = (conn + nxt[0], nxt[1])
                            del pairs[i]
                        else:
                            pairs[i] = (conn, ())
                        changed = True
                        break
                    else:
                        # trailing connector is a pump power: commute left
                        pairs[i - 1] = (prev_conn + conn, prev_pump)
                        pairs[i] = ((), ())
                        if i == len(pairs) - 1 and pairs[i] == ((), ()):
                            del pairs[i]
                        changed = True
                        break

    # step 5: choose u from a branch with the most pumps, with growing power
    best = max(block_sets, key=lambda b: sum(1 for _, p in b.pairs if p))
    t_max = max(len(c) for b in block_sets for c, _ in b.pairs)
    base_decomp = VerySparseDecomposition(
        big_k, tuple(b.to_pattern(big_k) for b in block_sets))

    last_error = None
    for c_exp in list(range(1, t_max + 2)) + [2 * (t_max + 2)]:
        u: tuple[int, ...] = ()
        for idx, (conn, pump) in enumerate(best.pairs):
            if idx > 0:
                u = u + conn
            u = u + pump * c_exp
        if not u:
            break
        try:
            return _intersect_and_shape(decomp, base_decomp, big_k, big_m, u,
                                        verify_bound)
        except _ShapeRetry as exc:
            last_error = exc
            continue
    raise BudgetExceeded(f"normal form not reached: {last_error}")


class _ShapeRetry(Exception):
    pass


def _lsd_prefix_dfao(base: int, u: tuple[int, ...]) -> Dfao:
    """LSD acceptor of values congruent to [u] mod base^len(u)."""
    n = len(u)
    # states 0..n (matched so far), n+1 dead
    dead = n + 1
    table = []
    outs = []
    for i in range(n):
        row = [dead] * base
        row[u[i]] = i + 1
        table.append(tuple(row))
        outs.append(1 if all(d == 0 for d in u[i:]) else 0)
    table.append(tuple([n] * base))
    outs.append(1)
    table.append(tuple([dead] * base))
    outs.append(0)
    return Dfao(base, tuple(table), tuple(outs), 0, ReadingOrder.LSD)


def _intersect_and_shape(original: VerySparseDecomposition,
                         base_decomp: VerySparseDecomposition,
                         big_k: int, big_m: int, u: tuple[int, ...],
                         verify_bound: int) -> NormalForm:
    value_dfao = decomposition_to_dfao(base_decomp)
    value_lsd = to_lsd(value_dfao)
    suffix_dfao = _lsd_prefix_dfao(big_k, tuple(reversed(u)))
    inter = product(value_lsd, suffix_dfao, lambda a, b: a * b)
    cls = classify(inter)
    if not cls.is_very_sparse:
        raise _ShapeRetry("intersection not very sparse (unexpected)")
    branches = []
    pump_words = set()
    constants = []
    for pat in cls.decomposition.basic_sets:
        if pat.rank == 0:
            # an isolated member equal to the residue itself is the
            # degenerate family [0^l u]; anything else cannot be shaped
            value = from_digits(pat.parts[0], big_k)
            if value == from_digits(u, big_k):
                constants.append(value)
                continue
            raise _ShapeRetry("finite leftover branch")
        if pat.rank > 1:
            raise _ShapeRetry("branch with more than one pump")
        w0, u1, w1 = pat.parts
        if len(w1) < len(u) or w1[len(w1) - len(u):] != u:
            raise _ShapeRetry("branch tail does not end with the suffix")
        x = w1[: len(w1) - len(u)]
        # members w0 u1^l x u -> v w^l u: write x = u1^q h with h a proper
        # prefix of u1 (u1 = h y); then u1^{l+q} h = h (y h)^{l+q} and the q
        # whole copies commute into the prefix
        q, rem = divmod(len(x), len(u1))
        if x != u1 * q + u1[:rem]:
            raise _ShapeRetry("pump cannot be rotated past the remainder")
        h = u1[:rem]
        y = u1[rem:]
        w = y + h
        v = w0 + h + w * q
        branches.append((tuple(v), tuple(w)))
        pump_words.add(tuple(w))
    if len(pump_words) > 1:
        raise _ShapeRetry("branches disagree on the common pump")
    if constants:
        pump = next(iter(pump_words)) if pump_words else (0,)
        if any(pump):
            raise _ShapeRetry("constant branch needs an all-zero common pump")
        branches.append(((), tuple(pump)))
        pump_words.add(tuple(pump))
    modulus = big_k ** len(u)
    residue = from_digits(u, big_k)
    nf = NormalForm(base=original.base, block_base=big_k, modulus=modulus,
                    residue=residue, suffix=tuple(u),
                    branches=tuple(branches), verified_bound=verify_bound)
    # machine verification by enumeration
    want = {v for v in enumerate_members(original, verify_bound)
            if v % modulus == residue}
    got = set(enumerate_members(nf.decomposition(), verify_bound))
    if want != got:
        raise _ShapeRetry(
            f"verification mismatch: {sorted(want ^ got)[:5]} ...")
    return nf


# ---------------------------------------------------------------------------
# the reduction pipeline to powers of the base


@dataclass
class ReductionStage:
    name: str
    description: str
    sample: list[int]
    ok: bool


@dataclass
class PowersReductionReport:
    stages: list[ReductionStage]
    final_base: int

    @property
    def ok(self) -> bool:
        return all(st.ok for st in self.stages)


def powers_reduction_demo(decomp: VerySparseDecomposition,
                          horizon: int = 1 << 40) -> PowersReductionReport:
    """Mechanically replay the set transformations that reduce an infinite
    digit-pattern set to the powers of a base: restrict to a progression
    (common-pump normal form), pull the branches back through the affine
    member map to coefficient-times-power sets, divide by the first
    coefficient, and cut with one more progression, landing on {K^(2l)}.

    Every stage is checked by enumeration up to the horizon; nothing is
    proven here, the steps are replayed on concrete data.
    """
    stages: list[ReductionStage] = []
    nf = normalize_arith_progression(decomp, verify_bound=horizon)
    k0 = nf.block_base
    a_members = [v for v in enumerate_members(decomp, horizon)
                 if v % nf.modulus == nf.residue]
    stages.append(ReductionStage(
        "A_cap_progression",
        f"input members meeting {nf.modulus} Z + {nf.residue}",
        a_members[:8],
        set(a_members) == set(enumerate_members(nf.decomposition(), horizon))))

    u_val = from_digits(nf.suffix, k0)
    # branches whose member family actually grows (a constant branch would
    # have an all-zero pump behind an empty prefix; it stays behind as the
    # single member [u])
    branches = [(v, w) for v, w in nf.branches
                if any(w) or from_digits(v, k0) > 0]
    skipped = len(nf.branches) - len(branches)
    if not branches:
        raise ValueError("no growing branch to reduce")
    s_len = len(nf.suffix)
    t_len = len(branches[0][1])
    w_val = from_digits(branches[0][1], k0)
    coeffs = [w_val + (k0**t_len - 1) * from_digits(v, k0) for v, w in branches]

    # phi(x) = k0^s (x - [w])/(k0^t - 1) + [u] sends b_i k0^{t l} to the
    # branch member with exponent l; stage B pulls A back through phi
    b_set = set()
    pulled_ok = True
    for m in a_members:
        if skipped and m == u_val:
            continue
        num = (m - u_val) * (k0**t_len - 1)
        if num % k0**s_len:
            pulled_ok = False
            break
        b_set.add(num // k0**s_len + w_val)
    b_bound = max(b_set, default=0) + 1
    want_b = set()
    for b in coeffs:
        power = b
        while power < b_bound:
            want_b.add(power)
            power *= k0**t_len
    stages.append(ReductionStage(
        "B_coefficient_powers", "pullback {b_i k^(t l)}",
        sorted(b_set)[:8], pulled_ok and b_set == want_b))

    # stage C: n such that b_1 n lands in B; the first coefficient becomes 1
    b1 = coeffs[0]
    c_set = {x // b1 for x in b_set if x % b1 == 0}
    c_coeffs = set()
    for b in coeffs:
        scaled = b
        for _ in range(64):
            if scaled % b1 == 0:
                c_coeffs.add(scaled // b1)
                break
            scaled *= k0**t_len
    c_bound = max(c_set, default=0) + 1
    want_c = set()
    for c in c_coeffs:
        power = c
        while power < c_bound:
            want_c.add(power)
            power *= k0**t_len
    stages.append(ReductionStage(
        "C_unit_leading", "divide by the first coefficient; c_1 = 1",
        sorted(c_set)[:8], 1 in c_coeffs and c_set == want_c))

    # stage D: enlarge the base so all coefficients sit below K^2, then keep
    # n = 1 mod (K^2 - 1); only the pure even powers of K survive
    m_exp = 1
    while any(c >= k0**(t_len * m_exp) for c in c_coeffs):
        m_exp += 1
    big_k = k0**(t_len * m_exp)
    modulus = big_k * big_k - 1
    d_set = {x for x in c_set if x % modulus == 1 % modulus}
    want_d = set()
    power = 1
    while power < c_bound:
        if power in c_set:
            want_d.add(power)
        power *= big_k * big_k
    stages.append(ReductionStage(
        "D_pure_powers", f"cut with 1 mod {big_k}^2 - 1: exactly the K^(2l)",
        sorted(d_set)[:8], d_set == want_d and bool(d_set)))
    return PowersReductionReport(stages, big_k)
