"""Finite base-k automata with output (DFAOs).

A DFAO computes a sequence by reading the base-k digits of n (most- or
least-significant first, with leading-zero invariance) and applying an
output map to the final state.  This module provides evaluation, exact
kernel computation, reading-order reversal, base-power change, products,
minimization, pattern-set builders, and pumping witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Hashable, Iterable, Sequence

from .digits import DigitWord, from_digits, to_digits, to_digits_lsd


class BudgetExceeded(Exception):
    """A construction exceeded its state/entry cap instead of silently truncating."""


class ReadingOrder(Enum):
    MSD = "msd"
    LSD = "lsd"


@dataclass(frozen=True)
class Dfao:
    """Deterministic finite automaton with output.

    ``transitions[s][d]`` is the successor of state ``s`` on digit ``d``;
    the map is total.  ``outputs[s]`` is an arbitrary hashable symbol.
    Instances are immutable and safe to share.
    """

    base: int
    transitions: tuple[tuple[int, ...], ...]
    outputs: tuple[Hashable, ...]
    initial: int = 0
    order: ReadingOrder = ReadingOrder.MSD

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        n = len(self.transitions)
        if len(self.outputs) != n:
            raise ValueError("one output per state required")
        if not 0 <= self.initial < n:
            raise ValueError("initial state out of range")
        for row in self.transitions:
            if len(row) != self.base:
                raise ValueError("transition rows must cover every digit")
            for t in row:
                if not 0 <= t < n:
                    raise ValueError("transition target out of range")

    @property
    def n_states(self) -> int:
        return len(self.transitions)

    def step(self, state: int, digit: int) -> int:
        return self.transitions[state][digit]

    def run(self, state: int, word: Iterable[int]) -> int:
        for d in word:
            state = self.transitions[state][d]
        return state

    def digits_of(self, n: int) -> tuple[int, ...]:
        if self.order is ReadingOrder.MSD:
            return to_digits(n, self.base)
        return to_digits_lsd(n, self.base)

    def eval(self, n: int) -> Hashable:
        """Output at n; n = 0 feeds the empty word (initial state's output)."""
        if n < 0:
            raise ValueError("n must be non-negative")
        return self.outputs[self.run(self.initial, self.digits_of(n))]

    def eval_word(self, word: Iterable[int]) -> Hashable:
        return self.outputs[self.run(self.initial, word)]

    def accepts(self, n: int) -> bool:
        return self.eval(n) == 1

    def reachable_states(self) -> list[int]:
        seen = {self.initial}
        stack = [self.initial]
        while stack:
            s = stack.pop()
            for t in self.transitions[s]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return sorted(seen)

    def is_binary(self) -> bool:
        return set(self.outputs) <= {0, 1}


# ---------------------------------------------------------------------------
# zero invariance


def is_zero_invariant(dfao: Dfao) -> bool:
    """Exact structural check of leading-zero invariance in the declared order.

    MSD: the initial state and its 0-successor must be full-word equivalent.
    LSD: every reachable state must keep its output along the 0-chain.
    """
    if dfao.order is ReadingOrder.LSD:
        return all(
            dfao.outputs[dfao.step(s, 0)] == dfao.outputs[s]
            for s in dfao.reachable_states()
        )
    return _word_equivalent(dfao, dfao.initial, dfao.step(dfao.initial, 0))


def _word_equivalent(dfao: Dfao, s1: int, s2: int) -> bool:
    # BFS over state pairs; outputs must agree on every reachable pair
    seen = {(s1, s2)}
    stack = [(s1, s2)]
    while stack:
        a, b = stack.pop()
        if dfao.outputs[a] != dfao.outputs[b]:
            return False
        for d in range(dfao.base):
            p = (dfao.step(a, d), dfao.step(b, d))
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return True


def verify_zero_invariance(dfao: Dfao, horizon: int) -> bool:
    """Check eval(n) unchanged under up to 3 extra zero paddings, n < horizon."""
    for n in range(horizon):
        digits = dfao.digits_of(n)
        want = dfao.eval(n)
        for j in range(1, 4):
            if dfao.order is ReadingOrder.MSD:
                padded = (0,) * j + digits
            else:
                padded = digits + (0,) * j
            if dfao.eval_word(padded) != want:
                return False
    return True


# ---------------------------------------------------------------------------
# minimization and equivalence


def _moore_partition(dfao: Dfao, states: Sequence[int], initial_key) -> dict[int, int]:
    """Coarsest partition refining ``initial_key`` and closed under transitions."""
    block = {s: initial_key(s) for s in states}
    ids = {}
    for s in states:
        block[s] = ids.setdefault(block[s], len(ids))
    while True:
        ids = {}
        new = {}
        for s in states:
            key = (block[s], tuple(block[dfao.step(s, d)] for d in range(dfao.base)))
            new[s] = ids.setdefault(key, len(ids))
        if len(ids) == len(set(block.values())):
            return new
        block = new


def minimize(dfao: Dfao) -> Dfao:
    """Myhill-Nerode-minimal automaton with identical eval; idempotent."""
    states = dfao.reachable_states()
    block = _moore_partition(dfao, states, lambda s: dfao.outputs[s])
    n_blocks = len(set(block.values()))
    # renumber so the initial block is 0 and the rest follow discovery order
    order = [block[dfao.initial]]
    seen = {block[dfao.initial]}
    rep = {}
    for s in states:
        rep.setdefault(block[s], s)
    queue = [dfao.initial]
    while queue:
        s = queue.pop(0)
        for d in range(dfao.base):
            b = block[dfao.step(s, d)]
            if b not in seen:
                seen.add(b)
                order.append(b)
                queue.append(rep[b])
    remap = {b: i for i, b in enumerate(order)}
    transitions = []
    outputs = []
    for b in order:
        s = rep[b]
        transitions.append(tuple(remap[block[dfao.step(s, d)]] for d in range(dfao.base)))
        outputs.append(dfao.outputs[s])
    assert len(order) == n_blocks
    return Dfao(dfao.base, tuple(transitions), tuple(outputs), 0, dfao.order)


def equivalent(d1: Dfao, d2: Dfao, stop_at: int | None = None) -> bool:
    """Exact eval-equality of two automata over the same base and order."""
    if d1.base != d2.base or d1.order != d2.order:
        raise ValueError("base/order mismatch")
    seen = {(d1.initial, d2.initial)}
    stack = [(d1.initial, d2.initial)]
    while stack:
        a, b = stack.pop()
        if d1.outputs[a] != d2.outputs[b]:
            return False
        for d in range(d1.base):
            p = (d1.step(a, d), d2.step(b, d))
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return True


# ---------------------------------------------------------------------------
# reading-order reversal


def reverse_reading(dfao: Dfao, state_budget: int = 10**6) -> Dfao:
    """Opposite-reading-order automaton computing the same sequence.

    States of the result are maps S -> outputs ("what would the source
    output if started anywhere and fed the digits read so far, in source
    order"); this is the digit-reversal subset construction, followed by
    minimization.  Requires the input to be leading-zero invariant so the
    result is too.
    """
    n = dfao.n_states
    h0 = tuple(dfao.outputs)
    index = {h0: 0}
    table: list[tuple[int, ...] | None] = [None]
    out = [h0[dfao.initial]]
    queue = [h0]
    while queue:
        h = queue.pop(0)
        i = index[h]
        row = []
        for d in range(dfao.base):
            h2 = tuple(h[dfao.step(s, d)] for s in range(n))
            j = index.get(h2)
            if j is None:
                j = len(index)
                if j >= state_budget:
                    raise BudgetExceeded("reversal subset construction exceeded budget")
                index[h2] = j
                table.append(None)
                out.append(h2[dfao.initial])
                queue.append(h2)
            row.append(j)
        table[i] = tuple(row)
    order = ReadingOrder.LSD if dfao.order is ReadingOrder.MSD else ReadingOrder.MSD
    rev = Dfao(dfao.base, tuple(table), tuple(out), 0, order)
    return minimize(rev)


def to_lsd(dfao: Dfao, state_budget: int = 10**6) -> Dfao:
    return dfao if dfao.order is ReadingOrder.LSD else reverse_reading(dfao, state_budget)


def to_msd(dfao: Dfao, state_budget: int = 10**6) -> Dfao:
    return dfao if dfao.order is ReadingOrder.MSD else reverse_reading(dfao, state_budget)


# ---------------------------------------------------------------------------
# base power and product


def base_power(dfao: Dfao, a: int) -> Dfao:
    """Automaton over base k^a computing the same sequence.

    Digits of the new base are a-blocks of old digits; leading-zero
    invariance of the input absorbs the block padding.
    """
    if a < 1:
        raise ValueError("a must be >= 1")
    if a == 1:
        return dfao
    k = dfao.base
    transitions = []
    for s in range(dfao.n_states):
        row = []
        for block_value in range(k**a):
            digits = to_digits(block_value, k)
            digits = (0,) * (a - len(digits)) + digits
            if dfao.order is ReadingOrder.LSD:
                digits = tuple(reversed(digits))
            row.append(dfao.run(s, digits))
        transitions.append(tuple(row))
    return Dfao(k**a, tuple(transitions), dfao.outputs, dfao.initial, dfao.order)


def product(dfao1: Dfao, dfao2: Dfao, combiner: Callable) -> Dfao:
    """Reachable product automaton; eval = combiner(eval1, eval2) pointwise."""
    if dfao1.base != dfao2.base or dfao1.order != dfao2.order:
        raise ValueError("base/order mismatch")
    start = (dfao1.initial, dfao2.initial)
    index = {start: 0}
    table = []
    out = [combiner(dfao1.outputs[start[0]], dfao2.outputs[start[1]])]
    queue = [start]
    while queue:
        a, b = queue.pop(0)
        row = []
        for d in range(dfao1.base):
            p = (dfao1.step(a, d), dfao2.step(b, d))
            j = index.get(p)
            if j is None:
                j = len(index)
                index[p] = j
                out.append(combiner(dfao1.outputs[p[0]], dfao2.outputs[p[1]]))
                queue.append(p)
            row.append(j)
        table.append(tuple(row))
    return Dfao(dfao1.base, tuple(table), tuple(out), 0, dfao1.order)


def map_outputs(dfao: Dfao, f: Callable) -> Dfao:
    return Dfao(dfao.base, dfao.transitions, tuple(f(o) for o in dfao.outputs),
                dfao.initial, dfao.order)


# ---------------------------------------------------------------------------
# kernel


@dataclass(frozen=True)
class KernelReport:
    """Exact census of the k-kernel of the computed sequence.

    ``classes`` maps class id -> (level, residue, lsd_state) of the first
    witness; ``index_map`` covers every residue at each explored level;
    ``size`` is the number of distinct subsequences n -> a(k^t n + r).
    """

    classes: tuple[tuple[int, int, int], ...]
    index_map: dict[tuple[int, int], int]
    size: int


def _canonical_partition(dfao: Dfao) -> dict[int, int]:
    """Partition of LSD states by equality of computed functions, ignoring
    the empty-word output (handled separately by the caller).

    Two states compute the same function on canonical LSD words ending in a
    nonzero digit iff they share this block; full function equality adds
    agreement of the states' own outputs.
    """
    states = dfao.reachable_states()

    def sig0(s):
        return tuple(dfao.outputs[dfao.step(s, d)] for d in range(1, dfao.base))

    return _moore_partition(dfao, states, sig0)


def kernel(dfao: Dfao, state_cap: int = 10**6, map_entry_cap: int = 4096) -> KernelReport:
    """Kernel classes by breadth-first closure over (level, residue) pairs.

    Class equality is decided exactly: two pairs (t, r), (t', r') give the
    same kernel element iff the corresponding LSD states compute identical
    functions.  Never decided from sampled prefixes.
    """
    lsd = to_lsd(dfao, state_budget=state_cap)
    if not is_zero_invariant(lsd):
        raise ValueError("kernel requires a leading-zero invariant automaton")
    if lsd.n_states > state_cap:
        raise BudgetExceeded("kernel state closure exceeded cap")
    block = _canonical_partition(lsd)
    k = lsd.base

    def class_key(s):
        return (lsd.outputs[s], block[s])

    class_ids: dict[tuple, int] = {}
    classes: list[tuple[int, int, int]] = []
    index_map: dict[tuple[int, int], int] = {}
    seen_states = {lsd.initial}
    level = {0: lsd.initial}  # residue -> state at current level
    t = 0
    storing = True
    while True:
        if storing and len(index_map) + len(level) <= map_entry_cap:
            for r, s in level.items():
                key = class_key(s)
                if key not in class_ids:
                    class_ids[key] = len(classes)
                    classes.append((t, r, s))
                index_map[(t, r)] = class_ids[key]
        else:
            storing = False
            for r, s in level.items():
                key = class_key(s)
                if key not in class_ids:
                    class_ids[key] = len(classes)
                    classes.append((t, r, s))
        new_states = False
        nxt = {}
        for r, s in level.items():
            for d in range(k):
                s2 = lsd.step(s, d)
                nxt[r + d * k**t] = s2
                if s2 not in seen_states:
                    seen_states.add(s2)
                    new_states = True
        if not new_states and t >= 1:
            # all reachable states met; every kernel class witnessed
            break
        level = nxt
        t += 1
    # count classes over the full reachable set, not only the explored map
    size = len({class_key(s) for s in seen_states})
    assert size == len(classes)
    return KernelReport(tuple(classes), index_map, size)


# ---------------------------------------------------------------------------
# builders


def thue_morse() -> Dfao:
    """Parity of the binary digit sum."""
    return Dfao(2, ((0, 1), (1, 0)), (0, 1), 0, ReadingOrder.MSD)


def constant(base: int, value: Hashable) -> Dfao:
    return Dfao(base, ((0,) * base,), (value,), 0, ReadingOrder.MSD)


def powers_acceptor(base: int = 2) -> Dfao:
    """Acceptor of {base^l : l >= 0}; MSD form accepts 1 0^l."""
    # state 0: leading zeros; 1: saw the single leading 1; 2: dead
    transitions = (
        tuple([0] + [1] + [2] * (base - 2)),
        tuple([1] + [2] * (base - 1)),
        tuple([2] * base),
    )
    return Dfao(base, transitions, (0, 1, 0), 0, ReadingOrder.MSD)


def parity_acceptor() -> Dfao:
    """Indicator of odd n, base 2 (LSD: the first digit decides)."""
    return Dfao(2, ((1, 2), (1, 1), (2, 2)), (0, 0, 1), 0, ReadingOrder.LSD)


def from_prohibited_patterns(k: int, patterns: Iterable[Sequence[int]]) -> Dfao:
    """Indicator of n whose base-k expansion contains no prohibited factor.

    Output 1 means the expansion is free of every pattern.  Aho-Corasick
    factor tracking over the canonical expansion; the initial state absorbs
    leading zeros so padding never creates a match.
    """
    pats = [tuple(p) for p in patterns]
    for p in pats:
        if len(p) == 0:
            raise ValueError("patterns must be nonempty")
        for d in p:
            if not 0 <= d < k:
                raise ValueError("pattern digit out of range")
    # Aho-Corasick trie over suffixes-that-are-prefixes, plus a dead state
    prefixes = {(): 0}
    for p in pats:
        for i in range(1, len(p) + 1):
            prefixes.setdefault(p[: i], len(prefixes))
    # goto with failure collapse
    items = sorted(prefixes, key=len)
    idx = {p: i for i, p in enumerate(items)}
    n_trie = len(items)
    dead = n_trie + 1  # trie states shifted by one for the pre-expansion state
    bad = set()
    for p in pats:
        for q in items:
            if len(q) >= len(p) and q[-len(p):] == p:
                bad.add(idx[q])

    def goto(state_word, d):
        w = state_word + (d,)
        while w and w not in prefixes:
            w = w[1:]
        return idx[w] if w in prefixes else idx[()]

    def match_closes(state_word, d):
        w = state_word + (d,)
        return any(len(w) >= len(p) and w[-len(p):] == p for p in pats)

    transitions = []
    # state 0: pre-expansion (leading zeros); trie state q -> q+1; dead last
    row0 = []
    for d in range(k):
        if d == 0:
            row0.append(0)
        else:
            row0.append(dead if match_closes((), d) else goto((), d) + 1)
    transitions.append(tuple(row0))
    for q in items:
        row = []
        for d in range(k):
            if idx[q] in bad or match_closes(q, d):
                row.append(dead)
            else:
                row.append(goto(q, d) + 1)
        transitions.append(tuple(row))
    transitions.append(tuple([dead] * k))
    outputs = [1] + [0 if idx[q] in bad else 1 for q in items] + [0]
    return minimize(Dfao(k, tuple(transitions), tuple(outputs), 0, ReadingOrder.MSD))


def baum_sweet() -> Dfao:
    """Indicator that every maximal 0-block between 1s in (n)_2 has even length.

    Trailing zeros after the last 1 are not between 1s and do not count.
    """
    # states: 0 leading zeros, 1 even run since last 1, 2 odd run, 3 dead
    transitions = (
        (0, 1),
        (2, 1),
        (1, 3),
        (3, 3),
    )
    return Dfao(2, transitions, (1, 1, 1, 0), 0, ReadingOrder.MSD)


# ---------------------------------------------------------------------------
# pumping


def pumping_witness(dfao: Dfao, value: Hashable, L: int = 0,
                    length_slack: int | None = None
                    ) -> tuple[DigitWord, DigitWord, DigitWord]:
    """Words u0, v, u1 with v nonempty and eval([u0 v^t u1]_k) = value for all t.

    The pump is placed at position >= L of a witness word found by layered
    search; the state-count is used as the pumping constant and the search
    widens by ``length_slack`` extra lengths before giving up.  The returned
    triple is verified for t <= 8.
    """
    N = dfao.n_states
    if length_slack is None:
        length_slack = 2 * N + 2
    k = dfao.base
    for total in range(L + N, L + N + length_slack + 1):
        word = _find_word_of_length(dfao, value, total)
        if word is None:
            continue
        path = [dfao.initial]
        for d in word:
            path.append(dfao.step(path[-1], d))
        seen_at = {}
        for pos in range(L, min(L + N, len(word)) + 1):
            s = path[pos]
            if s in seen_at:
                i, j = seen_at[s], pos
                u0, v, u1 = word[:i], word[i:j], word[j:]
                triple = _orient_triple(dfao, u0, v, u1)
                if _check_pump(dfao, triple, value, 8):
                    return triple
            else:
                seen_at[s] = pos
    raise BudgetExceeded(
        f"no pumping witness for value {value!r} within search budget")


def _orient_triple(dfao, u0, v, u1):
    # native word-space triple -> MSD components of [u0 v^t u1]_k
    if dfao.order is ReadingOrder.MSD:
        a, b, c = u0, v, u1
    else:
        a, b, c = tuple(reversed(u1)), tuple(reversed(v)), tuple(reversed(u0))
    return (DigitWord(dfao.base, a), DigitWord(dfao.base, b), DigitWord(dfao.base, c))


def check_pumping_witness(dfao: Dfao, triple, value, t_max: int) -> bool:
    return _check_pump(dfao, triple, value, t_max)


def _check_pump(dfao, triple, value, t_max):
    u0, v, u1 = triple
    if len(v) == 0:
        return False
    for t in range(t_max + 1):
        word = u0.digits + v.digits * t + u1.digits
        if dfao.eval(from_digits(word, dfao.base)) != value:
            return False
    return True


def _find_word_of_length(dfao: Dfao, value, length: int):
    """A length-``length`` word with the given output, canonical in the
    automaton's own word-space when possible (zero invariance covers the rest)."""
    if length == 0:
        return () if dfao.outputs[dfao.initial] == value else None
    layers = [{dfao.initial: None}]
    for _ in range(length):
        nxt = {}
        for s in layers[-1]:
            for d in range(dfao.base):
                t = dfao.step(s, d)
                if t not in nxt:
                    nxt[t] = (s, d)
        layers.append(nxt)
    target = None
    for s in layers[-1]:
        if dfao.outputs[s] == value:
            target = s
            break
    if target is None:
        return None
    word = []
    s = target
    for depth in range(length, 0, -1):
        prev, d = layers[depth][s]
        word.append(d)
        s = prev
    return tuple(reversed(word))


# ---------------------------------------------------------------------------
# text format

_ORDER_NAMES = {"msd": ReadingOrder.MSD, "lsd": ReadingOrder.LSD}


def parse_automaton(text: str) -> Dfao:
    """Parse the line-oriented automaton format.

    Header lines ``base k``, ``order msd|lsd``, ``initial i``, then one line
    per state: ``state i output o : d0->j0 d1->j1 ...``.
    """
    base = None
    order = ReadingOrder.MSD
    initial = 0
    rows: dict[int, tuple] = {}
    outs: dict[int, Hashable] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "base":
            base = int(parts[1])
        elif parts[0] == "order":
            order = _ORDER_NAMES[parts[1]]
        elif parts[0] == "initial":
            initial = int(parts[1])
        elif parts[0] == "state":
            if base is None:
                raise ValueError("base must precede state lines")
            i = int(parts[1])
            if parts[2] != "output" or ":" not in parts:
                raise ValueError(f"malformed state line: {line}")
            o: Hashable = parts[3]
            try:
                o = int(o)
            except ValueError:
                pass
            colon = parts.index(":")
            row = {}
            for arrow in parts[colon + 1:]:
                d, j = arrow.split("->")
                row[int(d)] = int(j)
            if sorted(row) != list(range(base)):
                raise ValueError(f"state {i}: transitions must cover digits 0..{base-1}")
            rows[i] = tuple(row[d] for d in range(base))
            outs[i] = o
        else:
            raise ValueError(f"unrecognized line: {line}")
    if base is None or not rows:
        raise ValueError("empty automaton description")
    n = max(rows) + 1
    if sorted(rows) != list(range(n)):
        raise ValueError("state indices must be 0..n-1")
    return Dfao(base, tuple(rows[i] for i in range(n)),
                tuple(outs[i] for i in range(n)), initial, order)


def format_automaton(dfao: Dfao) -> str:
    lines = [f"base {dfao.base}", f"order {dfao.order.value}", f"initial {dfao.initial}"]
    for i in range(dfao.n_states):
        arrows = " ".join(f"{d}->{dfao.transitions[i][d]}" for d in range(dfao.base))
        lines.append(f"state {i} output {dfao.outputs[i]} : {arrows}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# counting


def count_accepted_below(dfao: Dfao, bound: int) -> int:
    """Exact |{0 <= n < bound : eval(n) = 1}| by digit dynamic programming."""
    if bound <= 0:
        return 0
    msd = to_msd(dfao)
    digits = to_digits(bound - 1, msd.base)  # count n <= bound-1
    if not digits:
        return 1 if msd.outputs[msd.initial] == 1 else 0
    k = msd.base
    # pad every n <= bound-1 to len(digits) digits; zero invariance keeps eval
    free: dict[int, int] = {}
    count = 0
    tight_state = msd.initial
    for pos, dig in enumerate(digits):
        nfree: dict[int, int] = {}
        for s, c in free.items():
            for d in range(k):
                t = msd.step(s, d)
                nfree[t] = nfree.get(t, 0) + c
        for d in range(dig):
            t = msd.step(tight_state, d)
            nfree[t] = nfree.get(t, 0) + 1
        tight_state = msd.step(tight_state, dig)
        free = nfree
    count = sum(c for s, c in free.items() if msd.outputs[s] == 1)
    if msd.outputs[tight_state] == 1:
        count += 1
    return count
