"""Finite sums, shifted finite sums, and membership certificates.

All claims produced here are finite-depth: a check at depth d certifies
the sums over nonempty subsets of the first d generators, nothing more.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Optional, Sequence


class EnumerationBudget(Exception):
    pass


@dataclass(frozen=True)
class IpGenerators:
    values: tuple[int, ...]

    def __post_init__(self):
        if any(v <= 0 for v in self.values):
            raise ValueError("generators must be strictly positive")

    def subset_sum(self, alpha: Sequence[int]) -> int:
        return sum(self.values[i - 1] for i in alpha)

    def is_super_increasing(self) -> bool:
        total = 0
        for v in self.values:
            if v <= total:
                return False
            total += v
        return True


@dataclass(frozen=True)
class IpsFamily:
    generators: IpGenerators
    shifts: tuple[int, ...]  # shift applied at stage t uses shifts[t-1]

    def __post_init__(self):
        if any(s < 0 for s in self.shifts):
            raise ValueError("shifts must be non-negative")


def finite_sums(gen: IpGenerators, depth: int, budget: int = 1 << 20) -> list[int]:
    """Sorted deduplicated sums over nonempty subsets of the first ``depth``
    generators."""
    if depth > len(gen.values):
        raise ValueError("depth exceeds the generator list")
    if 2**depth > budget:
        raise EnumerationBudget(f"2^{depth} subset sums exceed the budget")
    sums = {0}
    for v in gen.values[:depth]:
        sums |= {s + v for s in sums}
    sums.discard(0)
    # 0 can reappear only from empty subsets; generators are positive
    return sorted(sums)


def shifted_finite_sums(fam: IpsFamily, depth: int,
                        budget: int = 1 << 20) -> list[tuple[int, tuple[int, ...], int]]:
    """All (t, alpha, n_alpha + N_t) with t <= depth and nonempty alpha in [t]."""
    if depth > len(fam.generators.values) or depth > len(fam.shifts):
        raise ValueError("depth exceeds the family data")
    out = []
    total = 0
    for t in range(1, depth + 1):
        total += 2**t - 1
        if total > budget:
            raise EnumerationBudget("shifted-sum enumeration exceeds the budget")
        shift = fam.shifts[t - 1]
        for size in range(1, t + 1):
            for alpha in combinations(range(1, t + 1), size):
                out.append((t, alpha, fam.generators.subset_sum(alpha) + shift))
    return out


@dataclass
class FsCheck:
    ok: bool
    depth: int
    first_failure: Optional[tuple[int, ...]]
    failure_value: Optional[int]


def contains_fs(pred: Callable[[int], int], gen: IpGenerators, depth: int,
                budget: int = 1 << 20) -> FsCheck:
    """Check pred(n_alpha) = 1 for every nonempty alpha within depth."""
    if depth > len(gen.values):
        raise ValueError("depth exceeds the generator list")
    if 2**depth > budget:
        raise EnumerationBudget(f"2^{depth} subset sums exceed the budget")
    for size in range(1, depth + 1):
        for alpha in combinations(range(1, depth + 1), size):
            v = gen.subset_sum(alpha)
            if pred(v) != 1:
                return FsCheck(False, depth, alpha, v)
    return FsCheck(True, depth, None, None)


def contains_shifted_fs(pred: Callable[[int], int], fam: IpsFamily,
                        depth: int) -> FsCheck:
    for t, alpha, v in shifted_finite_sums(fam, depth):
        if pred(v) != 1:
            return FsCheck(False, depth, alpha, v)
    return FsCheck(True, depth, None, None)


@dataclass
class ObstructionReport:
    confirmed: bool
    modulus: int
    horizon: int
    witness_multiple: Optional[int]


def divisibility_obstruction(pred: Callable[[int], int], k: int, t: int,
                             horizon: int = 1 << 20) -> ObstructionReport:
    """Certify (up to the horizon) that pred's support avoids k^t multiples.

    Any family of finite sums contains a multiple of k^t (partial sums of
    the generators repeat mod k^t, so a consecutive-block sum is divisible),
    so an empty intersection obstructs every finite-sums family inside the
    support below the horizon.
    """
    modulus = k**t
    for m in range(modulus, horizon, modulus):
        if pred(m) == 1:
            return ObstructionReport(False, modulus, horizon, m)
    return ObstructionReport(True, modulus, horizon, None)


def geometric_generators(ratio: int, first: int, count: int) -> IpGenerators:
    """Generators first * ratio^i, i = 0..count-1 (super-increasing for ratio >= 2)."""
    vals = []
    v = first
    for _ in range(count):
        vals.append(v)
        v *= ratio
    return IpGenerators(tuple(vals))
