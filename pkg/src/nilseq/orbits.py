"""Skew-torus orbits and the explicit Heisenberg nilmanifold.

Coordinates are carried as exact field elements wherever the inputs allow
(quadratic surds and their sums, one cubic field) and as interval
enclosures otherwise; fractional parts always go through a decided floor,
so a hit/miss verdict is never the artifact of rounding.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

from .digits import DigitWord
from .exactreal import (
    Exact,
    ExactReal,
    IntervalValue,
    PrecisionExhausted,
    exact_add,
    exact_compare,
    exact_enclosure,
    exact_floor,
    exact_mul,
    exact_neg,
    exact_sign,
)

Value = Union[Exact, IntervalValue]


class _NeedsBits(Exception):
    pass


def _as_value(x, bits: int) -> Value:
    if isinstance(x, ExactReal):
        ex = x.exact()
        return ex if ex is not None else x.enclosure(bits)
    if isinstance(x, int):
        return Fraction(x)
    return x


def _to_iv(x: Value, bits: int) -> IntervalValue:
    if isinstance(x, IntervalValue):
        return x
    return exact_enclosure(x, bits)


def _vadd(x: Value, y: Value, bits: int) -> Value:
    if not isinstance(x, IntervalValue) and not isinstance(y, IntervalValue):
        s = exact_add(x, y)
        if s is not None:
            return s
    return _to_iv(x, bits) + _to_iv(y, bits)


def _vmul(x: Value, y: Value, bits: int) -> Value:
    if not isinstance(x, IntervalValue) and not isinstance(y, IntervalValue):
        p = exact_mul(x, y)
        if p is not None:
            return p
    return _to_iv(x, bits) * _to_iv(y, bits)


def _vfloor(x: Value) -> int:
    if isinstance(x, IntervalValue):
        f = x.floor_resolved()
        if f is None:
            raise _NeedsBits()
        return f
    return exact_floor(x)


def _vfrac(x: Value, bits: int) -> Value:
    return _vadd(x, Fraction(-_vfloor(x)), bits)


def _vnearest(x: Value, bits: int) -> int:
    return _vfloor(_vadd(x, Fraction(1, 2), bits))


def _vdist_to_int(x: Value, bits: int) -> Value:
    m = _vnearest(x, bits)
    y = _vadd(x, Fraction(-m), bits)
    if isinstance(y, IntervalValue):
        lo, hi = y.lower, y.upper
        if lo >= 0:
            return y
        if hi <= 0:
            return -y
        return IntervalValue(Fraction(0), max(-lo, hi), y.precision_bits)
    return y if exact_sign(y) >= 0 else exact_neg(y)


def _max_bits() -> int:
    env = os.environ.get("NILSEQ_MAX_BITS")
    return int(env) if env else 4096


def _with_bits(fn, start_bits: int = 64, max_bits: Optional[int] = None):
    bits = start_bits
    if max_bits is None:
        max_bits = _max_bits()
    while True:
        try:
            return fn(bits)
        except _NeedsBits:
            if bits >= max_bits:
                raise PrecisionExhausted(
                    f"orbit computation unresolved at {max_bits} bits")
            bits *= 2


# ---------------------------------------------------------------------------
# skew torus


@dataclass
class TorusSkewSystem:
    """Skew product on [0,1)^d: (x1, ..., xd) -> (x1 + a_d, x2 + x1 + a_{d-1},
    ..., xd + x_{d-1} + a_1), encoding floor(p(n)) via the last coordinate.

    ``coeffs`` are a_1..a_d from the binomial expansion p(x)/m = sum a_i
    C(x, i); ``a0`` is the constant term (the base point is (0,...,0,{a0})).
    """

    coeffs: tuple  # a_1 .. a_d, exact values or ExactReal
    a0: object = 0

    @property
    def d(self) -> int:
        return len(self.coeffs)

    @classmethod
    def from_poly(cls, poly_coeffs: Sequence, m: int) -> "TorusSkewSystem":
        """Binomial-basis coefficients of p(x)/m by exact finite differences."""
        coeffs = [exact_mul(_as_value(c, 64), Fraction(1, m))
                  for c in poly_coeffs]
        if any(c is None or isinstance(c, IntervalValue) for c in coeffs):
            raise ValueError("from_poly needs exact coefficients in one field")
        deg = len(coeffs) - 1

        def p_at(x: int):
            acc = Fraction(0)
            for c in reversed(coeffs):
                acc = exact_add(exact_mul(acc, Fraction(x)), c)
            return acc

        values = [p_at(j) for j in range(deg + 1)]
        a = []
        for i in range(deg + 1):
            acc = Fraction(0)
            for j in range(i + 1):
                term = exact_mul(values[j],
                                 Fraction((-1) ** (i - j) * math.comb(i, j)))
                acc = exact_add(acc, term)
            a.append(acc)
        return cls(tuple(a[1:]), a[0])

    def base_point(self) -> tuple:
        return tuple([Fraction(0)] * (self.d - 1) + [self.a0])

    def step(self, point: tuple, bits: int = 64) -> tuple:
        vals = [_as_value(x, bits) for x in point]
        coeffs = [_as_value(c, bits) for c in self.coeffs]
        out = []
        for j in range(self.d):
            acc = vals[j]
            if j > 0:
                acc = _vadd(acc, vals[j - 1], bits)
            acc = _vadd(acc, coeffs[self.d - 1 - j], bits)
            out.append(_vfrac(acc, bits))
        return tuple(out)

    def iterate(self, z0: tuple, n: int, bits: int = 64) -> tuple:
        point = tuple(_vfrac(_as_value(x, bits), bits) for x in z0)
        for _ in range(n):
            point = self.step(point, bits)
        return point

    def closed_form(self, z0: tuple, n: int, bits: int = 64) -> tuple:
        """(T^n z)_j = z_j + sum_{k<j} C(n, j-k) z_k + sum_i a_{d-j+i} C(n,i),
        reduced mod 1."""
        vals = [_as_value(x, bits) for x in z0]
        coeffs = [_as_value(c, bits) for c in self.coeffs]
        out = []
        for j in range(1, self.d + 1):
            acc = vals[j - 1]
            for k in range(1, j):
                acc = _vadd(acc, _vmul(vals[k - 1],
                                       Fraction(math.comb(n, j - k)), bits), bits)
            for i in range(1, j + 1):
                acc = _vadd(acc, _vmul(coeffs[self.d - j + i - 1],
                                       Fraction(math.comb(n, i)), bits), bits)
            out.append(_vfrac(acc, bits))
        return tuple(out)


def skew_orbit_point(sys: TorusSkewSystem, z0: Optional[tuple], n: int,
                     check_iterate_up_to: int = 0,
                     start_bits: int = 64) -> tuple:
    """Closed-form orbit point; optionally cross-checked against n-fold
    iteration (the two reduce to the same exact values)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    z0 = sys.base_point() if z0 is None else z0

    def run(bits):
        pt = sys.closed_form(z0, n, bits)
        if n <= check_iterate_up_to:
            it = sys.iterate(z0, n, bits)
            for a, b in zip(pt, it):
                if not values_agree(a, b):
                    raise AssertionError("closed form disagrees with iteration")
        return pt

    return _with_bits(run, start_bits)


def values_agree(a: Value, b: Value, tol: Fraction = Fraction(1, 1 << 40)) -> bool:
    if not isinstance(a, IntervalValue) and not isinstance(b, IntervalValue):
        return exact_compare(a, b) == 0
    ia, ib = _to_iv(a, 64), _to_iv(b, 64)
    return not (ia.upper + tol < ib.lower or ib.upper + tol < ia.lower)


def residue_indicator(sys: TorusSkewSystem, z0: Optional[tuple], m: int,
                      r: int, n: int, start_bits: int = 64) -> int:
    """1 iff the last orbit coordinate lies in [r/m, (r+1)/m); equals
    floor(p(n)) = r (mod m) for the representing system."""
    if not 0 <= r < m:
        raise ValueError("need 0 <= r < m")
    point = skew_orbit_point(sys, z0, n, start_bits=start_bits)
    last = point[-1]

    def decide(bits):
        v = _vmul(last, Fraction(m), bits)
        return 1 if _vfloor(v) == r else 0

    return _with_bits(decide, start_bits)


# ---------------------------------------------------------------------------
# Heisenberg nilmanifold


def heis_mul(g1: tuple, g2: tuple, bits: int = 64) -> tuple:
    """[x1,y1,z1][x2,y2,z2] = [x1+x2, y1+y2, z1+z2+x1*y2]."""
    x1, y1, z1 = g1
    x2, y2, z2 = g2
    return (_vadd(x1, x2, bits), _vadd(y1, y2, bits),
            _vadd(_vadd(z1, z2, bits), _vmul(x1, y2, bits), bits))


@dataclass(frozen=True)
class HeisenbergState:
    """Upper-unitriangular group element [x, y, z] with lattice reduction."""

    x: object
    y: object
    z: object

    def coords(self) -> tuple:
        return (self.x, self.y, self.z)

    def __mul__(self, other: "HeisenbergState") -> "HeisenbergState":
        return HeisenbergState(*heis_mul(self.coords(), other.coords()))

    def reduced(self) -> tuple["HeisenbergState", tuple[int, int, int]]:
        """Fractional representative in [0,1)^3 and the integer part record."""
        rep, gamma = heis_reduce(self.coords())
        return HeisenbergState(*rep), gamma


def heis_reduce(g: tuple, bits: int = 64) -> tuple[tuple, tuple[int, int, int]]:
    """Fractional representative {g} with all matrix coordinates in [0,1)
    and the integer lattice element gamma with {g} = g * gamma."""
    x, y, z = g
    p = -_vfloor(x)
    q = -_vfloor(y)
    x2 = _vadd(x, Fraction(p), bits)
    y2 = _vadd(y, Fraction(q), bits)
    z_shift = _vadd(z, _vmul(x, Fraction(q), bits), bits)
    r = -_vfloor(z_shift)
    z2 = _vadd(z_shift, Fraction(r), bits)
    return (x2, y2, z2), (p, q, r)


def heisenberg_fracpart(alpha, beta, n: int, start_bits: int = 64,
                        cross_check: bool = True) -> tuple:
    """Fractional part of g(n) = [-n alpha, n beta, 0].

    Computed both by the closed form [{-n alpha}, {n beta},
    {n alpha floor(n beta)}] and by explicit lattice reduction of the group
    element; the two must resolve identically.
    """
    if n < 0:
        raise ValueError("n must be non-negative")

    def run(bits):
        a = _as_value(alpha, bits)
        b = _as_value(beta, bits)
        na = _vmul(a, Fraction(n), bits)
        nb = _vmul(b, Fraction(n), bits)
        f1 = _vfrac(_vmul(na, Fraction(-1), bits), bits)
        f2 = _vfrac(nb, bits)
        f3 = _vfrac(_vmul(na, Fraction(_vfloor(nb)), bits), bits)
        closed = (f1, f2, f3)
        if cross_check:
            g = (_vmul(na, Fraction(-1), bits), nb, Fraction(0))
            reduced, _ = heis_reduce(g, bits)
            for u, v in zip(closed, reduced):
                if not values_agree(u, v):
                    raise AssertionError(
                        "closed-form and lattice-reduced fractional parts differ")
        return closed

    return _with_bits(run, start_bits)


# ---------------------------------------------------------------------------
# epsilon schedules and scans


@dataclass(frozen=True)
class EpsilonSchedule:
    """eps(n) = c * n^(-gamma) with rational c >= 0, gamma >= 0 (gamma = 0
    gives the constant schedule)."""

    c: Fraction
    gamma: Fraction = Fraction(0)

    def __post_init__(self):
        if self.c < 0 or self.gamma < 0:
            raise ValueError("schedule must be non-negative and non-increasing")

    @classmethod
    def constant(cls, c) -> "EpsilonSchedule":
        return cls(Fraction(c), Fraction(0))

    @classmethod
    def parse(cls, text: str) -> "EpsilonSchedule":
        text = text.strip().replace(" ", "")
        if "*n^-" in text:
            c_str, g_str = text.split("*n^-")
            return cls(Fraction(c_str), Fraction(g_str))
        return cls.constant(Fraction(text))

    def value_float(self, n: int) -> float:
        return float(self.c) * n ** (-float(self.gamma)) if n > 0 else float(self.c)

    def describe(self) -> str:
        if self.gamma == 0:
            return str(self.c)
        return f"{self.c}*n^-{self.gamma}"


def dist_lt_eps(dist: Value, n: int, eps: EpsilonSchedule, bits: int = 96) -> bool:
    """Exact strict comparison ||..|| < c * n^(-p/q): both sides nonnegative,
    so it squares to dist^q * n^p < c^q."""
    if eps.c == 0:
        return False
    p, q = eps.gamma.numerator, eps.gamma.denominator
    if not isinstance(dist, IntervalValue):
        lhs = dist
        for _ in range(q - 1):
            lhs = exact_mul(lhs, dist)
        lhs = exact_mul(lhs, Fraction(n**p))
        return exact_compare(lhs, eps.c**q) < 0
    iv = dist
    lhs = iv
    for _ in range(q - 1):
        lhs = lhs * iv
    lhs = lhs * IntervalValue.exactly(Fraction(n**p), bits)
    verdict = lhs.decide_lt(eps.c**q)
    if verdict is None:
        raise PrecisionExhausted("epsilon comparison unresolved")
    return verdict


@dataclass
class HitCertificate:
    n: int
    dist_enclosure: IntervalValue
    eps_description: str
    eps_float: float


def suffix_hit_scan(alpha, beta, eps: EpsilonSchedule, base: int,
                    suffix: DigitWord, n_max: int,
                    start_bits: int = 64) -> Optional[HitCertificate]:
    """First n <= n_max whose base-k expansion ends with the suffix and with
    ||n alpha floor(n beta)|| < eps(n); None when the scan is exhausted
    (a certificate only exists for hits)."""
    step = base ** len(suffix)
    first = suffix.value
    if first == 0 and len(suffix) > 0:
        first = step  # n = 0 has the empty expansion
    n = first if first > 0 else 1

    def dist_at(nn: int, bits: int):
        a = _as_value(alpha, bits)
        b = _as_value(beta, bits)
        nb = _vmul(b, Fraction(nn), bits)
        x = _vmul(_vmul(a, Fraction(nn), bits), Fraction(_vfloor(nb)), bits)
        return _vdist_to_int(x, bits)

    while n <= n_max:
        dist = _with_bits(lambda bits: dist_at(n, bits), start_bits)
        if dist_lt_eps(dist, n, eps):
            return HitCertificate(n, _to_iv(dist, 96),
                                  eps.describe(), eps.value_float(n))
        n += step if len(suffix) > 0 else 1
    return None


# ---------------------------------------------------------------------------
# horizontal characters


@dataclass
class ProbeReport:
    best: tuple[int, int]
    value: Optional[IntervalValue]
    degenerate: bool
    l_bound: int
    above_threshold: Optional[bool]


def horizontal_character_probe(alpha, beta, t: int, l_bound: int,
                               threshold: Optional[Fraction] = None,
                               base: int = 2) -> ProbeReport:
    """Brute-force min of ||k^t (l1 alpha + l2 beta)|| over 0 < max(|l1|,|l2|)
    <= l_bound; an exact zero (rational dependence) is reported as
    degenerate instead of a minimum."""
    if l_bound < 1:
        raise ValueError("l_bound must be >= 1")
    scale = Fraction(base**t)
    best_pair = None
    best_val: Optional[Value] = None

    def dist_for(l1: int, l2: int, bits: int):
        a = _as_value(alpha, bits)
        b = _as_value(beta, bits)
        comb = _vadd(_vmul(a, Fraction(l1), bits), _vmul(b, Fraction(l2), bits), bits)
        comb = _vmul(comb, scale, bits)
        return _vdist_to_int(comb, bits)

    for l1 in range(-l_bound, l_bound + 1):
        for l2 in range(-l_bound, l_bound + 1):
            if l1 == 0 and l2 == 0:
                continue
            val = _with_bits(lambda bits: dist_for(l1, l2, bits))
            if not isinstance(val, IntervalValue) and exact_sign(val) == 0:
                return ProbeReport((l1, l2), None, True, l_bound, None)
            if best_val is None or _value_lt(val, best_val):
                best_val = val
                best_pair = (l1, l2)
    enclosure = _to_iv(best_val, 96)
    above = None
    if threshold is not None:
        above = enclosure.lower > threshold
    return ProbeReport(best_pair, enclosure, False, l_bound, above)


def _value_lt(a: Value, b: Value) -> bool:
    if not isinstance(a, IntervalValue) and not isinstance(b, IntervalValue):
        return exact_compare(a, b) < 0
    bits = 96
    while bits <= 4096:
        ia, ib = _to_iv(a, bits), _to_iv(b, bits)
        if ia.upper < ib.lower:
            return True
        if ia.lower >= ib.upper:
            return False
        bits *= 2
    raise PrecisionExhausted("tie between probe values")


# ---------------------------------------------------------------------------
# densities along orbits


@dataclass
class OrbitDensityReport:
    n: int
    natural: float
    windows: list[tuple[int, float]]
    banach_max: float
    seed: int


def banach_density_scan(indicator: Callable[[int], int], n: int,
                        window_count: int = 6, seed: int = 20160517,
                        window_span: int = 1 << 20) -> OrbitDensityReport:
    """Windowed counting of an orbit-hit indicator (certificate-producing
    scans should be used for the heavy lifting; this is the density view)."""
    count = sum(1 for i in range(n) if indicator(i) == 1)
    rng = random.Random(seed)
    windows = []
    for _ in range(window_count):
        m0 = rng.randrange(window_span)
        c = sum(1 for i in range(m0, m0 + n) if indicator(i) == 1)
        windows.append((m0, c / n))
    return OrbitDensityReport(n, count / n, windows,
                              max(w for _, w in windows) if windows else 0.0,
                              seed)
