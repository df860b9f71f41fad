"""Exact real constants and rigorous interval enclosures.

Two layers cooperate here:

* exact field elements (rationals, quadratic surds a + b*sqrt(d), rational
  combinations of distinct surds, and elements of a fixed cubic number
  field), with exact arithmetic, sign, and floor -- the fast path that
  decides integer-part operations without any precision ladder;

* ``IntervalValue`` enclosures with dyadic endpoints for everything else
  (pi, e, roots of higher degree, mixed-field products), refinable to any
  requested precision with nested (monotone) refinement.

Floors of interval values are resolved only when the enclosure excludes the
neighbouring integers; equality with an integer can never be proven by an
interval alone, which is why the exact layer exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath


class PrecisionExhausted(Exception):
    """An integer-part argument still straddles an integer at the maximum
    working precision.  Carries the offending description; never rounds."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


# ---------------------------------------------------------------------------
# dyadic helpers


def _sqrt_frac_below(x: Fraction, bits: int) -> Fraction:
    """Dyadic lower bound of sqrt(x), x >= 0, within 2^-bits."""
    if x < 0:
        raise ValueError("sqrt of negative value")
    p, q = x.numerator, x.denominator
    # sqrt(p/q) = sqrt(p*q)/q
    scaled = math.isqrt(p * q * (1 << (2 * bits)))
    return Fraction(scaled, q << bits)


def _sqrt_frac_above(x: Fraction, bits: int) -> Fraction:
    if x < 0:
        raise ValueError("sqrt of negative value")
    p, q = x.numerator, x.denominator
    s = p * q * (1 << (2 * bits))
    r = math.isqrt(s)
    if r * r < s:
        r += 1
    return Fraction(r, q << bits)


def _cmp_surd(r: Fraction, d: int, c: Fraction) -> int:
    """Exact sign of r*sqrt(d) - c for rational r, c and integer d >= 0."""
    if r == 0 or d == 0:
        return -1 if c > 0 else (1 if c < 0 else 0)
    if r > 0:
        if c < 0:
            return 1
        if c == 0:
            return 1
        lhs, rhs = r * r * d, c * c
        return (lhs > rhs) - (lhs < rhs)
    return -_cmp_surd(-r, d, -c)


def _squarefree(n: int) -> tuple[int, int]:
    """Write n = s^2 * m with m squarefree; returns (s, m)."""
    if n <= 0:
        raise ValueError("expected a positive integer")
    s, m, p = 1, n, 2
    while p * p <= m:
        if m % (p * p) == 0:
            while m % (p * p) == 0:
                m //= p * p
                s *= p
        p += 1
    return s, m


# ---------------------------------------------------------------------------
# interval values


@dataclass(frozen=True)
class IntervalValue:
    """Closed dyadic-rational enclosure [lower, upper] of a real number."""

    lower: Fraction
    upper: Fraction
    precision_bits: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("empty interval")

    @classmethod
    def exactly(cls, x, bits: int = 0) -> "IntervalValue":
        f = Fraction(x)
        return cls(f, f, bits)

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, x) -> bool:
        return self.lower <= x <= self.upper

    def __add__(self, other: "IntervalValue") -> "IntervalValue":
        return IntervalValue(self.lower + other.lower, self.upper + other.upper,
                             min(self.precision_bits, other.precision_bits))

    def __neg__(self) -> "IntervalValue":
        return IntervalValue(-self.upper, -self.lower, self.precision_bits)

    def __sub__(self, other: "IntervalValue") -> "IntervalValue":
        return self + (-other)

    def __mul__(self, other: "IntervalValue") -> "IntervalValue":
        products = (self.lower * other.lower, self.lower * other.upper,
                    self.upper * other.lower, self.upper * other.upper)
        return IntervalValue(min(products), max(products),
                             min(self.precision_bits, other.precision_bits))

    def intersect(self, other: "IntervalValue") -> "IntervalValue":
        return IntervalValue(max(self.lower, other.lower),
                             min(self.upper, other.upper),
                             max(self.precision_bits, other.precision_bits))

    def floor_resolved(self) -> Optional[int]:
        """The common floor of every point in the enclosure, if determined."""
        fl = self.lower.__floor__()
        fu = self.upper.__floor__()
        return fl if fl == fu else None

    def decide_lt(self, threshold) -> Optional[bool]:
        t = Fraction(threshold)
        if self.upper < t:
            return True
        if self.lower >= t:
            return False
        return None

    def sign(self) -> Optional[int]:
        if self.lower > 0:
            return 1
        if self.upper < 0:
            return -1
        if self.lower == 0 == self.upper:
            return 0
        return None

    def sqrt(self, bits: int) -> "IntervalValue":
        if self.upper < 0:
            raise ValueError("sqrt of a negative enclosure")
        lo = max(self.lower, Fraction(0))
        return IntervalValue(_sqrt_frac_below(lo, bits),
                             _sqrt_frac_above(self.upper, bits),
                             min(self.precision_bits, bits))

    def to_float(self) -> float:
        return float(self.midpoint())

    def nests_inside(self, other: "IntervalValue") -> bool:
        return other.lower <= self.lower and self.upper <= other.upper


# ---------------------------------------------------------------------------
# quadratic surds and surd sums


@dataclass(frozen=True)
class QuadElem:
    """a + b*sqrt(d) with rational a, b != 0 and squarefree d >= 2."""

    a: Fraction
    b: Fraction
    d: int

    def conj(self) -> "QuadElem":
        return QuadElem(self.a, -self.b, self.d)


@dataclass(frozen=True)
class SurdSum:
    """rat + sum coeff_i * sqrt(d_i) over distinct squarefree d_i >= 2.

    Closed under ring operations (sqrt(d) * sqrt(d') folds into
    sqrt(squarefree part of d d')); sign and floor are exact because 1 and
    the sqrt(d_i) are linearly independent over Q, so an element with any
    surviving surd term is irrational.
    """

    rat: Fraction
    terms: tuple[tuple[Fraction, int], ...]  # (coeff, d), d ascending


Exact = Union[Fraction, QuadElem, SurdSum, "CubicElem"]


def make_quad(a, b, d: int) -> Exact:
    """Normalized a + b*sqrt(d); collapses to Fraction when possible."""
    a, b = Fraction(a), Fraction(b)
    if b == 0:
        return a
    s, m = _squarefree(d)
    if m == 1:
        return a + b * s
    return QuadElem(a, b * s, m)


def _quad_floor(x: QuadElem) -> int:
    a, b, d = x.a, x.b, x.d
    q = math.lcm(a.denominator, b.denominator)
    big_p = a.numerator * (q // a.denominator)
    big_r = b.numerator * (q // b.denominator)
    # x = (big_p + big_r * sqrt(d)) / q
    if big_r >= 0:
        t = math.isqrt(big_r * big_r * d)
    else:
        s = big_r * big_r * d
        r0 = math.isqrt(s)
        t = -(r0 if r0 * r0 == s else r0 + 1)
    m = (big_p + t) // q
    while _cmp_surd(Fraction(big_r), d, Fraction(q * (m + 1) - big_p)) >= 0:
        m += 1
    while _cmp_surd(Fraction(big_r), d, Fraction(q * m - big_p)) < 0:
        m -= 1
    return m


def _sqrt_int_enclosure(d: int, bits: int) -> IntervalValue:
    lo = Fraction(math.isqrt(d << (2 * bits)), 1 << bits)
    hi = Fraction(math.isqrt(d << (2 * bits)) + 1, 1 << bits)
    return IntervalValue(lo, hi, bits)


def _quad_enclosure(x: QuadElem, bits: int) -> IntervalValue:
    root = _sqrt_int_enclosure(x.d, bits)
    return IntervalValue.exactly(x.a, bits) + IntervalValue.exactly(x.b, bits) * root


def _surdsum_of(x: Exact) -> Optional[SurdSum]:
    if isinstance(x, Fraction):
        return SurdSum(x, ())
    if isinstance(x, QuadElem):
        return SurdSum(x.a, ((x.b, x.d),))
    if isinstance(x, SurdSum):
        return x
    return None


def _surdsum_collapse(x: SurdSum) -> Exact:
    terms = tuple((c, d) for c, d in x.terms if c != 0)
    if not terms:
        return x.rat
    if len(terms) == 1:
        (c, d), = terms
        return QuadElem(x.rat, c, d)
    return SurdSum(x.rat, terms)


def _surdsum_add(x: SurdSum, y: SurdSum) -> Exact:
    coeffs: dict[int, Fraction] = {d: c for c, d in x.terms}
    for c, d in y.terms:
        coeffs[d] = coeffs.get(d, Fraction(0)) + c
    terms = tuple((coeffs[d], d) for d in sorted(coeffs))
    return _surdsum_collapse(SurdSum(x.rat + y.rat, terms))


def _surdsum_mul(x: SurdSum, y: SurdSum) -> Exact:
    rat = x.rat * y.rat
    coeffs: dict[int, Fraction] = {}

    def put(c: Fraction, d: int):
        nonlocal rat
        if d == 1:
            rat += c
        else:
            coeffs[d] = coeffs.get(d, Fraction(0)) + c

    for c, d in x.terms:
        put(c * y.rat, d)
    for c, d in y.terms:
        put(c * x.rat, d)
    for cx, dx in x.terms:
        for cy, dy in y.terms:
            s, m = _squarefree(dx * dy)
            put(cx * cy * s, m)
    terms = tuple((coeffs[d], d) for d in sorted(coeffs))
    return _surdsum_collapse(SurdSum(rat, terms))


def _surdsum_enclosure(x: SurdSum, bits: int) -> IntervalValue:
    acc = IntervalValue.exactly(x.rat, bits)
    for c, d in x.terms:
        acc = acc + IntervalValue.exactly(c, bits) * _sqrt_int_enclosure(d, bits)
    return acc


def _surdsum_floor(x: SurdSum) -> int:
    # a sum with surviving surd terms is irrational, so refinement resolves
    bits = 32
    while True:
        f = _surdsum_enclosure(x, bits).floor_resolved()
        if f is not None:
            return f
        bits *= 2


# ---------------------------------------------------------------------------
# cubic number fields


class CubicField:
    """Q(beta) for beta the designated real root of a monic integer cubic.

    The isolating interval certifies which root; bisection refines it with
    nested enclosures.  The polynomial must be irreducible over Q (no
    rational root), so nonconstant elements are irrational and signs and
    floors always resolve.
    """

    def __init__(self, coeffs: tuple[int, int, int, int], lo, hi):
        if coeffs[0] != 1:
            raise ValueError("minimal polynomial must be monic")
        self.coeffs = tuple(int(c) for c in coeffs)
        lo, hi = Fraction(lo), Fraction(hi)
        slo, shi = self._poly_sign(lo), self._poly_sign(hi)
        if slo == 0 or shi == 0 or slo == shi:
            raise ValueError("interval endpoints must straddle a simple root")
        self._lo, self._hi = lo, hi
        self._sign_lo = slo

    def _poly_sign(self, x: Fraction) -> int:
        c3, c2, c1, c0 = self.coeffs
        v = ((Fraction(c3) * x + c2) * x + c1) * x + c0
        return (v > 0) - (v < 0)

    def refine(self, bits: int) -> tuple[Fraction, Fraction]:
        target = Fraction(1, 1 << bits)
        while self._hi - self._lo > target:
            mid = (self._lo + self._hi) / 2
            sm = self._poly_sign(mid)
            if sm == 0:
                raise ValueError("rational root hit: polynomial is reducible")
            if sm == self._sign_lo:
                self._lo = mid
            else:
                self._hi = mid
        return self._lo, self._hi

    def root_enclosure(self, bits: int) -> IntervalValue:
        lo, hi = self.refine(bits)
        return IntervalValue(lo, hi, bits)

    def element(self, c0, c1=0, c2=0) -> "CubicElem":
        return CubicElem(self, (Fraction(c0), Fraction(c1), Fraction(c2)))

    @property
    def beta(self) -> "CubicElem":
        return self.element(0, 1, 0)

    def __eq__(self, other):
        return isinstance(other, CubicField) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)


@dataclass(frozen=True)
class CubicElem:
    field: CubicField
    c: tuple[Fraction, Fraction, Fraction]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.c)

    def is_rational(self) -> Optional[Fraction]:
        return self.c[0] if self.c[1] == 0 and self.c[2] == 0 else None


def _cubic_add(x: CubicElem, y: CubicElem) -> CubicElem:
    return CubicElem(x.field, tuple(a + b for a, b in zip(x.c, y.c)))


def _cubic_mul(x: CubicElem, y: CubicElem) -> CubicElem:
    _, c2, c1, c0 = x.field.coeffs
    # beta^3 = -c2 beta^2 - c1 beta - c0
    prod = [Fraction(0)] * 5
    for i, a in enumerate(x.c):
        if a == 0:
            continue
        for j, b in enumerate(y.c):
            prod[i + j] += a * b
    for deg in (4, 3):
        coef = prod[deg]
        if coef:
            prod[deg] = Fraction(0)
            prod[deg - 1] -= c2 * coef
            prod[deg - 2] -= c1 * coef
            prod[deg - 3] -= c0 * coef
    return CubicElem(x.field, (prod[0], prod[1], prod[2]))


def _cubic_scale(x: CubicElem, r: Fraction) -> CubicElem:
    return CubicElem(x.field, tuple(a * r for a in x.c))


def _cubic_enclosure(x: CubicElem, bits: int) -> IntervalValue:
    root = x.field.root_enclosure(bits)
    acc = IntervalValue.exactly(x.c[0], bits)
    if x.c[1]:
        acc = acc + IntervalValue.exactly(x.c[1], bits) * root
    if x.c[2]:
        acc = acc + IntervalValue.exactly(x.c[2], bits) * (root * root)
    return acc


def _cubic_sign(x: CubicElem) -> int:
    if x.is_zero():
        return 0
    r = x.is_rational()
    if r is not None:
        return (r > 0) - (r < 0)
    bits = 32
    while True:
        s = _cubic_enclosure(x, bits).sign()
        if s is not None:
            return s
        bits *= 2


def _cubic_floor(x: CubicElem) -> int:
    r = x.is_rational()
    if r is not None:
        return r.__floor__()
    # irrational (irreducible cubic), so the enclosure eventually resolves
    bits = 32
    while True:
        f = _cubic_enclosure(x, bits).floor_resolved()
        if f is not None:
            return f
        bits *= 2


# ---------------------------------------------------------------------------
# generic exact operations (None signals "leave the exact path")


def exact_add(x: Exact, y: Exact) -> Optional[Exact]:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x + y
    if isinstance(x, CubicElem) or isinstance(y, CubicElem):
        if isinstance(x, Fraction) and isinstance(y, CubicElem):
            x = y.field.element(x)
        if isinstance(y, Fraction) and isinstance(x, CubicElem):
            y = x.field.element(y)
        if (isinstance(x, CubicElem) and isinstance(y, CubicElem)
                and x.field == y.field):
            return _cubic_add(x, y)
        return None
    sx, sy = _surdsum_of(x), _surdsum_of(y)
    if sx is not None and sy is not None:
        return _surdsum_add(sx, sy)
    return None


def exact_neg(x: Exact) -> Exact:
    if isinstance(x, Fraction):
        return -x
    if isinstance(x, QuadElem):
        return QuadElem(-x.a, -x.b, x.d)
    if isinstance(x, SurdSum):
        return SurdSum(-x.rat, tuple((-c, d) for c, d in x.terms))
    if isinstance(x, CubicElem):
        return _cubic_scale(x, Fraction(-1))
    raise TypeError(type(x))


def exact_mul(x: Exact, y: Exact) -> Optional[Exact]:
    if isinstance(x, Fraction) and isinstance(y, Fraction):
        return x * y
    if isinstance(x, CubicElem) or isinstance(y, CubicElem):
        if isinstance(x, Fraction) and isinstance(y, CubicElem):
            return _cubic_scale(y, x)
        if isinstance(y, Fraction) and isinstance(x, CubicElem):
            return _cubic_scale(x, y)
        if (isinstance(x, CubicElem) and isinstance(y, CubicElem)
                and x.field == y.field):
            return _cubic_mul(x, y)
        return None
    sx, sy = _surdsum_of(x), _surdsum_of(y)
    if sx is not None and sy is not None:
        return _surdsum_mul(sx, sy)
    return None


def exact_floor(x: Exact) -> int:
    if isinstance(x, Fraction):
        return x.__floor__()
    if isinstance(x, QuadElem):
        return _quad_floor(x)
    if isinstance(x, SurdSum):
        return _surdsum_floor(x)
    if isinstance(x, CubicElem):
        return _cubic_floor(x)
    raise TypeError(type(x))


def exact_sign(x: Exact) -> int:
    if isinstance(x, Fraction):
        return (x > 0) - (x < 0)
    if isinstance(x, QuadElem):
        return _cmp_surd(x.b, x.d, -x.a)
    if isinstance(x, SurdSum):
        bits = 32
        while True:
            s = _surdsum_enclosure(x, bits).sign()
            if s is not None:
                return s
            bits *= 2
    if isinstance(x, CubicElem):
        return _cubic_sign(x)
    raise TypeError(type(x))


def exact_compare(x: Exact, y: Exact) -> Optional[int]:
    """Sign of x - y, or None when the difference leaves the exact layer."""
    diff = exact_add(x, exact_neg(y))
    if diff is None:
        return None
    return exact_sign(diff)


def exact_enclosure(x: Exact, bits: int) -> IntervalValue:
    if isinstance(x, Fraction):
        return IntervalValue.exactly(x, bits)
    if isinstance(x, QuadElem):
        return _quad_enclosure(x, bits)
    if isinstance(x, SurdSum):
        return _surdsum_enclosure(x, bits)
    if isinstance(x, CubicElem):
        return _cubic_enclosure(x, bits)
    raise TypeError(type(x))


def exact_is_integer(x: Exact) -> Optional[int]:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else None
    if isinstance(x, CubicElem):
        r = x.is_rational()
        if r is not None and r.denominator == 1:
            return r.numerator
    return None  # surviving surd/cubic parts are irrational


def exact_to_float(x: Exact) -> float:
    return exact_enclosure(x, 64).to_float()


# ---------------------------------------------------------------------------
# named constants and roots


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = mpmath.mpf(x)._mpf_
    man, exp = int(man), int(exp)  # the gmpy backend hands back mpz
    if man == 0:
        return Fraction(0)
    val = Fraction(man) * (Fraction(2) ** exp)
    return -val if sign else val


_named_cache: dict[tuple[str, int], IntervalValue] = {}


def _named_enclosure(name: str, bits: int) -> IntervalValue:
    key = (name, bits)
    if key not in _named_cache:
        old_prec = mpmath.iv.prec
        try:
            mpmath.iv.prec = bits + 16
            x = mpmath.iv.pi if name == "pi" else mpmath.iv.e
            lo = _mpf_to_fraction(x.a)
            hi = _mpf_to_fraction(x.b)
        finally:
            mpmath.iv.prec = old_prec
        # widen as a safety margin beyond the library's own outward rounding
        ulp = Fraction(1, 1 << (bits + 8))
        _named_cache[key] = IntervalValue(lo - ulp, hi + ulp, bits)
    return _named_cache[key]


class _BisectRoot:
    """Bisection enclosure of a designated simple root of an integer polynomial."""

    def __init__(self, coeffs, lo, hi):
        self.coeffs = [int(c) for c in coeffs]
        self.lo, self.hi = Fraction(lo), Fraction(hi)
        s_lo, s_hi = self._sign(self.lo), self._sign(self.hi)
        if s_lo == 0 or s_hi == 0 or s_lo == s_hi:
            raise ValueError("endpoints must straddle a simple root")
        self.sign_lo = s_lo

    def _sign(self, x: Fraction) -> int:
        v = Fraction(0)
        for c in self.coeffs:
            v = v * x + c
        return (v > 0) - (v < 0)

    def enclosure(self, bits: int) -> IntervalValue:
        target = Fraction(1, 1 << bits)
        while self.hi - self.lo > target:
            mid = (self.lo + self.hi) / 2
            sm = self._sign(mid)
            if sm == 0:
                raise ValueError("rational root hit; isolate a simple factor first")
            if sm == self.sign_lo:
                self.lo = mid
            else:
                self.hi = mid
        return IntervalValue(self.lo, self.hi, bits)


class ExactReal:
    """A refinable real constant: exact field element where available,
    otherwise a certified enclosure generator with nested refinement."""

    def __init__(self, kind: str, payload=None):
        self.kind = kind
        self.payload = payload
        self._cached: Optional[IntervalValue] = None

    # -- constructors -------------------------------------------------

    @classmethod
    def rational(cls, p, q=1) -> "ExactReal":
        return cls("exact", Fraction(p, q))

    @classmethod
    def from_exact(cls, value: Exact) -> "ExactReal":
        if isinstance(value, int):
            value = Fraction(value)
        return cls("exact", value)

    @classmethod
    def sqrt(cls, x) -> "ExactReal":
        f = Fraction(x)
        if f < 0:
            raise ValueError("sqrt of a negative constant")
        if f == 0:
            return cls.rational(0)
        return cls("exact", make_quad(0, Fraction(1, f.denominator),
                                      f.numerator * f.denominator))

    @classmethod
    def phi(cls) -> "ExactReal":
        return cls("exact", make_quad(Fraction(1, 2), Fraction(1, 2), 5))

    @classmethod
    def pi(cls) -> "ExactReal":
        return cls("pi")

    @classmethod
    def e(cls) -> "ExactReal":
        return cls("e")

    @classmethod
    def sqrt_of_exact(cls, value: Exact) -> "ExactReal":
        """sqrt of a nonnegative exact element, enclosure-backed."""
        if exact_sign(value) < 0:
            raise ValueError("sqrt of a negative element")
        return cls("sqrt_exact", value)

    @classmethod
    def algebraic_root(cls, coeffs, lo, hi) -> "ExactReal":
        """The unique root of the integer polynomial inside [lo, hi].

        Degrees 1-3 land on the exact layer; higher degrees refine by
        bisection only.
        """
        coeffs = [int(c) for c in coeffs]
        while coeffs and coeffs[0] == 0:
            coeffs = coeffs[1:]
        deg = len(coeffs) - 1
        lo, hi = Fraction(lo), Fraction(hi)
        if deg < 1:
            raise ValueError("constant polynomial has no designated root")
        if deg == 1:
            a, b = coeffs
            return cls.rational(-b, a)
        if deg == 2:
            a, b, c = coeffs
            disc = b * b - 4 * a * c
            if disc < 0:
                raise ValueError("no real roots")
            for sgn in (1, -1):
                root = exact_add(Fraction(-b, 2 * a),
                                 exact_mul(make_quad(0, sgn, disc) if disc > 0
                                           else Fraction(0), Fraction(1, 2 * a)))
                iv = exact_enclosure(root, 128)
                if lo <= iv.lower and iv.upper <= hi:
                    return cls("exact", root)
            raise ValueError("no root inside the isolating interval")
        if deg == 3 and coeffs[0] == 1:
            field = CubicField(tuple(coeffs), lo, hi)
            return cls("exact", field.beta)
        return cls("root", _BisectRoot(coeffs, lo, hi))

    # -- queries ------------------------------------------------------

    def exact(self) -> Optional[Exact]:
        return self.payload if self.kind == "exact" else None

    def enclosure(self, bits: int) -> IntervalValue:
        if self.kind == "exact":
            iv = exact_enclosure(self.payload, bits)
        elif self.kind in ("pi", "e"):
            iv = _named_enclosure(self.kind, bits)
        elif self.kind == "sqrt_exact":
            iv = exact_enclosure(self.payload, 2 * bits).sqrt(bits)
        elif self.kind == "root":
            iv = self.payload.enclosure(bits)
        else:
            raise ValueError(self.kind)
        if self._cached is not None:
            iv = iv.intersect(self._cached)
        self._cached = iv
        return iv

    def to_float(self) -> float:
        return self.enclosure(64).to_float()

    def __repr__(self):
        if self.kind == "exact":
            return f"ExactReal({self.payload!r})"
        return f"ExactReal<{self.kind}>"
