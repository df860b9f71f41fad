"""Base-k digit words.

Canonical storage is most-significant-digit first; least-significant-first
views are explicit.  The expansion of 0 is the empty word.
"""

from __future__ import annotations

from dataclasses import dataclass


def to_digits(n: int, base: int) -> tuple[int, ...]:
    """Canonical MSD-first expansion of n >= 0 (empty for 0)."""
    if n < 0:
        raise ValueError("negative integers have no base-k expansion")
    digits = []
    while n:
        n, d = divmod(n, base)
        digits.append(d)
    return tuple(reversed(digits))


def to_digits_lsd(n: int, base: int) -> tuple[int, ...]:
    """Canonical LSD-first expansion of n >= 0 (empty for 0)."""
    return tuple(reversed(to_digits(n, base)))


def from_digits(digits, base: int) -> int:
    """Value of an MSD-first digit word."""
    n = 0
    for d in digits:
        if not 0 <= d < base:
            raise ValueError(f"digit {d} out of range for base {base}")
        n = n * base + d
    return n


def from_digits_lsd(digits, base: int) -> int:
    """Value of an LSD-first digit word."""
    return from_digits(reversed(tuple(digits)), base)


@dataclass(frozen=True)
class DigitWord:
    """A finite word over the digit alphabet {0, ..., base-1}.

    ``digits`` is MSD-first.  The word may carry leading zeros; ``value``
    ignores them.
    """

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        for d in self.digits:
            if not 0 <= d < self.base:
                raise ValueError(f"digit {d} out of range for base {self.base}")

    @classmethod
    def of(cls, n: int, base: int) -> "DigitWord":
        return cls(base, to_digits(n, base))

    @classmethod
    def parse(cls, text: str, base: int) -> "DigitWord":
        # digits separated by nothing (base <= 10) or by '.' for larger bases
        if "." in text:
            digits = tuple(int(t) for t in text.split(".") if t != "")
        else:
            digits = tuple(int(c) for c in text)
        return cls(base, digits)

    @property
    def value(self) -> int:
        return from_digits(self.digits, self.base)

    @property
    def reversed_digits(self) -> tuple[int, ...]:
        return tuple(reversed(self.digits))

    def reversed(self) -> "DigitWord":
        return DigitWord(self.base, self.reversed_digits)

    def __len__(self) -> int:
        return len(self.digits)

    def __add__(self, other: "DigitWord") -> "DigitWord":
        if self.base != other.base:
            raise ValueError("base mismatch")
        return DigitWord(self.base, self.digits + other.digits)

    def __mul__(self, times: int) -> "DigitWord":
        return DigitWord(self.base, self.digits * times)

    def __str__(self) -> str:
        if self.base <= 10:
            return "".join(str(d) for d in self.digits)
        return ".".join(str(d) for d in self.digits)
