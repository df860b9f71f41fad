from hypothesis import given, strategies as st

from nilseq.digits import DigitWord, from_digits, to_digits, to_digits_lsd


def test_zero_is_empty_word():
    assert to_digits(0, 2) == ()
    assert DigitWord.of(0, 7).digits == ()


def test_known_expansions():
    assert to_digits(11, 2) == (1, 0, 1, 1)
    assert to_digits_lsd(11, 2) == (1, 1, 0, 1)
    assert from_digits((1, 0, 1, 1), 2) == 11
    assert DigitWord.of(100, 10).digits == (1, 0, 0)


def test_leading_zeros_do_not_change_value():
    w = DigitWord(2, (0, 0, 1, 0, 1))
    assert w.value == 5


@given(st.integers(min_value=0, max_value=10**12),
       st.integers(min_value=2, max_value=12))
def test_roundtrip(n, base):
    digits = to_digits(n, base)
    assert from_digits(digits, base) == n
    if digits:
        assert digits[0] != 0
    assert all(0 <= d < base for d in digits)


@given(st.integers(min_value=0, max_value=10**9))
def test_reversal_view(n):
    w = DigitWord.of(n, 3)
    assert w.reversed().reversed() == w
    assert w.reversed_digits == tuple(reversed(w.digits))


def test_concat_and_repeat():
    a = DigitWord(2, (1, 0))
    b = DigitWord(2, (1,))
    assert (a + b).digits == (1, 0, 1)
    assert (a * 2).digits == (1, 0, 1, 0)


def test_parse_large_base():
    w = DigitWord.parse("10.0.3", 16)
    assert w.digits == (10, 0, 3)
    assert str(w) == "10.0.3"
