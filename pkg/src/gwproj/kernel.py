"""Exact rationals and truncated power series in one variable ``z``.

``Rat`` is backed by :class:`gmpy2.mpq` when available and falls back to
:class:`fractions.Fraction`.  Both keep values in lowest terms with a positive
denominator.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable, Iterable

try:  # pragma: no cover - depends on the environment
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rat

__all__ = [
    "Rat",
    "to_rat",
    "format_rat",
    "parse_rat",
    "Series",
    "series_mul",
    "series_inv",
    "series_pow",
    "bracket",
    "range_product",
]

ZERO = Rat(0)
ONE = Rat(1)


def to_rat(x) -> Rat:
    if isinstance(x, str):
        return parse_rat(x)
    return Rat(x)


def format_rat(x) -> str:
    """``num/den``, or just ``num`` when the denominator is 1."""
    x = Rat(x)
    num, den = int(x.numerator), int(x.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def parse_rat(text: str) -> Rat:
    text = text.strip()
    num, sep, den = text.partition("/")
    try:
        n = int(num)
        d = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"malformed fraction {text!r}") from None
    if d == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Rat(n, d)


class Series:
    """A power series known up to and including ``z**order``."""

    __slots__ = ("order", "coeffs")

    def __init__(self, coeffs: Iterable, order: int | None = None):
        cs = [Rat(c) for c in coeffs]
        if order is None:
            order = len(cs) - 1
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        cs = cs[: order + 1]
        cs.extend([ZERO] * (order + 1 - len(cs)))
        self.order = order
        self.coeffs = tuple(cs)

    @classmethod
    def one(cls, order: int) -> "Series":
        return cls([ONE], order)

    @classmethod
    def linear(cls, c, order: int) -> "Series":
        """``1 + c*z``."""
        return cls([ONE, Rat(c)], order)

    def __getitem__(self, i: int) -> Rat:
        if i < 0:
            return ZERO
        if i > self.order:
            raise IndexError(f"coefficient z^{i} requested beyond truncation order {self.order}")
        return self.coeffs[i]

    def __eq__(self, other):
        if not isinstance(other, Series):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.order, self.coeffs))

    def __repr__(self):
        return f"Series({[str(c) for c in self.coeffs]}, order={self.order})"

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise ValueError("cannot raise the truncation order")
        return Series(self.coeffs, order)

    def __add__(self, other):
        if not isinstance(other, Series):
            other = Series([other], self.order)
        n = min(self.order, other.order)
        return Series([self.coeffs[i] + other.coeffs[i] for i in range(n + 1)], n)

    __radd__ = __add__

    def __neg__(self):
        return Series([-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Series) else -Rat(other))

    def __mul__(self, other):
        if isinstance(other, Series):
            return series_mul(self, other)
        c = Rat(other)
        return Series([c * x for x in self.coeffs], self.order)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        return series_pow(self, exponent)


def series_mul(a: Series, b: Series) -> Series:
    n = min(a.order, b.order)
    ac, bc = a.coeffs, b.coeffs
    out = []
    for k in range(n + 1):
        s = ZERO
        for i in range(k + 1):
            x = ac[i]
            if x:
                y = bc[k - i]
                if y:
                    s += x * y
        out.append(s)
    return Series(out, n)


def series_inv(a: Series) -> Series:
    a0 = a.coeffs[0]
    if not a0:
        raise ZeroDivisionError("not invertible as power series")
    inv0 = ONE / a0
    out = [inv0]
    for k in range(1, a.order + 1):
        s = ZERO
        for i in range(1, k + 1):
            x = a.coeffs[i]
            if x:
                s += x * out[k - i]
        out.append(-s * inv0)
    return Series(out, a.order)


def series_pow(a: Series, exponent) -> Series:
    """``a**exponent`` for a rational exponent; ``a`` must start with 1."""
    if a.coeffs[0] != 1:
        raise ValueError("series_pow needs constant term 1")
    alpha = Rat(exponent)
    out = [ONE]
    # b_n = 1/n * sum_{k=1..n} ((alpha + 1) k - n) a_k b_{n-k}
    for n in range(1, a.order + 1):
        s = ZERO
        for k in range(1, n + 1):
            x = a.coeffs[k]
            if x:
                s += ((alpha + 1) * k - n) * x * out[n - k]
        out.append(s / n)
    return Series(out, a.order)


@lru_cache(maxsize=None)
def _bracket_poly(x, k: int) -> tuple:
    poly = [ONE]
    for j in range(k + 1):
        c = x + j
        nxt = [ZERO] * (len(poly) + 1)
        for i, p in enumerate(poly):
            nxt[i] += c * p
            nxt[i + 1] += p
        poly = nxt
    return tuple(poly)


def bracket(x, k: int, p: int) -> Rat:
    """z^p coefficient of prod_{j=0..k} (z + x + j); k >= -1."""
    if k < -1:
        raise ValueError("bracket needs k >= -1")
    if not 0 <= p <= k + 1:
        raise ValueError(f"bracket index p={p} outside 0..{k + 1}")
    return _bracket_poly(Rat(x), k)[p]


def range_product(lo: int, hi: int, factor: Callable[[int], Series], order: int) -> Series:
    """prod_{i=lo..hi} factor(i), read as prod_{i=hi+1..lo-1} factor(i)^-1 when lo > hi."""
    result = Series.one(order)
    if lo <= hi:
        for i in range(lo, hi + 1):
            result = series_mul(result, factor(i))
    else:
        for i in range(hi + 1, lo):
            result = series_mul(result, series_inv(factor(i)))
    return result

