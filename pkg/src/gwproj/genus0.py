"""Genus-0 descendant invariants of P^r.

Insertions are ``(m, a)`` pairs meaning tau_m(T_a).  Reduction order:

* degree 0: the multinomial formula;
* no descendants: WDVV reconstruction (:meth:`Genus0.primary`);
* one or two points: closed forms, or the divisor equation read backwards to
  reach three points;
* otherwise string, dilaton and divisor stripping, then the genus-0
  topological recursion relation, which lowers the total descendant index.
"""

from __future__ import annotations

from math import factorial

from .kernel import Rat, Series, series_mul, series_pow
from .multiset import add, canon, remove_one, splits

ZERO = Rat(0)
ONE = Rat(1)


def _shifted_power(shift: int, power: int, order: int) -> Series:
    """Expansion of (z + shift)^power around z = 0; shift != 0."""
    base = series_pow(Series.linear(Rat(1, shift), order), power)
    return base * (Rat(shift) ** power)


def one_point_descendant(r: int, d: int, a: int) -> Rat:
    """<tau_m(T^a)>_{0,d}: z^a coefficient of prod_{i=1..d} (z+i)^-(r+1).

    ``a`` indexes the dual class, so the insertion is T_{r-a} and
    m = (r+1) d - 2 + a.
    """
    if d < 1:
        raise ValueError("one-point closed form needs d >= 1")
    if not 0 <= a <= r:
        raise ValueError("class index out of range")
    s = Series.one(a)
    for i in range(1, d + 1):
        s = series_mul(s, _shifted_power(i, -(r + 1), a))
    return s[a]


def two_point_descendant(r: int, e: int, b: int, bj: int) -> Rat:
    """<tau_m(T_b) T^{bj}>_{0,e}.

    z^{r-b} coefficient of (z+e)^-(bj+1) prod_{i=1..e-1} (z+i)^-(r+1).
    """
    if e < 1:
        raise ValueError("degree-0 two-point is a convention value")
    if not (0 <= b <= r and 0 <= bj <= r):
        raise ValueError("class index out of range")
    order = r - b
    s = _shifted_power(e, -(bj + 1), order)
    for i in range(1, e):
        s = series_mul(s, _shifted_power(i, -(r + 1), order))
    return s[order]


def multinomial_degree0(ms) -> Rat:
    """(n-3 choose m_1..m_n) for non-negative m summing to n-3."""
    n = len(ms)
    if any(m < 0 for m in ms) or sum(ms) != n - 3:
        return ZERO
    v = factorial(n - 3)
    for m in ms:
        v //= factorial(m)
    return Rat(v)


class Genus0:
    """Memoized genus-0 invariants of P^r with all descendant indices >= 0."""

    def __init__(self, r: int, fast_paths: bool = True):
        if r < 1:
            raise ValueError("r must be at least 1")
        self.r = r
        self.fast_paths = fast_paths
        self._memo: dict = {}
        self._primary: dict = {}

    def dimension_ok(self, ins: tuple, d: int) -> bool:
        return sum(m + a for m, a in ins) == (self.r + 1) * d + self.r - 3 + len(ins)

    # -- primaries ---------------------------------------------------------

    def primary(self, classes, d: int) -> Rat:
        classes = tuple(sorted(classes))
        key = (classes, d)
        v = self._primary.get(key)
        if v is None:
            v = self._primary_uncached(classes, d)
            self._primary[key] = v
        return v

    def _primary_uncached(self, classes: tuple, d: int) -> Rat:
        r = self.r
        n = len(classes)
        if d < 0 or any(not 0 <= a <= r for a in classes):
            return ZERO
        if sum(classes) != (r + 1) * d + r - 3 + n:
            return ZERO
        if d == 0:
            return ONE if n == 3 else ZERO
        if n == 0:
            return ONE  # r = 1, d = 1: a single line
        if 0 in classes:
            return ZERO
        if 1 in classes:
            return d * self.primary(remove_one(classes, 1), d)
        if n <= 2:
            return ONE  # <pt pt>_{0,1}
        return self._wdvv(classes, d)

    def _wdvv(self, classes: tuple, d: int) -> Rat:
        # Split the smallest class as H * T_{aP-1} and compare the two
        # factorizations of the four-point WDVV relation on (H, T_{aP-1}, Q, R).
        r = self.r
        a_p = classes[0]
        rest = classes[1:]
        a_q = rest[-1]
        a_r = rest[-2]
        others = rest[:-2]
        lhs = ZERO
        rhs = ZERO
        for A, B, w in splits(others):
            s_a = sum(A)
            for d1 in range(d + 1):
                d2 = d - d1
                # first factor has |A| + 3 points
                dim1 = (r + 1) * d1 + r + len(A)
                e = dim1 - 1 - (a_p - 1) - s_a
                if 0 <= e <= r and not (d1 == 0 and not A):
                    f1 = self.primary(A + (1, a_p - 1, e), d1)
                    if f1:
                        lhs += w * f1 * self.primary(B + (r - e, a_q, a_r), d2)
                e = dim1 - 1 - a_q - s_a
                if 0 <= e <= r:
                    f1 = self.primary(A + (1, a_q, e), d1)
                    if f1:
                        rhs += w * f1 * self.primary(B + (r - e, a_p - 1, a_r), d2)
        return rhs - lhs

    # -- descendants -------------------------------------------------------

    def value(self, insertions, d: int) -> Rat:
        ins = canon(insertions)
        key = (ins, d)
        v = self._memo.get(key)
        if v is None:
            v = self._value_uncached(ins, d)
            self._memo[key] = v
        return v

    def _value_uncached(self, ins: tuple, d: int) -> Rat:
        r = self.r
        n = len(ins)
        if any(m < 0 for m, _ in ins):
            raise ValueError("genus-0 engine needs non-negative descendant indices")
        if d < 0 or any(not 0 <= a <= r for _, a in ins):
            return ZERO
        if not self.dimension_ok(ins, d):
            return ZERO
        if d == 0:
            if n < 3:
                return ZERO
            return multinomial_degree0([m for m, _ in ins])
        if all(m == 0 for m, _ in ins):
            return self.primary([a for _, a in ins], d)
        if self.fast_paths:
            if n == 1:
                return one_point_descendant(r, d, r - ins[0][1])
            if n == 2 and ins[0][0] == 0:
                return two_point_descendant(r, d, ins[1][1], r - ins[0][1])
        if n >= 3:
            if (0, 0) in ins:
                return self._string(remove_one(ins, (0, 0)), d)
            if (1, 0) in ins:
                return (n - 3) * self.value(remove_one(ins, (1, 0)), d)
            if (0, 1) in ins:
                rest = remove_one(ins, (0, 1))
                if len(rest) >= 3 or all(m == 0 for m, _ in rest):
                    return self._divisor(rest, d)
            return self._trr(ins, d)
        # one or two points with a descendant: read the divisor equation backwards
        total = self.value(add(ins, (0, 1)), d)
        for i, (m, a) in enumerate(ins):
            if m >= 1 and a < r:
                total -= self.value(ins[:i] + ((m - 1, a + 1),) + ins[i + 1:], d)
        return total / d

    def _string(self, rest: tuple, d: int) -> Rat:
        total = ZERO
        for i, (m, a) in enumerate(rest):
            if m >= 1:
                total += self.value(rest[:i] + ((m - 1, a),) + rest[i + 1:], d)
        return total

    def _divisor(self, rest: tuple, d: int) -> Rat:
        total = d * self.value(rest, d)
        for i, (m, a) in enumerate(rest):
            if m >= 1 and a < self.r:
                total += self.value(rest[:i] + ((m - 1, a + 1),) + rest[i + 1:], d)
        return total

    def _trr(self, ins: tuple, d: int) -> Rat:
        r = self.r
        # descendant point with the largest index, then the two largest others
        p = max(ins)
        rest = remove_one(ins, p)
        p2, p3 = rest[-1], rest[-2]
        others = rest[:-2]
        lowered = (p[0] - 1, p[1])
        base_weight = lowered[0] + lowered[1]
        total = ZERO
        for A, B, w in splits(others):
            s_a = sum(m + a for m, a in A)
            for d1 in range(d + 1):
                if d1 == 0 and not A:
                    continue
                e = (r + 1) * d1 + r - 1 + len(A) - base_weight - s_a
                if not 0 <= e <= r:
                    continue
                f1 = self.value(A + (lowered, (0, e)), d1)
                if f1:
                    total += w * f1 * self.value(B + ((0, r - e), p2, p3), d - d1)
        return total
