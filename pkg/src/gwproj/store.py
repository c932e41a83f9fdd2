"""Invariant keys, unstable-range conventions, auxiliary correlators, cache.

Cache file format (UTF-8, one record per line)::

    r|g|d|m1:a1,m2:a2,...|num/den
    aux|r|i|m:a|b|e|num/den

Insertions are written in canonical (ascending) order and ``/den`` is dropped
when the denominator is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

from .genus0 import Genus0, multinomial_degree0
from .kernel import Rat, format_rat, parse_rat
from .multiset import splits
from .target import pairing

ZERO = Rat(0)
ONE = Rat(1)


class Insertion(NamedTuple):
    """tau_m(T_a); ``m`` may be negative inside convention-extended sums."""

    m: int
    a: int


def canonical(insertions) -> tuple:
    return tuple(sorted(Insertion(int(m), int(a)) for m, a in insertions))


@dataclass(frozen=True)
class InvKey:
    r: int
    g: int
    d: int
    insertions: tuple

    def __post_init__(self):
        object.__setattr__(self, "insertions", canonical(self.insertions))

    @property
    def n(self) -> int:
        return len(self.insertions)


@dataclass(frozen=True)
class AuxKey:
    """<tau_m(T_c) T_s rest>^i_e.

    ``rest`` carries extra insertions coming from the t-expansion; the
    two-entry shape is ``rest == ()``.
    """

    r: int
    i: int
    first: Insertion
    second: int
    e: int
    rest: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "first", Insertion(*self.first))
        object.__setattr__(self, "rest", canonical(self.rest))


def _general_binomial(n: int, k: int) -> Rat:
    if k < 0:
        return ZERO
    v = Rat(1)
    for i in range(k):
        v = v * (n - i) / (i + 1)
    return v


def degree0_formula(r: int, insertions) -> Rat:
    """Genus-0 degree-0 value (n-3 choose m_1..m_n) (prod of classes).

    For one and two points the multinomial is read with generalized binomials
    so that it covers the unstable virtual values.
    """
    ins = canonical(insertions)
    n = len(ins)
    ms = [i.m for i in ins]
    if sum(i.a for i in ins) != r or sum(ms) != n - 3:
        return ZERO
    if n == 1:
        return ONE
    if n == 2:
        k = max(ms)
        if min(ms) >= 0:
            return ZERO
        return _general_binomial(-1, k)
    return multinomial_degree0(ms)


def convention_value(key: InvKey):
    """Virtual value in the unstable or negative-index range, else None."""
    ins = key.insertions
    negative = any(i.m < 0 for i in ins)
    if key.g == 0 and key.d == 0 and key.n <= 2:
        if key.n == 1:
            (i,) = ins
            return ONE if (i.m == -2 and i.a == key.r) else ZERO
        if key.n == 2:
            (i1, i2) = ins
            if i1.m + i2.m != -1:
                return ZERO
            sign = -1 if max(i1.m, i2.m) % 2 else 1
            return sign * pairing(key.r, i1.a, i2.a)
        return ZERO
    if negative:
        return ZERO
    if key.g == 0 and key.d == 0:
        return degree0_formula(key.r, ins)
    return None


class CacheConflict(ValueError):
    pass


class CacheParseError(ValueError):
    pass


class Cache:
    """Invariant and auxiliary values; inserting a different value is an error."""

    def __init__(self):
        self.inv: dict = {}
        self.aux: dict = {}
        # aux values keyed by plain tuples, a fast path for the recursion
        self._aux_raw: dict = {}

    def __len__(self):
        return len(self.inv) + len(self.aux)

    def __eq__(self, other):
        if not isinstance(other, Cache):
            return NotImplemented
        return self.inv == other.inv and self.aux == other.aux

    def put(self, key, value) -> None:
        table = self.aux if isinstance(key, AuxKey) else self.inv
        value = Rat(value)
        old = table.get(key)
        if old is not None and old != value:
            raise CacheConflict(f"conflicting values for {key}: {old} vs {value}")
        table[key] = value
        if table is self.aux:
            self._aux_raw[_aux_raw_key(key)] = value

    def get(self, key):
        table = self.aux if isinstance(key, AuxKey) else self.inv
        return table.get(key)

    def merge(self, other: "Cache") -> None:
        for k, v in other.inv.items():
            self.put(k, v)
        for k, v in other.aux.items():
            self.put(k, v)


def _aux_raw_key(key: AuxKey) -> tuple:
    return (key.r, key.i, key.first[0], key.first[1], key.second, key.e, tuple(map(tuple, key.rest)))


def _fmt_ins(ins) -> str:
    return ",".join(f"{i.m}:{i.a}" for i in ins)


def _parse_ins(text: str) -> tuple:
    if not text:
        return ()
    out = []
    for tok in text.split(","):
        m, sep, a = tok.partition(":")
        if not sep:
            raise ValueError(f"bad insertion {tok!r}")
        out.append((int(m), int(a)))
    return tuple(out)


def cache_lines(cache: Cache):
    inv = sorted(cache.inv.items(), key=lambda kv: (kv[0].r, kv[0].g, kv[0].d, kv[0].insertions))
    for k, v in inv:
        yield f"{k.r}|{k.g}|{k.d}|{_fmt_ins(k.insertions)}|{format_rat(v)}"
    aux = sorted(
        ((k, v) for k, v in cache.aux.items() if not k.rest),
        key=lambda kv: (kv[0].r, kv[0].i, kv[0].first, kv[0].second, kv[0].e),
    )
    for k, v in aux:
        yield f"aux|{k.r}|{k.i}|{k.first.m}:{k.first.a}|{k.second}|{k.e}|{format_rat(v)}"


def cache_save(cache: Cache, destination) -> None:
    """Write invariants and two-entry auxiliary values; see module docstring."""
    text = "".join(line + "\n" for line in cache_lines(cache))
    Path(destination).write_text(text, encoding="utf-8", newline="\n")


def cache_load(source, into: Cache | None = None) -> Cache:
    cache = Cache() if into is None else into
    text = Path(source).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.split("\n"), 1):
        if not line.strip():
            continue
        fields = line.split("|")
        try:
            if fields[0] == "aux":
                if len(fields) != 7:
                    raise ValueError("expected 7 fields")
                _, r, i, first, b, e, val = fields
                (first_ins,) = _parse_ins(first)
                key = AuxKey(int(r), int(i), first_ins, int(b), int(e))
            else:
                if len(fields) != 5:
                    raise ValueError("expected 5 fields")
                r, g, d, ins, val = fields
                key = InvKey(int(r), int(g), int(d), _parse_ins(ins))
            value = parse_rat(val)
        except ValueError as exc:
            raise CacheParseError(f"line {lineno}: {exc}") from None
        cache.put(key, value)
    return cache


# -- genus-0 values with conventions and the auxiliary correlators ----------


def genus0_value(g0: Genus0, insertions, d: int) -> Rat:
    ins = tuple(sorted(insertions))
    if d == 0 or ins[0][0] < 0:
        v = convention_value(InvKey(g0.r, 0, d, ins))
        if v is not None:
            return v
    return g0.value(ins, d)


def aux(key: AuxKey, cache: Cache, g0: Genus0) -> Rat:
    """Level-i auxiliary correlator, from the recursion

    <tau_m(g1) g2>^i = <tau_{m+1}(g1) g2>^{i-1} - <tau_m(g1) T_a>_0 <T^a g2>^{i-1}

    with level 0 the genus-0 invariants (conventions included).  Extra
    insertions in ``rest`` are distributed over both factors.
    """
    return aux_value(key.r, key.i, key.first[0], key.first[1], key.second, key.e,
                     tuple(map(tuple, key.rest)), cache, g0)


def aux_value(r: int, i: int, m: int, c: int, s: int, e: int, rest: tuple, cache: Cache,
              g0: Genus0) -> Rat:
    """:func:`aux` on plain arguments; ``rest`` must be a sorted tuple of pairs."""
    raw = (r, i, m, c, s, e, rest)
    v = cache._aux_raw.get(raw)
    if v is None:
        v = _aux_uncached(r, i, m, c, s, e, rest, cache, g0)
        cache.put(AuxKey(r, i, (m, c), s, e, rest), v)
    return v


def _aux_uncached(r, i, m, c, s, e, rest, cache: Cache, g0: Genus0) -> Rat:
    if i < 0 or e < 0:
        return ZERO
    if m < 0:
        # the recursion shifts m up to -1, where the two terms cancel unless i
        # reaches 0 exactly; what is left is the degree-0 pairing
        if m == -i - 1 and not rest and e == 0:
            return pairing(r, c, s)
        return ZERO
    weight = m + i + c + s + sum(x + y for x, y in rest)
    if weight != (r + 1) * e + r - 1 + len(rest):
        return ZERO
    if i == 0:
        return genus0_value(g0, ((m, c), (0, s)) + rest, e)
    total = aux_value(r, i - 1, m + 1, c, s, e, rest, cache, g0)
    for r1, r2, w in splits(rest):
        s1 = sum(x + y for x, y in r1)
        for e1 in range(e + 1):
            a = (r + 1) * e1 + r - 1 + len(r1) - m - c - s1
            if not 0 <= a <= r:
                continue
            f = genus0_value(g0, ((m, c), (0, a)) + r1, e1)
            if f:
                total -= w * f * aux_value(r, i - 1, 0, r - a, s, e - e1, r2, cache, g0)
    return total
