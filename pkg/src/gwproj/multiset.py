"""Sorted-tuple multisets of insertions and their weighted splittings."""

from __future__ import annotations

from collections import Counter
from functools import lru_cache
from itertools import product
from math import comb


def canon(items) -> tuple:
    return tuple(sorted(items))


def remove_one(items: tuple, x) -> tuple:
    i = items.index(x)
    return items[:i] + items[i + 1:]


def add(items: tuple, *xs) -> tuple:
    return tuple(sorted(items + xs))


@lru_cache(maxsize=None)
def splits(items: tuple) -> tuple:
    """All (A, B, w) with A + B == items as multisets.

    ``w`` counts the ways to realize the split on labelled points, i.e. the
    product of binomials over repeated elements.
    """
    counts = sorted(Counter(items).items())
    out = []
    for choice in product(*(range(k + 1) for _, k in counts)):
        a, b, w = [], [], 1
        for (x, k), t in zip(counts, choice):
            a.extend([x] * t)
            b.extend([x] * (k - t))
            w *= comb(k, t)
        out.append((tuple(a), tuple(b), w))
    return tuple(out)
