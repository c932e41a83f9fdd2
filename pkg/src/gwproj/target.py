"""Cohomology of P^r and the degree/index bookkeeping of the recursion.

Classes are stored as codimension indices ``a`` (the class of a linear
subspace of codimension ``a``); the dual of ``a`` is ``r - a``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .kernel import Rat


def pairing(r: int, a: int, b: int) -> Rat:
    return Rat(1) if a + b == r else Rat(0)


def r_power(r: int, p: int, a: int):
    """Multiplication by c_1(P^r)^p in the T_a basis: ((r+1)^p, a+p) or (0, None)."""
    if a + p <= r:
        return Rat((r + 1) ** p), a + p
    return Rat(0), None


def check_class(r: int, a: int) -> None:
    if not 0 <= a <= r:
        raise ValueError(f"class index {a} outside 0..{r}")


def virtual_dimension(r: int, g: int, d: int, n: int) -> int:
    return (r + 1) * d + (r - 3) * (1 - g) + n


@dataclass(frozen=True)
class Context:
    """Genus ``g`` invariants of P^r with a fixed tail of insertions.

    The tail is the multiset tau_{m_2}(T_{a_2}) ... tau_{m_n}(T_{a_n}); the free
    insertion tau_j(T_b) varies along the family.
    """

    r: int
    g: int
    tail: tuple = ()
    n: int = field(init=False)
    weight: int = field(init=False)

    def __post_init__(self):
        if self.r < 1:
            raise ValueError("r must be at least 1")
        tail = tuple(sorted((int(m), int(a)) for m, a in self.tail))
        for m, a in tail:
            check_class(self.r, a)
            if m < 0:
                raise ValueError("tail insertions need m >= 0")
        object.__setattr__(self, "tail", tail)
        object.__setattr__(self, "n", 1 + len(tail))
        object.__setattr__(self, "weight", sum(m + a for m, a in tail))

    def tail_counter(self) -> Counter:
        return Counter(self.tail)


def solve_unknown_slot(ctx: Context, j: int):
    """(b_j, e_j) with (r+1) e_j + (r-3)(1-g) + n = j + b_j + S and 0 <= b_j <= r."""
    r1 = ctx.r + 1
    rhs = j + ctx.weight - (ctx.r - 3) * (1 - ctx.g) - ctx.n
    # (r+1) e - b = rhs with 0 <= b <= r
    e = -((-rhs) // r1)
    b = r1 * e - rhs
    return b, e


def k_of_d(ctx: Context, d: int) -> int:
    return d * (ctx.r + 1) + (ctx.r - 3) * (1 - ctx.g) + ctx.n - 1 - ctx.weight


def delta(ctx: Context) -> int:
    k0 = k_of_d(ctx, 0)
    if k0 >= 1:
        return 0
    return -((k0 - 1) // (ctx.r + 1))
