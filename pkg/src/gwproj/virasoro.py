"""Higher-genus invariants from the Virasoro constraints plus the TRR.

For a context (genus g >= 1, tail T) the unknowns are
x_j = <tau_j(T_{b_j}) T>_{g,e_j}, j = 0..N-1 with N = 3g-1.  Each degree
d >= delta gives one linear equation: the (q^d t^T)-coefficient of the
Virasoro constraint with k = k(d).  Insertions with index >= N on the genus-g
factor that carries the whole tail are pushed back to the x_j by the genus-g
topological recursion relation, so every equation is affine in the x_j.

Degree-0 genus-0 invariants with fewer than three points and negative
descendant indices take their conventional values, which lets the whole
constraint be written as two kinds of terms: a genus g-1 term (``_term_loop``)
and a sum over splittings into two connected factors (``_term_split``).
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

from .genus0 import Genus0
from .kernel import Rat, bracket
from .linalg import LinearSystem, Matrix, solve
from .multiset import remove_one, splits
from .store import (
    Cache,
    InvKey,
    aux_value,
    convention_value,
)
from .target import Context, delta, k_of_d, solve_unknown_slot

ZERO = Rat(0)
ONE = Rat(1)
HALF = Rat(1, 2)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class AssemblyError(RuntimeError):
    """An internal invariant of the equation assembly was violated."""


class AffineForm:
    """constant + sum_j linear[j] * x_j."""

    __slots__ = ("constant", "linear")

    def __init__(self, constant=ZERO, linear: dict | None = None):
        self.constant = Rat(constant)
        self.linear = {j: Rat(c) for j, c in (linear or {}).items() if c}

    @classmethod
    def unknown(cls, j: int) -> "AffineForm":
        return cls(ZERO, {j: ONE})

    def is_constant(self) -> bool:
        return not self.linear

    def __eq__(self, other):
        if not isinstance(other, AffineForm):
            return NotImplemented
        return self.constant == other.constant and self.linear == other.linear

    def __repr__(self):
        return f"AffineForm({self.constant}, {self.linear})"

    def __add__(self, other: "AffineForm") -> "AffineForm":
        lin = dict(self.linear)
        for j, c in other.linear.items():
            lin[j] = lin.get(j, ZERO) + c
        return AffineForm(self.constant + other.constant, lin)

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        return self + other.scale(-1)

    def scale(self, c) -> "AffineForm":
        c = Rat(c)
        if not c:
            return AffineForm()
        return AffineForm(self.constant * c, {j: v * c for j, v in self.linear.items()})

    def __mul__(self, other):
        if not isinstance(other, AffineForm):
            return self.scale(other)
        if self.linear and other.linear:
            raise AssemblyError("nonlinearity: assembly bug")
        if self.linear:
            return self.scale(other.constant)
        return other.scale(self.constant)

    __rmul__ = __mul__

    def add_scaled(self, c, other: "AffineForm") -> None:
        """In-place ``self += c * other``."""
        if not c:
            return
        self.constant += c * other.constant
        for j, v in other.linear.items():
            s = self.linear.get(j, ZERO) + c * v
            if s:
                self.linear[j] = s
            else:
                self.linear.pop(j, None)


@dataclass
class EqRow:
    d: int
    coeffs: tuple
    rhs: Rat


@dataclass
class Stats:
    family_solves: int = 0
    equations: int = 0
    families: list = field(default_factory=list)


def _sign(m: int) -> int:
    return -1 if m % 2 else 1


class Engine:
    """Memoized resolver for invariants of P^r in every genus."""

    def __init__(self, r: int, cache: Cache | None = None, *, reductions: bool = True,
                 verify: bool = False):
        self.r = r
        self.cache = Cache() if cache is None else cache
        self.g0 = Genus0(r)
        self.reductions = reductions
        self.verify = verify
        self.stats = Stats()
        self._unknown_memo: dict = {}
        self._memo: dict = {}
        self._active: set = set()

    # -- front door --------------------------------------------------------

    def invariant(self, g: int, d: int, insertions) -> Rat:
        ins = tuple(sorted(insertions))
        raw = (g, d, ins)
        v = self._memo.get(raw)
        if v is None:
            v = self._resolve(InvKey(self.r, g, d, ins))
            self._memo[raw] = v
        return v

    def lookup(self, key: InvKey) -> Rat:
        if key.r != self.r:
            raise ValueError("key for a different target space")
        return self.invariant(key.g, key.d, tuple(map(tuple, key.insertions)))

    def _resolve(self, key: InvKey) -> Rat:
        v = convention_value(key)
        if v is not None:
            return v
        if any(not 0 <= i.a <= self.r for i in key.insertions):
            return ZERO
        if not self._dimension_ok(key):
            return ZERO
        if key.d < 0:
            return ZERO
        if key.g == 0:
            return self.g0.value(tuple(tuple(i) for i in key.insertions), key.d)
        v = self.cache.get(key)
        if v is None:
            v = self._lookup_higher(key)
            self.cache.put(key, v)
        return v

    def invariant_via(self, g: int, d: int, insertions, free) -> Rat:
        """Solve the family in which ``free`` is the varying point, bypassing the cache.

        All descendant indices must be below 3g-1.
        """
        ins = tuple(sorted(tuple(i) for i in insertions))
        free = tuple(free)
        if g < 1 or any(m >= 3 * g - 1 for m, _ in ins):
            raise ValueError("needs genus >= 1 and indices below 3g-1")
        ctx = Context(self.r, g, remove_one(ins, free))
        j, b = free
        if solve_unknown_slot(ctx, j) != (b, d):
            return ZERO
        return self.family_vector(ctx)[j]

    def aux(self, i: int, first, second: int, e: int, rest=()) -> Rat:
        return aux_value(self.r, i, first[0], first[1], second, e, tuple(sorted(rest)), self.cache, self.g0)

    def _dimension_ok(self, key: InvKey) -> bool:
        lhs = sum(i.m + i.a for i in key.insertions)
        return lhs == (self.r + 1) * key.d + (self.r - 3) * (1 - key.g) + key.n

    def _lookup_higher(self, key: InvKey) -> Rat:
        r, g, d = self.r, key.g, key.d
        ins = tuple(tuple(i) for i in key.insertions)
        n = len(ins)
        if n == 0:
            raise AssemblyError(f"invariant without insertions requested: {key}")
        if self.reductions and n >= 2:
            if (0, 0) in ins:
                rest = remove_one(ins, (0, 0))
                total = ZERO
                for i, (m, a) in enumerate(rest):
                    if m >= 1:
                        total += self.invariant(g, d, rest[:i] + ((m - 1, a),) + rest[i + 1:])
                return total
            if (1, 0) in ins:
                rest = remove_one(ins, (1, 0))
                return (2 * g - 2 + n - 1) * self.invariant(g, d, rest)
            if (0, 1) in ins:
                rest = remove_one(ins, (0, 1))
                total = d * self.invariant(g, d, rest)
                for i, (m, a) in enumerate(rest):
                    if m >= 1 and a < r:
                        total += self.invariant(g, d, rest[:i] + ((m - 1, a + 1),) + rest[i + 1:])
                return total
        big = 3 * g - 1
        top = max(ins)
        tail = remove_one(ins, top)
        if top[0] >= big:
            total = ZERO
            for coef, point, t2, e2 in self._trr_terms(g, top, tail, d, 0):
                if e2 >= 0:
                    total += coef * self.invariant(g, e2, (point,) + t2)
            return total
        ctx = Context(r, g, tail)
        j, b = top
        x = self.solve_family(ctx)
        bj, ej = solve_unknown_slot(ctx, j)
        if (bj, ej) != (b, d):
            raise AssemblyError(f"slot mismatch for {key}")
        return x[j]

    # -- TRR substitution --------------------------------------------------

    def _trr_terms(self, g: int, point, tail: tuple, e: int, min_e: int):
        """Terms of the genus-g TRR for <tau_M(T_c) tail>_{g,e}, M >= 3g-1.

        Yields (coefficient, genus-g point, genus-g remaining tail, degree);
        the genus-g factor carries ``point`` plus the remaining tail.  Degrees
        of the genus-g factor run down to ``min_e`` (negative values are only
        meaningful for unknowns of the current family).
        """
        r = self.r
        big = 3 * g - 1
        mp, c = point[0] - big, point[1]
        for i in range(big):
            j = big - 1 - i
            for t1, t2, w in splits(tail):
                s1 = sum(m + a for m, a in t1)
                for e1 in range(0, e - min_e + 1):
                    a = (r + 1) * e1 + r - 1 + len(t1) - mp - i - c - s1
                    if not 0 <= a <= r:
                        continue
                    coef = self.aux(i, (mp, c), a, e1, t1)
                    if coef:
                        yield w * coef, (j, r - a), t2, e - e1

    def lookup_unknown(self, ctx: Context, m: int, b: int, e: int) -> AffineForm:
        """<tau_m(T_b) tail>_{g,e} as an affine form in the family unknowns."""
        if m < 0:
            return AffineForm()
        memo_key = (ctx, m)
        form = self._unknown_memo.get(memo_key)
        if form is not None:
            if form[0] != (b, e):
                raise AssemblyError("inconsistent unknown slot")
            return form[1]
        out = self._lookup_unknown_uncached(ctx, m, b, e)
        self._unknown_memo[memo_key] = ((b, e), out)
        return out

    def _lookup_unknown_uncached(self, ctx: Context, m: int, b: int, e: int) -> AffineForm:
        big = 3 * ctx.g - 1
        if solve_unknown_slot(ctx, m) != (b, e):
            raise AssemblyError(f"unknown query off the dimension condition: {ctx} {m} {b} {e}")
        if m < big:
            return AffineForm.unknown(m)
        min_e = min(0, min(solve_unknown_slot(ctx, j)[1] for j in range(big)))
        out = AffineForm()
        for coef, (j, bj), t2, e2 in self._trr_terms(ctx.g, (m, b), ctx.tail, e, min_e):
            if len(t2) == len(ctx.tail):
                if solve_unknown_slot(ctx, j) != (bj, e2):
                    raise AssemblyError("TRR landed off the family slots")
                out.add_scaled(coef, AffineForm.unknown(j))
            elif e2 >= 0:
                out.constant += coef * self.invariant(ctx.g, e2, ((j, bj),) + t2)
        return out

    # -- the Virasoro equation ----------------------------------------------

    def _coefficient(self, a: int, m: int, k: int, p: int) -> Rat:
        x = a + m + Rat(1 - self.r, 2)
        return _sign(m) * bracket(x, k, p) * Rat((self.r + 1) ** p)

    def virasoro_coefficient(self, ctx: Context, d: int, symmetrize: bool = True) -> AffineForm:
        """The degree-d equation of the family as a form that must vanish."""
        if ctx.g < 1:
            raise ValueError("Virasoro equations are used for genus >= 1 only")
        k = k_of_d(ctx, d)
        if k < 1:
            raise ValueError(f"k(d) = {k} < 1 for d = {d}")
        form = AffineForm()
        self._term_loop(ctx, d, k, form)
        self._term_split(ctx, d, k, form, symmetrize)
        self.stats.equations += 1
        return form

    def _term_loop(self, ctx: Context, d: int, k: int, form: AffineForm) -> None:
        r = self.r
        for p in range(k + 2):
            for a in range(r - p + 1):
                for m in range(p - k, 0):
                    c = self._coefficient(a, m, k, p)
                    if not c:
                        continue
                    v = self.invariant(ctx.g - 1, d, ((-m - 1, r - a), (k + m - p, a + p)) + ctx.tail)
                    form.constant += HALF * c * v

    def _term_split(self, ctx: Context, d: int, k: int, form: AffineForm, symmetrize: bool) -> None:
        r, g, tail = self.r, ctx.g, ctx.tail
        big = 3 * g - 1
        min_e = min(0, min(solve_unknown_slot(ctx, j)[1] for j in range(big)))
        if symmetrize:
            genera = [(h, ONE if 2 * h < g else HALF) for h in range(g // 2 + 1)]
        else:
            genera = [(h, HALF) for h in range(g + 1)]
        for h, hw in genera:
            for t1, t2, w in splits(tail):
                s1 = sum(m + a for m, a in t1)
                left_unknown = h == g and not t2
                right_unknown = h == 0 and not t1
                lo = min_e if left_unknown else 0
                hi = d - min_e if right_unknown else d
                for d1 in range(lo, hi + 1):
                    d2 = d - d1
                    for p in range(k + 2):
                        for a in range(r - p + 1):
                            # first factor <tau_{-m-1}(T_{r-a}) t1>_{h,d1}: m by dimension
                            m = (r - a) + s1 - (r + 1) * d1 - (r - 3) * (1 - h) - 2 - len(t1)
                            c = self._coefficient(a, m, k, p)
                            if not c:
                                continue
                            c = c * hw * w
                            p1 = (-m - 1, r - a)
                            p2 = (k + m - p, a + p)
                            if right_unknown:
                                f1 = self.invariant(0, d1, (p1,))
                                if f1:
                                    form.add_scaled(c * f1, self.lookup_unknown(ctx, p2[0], p2[1], d2))
                            elif left_unknown:
                                f2 = self.invariant(0, d2, (p2,))
                                if f2:
                                    form.add_scaled(c * f2, self.lookup_unknown(ctx, p1[0], p1[1], d1))
                            else:
                                f1 = self.invariant(h, d1, (p1,) + t1)
                                if f1:
                                    f2 = self.invariant(g - h, d2, (p2,) + t2)
                                    form.constant += c * f1 * f2

    # -- closed-form matrix entries ------------------------------------------

    def v_entry(self, ctx: Context, size: int, d: int, j: int) -> Rat:
        """Coefficient of x_j in the degree-d equation, with TRR cut at ``size``."""
        r = self.r
        k = k_of_d(ctx, d)
        bj, ej = solve_unknown_slot(ctx, j)
        total = ZERO
        for e in range(ej, d + 1):
            dd = d - e
            for p in range(k + 2):
                for a in range(r - p + 1):
                    one = self.invariant(0, dd, (((r + 1) * dd - 2 + a, r - a),))
                    if not one:
                        continue
                    m_aux = (r + 1) * (e - ej) + j + bj - size - a - p
                    av = self.aux(size - 1 - j, (m_aux, a + p), r - bj, e - ej)
                    if not av:
                        continue
                    sign = _sign(1 - a - dd * (r + 1))
                    br = bracket(Rat(3 - r, 2) - dd * (r + 1), k, p)
                    total += sign * br * Rat((r + 1) ** p) * one * av
        return total

    # -- family solve --------------------------------------------------------

    def equation_rows(self, ctx: Context, rows) -> list:
        big = 3 * ctx.g - 1
        out = []
        for d in rows:
            form = self.virasoro_coefficient(ctx, d)
            coeffs = tuple(form.linear.get(j, ZERO) for j in range(big))
            if set(form.linear) - set(range(big)):
                raise AssemblyError("unknown index outside the family")
            if self.verify:
                expected = tuple(self.v_entry(ctx, big, d, j) for j in range(big))
                if coeffs != expected:
                    raise AssemblyError(f"row d={d} differs from the closed-form entries")
            out.append(EqRow(d, coeffs, -form.constant))
        return out

    def family_vector(self, ctx: Context, rows=None) -> tuple:
        """Solve the family from the given equation degrees (default delta..delta+N-1)."""
        big = 3 * ctx.g - 1
        if rows is None:
            start = delta(ctx)
            rows = range(start, start + big)
        rows = list(rows)
        if len(rows) != big or len(set(rows)) != big:
            raise ValueError(f"need {big} distinct equation degrees")
        eqs = self.equation_rows(ctx, rows)
        system = LinearSystem(Matrix.from_rows([e.coeffs for e in eqs]), tuple(e.rhs for e in eqs))
        return tuple(solve(system))

    def solve_family(self, ctx: Context, rows=None) -> tuple:
        if ctx.g < 1:
            raise ValueError("families are for genus >= 1")
        if ctx in self._active:
            raise AssemblyError(f"family {ctx} needed while being solved")
        self._active.add(ctx)
        try:
            x = self.family_vector(ctx, rows)
        finally:
            self._active.discard(ctx)
        self.stats.family_solves += 1
        self.stats.families.append(ctx)
        for j, v in enumerate(x):
            bj, ej = solve_unknown_slot(ctx, j)
            if ej < 0:
                if v:
                    raise AssemblyError(f"negative-degree unknown x_{j} = {v} is not zero")
                continue
            self.cache.put(InvKey(self.r, ctx.g, ej, ((j, bj),) + ctx.tail), v)
        return x
