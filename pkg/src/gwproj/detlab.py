"""Executable checks of the determinant identities behind the linear systems.

* ``wtilde_entry``: closed-form entries of the row-normalized matrix.
* ``det_formula``: the closed value of its leading N x N minors.
* ``f_series`` / ``verify_lemma``: the generating-function lemma used to
  evaluate those minors.
* ``verify_det`` / ``verify_vw``: comparisons with the matrices assembled
  from genus-0 data by :class:`gwproj.virasoro.Engine`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from math import factorial, prod

from .kernel import Rat, Series, range_product, series_inv, series_mul, series_pow
from .linalg import Matrix, det
from .target import Context, delta, k_of_d, solve_unknown_slot

ZERO = Rat(0)
ONE = Rat(1)


@dataclass(frozen=True)
class WContext:
    ctx: Context

    @property
    def r(self) -> int:
        return self.ctx.r

    @property
    def delta(self) -> int:
        return delta(self.ctx)

    def k(self, d: int) -> int:
        return k_of_d(self.ctx, d)

    def slot(self, j: int):
        return solve_unknown_slot(self.ctx, j)

    def row_scale(self, d: int) -> Rat:
        """W = row_scale * W-tilde, row by row."""
        return -Rat(self.r + 1) ** (self.k(d) + 1)


def _power_linear(c, exponent: int, order: int) -> Series:
    return series_pow(Series.linear(c, order), exponent)


def wtilde_entry(w: WContext, d: int, j: int, order: int | None = None) -> Rat:
    """z^j coefficient of the normalized entry series for row d, column j."""
    order = j if order is None else order
    if order < j:
        raise ValueError("truncation order below the requested coefficient")
    r = w.r
    k = w.k(d)
    bj, ej = w.slot(j)
    shift = Rat(3 - r, 2 * r + 2)
    num = range_product(0, k, lambda i: Series.linear(shift + Rat(i, r + 1), order), order)
    den = _power_linear(d - ej, bj + 1, order)
    den = series_mul(den, range_product(0, d - ej - 1, lambda i: _power_linear(i, r + 1, order), order))
    return series_mul(num, series_inv(den))[j]


def w_entry(w: WContext, d: int, j: int) -> Rat:
    return w.row_scale(d) * wtilde_entry(w, d, j)


def det_formula(size: int, d_list) -> Rat:
    """prod_{i>j}(d_i - d_j) / prod_{i<N} i! * prod_{i<N} (i + 1/2)^(N-i)."""
    d_list = list(d_list)
    if size < 1 or len(d_list) != size:
        raise ValueError("need exactly N row degrees")
    if len(set(d_list)) != size:
        raise ValueError("row degrees must be distinct")
    vandermonde = prod(d_list[i] - d_list[j] for i in range(size) for j in range(i))
    out = Rat(vandermonde, prod(factorial(i) for i in range(1, size)))
    for i in range(1, size):
        out *= (Rat(2 * i + 1, 2)) ** (size - i)
    return out


def wtilde_minor(w: WContext, d_list) -> Rat:
    size = len(d_list)
    return det(Matrix.from_rows([[wtilde_entry(w, d, j) for j in range(size)] for d in d_list]))


# -- the generating-function lemma -------------------------------------------


@dataclass(frozen=True)
class TechParams:
    N: int
    n: int
    M: int
    q: Rat
    c: Rat
    a_list: tuple

    def __post_init__(self):
        if self.N < 0 or self.n < 1:
            raise ValueError("need N >= 0 and n >= 1")
        if len(self.a_list) != self.N + 1:
            raise ValueError("a_list must have N+1 entries")
        if len(set(self.a_list)) != len(self.a_list):
            raise ValueError("a_list entries must be distinct")
        object.__setattr__(self, "q", Rat(self.q))
        object.__setattr__(self, "c", Rat(self.c))
        object.__setattr__(self, "a_list", tuple(int(a) for a in self.a_list))

    def replace(self, **kw) -> "TechParams":
        data = dict(N=self.N, n=self.n, M=self.M, q=self.q, c=self.c, a_list=self.a_list)
        data.update(kw)
        return TechParams(**data)

    def __str__(self):
        return f"N={self.N} n={self.n} M={self.M} q={self.q} c={self.c} a={list(self.a_list)}"


def f_series(p: TechParams, order: int) -> Series:
    if order < p.N:
        raise ValueError("order must be at least N")
    total = Series([ZERO], order)
    for k, ak in enumerate(p.a_list):
        weight = ONE
        for i, ai in enumerate(p.a_list):
            if i != k:
                weight /= ak - ai
        s = range_product(p.M, p.n * ak, lambda i: Series.linear((p.c + i) / p.n, order), order)
        if ak:
            s = series_mul(s, series_pow(Series.linear(ak, order), p.q))
        s = series_mul(s, range_product(ak, -1, lambda i: _power_linear(i, p.n, order), order))
        total = total + s * weight
    return total


def lemma_leading(p: TechParams) -> Rat:
    """Closed form of the z^N coefficient."""
    out = ONE / factorial(p.N)
    for i in range(1, p.N + 1):
        out *= p.c + p.q - p.N + Rat(p.n + 1, 2) + i
    return out


@dataclass
class Report:
    lines: list = field(default_factory=list)
    passed: int = 0
    failed: int = 0

    def record(self, ok: bool, params: str, lhs, rhs) -> None:
        self.lines.append(f"{'PASS' if ok else 'FAIL'}  {params}  {lhs}  {rhs}")
        if ok:
            self.passed += 1
        else:
            self.failed += 1

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def summary(self) -> str:
        return f"{self.passed} passed, {self.failed} failed"

    def text(self) -> str:
        return "\n".join(self.lines + [self.summary()])


def random_tech_params(rng: random.Random) -> TechParams:
    size = rng.randint(0, 3)
    a_list = tuple(rng.sample(range(-4, 5), size + 1))
    q = Rat(rng.randint(-8, 8), rng.randint(1, 4))
    c = Rat(rng.randint(-8, 8), rng.randint(1, 4))
    return TechParams(size, rng.randint(1, 4), rng.randint(-2, 2), q, c, a_list)


def _finite_difference(values) -> Rat:
    vals = list(values)
    while len(vals) > 1:
        vals = [b - a for a, b in zip(vals, vals[1:])]
    return vals[0]


def check_lemma(p: TechParams, rng: random.Random, report: Report) -> None:
    size = p.N
    order = size + 2
    f = f_series(p, order)
    low = [f[i] for i in range(size)]
    report.record(all(v == 0 for v in low), f"vanish {p}", low, [0] * size)
    report.record(f[size] == lemma_leading(p), f"leading {p}", f[size], lemma_leading(p))
    other_m = p.M + rng.choice([-3, -1, 1, 2])
    other_a = tuple(rng.sample(range(-6, 7), size + 1))
    for label, alt in (("M", p.replace(M=other_m)), ("a_list", p.replace(a_list=other_a))):
        v = f_series(alt, size)[size]
        report.record(v == f[size], f"independent of {label} {alt}", v, f[size])
    perm = list(p.a_list)
    rng.shuffle(perm)
    g = f_series(p.replace(a_list=tuple(perm)), order)
    for i in (size + 1, size + 2):
        report.record(g[i] == f[i], f"symmetric z^{i} {p} perm={perm}", g[i], f[i])
    for i in (size + 1, size + 2):
        # coefficient of z^i has degree <= i - N in the a's
        steps = i - size + 1
        vals = [f_series(p.replace(a_list=tuple(a + t for a in p.a_list)), i)[i] for t in range(steps + 1)]
        diff = _finite_difference(vals)
        report.record(diff == 0, f"degree z^{i} {p}", diff, 0)


def verify_lemma(trials: int, seed: int) -> Report:
    rng = random.Random(seed)
    report = Report()
    for _ in range(trials):
        check_lemma(random_tech_params(rng), rng, report)
    return report


# -- comparisons with the assembled matrices ----------------------------------


def _engine(r: int, engine):
    if engine is None:
        from .virasoro import Engine

        engine = Engine(r)
    return engine


def v_minor(engine, ctx: Context, d_list) -> Rat:
    size = len(d_list)
    return det(Matrix.from_rows([[engine.v_entry(ctx, size, d, j) for j in range(size)] for d in d_list]))


def check_det(ctx: Context, d_list, report: Report, engine=None, with_v: bool = True,
              corrupt: bool = False) -> None:
    w = WContext(ctx)
    size = len(d_list)
    rows = [[wtilde_entry(w, d, j) for j in range(size)] for d in d_list]
    if corrupt:
        rows[0][0] += 1
    lhs = det(Matrix.from_rows(rows))
    rhs = det_formula(size, d_list)
    label = f"r={ctx.r} g={ctx.g} tail={list(ctx.tail)} N={size} rows={list(d_list)}"
    report.record(lhs == rhs, f"wtilde {label}", lhs, rhs)
    if with_v:
        engine = _engine(ctx.r, engine)
        v = v_minor(engine, ctx, d_list)
        scaled = prod((w.row_scale(d) for d in d_list), start=ONE) * rhs
        report.record(v == scaled, f"vminor {label}", v, scaled)


def random_tail(r: int, rng: random.Random, length: int = 2) -> tuple:
    return tuple((rng.randint(0, 2), rng.randint(0, r)) for _ in range(length))


def verify_det(r: int, size: int, trials: int, seed: int, genera=(1, 2), engine=None,
               with_v: bool | None = None) -> Report:
    """Random row sets for an empty and a random two-point tail in each genus."""
    rng = random.Random(seed)
    report = Report()
    if with_v is None:
        with_v = size <= 3
    engine = _engine(r, engine) if with_v else None
    for g in genera:
        for tail in ((), random_tail(r, rng)):
            ctx = Context(r, g, tail)
            start = delta(ctx)
            for _ in range(trials):
                d_list = rng.sample(range(start, start + size + 4), size)
                check_det(ctx, d_list, report, engine, with_v)
    return report


def verify_vw(r: int, size: int, genera=(1, 2), seed: int = 0, engine=None) -> Report:
    """Entrywise W = V^(j+1) and equality of the N x N minors of V^(N) and W."""
    rng = random.Random(seed)
    report = Report()
    engine = _engine(r, engine)
    for g in genera:
        for tail in ((), random_tail(r, rng)):
            ctx = Context(r, g, tail)
            w = WContext(ctx)
            start = delta(ctx)
            d_list = list(range(start, start + size))
            label = f"r={r} g={g} tail={list(ctx.tail)}"
            for d in range(start, start + size + 2):
                for j in range(size):
                    lhs = engine.v_entry(ctx, j + 1, d, j)
                    rhs = w_entry(w, d, j)
                    report.record(lhs == rhs, f"entry {label} d={d} j={j}", lhs, rhs)
            lhs = v_minor(engine, ctx, d_list)
            rhs = det(Matrix.from_rows([[w_entry(w, d, j) for j in range(size)] for d in d_list]))
            report.record(lhs == rhs, f"minor {label} N={size} rows={d_list}", lhs, rhs)
    return report
