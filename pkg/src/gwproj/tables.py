"""Cell layouts of the reference tables and their evaluation."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .kernel import format_rat
from .virasoro import Engine

CLASS_NAMES = {2: "pt", 1: "H", 0: "1"}

# bounds that finish in minutes; larger ones need an explicit opt-in
DESK_BOUNDS = {"ch": (4, 3), "one-point": (2, 3), "p3": (3, 3)}


@dataclass(frozen=True)
class Cell:
    r: int
    g: int
    d: int
    column: str
    insertions: tuple | None  # None marks a dimension-impossible cell

    def label(self) -> str:
        return f"{self.column} d={self.d}" if self.column else f"d={self.d}"


def ch_cells(dmax: int, gmax: int) -> list:
    """Plane curves of genus g and degree d through 3d-1+g points."""
    return [Cell(2, g, d, "", ((0, 2),) * (3 * d - 1 + g)) for g in range(gmax + 1)
            for d in range(1, dmax + 1)]


def one_point_cells(dmax: int, gmax: int) -> list:
    """<tau_m(gamma)>_{g,d} on P^2 with m = 3d + g - deg(gamma)."""
    out = []
    for g in range(gmax + 1):
        for a in (2, 1, 0):
            for d in range(dmax + 1):
                m = 3 * d + g - a
                ins = ((m, a),) if m >= 0 and not (g == 0 and d == 0) else None
                out.append(Cell(2, g, d, CLASS_NAMES[a], ins))
    return out


def p3_cells(dmax: int, gmax: int) -> list:
    """<pt^{2d}>_{g,d} on P^3."""
    return [Cell(3, g, d, "", ((0, 3),) * (2 * d)) for g in range(gmax + 1)
            for d in range(1, dmax + 1)]


LAYOUTS = {"ch": ch_cells, "one-point": one_point_cells, "p3": p3_cells}


def evaluate(cells, engines: dict | None = None) -> list:
    """Values (or None for impossible cells) in the order of ``cells``."""
    engines = {} if engines is None else engines
    out = []
    for c in cells:
        if c.insertions is None:
            out.append(None)
            continue
        eng = engines.get(c.r)
        if eng is None:
            eng = engines[c.r] = Engine(c.r)
        out.append(eng.invariant(c.g, c.d, c.insertions))
    return out


_worker_engines: dict = {}


def _worker_init(cache_lines_by_r: dict) -> None:
    for r, cache in cache_lines_by_r.items():
        _worker_engines[r] = Engine(r, cache)


def _worker_cell(cell: Cell):
    value = evaluate([cell], _worker_engines)[0]
    eng = _worker_engines.get(cell.r)
    return value, (dict(eng.cache.inv), {k: v for k, v in eng.cache.aux.items() if not k.rest}) if eng else None


def evaluate_parallel(cells, engines: dict, jobs: int) -> list:
    """Like :func:`evaluate` with independent cells spread over processes.

    Worker caches are merged back into ``engines`` so the results can be saved.
    """
    if jobs <= 1:
        return evaluate(cells, engines)
    seed = {r: eng.cache for r, eng in engines.items()}
    with ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init, initargs=(seed,)) as pool:
        results = list(pool.map(_worker_cell, cells))
    values = []
    for cell, (value, tables) in zip(cells, results):
        values.append(value)
        if tables is None:
            continue
        eng = engines.get(cell.r)
        if eng is None:
            eng = engines[cell.r] = Engine(cell.r)
        inv, aux = tables
        for table in (inv, aux):
            for k, v in table.items():
                eng.cache.put(k, v)
    return values


def render_value(v) -> str:
    return "-" if v is None else format_rat(v)


def columns(cells) -> list:
    seen = []
    for c in cells:
        if c.label() not in seen:
            seen.append(c.label())
    return seen


def render_plain(cells, values) -> str:
    cols = columns(cells)
    genera = sorted({c.g for c in cells})
    grid = {(c.g, c.label()): render_value(v) for c, v in zip(cells, values)}
    rows = [["g"] + cols] + [[str(g)] + [grid[(g, col)] for col in cols] for g in genera]
    widths = [max(len(row[i]) for row in rows) for i in range(len(cols) + 1)]
    return "\n".join("  ".join(x.rjust(w) for x, w in zip(row, widths)).rstrip() for row in rows)


def records(cells, values) -> list:
    out = []
    for c, v in zip(cells, values):
        out.append({
            "r": c.r,
            "g": c.g,
            "d": c.d,
            "insertions": None if c.insertions is None else [f"{m}:{a}" for m, a in c.insertions],
            "value": None if v is None else format_rat(v),
        })
    return out
