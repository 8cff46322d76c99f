"""Spectral sequence of the filtration by a dotted grading, over Z2 or Q.

Generators are totally ordered by decreasing filtration level, so each level
set F^p (grading >= p) is an initial segment and a subcomplex.  A persistence
style column reduction of each differential then pairs generators; a pair
whose levels differ by r is cancelled by d_r.  Hence E_r at (p, height)
counts unpaired generators there plus paired ones whose jump is at least r.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple

from .complex import GradedComplex, SparseMatrix
from .homology import HomologyTable

FIELDS = ("Z2", "Q", "Q(t=h=1)")


class FiltrationError(ValueError):
    pass


@dataclass
class FilteredComplex:
    complex: GradedComplex
    selector: str
    raw: List[List[int]]  # grading value per generator, by beta
    unit: int  # gcd of the positive jumps; levels are raw // unit
    levels: List[List[int]]

    def level_range(self) -> Tuple[int, int]:
        flat = [p for lv in self.levels for p in lv]
        return (min(flat), max(flat)) if flat else (0, 0)

    def level_count(self) -> int:
        return len({p for lv in self.levels for p in lv})


def default_selector(c: GradedComplex) -> str:
    """Khovanov uses the dotted part of gr (j is preserved there anyway); other theories use gr."""
    return "dotted" if c.theory == "khovanov" else "gr"


def _grading(c: GradedComplex, selector: str, beta: int, k: int) -> int:
    g = c.bases[beta][k]
    if selector == "gr":
        return g.gr2
    if selector == "dotted":
        return g.gr2 - g.quantum
    if selector.startswith("g_"):
        return g.g[c.sources.index(selector[2:])]
    raise ValueError(f"unknown filtration selector {selector!r}")


def build_filtration(c: GradedComplex, selector: Optional[str] = None) -> FilteredComplex:
    """Filtration levels from the chosen grading, after checking d never lowers it."""
    selector = selector or default_selector(c)
    if selector.startswith("g_") and selector[2:] not in c.sources:
        raise FiltrationError(f"{selector} is not an enabled dotting")
    raw = [[_grading(c, selector, beta, k) for k in range(len(b))] for beta, b in enumerate(c.bases)]
    unit = 0
    for beta, m in enumerate(c.matrices):
        for (r, col), _ in m.entries.items():
            jump = raw[beta + 1][r] - raw[beta][col]
            if jump < 0:
                g = c.bases[beta][col]
                raise FiltrationError(
                    f"differential lowers {selector} by {-jump} at height {c.height(beta)}, state {g.state}"
                )
            unit = gcd(unit, jump)
    unit = unit or 1
    levels = [[v // unit for v in row] for row in raw]
    return FilteredComplex(c, selector, raw, unit, levels)


@dataclass
class SpectralPages:
    field: str
    pages: List[Dict[Tuple[int, int], int]]  # pages[r][(p, height)] = dim E_r
    differential_ranks: List[Dict[Tuple[int, int], int]]  # rank of d_r out of (p, height)
    collapse: int
    infinity: Dict[Tuple[int, int], int]
    notes: List[str] = field(default_factory=list)

    def totals(self, r: Optional[int] = None) -> Dict[int, int]:
        page = self.infinity if r is None else self.page(r)
        out: Dict[int, int] = {}
        for (_, h), v in page.items():
            out[h] = out.get(h, 0) + v
        return {h: v for h, v in sorted(out.items()) if v}

    def page(self, r: int) -> Dict[Tuple[int, int], int]:
        return self.pages[min(r, len(self.pages) - 1)]

    def as_dict(self) -> dict:
        def grid(pg):
            return [{"p": p, "i": h, "dim": v} for (p, h), v in sorted(pg.items()) if v]

        return {
            "field": self.field,
            "collapse_page": self.collapse,
            "pages": [grid(pg) for pg in self.pages],
            "E_infinity": grid(self.infinity),
            "notes": list(self.notes),
        }


def _reduce_pairs(m: SparseMatrix, col_time: List[int], row_time: List[int], field_name: str):
    """Persistence pairs (row, col) of one differential in the given time orders."""
    zero2 = field_name == "Z2"
    cols: Dict[int, Dict[int, object]] = {}
    for (r, c), v in m.entries.items():
        cols.setdefault(c, {})[row_time[r]] = (v % 2) if zero2 else Fraction(v)
    by_time = {t: c for c, t in enumerate(col_time)}
    row_of = {t: r for r, t in enumerate(row_time)}
    low_owner: Dict[int, Dict[int, object]] = {}
    pairs = []
    for t in sorted(by_time):
        col = {k: v for k, v in cols.get(by_time[t], {}).items() if v}
        while col:
            low = max(col)
            other = low_owner.get(low)
            if other is None:
                low_owner[low] = col
                pairs.append((row_of[low], by_time[t]))
                break
            f = 1 if zero2 else col[low] / other[low]
            for k, v in other.items():
                nv = (col.get(k, 0) + v) % 2 if zero2 else col.get(k, 0) - f * v
                if nv:
                    col[k] = nv
                else:
                    col.pop(k, None)
    return pairs


def compute_pages(f: FilteredComplex, r_max: int = 64, field_name: Optional[str] = None) -> SpectralPages:
    """Pages E_0, E_1, ... up to collapse (or r_max), per filtration level and height."""
    c = f.complex
    field_name = field_name or c.spec.ring
    if field_name not in FIELDS:
        raise FiltrationError(f"spectral pages need a field, got {c.spec.ring}")
    nb = len(c.bases)
    times = []
    for beta in range(nb):
        order = sorted(range(len(c.bases[beta])), key=lambda k: (-f.levels[beta][k], k))
        t = [0] * len(order)
        for pos, k in enumerate(order):
            t[k] = pos
        times.append(t)
    partner_jump: List[Dict[int, int]] = [dict() for _ in range(nb)]
    sources: List[set] = [set() for _ in range(nb)]  # generators that are the column of a pair
    for beta, m in enumerate(c.matrices):
        for r, col in _reduce_pairs(m, times[beta], times[beta + 1], field_name):
            jump = f.levels[beta + 1][r] - f.levels[beta][col]
            partner_jump[beta][col] = jump
            partner_jump[beta + 1][r] = jump
            sources[beta].add(col)
    max_jump = max((j for pj in partner_jump for j in pj.values()), default=-1)
    # E_1 is the first page built from homology, so collapse is reported from page 1 on
    collapse = max(max_jump + 1, 1)
    last = min(collapse, r_max)
    pages: List[Dict[Tuple[int, int], int]] = []
    ranks: List[Dict[Tuple[int, int], int]] = []
    for r in range(last + 1):
        page: Dict[Tuple[int, int], int] = {}
        rk: Dict[Tuple[int, int], int] = {}
        for beta in range(nb):
            h = c.height(beta)
            for k, p in enumerate(f.levels[beta]):
                jump = partner_jump[beta].get(k)
                if jump is None or jump >= r:
                    page[(p, h)] = page.get((p, h), 0) + 1
                if jump == r and k in sources[beta]:
                    rk[(p, h)] = rk.get((p, h), 0) + 1
        pages.append(page)
        ranks.append(rk)
    infinity: Dict[Tuple[int, int], int] = {}
    for beta in range(nb):
        for k, p in enumerate(f.levels[beta]):
            if k not in partner_jump[beta]:
                key = (p, c.height(beta))
                infinity[key] = infinity.get(key, 0) + 1
    notes = []
    if collapse > r_max:
        notes.append(f"not collapsed by page {r_max}")
    return SpectralPages(field_name, pages, ranks, collapse, infinity, notes)


def certify_convergence(p: SpectralPages, h: HomologyTable) -> dict:
    """Compare total E_infinity per height with the homology of the full differential."""
    einf = p.totals()
    hom = h.by_height()
    heights = sorted(set(einf) | set(hom))
    mismatches = {i: {"E_infinity": einf.get(i, 0), "homology": hom.get(i, 0)} for i in heights if einf.get(i, 0) != hom.get(i, 0)}
    return {
        "ok": not mismatches,
        "collapse_page": p.collapse,
        "per_height": {i: einf.get(i, 0) for i in heights},
        "mismatches": mismatches,
    }
