"""Exact ranks over Z2 and Q, and Smith normal form over Z.

Matrices come in as ``{(row, col): value}`` dicts so that callers can hand
over blocks of a :class:`~khdot.complex.SparseMatrix` without copying.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Tuple

Entries = Mapping[Tuple[int, int], object]


def _rows(entries: Entries) -> Dict[int, Dict[int, object]]:
    rows: Dict[int, Dict[int, object]] = {}
    for (r, c), v in entries.items():
        rows.setdefault(r, {})[c] = v
    return rows


def rank_mod2(entries: Entries) -> int:
    """Rank over Z2, rows packed into Python ints."""
    basis: Dict[int, int] = {}  # leading bit -> row
    for row in _rows(entries).values():
        x = 0
        for c, v in row.items():
            if v % 2:
                x ^= 1 << c
        while x:
            top = x.bit_length() - 1
            if top in basis:
                x ^= basis[top]
            else:
                basis[top] = x
                break
    return len(basis)


def unit_reduce(entries: Entries) -> Tuple[int, Dict[int, Dict[int, int]]]:
    """Eliminate ±1 pivots over Z; returns (pivots used, remaining integer rows).

    A unit pivot splits off a 1 from the Smith form without touching the
    rest, so both the rank and the torsion of the core are those of the whole.
    Pivots are chosen greedily among short rows and short columns to keep fill-in low.
    """
    rows: Dict[int, Dict[int, int]] = {}
    for (r, c), v in entries.items():
        v = int(v)
        if v:
            rows.setdefault(r, {})[c] = v
    cols: Dict[int, set] = {}
    for r, row in rows.items():
        for c in row:
            cols.setdefault(c, set()).add(r)
    count = 0
    progress = True
    while progress:
        progress = False
        for r in sorted(rows, key=lambda x: len(rows[x])):
            row = rows.get(r)
            if row is None:
                continue
            units = [c for c, v in row.items() if v in (1, -1)]
            if not units:
                continue
            c = min(units, key=lambda x: len(cols[x]))
            pv = row[c]
            del rows[r]
            for k in row:
                cols[k].discard(r)
            for other in list(cols[c]):
                orow = rows[other]
                f = orow[c] * pv  # pv is its own inverse
                for k, v in row.items():
                    nv = orow.get(k, 0) - f * v
                    if nv:
                        if k not in orow:
                            cols.setdefault(k, set()).add(other)
                        orow[k] = nv
                    elif k in orow:
                        del orow[k]
                        cols[k].discard(other)
                if not orow:
                    del rows[other]
            count += 1
            progress = True
    return count, rows


def rank_rational(entries: Entries) -> int:
    """Rank over Q: unit pivots first, then exact elimination of the core."""
    count, core = unit_reduce(entries)
    return count + _rank_fraction(core)


def _rank_fraction(rows: Dict[int, Dict[int, object]]) -> int:
    pivots: Dict[int, Dict[int, Fraction]] = {}
    for row in rows.values():
        row = {c: Fraction(v) for c, v in row.items() if v}
        while row:
            c = min(row)
            p = pivots.get(c)
            if p is None:
                pivots[c] = row
                break
            f = row[c] / p[c]
            for k, v in p.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
    return len(pivots)


def rank_over(ring_name: str, entries: Entries) -> int:
    if ring_name == "Z2":
        return rank_mod2(entries)
    if ring_name in ("Q", "Q(t=h=1)", "Z"):
        # over Z the free rank equals the rational rank
        return rank_rational(entries)
    raise ValueError(f"no field rank over {ring_name}")


def smith_invariants(entries: Entries, nrows: int, ncols: int) -> List[int]:
    """Nonzero invariant factors d1 | d2 | ... of an integer matrix."""
    count, core = unit_reduce(entries)
    rindex = {r: i for i, r in enumerate(sorted(core))}
    cindex = {c: j for j, c in enumerate(sorted({c for row in core.values() for c in row}))}
    a = [[0] * len(cindex) for _ in range(len(rindex))]
    for r, row in core.items():
        for c, v in row.items():
            a[rindex[r]][cindex[c]] = v
    return [1] * count + sorted(smith_diagonal(a))


def smith_diagonal(a: List[List[int]]) -> List[int]:
    """Smith normal form diagonal of a dense integer matrix (modified in place)."""
    m = len(a)
    n = len(a[0]) if m else 0
    diag: List[int] = []
    t = 0
    while t < m and t < n:
        # smallest nonzero magnitude in the remaining block becomes the pivot
        best = None
        for i in range(t, m):
            row = a[i]
            for j in range(t, n):
                v = row[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for row in a:
            row[t], row[j] = row[j], row[t]
        while True:
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // p
                    if q:
                        ri, rt = a[i], a[t]
                        for k in range(t, n):
                            ri[k] -= q * rt[k]
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // p
                    if q:
                        for row in a[t:]:
                            row[j] -= q * row[t]
                    if a[t][j]:
                        dirty = True
            if not dirty:
                # the pivot must divide the whole remaining block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if a[i][j] % p:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                rt, rb = a[t], a[bad]
                for k in range(t, n):
                    rt[k] += rb[k]
                continue
            # move the smallest remaining entry of row/column t into the pivot
            best = (abs(a[t][t]), t, t)
            for i in range(t + 1, m):
                if a[i][t] and abs(a[i][t]) < best[0]:
                    best = (abs(a[i][t]), i, t)
            for j in range(t + 1, n):
                if a[t][j] and abs(a[t][j]) < best[0]:
                    best = (abs(a[t][j]), t, j)
            _, i, j = best
            if i != t:
                a[t], a[i] = a[i], a[t]
            if j != t:
                for row in a:
                    row[t], row[j] = row[j], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def torsion_orders(invariants: Iterable[int]) -> List[int]:
    return [d for d in invariants if d > 1]
