"""Multigraded homology tables, Poincare polynomials and the bounds report.

The chain groups are cut into blocks by the gradings the chosen differential
preserves; each block is a small complex whose homology is computed by exact
elimination (fields) or Smith normal form (Z).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .bracket import kauffman_bracket
from .complex import GradedComplex, SparseMatrix
from .diagram import Diagram, atom_genus
from .linalg import rank_over, smith_invariants, torsion_orders
from .poly import LaurentPoly

FIELDS = ("Z2", "Q", "Q(t=h=1)")


class HomologyError(ValueError):
    pass


@dataclass
class HomologyTable:
    """Map from multidegree to (free rank, torsion orders)."""

    names: Tuple[str, ...]  # "i" first, then e.g. "j", "g_bars", "gr2"
    groups: Dict[Tuple[int, ...], Tuple[int, Tuple[int, ...]]]
    ring: str
    shift: Tuple[int, int] = (0, 0)
    audit: Dict[str, int] = field(default_factory=dict)

    def rank(self, **degree) -> int:
        """Total free rank over all groups matching the given coordinates."""
        total = 0
        for key, (r, _) in self.groups.items():
            coords = dict(zip(self.names, key))
            if all(coords.get(k) == v for k, v in degree.items()):
                total += r
        return total

    def torsion(self) -> Dict[Tuple[int, ...], Tuple[int, ...]]:
        return {k: t for k, (_, t) in self.groups.items() if t}

    def nonzero(self) -> List[Tuple[int, ...]]:
        return sorted(k for k, (r, t) in self.groups.items() if r or t)

    def by_height(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for key, (r, _) in self.groups.items():
            out[key[0]] = out.get(key[0], 0) + r
        return {i: r for i, r in sorted(out.items()) if r}

    def total_rank(self) -> int:
        return sum(r for r, _ in self.groups.values())

    def project(self, names: Sequence[str]) -> "HomologyTable":
        """Sum ranks over the coordinates not listed (torsion lists are concatenated)."""
        idx = [self.names.index(n) for n in names]
        groups: Dict[Tuple[int, ...], Tuple[int, Tuple[int, ...]]] = {}
        for key, (r, t) in self.groups.items():
            k2 = tuple(key[i] for i in idx)
            r0, t0 = groups.get(k2, (0, ()))
            groups[k2] = (r0 + r, tuple(sorted(t0 + t)))
        return HomologyTable(tuple(names), groups, self.ring, self.shift)

    def shifted(self, **delta: int) -> "HomologyTable":
        groups = {}
        for key, val in self.groups.items():
            groups[tuple(v + delta.get(n, 0) for n, v in zip(self.names, key))] = val
        return HomologyTable(self.names, groups, self.ring, self.shift)

    def as_dict(self) -> dict:
        rows = []
        for key in self.nonzero():
            r, t = self.groups[key]
            rows.append({"degree": dict(zip(self.names, key)), "rank": r, "torsion": list(t)})
        return {"ring": self.ring, "gradings": list(self.names), "groups": rows}

    def __eq__(self, other):
        if not isinstance(other, HomologyTable):
            return NotImplemented
        strip = lambda t: {k: v for k, v in t.groups.items() if v[0] or v[1]}
        return self.names == other.names and strip(self) == strip(other)

    def grid(self) -> str:
        """Human-readable rank grid in (i, j) when both coordinates exist."""
        if "j" not in self.names:
            return "\n".join(f"i={i}: {r}" for i, r in self.by_height().items())
        flat = self.project(("i", "j"))
        keys = flat.nonzero()
        if not keys:
            return "(zero)"
        iset = sorted({k[0] for k in keys})
        jset = sorted({k[1] for k in keys}, reverse=True)
        lines = ["j\\i " + " ".join(f"{i:>4}" for i in iset)]
        for j in jset:
            cells = []
            for i in iset:
                r, t = flat.groups.get((i, j), (0, ()))
                cell = (str(r) if r else "") + "".join(f"+T{x}" for x in t)
                cells.append(f"{cell or '.':>4}")
            lines.append(f"{j:>3} " + " ".join(cells))
        return "\n".join(lines)


def _block_names(c: GradedComplex, gradings: Optional[Sequence[str]]) -> Tuple[str, ...]:
    if gradings is None:
        gradings = c.preserved_by_full()
    return tuple("gr2" if g == "gr" else g for g in gradings)


def _coords(c: GradedComplex, beta: int, k: int, names: Sequence[str]) -> Tuple[int, ...]:
    g = c.bases[beta][k]
    out = []
    for n in names:
        if n == "j":
            out.append(g.quantum)
        elif n == "gr2":
            out.append(g.gr2)
        elif n.startswith("g_"):
            out.append(g.g[c.sources.index(n[2:])])
        else:
            raise ValueError(f"unknown grading {n}")
    return tuple(out)


def _blocks(c: GradedComplex, matrices: Sequence[SparseMatrix], names: Tuple[str, ...]):
    """Per block key: generator indices per height and the restricted matrices."""
    members: Dict[Tuple[int, ...], List[List[int]]] = {}
    position: List[Dict[int, Tuple[Tuple[int, ...], int]]] = []
    nh = len(c.bases)
    for beta in range(nh):
        pos = {}
        for k in range(len(c.bases[beta])):
            key = _coords(c, beta, k, names)
            lists = members.setdefault(key, [[] for _ in range(nh)])
            pos[k] = (key, len(lists[beta]))
            lists[beta].append(k)
        position.append(pos)
    mats: Dict[Tuple[int, ...], List[Dict[Tuple[int, int], object]]] = {
        key: [dict() for _ in range(nh - 1)] for key in members
    }
    for beta, m in enumerate(matrices):
        for (r, col), v in m.entries.items():
            kc, ic = position[beta][col]
            kr, ir = position[beta + 1][r]
            if kc != kr:
                raise HomologyError(f"differential does not preserve gradings {names}")
            mats[kc][beta][(ir, ic)] = v
    return members, mats


def homology_field(
    c: GradedComplex,
    matrices: Optional[Sequence[SparseMatrix]] = None,
    gradings: Optional[Sequence[str]] = None,
    field_name: Optional[str] = None,
) -> HomologyTable:
    """Ranks of homology over a field, block by block.

    ``gradings`` lists the gradings that define blocks; by default those the
    full differential preserves.  Passing a split piece as ``matrices`` lets
    the caller compute, for instance, the homology of d' with all dotted
    gradings retained.  Over Z the rational ranks are returned when
    ``field_name='Q'`` is given explicitly.
    """
    ring = field_name or c.spec.ring
    if ring not in FIELDS and not (ring == "Q" and c.spec.ring == "Z"):
        raise HomologyError(f"homology_field needs a field, got {c.spec.ring}")
    if ring != "Z2" and c.spec.ring == "Z2":
        raise HomologyError("a Z2 complex has no rational reduction")
    if matrices is None:
        matrices = c.matrices
    names = _block_names(c, gradings)
    members, mats = _blocks(c, matrices, names)
    groups: Dict[Tuple[int, ...], Tuple[int, Tuple[int, ...]]] = {}
    chain_total = hom_total = rank_total = 0
    for key, lists in members.items():
        ranks = [rank_over(ring, m) if m else 0 for m in mats[key]]
        for beta, gens in enumerate(lists):
            dim = len(gens)
            if not dim:
                continue
            r_out = ranks[beta] if beta < len(ranks) else 0
            r_in = ranks[beta - 1] if beta > 0 else 0
            h = dim - r_out - r_in
            if h < 0:
                raise AssertionError("negative homology rank: d^2 != 0")
            chain_total += dim
            hom_total += h
            if h:
                groups[(c.height(beta),) + key] = (h, ())
        rank_total += sum(ranks)
    audit = {"chain_dim": chain_total, "homology_dim": hom_total, "matrix_rank": rank_total}
    if chain_total != hom_total + 2 * rank_total:
        raise AssertionError(f"rank-nullity audit failed: {audit}")
    return HomologyTable(("i",) + names, groups, ring, c.shift, audit)


def homology_integral(
    c: GradedComplex,
    matrices: Optional[Sequence[SparseMatrix]] = None,
    gradings: Optional[Sequence[str]] = None,
) -> HomologyTable:
    """Free ranks and torsion over Z from Smith normal forms of each block."""
    if c.spec.ring != "Z":
        raise HomologyError(f"homology_integral needs ring Z, got {c.spec.ring}")
    if matrices is None:
        matrices = c.matrices
    names = _block_names(c, gradings)
    members, mats = _blocks(c, matrices, names)
    groups: Dict[Tuple[int, ...], Tuple[int, Tuple[int, ...]]] = {}
    for key, lists in members.items():
        invs = []
        for beta, m in enumerate(mats[key]):
            invs.append(smith_invariants(m, len(lists[beta + 1]), len(lists[beta])) if m else [])
        for beta, gens in enumerate(lists):
            dim = len(gens)
            if not dim:
                continue
            r_out = len(invs[beta]) if beta < len(invs) else 0
            inc = invs[beta - 1] if beta > 0 else []
            free = dim - r_out - len(inc)
            tors = tuple(torsion_orders(inc))
            if free or tors:
                groups[(c.height(beta),) + key] = (free, tors)
    return HomologyTable(("i",) + names, groups, "Z", c.shift)


def poincare_polynomial(t: HomologyTable) -> LaurentPoly:
    """Sum of rank * T^i q^j prod g_r^(g_r) over the table (gr is not a variable)."""
    keep = [k for k, n in enumerate(t.names) if n != "gr2"]
    rename = {"i": "T", "j": "q"}
    vars = tuple(rename.get(n, n) for n in (t.names[k] for k in keep))
    terms: Dict[Tuple[int, ...], int] = {}
    for key, (r, _) in t.groups.items():
        if r:
            e = tuple(key[k] for k in keep)
            terms[e] = terms.get(e, 0) + r
    return LaurentPoly(vars, terms)


def diagonals(t: HomologyTable) -> List[int]:
    """Occupied values of j - 2i."""
    if "j" not in t.names:
        raise HomologyError("diagonals need a quantum grading")
    ji = t.names.index("j")
    return sorted({key[ji] - 2 * key[0] for key in t.nonzero()})


def thickness(t: HomologyTable):
    """Width of the band of slope-2 diagonals, in units of the classical spacing 2.

    On classical diagrams j - 2i has constant parity and this is the number of
    diagonals from the lowest to the highest occupied one.  Virtual diagrams mix
    parities, and the width may then be a half-integer.
    """
    ds = diagonals(t)
    if not ds:
        return 0
    w = Fraction(ds[-1] - ds[0], 2) + 1
    return int(w) if w.denominator == 1 else w


def half_integer_groups(t: HomologyTable, components: int) -> List[Tuple[int, ...]]:
    """Nonzero groups whose gr, measured against the component count, is a half-integer.

    With the normalisation used here j and the number of components have the
    same parity on classical diagrams, so gr2 - components is even there.
    """
    if "gr2" not in t.names:
        raise HomologyError("table carries no gr")
    k = t.names.index("gr2")
    return [key for key in t.nonzero() if (key[k] - components) % 2]


@dataclass
class BoundsReport:
    thickness: Optional[object]
    occupied_diagonals: Optional[int]
    genus: object
    thickness_ok: Optional[bool]
    bracket_span: int
    crossings: int
    span_ok: bool
    homological_length: int
    length_ok: bool
    obstruction: Optional[bool]
    grading_vectors: List[Tuple[int, ...]]

    @property
    def ok(self) -> bool:
        return bool(self.span_ok and self.length_ok and self.thickness_ok is not False)

    def as_dict(self) -> dict:
        g = self.genus
        return {
            "thickness": str(self.thickness) if isinstance(self.thickness, Fraction) else self.thickness,
            "occupied_diagonals": self.occupied_diagonals,
            "atom_genus": str(g) if isinstance(g, Fraction) else g,
            "thickness_ok": self.thickness_ok,
            "bracket_span": self.bracket_span,
            "crossings": self.crossings,
            "span_ok": self.span_ok,
            "homological_length": self.homological_length,
            "length_ok": self.length_ok,
            "destabilisation_obstructed": self.obstruction,
            "grading_vectors": [list(v) for v in self.grading_vectors],
        }


def _rational_rank(vectors: List[Tuple[int, ...]]) -> int:
    entries = {(r, c): v for r, vec in enumerate(vectors) for c, v in enumerate(vec) if v}
    return rank_over("Q", entries)


def report_bounds(t: HomologyTable, d: Diagram) -> BoundsReport:
    """Thickness against 2 + atom genus, bracket span against 4n, and the obstruction."""
    g = atom_genus(d)
    th = thickness(t) if "j" in t.names else None
    span = kauffman_bracket(d).span("a")
    heights = [k[0] for k in t.nonzero()]
    length = (max(heights) - min(heights)) if heights else 0
    gidx = [k for k, n in enumerate(t.names) if n.startswith("g_")]
    vectors = sorted({tuple(key[k] for k in gidx) for key in t.nonzero()}) if gidx else []
    obstruction = None
    if gidx:
        obstruction = _rational_rank(vectors) == len(gidx)
    return BoundsReport(
        thickness=th,
        occupied_diagonals=len(diagonals(t)) if "j" in t.names else None,
        genus=g,
        thickness_ok=None if th is None else th <= 2 + g,
        bracket_span=span,
        crossings=d.n,
        span_ok=span <= 4 * d.n,
        homological_length=length,
        length_ok=length <= d.n,
        obstruction=obstruction,
        grading_vectors=vectors,
    )
