"""Kauffman states, their circles, and the edges of the bifurcation cube.

A state is an integer bitmask over the classical crossings (bit x set means
crossing x is B-smoothed).  At crossing ``a b c d`` the A-smoothing joins
a-b and c-d, the B-smoothing joins a-d and b-c.

Dotting sources, in the order they appear in a circle's dot vector, are
named ``bars``, ``marker0``, ``marker1``, ..., ``rigid`` and ``endpoint``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Tuple

from .diagram import Diagram, DiagramError, Port

DEFAULT_LIMIT = 20


class CubeLimitError(DiagramError):
    pass


@dataclass(frozen=True)
class Circle:
    traversal: Tuple[Tuple[int, int], ...]  # (edge, +1 along edge direction / -1 against)
    exits: FrozenSet[Port]  # classical ports the circle leaves through
    arrivals: FrozenSet[Port]  # classical ports the circle enters through
    token_parity: Tuple[Tuple[str, int], ...]  # per source name, parity of tokens
    virtual_self: int  # number of virtual self-crossings
    windings: Tuple[Tuple[int, int], ...]  # (integral marker set, signed count)

    @property
    def min_edge(self) -> int:
        return self.traversal[0][0]

    def leaves_through(self, port: Port) -> bool:
        return port in self.exits

    def edges(self) -> FrozenSet[int]:
        return frozenset(e for e, _ in self.traversal)


@dataclass(frozen=True)
class State:
    bits: int
    n: int
    circles: Tuple[Circle, ...]

    @property
    def beta(self) -> int:
        return bin(self.bits).count("1")

    @property
    def alpha(self) -> int:
        return self.n - self.beta

    @property
    def gamma(self) -> int:
        return len(self.circles)

    def smoothing(self) -> Tuple[int, ...]:
        return tuple((self.bits >> x) & 1 for x in range(self.n))

    def circle_with_port(self, port: Port) -> int:
        for k, c in enumerate(self.circles):
            if port in c.exits or port in c.arrivals:
                return k
        raise KeyError(port)


@dataclass(frozen=True)
class CubeEdge:
    src: int
    dst: int
    crossing: int
    kind: str  # merge | split | single
    in_circles: Tuple[int, ...]  # indices into the source state's circles
    out_circles: Tuple[int, ...]  # indices into the target state's circles


def dot_sources(d: Diagram) -> List[str]:
    """All dotting sources this diagram can feed."""
    names = ["bars"] + [f"marker{k}" for k in d.marker_sets] + ["rigid", "endpoint"]
    return names


def _source_of(token) -> Optional[str]:
    if token[0] == "B":
        return "bars"
    if token[0] == "M":
        return f"marker{token[1]}"
    if token[0] == "E":
        return "endpoint"
    return None


def trace_state(d: Diagram, bits: int) -> List[Circle]:
    """Trace the circles of one state, ordered by their smallest edge."""
    visited = set()
    circles: List[Circle] = []
    xindex = {node_i: x for x, node_i in enumerate(d.crossing_nodes)}
    sources = dot_sources(d)
    ordered = sorted(d.edge_ports)
    for e0 in ordered:
        if e0 in visited:
            continue
        tail0, head0 = d.edge_direction(e0)
        trav = []
        exits = set()
        arrivals = set()
        vcount: Dict[int, int] = {}
        e, tail, head = e0, tail0, head0
        while True:
            visited.add(e)
            trav.append((e, 1 if (tail, head) == d.edge_direction(e) else -1))
            node_i, pos = head
            node = d.nodes[node_i]
            if node.kind == "V":
                vcount[node_i] = vcount.get(node_i, 0) + 1
                out = (node_i, (pos + 2) % 4)
            else:
                arrivals.add(head)
                b = (bits >> xindex[node_i]) & 1
                out = (node_i, pos ^ 1 if not b else 3 - pos)
                exits.add(out)
            e = d.port_edge(out)
            tail, head = out, d.other_port(e, out)
            if e == e0:
                break
        circles.append(_make_circle(d, trav, exits, arrivals, sum(1 for v in vcount.values() if v == 2), sources))
    for e in d.loops:
        circles.append(_make_circle(d, [(e, 1)], set(), set(), 0, sources))
    circles.sort(key=lambda c: c.min_edge)
    return circles


def _make_circle(d, trav, exits, arrivals, vself, sources) -> Circle:
    par: Dict[str, int] = {s: 0 for s in sources}
    wind: Dict[int, int] = {k: 0 for k in sorted(d.integral)}
    for e, direction in trav:
        for t in d.edge_tokens(e):
            s = _source_of(t)
            if s is not None:
                par[s] ^= 1
            if t[0] == "M" and t[1] in wind:
                wind[t[1]] += t[2] * direction
    par["rigid"] = vself & 1
    return Circle(tuple(trav), frozenset(exits), frozenset(arrivals), tuple(par.items()), vself, tuple(wind.items()))


def circle_dots(c: Circle, d: Diagram | None = None) -> Dict[str, int]:
    """Dot bit per source for one circle."""
    return dict(c.token_parity)


def secondary_gradings(c: Circle, marker_set: Optional[int] = None, length: int = 8) -> Tuple[int, ...]:
    """The tower (g1, g2, ...): a single 1 at the exact 2-adic order of the winding."""
    w = dict(c.windings)
    if not w:
        raise ValueError("circle carries no integer winding")
    if marker_set is None:
        marker_set = min(w)
    if marker_set not in w:
        raise ValueError(f"marker set {marker_set} is not integral")
    return tower(w[marker_set], length)


def tower(winding: int, length: int = 8) -> Tuple[int, ...]:
    out = [0] * length
    if winding == 0:
        return tuple(out)
    v = abs(winding)
    order = 0
    while v % 2 == 0:
        v //= 2
        order += 1
    if order >= length:
        raise ValueError("tower too short for this winding")
    out[order] = 1
    return tuple(out)


@dataclass
class Cube:
    diagram: Diagram
    states: List[State]
    edges: List[CubeEdge]

    @property
    def n(self) -> int:
        return self.diagram.n

    def has_single_edges(self) -> bool:
        return any(e.kind == "single" for e in self.edges)


def enumerate_states(d: Diagram, limit: int = DEFAULT_LIMIT) -> Cube:
    n = d.n
    if n > limit:
        raise CubeLimitError(f"{n} crossings exceed the cube limit {limit}")
    states = [State(bits, n, tuple(trace_state(d, bits))) for bits in range(1 << n)]
    edges: List[CubeEdge] = []
    for s in states:
        for x in range(n):
            if (s.bits >> x) & 1:
                continue
            t = states[s.bits | (1 << x)]
            edges.append(_classify(d, s, t, x))
    return Cube(d, states, edges)


def _find(state: State, port: Port) -> int:
    return state.circle_with_port(port)


def _classify(d: Diagram, s: State, t: State, x: int) -> CubeEdge:
    node_i = d.crossing_nodes[x]
    pa, pb, pc, pd = [(node_i, k) for k in range(4)]
    # in s the crossing is A-smoothed: arcs a-b (lower) and c-d (upper)
    upper, lower = _find(s, pc), _find(s, pa)
    # in t it is B-smoothed: arcs a-d (left) and b-c (right)
    left, right = _find(t, pa), _find(t, pc)
    dg = t.gamma - s.gamma
    if dg == -1:
        return CubeEdge(s.bits, t.bits, x, "merge", (upper, lower), (left,))
    if dg == 1:
        return CubeEdge(s.bits, t.bits, x, "split", (upper,), (left, right))
    if dg == 0:
        return CubeEdge(s.bits, t.bits, x, "single", (upper,), (left,))
    raise AssertionError("smoothing change altered circle count by more than one")


def incident_map(s: State, t: State, edge: CubeEdge) -> Dict[int, int]:
    """Map non-incident circles of the source state to their copies in the target."""
    by_min = {c.min_edge: k for k, c in enumerate(t.circles)}
    out = {}
    for k, c in enumerate(s.circles):
        if k in edge.in_circles:
            continue
        out[k] = by_min[c.min_edge]
    return out
