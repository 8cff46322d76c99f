"""Link diagrams: classical and virtual crossings, bars and markers.

Crossings are stored as *nodes*.  Each node has four ports numbered 0..3
counterclockwise; port ``(node, pos)`` carries one edge label.  For a
classical node the ports are ``a b c d`` starting at the incoming
underpass, so the under strand runs a -> c.  Sign ``+`` means the over
strand runs d -> b, sign ``-`` means b -> d.  A virtual node only records
that strands a-c and b-d pass through each other.

File format (one record per line, ``#`` starts a comment)::

    X a b c d s     classical crossing
    V a b c d       virtual crossing
    U n [e ...]     n crossing-free components (edge labels optional)
    B e             bar on edge e
    M k e [+|-]     marker of set k on edge e (sign used for windings)
    I k             marker set k carries integer windings
    E e             long-knot endpoint on edge e
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

Port = Tuple[int, int]  # (node index, position 0..3)
Token = Tuple  # ("B",) | ("M", k, sign) | ("E",)


class DiagramError(ValueError):
    """Base class for malformed or unsuitable diagrams."""


class DiagramSyntaxError(DiagramError):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"line {line}, column {col}: {msg}")
        self.line, self.col = line, col


class UnknownDirectiveError(DiagramSyntaxError):
    pass


class IncidenceError(DiagramError):
    pass


class UnorientedError(DiagramError):
    pass


@dataclass(frozen=True)
class Node:
    kind: str  # "X" or "V"
    ports: Tuple[int, int, int, int]
    sign: str = ""  # "+" / "-" for X, "" for V

    def __post_init__(self):
        if self.kind not in ("X", "V"):
            raise DiagramError(f"bad node kind {self.kind!r}")
        if self.kind == "X" and self.sign not in ("+", "-"):
            raise DiagramError("classical crossing needs a sign")
        if self.kind == "V" and self.sign:
            raise DiagramError("virtual crossing carries no sign")
        if self.sign is None:
            object.__setattr__(self, "sign", "")


@dataclass(frozen=True, eq=False)
class Diagram:
    nodes: Tuple[Node, ...] = ()
    loops: Tuple[int, ...] = ()
    tokens: Tuple[Tuple[int, Tuple[Token, ...]], ...] = ()
    integral: frozenset = frozenset()
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        toks = tuple(sorted((e, tuple(t)) for e, t in self.tokens if t))
        object.__setattr__(self, "tokens", toks)
        object.__setattr__(self, "integral", frozenset(self.integral))
        _validate(self)

    # ---- equality: structural, labels included --------------------------
    def _key(self):
        return (self.nodes, self.loops, self.tokens, tuple(sorted(self.integral)))

    def __eq__(self, other):
        return isinstance(other, Diagram) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    # ---- basic accessors --------------------------------------------------
    @property
    def crossing_nodes(self) -> List[int]:
        """Node indices of classical crossings, in cube-bit order."""
        c = self._cache
        if "xn" not in c:
            c["xn"] = [i for i, n in enumerate(self.nodes) if n.kind == "X"]
        return c["xn"]

    @property
    def n(self) -> int:
        return len(self.crossing_nodes)

    @property
    def crossings(self) -> List[Node]:
        return [self.nodes[i] for i in self.crossing_nodes]

    @property
    def virtuals(self) -> List[Node]:
        return [n for n in self.nodes if n.kind == "V"]

    def edge_tokens(self, e: int) -> Tuple[Token, ...]:
        return self._token_map().get(e, ())

    def _token_map(self) -> Dict[int, Tuple[Token, ...]]:
        c = self._cache
        if "tok" not in c:
            c["tok"] = dict(self.tokens)
        return c["tok"]

    @property
    def edges(self) -> List[int]:
        c = self._cache
        if "edges" not in c:
            c["edges"] = sorted(set(self.edge_ports) | set(self.loops))
        return c["edges"]

    @property
    def edge_ports(self) -> Dict[int, Tuple[Port, Port]]:
        """Both ports of each non-loop edge, in first-occurrence order."""
        c = self._cache
        if "ep" not in c:
            ep: Dict[int, List[Port]] = {}
            for i, node in enumerate(self.nodes):
                for pos, e in enumerate(node.ports):
                    ep.setdefault(e, []).append((i, pos))
            c["ep"] = {e: (p[0], p[1]) for e, p in ep.items()}
        return c["ep"]

    def port_edge(self, port: Port) -> int:
        return self.nodes[port[0]].ports[port[1]]

    def other_port(self, e: int, port: Port) -> Port:
        p, q = self.edge_ports[e]
        return q if port == p else p

    @property
    def marker_sets(self) -> List[int]:
        ks = {t[1] for _, ts in self.tokens for t in ts if t[0] == "M"}
        return sorted(ks)

    @property
    def has_bars(self) -> bool:
        return any(t[0] == "B" for _, ts in self.tokens for t in ts)

    @property
    def has_endpoint(self) -> bool:
        return any(t[0] == "E" for _, ts in self.tokens for t in ts)

    # ---- strands, orientation ---------------------------------------------
    def _strands(self):
        """Link components as lists of (edge, tail port, head port)."""
        c = self._cache
        if "strands" in c:
            return c["strands"]
        seen = set()
        comps = []
        for e0 in sorted(self.edge_ports):
            if e0 in seen:
                continue
            tail, head = self.edge_ports[e0]
            comp = []
            e = e0
            while True:
                seen.add(e)
                comp.append((e, tail, head))
                node, pos = head
                nxt = (node, (pos + 2) % 4)
                e = self.port_edge(nxt)
                tail = nxt
                head = self.other_port(e, nxt)
                if e == e0 and tail == comp[0][1]:
                    break
                if e in seen:
                    raise IncidenceError(f"strand through edge {e} does not close up")
            comps.append(comp)
        c["strands"] = comps
        return comps

    @property
    def components(self) -> int:
        return len(self._strands()) + len(self.loops)

    def _orientation(self) -> Optional[Dict[int, Tuple[Port, Port]]]:
        c = self._cache
        if "orient" in c:
            return c["orient"]
        result: Dict[int, Tuple[Port, Port]] = {}
        ok = True
        for comp in self._strands():
            chosen = None
            for flip in (False, True):
                dirs = {}
                for e, t, h in comp:
                    dirs[e] = (h, t) if flip else (t, h)
                if _orientation_consistent(self, dirs):
                    chosen = dirs
                    break
            if chosen is None:
                ok = False
                break
            result.update(chosen)
        c["orient"] = result if ok else None
        return c["orient"]

    @property
    def oriented(self) -> bool:
        return self._orientation() is not None

    def edge_direction(self, e: int) -> Tuple[Port, Port]:
        """(tail, head) of an edge: link orientation if consistent, else file order."""
        o = self._orientation()
        if o is not None:
            return o[e]
        return self.edge_ports[e]

    def crossing_counts(self) -> Tuple[int, int]:
        if not self.oriented:
            raise UnorientedError("diagram has no consistent orientation")
        pos = sum(1 for n in self.crossings if n.sign == "+")
        return pos, self.n - pos

    # ---- faces ---------------------------------------------------------------
    def faces(self) -> List[Tuple[Tuple[int, Port, Port], ...]]:
        """Boundary cycles with the face on the left; each dart is (edge, from, to)."""
        c = self._cache
        if "faces" in c:
            return c["faces"]
        used = set()
        faces = []
        for e in sorted(self.edge_ports):
            for frm, to in (self.edge_ports[e], self.edge_ports[e][::-1]):
                if (e, frm, to) in used:
                    continue
                cyc = []
                dart = (e, frm, to)
                while dart not in used:
                    used.add(dart)
                    cyc.append(dart)
                    node, pos = dart[2]
                    out = (node, (pos - 1) % 4)
                    ne = self.port_edge(out)
                    dart = (ne, out, self.other_port(ne, out))
                faces.append(tuple(cyc))
        c["faces"] = faces
        return faces

    def is_planar(self) -> bool:
        """Euler check of the drawing with virtual crossings as vertices."""
        if not self.nodes:
            return True
        return len(self.nodes) - len(self.edge_ports) + len(self.faces()) == 2 * self._graph_components()

    def _graph_components(self) -> int:
        parent = list(range(len(self.nodes)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for p, q in self.edge_ports.values():
            parent[find(p[0])] = find(q[0])
        return len({find(i) for i in range(len(self.nodes))})

    # ---- misc ---------------------------------------------------------------
    def max_label(self) -> int:
        labels = list(self.edge_ports) + list(self.loops)
        return max(labels) if labels else 0

    def replace(self, **kw) -> "Diagram":
        base = dict(nodes=self.nodes, loops=self.loops, tokens=self.tokens, integral=self.integral)
        base.update(kw)
        return Diagram(**base)


def _orientation_consistent(d: Diagram, dirs: Dict[int, Tuple[Port, Port]]) -> bool:
    for i, node in enumerate(d.nodes):
        if node.kind != "X":
            continue
        a, b, c_, dd = [(i, k) for k in range(4)]
        need_in = [a, dd if node.sign == "+" else b]
        need_out = [c_, b if node.sign == "+" else dd]
        for p in need_in:
            e = node.ports[p[1]]
            if e in dirs and dirs[e][1] != p:
                return False
        for p in need_out:
            e = node.ports[p[1]]
            if e in dirs and dirs[e][0] != p:
                return False
    return True


def _validate(d: Diagram) -> None:
    counts: Dict[int, int] = {}
    for node in d.nodes:
        if len(node.ports) != 4:
            raise IncidenceError("a crossing needs four ports")
        for e in node.ports:
            counts[e] = counts.get(e, 0) + 1
    for e, k in counts.items():
        if k != 2:
            raise IncidenceError(f"half-edge {e} used {k} times (expected 2)")
    for e in d.loops:
        if e in counts:
            raise IncidenceError(f"loop label {e} also used by a crossing")
    if len(set(d.loops)) != len(d.loops):
        raise IncidenceError("duplicate loop label")
    known = set(counts) | set(d.loops)
    for e, ts in d.tokens:
        if e not in known:
            raise IncidenceError(f"token on unknown edge {e}")
        for t in ts:
            if t[0] == "M" and (len(t) != 3 or t[2] not in (1, -1) or t[1] < 0):
                raise DiagramError(f"bad marker token {t}")
            if t[0] not in ("B", "M", "E"):
                raise DiagramError(f"bad token {t}")
    ks = sorted({t[1] for _, ts in d.tokens for t in ts if t[0] == "M"} | set(d.integral))
    if ks and ks != list(range(len(ks))):
        raise DiagramError(f"marker sets must be 0..k_max, got {ks}")


# ---------------------------------------------------------------------------
# parsing and serialisation


def _int(tok: str, line: int, col: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise DiagramSyntaxError(line, col, f"expected an integer, got {tok!r}") from None


def parse_diagram(text: str) -> Diagram:
    nodes: List[Node] = []
    loops_spec: List[Tuple[int, List[int]]] = []
    tokens: Dict[int, List[Token]] = {}
    integral = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        parts = line.split()
        cols = []
        pos = 0
        for p in parts:
            pos = line.index(p, pos)
            cols.append(pos + 1)
            pos += len(p)
        head = parts[0]
        args = parts[1:]

        def need(k, what):
            if len(args) != k:
                raise DiagramSyntaxError(lineno, cols[0], f"{head} expects {what}")

        if head == "X":
            need(5, "four labels and a sign")
            labels = tuple(_int(a, lineno, c) for a, c in zip(args[:4], cols[1:5]))
            if args[4] not in ("+", "-"):
                raise DiagramSyntaxError(lineno, cols[5], f"sign must be + or -, got {args[4]!r}")
            nodes.append(Node("X", labels, args[4]))
        elif head == "V":
            need(4, "four labels")
            nodes.append(Node("V", tuple(_int(a, lineno, c) for a, c in zip(args, cols[1:]))))
        elif head == "U":
            if not args:
                raise DiagramSyntaxError(lineno, cols[0], "U expects a count")
            k = _int(args[0], lineno, cols[1])
            labels = [_int(a, lineno, c) for a, c in zip(args[1:], cols[2:])]
            if labels and len(labels) != k:
                raise DiagramSyntaxError(lineno, cols[0], "U label list must have n entries")
            loops_spec.append((k, labels))
        elif head == "B" or head == "E":
            need(1, "an edge label")
            tokens.setdefault(_int(args[0], lineno, cols[1]), []).append((head,))
        elif head == "M":
            if len(args) not in (2, 3):
                raise DiagramSyntaxError(lineno, cols[0], "M expects set, edge and optional sign")
            k = _int(args[0], lineno, cols[1])
            e = _int(args[1], lineno, cols[2])
            sign = 1
            if len(args) == 3:
                if args[2] not in ("+", "-"):
                    raise DiagramSyntaxError(lineno, cols[3], "marker sign must be + or -")
                sign = 1 if args[2] == "+" else -1
            tokens.setdefault(e, []).append(("M", k, sign))
        elif head == "I":
            need(1, "a marker set index")
            integral.add(_int(args[0], lineno, cols[1]))
        else:
            raise UnknownDirectiveError(lineno, cols[0], f"unknown directive {head!r}")
    used = {e for n in nodes for e in n.ports} | {e for _, ls in loops_spec for e in ls}
    nxt = max(used) + 1 if used else 1
    loops: List[int] = []
    for k, labels in loops_spec:
        if labels:
            loops.extend(labels)
        else:
            for _ in range(k):
                loops.append(nxt)
                nxt += 1
    return Diagram(tuple(nodes), tuple(loops), tuple((e, tuple(t)) for e, t in tokens.items()), frozenset(integral))


def serialize(d: Diagram) -> str:
    out = []
    for node in d.nodes:
        labels = " ".join(str(e) for e in node.ports)
        out.append(f"X {labels} {node.sign}" if node.kind == "X" else f"V {labels}")
    for e in d.loops:
        out.append(f"U 1 {e}")
    for k in sorted(d.integral):
        out.append(f"I {k}")
    for e, ts in d.tokens:
        for t in ts:
            if t[0] == "M":
                out.append(f"M {t[1]} {e} {'+' if t[2] > 0 else '-'}")
            else:
                out.append(f"{t[0]} {e}")
    return "\n".join(out) + "\n"


def load_diagram(path) -> Diagram:
    with open(path, encoding="utf-8") as fh:
        return parse_diagram(fh.read())


# ---------------------------------------------------------------------------
# invariants of the drawing


def writhe(d: Diagram) -> int:
    pos, neg = d.crossing_counts()
    return pos - neg


def atom_euler_characteristic(d: Diagram) -> int:
    """gamma(all-A) + gamma(all-B) - n."""
    from .states import trace_state

    n = d.n
    return len(trace_state(d, 0)) + len(trace_state(d, (1 << n) - 1)) - n


def atom_components(d: Diagram) -> int:
    """Connected pieces of the atom: classical crossings joined along strands
    (virtual crossings are passed straight through) plus crossing-free curves."""
    parent = {i: i for i in d.crossing_nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    free = 0
    for comp in d._strands():
        xs = []
        for e, tail, head in comp:
            if d.nodes[head[0]].kind == "X":
                xs.append(head[0])
        if not xs:
            free += 1
            continue
    # segments between classical nodes: follow each edge through virtual nodes
    for node_i in d.crossing_nodes:
        for pos in range(4):
            port = (node_i, pos)
            e = d.port_edge(port)
            q = d.other_port(e, port)
            while d.nodes[q[0]].kind == "V":
                nxt = (q[0], (q[1] + 2) % 4)
                e = d.port_edge(nxt)
                q = d.other_port(e, nxt)
            parent[find(node_i)] = find(q[0])
    roots = {find(i) for i in d.crossing_nodes}
    return len(roots) + free + len(d.loops)


def atom_orientable(d: Diagram) -> bool:
    """Whether the A- and B-circles can be oriented to induce opposite directions on every edge."""
    from .states import trace_state

    parent: Dict[Tuple[str, int], Tuple[Tuple[str, int], int]] = {}

    def find(x):
        par = 0
        while parent.get(x, (x, 0))[0] != x:
            x, p = parent[x]
            par ^= p
        return x, par

    def union(x, y, rel):
        (rx, px), (ry, py) = find(x), find(y)
        if rx == ry:
            return (px ^ py) == rel
        parent[rx] = (ry, px ^ py ^ rel)
        return True

    seen: Dict[int, Tuple[Tuple[str, int], int]] = {}
    for tag, bits in (("A", 0), ("B", (1 << d.n) - 1)):
        for k, c in enumerate(trace_state(d, bits)):
            for e, direction in c.traversal:
                if e in d.loops:
                    continue
                if tag == "A":
                    seen[e] = ((tag, k), direction)
                    continue
                other, dir_a = seen[e]
                # orientations s_A, s_B in {0, 1}: need s_A + dir_A != s_B + dir_B
                rel = 1 ^ (dir_a != direction)
                if not union(other, (tag, k), rel):
                    return False
    return True


def atom_genus(d: Diagram):
    """Genus of the atom, summed over its connected pieces.

    For an orientable atom this is the usual genus.  A non-orientable atom
    reports its Euler genus 2k - chi (the crosscap number when connected).
    """
    chi = atom_euler_characteristic(d)
    twice = 2 * atom_components(d) - chi
    if atom_orientable(d):
        return twice // 2
    return twice


# ---------------------------------------------------------------------------
# canonical relabelling and isomorphism


def _component_form(d: Diagram, start: Tuple[int, Port, Port], oriented: bool):
    e0, frm, to = start
    labels: Dict[int, int] = {e0: 1}
    first: Dict[int, Tuple[Port, Port]] = {e0: (frm, to)}
    seen_nodes: Dict[int, int] = {to[0]: 0}
    queue = [(to[0], to[1])]
    qi = 0
    while qi < len(queue):
        node_i, entry = queue[qi]
        qi += 1
        for k in range(4):
            pos = (entry + k) % 4
            e = d.nodes[node_i].ports[pos]
            other = d.other_port(e, (node_i, pos))
            if e not in labels:
                labels[e] = len(labels) + 1
                first[e] = ((node_i, pos), other)
            if other[0] not in seen_nodes:
                seen_nodes[other[0]] = len(queue)
                queue.append(other)
    recs = []
    rots: Dict[int, int] = {}
    for node_i, entry in queue:
        node = d.nodes[node_i]
        ports = [labels[e] for e in node.ports]
        if node.kind == "V":
            rot = min(range(4), key=lambda r: ports[r:] + ports[:r])
            recs.append(("V", tuple(ports[rot:] + ports[:rot]), ""))
        else:
            sign, rot = node.sign, 0
            if not oriented:
                # without an orientation the sign carries no information
                rot = 2 if ports[2:] + ports[:2] < ports else 0
                ports, sign = ports[rot:] + ports[:rot], "+"
            recs.append(("X", tuple(ports), sign))
        rots[node_i] = rot
    # tokens are read along the direction the walk first met each edge, so the
    # stored direction of a strand without classical crossings does not leak in;
    # the reading starts at (walk position of the node, port index in its record)
    toks = []
    for e in labels:
        if d.edge_tokens(e):
            frm, to = first[e]
            ref = (seen_nodes[frm[0]], (frm[1] - rots[frm[0]]) % 4)
            toks.append((labels[e], ref, _read_tokens(d, e, frm, to)))
    return (tuple(recs), tuple(sorted(toks))), labels


def _flip(t: Token) -> Token:
    return ("M", t[1], -t[2]) if t[0] == "M" else t


def _read_tokens(d: Diagram, e: int, frm: Port, to: Port) -> Tuple[Token, ...]:
    ts = d.edge_tokens(e)
    if (frm, to) == d.edge_direction(e):
        return ts
    return tuple(_flip(t) for t in reversed(ts))


def _loop_key(ts: Tuple[Token, ...]) -> Tuple[Token, ...]:
    """Tokens on a crossing-free loop up to rotation and reversal."""
    back = tuple(_flip(t) for t in reversed(ts))
    return min((seq[r:] + seq[:r] for seq in (ts, back) for r in range(len(seq) or 1)), key=repr)


def canonical_form(d: Diagram):
    """Relabelling-invariant key: equal keys iff the diagrams are isomorphic."""
    c = d._cache
    if "canon" in c:
        return c["canon"]
    oriented = d.oriented
    # group nodes into connected pieces of the drawing
    comp_of: Dict[int, int] = {}
    pieces: List[List[int]] = []
    for i in range(len(d.nodes)):
        if i in comp_of:
            continue
        stack = [i]
        comp_of[i] = len(pieces)
        members = []
        while stack:
            x = stack.pop()
            members.append(x)
            for e in d.nodes[x].ports:
                for p in d.edge_ports[e]:
                    if p[0] not in comp_of:
                        comp_of[p[0]] = len(pieces)
                        stack.append(p[0])
        pieces.append(members)
    # strands through virtual crossings only have no forced direction
    free = set()
    for comp in d._strands():
        if all(d.nodes[h[0]].kind == "V" for _, _, h in comp):
            free.update(e for e, _, _ in comp)
    forms = []
    for members in pieces:
        best = None
        ms = set(members)
        for e, (p, q) in d.edge_ports.items():
            if p[0] not in ms:
                continue
            for frm, to in ((p, q), (q, p)):
                if oriented and e not in free and (frm, to) != d.edge_direction(e):
                    continue
                form, _ = _component_form(d, (e, frm, to), oriented)
                if best is None or repr(form) < repr(best):
                    best = form
        forms.append(best)
    loops = tuple(sorted((_loop_key(d.edge_tokens(e)) for e in d.loops), key=repr))
    key = (tuple(sorted(forms, key=repr)), loops, tuple(sorted(d.integral)))
    c["canon"] = key
    return key


def isomorphic(d1: Diagram, d2: Diagram) -> bool:
    return canonical_form(d1) == canonical_form(d2)


def canonical_relabel(d: Diagram) -> Diagram:
    """An isomorphic copy whose labels follow the canonical form."""
    (forms, loops, integral) = canonical_form(d)
    nodes: List[Node] = []
    pending = []  # (label, reading start port, tokens in that reading)
    offset = 0
    for recs, toks in forms:
        top = 0
        base = len(nodes)
        for kind, ports, sign in recs:
            nodes.append(Node(kind, tuple(p + offset for p in ports), sign))
            top = max(top, *ports)
        for e, (k, pos), ts in toks:
            pending.append((e + offset, (base + k, pos), ts))
        offset += top
    loop_labels = []
    tokens: List[Tuple[int, Tuple[Token, ...]]] = []
    for ts in loops:
        offset += 1
        loop_labels.append(offset)
        if ts:
            tokens.append((offset, ts))
    bare = Diagram(tuple(nodes), tuple(loop_labels), (), frozenset(integral))
    for e, frm, ts in pending:
        tail, _ = bare.edge_direction(e)
        tokens.append((e, ts if tail == frm else tuple(_flip(t) for t in reversed(ts))))
    return bare.replace(tokens=tuple(tokens))


def __getattr__(name):
    # moves live in their own module; re-exported lazily to avoid an import cycle
    if name in ("MoveError", "ReidemeisterMove", "apply_move"):
        from . import moves

        return getattr(moves, name)
    raise AttributeError(name)
