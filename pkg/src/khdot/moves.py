"""Reidemeister moves, their detour relatives, and site enumeration.

Moves act on faces of the drawing (virtual crossings count as vertices), so
a site is an edge label, a node index, or a face index into ``d.faces()``
together with dart positions.  Insertions build the new crossings from local
templates; removals splice nodes out by joining opposite ports, which is
what undoing a curl, a bigon or a triangle amounts to.

Detour moves are generated by their virtual versions of R1, R2 and R3 and by
the mixed triangle move, in which a strand with two virtual crossings slides
past a classical one.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .diagram import Diagram, DiagramError, Node, Port, isomorphic

KINDS = ("R1+", "R1-", "R2", "R2-", "R3", "Detour")
DETOUR_VARIANTS = ("vR1+", "vR1-", "vR2", "vR2-", "vR3", "mR3")
_ALIASES = {"R1−": "R1-", "R2⁻¹": "R2-", "R2^-1": "R2-", "R2−": "R2-"}


class MoveError(DiagramError):
    """The move does not apply at the given site."""


@dataclass(frozen=True)
class ReidemeisterMove:
    kind: str
    site: object
    params: Tuple[Tuple[str, object], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", _ALIASES.get(self.kind, self.kind))
        if self.kind not in KINDS:
            raise ValueError(f"unknown move kind {self.kind!r}")
        if isinstance(self.params, dict):
            object.__setattr__(self, "params", tuple(sorted(self.params.items())))
        if self.kind == "Detour" and self.param("variant") not in DETOUR_VARIANTS:
            raise ValueError(f"detour variant must be one of {DETOUR_VARIANTS}")

    def param(self, name: str, default=None):
        return dict(self.params).get(name, default)

    @property
    def label(self) -> str:
        return self.param("variant") if self.kind == "Detour" else self.kind

    def describe(self) -> str:
        extra = ", ".join(f"{k}={v}" for k, v in self.params if k != "variant")
        return f"{self.label}@{self.site}" + (f" ({extra})" if extra else "")


def move(kind: str, site, **params) -> ReidemeisterMove:
    return ReidemeisterMove(kind, site, tuple(sorted(params.items())))


def detour(variant: str, site, **params) -> ReidemeisterMove:
    params["variant"] = variant
    return ReidemeisterMove("Detour", site, tuple(sorted(params.items())))


# ----------------------------------------------------------------------------
# helpers


def _flip_token(t):
    return ("M", t[1], -t[2]) if t[0] == "M" else t


def _tokens_along(d: Diagram, e: int, frm: Port, to: Port):
    """Tokens of edge e read in the direction frm -> to."""
    ts = d.edge_tokens(e)
    if (frm, to) == d.edge_direction(e):
        return list(ts)
    return [_flip_token(t) for t in reversed(ts)]


def _crossing(kind: str, ccw: Sequence[int], under_in: int, over_in: int) -> Node:
    """Build a node from four labels in counterclockwise order.

    ``under_in``/``over_in`` are positions in ``ccw`` where the under and over
    strands arrive.  For a virtual node they only fix the rotation.
    """
    ports = list(ccw[under_in:]) + list(ccw[:under_in])
    if kind == "V":
        return Node("V", tuple(ports))
    rel = (over_in - under_in) % 4
    if rel == 3:
        return Node("X", tuple(ports), "+")
    if rel == 1:
        return Node("X", tuple(ports), "-")
    raise AssertionError("over strand must be adjacent to the under strand")


def _with(d: Diagram, nodes, loops=None, tokens=None) -> Diagram:
    return Diagram(
        tuple(nodes),
        tuple(d.loops if loops is None else loops),
        tuple(d.tokens if tokens is None else tokens),
        d.integral,
    )


def _settle(d: Diagram, nodes, loops, readings: Dict[int, tuple], moved: Optional[Dict[Port, Port]] = None) -> Diagram:
    """Assemble a diagram whose tokens are given as readings along port-to-port directions.

    ``readings`` maps a label to (from port, to port, tokens read that way);
    a crossing-free loop uses (None, None, tokens).  Tokens of other edges are
    taken from ``d`` along its own directions, with endpoints renamed through
    ``moved``.  Stored token order and marker signs then follow the new
    diagram's edge directions, whichever way those happen to run.
    """
    moved = moved or {}
    reads = dict(readings)
    for e, ts in d.tokens:
        if e in reads or not ts:
            continue
        if e in d.loops:
            reads[e] = (None, None, ts)
        else:
            t, h = d.edge_direction(e)
            reads[e] = (moved.get(t, t), moved.get(h, h), ts)
    bare = Diagram(tuple(nodes), tuple(loops), (), d.integral)
    tokens = []
    for e, (frm, to, ts) in reads.items():
        if not ts:
            continue
        if frm is None or bare.edge_direction(e) == (frm, to):
            tokens.append((e, tuple(ts)))
        elif bare.edge_direction(e) == (to, frm):
            tokens.append((e, tuple(_flip_token(t) for t in reversed(ts))))
        else:
            raise AssertionError(f"token reading for edge {e} does not match its ends")
    return bare.replace(tokens=tuple(tokens))


def _splice_out(d: Diagram, remove: Set[int]) -> Diagram:
    """Delete nodes, joining each one's opposite ports; closed-up strands become loops."""
    keep = [i for i in range(len(d.nodes)) if i not in remove]
    newidx = {i: k for k, i in enumerate(keep)}
    ports = {i: list(d.nodes[i].ports) for i in keep}
    tokens: Dict[int, List] = {e: list(ts) for e, ts in d.tokens}
    visited: Set[int] = set()
    chains = []  # (label, start port, end port or None, tokens along the walk)

    def walk(port: Port, closed: bool):
        label = d.port_edge(port)
        toks = []
        p = port
        while True:
            e = d.port_edge(p)
            q = d.other_port(e, p)
            visited.add(e)
            toks.extend(_tokens_along(d, e, p, q))
            if q[0] in remove:
                p = (q[0], (q[1] + 2) % 4)
                if closed and p == port:
                    return label, None, toks
                continue
            return label, q, toks

    for i in keep:
        for pos in range(4):
            e = d.nodes[i].ports[pos]
            if e in visited:
                continue
            other = d.other_port(e, (i, pos))
            if other[0] not in remove:
                visited.add(e)
                continue
            label, end, toks = walk((i, pos), False)
            ports[end[0]][end[1]] = label
            chains.append((label, (i, pos), end, toks))
    loops = list(d.loops)
    for i in sorted(remove):
        for pos in range(4):
            e = d.nodes[i].ports[pos]
            if e in visited:
                continue
            label, _, toks = walk((i, pos), True)
            loops.append(label)
            chains.append((label, None, None, toks))
    chain_edges = {d.port_edge(p) for i in remove for p in ((i, k) for k in range(4))}
    for e in chain_edges:
        tokens.pop(e, None)
    for label, _, _, toks in chains:
        tokens[label] = toks
    nodes = [Node(d.nodes[i].kind, tuple(ports[i]), d.nodes[i].sign) for i in keep]
    out = Diagram(tuple(nodes), tuple(loops), tuple((e, tuple(t)) for e, t in tokens.items()), d.integral)
    # markers carry a sign relative to the edge direction, which may now differ
    fixed = dict((e, list(t)) for e, t in out.tokens)
    changed = False
    merged = {label for label, _, _, _ in chains}
    for e, ts in out.tokens:
        if e in merged or e not in out.edge_ports:
            continue
        t0, h0 = d.edge_direction(e)
        if out.edge_direction(e) != ((newidx[t0[0]], t0[1]), (newidx[h0[0]], h0[1])):
            fixed[e] = [_flip_token(t) for t in reversed(ts)]
            changed = True
    for label, start, end, toks in chains:
        if start is None or not toks:
            continue
        tail = (newidx[start[0]], start[1])
        head = (newidx[end[0]], end[1])
        if out.edge_direction(label) != (tail, head):
            fixed[label] = [_flip_token(t) for t in reversed(toks)]
            changed = True
    if changed:
        out = out.replace(tokens=tuple((e, tuple(t)) for e, t in fixed.items()))
    return out


def _faces(d: Diagram):
    return d.faces() if d.nodes else []


def _pieces(d: Diagram) -> List[int]:
    """Connected piece of the drawing for each node."""
    piece = list(range(len(d.nodes)))

    def find(x):
        while piece[x] != x:
            piece[x] = piece[piece[x]]
            x = piece[x]
        return x

    for p, q in d.edge_ports.values():
        piece[find(p[0])] = find(q[0])
    return [find(x) for x in range(len(d.nodes))]


# ----------------------------------------------------------------------------
# R1


def _free_strand(d: Diagram, edge: int) -> Optional[List[int]]:
    """Edges of the component through ``edge`` when no classical crossing fixes its direction."""
    for comp in d._strands():
        edges = [e for e, _, _ in comp]
        if edge in edges:
            if all(d.nodes[h[0]].kind == "V" for _, _, h in comp):
                return edges
            return None
    return None


def _curl(d: Diagram, edge: int, kind: str, sign: str, side: int, loop_tokens=(), split=None, reverse=False) -> Diagram:
    top = d.max_label()
    loop = top + 1
    nodes = list(d.nodes)
    if edge in d.loops:
        e = edge
        if kind == "V":
            new = Node("V", (e, e, loop, loop) if side == 0 else (loop, loop, e, e))
        elif sign == "+":
            new = Node("X", (e, e, loop, loop) if side == 0 else (loop, loop, e, e), "+")
        else:
            new = Node("X", (e, loop, loop, e) if side == 0 else (loop, e, e, loop), "-")
        nodes.append(new)
        n = len(nodes) - 1
        reads = {e: (None, None, d.edge_tokens(e))}
        if loop_tokens:
            reads[loop] = (None, None, tuple(loop_tokens))
        bare_loops = tuple(x for x in d.loops if x != edge)
        out = _settle(d, nodes, bare_loops, reads)
        # both labels now join two ports of the new node; read them in their stored direction
        toks = dict(out.tokens)
        for lab in (e, loop):
            if lab in reads and reads[lab][2]:
                toks[lab] = tuple(reads[lab][2])
        return out.replace(tokens=tuple(toks.items()))
    if edge not in d.edge_ports:
        raise MoveError(f"no edge {edge}")
    tail, head = d.edge_direction(edge)
    if reverse:
        if kind == "V":
            raise MoveError("a virtual curl cannot turn a strand round")
        if _free_strand(d, edge) is None:
            raise MoveError(f"edge {edge} lies on a strand whose direction is fixed")
        # the curl runs against the stored direction; that strand has no classical crossing to object
        tail, head = head, tail
    along = _tokens_along(d, edge, tail, head)
    k = len(along) if split is None else split
    out = top + 2
    # the original label keeps the tail end and the first k tokens; the head end is relabelled
    hn = nodes[head[0]]
    hp = list(hn.ports)
    hp[head[1]] = out
    nodes[head[0]] = Node(hn.kind, tuple(hp), hn.sign)
    i, o, L = edge, out, loop
    if kind == "V":
        new = Node("V", (i, L, L, o) if side == 0 else (L, i, o, L))
    elif sign == "+":
        new = Node("X", (i, o, L, L) if side == 0 else (L, L, o, i), "+")
    else:
        new = Node("X", (i, L, L, o) if side == 0 else (L, i, o, L), "-")
    nodes.append(new)
    n = len(nodes) - 1
    pi, po = new.ports.index(i), new.ports.index(o)
    reads = {i: (tail, (n, pi), along[:k]), o: ((n, po), head, along[k:])}
    if loop_tokens:
        # the strand enters at i, leaves straight across into the loop and returns opposite o
        l1 = (pi + 2) % 4
        l2 = (po + 2) % 4
        reads[L] = ((n, l1), (n, l2), tuple(loop_tokens))
    return _settle(d, nodes, d.loops, reads)


def _curl_loop(d: Diagram, node_i: int) -> Optional[int]:
    """Label of a token-free edge joining two adjacent ports of the node, if any."""
    ports = d.nodes[node_i].ports
    for p in range(4):
        if ports[p] == ports[(p + 1) % 4] and not d.edge_tokens(ports[p]):
            return ports[p]
    return None


def _uncurl(d: Diagram, node_i: int, kind: str) -> Diagram:
    if not 0 <= node_i < len(d.nodes) or d.nodes[node_i].kind != kind:
        raise MoveError(f"node {node_i} is not a {'classical' if kind == 'X' else 'virtual'} crossing")
    if _curl_loop(d, node_i) is None:
        raise MoveError(f"node {node_i} has no token-free curl")
    return _splice_out(d, {node_i})


# ----------------------------------------------------------------------------
# R2


def _finger(d: Diagram, face_i, i: int, j: int, kind: str, over: str, splits=(None, None),
            reverse=(False, False), loops=(), flip=(False, False)) -> Diagram:
    """Push strand e across strand f, creating a bigon.

    The strands are two darts of one face, or crossing-free loops given in
    ``loops``: with one loop it plays e and dart ``i`` of the face plays f,
    with two loops no face is needed.  ``reverse`` runs a strand against its
    stored direction (allowed only where no classical crossing fixes it).  A
    loop stores no direction, so ``flip`` picks which of its two token
    readings runs along the new strand.
    """
    strands = []
    for lab in loops:
        if lab not in d.loops:
            raise MoveError(f"{lab} is not a crossing-free loop")
        strands.append((lab, None, None))
    if isinstance(face_i, tuple):
        # one face in each of two separate pieces: the pieces are placed in each other's face
        faces = _faces(d)
        if len(face_i) != 2 or any(not 0 <= x < len(faces) for x in face_i):
            raise MoveError(f"no faces {face_i}")
        fa, fb = faces[face_i[0]], faces[face_i[1]]
        piece = _pieces(d)
        if piece[fa[0][1][0]] == piece[fb[0][1][0]]:
            raise MoveError("the two faces lie in one connected piece")
        if loops or not (0 <= i < len(fa) and 0 <= j < len(fb)):
            raise MoveError("need one dart of each face")
        strands += [fa[i], fb[j]]
    elif len(loops) < 2:
        faces = _faces(d)
        if face_i is None or not 0 <= face_i < len(faces):
            raise MoveError(f"no face {face_i}")
        face = faces[face_i]
        picks = (i,) if loops else (i, j)
        if any(k is None or not 0 <= k < len(face) for k in picks) or len(set(picks)) < len(picks):
            raise MoveError("need two distinct darts of the face")
        strands += [face[k] for k in picks]
    (e, pe, qe), (f, pf, qf) = strands
    if e == f:
        raise MoveError("the two darts lie on the same edge")
    if any(reverse) and kind == "V":
        raise MoveError("a virtual finger cannot turn a strand round")
    for x, q, flag in ((e, qe, reverse[0]), (f, qf, reverse[1])):
        if flag and q is not None and _free_strand(d, x) is None:
            raise MoveError(f"edge {x} lies on a strand whose direction is fixed")
    if qe is not None and qf is not None and any(reverse) and reverse[0] != reverse[1]:
        comp = _free_strand(d, e)
        if comp and f in comp:
            raise MoveError("both darts lie on one strand; turn it round for both or neither")
    top = d.max_label()
    e2, f2 = top + 1, top + 3
    # a loop closes up through its own label, so its far piece keeps the name
    e3 = e if qe is None else top + 2
    f3 = f if qf is None else top + 4
    nodes = list(d.nodes)
    for (lab, q) in ((e3, qe), (f3, qf)):
        if q is None:
            continue
        nd = nodes[q[0]]
        ps = list(nd.ports)
        ps[q[1]] = lab
        nodes[q[0]] = Node(nd.kind, tuple(ps), nd.sign)
    e_along = (qe is None or (pe, qe) == d.edge_direction(e)) != reverse[0]
    f_along = (qf is None or (pf, qf) == d.edge_direction(f)) != reverse[1]
    # compass positions in counterclockwise order: E=0, N=1, W=2, S=3
    x1 = [f3, e, f2, e2]  # right crossing: e comes down from N
    x2 = [f2, e3, f, e2]  # left crossing: e goes back up to N
    if over == "first":
        u1, o1 = (2 if f_along else 0), (1 if e_along else 3)
        u2, o2 = (2 if f_along else 0), (3 if e_along else 1)
    else:
        u1, o1 = (1 if e_along else 3), (2 if f_along else 0)
        u2, o2 = (3 if e_along else 1), (2 if f_along else 0)
    n1, n2 = len(nodes), len(nodes) + 1
    nodes.append(_crossing(kind, x1, u1, o1))
    nodes.append(_crossing(kind, x2, u2, o2))
    # e reaches the bigon at x1 (from its near end) and leaves it at x2
    reads = {}
    for x, p, q, k, far, enter, leave, fl in (
        (e, pe, qe, splits[0], e3, (n1, nodes[n1].ports.index(e)), (n2, nodes[n2].ports.index(e3)), flip[0]),
        (f, pf, qf, splits[1], f3, (n2, nodes[n2].ports.index(f)), (n1, nodes[n1].ports.index(f3)), flip[1]),
    ):
        if q is None:
            ts = d.edge_tokens(x)
            reads[x] = (leave, enter, tuple(_flip_token(t) for t in reversed(ts)) if fl else ts)
            continue
        along = _tokens_along(d, x, p, q)
        cut = len(along) if k is None else k
        reads[x] = (p, enter, along[:cut])
        reads[far] = (leave, q, along[cut:])
    rest_loops = tuple(x for x in d.loops if x not in loops)
    return _settle(d, nodes, rest_loops, reads)


def _bigon_ok(d: Diagram, face, kind: str) -> bool:
    if len(face) != 2:
        return False
    (g1, p1, q1), (g2, p2, q2) = face
    a, b = q1[0], q2[0]
    if a == b or g1 == g2:
        return False
    if d.nodes[a].kind != kind or d.nodes[b].kind != kind:
        return False
    if d.edge_tokens(g1) or d.edge_tokens(g2):
        return False
    if kind == "V":
        return True
    # the strand along g1 must be over at both ends or under at both
    return (p1[1] % 2) == (q1[1] % 2)


def _unfinger(d: Diagram, face_i: int, kind: str) -> Diagram:
    faces = _faces(d)
    if not 0 <= face_i < len(faces) or not _bigon_ok(d, faces[face_i], kind):
        raise MoveError(f"face {face_i} is not a removable bigon")
    face = faces[face_i]
    return _splice_out(d, {face[0][2][0], face[1][2][0]})


# ----------------------------------------------------------------------------
# R3


def _triangle_kinds_ok(d: Diagram, face, allowed: str) -> bool:
    if len(face) != 3:
        return False
    xs = [dart[2][0] for dart in face]
    if len(set(xs)) != 3:
        return False
    kinds = [d.nodes[x].kind for x in xs]
    nv = kinds.count("V")
    if allowed == "R3" and nv != 0:
        return False
    if allowed == "vR3" and nv != 3:
        return False
    if allowed == "mR3" and nv != 2:
        return False
    if any(d.edge_tokens(dart[0]) for dart in face):
        return False
    if allowed == "R3":
        # some strand must pass over (or under) both of its crossings
        for k in range(3):
            # dart k is over (or under) at both ends when its two ports have the same parity
            start_port = face[k][1][1]
            end_port = face[k][2][1]
            if start_port % 2 == end_port % 2:
                return True
        return False
    return True


def _slide(d: Diagram, face_i: int, allowed: str) -> Diagram:
    faces = _faces(d)
    if not 0 <= face_i < len(faces) or not _triangle_kinds_ok(d, faces[face_i], allowed):
        raise MoveError(f"face {face_i} is not a triangle admitting {allowed}")
    face = faces[face_i]
    # node x_k is where dart k-1 arrives, at port p_k
    xs = [face[k - 1][2][0] for k in range(3)]
    ps = [face[k - 1][2][1] for k in range(3)]
    inner = [face[k][0] for k in range(3)]  # I_k joins x_k and x_{k+1}

    def outer(m: int) -> int:
        k, r = divmod(m % 6, 2)
        return d.nodes[xs[k]].ports[(ps[k] + 1 + r) % 4]

    def outer_port(m: int) -> Port:
        k, r = divmod(m % 6, 2)
        return (xs[k], (ps[k] + 1 + r) % 4)

    nodes = list(d.nodes)
    moved: Dict[Port, Port] = {}
    for k in range(3):
        old = d.nodes[xs[k]]
        new = [0] * 4
        new[ps[k]] = outer(2 * k - 2)
        new[(ps[k] + 1) % 4] = inner[k]
        new[(ps[k] + 2) % 4] = inner[k - 1]
        new[(ps[k] + 3) % 4] = outer(2 * k + 3)
        moved[outer_port(2 * k - 2)] = (xs[k], ps[k])
        moved[outer_port(2 * k + 3)] = (xs[k], (ps[k] + 3) % 4)
        nodes[xs[k]] = Node(old.kind, tuple(new), old.sign)
    return _settle(d, nodes, d.loops, {}, moved)


# ----------------------------------------------------------------------------
# dispatch


def apply_move(d: Diagram, m: ReidemeisterMove, with_inverse: bool = False):
    """Apply a move; with ``with_inverse`` also return a move undoing it."""
    label = m.label
    if label in ("R1+", "vR1+"):
        kind = "X" if label == "R1+" else "V"
        out = _curl(d, m.site, kind, m.param("sign", "+"), m.param("side", 0), m.param("loop_tokens", ()), m.param("split"), m.param("reverse", False))
        inv = _after_curl(out, kind, m)
    elif label in ("R1-", "vR1-"):
        out = _uncurl(d, m.site, "X" if label == "R1-" else "V")
        inv = None
    elif label in ("R2", "vR2"):
        darts = tuple(m.param("darts", (0, 1))) + (None, None)
        kind = "X" if label == "R2" else "V"
        out = _finger(d, m.site, darts[0], darts[1], kind, m.param("over", "first"), m.param("splits", (None, None)),
                      m.param("reverse", (False, False)), tuple(m.param("loops", ())), m.param("flip", (False, False)))
        inv = _after_finger(out, kind, m)
    elif label in ("R2-", "vR2-"):
        out = _unfinger(d, m.site, "X" if label == "R2-" else "V")
        inv = None
    elif label in ("R3", "vR3", "mR3"):
        out = _slide(d, m.site, label)
        inv = _after_slide(d, out, m)
    else:  # pragma: no cover - guarded by ReidemeisterMove
        raise MoveError(f"unsupported move {label}")
    if not with_inverse:
        return out
    if inv is None:
        inv = _search_inverse(d, out, m)
    return out, inv


def _wrap(label: str, site, **params) -> ReidemeisterMove:
    if label.startswith("v") or label == "mR3":
        return detour(label, site, **params)
    return move(label, site, **params)


def _after_curl(out: Diagram, kind: str, m: ReidemeisterMove) -> ReidemeisterMove:
    return _wrap("R1-" if kind == "X" else "vR1-", len(out.nodes) - 1)


def _after_finger(out: Diagram, kind: str, m: ReidemeisterMove) -> Optional[ReidemeisterMove]:
    n = len(out.nodes)
    new = {n - 2, n - 1}
    for fi, face in enumerate(_faces(out)):
        if len(face) == 2 and {face[0][2][0], face[1][2][0]} == new and _bigon_ok(out, face, kind):
            return _wrap("R2-" if kind == "X" else "vR2-", fi)
    return None


def _after_slide(d: Diagram, out: Diagram, m: ReidemeisterMove) -> Optional[ReidemeisterMove]:
    xs = {dart[2][0] for dart in _faces(d)[m.site]}
    for fi, face in enumerate(_faces(out)):
        if len(face) == 3 and {dart[2][0] for dart in face} == xs and _triangle_kinds_ok(out, face, m.label):
            return _wrap(m.label, fi)
    return None


_INVERSE_LABEL = {"R1-": "R1+", "vR1-": "vR1+", "R2-": "R2", "vR2-": "vR2"}


def _search_inverse(d: Diagram, out: Diagram, m: ReidemeisterMove) -> ReidemeisterMove:
    """Find, by trying every site, a move taking ``out`` back to a diagram isomorphic to ``d``."""
    target = _INVERSE_LABEL.get(m.label, m.label)
    for cand in enumerate_sites(out, target):
        try:
            back = apply_move(out, cand)
        except MoveError:
            continue
        if isomorphic(back, d):
            return cand
    raise MoveError(f"no inverse found for {m.describe()}")


# ----------------------------------------------------------------------------
# site enumeration


def enumerate_sites(d: Diagram, label: str) -> List[ReidemeisterMove]:
    """Every applicable move of one kind (R1+, R1-, R2, R2-, R3 or a detour variant)."""
    out: List[ReidemeisterMove] = []
    if label in ("R1+", "vR1+"):
        for e in d.edges:
            signs = ("+", "-") if label == "R1+" else ("+",)
            # with tokens on the edge the curl may sit between any two of them
            splits = [None] + list(range(len(d.edge_tokens(e)))) if e in d.edge_ports else [None]
            turns = (False, True) if label == "R1+" and e in d.edge_ports and _free_strand(d, e) else (False,)
            for s in signs:
                for side in (0, 1):
                    for k, rev in [(k, rev) for k in splits for rev in turns]:
                        extra = {} if k is None else {"split": k}
                        if rev:
                            extra["reverse"] = True
                        if label == "R1+":
                            out.append(_wrap(label, e, sign=s, side=side, **extra))
                        else:
                            out.append(_wrap(label, e, side=side, **extra))
    elif label in ("R1-", "vR1-"):
        kind = "X" if label == "R1-" else "V"
        for i, nd in enumerate(d.nodes):
            if nd.kind == kind and _curl_loop(d, i) is not None:
                out.append(_wrap(label, i))
    elif label in ("R2", "vR2"):
        overs2 = ("first", "second") if label == "R2" else ("first",)
        for fi, face in enumerate(_faces(d)):
            for i in range(len(face)):
                for j in range(len(face)):
                    if i < j and face[i][0] != face[j][0]:
                        overs = ("first", "second") if label == "R2" else ("first",)
                        # the finger may enter each strand between any two of its tokens
                        ke = [None] + list(range(len(d.edge_tokens(face[i][0]))))
                        kf = [None] + list(range(len(d.edge_tokens(face[j][0]))))
                        # a virtual finger forces no direction, so only classical ones may turn strands
                        ci = _free_strand(d, face[i][0]) if label == "R2" else None
                        cj = _free_strand(d, face[j][0]) if label == "R2" else None
                        turns = [(a, b) for a in ((False, True) if ci else (False,))
                                 for b in ((False, True) if cj else (False,))
                                 if not (ci and face[j][0] in ci and a != b)]
                        for ov in overs:
                            for sp in [(a, b) for a in ke for b in kf]:
                                for rev in turns:
                                    extra = {} if sp == (None, None) else {"splits": sp}
                                    if any(rev):
                                        extra["reverse"] = rev
                                    out.append(_wrap(label, fi, darts=(i, j), over=ov, **extra))
        # fingers between separate pieces of the drawing
        faces = _faces(d)
        piece = _pieces(d)
        for fa, fb in [(a, b) for a in range(len(faces)) for b in range(len(faces)) if a < b]:
            A, B = faces[fa], faces[fb]
            if piece[A[0][1][0]] == piece[B[0][1][0]]:
                continue
            for i in range(len(A)):
                for j in range(len(B)):
                    ke = [None] + list(range(len(d.edge_tokens(A[i][0]))))
                    kf = [None] + list(range(len(d.edge_tokens(B[j][0]))))
                    ci = _free_strand(d, A[i][0]) if label == "R2" else None
                    cj = _free_strand(d, B[j][0]) if label == "R2" else None
                    turns2 = [(a, b) for a in ((False, True) if ci else (False,)) for b in ((False, True) if cj else (False,))]
                    for ov in overs2:
                        for sp in [(a, b) for a in ke for b in kf]:
                            for rev in turns2:
                                extra = {} if sp == (None, None) else {"splits": sp}
                                if any(rev):
                                    extra["reverse"] = rev
                                out.append(_wrap(label, (fa, fb), darts=(i, j), over=ov, **extra))
        # fingers from crossing-free loops, which sit in no face of the drawing
        overs = ("first", "second") if label == "R2" else ("first",)
        turns = ((False, False), (True, False)) if label == "R2" else ((False, False),)
        for lp in d.loops:
            for fi, face in enumerate(_faces(d)):
                for i in range(len(face)):
                    kf = [None] + list(range(len(d.edge_tokens(face[i][0]))))
                    free = _free_strand(d, face[i][0]) if label == "R2" else None
                    loop_turns = turns + (((False, True), (True, True)) if free else ())
                    flips = ((False, False), (True, False)) if d.edge_tokens(lp) else ((False, False),)
                    for ov in overs:
                        for rev, fl, k in [(r, f, k) for r in loop_turns for f in flips for k in kf]:
                            extra = {"reverse": rev} if any(rev) else {}
                            if any(fl):
                                extra["flip"] = fl
                            if k is not None:
                                extra["splits"] = (None, k)
                            out.append(_wrap(label, fi, darts=(i,), loops=(lp,), over=ov, **extra))
        both = ((False, False), (True, False), (False, True), (True, True))
        for a, b in [(a, b) for a in d.loops for b in d.loops if a < b]:
            flips = [fl for fl in both if (d.edge_tokens(a) or not fl[0]) and (d.edge_tokens(b) or not fl[1])]
            for ov in overs:
                for rev, fl in [(r, f) for r in (both if label == "R2" else both[:1]) for f in flips]:
                    extra = {"reverse": rev} if any(rev) else {}
                    if any(fl):
                        extra["flip"] = fl
                    out.append(_wrap(label, None, loops=(a, b), over=ov, **extra))
    elif label in ("R2-", "vR2-"):
        kind = "X" if label == "R2-" else "V"
        for fi, face in enumerate(_faces(d)):
            if _bigon_ok(d, face, kind):
                out.append(_wrap(label, fi))
    elif label in ("R3", "vR3", "mR3"):
        for fi, face in enumerate(_faces(d)):
            if _triangle_kinds_ok(d, face, label):
                out.append(_wrap(label, fi))
    else:
        raise ValueError(f"unknown move label {label!r}")
    return out


ALL_LABELS = ("R1+", "R1-", "R2", "R2-", "R3") + DETOUR_VARIANTS


def sample_moves(d: Diagram, rng: random.Random, per_kind: int = 2, labels: Sequence[str] = ALL_LABELS) -> List[ReidemeisterMove]:
    """A seeded selection of applicable moves, up to ``per_kind`` of each label."""
    chosen = []
    for label in labels:
        sites = enumerate_sites(d, label)
        if len(sites) > per_kind:
            sites = rng.sample(sites, per_kind)
        chosen.extend(sites)
    return chosen
