"""The shipped diagram corpus and generators for braid closures and random diagrams.

Braid words are sequences of nonzero ints (``i`` for sigma_i, ``-i`` for its
inverse, 1-based) and strings ``"v<i>"`` for a virtual crossing between
strands i and i+1.  Strands run upward; the closure joins the top of each
strand to its bottom around an annulus, and one marker of set 0 on every
bottom edge records the winding around that annulus.
"""

from __future__ import annotations

import random
from importlib import resources
from typing import Dict, List, Optional, Sequence, Union

from .diagram import Diagram, Node, parse_diagram

Letter = Union[int, str]


def _find(parent: Dict[int, int], x: int) -> int:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def braid_closure(word: Sequence[Letter], strands: int, markers: bool = True, integral: bool = True) -> Diagram:
    """Closure of a (virtual) braid word, optionally with annulus markers."""
    nxt = 1
    bottom = list(range(nxt, nxt + strands))
    nxt += strands
    current = list(bottom)
    raw_nodes = []
    for letter in word:
        if isinstance(letter, str):
            if not letter.startswith("v"):
                raise ValueError(f"bad braid letter {letter!r}")
            i, kind = int(letter[1:]) - 1, "v"
        else:
            if letter == 0:
                raise ValueError("braid letters are nonzero")
            i, kind = abs(letter) - 1, ("+" if letter > 0 else "-")
        if not 0 <= i < strands - 1:
            raise ValueError(f"letter {letter!r} needs at least {i + 2} strands")
        sw, se = current[i], current[i + 1]
        nw, ne = nxt, nxt + 1
        nxt += 2
        if kind == "+":
            raw_nodes.append(("X", (se, ne, nw, sw), "+"))
        elif kind == "-":
            raw_nodes.append(("X", (sw, se, ne, nw), "-"))
        else:
            raw_nodes.append(("V", (sw, se, ne, nw), ""))
        # crossing strands swap positions
        current[i], current[i + 1] = nw, ne
    parent = {e: e for e in range(1, nxt)}
    for top, bot in zip(current, bottom):
        parent[_find(parent, top)] = _find(parent, bot)
    used = sorted({_find(parent, e) for e in range(1, nxt)})
    relabel = {r: k + 1 for k, r in enumerate(used)}
    lab = lambda e: relabel[_find(parent, e)]
    nodes = tuple(Node(k, tuple(lab(e) for e in ports), s) for k, ports, s in raw_nodes)
    touched = {e for nd in nodes for e in nd.ports}
    loops = tuple(sorted(lab(e) for e in bottom if lab(e) not in touched))
    tokens = ()
    if markers:
        tokens = tuple((lab(e), (("M", 0, 1),)) for e in bottom)
    return Diagram(nodes, loops, tokens, frozenset({0}) if markers and integral else frozenset())


def mirror(d: Diagram) -> Diagram:
    """Exchange over- and under-passes at every classical crossing."""
    nodes = []
    for nd in d.nodes:
        if nd.kind == "V":
            nodes.append(nd)
        else:
            a, b, c, dd = nd.ports
            if nd.sign == "-":
                nodes.append(Node("X", (b, c, dd, a), "+"))
            else:
                nodes.append(Node("X", (dd, a, b, c), "-"))
    return d.replace(nodes=tuple(nodes))


def connected_sum(d1: Diagram, d2: Diagram, e1: Optional[int] = None, e2: Optional[int] = None) -> Diagram:
    """Cut one edge in each diagram and join the four loose ends, respecting orientation."""
    off = d1.max_label()
    e1 = min(d1.edges) if e1 is None else e1
    e2 = (min(d2.edges) if e2 is None else e2) + off
    _, head1 = d1.edge_direction(e1)
    _, head2 = d2.edge_direction(e2 - off)
    nodes = []
    for k, nd in enumerate(d1.nodes):
        ports = list(nd.ports)
        if k == head1[0]:
            ports[head1[1]] = e2
        nodes.append(Node(nd.kind, tuple(ports), nd.sign))
    for k, nd in enumerate(d2.nodes):
        ports = [e + off for e in nd.ports]
        if k == head2[0]:
            ports[head2[1]] = e1
        nodes.append(Node(nd.kind, tuple(ports), nd.sign))
    tokens = list(d1.tokens) + [(e + off, ts) for e, ts in d2.tokens]
    loops = tuple(d1.loops) + tuple(e + off for e in d2.loops)
    return Diagram(tuple(nodes), loops, tuple(tokens), d1.integral | d2.integral)


def random_diagram(rng: random.Random, max_classical: int = 6, strands: Optional[int] = None) -> Diagram:
    """A seeded virtual braid closure with random bars and markers."""
    if strands is None:
        strands = rng.randint(2, 4)
    n_classical = rng.randint(1, max_classical)
    n_virtual = rng.randint(0, 2)
    letters: List[Letter] = []
    for _ in range(n_classical):
        i = rng.randint(1, strands - 1)
        letters.append(i if rng.random() < 0.5 else -i)
    for _ in range(n_virtual):
        letters.insert(rng.randint(0, len(letters)), f"v{rng.randint(1, strands - 1)}")
    d = braid_closure(letters, strands, markers=rng.random() < 0.5)
    tokens = {e: list(ts) for e, ts in d.tokens}
    for e in d.edges:
        if rng.random() < 0.2:
            tokens.setdefault(e, []).append(("B",))
    return d.replace(tokens=tuple((e, tuple(ts)) for e, ts in sorted(tokens.items())))


def random_diagrams(seed: int, count: int, max_classical: int = 6) -> List[Diagram]:
    rng = random.Random(seed)
    return [random_diagram(rng, max_classical) for _ in range(count)]


# ----------------------------------------------------------------------------
# shipped files

CORPUS_NAMES = (
    "unknot",
    "kink-positive",
    "kink-negative",
    "hopf",
    "trefoil-left",
    "trefoil-right",
    "figure-eight",
    "virtual-trefoil",
    "virtual-hopf",
    "kishino-style",
    "unknot-through-bar",
    "braid2-trefoil",
    "braid3-figure-eight",
    "long-trefoil",
)


def corpus_text(name: str) -> str:
    if name not in CORPUS_NAMES:
        raise KeyError(name)
    return resources.files("khdot.data").joinpath(f"{name}.kd").read_text(encoding="utf-8")


def load_corpus(names: Optional[Sequence[str]] = None) -> Dict[str, Diagram]:
    return {name: parse_diagram(corpus_text(name)) for name in (names or CORPUS_NAMES)}


def is_classical(d: Diagram) -> bool:
    return not d.virtuals and not d.has_bars
