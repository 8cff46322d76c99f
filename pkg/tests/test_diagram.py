import random

import pytest
from hypothesis import given, settings, strategies as st

from khdot.corpus import CORPUS_NAMES, corpus_text, random_diagram
from khdot.diagram import (
    DiagramError,
    DiagramSyntaxError,
    IncidenceError,
    UnknownDirectiveError,
    atom_genus,
    canonical_relabel,
    isomorphic,
    parse_diagram,
    serialize,
    writhe,
)
from oracles import writhe_oracle

TREFOIL = "X 1 5 2 4 +\nX 3 1 4 6 +\nX 5 3 6 2 +\n"


def test_single_loop_parses_as_crossingless_component():
    d = parse_diagram("U 1")
    assert d.n == 0
    assert d.components == 1


def test_trefoil_counts():
    d = parse_diagram(TREFOIL)
    assert d.n == 3
    assert len(d.edges) == 6
    assert d.components == 1


def test_half_edge_used_three_times_is_rejected():
    with pytest.raises(IncidenceError, match="half-edge 4"):
        parse_diagram("X 1 4 2 4 +\nX 3 4 1 2 +\n")


def test_syntax_error_carries_position():
    with pytest.raises(DiagramSyntaxError) as info:
        parse_diagram("X 1 2 3 4 +\nX 1 2 three 4 +\n")
    assert info.value.line == 2
    assert info.value.col == 7


def test_unknown_directive():
    with pytest.raises(UnknownDirectiveError):
        parse_diagram("Q 1 2\n")


def test_bad_sign_and_marker_gaps():
    with pytest.raises(DiagramSyntaxError):
        parse_diagram("X 1 2 3 4 *\n")
    with pytest.raises(DiagramError, match="marker sets"):
        parse_diagram("U 1 1\nM 1 1\n")


def test_comments_and_blank_lines_are_ignored():
    d = parse_diagram("# a comment\n\nU 1  # trailing\nB 1\n")
    assert d.has_bars and d.n == 0


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_corpus_round_trip(name):
    d = parse_diagram(corpus_text(name))
    again = parse_diagram(serialize(d))
    assert again == d


def test_writhe_examples(corpus):
    assert writhe(corpus["unknot"]) == 0
    assert writhe(corpus["kink-positive"]) == 1
    assert writhe(corpus["kink-negative"]) == -1
    assert writhe(corpus["trefoil-right"]) == 3
    assert writhe(corpus["trefoil-left"]) == -3


def test_writhe_matches_sign_count(corpus):
    for d in corpus.values():
        if d.oriented:
            assert writhe(d) == writhe_oracle(d)


def test_atom_genus_examples(corpus):
    assert atom_genus(corpus["unknot"]) == 0
    assert atom_genus(corpus["trefoil-right"]) == 0
    assert atom_genus(corpus["figure-eight"]) == 0
    assert atom_genus(corpus["virtual-trefoil"]) == 1
    assert atom_genus(corpus["kishino-style"]) == 2


def test_mirror_pair_is_not_isomorphic(corpus):
    assert not isomorphic(corpus["trefoil-left"], corpus["trefoil-right"])
    assert isomorphic(corpus["trefoil-right"], corpus["braid2-trefoil"].replace(tokens=(), integral=frozenset()))


def _relabel(d, rng):
    labels = sorted(set(d.edges) | set(d.loops))
    image = rng.sample(range(1, 10 * len(labels) + 10), len(labels))
    f = dict(zip(labels, image))
    nodes = [nd.__class__(nd.kind, tuple(f[e] for e in nd.ports), nd.sign) for nd in d.nodes]
    rng.shuffle(nodes)
    return d.replace(
        nodes=tuple(nodes),
        loops=tuple(f[e] for e in d.loops),
        tokens=tuple((f[e], ts) for e, ts in d.tokens),
    )


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_relabelling_preserves_canonical_form(seed):
    rng = random.Random(seed)
    d = random_diagram(rng, max_classical=5)
    e = _relabel(d, rng)
    assert isomorphic(d, e)
    assert canonical_relabel(d) == canonical_relabel(e)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_serialize_round_trip_random(seed):
    d = random_diagram(random.Random(seed))
    assert parse_diagram(serialize(d)) == d
