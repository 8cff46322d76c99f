import json
import os
import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from khdot.bracket import (
    bourgoin_bracket,
    bracket_to_q,
    expected_euler,
    graded_euler_characteristic,
    jones_normalized,
    kauffman_bracket,
    state_sum_euler,
)
from khdot.complex import TheorySpec, build_complex
from khdot.corpus import random_diagram
from khdot.diagram import parse_diagram
from khdot.moves import apply_move, sample_moves
from khdot.poly import LaurentPoly
from khdot.states import CubeLimitError

from oracles import a, bourgoin_oracle, bracket_oracle, to_sympy

GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "brackets.json")


def poly_a(expr):
    return sympy.expand(sympy.sympify(expr, locals={"a": a}))


def test_small_bracket_values(corpus):
    assert str(kauffman_bracket(corpus["unknot"])) == "1"
    assert to_sympy(kauffman_bracket(corpus["kink-positive"])) == -(a**3)
    assert to_sympy(kauffman_bracket(corpus["hopf"])) == -(a**4) - a**-4


def test_brackets_match_frozen_oracle_values(corpus):
    with open(GOLDEN) as fh:
        frozen = json.load(fh)
    assert set(frozen) == set(corpus)
    for name, d in corpus.items():
        assert to_sympy(kauffman_bracket(d)) == poly_a(frozen[name]), name


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_bracket_matches_state_sum_oracle(seed):
    d = random_diagram(random.Random(seed), max_classical=5)
    assert sympy.expand(to_sympy(kauffman_bracket(d)) - bracket_oracle(d)) == 0


def test_jones_normalisation_of_kinks(corpus):
    for name in ("unknot", "kink-positive", "kink-negative"):
        assert str(jones_normalized(corpus[name])) == "1"


def test_mirror_trefoils_are_conjugate(corpus):
    right = to_sympy(jones_normalized(corpus["trefoil-right"]))
    left = to_sympy(jones_normalized(corpus["trefoil-left"]))
    assert sympy.expand(right.subs(a, 1 / a) - left) == 0
    assert right != left


def test_jones_invariant_under_sampled_moves(corpus):
    rng = random.Random(11)
    for name, d in corpus.items():
        before = jones_normalized(d)
        for m in sample_moves(d, rng, per_kind=2):
            after = apply_move(d, m)
            assert jones_normalized(after) == before, (name, m.describe())


def test_bourgoin_small_values(corpus):
    M = LaurentPoly.var("M", ("a", "M"))
    assert bourgoin_bracket(corpus["unknot-through-bar"]) == M
    assert to_sympy(bourgoin_bracket(corpus["unknot"])) == -(a**2) - a**-2
    assert str(bourgoin_bracket(corpus["unknot"], normalized=True)) == "1"


def test_bourgoin_kink_with_bar_on_outer_edge():
    d = parse_diagram("X 1 1 2 2 +\nB 2\n")
    assert sympy.expand(to_sympy(bourgoin_bracket(d)) - bourgoin_oracle(d)) == 0
    assert to_sympy(bourgoin_bracket(d)) == -(a**3) * sympy.Symbol("M")


def test_bourgoin_matches_oracle_on_corpus(corpus):
    for name, d in corpus.items():
        assert sympy.expand(to_sympy(bourgoin_bracket(d)) - bourgoin_oracle(d)) == 0, name


def test_bourgoin_without_bars_reduces_to_kauffman(corpus):
    loop = -(a**2) - a**-2
    for name in ("trefoil-right", "figure-eight", "virtual-trefoil"):
        d = corpus[name]
        raw = to_sympy(bourgoin_bracket(d))
        assert sympy.expand(raw - loop * to_sympy(kauffman_bracket(d))) == 0


def test_normalised_bourgoin_undefined_without_orienting_circle(corpus):
    with pytest.raises(ValueError):
        bourgoin_bracket(corpus["unknot-through-bar"], normalized=True)


def test_unknot_euler_characteristic(corpus):
    c = build_complex(corpus["unknot"], TheorySpec("khovanov", "Q"))
    assert graded_euler_characteristic(c) == LaurentPoly("q", {(1,): 1, (-1,): 1})


def test_euler_characteristic_is_substituted_bracket(corpus):
    for name in ("trefoil-right", "figure-eight", "hopf", "virtual-trefoil"):
        d = corpus[name]
        c = build_complex(d, TheorySpec("khovanov", "Q", normalize=False))
        assert c.euler_characteristic() == bracket_to_q(d, kauffman_bracket(d)), name


def test_bourgoin_substitution_gives_dotted_euler(corpus):
    for name in ("unknot-through-bar", "kink-positive"):
        d = corpus[name]
        c = build_complex(d, TheorySpec("khovanov", "Q", ("bars",), normalize=False))
        vars = ("q", "g_bars")
        image = LaurentPoly.monomial(vars, 1, q=1, g_bars=-1) + LaurentPoly.monomial(vars, 1, q=-1, g_bars=1)
        assert c.euler_characteristic() == bracket_to_q(d, bourgoin_bracket(d), image)


def test_expected_euler_tracks_shift(corpus):
    c = build_complex(corpus["trefoil-right"], TheorySpec("khovanov", "Z2"))
    assert c.euler_characteristic() == expected_euler(c)
    assert state_sum_euler(corpus["unknot"]) == LaurentPoly("q", {(1,): 1, (-1,): 1})


def test_bracket_respects_cube_limit(corpus):
    with pytest.raises(CubeLimitError):
        kauffman_bracket(corpus["figure-eight"], limit=3)
