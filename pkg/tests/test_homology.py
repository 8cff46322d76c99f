import json
import os
import random
from dataclasses import replace

import pytest

from khdot.complex import TheorySpec, build_complex, split_differential
from khdot.corpus import is_classical, random_diagram
from khdot.homology import (
    HomologyError,
    HomologyTable,
    diagonals,
    half_integer_groups,
    homology_field,
    homology_integral,
    poincare_polynomial,
    report_bounds,
    thickness,
)
from khdot.poly import LaurentPoly

from oracles import bigraded_oracle, homology_by_height_oracle, integral_homology_oracle

GOLDEN = os.path.join(os.path.dirname(__file__), "golden")


def golden(name, ring):
    with open(os.path.join(GOLDEN, f"{name}.{ring}.json")) as fh:
        rows = json.load(fh)["groups"]
    return {(r["i"], r["j"]): (r["rank"], tuple(r["torsion"])) for r in rows}


def as_groups(t):
    return {k: v for k, v in t.groups.items() if v[0] or v[1]}


def table(d, ring, dottings=()):
    c = build_complex(d, TheorySpec("khovanov", ring, dottings))
    return homology_integral(c) if ring == "Z" else homology_field(c)


@pytest.mark.parametrize(
    "name, ring",
    [
        ("trefoil-right", "Q"),
        ("trefoil-right", "Z"),
        ("trefoil-right", "Z2"),
        ("trefoil-left", "Q"),
        ("trefoil-left", "Z"),
        ("figure-eight", "Q"),
        ("figure-eight", "Z"),
        ("hopf", "Q"),
        ("hopf", "Z"),
    ],
)
def test_matches_frozen_golden(corpus, name, ring):
    assert as_groups(table(corpus[name], ring)) == golden(name, ring)


def test_right_trefoil_values(corpus):
    t = table(corpus["trefoil-right"], "Q")
    assert sorted(t.nonzero()) == [(0, 1), (0, 3), (2, 5), (3, 9)]
    assert all(t.groups[k][0] == 1 for k in t.nonzero())
    tz = table(corpus["trefoil-right"], "Z")
    assert list(tz.torsion().values()) == [(2,)]


def test_unknot(corpus):
    t = table(corpus["unknot"], "Q")
    assert as_groups(t) == {(0, 1): (1, ()), (0, -1): (1, ())}
    assert table(corpus["unknot"], "Z").torsion() == {}
    assert poincare_polynomial(t) == LaurentPoly(("T", "q"), {(0, 1): 1, (0, -1): 1})


def test_zero_complex_has_empty_table(corpus):
    c = build_complex(corpus["unknot"], TheorySpec("khovanov", "Q"))
    empty = replace(c, bases=[[]], matrices=[], index=[])
    t = homology_field(empty)
    assert t.nonzero() == []
    assert poincare_polynomial(t).is_zero()


def test_trefoil_poincare_polynomial(corpus):
    p = poincare_polynomial(table(corpus["trefoil-right"], "Q"))
    terms = {(0, 1): 1, (0, 3): 1, (2, 5): 1, (3, 9): 1}
    assert p == LaurentPoly(("T", "q"), terms)


def test_field_homology_against_oracle_on_virtual_corpus(corpus):
    for name in ("virtual-trefoil", "virtual-hopf", "kishino-style", "unknot-through-bar"):
        for ring in ("Z2", "Q"):
            c = build_complex(corpus[name], TheorySpec("khovanov", ring))
            t = homology_field(c)
            assert {k: v for k, v in as_groups(t).items()} == bigraded_oracle(c, ring), (name, ring)


def test_height_totals_against_whole_matrix_oracle():
    rng = random.Random(17)
    for _ in range(12):
        d = random_diagram(rng, max_classical=5)
        for ring in ("Z2", "Q"):
            c = build_complex(d, TheorySpec("khovanov", ring, ("bars",)))
            assert homology_field(c).by_height() == homology_by_height_oracle(c, ring)


def test_integral_homology_against_smith_oracle(corpus):
    for name, d in corpus.items():
        if not is_classical(d) or d.n > 4:
            continue
        c = build_complex(d, TheorySpec("khovanov", "Z"))
        t = homology_integral(c)
        by_height = {}
        for key, (r, tors) in t.groups.items():
            f0, t0 = by_height.get(key[0], (0, ()))
            by_height[key[0]] = (f0 + r, tuple(sorted(t0 + tors)))
        by_height = {k: v for k, v in by_height.items() if v[0] or v[1]}
        assert by_height == integral_homology_oracle(c), name


def test_rational_ranks_from_integer_complex(corpus):
    c = build_complex(corpus["trefoil-right"], TheorySpec("khovanov", "Z"))
    assert as_groups(homology_field(c, field_name="Q")) == golden("trefoil-right", "Q")


def test_wrong_ring_errors(corpus):
    c = build_complex(corpus["trefoil-right"], TheorySpec("khovanov", "Z2"))
    with pytest.raises(HomologyError):
        homology_integral(c)
    with pytest.raises(HomologyError):
        homology_field(c, field_name="Q")
    u = build_complex(corpus["trefoil-right"], TheorySpec("frobenius-universal", "Z[h,t]"))
    with pytest.raises(HomologyError):
        homology_field(u)


def test_blocks_must_be_preserved(corpus):
    c = build_complex(corpus["long-trefoil"], TheorySpec("khovanov", "Z2", ("endpoint",)))
    with pytest.raises(HomologyError):
        homology_field(c, gradings=("j", "g_endpoint"))


def test_dotted_homology_of_long_trefoil_is_two_reduced_copies(corpus):
    c = build_complex(corpus["long-trefoil"], TheorySpec("khovanov", "Q", ("endpoint",)))
    prime, _ = split_differential(c, "g_endpoint")
    t = homology_field(c, prime, ("j", "g_endpoint"))
    # the summand with g = -1 is the one with g = +1 moved up two quantum steps
    lower = {(k[0], k[1]): v for k, v in t.groups.items() if k[2] == -1}
    upper = {(k[0], k[1] + 2): v for k, v in t.groups.items() if k[2] == 1}
    assert lower == upper
    assert sum(r for r, _ in lower.values()) == 3


def test_audit_balances(corpus):
    t = table(corpus["figure-eight"], "Z2")
    a = t.audit
    assert a["chain_dim"] == a["homology_dim"] + 2 * a["matrix_rank"]


def test_thickness_of_alternating_trefoil(corpus):
    t = table(corpus["trefoil-right"], "Q")
    assert diagonals(t) == [1, 3]
    rep = report_bounds(t, corpus["trefoil-right"])
    assert rep.thickness == 2 and rep.genus == 0 and rep.thickness_ok


def test_obstruction_fires_on_unknot_through_bar(corpus):
    d = corpus["unknot-through-bar"]
    c = build_complex(d, TheorySpec("khovanov", "Q", ("bars",)))
    t = homology_field(c, gradings=("j", "g_bars"))
    rep = report_bounds(t, d)
    assert rep.grading_vectors == [(-1,), (1,)]
    assert rep.obstruction is True


def test_obstruction_silent_when_additional_gradings_vanish(corpus):
    d = corpus["unknot"]
    c = build_complex(d, TheorySpec("khovanov", "Q", ("bars",)))
    rep = report_bounds(homology_field(c, gradings=("j", "g_bars")), d)
    assert rep.grading_vectors == [(0,)]
    assert rep.obstruction is False
    assert report_bounds(homology_field(c), d).obstruction is None


def test_bounds_hold_corpus_wide(corpus):
    for name, d in corpus.items():
        rep = report_bounds(table(d, "Z2"), d)
        assert rep.ok, (name, rep.as_dict())


def test_virtual_thickness_may_be_half_integer():
    t = HomologyTable(("i", "j"), {(0, 0): (1, ()), (0, 1): (1, ())}, "Q")
    assert thickness(t) == pytest.approx(1.5)


def test_classical_diagrams_have_no_half_integer_groups(corpus):
    for name, d in corpus.items():
        c = build_complex(d, TheorySpec("khovanov", "Z2", ("bars", "markers", "rigid", "endpoint")))
        prime, _ = split_differential(c)
        t = homology_field(c, prime, c.retained())
        groups = half_integer_groups(t, d.components)
        if is_classical(d):
            assert groups == [], name
        elif name == "virtual-trefoil":
            assert groups


def test_grid_text(corpus):
    g = table(corpus["trefoil-right"], "Z").grid()
    assert "+T2" in g
    assert table(corpus["unknot"], "Q").grid().count("1") >= 2

