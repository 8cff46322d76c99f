import random

import pytest

from khdot.complex import (
    ComplexError,
    SparseMatrix,
    TheorySpec,
    build_complex,
    export,
    grading_report,
    lambda_deform,
    split_differential,
    swap_dotted_labels,
    verify_d_squared,
)
from khdot.corpus import random_diagrams
from khdot.homology import homology_field
from khdot.rings import get_ring


def test_unknot_complex_is_v_with_zero_differential(corpus):
    c = build_complex(corpus["unknot"], TheorySpec("khovanov", "Q"))
    assert c.dims() == [2]
    assert sorted(g.quantum for g in c.bases[0]) == [-1, 1]
    assert c.matrices == []


def test_kink_complex_over_z2(corpus):
    c = build_complex(corpus["kink-positive"], TheorySpec("khovanov", "Z2"))
    # A-state: two circles, B-state: one circle, joined by a merge
    assert c.dims() == [4, 2]
    assert c.matrices[0].nnz() == 3


def test_z2tc_gives_half_integer_gr_on_barred_unknot(corpus):
    c = build_complex(corpus["unknot-through-bar"], TheorySpec("frobenius-z2tc", "Z2[t,c]", ("bars",)))
    grs = sorted(g.gr for g in c.bases[0])
    assert all(x.denominator == 2 for x in grs)


def test_integral_khovanov_refuses_single_edges(corpus):
    with pytest.raises(ComplexError):
        build_complex(corpus["virtual-trefoil"], TheorySpec("khovanov", "Z"))
    with pytest.raises(ComplexError):
        build_complex(corpus["virtual-trefoil"], TheorySpec("frobenius-universal", "Z[h,t]"))


@pytest.mark.parametrize(
    "theory, ring",
    [("khovanov", "R"), ("lee", "Z2"), ("frobenius-z2tc", "Q"), ("unknown", "Z2")],
)
def test_spec_rejects_bad_ring(theory, ring):
    with pytest.raises(ValueError):
        TheorySpec(theory, ring)


def test_lambda_must_live_in_the_ring():
    with pytest.raises(ValueError):
        TheorySpec("khovanov", "Z4", ("bars",), lam="1/2")
    with pytest.raises(ValueError):
        TheorySpec("frobenius-universal", "Z[h,t]", ("bars",), lam=2)
    assert TheorySpec("khovanov", "Z4", ("bars",), lam=2).lam == 2


def test_split_needs_a_dotting(corpus):
    c = build_complex(corpus["trefoil-right"], TheorySpec("khovanov", "Z2"))
    with pytest.raises(ComplexError):
        split_differential(c)


def test_nothing_dotted_means_no_raising_part(corpus):
    # the endpoint source exists on every diagram, but only a long knot dots a circle
    c = build_complex(corpus["trefoil-right"], TheorySpec("khovanov", "Z2", ("endpoint",)))
    prime, second = split_differential(c)
    assert all(m.is_zero() for m in second)
    assert prime == c.matrices


def test_split_pieces_recombine(corpus):
    c = build_complex(corpus["long-trefoil"], TheorySpec("khovanov", "Z2", ("endpoint",)))
    prime, second = split_differential(c)
    assert any(not m.is_zero() for m in second)
    assert lambda_deform(prime, second, 1) == c.matrices
    assert lambda_deform(prime, second, 0) == prime


def test_dotted_merge_of_two_units_is_grading_raising():
    # kink with the endpoint on the loop edge: the merge of two dotted circles is the only map
    from khdot.diagram import parse_diagram

    d = parse_diagram("X 1 1 2 2 +\nE 1\nE 2\n")
    c = build_complex(d, TheorySpec("khovanov", "Z2", ("endpoint",)))
    ones = [k for k, g in enumerate(c.bases[0]) if g.labels == (0, 0)]
    assert all(g.dots == (1, 1) for g in c.bases[0])
    prime, second = split_differential(c, "g_endpoint")
    col = ones[0]
    assert not any(cc == col for (_, cc) in prime[0].entries)
    assert any(cc == col for (_, cc) in second[0].entries)


def test_dotted_comultiplication_splits_across_pieces(corpus):
    # on the long trefoil some split edge has a dotted input whose image lands partly in each piece
    c = build_complex(corpus["long-trefoil"], TheorySpec("khovanov", "Z2", ("endpoint",)))
    prime, second = split_differential(c, "g_endpoint")
    found = False
    for beta in range(len(c.matrices)):
        p_cols = {col for (_, col) in prime[beta].entries}
        q_cols = {col for (_, col) in second[beta].entries}
        for col in p_cols & q_cols:
            if any(c.bases[beta][col].dots):
                found = True
    assert found


def test_lambda_two_over_z4(corpus):
    for name in ("long-trefoil", "unknot-through-bar", "virtual-trefoil", "kishino-style"):
        c = build_complex(corpus[name], TheorySpec("khovanov", "Z4", ("bars", "endpoint", "rigid"), lam=2))
        rep = verify_d_squared(c)
        assert rep.ok, (name, rep.failures)
        assert any(k.startswith("(d'+2d'')^2") for k in rep.checks) or not c.sources


def test_swap_is_an_involution(corpus):
    c = build_complex(corpus["long-trefoil"], TheorySpec("khovanov", "Q", ("endpoint",)))
    twice = swap_dotted_labels(swap_dotted_labels(c))
    assert twice.bases == c.bases
    assert not twice.swapped


def test_swap_leaves_undotted_complex_alone(corpus):
    c = build_complex(corpus["trefoil-right"], TheorySpec("khovanov", "Q", ("endpoint",)))
    assert swap_dotted_labels(c).bases == c.bases


def test_swap_turns_preserving_lee_part_into_khovanov(corpus):
    d = corpus["long-trefoil"]
    lee = build_complex(d, TheorySpec("lee", "Q(t=h=1)", ("endpoint",)))
    prime, _ = split_differential(lee, "gr")
    swapped = swap_dotted_labels(lee)
    # the old gr becomes the new quantum grading, and d' preserves it
    assert all(
        g.gr2 == s.quantum for b0, b1 in zip(lee.bases, swapped.bases) for g, s in zip(b0, b1)
    )
    ours = homology_field(swapped, prime, ("j",))
    kh = homology_field(build_complex(d, TheorySpec("khovanov", "Q")))
    assert ours == kh


def test_d_squared_on_corpus_all_theories(corpus):
    for name, d in corpus.items():
        for spec in (
            TheorySpec("khovanov", "Z2", ("bars", "markers", "rigid", "endpoint")),
            TheorySpec("khovanov", "Q", ("bars", "endpoint")),
            TheorySpec("lee", "Q(t=h=1)", ("bars",)),
            TheorySpec("frobenius-z2tc", "Z2[t,c]", ("bars",)),
        ):
            rep = verify_d_squared(build_complex(d, spec))
            assert rep.ok, (name, spec, rep.failures)


def test_universal_theory_on_classical_corpus(corpus):
    for name in ("trefoil-right", "figure-eight", "hopf"):
        c = build_complex(corpus[name], TheorySpec("frobenius-universal", "Z[h,t]"))
        assert verify_d_squared(c).ok
        assert all(grading_report(c).values())


def test_grading_laws_on_random_diagrams():
    for d in random_diagrams(5, 20, max_classical=4):
        c = build_complex(d, TheorySpec("khovanov", "Z2", ("bars", "markers", "rigid")))
        assert all(grading_report(c).values())


def test_corrupted_sign_is_reported(corpus):
    c = build_complex(corpus["trefoil-right"], TheorySpec("khovanov", "Q"))
    ring = get_ring("Q")
    bad = [SparseMatrix(ring, m.nrows, m.ncols, m.entries) for m in c.matrices]
    key = sorted(bad[0].entries)[0]
    bad[0].entries[key] = -bad[0].entries[key]
    rep = verify_d_squared(c.with_matrices(bad))
    assert not rep.ok
    face = rep.failures[0]
    assert face["identity"] == "d^2"
    assert len(face["crossings"]) == 2


def test_z2tc_single_maps_close_the_face(corpus):
    # on the virtual trefoil every face with two 1->1 edges commutes because those maps are c*Id
    c = build_complex(corpus["virtual-trefoil"], TheorySpec("frobenius-z2tc", "Z2[t,c]"))
    assert c.cube.has_single_edges()
    assert verify_d_squared(c).ok
    # dropping the 1->1 maps of one crossing leaves the other path of a face alone
    zeroed = []
    for beta, m in enumerate(c.matrices):
        keep = {}
        for (r, col), v in m.entries.items():
            src, dst = c.bases[beta][col], c.bases[beta + 1][r]
            e = next(e for e in c.cube.edges if e.src == src.state and e.dst == dst.state)
            if not (e.kind == "single" and e.crossing == 0):
                keep[(r, col)] = v
        zeroed.append(SparseMatrix(m.ring, m.nrows, m.ncols, keep))
    assert not verify_d_squared(c.with_matrices(zeroed)).ok


def test_export_lists_every_generator_and_entry(corpus):
    c = build_complex(corpus["kink-positive"], TheorySpec("khovanov", "Z2"))
    text = export(c)
    assert text.startswith("%%khdot complex 1\nring Z2\n")
    assert text.count(" state=") == sum(c.dims())
    assert "matrix -1 2 4 3" in text or "matrix 0 2 4 3" in text
    assert export(c) == text


def test_random_complexes_square_to_zero():
    rng = random.Random(3)
    for _ in range(15):
        d = random_diagrams(rng.randrange(10**6), 1, max_classical=5)[0]
        for ring in ("Z2", "Q"):
            c = build_complex(d, TheorySpec("khovanov", ring, ("bars", "markers", "rigid")))
            assert verify_d_squared(c).ok
