from fractions import Fraction

from hypothesis import given, settings, strategies as st

from khdot.linalg import (
    rank_mod2,
    rank_over,
    rank_rational,
    smith_diagonal,
    smith_invariants,
    torsion_orders,
    unit_reduce,
)

from oracles import rank_oracle, smith_oracle


@st.composite
def int_matrices(draw, max_side=7, lo=-4, hi=4):
    nrows = draw(st.integers(1, max_side))
    ncols = draw(st.integers(1, max_side))
    rows = draw(
        st.lists(st.lists(st.integers(lo, hi), min_size=ncols, max_size=ncols), min_size=nrows, max_size=nrows)
    )
    return rows


def entries_of(rows):
    return {(r, c): v for r, row in enumerate(rows) for c, v in enumerate(row) if v}


@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_rank_mod2_matches_sympy(rows):
    assert rank_mod2(entries_of(rows)) == rank_oracle([[x % 2 for x in r] for r in rows], "Z2")


@settings(max_examples=150, deadline=None)
@given(int_matrices())
def test_rank_rational_matches_sympy(rows):
    assert rank_rational(entries_of(rows)) == rank_oracle(rows, "Q")
    assert rank_over("Z", entries_of(rows)) == rank_oracle(rows, "Q")


@settings(max_examples=150, deadline=None)
@given(int_matrices(lo=-6, hi=6))
def test_smith_invariants_match_sympy(rows):
    ours = smith_invariants(entries_of(rows), len(rows), len(rows[0]))
    assert ours == smith_oracle(rows)
    for x, y in zip(ours, ours[1:]):
        assert y % x == 0


@settings(max_examples=80, deadline=None)
@given(int_matrices(max_side=5, lo=-3, hi=3))
def test_unit_reduce_keeps_invariants(rows):
    count, core = unit_reduce(entries_of(rows))
    core_rows = [[core.get(r, {}).get(c, 0) for c in range(len(rows[0]))] for r in range(len(rows))]
    assert [1] * count + smith_oracle(core_rows) == smith_oracle(rows)


def test_rational_entries():
    e = {(0, 0): Fraction(1, 2), (0, 1): Fraction(1, 3), (1, 0): Fraction(3, 2), (1, 1): 1}
    assert rank_rational(e) == 1


def test_toy_diagonal():
    assert smith_invariants({(0, 0): 1, (1, 1): 2}, 3, 3) == [1, 2]
    assert torsion_orders([1, 2, 6]) == [2, 6]
    assert smith_diagonal([[2, 4], [6, 8]]) == [2, 4]


def test_empty_matrix():
    assert rank_mod2({}) == 0
    assert rank_rational({}) == 0
    assert smith_invariants({}, 2, 2) == []
