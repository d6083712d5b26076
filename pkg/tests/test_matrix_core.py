from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from imagepr.matrix_core import (
    SCHUR,
    VDW_AP4,
    RationalMatrix,
    check_first_entries,
    dedup_rows,
    diag_sum,
    drop_irrelevant_columns,
    to_rational,
    validate,
)

M = RationalMatrix.of


def test_rationals_normalize():
    assert to_rational("4/6") == Fraction(2, 3)
    assert to_rational("-3/9").denominator == 3
    with pytest.raises(ValueError):
        to_rational("1/0")
    with pytest.raises(ValueError):
        to_rational("1/-2")
    with pytest.raises(TypeError):
        to_rational(0.5)


def test_ragged_and_empty_rejected():
    with pytest.raises(ValueError):
        M([[1, 2], [3]])
    with pytest.raises(ValueError):
        M([])
    with pytest.raises(ValueError):
        M([[]])


def test_validate_examples():
    assert validate(SCHUR).admissible
    rep = validate(M([[0, 0], [1, 1]]))
    assert not rep.admissible and rep.zero_rows == (0,)
    rep = validate(M([[1, -1]]))
    assert not rep.admissible and rep.negative_entries == ((0, 1),)
    rep = validate(M([["1/2", 1]]))
    assert rep.admissible and rep.non_integral_entries == ((0, 0),)


def test_first_entries_examples():
    rep = check_first_entries(VDW_AP4)
    assert rep.satisfies and rep.monic and rep.first_entries == {1}
    rep = check_first_entries(SCHUR)
    assert rep.satisfies and rep.monic and rep.first_entries == {1}
    rep = check_first_entries(M([[1, 0], [2, 1]]))
    assert not rep.satisfies and not rep.monic
    assert rep.violations == ((0, 1, 0),)


def test_first_entries_zero_row_and_negative_leader():
    assert not check_first_entries(M([[1, 0], [0, 0]])).satisfies
    rep = check_first_entries(M([[-1, 2]]))
    assert not rep.satisfies and rep.violations == ((0, 0, 0),)


def test_first_entries_non_monic():
    rep = check_first_entries(M([[2, 0], [2, 1], [0, 3]]))
    assert rep.satisfies and not rep.monic and rep.first_entries == {2, 3}


def test_dedup_worked_example():
    eight = M([[1, 1, 0, 0], [1, 1, 0, 0], [5, 7, 0, 0], [5, 7, 0, 0],
               [2, 2, 0, 1], [2, 2, 3, 3], [10, 14, 0, 1], [10, 14, 3, 3]])
    six = M([[1, 1, 0, 0], [5, 7, 0, 0], [2, 2, 0, 1], [2, 2, 3, 3], [10, 14, 0, 1], [10, 14, 3, 3]])
    assert dedup_rows(eight) == six
    assert dedup_rows(M([[3, 4], [3, 4]])) == M([[3, 4]])
    assert dedup_rows(SCHUR) == SCHUR


def test_diag_sum():
    assert diag_sum(M([[1]]), M([[2]])) == M([[1, 0], [0, 2]])
    D = diag_sum(SCHUR, VDW_AP4)
    assert D.shape == (7, 4)
    assert D.columns(0, 2).select_rows(range(3)) == SCHUR
    assert D.columns(2, 4).select_rows(range(3, 7)) == VDW_AP4
    assert all(x == 0 for row in D.rows[:3] for x in row[2:])
    assert all(x == 0 for row in D.rows[3:] for x in row[:2])
    with pytest.raises(ValueError):
        diag_sum(SCHUR, None)


def test_drop_irrelevant_columns():
    assert drop_irrelevant_columns(M([[1, 0], [1, 0]])) == (M([[1], [1]]), (0,))
    assert drop_irrelevant_columns(SCHUR) == (SCHUR, (0, 1))
    assert drop_irrelevant_columns(M([[0, 1], [0, 2]])) == (M([[1], [2]]), (1,))


small = st.integers(min_value=0, max_value=3)
matrices = st.integers(1, 4).flatmap(
    lambda v: st.lists(st.lists(small, min_size=v, max_size=v), min_size=1, max_size=5)
).map(M)


@given(matrices, st.randoms())
def test_first_entries_invariant_under_permutation_and_duplication(A, rnd):
    rows = list(A.rows)
    rnd.shuffle(rows)
    rows.append(rows[rnd.randrange(len(rows))])
    B = RationalMatrix(tuple(rows))
    a, b = check_first_entries(A), check_first_entries(B)
    assert (a.satisfies, a.monic, a.first_entries) == (b.satisfies, b.monic, b.first_entries)


@given(matrices)
def test_dedup_idempotent(A):
    once = dedup_rows(A)
    assert dedup_rows(once) == once
    assert set(once.rows) == set(A.rows)


@given(matrices, matrices)
def test_diag_sum_blocks_roundtrip(A, B):
    D = diag_sum(A, B)
    assert D.select_rows(range(A.u)).columns(0, A.v) == A
    assert D.select_rows(range(A.u, A.u + B.u)).columns(A.v, A.v + B.v) == B


@given(matrices, st.data())
def test_doubling_a_first_entry_breaks_monic(A, data):
    rep = check_first_entries(A)
    if not rep.monic:
        return
    i = data.draw(st.integers(0, A.u - 1))
    t = next(k for k, x in enumerate(A.rows[i]) if x != 0)
    rows = [list(r) for r in A.rows]
    rows[i][t] *= 2
    broken = check_first_entries(M(rows))
    assert not broken.monic
    shared = any(j != i and next(k for k, x in enumerate(A.rows[j]) if x != 0) == t for j in range(A.u))
    if shared:
        assert not broken.satisfies
        assert any(t == col for _, _, col in broken.violations)
