from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from deltamod import linalg
from deltamod.catalog import build_A, build_H
from deltamod.linalg import DimensionError, IntMatrix

from oracles import all_minors, cofactor_det, fraction_rank


def matrices(max_rows=5, max_cols=6, lo=-4, hi=4):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(
                st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=m, max_size=m
            )
        )
    )


def squares(max_n=5, lo=-6, hi=6):
    return st.integers(0, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)
    )


@given(squares())
def test_det_matches_cofactor_expansion(rows):
    m = IntMatrix(rows, len(rows))
    assert linalg.det(m) == cofactor_det(rows)


@given(squares(max_n=4, lo=-10**12, hi=10**12))
def test_det_exact_beyond_int64(rows):
    m = IntMatrix(rows, len(rows))
    assert linalg.det(m) == cofactor_det(rows)


def test_big_entries_use_exact_path():
    big = 2**40
    m = IntMatrix([[big, 1, 0], [1, big, 1], [0, 1, big]])
    assert not linalg._kernel_safe(m)
    assert linalg.det(m) == cofactor_det(m.tolist())
    assert linalg.rank(m) == 3


@given(matrices())
def test_rank_matches_fraction_elimination(rows):
    assert linalg.rank(IntMatrix(rows)) == fraction_rank(rows)


@given(matrices(), st.sampled_from([2, 3, 5, 7]))
def test_rank_mod_p(rows, p):
    assert linalg.rank_mod_p(IntMatrix(rows), p) == fraction_rank(rows, p)


@given(matrices(max_rows=4, max_cols=5))
def test_max_abs_minor_matches_enumeration(rows):
    m = IntMatrix(rows)
    for k in range(1, min(m.shape) + 1):
        expected = max(abs(d) for d in all_minors(rows, k))
        best, rs, cs = linalg.max_abs_minor_witness(m, k)
        assert best == expected
        assert abs(cofactor_det([[rows[i][j] for j in cs] for i in rs])) == best


@given(matrices(max_rows=4, max_cols=6, lo=-2, hi=2), st.integers(1, 3))
def test_delta_modular_matches_definition(rows, delta):
    m = IntMatrix(rows)
    r = fraction_rank(rows)
    if r == 0:
        with pytest.raises(ValueError):
            linalg.is_delta_modular(m, delta)
        return
    assert linalg.is_delta_modular(m, delta) == all(abs(d) <= delta for d in all_minors(rows, r))
    totally = all(abs(d) <= delta for k in range(1, min(m.shape) + 1) for d in all_minors(rows, k))
    assert linalg.is_totally_delta_modular(m, delta) == totally


def test_first_minor_exceeding_is_lexicographically_first():
    m = IntMatrix([[1, 0, 3], [0, 1, 3]])
    hit = linalg.first_minor_exceeding(m, 2, 2)
    assert hit == (3, (0, 1), (0, 2))
    assert linalg.first_minor_exceeding(m, 2, 3) is None


def test_H4_rank_sized_minors_at_most_two():
    h = build_H(4).matrix
    assert all(abs(d) <= 2 for d in all_minors(h.tolist(), 4))
    assert linalg.max_abs_minor(h, 4) == 2


def test_A2_small_values():
    a = build_A(2).matrix
    assert linalg.det(a.select_columns([2, 3])) == 2
    assert linalg.max_abs_minor(a, 2) == 2


def test_det_rejects_rectangular():
    with pytest.raises(DimensionError):
        linalg.det(IntMatrix([[1, 2, 3], [4, 5, 6]]))


def test_ragged_rows_rejected():
    with pytest.raises(DimensionError):
        IntMatrix([[1, 2], [3]])


def test_text_round_trip():
    m = IntMatrix([[1, -2, 0], [0, 3, 4]])
    text = m.to_text(["# labels: a b c"])
    back, comments = IntMatrix.from_text(text)
    assert back == m
    assert comments == ["# labels: a b c"]


@pytest.mark.parametrize(
    "text",
    ["", "2 2\n1 0\n", "2 2\n1 0\n0\n", "x y\n1\n", "1 2 3\n1 1\n"],
)
def test_text_errors(text):
    with pytest.raises(ValueError):
        IntMatrix.from_text(text)


def test_empty_matrix_conventions():
    assert linalg.det(IntMatrix([], 0)) == 1
    assert linalg.rank(IntMatrix.zeros(3, 4)) == 0


def test_primitive_and_row_points():
    assert linalg.primitive([0, -4, 6]) == (0, 2, -3)
    assert linalg.primitive([0, 0]) == (0, 0)
    m = IntMatrix([[1, 2], [2, 4], [-1, -2], [0, 1], [0, 0]])
    assert linalg.row_point_count(m) == 2


def test_solve_rational():
    a = IntMatrix([[2, 1], [1, 3]])
    b = IntMatrix([[1], [2]])
    x = linalg.solve_rational(a, b)
    assert x == [[Fraction(1, 5)], [Fraction(3, 5)]]


def test_matmul_and_transpose():
    a = IntMatrix([[1, 2], [3, 4]])
    assert (a @ IntMatrix.identity(2)) == a
    assert a.T.tolist() == [[1, 3], [2, 4]]
    arr = a.to_numpy()
    assert arr.dtype == np.int64 and not arr.flags.writeable


@given(squares(max_n=6, lo=-50, hi=50))
def test_det_matches_sympy(rows):
    expected = int(sympy.Matrix(rows).det()) if rows else 1
    assert linalg.det(IntMatrix(rows, len(rows))) == expected
