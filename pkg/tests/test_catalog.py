from math import comb, gcd

import pytest

from deltamod import linalg
from deltamod.catalog import (
    U8_MATRIX,
    U8PRIME_MATRIX,
    Tr_size,
    Via,
    build_A,
    build_Aprime,
    build_D,
    build_H,
    build_named,
    build_T,
    build_Tprime,
    clique_representation,
    named_representation,
)
from deltamod.linalg import IntMatrix
from deltamod.matroid import LinearMatroid, dual, epsilon
from deltamod.normal_form import pivot_to_standard_form
from deltamod.structure import are_isomorphic


def test_D_small():
    assert build_D(2).tolist() == [[1], [-1]]
    d4 = build_D(4)
    assert d4.cols == 6
    for j in range(6):
        col = d4.column(j)
        nz = [i for i, x in enumerate(col) if x]
        assert len(nz) == 2 and col[nz[0]] == 1 and col[nz[1]] == -1
    with pytest.raises(ValueError):
        build_D(1)


@pytest.mark.parametrize("n", range(3, 8))
def test_clique_matrix(n):
    rep = clique_representation(n)
    assert linalg.rank(rep.matrix) == n - 1
    assert epsilon(rep.matroid()) == comb(n, 2)


def test_A2_columns():
    a = build_A(2).matrix
    assert [a.column(j) for j in range(a.cols)] == [(1, 0), (0, 1), (1, -1), (1, 1)]


@pytest.mark.parametrize("r", range(2, 9))
def test_column_counts(r):
    assert build_A(r).matrix.cols == Tr_size(r) == comb(r + 2, 2) - 2
    assert build_Aprime(r).matrix.cols == Tr_size(r)


def test_H_column():
    h = build_H(5)
    assert h.column("e") == (1, -1, -1, 0, 0)
    with pytest.raises(ValueError):
        build_H(2)


def _primitive_signed(col):
    g = 0
    for x in col:
        g = gcd(g, abs(x))
    if g == 0:
        return None
    col = tuple(x // g for x in col)
    first = next(x for x in col if x)
    return col if first > 0 else tuple(-x for x in col)


def pivot_reduce_H(r):
    """Pivot H_{r+1} on the first entry of v, drop that row and v, then drop repeated columns."""
    h = build_H(r + 1)
    rows = [list(x) for x in h.matrix.tolist()]
    v = h.labels.index("e")
    p = rows[0]
    assert p[v] == 1
    new = [[x - row[v] * y for x, y in zip(row, p)] for row in rows[1:]]
    cols, seen = [], set()
    for j in range(len(p)):
        if j == v:
            continue
        c = _primitive_signed([row[j] for row in new])
        if c is None or c in seen:
            continue
        seen.add(c)
        cols.append(c)
    return IntMatrix.from_columns(cols, r)


@pytest.mark.parametrize("r", [3, 4])
def test_pivot_reduction_of_H_gives_Aprime(r):
    m = pivot_reduce_H(r)
    assert m.cols == Tr_size(r)
    assert linalg.is_delta_modular(m, 2)
    M = LinearMatroid(m, [f"c{j}" for j in range(m.cols)])
    assert are_isomorphic(M, build_Aprime(r).matroid()) is not None


def test_U8_matrices_verbatim():
    assert named_representation("U8").matrix.tolist() == U8_MATRIX
    assert named_representation("U8prime").matrix.tolist() == U8PRIME_MATRIX
    assert U8_MATRIX[3] == [0, 0, 0, 0, 1, -1, -1, 0]
    assert U8PRIME_MATRIX[3] == [0, 0, 0, 0, 1, -1, 1, 0]


def test_AG23_minus_e():
    M = build_named("AG23_minus_e")
    assert len(M) == 8 and M.full_rank == 3 and M.is_simple()
    sizes = sorted(bin(ln).count("1") for ln in M.lines())
    # 12 affine lines, the 4 through the deleted point lose a point
    assert sizes.count(3) == 8 and sizes.count(2) == 4 and len(sizes) == 12


def test_R9_lines():
    M = build_named("R9")
    assert len(M) == 9 and M.full_rank == 3 and M.is_simple()
    x = M.index["x"]
    through = sorted(bin(ln).count("1") for ln in M.lines() if (ln >> x) & 1 and bin(ln).count("1") >= 3)
    assert through == [3, 4, 4]


def test_F7():
    M = build_named("F7")
    assert len(M) == 7 and M.full_rank == 3
    assert sorted(bin(ln).count("1") for ln in M.lines()) == [3] * 7


@pytest.mark.parametrize("name", ["T8", "U8", "U8prime"])
def test_self_dual(name):
    M = build_named(name)
    assert M.full_rank == 4 and len(M) == 8
    assert are_isomorphic(M, dual(M)) is not None


def test_T8_properties():
    M = build_named("T8")
    assert M.is_simple() and M.field == 3
    # every element lies on no line with three points
    assert all(bin(ln).count("1") == 2 for ln in M.lines())


def test_uniform_and_sums():
    U = build_named("U(2,5)")
    assert (U.full_rank, len(U)) == (2, 5)
    S = build_named("U24+U24")
    assert (S.full_rank, len(S)) == (4, 8)
    assert build_named("U24+U24") is S
    with pytest.raises(KeyError):
        build_named("nonsense")


@pytest.mark.parametrize("r", range(3, 9))
def test_T_point_counts(r):
    assert epsilon(build_T(r, Via.MATRIX)) == Tr_size(r)
    assert epsilon(build_Tprime(r, Via.MATRIX)) == Tr_size(r)


@pytest.mark.parametrize("r", range(3, 7))
def test_projection_point_counts(r):
    assert epsilon(build_T(r, Via.PROJECTION)) == Tr_size(r)
    assert epsilon(build_Tprime(r, Via.PROJECTION)) == Tr_size(r)


@pytest.mark.parametrize("r", [3, 4])
def test_matrix_and_projection_routes_agree(r):
    assert are_isomorphic(build_T(r, "MATRIX"), build_T(r, "PROJECTION")) is not None
    assert are_isomorphic(build_Tprime(r, "MATRIX"), build_Tprime(r, "PROJECTION")) is not None


def test_T_and_Tprime_differ():
    T, Tp = build_T(3), build_Tprime(3)
    assert are_isomorphic(T, Tp) is None


def test_standardized_A_totally_2_modular():
    for r in range(2, 7):
        for builder in (build_A, build_Aprime):
            rep = builder(r)
            std = pivot_to_standard_form(rep, rep.labels[0])
            assert linalg.is_totally_delta_modular(std.matrix, 2)


def test_projection_needs_rank_3():
    with pytest.raises(ValueError):
        build_T(2, Via.PROJECTION)
    with pytest.raises(ValueError):
        build_Tprime(1)
