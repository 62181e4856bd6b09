from itertools import combinations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from deltamod.catalog import build_A, build_Aprime, build_H, build_named, clique_representation
from deltamod.linalg import IntMatrix
from deltamod.matroid import (
    CapExceeded,
    LinearMatroid,
    UniformMatroid,
    circuits_within,
    closure,
    contract,
    delete,
    direct_sum,
    dual,
    epsilon,
    flats_of_rank,
    is_vertically_k_connected,
    local_connectivity,
    matroid_from_dict,
    nullity,
    rank_axiom_violation,
    restrict,
    same_matroid,
    simplify,
    vertical_separation,
)
from deltamod.search import random_2modular_matrix
from deltamod.structure import are_isomorphic

from oracles import column_rank, explicit


def linear(rows, labels=None, field=0):
    m = IntMatrix(rows)
    return LinearMatroid(m, labels or [f"c{j}" for j in range(m.cols)], field)


def test_closure_examples():
    U = UniformMatroid(2, "abc")
    assert closure(U, ["a"]) == {"a"}
    K4 = build_named("MK(4)")
    assert closure(K4, ["e12", "e24"]) == {"e12", "e14", "e24"}
    H = build_H(4).matroid()
    assert "e" in closure(H, ["e12", "e35"])
    assert "e" in closure(H, ["e13", "e25"])


def test_flats_of_rank():
    U = UniformMatroid(2, "abc")
    assert sorted(map(sorted, flats_of_rank(U, 1))) == [["a"], ["b"], ["c"]]
    K4 = build_named("MK(4)")
    lines = flats_of_rank(K4, 2)
    assert len(lines) == 7
    assert sorted(len(f) for f in lines) == [2, 2, 2, 3, 3, 3, 3]
    assert flats_of_rank(K4, 3) == [frozenset(K4.elements)]
    with pytest.raises(ValueError):
        flats_of_rank(K4, 4)


def test_flats_match_pair_closures():
    K5 = build_named("MK(5)")
    by_pairs = {closure(K5, p) for p in combinations(K5.elements, 2)}
    assert by_pairs == set(flats_of_rank(K5, 2))


@pytest.mark.parametrize("n", range(4, 8))
def test_epsilon_clique(n):
    assert epsilon(build_named(f"MK({n})")) == n * (n - 1) // 2


@pytest.mark.parametrize("r", range(2, 7))
def test_epsilon_A(r):
    target = (r + 2) * (r + 1) // 2 - 2
    assert epsilon(build_A(r).matroid()) == target
    assert epsilon(build_Aprime(r).matroid()) == target


def test_epsilon_parallel_and_loops():
    assert epsilon(UniformMatroid(1, "abc")) == 1
    M = linear([[1, 2, 0, 0], [0, 0, 1, 0]])
    assert epsilon(M) == 2
    S, rep = simplify(M)
    assert S.elements == ["c0", "c2"]
    assert rep == {"c0": "c0", "c1": "c0", "c2": "c2", "c3": None}


def test_contract_U24_sum():
    M = build_named("U24+U24")
    N = contract(M, ["p1"])
    target = direct_sum(UniformMatroid(1, ["a", "b", "c"]), UniformMatroid(2, ["d", "f", "g", "h"]))
    assert are_isomorphic(N, target) is not None


def test_Tprime_via_H_simplification():
    for r in (3, 4):
        H = build_H(r + 1).matroid()
        P, _ = simplify(contract(H, ["e"]))
        assert epsilon(P) == (r + 2) * (r + 1) // 2 - 2


@pytest.mark.parametrize("seed", range(20))
def test_dual_involution(seed):
    M = LinearMatroid(random_2modular_matrix(3, 3, seed), [f"x{j}" for j in range(6)])
    assert same_matroid(dual(dual(M)), M)
    D = dual(M)
    for s in range(1 << 6):
        assert D.r(s) == bin(s).count("1") + M.r(M.ground & ~s) - M.full_rank


def test_dual_delete_contract():
    M = build_A(3).matroid()
    S = ["e12", "b1"]
    assert same_matroid(dual(delete(M, S)), contract(dual(M), S))


def test_minor_operations_commute():
    M = build_Aprime(3).matroid()
    a = delete(contract(M, ["e12"]), ["u"])
    b = contract(delete(M, ["u"]), ["e12"])
    assert same_matroid(a, b)


def test_contract_flattens():
    M = build_A(4).matroid()
    N = contract(contract(M, ["e12"]), ["e34"])
    direct = contract(M, ["e12", "e34"])
    assert same_matroid(N, direct)
    assert N.full_rank == 2


def test_views_against_explicit_oracle():
    M = build_named("MK(4)")
    E = explicit(M)
    C = contract(M, ["e12"])
    EC = E.contract(["e12"])
    for s in EC.table:
        assert C.rank(list(s)) == EC.r(s)


def test_nullity_and_circuits():
    U = UniformMatroid(2, "abc")
    assert nullity(U) == 1
    assert circuits_within(U) == [frozenset("abc")]
    K4 = build_named("MK(4)")
    got = circuits_within(K4, ["e12", "e13", "e23", "e34"], 4)
    assert got == [frozenset({"e12", "e13", "e23"})]


@given(st.integers(0, 1000))
def test_nullity_one_means_one_circuit(seed):
    M = LinearMatroid(random_2modular_matrix(3, 3, seed), [f"x{j}" for j in range(6)])
    for k in range(1, 7):
        for s in combinations(M.elements, k):
            if nullity(M, s) == 1:
                assert len(circuits_within(M, s, 7)) == 1


def test_local_connectivity():
    F = UniformMatroid(4, "abcd")
    assert local_connectivity(F, ["a", "b"], ["c", "d"]) == 0
    K6 = build_named("MK(6)")
    assert local_connectivity(K6, ["e12", "e13"], ["e12", "e13"]) == 2
    values = {
        local_connectivity(K6, a | b, c)
        for a, b, c in combinations(flats_of_rank(K6, 2), 3)
    }
    assert values <= {0, 1, 2}


def brute_vertical(M, k):
    E = M.elements
    rm = M.full_rank
    for size in range(1, len(E)):
        for X in combinations(E, size):
            Y = [e for e in E if e not in X]
            rx, ry = M.rank(list(X)), M.rank(Y)
            for j in range(1, k):
                if rx + ry - rm < j and min(rx, ry) >= j:
                    return False
    return True


def test_vertical_separation_direct_sum():
    M = build_named("U24+U24")
    X, Y, j = vertical_separation(M, 3)
    assert j == 1
    assert {X, Y} == {frozenset(f"p{i}" for i in range(1, 5)), frozenset(f"q{i}" for i in range(1, 5))}
    assert not is_vertically_k_connected(M, 2)
    assert not is_vertically_k_connected(M, 3)


@pytest.mark.parametrize("n", range(1, 6))
@pytest.mark.parametrize("k", range(1, 5))
def test_vertical_free_matroid_matches_definition(n, k):
    U = UniformMatroid(n, [f"f{i}" for i in range(n)])
    assert is_vertically_k_connected(U, k) == brute_vertical(U, k)


@pytest.mark.parametrize("name", ["MK(4)", "F7", "U(2,5)", "U(3,6)"])
@pytest.mark.parametrize("k", [2, 3, 4])
def test_vertical_matches_definition(name, k):
    M = build_named(name)
    assert is_vertically_k_connected(M, k) == brute_vertical(M, k)


def test_K5_vertically_3_connected():
    assert is_vertically_k_connected(build_named("MK(5)"), 3)


def test_vertical_cap():
    with pytest.raises(CapExceeded):
        is_vertically_k_connected(build_named("MK(7)"), 3)


@pytest.mark.parametrize(
    "M",
    [
        build_A(4).matroid(),
        build_H(4).matroid(),
        build_named("R9"),
        build_named("U24+U24"),
        dual(build_named("F7")),
        contract(build_A(5).matroid(), ["e12"]),
        restrict(build_named("MK(6)"), ["e12", "e13", "e23", "e45"]),
    ],
    ids=["A4", "H4", "R9", "sum", "dualF7", "contraction", "restriction"],
)
def test_rank_axioms(M):
    assert rank_axiom_violation(M, np.random.default_rng(7), 1000) is None


@pytest.mark.parametrize("r", [3, 4, 5])
def test_H_same_over_GF3_and_Q(r):
    rep = build_H(r + 1)
    q = LinearMatroid(rep.matrix, rep.labels, 0)
    g = LinearMatroid(rep.matrix, rep.labels, 3)
    assert same_matroid(q, g)


def test_linear_rank_matches_oracle():
    rep = build_Aprime(3)
    rows = rep.matrix.tolist()
    M = rep.matroid()
    for k in range(4):
        for s in combinations(range(rep.matrix.cols), k):
            assert M.rank([rep.labels[j] for j in s]) == column_rank(rows, list(s))


def test_gf2_differs_from_Q():
    rows = [[1, 0, 1], [0, 1, 1]]
    assert linear([[1, 1], [1, -1]]).full_rank == 2
    assert linear([[1, 1], [1, -1]], field=2).full_rank == 1
    assert linear(rows, field=2).full_rank == 2


def test_serialization_round_trip():
    base = build_named("MK(4)")
    cases = [
        build_A(3).matroid(),
        build_named("U(2,4)"),
        build_named("U24+U24"),
        contract(build_A(3).matroid(), ["e12"]),
        dual(build_named("F7")),
        delete(build_named("R9"), ["x"]),
    ]
    from deltamod.catalog import triangle_cut
    from deltamod.extensions import extend

    cases.append(extend(base, triangle_cut(base, 4), "t"))
    for M in cases:
        back = matroid_from_dict(M.to_dict())
        assert back.elements == M.elements
        assert same_matroid(back, M)


def test_mask_rejects_unknown_label():
    with pytest.raises(KeyError):
        build_named("MK(4)").mask(["nope"])


def test_direct_sum_requires_disjoint_labels():
    with pytest.raises(ValueError):
        direct_sum(UniformMatroid(1, "ab"), UniformMatroid(1, "bc"))


def test_clique_labels():
    rep = clique_representation(4)
    assert rep.labels == ("e14", "e24", "e34", "e12", "e13", "e23")
