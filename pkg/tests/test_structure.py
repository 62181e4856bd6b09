from itertools import combinations

import pytest

from deltamod.catalog import build_A, build_Aprime, build_named, named_representation
from deltamod.extensions import extend, generated_modular_cut, principal_cut
from deltamod.linalg import IntMatrix
from deltamod.matroid import CapExceeded, LinearMatroid, UniformMatroid, delete, dual, same_matroid
from deltamod.search import random_2modular_matrix
from deltamod.structure import (
    MinorWitness,
    NotCliqueError,
    NotSimpleError,
    ThreeLineOutcome,
    TipClass,
    analyze_clique_extension,
    are_isomorphic,
    classify_three_line_configuration,
    has_minor,
    is_special,
    require_clique,
    special_points,
    spike_tip_multiplicity,
)

from oracles import brute_force_has_minor, explicit


def non_fano():
    rep = named_representation("F7")
    return LinearMatroid(rep.matrix, rep.labels, 3)


def free_spike():
    """Rank-4 spike with tip t and legs {t, x_i, y_i}, y_i = e_i + t."""
    t = [1, 1, 1, 1]
    xs = [[int(i == j) for i in range(4)] for j in range(4)]
    ys = [[x + s for x, s in zip(col, t)] for col in xs]
    labels = ["t"] + [f"x{j}" for j in range(1, 5)] + [f"y{j}" for j in range(1, 5)]
    return LinearMatroid(IntMatrix.from_columns([t] + xs + ys, 4), labels)


# -- isomorphism -----------------------------------------------------------


def test_uniform_iso():
    U, V = UniformMatroid(2, "abcd"), UniformMatroid(2, "wxyz")
    f = are_isomorphic(U, V)
    assert f is not None and same_matroid(U, V, f)


def test_fano_vs_non_fano():
    assert are_isomorphic(build_named("F7"), non_fano()) is None
    assert are_isomorphic(build_named("F7"), build_named("F7")) is not None


@pytest.mark.parametrize("a,b", list(combinations(["F7", "U(3,7)", "MK(4)", "U(3,6)", "AG23_minus_e", "T8", "U8", "U8prime"], 2)))
def test_iso_symmetric(a, b):
    A, B = build_named(a), build_named(b)
    fab, fba = are_isomorphic(A, B), are_isomorphic(B, A)
    assert (fab is None) == (fba is None)
    assert are_isomorphic(A, A) is not None


def test_U8_not_U8prime():
    assert are_isomorphic(build_named("U8"), build_named("U8prime")) is None


def test_iso_cap():
    K = build_named("MK(6)")
    with pytest.raises(CapExceeded):
        are_isomorphic(K, K)


def test_iso_witness_is_exact():
    M = build_A(3).matroid()
    N = LinearMatroid(M.matrix.select_columns(list(range(M.matrix.cols))[::-1]), [f"z{j}" for j in range(8)])
    f = are_isomorphic(M, N)
    assert f is not None and same_matroid(M, N, f)


# -- minors ------------------------------------------------------------------

HOSTS = {
    "U(2,5)": lambda: build_named("U(2,5)"),
    "U(3,6)": lambda: build_named("U(3,6)"),
    "F7": lambda: build_named("F7"),
    "non-Fano": non_fano,
    "MK(4)": lambda: build_named("MK(4)"),
    "AG23_minus_e": lambda: build_named("AG23_minus_e"),
    "T8": lambda: build_named("T8"),
    "U24+U24": lambda: build_named("U24+U24"),
    "dual F7": lambda: dual(build_named("F7")),
}
for _seed in range(6):
    HOSTS[f"random{_seed}"] = (
        lambda s=_seed: LinearMatroid(random_2modular_matrix(3, 4, s), [f"h{j}" for j in range(7)])
    )

PATTERNS = ["U(2,4)", "U(2,5)", "MK(4)", "F7", "U(3,5)"]


@pytest.mark.parametrize("pattern", PATTERNS)
@pytest.mark.parametrize("host", list(HOSTS))
def test_has_minor_matches_brute_force(host, pattern):
    M, P = HOSTS[host](), build_named(pattern)
    w = has_minor(M, P)
    expected = brute_force_has_minor(explicit(M), explicit(P))
    assert (w is not None) == expected
    if w is not None:
        assert w.verify(M, P)


def test_U25_has_U24():
    w = has_minor(build_named("U(2,5)"), build_named("U(2,4)"))
    assert w is not None and not w.contract and len(w.delete) == 1


def test_R9_restriction():
    R = build_named("R9")
    w = has_minor(R, build_named("AG23_minus_e"))
    assert w is not None and not w.contract and w.delete == {"x"}
    assert w.to_dict()["delete"] == ["x"]


def test_witness_verify_rejects_tampering():
    M, P = build_named("U(2,5)"), build_named("U(2,4)")
    w = has_minor(M, P)
    bad = MinorWitness(w.contract, w.delete | {next(iter(w.bijection))}, w.bijection)
    assert not bad.verify(M, P)


def test_pattern_must_be_simple():
    with pytest.raises(NotSimpleError):
        has_minor(build_named("F7"), UniformMatroid(1, "ab"))


# -- three lines through a point ------------------------------------------------


def test_three_lines():
    assert classify_three_line_configuration(build_named("R9")) is ThreeLineOutcome.R9
    assert classify_three_line_configuration(build_named("MK(4)")) is ThreeLineOutcome.NEITHER_HYPOTHESIS
    # replace a3 by a point placed freely on the line through x and a1
    R = delete(build_named("R9"), ["a3"])
    line = R.closure(["x", "a1"])
    Q = extend(R, principal_cut(R, line), "a3f")
    assert Q.is_simple()
    assert classify_three_line_configuration(Q) is ThreeLineOutcome.U25_MINOR


# -- spikes and special points ---------------------------------------------------


@pytest.mark.parametrize("n", [4, 5, 6])
def test_cliques_have_no_tips(n):
    K = build_named(f"MK({n})")
    assert {spike_tip_multiplicity(K, e) for e in K.elements} == {TipClass.NONE}


def test_fano_tips():
    F = build_named("F7")
    assert all(spike_tip_multiplicity(F, e) is not TipClass.NONE for e in F.elements)


def test_rank4_spike_unique_tip():
    S = free_spike()
    base = delete(S, ["t"])
    legs = [[f"x{j}", f"y{j}"] for j in range(1, 5)]
    cut = generated_modular_cut(base, legs)
    T = extend(base, cut, "tip")
    assert same_matroid(T, S, {**{e: e for e in base.elements}, "tip": "t"})
    assert spike_tip_multiplicity(T, "tip") is TipClass.ONE
    assert all(spike_tip_multiplicity(T, e) is TipClass.NONE for e in base.elements)


def test_special_rule():
    assert is_special(2, TipClass.NONE)
    assert is_special(0, TipClass.MANY)
    assert is_special(1, TipClass.ONE)
    assert not is_special(1, TipClass.NONE)
    assert not is_special(0, TipClass.ONE)


def test_special_points_examples():
    assert special_points(build_named("MK(6)")).total == 0
    rep = special_points(build_named("R9"))
    assert rep.points["x"].four_point_lines == 2 and "x" in rep.special
    with pytest.raises(NotSimpleError):
        special_points(UniformMatroid(1, "ab"))


# -- spanning cliques --------------------------------------------------------------


def test_require_clique():
    K = build_named("MK(5)")
    emap = require_clique(K, K.elements)
    assert sorted(emap.values()) == list(combinations(range(1, 6), 2))
    for tri in combinations(K.elements, 3):
        verts = {v for e in tri for v in emap[e]}
        assert (K.rank(list(tri)) == 2) == (len(verts) == 3)
    with pytest.raises(NotCliqueError):
        require_clique(build_named("U(3,6)"), build_named("U(3,6)").elements)
    A = build_A(3).matroid()
    with pytest.raises(NotCliqueError):
        require_clique(A, ["e12", "e13", "e23", "e14", "e24", "b1"])


def test_bare_clique_analysis():
    K = build_named("MK(7)")
    a = analyze_clique_extension(K, K.elements, True)
    assert a.size == 21 and a.size_bound == 26 and a.size_bound_holds
    assert a.special.total == 0 and not a.outside


def test_A6_analysis():
    M = build_A(6).matroid()
    X = [e for e in M.elements if e.startswith("e")]
    a = analyze_clique_extension(M, X, True)
    assert a.size == a.size_bound == 26
    assert all(t["type"] == "TYPE_A" for t in a.types.values())
    assert a.special.total <= 1
    assert all(c["holds"] for c in a.pair_checks)


def test_Aprime6_analysis():
    M = build_Aprime(6).matroid()
    X = [e for e in M.elements if e.startswith("e")]
    a = analyze_clique_extension(M, X, True)
    assert a.size <= a.size_bound
    assert a.special.total <= 2
    assert {t["type"] for e, t in a.types.items() if e.startswith("b")} == {"TYPE_B"}
    circuits = [frozenset(c) for c in a.four_circuits]
    shared = frozenset.intersection(*circuits)
    assert len(shared) == 2
    assert all(c["holds"] for c in a.pair_checks if c["asserted"])
