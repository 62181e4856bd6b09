"""Named matrices and matroids.

Clique labels: M(K_n) lives on vertices 1..n. The identity column i is the
edge {i, n} and the D column (i, j) is the edge {i, j}; both are labeled
``e{i}{j}`` (``e{i}_{j}`` once n >= 10) with i < j.
"""

from __future__ import annotations

import enum
import re
from functools import lru_cache
from itertools import combinations, product
from math import comb

from .extensions import ModularCut, elementary_projection, principal_cut
from .linalg import IntMatrix
from .matroid import LinearMatroid, Matroid, UniformMatroid, simplify
from .normal_form import Representation


class Via(str, enum.Enum):
    MATRIX = "MATRIX"
    PROJECTION = "PROJECTION"


def _edge(i: int, j: int, n: int) -> str:
    i, j = min(i, j), max(i, j)
    return f"e{i}{j}" if n < 10 else f"e{i}_{j}"


def _unit(r: int, *entries: tuple[int, int]) -> list[int]:
    v = [0] * r
    for i, x in entries:
        v[i] += x
    return v


def build_D(r: int) -> IntMatrix:
    """Columns e_i - e_j, i < j, in lexicographic order."""
    if r < 2:
        raise ValueError("D_r needs r >= 2")
    cols = [_unit(r, (i, 1), (j, -1)) for i, j in combinations(range(r), 2)]
    return IntMatrix.from_columns(cols, r)


def _identity_columns(r: int) -> list[list[int]]:
    return [_unit(r, (i, 1)) for i in range(r)]


def clique_representation(n: int) -> Representation:
    """[I_{n-1} | D_{n-1}] labeled by the edges of K_n."""
    if n < 3:
        raise ValueError("clique needs n >= 3")
    r = n - 1
    cols = _identity_columns(r) + [_unit(r, (i, 1), (j, -1)) for i, j in combinations(range(r), 2)]
    labels = [_edge(i + 1, n, n) for i in range(r)] + [_edge(i + 1, j + 1, n) for i, j in combinations(range(r), 2)]
    return Representation(IntMatrix.from_columns(cols, r), tuple(labels))


def build_A(r: int) -> Representation:
    """[I_r | D_r | B], B with columns e_1 + e_{j+1} (j = 1..r-1)."""
    if r < 2:
        raise ValueError("A_r needs r >= 2")
    base = clique_representation(r + 1)
    extra = [_unit(r, (0, 1), (j, 1)) for j in range(1, r)]
    cols = [list(base.matrix.column(c)) for c in range(base.matrix.cols)] + extra
    labels = base.labels + tuple(f"b{j}" for j in range(1, r))
    return Representation(IntMatrix.from_columns(cols, r), labels)


def build_Aprime(r: int) -> Representation:
    """[I_r | D_r | B' | u], B' columns e_1 + e_2 - e_{j+2}, u = e_1 + e_2."""
    if r < 2:
        raise ValueError("A'_r needs r >= 2")
    base = clique_representation(r + 1)
    extra = [_unit(r, (0, 1), (1, 1), (j + 1, -1)) for j in range(1, r - 1)]
    extra.append(_unit(r, (0, 1), (1, 1)))
    cols = [list(base.matrix.column(c)) for c in range(base.matrix.cols)] + extra
    labels = base.labels + tuple(f"b{j}" for j in range(1, r - 1)) + ("u",)
    return Representation(IntMatrix.from_columns(cols, r), labels)


def build_H(r: int) -> Representation:
    """[I_r | D_r | v] with v = e_1 - e_2 - e_3; v is labeled ``e``."""
    if r < 3:
        raise ValueError("H_r needs r >= 3")
    base = clique_representation(r + 1)
    v = _unit(r, (0, 1), (1, -1), (2, -1))
    cols = [list(base.matrix.column(c)) for c in range(base.matrix.cols)] + [v]
    return Representation(IntMatrix.from_columns(cols, r), base.labels + ("e",))


def Tprime_lines(n: int) -> tuple[tuple[str, str], tuple[str, str]]:
    """Two 2-point lines of M(K_n) whose union is a 4-circuit (the 4-cycle 1-2-n-3)."""
    return (_edge(1, 2, n), _edge(3, n, n)), (_edge(2, n, n), _edge(1, 3, n))


def Tprime_cut(K: Matroid, n: int) -> ModularCut:
    l1, l2 = Tprime_lines(n)
    return ModularCut.from_flats(K, [l1, l2])


def triangle_cut(K: Matroid, n: int) -> ModularCut:
    return principal_cut(K, [_edge(1, 2, n), _edge(1, 3, n), _edge(2, 3, n)])


# ---------------------------------------------------------------------------
# finite-geometry helpers
# ---------------------------------------------------------------------------


def _pg2_points(p: int) -> list[tuple[int, int, int]]:
    pts = []
    for v in product(range(p), repeat=3):
        if any(v):
            first = next(x for x in v if x)
            if first == 1:
                pts.append(v)
    return pts


def _collinear(a, b, c, p: int) -> bool:
    det = (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )
    return det % p == 0


def _reid_columns() -> list[tuple[str, tuple[int, int, int]]]:
    """R9 inside PG(2,3): x, two full lines through x, two more points of a third."""
    p = 3
    pts = _pg2_points(p)
    x = (0, 0, 1)
    lines_through_x = []
    others = [q for q in pts if q != x]
    seen = set()
    for q in others:
        if q in seen:
            continue
        line = [q] + [s for s in others if s != q and _collinear(x, q, s, p)]
        seen.update(line)
        lines_through_x.append(sorted(line))
    l1, l2, l3 = lines_through_x[:3]
    cols = [("x", x)]
    cols += [(f"a{i}", q) for i, q in enumerate(l1, 1)]
    cols += [(f"b{i}", q) for i, q in enumerate(l2, 1)]
    cols += [("y", l3[0]), ("z", l3[1])]
    return cols


U8_MATRIX = [
    [1, 0, 1, 1, 0, 0, 1, 0],
    [0, 1, 1, -1, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 1, 0, -1],
    [0, 0, 0, 0, 1, -1, -1, 0],
]

U8PRIME_MATRIX = [
    [1, 0, 1, 1, 0, 0, 0, 0],
    [0, 1, 1, -1, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 1, 0, -1],
    [0, 0, 0, 0, 1, -1, 1, 0],
]


def named_representation(name: str) -> Representation | None:
    """Matrix form of a catalog entry (None for uniform matroids)."""
    key = name.strip()
    m = re.fullmatch(r"MK\((\d+)\)", key)
    if m:
        return clique_representation(int(m.group(1)))
    if key == "F7":
        cols = [c for c in product(range(2), repeat=3) if any(c)]
        cols.sort(key=lambda c: (sum(c), c[::-1]))
        return Representation(IntMatrix.from_columns(cols, 3), tuple(f"f{i}" for i in range(1, 8)), 2)
    if key == "R9":
        cols = _reid_columns()
        return Representation(IntMatrix.from_columns([c for _, c in cols], 3), tuple(l for l, _ in cols), 3)
    if key == "AG23_minus_e":
        pts = [(1, x, y) for x in range(3) for y in range(3)][:-1]
        return Representation(IntMatrix.from_columns(pts, 3), tuple(f"p{x}{y}" for _, x, y in pts), 3)
    if key == "T8":
        cols = _identity_columns(4) + [[0 if i == j else 1 for i in range(4)] for j in range(4)]
        labels = tuple(f"x{i}" for i in range(1, 5)) + tuple(f"y{i}" for i in range(1, 5))
        return Representation(IntMatrix.from_columns(cols, 4), labels, 3)
    if key == "U8":
        return Representation(IntMatrix(U8_MATRIX), tuple(str(i) for i in range(1, 9)))
    if key in ("U8prime", "U8p"):
        return Representation(IntMatrix(U8PRIME_MATRIX), tuple(str(i) for i in range(1, 9)))
    return None


_UNIFORM = re.compile(r"U\(?\s*(\d+)\s*,\s*(\d+)\s*\)?")
_SUM = re.compile(r"(.+?)\s*(?:\+|⊕)\s*(.+)")


@lru_cache(maxsize=None)
def build_named(name: str) -> Matroid:
    """U(m,n), MK(n), F7, R9, AG23_minus_e, T8, U8, U8prime, or ``A+B`` sums."""
    key = name.strip()
    if key == "U24+U24":
        key = "U(2,4)+U(2,4)"
    m = _UNIFORM.fullmatch(key)
    if m:
        k, n = int(m.group(1)), int(m.group(2))
        return UniformMatroid(k, [f"u{i}" for i in range(1, n + 1)])
    s = _SUM.fullmatch(key)
    if s and not key.startswith("MK"):
        from .matroid import DirectSum

        first, second = build_named(s.group(1)), build_named(s.group(2))
        return DirectSum(_relabel(first, "p"), _relabel(second, "q"))
    rep = named_representation(key)
    if rep is None:
        raise KeyError(f"unknown catalog name {name!r}")
    return rep.matroid()


def _relabel(M: Matroid, prefix: str) -> Matroid:
    if isinstance(M, UniformMatroid):
        return UniformMatroid(M.k, [f"{prefix}{i}" for i in range(1, len(M) + 1)])
    if isinstance(M, LinearMatroid):
        return LinearMatroid(M.matrix, [f"{prefix}{lab}" for lab in M.labels], M.field)
    raise TypeError("only uniform and linear matroids can be relabeled")


def Tr_size(r: int) -> int:
    return comb(r + 2, 2) - 2


def build_T(r: int, via: Via | str = Via.MATRIX) -> Matroid:
    via = Via(via)
    if r < 2:
        raise ValueError("T_r needs r >= 2")
    if via is Via.MATRIX:
        return build_A(r).matroid()
    if r < 3:
        raise ValueError("the projection route needs r >= 3")
    n = r + 2
    K = build_named(f"MK({n})")
    proj = elementary_projection(K, triangle_cut(K, n), "t", validate=r <= 5)
    return simplify(proj)[0]


def build_Tprime(r: int, via: Via | str = Via.MATRIX) -> Matroid:
    via = Via(via)
    if r < 2:
        raise ValueError("T'_r needs r >= 2")
    if via is Via.MATRIX:
        return build_Aprime(r).matroid()
    if r < 3:
        raise ValueError("the projection route needs r >= 3")
    n = r + 2
    K = build_named(f"MK({n})")
    proj = elementary_projection(K, Tprime_cut(K, n), "t", validate=r <= 5)
    return simplify(proj)[0]


CATALOG_NAMES = ("U(m,n)", "MK(n)", "F7", "R9", "AG23_minus_e", "T8", "U8", "U8prime")
