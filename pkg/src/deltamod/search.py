"""Decision procedures for 2-modularity and the rank-2 problem."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations, product
from math import gcd

import numpy as np

from .linalg import IntMatrix, _det_exact, is_delta_modular, is_totally_delta_modular
from .matroid import CapExceeded, Matroid, bits, contract, delete, popcount, same_matroid, simplify
from .normal_form import Representation

MEMBERSHIP_SIZE_CAP = 12
MEMBERSHIP_RANK_CAP = 6
RANK2_DELTA_CAP = 8
RANDOM_RANK_CAP = 8


class SamplingBudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# totally 2-modular representations
# ---------------------------------------------------------------------------


def _column_options(support: list[int], fixed_rows: set[int]):
    """Candidate columns on ``support`` after sign and scale normalisation.

    Rows not yet used by earlier columns take positive entries (row scaling);
    the first entry in an already used row is positive (column scaling); a
    column whose entries are all even is not primitive.
    """
    k = len(support)
    if k == 0:
        yield ()
        return
    if k == 1:
        yield (1,)
        return
    first_old = next((i for i, row in enumerate(support) if row in fixed_rows), None)
    choices = []
    for i, row in enumerate(support):
        if row not in fixed_rows or i == first_old:
            choices.append((1, 2))
        else:
            choices.append((1, -1, 2, -2))
    for vals in product(*choices):
        if all(v % 2 == 0 for v in vals):
            continue
        yield vals


def _fundamental_support(M: Matroid, basis: list[int], c: int) -> list[int]:
    bmask = 0
    for b in basis:
        bmask |= 1 << b
    rows = []
    for i, b in enumerate(basis):
        if M.r((bmask & ~(1 << b)) | (1 << c)) == len(basis):
            rows.append(i)
    return rows


def _search_basis(M: Matroid, basis: list[int], others: list[int]):
    r = len(basis)
    bmask = 0
    for b in basis:
        bmask |= 1 << b
    supports = [_fundamental_support(M, basis, c) for c in others]
    cols: list[tuple[int, ...]] = []  # full length-r columns

    def consistent(t: int) -> bool:
        """All square submatrices of X using column t obey the bounds."""
        col_t = cols[t]
        for k in range(1, min(r, t + 1) + 1):
            for prev in combinations(range(t), k - 1):
                csel = list(prev) + [t]
                cmask = 0
                for j in csel:
                    cmask |= 1 << others[j]
                for rows in combinations(range(r), k):
                    if k == 1:
                        d = col_t[rows[0]]
                    else:
                        d = _det_exact([[cols[j][i] for j in csel] for i in rows])
                    if abs(d) > 2:
                        return False
                    rest = bmask
                    for i in rows:
                        rest &= ~(1 << basis[i])
                    is_basis = M.r(rest | cmask) == r
                    if (d != 0) != is_basis:
                        return False
        return True

    def rec(t: int, fixed: set[int]) -> bool:
        if t == len(others):
            return True
        sup = supports[t]
        for vals in _column_options(sup, fixed):
            col = [0] * r
            for i, v in zip(sup, vals):
                col[i] = v
            cols.append(tuple(col))
            if consistent(t) and rec(t + 1, fixed | set(sup)):
                return True
            cols.pop()
        return False

    if rec(0, set()):
        return cols
    return None


def find_totally_2modular_representation(
    M: Matroid,
    size_cap: int = MEMBERSHIP_SIZE_CAP,
    rank_cap: int = MEMBERSHIP_RANK_CAP,
) -> Representation | None:
    """A totally 2-modular [I_r | X] representing M, or None if M is not 2-modular.

    Every 2-modular matroid has such a representation on some basis, and on
    that basis the columns of X can be taken primitive and sign-normalised,
    so the search over bases and normalised columns is exhaustive.
    """
    if len(M) > size_cap:
        raise CapExceeded(f"membership search capped at {size_cap} elements")
    r = M.full_rank
    if r > rank_cap:
        raise CapExceeded(f"membership search capped at rank {rank_cap}")
    elems = list(bits(M.ground))
    for basis in combinations(elems, r):
        bmask = 0
        for b in basis:
            bmask |= 1 << b
        if M.r(bmask) != r:
            continue
        others = [e for e in elems if not (bmask >> e) & 1]
        cols = _search_basis(M, list(basis), others)
        if cols is None:
            continue
        ident = [[1 if i == j else 0 for j in range(r)] for i in range(r)]
        columns = [ident[i] for i in range(r)] + [list(c) for c in cols]
        mat = IntMatrix.from_columns(columns, r) if r else IntMatrix([], len(columns))
        rep = Representation(mat, tuple(M.labels[e] for e in list(basis) + others))
        if same_matroid(M, rep.matroid()) and (r == 0 or is_totally_delta_modular(mat, 2)):
            return rep
        raise AssertionError("incremental checks accepted a wrong representation")
    return None


def _reattach(N: Matroid, rep_si: Representation, repmap: dict[str, str | None]) -> Representation:
    """Representation of N from one of its simplification."""
    rows = rep_si.matrix.rows
    cols = []
    for lab in N.elements:
        target = repmap[lab]
        cols.append([0] * rows if target is None else list(rep_si.column(target)))
    mat = IntMatrix.from_columns(cols, rows) if rows else IntMatrix([], len(cols))
    return Representation(mat, tuple(N.elements))


def two_modular_witness(N: Matroid) -> Representation | None:
    """Witness for N via its simplification, with loops and parallels re-attached."""
    S, repmap = simplify(N)
    found = find_totally_2modular_representation(S)
    if found is None:
        return None
    rep = _reattach(N, found, repmap)
    if not same_matroid(N, rep.matroid()):
        raise AssertionError("re-attached representation does not represent the minor")
    return rep


class ExcludedMinorVerdict(str, enum.Enum):
    EXCLUDED_MINOR = "EXCLUDED_MINOR"
    IN_CLASS = "IN_CLASS"
    NOT_MINIMAL = "NOT_MINIMAL"


@dataclass
class ExcludedMinorReport:
    verdict: ExcludedMinorVerdict
    member_witness: Representation | None
    deletions: dict[str, Representation | None] = field(default_factory=dict)
    contractions: dict[str, Representation | None] = field(default_factory=dict)

    def to_dict(self) -> dict:
        def enc(rep):
            return None if rep is None else {"labels": list(rep.labels), "matrix": rep.matrix.tolist()}

        return {
            "verdict": self.verdict.value,
            "member_witness": enc(self.member_witness),
            "deletions": {k: enc(v) for k, v in self.deletions.items()},
            "contractions": {k: enc(v) for k, v in self.contractions.items()},
        }


def verify_excluded_minor_2modular(M: Matroid) -> ExcludedMinorReport:
    member = find_totally_2modular_representation(M)
    report = ExcludedMinorReport(ExcludedMinorVerdict.IN_CLASS, member)
    if member is not None:
        return report
    minimal = True
    for e in M.elements:
        report.deletions[e] = d = two_modular_witness(delete(M, [e]))
        report.contractions[e] = c = two_modular_witness(contract(M, [e]))
        minimal = minimal and d is not None and c is not None
    report.verdict = ExcludedMinorVerdict.EXCLUDED_MINOR if minimal else ExcludedMinorVerdict.NOT_MINIMAL
    return report


# ---------------------------------------------------------------------------
# rank 2
# ---------------------------------------------------------------------------


def rank2_candidates(delta: int, a_bound: int | None = None) -> list[tuple[int, int]]:
    """(1,0) and the primitive (a,b) with 1 <= b <= delta, |a| <= a_bound.

    Ordered by (b, |a|, a < 0) after (1,0), so small columns come first.
    """
    if a_bound is None:
        a_bound = delta
    out = [(1, 0)]
    rest = [
        (a, b)
        for b in range(1, delta + 1)
        for a in range(-a_bound, a_bound + 1)
        if gcd(abs(a), b) == 1
    ]
    rest.sort(key=lambda v: (v[1], abs(v[0]), v[0] < 0))
    return out + rest


def _clique_graph(cands: list[tuple[int, int]], delta: int) -> list[int]:
    n = len(cands)
    adj = [0] * n
    for i in range(n):
        a, b = cands[i]
        for j in range(i + 1, n):
            c, d = cands[j]
            if abs(a * d - b * c) <= delta:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def _colour_bound(cand: int, adj: list[int]) -> int:
    """Greedy colouring size of the candidate set: an upper bound on its clique number."""
    colours = 0
    rest = cand
    while rest:
        colours += 1
        avail = rest
        while avail:
            v = (avail & -avail).bit_length() - 1
            rest &= ~(1 << v)
            avail &= ~(1 << v) & ~adj[v]
    return colours


def max_clique(adj: list[int], must: int = 0) -> tuple[int, list[int]]:
    """Size and lexicographically least maximum clique containing vertex ``must``."""
    n = len(adj)
    best = [0]

    def grow(size: int, cand: int) -> None:
        if size > best[0]:
            best[0] = size
        if not cand or size + _colour_bound(cand, adj) <= best[0]:
            return
        while cand:
            if size + popcount(cand) <= best[0]:
                return
            v = (cand & -cand).bit_length() - 1
            cand &= ~(1 << v)
            grow(size + 1, cand & adj[v])

    grow(1, adj[must])
    omega = best[0]

    def first(chosen: list[int], cand: int) -> list[int] | None:
        if len(chosen) == omega:
            return chosen
        if len(chosen) + popcount(cand) < omega or len(chosen) + _colour_bound(cand, adj) < omega:
            return None
        while cand:
            v = (cand & -cand).bit_length() - 1
            cand &= ~(1 << v)
            got = first(chosen + [v], cand & adj[v])
            if got is not None:
                return got
        return None

    witness = first([must], adj[must])
    assert witness is not None and len(witness) == omega
    return omega, sorted(witness)


def rank2_max_size(delta: int, a_bound: int | None = None, cap: int = RANK2_DELTA_CAP) -> tuple[int, IntMatrix]:
    """Largest n with U(2,n) representable by a 2-row delta-modular matrix.

    Any rank-2 delta-modular matrix can be replaced by a 2-row one with
    primitive, sign-normalised columns, and a unimodular change of basis makes
    (1,0) a column. Among the other columns take v = (a', b') with the least
    b' > 0 and shear so 0 <= a' < b'. A column (a, b) then satisfies
    |b| <= delta and |a b' - a' b| <= delta, so
    |a| <= (delta + a' b) / b' <= delta.
    """
    if delta < 1:
        raise ValueError("delta must be positive")
    if delta > cap:
        raise CapExceeded(f"rank-2 search capped at delta {cap}")
    cands = rank2_candidates(delta, a_bound)
    adj = _clique_graph(cands, delta)
    omega, idx = max_clique(adj, must=0)
    cols = [cands[i] for i in idx]
    return omega, IntMatrix.from_columns(cols, 2)


def rank2_max_size_oracle(delta: int) -> int:
    """Same quantity over the enlarged candidate box |a| <= 2 delta."""
    return rank2_max_size(delta, a_bound=2 * delta, cap=max(delta, RANK2_DELTA_CAP))[0]


# ---------------------------------------------------------------------------
# random inputs
# ---------------------------------------------------------------------------


def _column_ok(cols: list[list[int]], r: int) -> bool:
    """Every square submatrix of [I | cols] through the last column obeys |det| <= 2."""
    t = len(cols) - 1
    for k in range(1, min(r, t + 1) + 1):
        for prev in combinations(range(t), k - 1):
            csel = list(prev) + [t]
            for rows in combinations(range(r), k):
                if abs(_det_exact([[cols[j][i] for j in csel] for i in rows])) > 2:
                    return False
    return True


def random_2modular_matrix(r: int, extra_cols: int, seed: int, budget: int = 10_000) -> IntMatrix:
    """Seeded 2-modular matrix: scrambled rows and columns of a totally 2-modular [I_r | X]."""
    if not 1 <= r <= RANDOM_RANK_CAP:
        raise ValueError(f"r must be in 1..{RANDOM_RANK_CAP}")
    rng = np.random.default_rng(seed)
    values = np.array([0, 1, -1, 2, -2])
    weights = np.array([0.45, 0.2, 0.2, 0.075, 0.075])
    cols: list[list[int]] = []
    tries = 0
    while len(cols) < extra_cols:
        tries += 1
        if tries > budget:
            raise SamplingBudgetExceeded("could not sample a totally 2-modular column; retry with another seed")
        col = [int(x) for x in rng.choice(values, size=r, p=weights)]
        cols.append(col)
        if not _column_ok(cols, r):
            cols.pop()
    full = np.hstack([np.eye(r, dtype=np.int64), np.array(cols, dtype=np.int64).T.reshape(r, extra_cols)])
    for _ in range(2 * r):
        if r < 2:
            break
        i, j = rng.choice(r, size=2, replace=False)
        full[i] += int(rng.choice([-1, 1])) * full[j]
    if r >= 2 and rng.random() < 0.5:
        i, j = rng.choice(r, size=2, replace=False)
        full[[i, j]] = full[[j, i]]
    perm = rng.permutation(full.shape[1])
    out = IntMatrix.from_numpy(full[:, perm])
    assert is_delta_modular(out, 2)
    return out
