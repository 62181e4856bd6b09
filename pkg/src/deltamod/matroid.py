"""Rank-oracle matroids.

A matroid is a memoised rank function on bitmasks over a *universe* of
labels. Derived matroids (restriction, contraction, dual) share the universe
of the matroid they come from, so their rank queries land in the parent's
memo table. Public functions accept either bitmasks or iterables of labels.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator

import numpy as np

from . import kernels
from .linalg import IntMatrix, _kernel_safe, _rank_exact

RATIONALS = 0


def bits(mask: int) -> Iterator[int]:
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return mask.bit_count()


class CapExceeded(RuntimeError):
    """A configured search or enumeration cap was exceeded."""


class Matroid:
    kind = "abstract"

    def __init__(self, labels: Iterable[str], ground: int | None = None):
        self.labels: tuple[str, ...] = tuple(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be distinct")
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self.ground = (1 << len(self.labels)) - 1 if ground is None else ground
        self._memo: dict[int, int] = {}
        self._flats: list[list[int]] | None = None
        self._full_rank: int | None = None

    # -- oracle ----------------------------------------------------------
    def _rank(self, mask: int) -> int:
        raise NotImplementedError

    def r(self, mask: int) -> int:
        try:
            return self._memo[mask]
        except KeyError:
            value = self._rank(mask)
            self._memo[mask] = value
            return value

    def mask(self, elems) -> int:
        if isinstance(elems, int):
            return elems
        if isinstance(elems, str):
            elems = [elems]
        m = 0
        for e in elems:
            i = self.index[e]
            if not (self.ground >> i) & 1:
                raise KeyError(f"{e!r} is not in the ground set")
            m |= 1 << i
        return m

    def names(self, mask: int) -> list[str]:
        return [self.labels[i] for i in bits(mask)]

    def rank(self, elems=None) -> int:
        if elems is None:
            return self.full_rank
        return self.r(self.mask(elems))

    @property
    def full_rank(self) -> int:
        if self._full_rank is None:
            self._full_rank = self.r(self.ground)
        return self._full_rank

    @property
    def elements(self) -> list[str]:
        return self.names(self.ground)

    def __len__(self) -> int:
        return popcount(self.ground)

    def __contains__(self, label) -> bool:
        i = self.index.get(label)
        return i is not None and bool((self.ground >> i) & 1)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} rank={self.full_rank} size={len(self)}>"

    # -- closure and flats ----------------------------------------------
    def closure_mask(self, mask: int) -> int:
        rs = self.r(mask)
        out = mask
        for i in bits(self.ground & ~mask):
            if self.r(mask | (1 << i)) == rs:
                out |= 1 << i
        return out

    def closure(self, elems) -> frozenset[str]:
        return frozenset(self.names(self.closure_mask(self.mask(elems))))

    def is_flat(self, mask: int) -> bool:
        return self.closure_mask(mask) == mask

    def flats_by_rank(self, max_flats: int | None = None) -> list[list[int]]:
        """All flats grouped by rank, each level sorted by mask value."""
        if self._flats is None:
            bottom = self.closure_mask(0)
            levels = [[bottom]]
            seen = {bottom}
            while True:
                nxt = []
                for flat in levels[-1]:
                    covered = flat
                    for i in bits(self.ground & ~flat):
                        if (covered >> i) & 1:
                            continue
                        cover = self.closure_mask(flat | (1 << i))
                        covered |= cover
                        if cover not in seen:
                            seen.add(cover)
                            nxt.append(cover)
                            if max_flats is not None and len(seen) > max_flats:
                                raise CapExceeded(f"more than {max_flats} flats")
                if not nxt:
                    break
                levels.append(sorted(nxt))
            self._flats = levels
        elif max_flats is not None and sum(map(len, self._flats)) > max_flats:
            raise CapExceeded(f"more than {max_flats} flats")
        return self._flats

    def flats(self, max_flats: int | None = None) -> list[int]:
        return [f for level in self.flats_by_rank(max_flats) for f in level]

    def flats_of_rank_mask(self, k: int) -> list[int]:
        levels = self.flats_by_rank()
        return list(levels[k]) if 0 <= k < len(levels) else []

    # -- points ----------------------------------------------------------
    def loops_mask(self) -> int:
        return self.closure_mask(0)

    def parallel_classes(self) -> list[int]:
        """Parallel classes of non-loops, ordered by smallest member."""
        loops = self.loops_mask()
        remaining = self.ground & ~loops
        out = []
        while remaining:
            i = (remaining & -remaining).bit_length() - 1
            cls = self.closure_mask(loops | (1 << i)) & ~loops
            out.append(cls)
            remaining &= ~cls
        return out

    def is_simple(self) -> bool:
        return self.loops_mask() == 0 and all(popcount(c) == 1 for c in self.parallel_classes())

    def lines(self) -> list[int]:
        """Rank-2 flats, computed without enumerating higher flats."""
        classes = self.parallel_classes()
        loops = self.loops_mask()
        reps = [(c & -c).bit_length() - 1 for c in classes]
        seen: set[int] = set()
        out = []
        for a, b in combinations(reps, 2):
            line = self.closure_mask(loops | (1 << a) | (1 << b))
            if line not in seen:
                seen.add(line)
                out.append(line)
        return sorted(out)

    # -- convenience wrappers ---------------------------------------------
    def delete(self, elems) -> "Matroid":
        return delete(self, elems)

    def restrict(self, elems) -> "Matroid":
        return restrict(self, elems)

    def contract(self, elems) -> "Matroid":
        return contract(self, elems)

    def dual(self) -> "Matroid":
        return dual(self)

    def to_dict(self) -> dict:
        raise NotImplementedError(f"{type(self).__name__} has no serialisation")


# ---------------------------------------------------------------------------
# concrete matroids
# ---------------------------------------------------------------------------


class LinearMatroid(Matroid):
    """Column matroid of an integer matrix over Q (``field=0``) or GF(p)."""

    kind = "linear"

    def __init__(self, matrix: IntMatrix, labels: Iterable[str] | None = None, field: int = RATIONALS):
        if labels is None:
            labels = [str(j) for j in range(matrix.cols)]
        labels = tuple(labels)
        if len(labels) != matrix.cols:
            raise ValueError("one label per column required")
        if field:
            matrix = IntMatrix([[x % field for x in row] for row in matrix.tolist()], matrix.cols)
        super().__init__(labels)
        self.matrix = matrix
        self.field = field
        self._fast = field != 0 or _kernel_safe(matrix)
        self._arr = matrix.to_numpy() if self._fast else None
        self._rows = matrix.tolist()

    def _rank(self, mask: int) -> int:
        if not mask:
            return 0
        idx = list(bits(mask))
        if self._fast:
            sub = self._arr[:, idx]
            if self.field:
                return kernels.rank_mod_p(sub, self.field)
            return kernels.rank(sub)
        return _rank_exact([[row[j] for j in idx] for row in self._rows])

    def closure_mask(self, mask: int) -> int:
        if not self._fast:
            return super().closure_mask(mask)
        sel = list(bits(mask))
        rest = list(bits(self.ground & ~mask))
        if not rest:
            return mask
        sub = self._arr[:, sel + rest]
        if self.field:
            inside = kernels.span_mask_mod_p(sub, len(sel), self.field)
        else:
            inside = kernels.span_mask(sub, len(sel))
        out = mask
        for pos, j in enumerate(rest, start=len(sel)):
            if inside[pos]:
                out |= 1 << j
        return out

    def to_dict(self) -> dict:
        return {
            "kind": "linear",
            "ground": list(self.labels),
            "matrix": self.matrix.tolist(),
            "field": field_name(self.field),
        }


class UniformMatroid(Matroid):
    kind = "uniform"

    def __init__(self, k: int, labels: Iterable[str]):
        super().__init__(labels)
        if not 0 <= k <= len(self.labels):
            raise ValueError("rank out of range")
        self.k = k

    def _rank(self, mask: int) -> int:
        return min(popcount(mask), self.k)

    def to_dict(self) -> dict:
        return {"kind": "uniform", "ground": list(self.labels), "rank": self.k}


class Restriction(Matroid):
    kind = "restriction"

    def __init__(self, parent: Matroid, ground: int):
        super().__init__(parent.labels, ground & parent.ground)
        self.index = parent.index
        self.parent = parent

    def _rank(self, mask: int) -> int:
        return self.parent.r(mask)

    def closure_mask(self, mask: int) -> int:
        return self.parent.closure_mask(mask) & self.ground

    def to_dict(self) -> dict:
        return {"kind": "restriction", "ground": self.elements, "base": self.parent.to_dict()}


class Contraction(Matroid):
    kind = "contraction"

    def __init__(self, parent: Matroid, contracted: int):
        super().__init__(parent.labels, parent.ground & ~contracted)
        self.index = parent.index
        self.parent = parent
        self.contracted = contracted
        self._rc = parent.r(contracted)

    def _rank(self, mask: int) -> int:
        return self.parent.r(mask | self.contracted) - self._rc

    def closure_mask(self, mask: int) -> int:
        return self.parent.closure_mask(mask | self.contracted) & self.ground

    def to_dict(self) -> dict:
        return {
            "kind": "contraction",
            "ground": self.elements,
            "contract": self.parent.names(self.contracted),
            "base": self.parent.to_dict(),
        }


class Dual(Matroid):
    kind = "dual"

    def __init__(self, parent: Matroid):
        super().__init__(parent.labels, parent.ground)
        self.index = parent.index
        self.parent = parent

    def _rank(self, mask: int) -> int:
        p = self.parent
        return popcount(mask) + p.r(p.ground & ~mask) - p.full_rank

    def to_dict(self) -> dict:
        return {"kind": "dual", "ground": self.elements, "base": self.parent.to_dict()}


class DirectSum(Matroid):
    kind = "direct_sum"

    def __init__(self, first: Matroid, second: Matroid):
        if set(first.elements) & set(second.elements):
            raise ValueError("direct sum needs disjoint ground sets")
        if set(first.labels) & set(second.labels):
            raise ValueError("direct sum needs disjoint label universes")
        shift = len(first.labels)
        super().__init__(first.labels + second.labels, first.ground | (second.ground << shift))
        self.first, self.second, self.shift = first, second, shift
        self._low = (1 << shift) - 1

    def _rank(self, mask: int) -> int:
        return self.first.r(mask & self._low) + self.second.r(mask >> self.shift)

    def to_dict(self) -> dict:
        return {
            "kind": "direct_sum",
            "ground": self.elements,
            "parts": [self.first.to_dict(), self.second.to_dict()],
        }


# ---------------------------------------------------------------------------
# derived constructions
# ---------------------------------------------------------------------------


def _root(M: Matroid) -> Matroid:
    return M.parent if isinstance(M, Restriction) else M


def restrict(M: Matroid, elems) -> Matroid:
    mask = M.mask(elems)
    return Restriction(_root(M), mask)


def delete(M: Matroid, elems) -> Matroid:
    return Restriction(_root(M), M.ground & ~M.mask(elems))


def contract(M: Matroid, elems) -> Matroid:
    mask = M.mask(elems)
    if not mask:
        return M
    if isinstance(M, Contraction):
        return Contraction(M.parent, M.contracted | mask)
    if isinstance(M, Restriction) and isinstance(M.parent, Contraction):
        # (N/C)|G / S == (N/(C+S))|(G-S)
        inner = M.parent
        return Restriction(Contraction(inner.parent, inner.contracted | mask), M.ground & ~mask)
    if isinstance(M, Restriction):
        return Restriction(Contraction(M.parent, mask), M.ground & ~mask)
    return Contraction(M, mask)


def dual(M: Matroid) -> Matroid:
    if isinstance(M, Dual):
        return M.parent
    return Dual(M)


def direct_sum(M: Matroid, N: Matroid) -> Matroid:
    return DirectSum(M, N)


def simplify(M: Matroid) -> tuple[Matroid, dict[str, str | None]]:
    """Delete loops and keep the smallest-index member of each parallel class.

    Returns the simple restriction and a map from every element to its
    representative (``None`` for loops).
    """
    rep: dict[str, str | None] = {lab: None for lab in M.names(M.loops_mask())}
    keep = 0
    for cls in M.parallel_classes():
        low = cls & -cls
        keep |= low
        r_label = M.labels[low.bit_length() - 1]
        for lab in M.names(cls):
            rep[lab] = r_label
    return restrict(M, keep), rep


def epsilon(M: Matroid) -> int:
    """Number of points (rank-one flats)."""
    return len(M.parallel_classes())


def closure(M: Matroid, elems) -> frozenset[str]:
    return M.closure(elems)


def flats_of_rank(M: Matroid, k: int) -> list[frozenset[str]]:
    if not 0 <= k <= M.full_rank:
        raise ValueError(f"rank {k} outside 0..{M.full_rank}")
    return [frozenset(M.names(f)) for f in M.flats_of_rank_mask(k)]


def nullity(M: Matroid, elems=None) -> int:
    mask = M.ground if elems is None else M.mask(elems)
    return popcount(mask) - M.r(mask)


def is_circuit_mask(M: Matroid, mask: int) -> bool:
    n = popcount(mask)
    if M.r(mask) != n - 1:
        return False
    return all(M.r(mask & ~(1 << i)) == n - 1 for i in bits(mask))


def circuits_within(M: Matroid, elems=None, max_size: int | None = None) -> list[frozenset[str]]:
    """Minimal dependent subsets of ``elems`` of size at most ``max_size``."""
    mask = M.ground if elems is None else M.mask(elems)
    idx = list(bits(mask))
    if max_size is None:
        max_size = M.r(mask) + 1
    out = []
    for k in range(1, min(max_size, len(idx)) + 1):
        for combo in combinations(idx, k):
            c = 0
            for i in combo:
                c |= 1 << i
            if is_circuit_mask(M, c):
                out.append(frozenset(M.names(c)))
    return out


def local_connectivity(M: Matroid, A, B) -> int:
    a, b = M.mask(A), M.mask(B)
    return M.r(a) + M.r(b) - M.r(a | b)


VERTICAL_CAP = 18


def vertical_separation(M: Matroid, k: int, cap: int = VERTICAL_CAP):
    """Smallest-order vertical j-separation with j < k, as ``(X, Y, j)``."""
    if k < 1:
        raise ValueError("k must be positive")
    n = len(M)
    if n > cap:
        raise CapExceeded(f"ground set of size {n} exceeds vertical-connectivity cap {cap}")
    idx = list(bits(M.ground))
    if n < 2:
        return None
    first, rest = idx[0], idx[1:]
    best = None
    rm = M.full_rank
    for code in range(1 << len(rest)):
        X = 1 << first
        for pos, i in enumerate(rest):
            if (code >> pos) & 1:
                X |= 1 << i
        Y = M.ground & ~X
        if not Y:
            continue
        rx, ry = M.r(X), M.r(Y)
        j = rx + ry - rm + 1
        if j < k and min(rx, ry) >= j and (best is None or j < best[2]):
            best = (frozenset(M.names(X)), frozenset(M.names(Y)), j)
    return best


def is_vertically_k_connected(M: Matroid, k: int, cap: int = VERTICAL_CAP) -> bool:
    return vertical_separation(M, k, cap) is None


def same_matroid(M: Matroid, N: Matroid, mapping: dict[str, str] | None = None) -> bool:
    """Exact check that ``mapping`` (identity by default) is an isomorphism.

    Small ground sets are compared on every subset; larger ones on every
    subset of size ``r`` (the bases determine the matroid).
    """
    if len(M) != len(N) or M.full_rank != N.full_rank:
        return False
    src = M.elements
    if mapping is None:
        mapping = {e: e for e in src}
    if sorted(mapping[e] for e in src) != sorted(N.elements):
        return False
    mi = [M.index[e] for e in src]
    ni = [N.index[mapping[e]] for e in src]
    n = len(src)
    sizes = range(n + 1) if n <= 16 else [M.full_rank]
    for k in sizes:
        for combo in combinations(range(n), k):
            a = b = 0
            for p in combo:
                a |= 1 << mi[p]
                b |= 1 << ni[p]
            if M.r(a) != N.r(b):
                return False
    return True


def rank_axiom_violation(M: Matroid, rng: np.random.Generator, trials: int = 1000):
    """Spot-check the rank axioms on random subsets; returns a witness or None."""
    idx = list(bits(M.ground))
    if M.r(0) != 0:
        return ("empty", 0)
    for _ in range(trials):
        a = b = 0
        for i in idx:
            if rng.random() < 0.5:
                a |= 1 << i
            if rng.random() < 0.5:
                b |= 1 << i
        ra, rb = M.r(a), M.r(b)
        if not 0 <= ra <= popcount(a):
            return ("bounds", a)
        if M.r(a | b) + M.r(a & b) > ra + rb:
            return ("submodular", a, b)
        if M.r(a | b) < ra or M.r(a & b) > ra:
            return ("monotone", a, b)
    return None


def field_name(p: int) -> str:
    return "Q" if p == RATIONALS else f"GF({p})"


def parse_field(name: str | int | None) -> int:
    if name in (None, "Q", "QQ", "R", 0):
        return RATIONALS
    if isinstance(name, int):
        return name
    text = name.strip().upper()
    if text.startswith("GF(") and text.endswith(")"):
        return int(text[3:-1])
    raise ValueError(f"unknown field {name!r}")


def matroid_from_dict(data: dict) -> Matroid:
    """Inverse of ``Matroid.to_dict``."""
    kind = data["kind"]
    if kind == "linear":
        return LinearMatroid(IntMatrix(data["matrix"], len(data["ground"])), data["ground"], parse_field(data.get("field")))
    if kind == "uniform":
        return UniformMatroid(int(data["rank"]), data["ground"])
    if kind == "restriction":
        base = matroid_from_dict(data["base"])
        return restrict(base, data["ground"])
    if kind == "contraction":
        base = matroid_from_dict(data["base"])
        return contract(base, data["contract"])
    if kind == "dual":
        return dual(matroid_from_dict(data["base"]))
    if kind == "direct_sum":
        first, second = (matroid_from_dict(p) for p in data["parts"])
        return DirectSum(first, second)
    if kind == "extension":
        from .extensions import ModularCut, extend

        base = matroid_from_dict(data["base"])
        cut = ModularCut.from_flats(base, data["cut"])
        return extend(base, cut, data["element"], validate=False)
    raise ValueError(f"unknown matroid kind {kind!r}")
