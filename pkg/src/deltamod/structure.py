"""Isomorphism, minors, spikes, special points and spanning-clique analysis."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import combinations
from math import comb

from .matroid import (
    CapExceeded,
    Matroid,
    bits,
    contract,
    delete,
    popcount,
    restrict,
    same_matroid,
    simplify,
)

ISOMORPHISM_CAP = 14
MINOR_HOST_CAP = 64
MINOR_PATTERN_CAP = 9
CLIQUE_EXACT_CHECK_CAP = 300_000


class NotSimpleError(ValueError):
    pass


class NotCliqueError(ValueError):
    pass


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------


def long_line_profile(M: Matroid) -> dict[int, tuple[int, ...]]:
    """Point counts of the long lines through each element, descending."""
    loops = M.loops_mask()
    prof: dict[int, list[int]] = {i: [] for i in bits(M.ground)}
    for line in M.lines():
        members = line & ~loops
        pts = len(restrict(M, members).parallel_classes())
        if pts >= 3:
            for i in bits(members):
                prof[i].append(pts)
    return {i: tuple(sorted(v, reverse=True)) for i, v in prof.items()}


def element_signatures(M: Matroid) -> dict[int, tuple]:
    """(singleton rank, parallel class size, long-line profile) per element."""
    loops = M.loops_mask()
    prof = long_line_profile(M)
    out = {}
    for i in bits(M.ground):
        if (loops >> i) & 1:
            out[i] = (0, popcount(loops), ())
        else:
            cls = M.closure_mask(loops | (1 << i)) & ~loops
            out[i] = (1, popcount(cls), prof[i])
    return out


def _dominates(big: tuple[int, ...], small: tuple[int, ...]) -> bool:
    return len(big) >= len(small) and all(b >= s for b, s in zip(big, small))


# ---------------------------------------------------------------------------
# embedding engine
# ---------------------------------------------------------------------------


def _pattern_order(P: Matroid) -> list[int]:
    """Place elements that close many small circuits with earlier ones first."""
    idx = list(bits(P.ground))
    order: list[int] = []
    remaining = set(idx)
    while remaining:
        def score(i):
            s = 0
            for a, b in combinations(order, 2):
                if P.r((1 << a) | (1 << b) | (1 << i)) < 3:
                    s += 1
            return (s, -i)

        best = max(remaining, key=score)
        order.append(best)
        remaining.remove(best)
    return order


def _embed(host: Matroid, P: Matroid, candidates: dict[int, list[int]], depth: int):
    """Injective map P -> host preserving rank on all sets of size <= depth."""
    order = _pattern_order(P)
    n = len(order)
    image: list[int] = []
    used: set[int] = set()

    def ok(t: int, h: int) -> bool:
        p = order[t]
        pbit, hbit = 1 << p, 1 << h
        for k in range(0, min(depth, t + 1)):
            for combo in combinations(range(t), k):
                pm, hm = pbit, hbit
                for c in combo:
                    pm |= 1 << order[c]
                    hm |= 1 << image[c]
                if P.r(pm) != host.r(hm):
                    return False
        return True

    def rec(t: int) -> bool:
        if t == n:
            return True
        for h in candidates[order[t]]:
            if h in used or not ok(t, h):
                continue
            image.append(h)
            used.add(h)
            if rec(t + 1):
                return True
            image.pop()
            used.discard(h)
        return False

    if rec(0):
        return {order[t]: image[t] for t in range(n)}
    return None


def are_isomorphic(M: Matroid, N: Matroid, cap: int = ISOMORPHISM_CAP) -> dict[str, str] | None:
    """An isomorphism ``M -> N`` as a label map, or None."""
    if len(M) != len(N) or M.full_rank != N.full_rank:
        return None
    if len(M) > cap:
        raise CapExceeded(f"isomorphism search capped at {cap} elements")
    sm, sn = element_signatures(M), element_signatures(N)
    if sorted(sm.values()) != sorted(sn.values()):
        return None
    by_sig: dict[tuple, list[int]] = {}
    for j, s in sn.items():
        by_sig.setdefault(s, []).append(j)
    cands = {i: by_sig[s] for i, s in sm.items()}
    found = _embed(N, M, cands, depth=max(M.full_rank, 1))
    if found is None:
        return None
    return {M.labels[i]: N.labels[j] for i, j in found.items()}


# ---------------------------------------------------------------------------
# minors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MinorWitness:
    contract: frozenset[str]
    delete: frozenset[str]
    bijection: dict[str, str]  # host label -> pattern label

    def replay(self, M: Matroid) -> Matroid:
        return delete(contract(M, self.contract), self.delete)

    def verify(self, M: Matroid, P: Matroid) -> bool:
        if self.contract & self.delete:
            return False
        N = self.replay(M)
        if set(N.elements) != set(self.bijection):
            return False
        return same_matroid(N, P, self.bijection)

    def to_dict(self) -> dict:
        return {
            "contract": sorted(self.contract),
            "delete": sorted(self.delete),
            "bijection": dict(sorted(self.bijection.items())),
        }


def _basis_of(M: Matroid, mask: int) -> int:
    b = 0
    for i in bits(mask):
        if M.r(b | (1 << i)) > popcount(b):
            b |= 1 << i
    return b


def has_minor(
    M: Matroid,
    P: Matroid,
    host_cap: int = MINOR_HOST_CAP,
    pattern_cap: int = MINOR_PATTERN_CAP,
) -> MinorWitness | None:
    """Search for a minor of M isomorphic to the simple matroid P.

    Every minor is M/C\\D with C independent, and for simple P it is a
    restriction of si(M/cl(C)); so it suffices to scan the flats F of rank
    r(M) - r(P) and embed P into the simplification of M/F.
    """
    if not P.is_simple():
        raise NotSimpleError("pattern must be simple")
    if len(P) > pattern_cap:
        raise CapExceeded(f"pattern larger than {pattern_cap} elements")
    if len(M) > host_cap:
        raise CapExceeded(f"host larger than {host_cap} elements")
    k = P.full_rank
    rm = M.full_rank
    if k > rm or len(P) > len(M):
        return None
    uniform_line = k == 2
    pprof = long_line_profile(P)
    plabels = P.elements
    for flat in M.flats_of_rank_mask(rm - k):
        N = contract(M, flat) if flat else M
        classes = N.parallel_classes()
        if len(classes) < len(P):
            continue
        reps = [(c & -c).bit_length() - 1 for c in classes]
        found: dict[int, int] | None = None
        if uniform_line:
            found = {p: reps[t] for t, p in enumerate(bits(P.ground))}
        elif k == 1:
            found = {next(bits(P.ground)): reps[0]}
        else:
            rmask = 0
            for i in reps:
                rmask |= 1 << i
            host = restrict(N, rmask)
            hprof = long_line_profile(host)
            cands = {p: [h for h in reps if _dominates(hprof[h], pprof[p])] for p in bits(P.ground)}
            if any(not c for c in cands.values()):
                continue
            found = _embed(host, P, cands, depth=k)
        if found is None:
            continue
        cset = _basis_of(M, flat)
        image = 0
        for h in found.values():
            image |= 1 << h
        dset = M.ground & ~cset & ~image
        return MinorWitness(
            frozenset(M.names(cset)),
            frozenset(M.names(dset)),
            {M.labels[h]: P.labels[p] for p, h in found.items()},
        )
    return None


def has_any_minor(M: Matroid, patterns: dict[str, Matroid]) -> dict[str, MinorWitness | None]:
    return {name: has_minor(M, P) for name, P in patterns.items()}


# ---------------------------------------------------------------------------
# three long lines through a point
# ---------------------------------------------------------------------------


class ThreeLineOutcome(str, enum.Enum):
    U25_MINOR = "U25_MINOR"
    R9 = "R9"
    NEITHER_HYPOTHESIS = "NEITHER_HYPOTHESIS"


def three_line_centre(M: Matroid) -> str | None:
    """A point whose long lines are exactly three and cover the ground set."""
    if M.full_rank != 3 or len(M) != 9 or not M.is_simple():
        return None
    long_lines = [ln for ln in M.lines() if popcount(ln) >= 3]
    for x in bits(M.ground):
        through = [ln for ln in long_lines if (ln >> x) & 1]
        if len(through) != 3:
            continue
        cover = 0
        for ln in through:
            cover |= ln
        if cover == M.ground:
            return M.labels[x]
    return None


def classify_three_line_configuration(M: Matroid) -> ThreeLineOutcome:
    from .catalog import build_named

    if three_line_centre(M) is None:
        return ThreeLineOutcome.NEITHER_HYPOTHESIS
    u25 = has_minor(M, build_named("U(2,5)")) is not None
    r9 = are_isomorphic(M, build_named("R9")) is not None
    if u25 and r9:
        raise AssertionError("a matroid isomorphic to R9 cannot have a U(2,5)-minor")
    if not (u25 or r9):
        raise AssertionError("three-line configuration with neither outcome")
    return ThreeLineOutcome.U25_MINOR if u25 else ThreeLineOutcome.R9


# ---------------------------------------------------------------------------
# spikes and special points
# ---------------------------------------------------------------------------


class TipClass(str, enum.Enum):
    NONE = "0"
    ONE = "1"
    MANY = ">=2"


def _require_simple(M: Matroid) -> None:
    if not M.is_simple():
        raise NotSimpleError("matroid must be simple")


def spike_tip_multiplicity(M: Matroid, x: str) -> TipClass:
    """How many spike restrictions have tip x: none, one, or at least two.

    Let P hold one representative of every point of M/x that comes from a
    long line of M through x. Spike restrictions with tip x correspond to
    circuits of si(M/x) inside P, and a set holds at least two circuits iff
    its nullity is at least two. Distinct leg choices on a line with four or
    more points are not counted separately.
    """
    _require_simple(M)
    N = contract(M, [x])
    reps = 0
    for cls in N.parallel_classes():
        if popcount(cls) >= 2:
            reps |= cls & -cls
    null = popcount(reps) - N.r(reps)
    if null == 0:
        return TipClass.NONE
    return TipClass.ONE if null == 1 else TipClass.MANY


@dataclass(frozen=True)
class PointRecord:
    four_point_lines: int
    tip: TipClass
    special: bool


@dataclass
class SpecialPointReport:
    points: dict[str, PointRecord] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(1 for p in self.points.values() if p.special)

    @property
    def special(self) -> list[str]:
        return [e for e, p in self.points.items() if p.special]

    def to_dict(self) -> dict:
        return {
            "total_special": self.total,
            "special": self.special,
            "points": {
                e: {"four_point_lines": p.four_point_lines, "tip": p.tip.value, "special": p.special}
                for e, p in self.points.items()
            },
        }


def is_special(four_point_lines: int, tip: TipClass) -> bool:
    return four_point_lines >= 2 or tip is TipClass.MANY or (tip is TipClass.ONE and four_point_lines >= 1)


def special_points(M: Matroid) -> SpecialPointReport:
    """Per-point data. A "4-point line" is any line with at least four points."""
    _require_simple(M)
    four = {i: 0 for i in bits(M.ground)}
    for line in M.lines():
        if popcount(line) >= 4:
            for i in bits(line):
                four[i] += 1
    report = SpecialPointReport()
    for i in bits(M.ground):
        lab = M.labels[i]
        tip = spike_tip_multiplicity(M, lab)
        report.points[lab] = PointRecord(four[i], tip, is_special(four[i], tip))
    return report


# ---------------------------------------------------------------------------
# spanning cliques
# ---------------------------------------------------------------------------


def _vertex_map(M: Matroid, xmask: int) -> dict[int, tuple[int, int]] | None:
    """Try to read a complete-graph structure off the triangles of M|X."""
    X = list(bits(xmask))
    m = len(X)
    n = 2
    while comb(n, 2) < m:
        n += 1
    if comb(n, 2) != m or n < 3:
        return None
    if M.r(xmask) != n - 1:
        return None

    def triangle(a, b):
        """Third element of the 3-point line through a, b inside X, if any."""
        line = M.closure_mask((1 << a) | (1 << b)) & xmask
        if popcount(line) == 3:
            return next(bits(line & ~(1 << a) & ~(1 << b)))
        if popcount(line) != 2:
            return -1
        return None

    a = X[0]
    pairs = []
    seen = {a}
    for b in X[1:]:
        if b in seen:
            continue
        c = triangle(a, b)
        if c is None or c == -1 or c in seen:
            if c == -1:
                return None
            continue
        pairs.append((b, c))
        seen.update((b, c))
    if len(pairs) != n - 2:
        return None
    # a = {1,2}; pairs[k] = ({1,k+3},{2,k+3}) up to swapping
    side1 = [pairs[0][0]]
    side2 = [pairs[0][1]]
    for b, c in pairs[1:]:
        if triangle(side1[0], b) not in (None, -1):
            side1.append(b)
            side2.append(c)
        elif triangle(side1[0], c) not in (None, -1):
            side1.append(c)
            side2.append(b)
        else:
            return None
    emap = {a: (1, 2)}
    for k, (b, c) in enumerate(zip(side1, side2)):
        emap[b] = (1, k + 3)
        emap[c] = (2, k + 3)
    for j, k in combinations(range(len(side1)), 2):
        t = triangle(side1[j], side1[k])
        if t in (None, -1) or t in emap:
            return None
        emap[t] = (j + 3, k + 3)
    if len(emap) != m:
        return None
    return emap


def clique_labels(n: int) -> list[str]:
    sep = "" if n < 10 else "_"
    return [f"e{i}{sep}{j}" for i, j in combinations(range(1, n + 1), 2)]


def require_clique(M: Matroid, X) -> dict[str, tuple[int, int]]:
    """Check that M|X is a clique spanning M; return edge names per label.

    The complete-graph structure is read off the triangles and then verified
    against M(K_n) on every r-subset (the bases determine the matroid) when
    that is at most ``CLIQUE_EXACT_CHECK_CAP`` subsets, otherwise on every
    subset of size at most four.
    """
    from .catalog import build_named

    xmask = M.mask(X)
    emap = _vertex_map(M, xmask)
    if emap is None:
        raise NotCliqueError("restriction is not a complete-graph matroid")
    n = max(v for e in emap.values() for v in e)
    if M.r(xmask) != M.full_rank:
        raise NotCliqueError("clique restriction does not span")
    K = build_named(f"MK({n})")
    sep = "" if n < 10 else "_"
    lab = {i: f"e{u}{sep}{v}" for i, (u, v) in emap.items()}
    sub = restrict(M, xmask)
    if comb(len(emap), n - 1) <= CLIQUE_EXACT_CHECK_CAP:
        if not same_matroid(sub, K, {M.labels[i]: lab[i] for i in emap}):
            raise NotCliqueError("restriction is not a complete-graph matroid")
    else:
        idx = list(emap)
        for k in range(1, 5):
            for combo in combinations(idx, k):
                a = b = 0
                for i in combo:
                    a |= 1 << i
                    b |= 1 << K.index[lab[i]]
                if M.r(a) != K.r(b):
                    raise NotCliqueError("restriction is not a complete-graph matroid")
    return {M.labels[i]: emap[i] for i in emap}


@dataclass
class CliqueAnalysis:
    rank: int
    size: int
    clique_size: int
    outside: list[str]
    types: dict[str, dict]
    three_point_lines: list[list[str]]
    four_circuits: list[list[str]]
    pair_checks: list[dict]
    special: SpecialPointReport
    size_bound: int

    @property
    def size_bound_holds(self) -> bool:
        return self.size <= self.size_bound

    @property
    def special_bound_holds(self) -> bool:
        return self.special.total <= 21

    def to_dict(self) -> dict:
        return {
            "rank": self.rank,
            "size": self.size,
            "clique_size": self.clique_size,
            "outside": self.outside,
            "types": self.types,
            "three_point_lines": self.three_point_lines,
            "four_circuits": self.four_circuits,
            "pair_checks": self.pair_checks,
            "special_points": self.special.to_dict(),
            "size_bound": self.size_bound,
            "size_bound_holds": self.size_bound_holds,
            "special_bound_holds": self.special_bound_holds,
        }


def _edge_vertices(edges) -> set[int]:
    return {v for e in edges for v in e}


def analyze_clique_extension(M: Matroid, X, hypotheses_hold: bool | None = None) -> CliqueAnalysis:
    """Structure report for a simple matroid with a spanning clique X.

    Pair statistics are always recorded; ``hypotheses_hold`` (the caller's
    certificate that M has none of the four excluded minors) decides whether
    the pair conclusions are asserted, together with rank >= 5 or >= 6.
    """
    from .extensions import ExtensionType, classify_extension_element

    _require_simple(M)
    emap = require_clique(M, X)
    xmask = M.mask(X)
    outside = M.names(M.ground & ~xmask)
    types = {}
    lines, circuits = [], []
    by_type: dict[str, tuple] = {}
    for e in outside:
        c = classify_extension_element(M, xmask, e, check_clique=False)
        types[e] = c.to_dict()
        gen = c.generator
        if c.type is ExtensionType.TYPE_A:
            lines.append(sorted(gen[0]))
        elif c.type is ExtensionType.TYPE_B:
            circuits.append(sorted(gen[0]))
        by_type[e] = (c.type, gen)
    r = M.full_rank
    checks = []
    for e, f in combinations(outside, 2):
        te, ge = by_type[e]
        tf, gf = by_type[f]
        if {te, tf} == {ExtensionType.TYPE_A, ExtensionType.TYPE_B}:
            a, b = (e, f) if te is ExtensionType.TYPE_A else (f, e)
            found = None
            nv = max(v for ed in emap.values() for v in ed)
            for quad in combinations(range(1, nv + 1), 4):
                z = [lab for lab, ed in emap.items() if set(ed) <= set(quad)]
                zm = M.mask(z)
                if M.r(zm | M.mask([a])) == 3 and M.r(zm | M.mask([b])) == 3:
                    found = sorted(z)
                    break
            checks.append({
                "pair": [a, b],
                "kind": "a-b",
                "common_K4": found,
                "asserted": bool(hypotheses_hold and r >= 5),
                "holds": found is not None,
            })
        elif te is tf is ExtensionType.TYPE_B:
            c1, c2 = ge[0], gf[0]
            inter = len(c1 & c2)
            verts = _edge_vertices(emap[x] for x in c1 | c2)
            checks.append({
                "pair": [e, f],
                "kind": "b-b",
                "intersection": inter,
                "in_common_K5": len(verts) <= 5,
                "asserted": bool(hypotheses_hold and r >= 6 and c1 != c2),
                "holds": c1 == c2 or (inter == 2 and len(verts) <= 5),
            })
    return CliqueAnalysis(
        rank=r,
        size=len(M),
        clique_size=popcount(xmask),
        outside=outside,
        types=types,
        three_point_lines=lines,
        four_circuits=circuits,
        pair_checks=checks,
        special=special_points(M),
        size_bound=comb(r + 2, 2) - 2,
    )
