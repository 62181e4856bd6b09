"""Modular cuts and single-element extensions.

A modular cut is stored by its minimal flats; membership of a flat is
"contains some generator". The extension rule only needs the generators:
e lies in cl_N(X) iff cl_M(X) contains a generator, i.e. iff some generator G
satisfies r(X | G) == r(X).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations

from .matroid import CapExceeded, Matroid, bits, contract, popcount

CUT_ENUMERATION_CAP = 40
VALIDATION_FLAT_CAP = 5000


class InvalidCutError(ValueError):
    pass


class ImproperCutError(ValueError):
    pass


def _minimal(masks) -> tuple[int, ...]:
    uniq = sorted(set(masks), key=lambda m: (popcount(m), m))
    out: list[int] = []
    for m in uniq:
        if not any(g & ~m == 0 for g in out):
            out.append(m)
    return tuple(sorted(out))


@dataclass(frozen=True)
class ModularCut:
    base: Matroid
    generators: tuple[int, ...]  # minimal flats, as masks

    @classmethod
    def from_flats(cls, base: Matroid, flats) -> "ModularCut":
        return cls(base, _minimal(base.mask(f) for f in flats))

    def __contains__(self, flat) -> bool:
        m = self.base.mask(flat)
        return any(g & ~m == 0 for g in self.generators)

    def spans(self, mask: int) -> bool:
        """True iff cl(mask) belongs to the cut."""
        rx = self.base.r(mask)
        return any(self.base.r(mask | g) == rx for g in self.generators)

    @property
    def is_proper(self) -> bool:
        bottom = self.base.loops_mask()
        return not any(g & ~bottom == 0 for g in self.generators)

    @property
    def is_empty(self) -> bool:
        return not self.generators

    def flats(self) -> list[int]:
        return [f for f in self.base.flats() if f in self]

    def generator_labels(self) -> list[list[str]]:
        return [self.base.names(g) for g in self.generators]

    def __eq__(self, other):
        return (
            isinstance(other, ModularCut)
            and other.base is self.base
            and other.generators == self.generators
        )

    def __hash__(self):
        return hash((id(self.base), self.generators))


def _check_flats(base: Matroid, masks: list[int]) -> None:
    for m in masks:
        if not base.is_flat(m):
            raise InvalidCutError(f"{sorted(base.names(m))} is not a flat")


def _is_modular_pair(base: Matroid, a: int, b: int) -> bool:
    return base.r(a) + base.r(b) == base.r(a | b) + base.r(a & b)


def cut_violation(base: Matroid, flats):
    """First violated modular-cut axiom as a tuple, or None."""
    masks = sorted({base.mask(f) for f in flats})
    _check_flats(base, masks)
    members = set(masks)
    all_flats = base.flats()
    for f in masks:
        for g in all_flats:
            if g & f == f and g not in members:
                return ("upward", f, g)
    for a, b in combinations(masks, 2):
        if (a & b) not in members and _is_modular_pair(base, a, b):
            return ("modular_pair", a, b)
    return None


def is_modular_cut(base: Matroid, flats) -> tuple[bool, tuple | None]:
    """Check both closure rules; returns ``(ok, violation)``."""
    v = cut_violation(base, flats)
    return v is None, v


def _upward(base: Matroid, seeds: list[int]) -> set[int]:
    return {f for f in base.flats() if any(s & ~f == 0 for s in seeds)}


def generated_modular_cut(base: Matroid, seeds) -> ModularCut:
    """Least family containing ``seeds`` closed under both cut rules."""
    masks = [base.mask(s) for s in seeds]
    _check_flats(base, masks)
    cut = _upward(base, masks)
    gens = list(_minimal(cut))
    while True:
        members = sorted(cut)
        new = None
        for a, b in combinations(members, 2):
            inter = a & b
            if inter not in cut and _is_modular_pair(base, a, b):
                new = inter
                break
        if new is None:
            break
        gens.append(new)
        cut |= _upward(base, [new])
    return ModularCut(base, _minimal(cut))


def principal_cut(base: Matroid, flat) -> ModularCut:
    m = base.mask(flat)
    if not base.is_flat(m):
        raise InvalidCutError(f"{sorted(base.names(m))} is not a flat")
    return ModularCut(base, (m,))


def validate_cut(cut: ModularCut, flat_cap: int = VALIDATION_FLAT_CAP) -> None:
    """Raise InvalidCutError unless the upward closure of the generators is a cut."""
    base = cut.base
    _check_flats(base, list(cut.generators))
    try:
        base.flats_by_rank(max_flats=flat_cap)
    except CapExceeded:
        raise
    members = cut.flats()
    ok, violation = is_modular_cut(base, members)
    if not ok:
        raise InvalidCutError(f"not a modular cut: {violation[0]} rule fails")


class ExtensionMatroid(Matroid):
    """Single-element extension of ``base`` by a modular cut."""

    kind = "extension"

    def __init__(self, base: Matroid, cut: ModularCut, label: str):
        if cut.base is not base:
            raise ValueError("cut belongs to a different matroid")
        if label in base.index:
            raise ValueError(f"label {label!r} already used")
        super().__init__(base.labels + (label,), base.ground | (1 << len(base.labels)))
        self.base = base
        self.cut = cut
        self.element = label
        self._ebit = 1 << len(base.labels)

    def _rank(self, mask: int) -> int:
        x = mask & ~self._ebit
        rx = self.base.r(x)
        if not mask & self._ebit:
            return rx
        return rx if self.cut.spans(x) else rx + 1

    def to_dict(self) -> dict:
        return {
            "kind": "extension",
            "ground": self.elements,
            "element": self.element,
            "base": self.base.to_dict(),
            "cut": self.cut.generator_labels(),
        }


def extend(base: Matroid, cut: ModularCut, new_label: str, validate: bool = True) -> ExtensionMatroid:
    """Crapo extension. ``validate`` re-checks the cut axioms on all flats."""
    if not cut.is_proper:
        raise ImproperCutError("improper modular cut: the new element would be a loop")
    if validate:
        validate_cut(cut)
    return ExtensionMatroid(base, cut, new_label)


def elementary_projection(base: Matroid, cut: ModularCut, new_label: str, validate: bool = True) -> Matroid:
    if cut.is_empty:
        raise ImproperCutError("empty modular cut: projection would return the base")
    ext = extend(base, cut, new_label, validate=validate)
    return contract(ext, new_label)


def spanning_flats(M: Matroid, X, e: str) -> ModularCut:
    """Modular cut of M|X formed by the flats of M|X that span e."""
    xmask = M.mask(X)
    rest = M.restrict(xmask)
    ebit = M.mask([e])
    gens = []
    for f in rest.flats():
        rf = M.r(f)
        if M.r(f | ebit) == rf:
            gens.append(f)
    return ModularCut(rest, _minimal(gens))


# ---------------------------------------------------------------------------
# classification over cliques
# ---------------------------------------------------------------------------


class ExtensionType(str, enum.Enum):
    TYPE_A = "TYPE_A"
    TYPE_B = "TYPE_B"
    OTHER = "OTHER"


@dataclass(frozen=True)
class Classification:
    element: str
    type: ExtensionType
    generator: tuple[frozenset[str], ...]  # the 3-point line, the circuit, or minimal flats

    def to_dict(self) -> dict:
        return {
            "element": self.element,
            "type": self.type.value,
            "generator": [sorted(g) for g in self.generator],
        }


def classify_cut(cut: ModularCut) -> tuple[ExtensionType, tuple[int, ...]]:
    base = cut.base
    gens = cut.generators
    if len(gens) == 1:
        g = gens[0]
        if base.r(g) == 2 and popcount(g) == 3:
            return ExtensionType.TYPE_A, (g,)
    if len(gens) == 2:
        a, b = gens
        if all(base.r(g) == 2 and popcount(g) == 2 for g in (a, b)):
            u = a | b
            if popcount(u) == 4 and base.r(u) == 3 and all(base.r(u & ~(1 << i)) == 3 for i in bits(u)):
                return ExtensionType.TYPE_B, (u,)
    return ExtensionType.OTHER, gens


def classify_extension_element(M: Matroid, X, e: str, check_clique: bool = True) -> Classification:
    from .structure import require_clique

    xmask = M.mask(X)
    if check_clique:
        require_clique(M, xmask)
    cut = spanning_flats(M, xmask, e)
    kind, gens = classify_cut(cut)
    return Classification(e, kind, tuple(frozenset(M.names(g)) for g in gens))


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def enumerate_modular_cuts(base: Matroid, cap: int = CUT_ENUMERATION_CAP) -> list[ModularCut]:
    """All proper modular cuts, one per antichain of minimal flats.

    Antichains are built in lexicographic order of flat indices, where flats
    are sorted by (rank, sorted labels). A branch is pruned as soon as the
    upward closure of the antichain is improper or the antichain stops being
    the set of minimal members of the cut it generates.
    """
    try:
        levels = base.flats_by_rank(max_flats=cap)
    except CapExceeded as exc:
        raise CapExceeded(f"more than {cap} flats; enumeration capped") from exc
    order = sorted(
        (f for level in levels for f in level),
        key=lambda f: (base.r(f), [base.index[x] for x in base.names(f)]),
    )
    n = len(order)
    bottom = base.loops_mask()
    comparable = [[(a & b) in (a, b) for b in order] for a in order]
    out: list[ModularCut] = []

    def closure_of(chosen: list[int]) -> ModularCut:
        return generated_modular_cut(base, [order[i] for i in chosen])

    def visit(chosen: list[int], start: int) -> None:
        if chosen:
            cut = closure_of(chosen)
            if not cut.is_proper:
                return
            if set(cut.generators) != {order[i] for i in chosen}:
                if any(order[i] not in cut.generators for i in chosen):
                    return
                # the cut has extra minimal flats; a later antichain owns it
            else:
                out.append(cut)
        else:
            out.append(ModularCut(base, ()))
        for j in range(start, n):
            if order[j] == bottom:
                continue
            if any(comparable[i][j] for i in chosen):
                continue
            visit(chosen + [j], j + 1)

    visit([], 0)
    return out
