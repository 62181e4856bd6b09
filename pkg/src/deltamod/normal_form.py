"""Representations and the [I_r | X] standard form for 2-modular matrices."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd
from typing import Sequence

from .linalg import IntMatrix, as_intmatrix, is_delta_modular, is_totally_delta_modular, rank
from .matroid import RATIONALS, LinearMatroid, field_name, parse_field


class NotTwoModularError(ValueError):
    pass


@dataclass(frozen=True)
class Representation:
    matrix: IntMatrix
    labels: tuple[str, ...]
    field: int = RATIONALS
    _cache: dict = dc_field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        m = as_intmatrix(self.matrix)
        labels = tuple(str(x) for x in self.labels)
        if len(labels) != m.cols:
            raise ValueError(f"{len(labels)} labels for {m.cols} columns")
        if len(set(labels)) != len(labels):
            raise ValueError("labels must be distinct")
        if self.field:
            m = IntMatrix([[x % self.field for x in row] for row in m.tolist()], m.cols)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def of(cls, matrix, labels: Sequence[str] | None = None, field=RATIONALS) -> "Representation":
        m = as_intmatrix(matrix)
        if labels is None:
            labels = [str(j) for j in range(m.cols)]
        return cls(m, tuple(labels), parse_field(field))

    def matroid(self) -> LinearMatroid:
        if "matroid" not in self._cache:
            self._cache["matroid"] = LinearMatroid(self.matrix, self.labels, self.field)
        return self._cache["matroid"]

    def column(self, label: str) -> tuple[int, ...]:
        return self.matrix.column(self.labels.index(label))

    def select(self, labels: Sequence[str]) -> "Representation":
        idx = [self.labels.index(lab) for lab in labels]
        return Representation(self.matrix.select_columns(idx), tuple(labels), self.field)

    def to_text(self) -> str:
        return self.matrix.to_text(
            [f"# labels: {' '.join(self.labels)}", f"# field: {field_name(self.field)}"]
        )

    @classmethod
    def from_text(cls, text: str) -> "Representation":
        m, comments = IntMatrix.from_text(text)
        labels = None
        fld = RATIONALS
        for c in comments:
            body = c.lstrip("#").strip()
            if body.startswith("labels:"):
                labels = body[len("labels:"):].split()
            elif body.startswith("field:"):
                fld = parse_field(body[len("field:"):].strip())
        return cls.of(m, labels, fld)


# ---------------------------------------------------------------------------
# standard form
# ---------------------------------------------------------------------------


def _independent_rows(rows: list[list[Fraction]]) -> list[int]:
    """Indices of a maximal set of independent rows, greedily from the top."""
    basis: list[tuple[int, list[Fraction]]] = []  # (pivot col, reduced row)
    keep = []
    for i, row in enumerate(rows):
        v = list(row)
        for c, b in basis:
            if v[c]:
                f = v[c] / b[c]
                v = [x - f * y for x, y in zip(v, b)]
        piv = next((c for c, x in enumerate(v) if x), None)
        if piv is not None:
            basis.append((piv, v))
            keep.append(i)
    return keep


def _standardize(rows: list[list[Fraction]], e: int) -> tuple[list[list[Fraction]], list[int]]:
    """Row-reduce a full-row-rank matrix to identity on a basis containing e.

    Returns the reduced rows and the basis columns in row order (``e`` first).
    Row ``k`` of the result has a 1 in column ``basis[k]``.
    """
    r = len(rows)
    if r == 1:
        piv = rows[0][e]
        return [[x / piv for x in rows[0]]], [e]
    drop = next(i for i in range(r) if any(rows[j][e] for j in range(r) if j != i))
    kept = [rows[i] for i in range(r) if i != drop]
    top, basis = _standardize(kept, e)
    last = list(rows[drop])
    for k, c in enumerate(basis):
        if last[c]:
            f = last[c]
            last = [x - f * y for x, y in zip(last, top[k])]
    if all(x.denominator == 1 and x.numerator % 2 == 0 for x in last):
        last = [x / 2 for x in last]
    piv = next((c for c, x in enumerate(last) if abs(x) == 1), None)
    if piv is None:
        piv = next(c for c, x in enumerate(last) if x)
    last = [x / last[piv] for x in last]
    for k in range(len(top)):
        if top[k][piv]:
            f = top[k][piv]
            top[k] = [x - f * y for x, y in zip(top[k], last)]
    return top + [last], basis + [piv]


def _pivot(rows: list[list[Fraction]], basis: list[int], k: int, c: int) -> None:
    piv = rows[k][c]
    rows[k] = [x / piv for x in rows[k]]
    for i in range(len(rows)):
        if i != k and rows[i][c]:
            f = rows[i][c]
            rows[i] = [x - f * y for x, y in zip(rows[i], rows[k])]
    basis[k] = c


def pivot_to_standard_form(rep: Representation, e: str) -> Representation:
    """Return an equivalent totally 2-modular representation ``[I_r | X]``.

    The first column is labeled ``e``; the remaining identity columns and the
    columns of X keep the relative order they had in ``rep``. A non-primitive
    column for ``e`` is first divided by its content, which leaves the matroid
    unchanged.
    """
    if rep.field != RATIONALS:
        raise ValueError("standard form is computed over the rationals")
    m = rep.matrix
    if e not in rep.labels:
        raise KeyError(e)
    ei = rep.labels.index(e)
    if not any(m.column(ei)):
        raise ValueError(f"{e!r} is a loop")
    if rank(m) == 0 or not is_delta_modular(m, 2):
        raise NotTwoModularError("input not 2-modular")

    col = list(m.column(ei))
    content = 0
    for x in col:
        content = gcd(content, x)
    rows = [[Fraction(x) for x in row] for row in m.tolist()]
    if content > 1:
        for row in rows:
            row[ei] /= content
    rows = [rows[i] for i in _independent_rows(rows)]
    rows, basis = _standardize(rows, ei)

    # Exchanging in a half-entry outside e's row halves |det| of the basis;
    # e's column is primitive, so one exists whenever the basis is not a
    # lattice basis of the column lattice.
    for _ in range(len(basis)):
        half = next(
            ((k, c) for k in range(1, len(rows)) for c, x in enumerate(rows[k]) if x.denominator != 1),
            None,
        )
        if half is None:
            break
        _pivot(rows, basis, *half)

    if any(x.denominator != 1 or abs(x) > 2 for row in rows for x in row):
        raise NotTwoModularError("input not 2-modular")

    others = sorted(basis[1:])
    order = [ei] + others
    row_of = {c: k for k, c in enumerate(basis)}
    nonbasis = [c for c in range(m.cols) if c not in row_of]
    cols = order + nonbasis
    out = [[int(rows[row_of[b]][c]) for c in cols] for b in order]
    result = Representation(IntMatrix(out, len(cols)), tuple(rep.labels[c] for c in cols))
    if not is_totally_delta_modular(result.matrix, 2):
        raise NotTwoModularError("input not 2-modular")
    return result


def standard_form_rank(rep: Representation) -> int | None:
    """r if the first r columns of ``rep`` form an identity block, else None."""
    m = rep.matrix
    r = m.rows
    if m.cols < r:
        return None
    for i in range(r):
        for j in range(r):
            if m[i, j] != (1 if i == j else 0):
                return None
    return r


def dual_representation(rep: Representation) -> Representation:
    """``[I_r | X]`` becomes ``[-X^T | I_{n-r}]`` with the same labels."""
    r = standard_form_rank(rep)
    if r is None:
        raise ValueError("representation is not of the form [I_r | X]")
    m = rep.matrix
    n = m.cols
    x_t = [[-m[i, j] for i in range(r)] for j in range(r, n)]
    ident = [[1 if a == b else 0 for b in range(n - r)] for a in range(n - r)]
    rows = [x_t[k] + ident[k] for k in range(n - r)]
    return Representation(IntMatrix(rows, n), rep.labels, rep.field)
