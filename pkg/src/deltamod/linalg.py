"""Exact integer matrices, determinants, ranks and Δ-modularity checks.

Nothing here touches floating point. Kernels run on ``int64`` only when a
Hadamard bound proves no intermediate can overflow; otherwise the same
fraction-free elimination runs on Python integers.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from . import kernels

_INT64_MAX = 2**63 - 1


class DimensionError(ValueError):
    pass


class IntMatrix:
    """Immutable dense matrix of exact integers (row-major)."""

    __slots__ = ("_rows", "_shape", "_np")

    def __init__(self, rows: Iterable[Iterable[int]], ncols: int | None = None):
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if data:
            widths = {len(row) for row in data}
            if len(widths) != 1:
                raise DimensionError("ragged rows")
            width = widths.pop()
            if ncols is not None and ncols != width:
                raise DimensionError("column count mismatch")
        else:
            width = ncols or 0
        self._rows = data
        self._shape = (len(data), width)
        self._np = None

    # construction helpers
    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls([[0] * n for _ in range(m)], n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], nrows: int | None = None) -> "IntMatrix":
        if not columns:
            return cls.zeros(nrows or 0, 0)
        m = len(columns[0])
        return cls([[col[i] for col in columns] for i in range(m)], len(columns))

    @classmethod
    def from_numpy(cls, arr) -> "IntMatrix":
        arr = np.asarray(arr)
        return cls(arr.tolist(), arr.shape[1] if arr.ndim == 2 else 0)

    # basic protocol
    @property
    def rows(self) -> int:
        return self._shape[0]

    @property
    def cols(self) -> int:
        return self._shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    def __getitem__(self, ij):
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"entry {ij} outside {self.shape}")
        return self._rows[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self._rows[i]

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._rows)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._rows]

    def __eq__(self, other):
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self._shape == other._shape and self._rows == other._rows

    def __hash__(self):
        return hash((self._shape, self._rows))

    def __repr__(self):
        return f"IntMatrix({self.tolist()!r})"

    # derived matrices
    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(zip(*self._rows), self.rows) if self.cols else IntMatrix.zeros(0, self.rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        return IntMatrix([[self._rows[i][j] for j in cols] for i in rows], len(cols))

    def select_columns(self, cols: Sequence[int]) -> "IntMatrix":
        return self.submatrix(range(self.rows), cols)

    def hstack(self, *others: "IntMatrix") -> "IntMatrix":
        mats = (self,) + others
        if len({m.rows for m in mats}) != 1:
            raise DimensionError("hstack needs equal row counts")
        rows = [sum((m._rows[i] for m in mats), ()) for i in range(self.rows)]
        return IntMatrix(rows, sum(m.cols for m in mats))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError("inner dimensions differ")
        oc = other.T._rows
        return IntMatrix([[sum(a * b for a, b in zip(r, c)) for c in oc] for r in self._rows], other.cols)

    def max_abs_entry(self) -> int:
        return max((abs(x) for r in self._rows for x in r), default=0)

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._rows for x in r)

    def fits_int64(self) -> bool:
        return self.max_abs_entry() <= _INT64_MAX

    def to_numpy(self) -> np.ndarray:
        """``int64`` copy; raises OverflowError if an entry does not fit."""
        if self._np is None:
            if not self.fits_int64():
                raise OverflowError("entries exceed int64")
            arr = np.array(self._rows, dtype=np.int64).reshape(self._shape)
            arr.setflags(write=False)
            self._np = arr
        return self._np

    # text format
    def to_text(self, comments: Sequence[str] = ()) -> str:
        lines = [f"{self.rows} {self.cols}"]
        lines += [" ".join(str(x) for x in r) for r in self._rows]
        lines += [c if c.startswith("#") else f"# {c}" for c in comments]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> tuple["IntMatrix", list[str]]:
        """Parse the ``ROWS COLS`` text format; returns (matrix, comment lines)."""
        lines = [ln.rstrip("\r") for ln in text.splitlines()]
        body = [ln for ln in lines if ln.strip() and not ln.lstrip().startswith("#")]
        comments = [ln for ln in lines if ln.lstrip().startswith("#")]
        if not body:
            raise ValueError("empty matrix file")
        header = body[0].split()
        if len(header) != 2:
            raise ValueError("header must be 'ROWS COLS'")
        m, n = int(header[0]), int(header[1])
        if len(body) - 1 != m:
            raise ValueError(f"expected {m} rows, found {len(body) - 1}")
        rows = [[int(tok) for tok in ln.split()] for ln in body[1:]]
        if any(len(r) != n for r in rows):
            raise ValueError(f"every row must have {n} entries")
        return cls(rows, n), comments


def as_intmatrix(m) -> IntMatrix:
    if isinstance(m, IntMatrix):
        return m
    arr = np.asarray(m) if not isinstance(m, (list, tuple)) else None
    if arr is not None:
        return IntMatrix.from_numpy(arr)
    return IntMatrix(m)


# ---------------------------------------------------------------------------
# overflow guard
# ---------------------------------------------------------------------------


def _minor_bound_sq(m: IntMatrix, k: int | None = None) -> int:
    """Square of a bound on every minor of order <= k (Hadamard)."""
    if k is None:
        k = min(m.shape)
    norms = sorted((sum(x * x for x in m.column(j)) for j in range(m.cols)), reverse=True)
    bound = 1
    for v in norms[:k]:
        bound *= max(v, 1)
    return bound


def _kernel_safe(m: IntMatrix, k: int | None = None) -> bool:
    return m.fits_int64() and 2 * _minor_bound_sq(m, k) < _INT64_MAX


# ---------------------------------------------------------------------------
# exact big-integer fallbacks
# ---------------------------------------------------------------------------


def _det_exact(rows: list[list[int]]) -> int:
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * akk - aik * a[k][j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def _rank_exact(rows: list[list[int]]) -> int:
    a = [list(r) for r in rows]
    m = len(a)
    n = len(a[0]) if a else 0
    r, prev = 0, 1
    for c in range(n):
        if r == m:
            break
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        for i in range(r + 1, m):
            aic = a[i][c]
            for j in range(c + 1, n):
                a[i][j] = (piv * a[i][j] - aic * a[r][j]) // prev
            a[i][c] = 0
        prev = piv
        r += 1
    return r


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def det(m) -> int:
    """Exact determinant by fraction-free elimination."""
    m = as_intmatrix(m)
    if m.rows != m.cols:
        raise DimensionError(f"det needs a square matrix, got {m.shape}")
    if m.rows == 0:
        return 1
    if _kernel_safe(m):
        return kernels.det(m.to_numpy())
    return _det_exact(m.tolist())


def rank(m) -> int:
    """Rank over the rationals."""
    m = as_intmatrix(m)
    if m.rows == 0 or m.cols == 0:
        return 0
    if _kernel_safe(m):
        return kernels.rank(m.to_numpy())
    return _rank_exact(m.tolist())


def rank_mod_p(m, p: int) -> int:
    m = as_intmatrix(m)
    if m.rows == 0 or m.cols == 0:
        return 0
    if p < 2**31:
        reduced = IntMatrix([[x % p for x in r] for r in m.tolist()], m.cols)
        return kernels.rank_mod_p(reduced.to_numpy(), p)
    raise ValueError("prime too large for the modular kernel")


def _scan_exact(m: IntMatrix, k: int, bound: int, stop_early: bool):
    rows = m.tolist()
    best, where = -1, (None, None)
    for rs in combinations(range(m.rows), k):
        for cs in combinations(range(m.cols), k):
            d = abs(_det_exact([[rows[i][j] for j in cs] for i in rs]))
            if d > best:
                best, where = d, (rs, cs)
                if stop_early and d > bound:
                    return best, rs, cs
    return best, where[0], where[1]


def max_abs_minor_witness(m, k: int) -> tuple[int, tuple[int, ...], tuple[int, ...]]:
    """Max ``|det|`` over k x k submatrices plus the lex-first maximiser."""
    m = as_intmatrix(m)
    if not 1 <= k <= min(m.shape):
        raise ValueError(f"order {k} outside 1..{min(m.shape)}")
    if _kernel_safe(m, k):
        return kernels.max_abs_minor(m.to_numpy(), k)
    return _scan_exact(m, k, 0, False)


def max_abs_minor(m, k: int) -> int:
    return max_abs_minor_witness(m, k)[0]


def first_minor_exceeding(m, k: int, bound: int):
    """First k x k minor in lex order (row sets, then column sets) with
    ``|det| > bound``, as ``(|det|, rows, cols)``; None if there is none."""
    m = as_intmatrix(m)
    if not 1 <= k <= min(m.shape):
        raise ValueError(f"order {k} outside 1..{min(m.shape)}")
    if _kernel_safe(m, k):
        return kernels.first_minor_exceeding(m.to_numpy(), k, bound)
    best, rs, cs = _scan_exact(m, k, bound, True)
    return (best, rs, cs) if best > bound else None


def is_delta_modular(m, delta: int) -> bool:
    """True iff every rank-sized subdeterminant has ``|det| <= delta``."""
    m = as_intmatrix(m)
    if delta < 1:
        raise ValueError("delta must be positive")
    r = rank(m)
    if r == 0:
        raise ValueError("Δ-modularity is undefined for a rank-0 matrix")
    return first_minor_exceeding(m, r, delta) is None


def is_totally_delta_modular(m, delta: int) -> bool:
    m = as_intmatrix(m)
    for k in range(1, min(m.shape) + 1):
        if first_minor_exceeding(m, k, delta) is not None:
            return False
    return True


def primitive(vec: Sequence[int]) -> tuple[int, ...]:
    """Divide by the content and make the first nonzero entry positive."""
    g = 0
    for x in vec:
        g = gcd(g, x)
    if g == 0:
        return tuple(vec)
    out = [x // g for x in vec]
    first = next(x for x in out if x != 0)
    if first < 0:
        out = [-x for x in out]
    return tuple(out)


def row_point_count(m) -> int:
    """Number of nonzero rows after merging rows that are rational multiples."""
    m = as_intmatrix(m)
    classes = {primitive(m.row(i)) for i in range(m.rows) if any(m.row(i))}
    return len(classes)


def solve_rational(a: IntMatrix, b: IntMatrix) -> list[list[Fraction]]:
    """Solve ``a @ x = b`` for square nonsingular ``a`` over the rationals."""
    n = a.rows
    if a.cols != n or b.rows != n:
        raise DimensionError("solve needs square a and matching b")
    aug = [[Fraction(x) for x in a.row(i)] + [Fraction(x) for x in b.row(i)] for i in range(n)]
    for c in range(n):
        p = next((i for i in range(c, n) if aug[i][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


