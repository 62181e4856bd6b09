"""Hot integer kernels.

Every kernel exists twice: a loop version compiled with ``numba.njit`` and a
vectorised numpy version. ``DELTAMOD_NO_NUMBA=1`` selects the numpy versions
(see :mod:`deltamod._accel`). Both operate on ``int64`` arrays and assume the
caller has ruled out overflow; :mod:`deltamod.linalg` does that with a
Hadamard bound before dispatching here.

Fraction-free (Bareiss) elimination keeps every intermediate entry equal to a
minor of the input, so an ``int64`` run is exact whenever twice the square of
the largest possible minor fits in 63 bits.
"""

from __future__ import annotations

from itertools import combinations, islice

import numpy as np

from ._accel import HAVE_NUMBA, njit

__all__ = [
    "det",
    "det_batch",
    "rank",
    "rank_mod_p",
    "max_abs_minor",
    "first_minor_exceeding",
    "span_mask",
    "span_mask_mod_p",
]


# ---------------------------------------------------------------------------
# loop kernels (numba)
# ---------------------------------------------------------------------------


@njit(cache=True)
def _det_loop(a):
    n = a.shape[0]
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k, k] == 0:
            p = -1
            for i in range(k + 1, n):
                if a[i, k] != 0:
                    p = i
                    break
            if p < 0:
                return 0
            for j in range(n):
                t = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = t
            sign = -sign
        akk = a[k, k]
        for i in range(k + 1, n):
            aik = a[i, k]
            for j in range(k + 1, n):
                a[i, j] = (a[i, j] * akk - aik * a[k, j]) // prev
        prev = akk
    return sign * a[n - 1, n - 1]


@njit(cache=True)
def _rank_loop(a):
    m, n = a.shape
    r = 0
    prev = 1
    for c in range(n):
        if r == m:
            break
        p = -1
        for i in range(r, m):
            if a[i, c] != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(c, n):
                t = a[r, j]
                a[r, j] = a[p, j]
                a[p, j] = t
        piv = a[r, c]
        for i in range(r + 1, m):
            aic = a[i, c]
            for j in range(c + 1, n):
                a[i, j] = (piv * a[i, j] - aic * a[r, j]) // prev
            a[i, c] = 0
        prev = piv
        r += 1
    return r


@njit(cache=True)
def _inv_mod(x, p):
    # x != 0 mod p, p prime
    result = 1
    e = p - 2
    b = x % p
    while e > 0:
        if e & 1:
            result = (result * b) % p
        b = (b * b) % p
        e >>= 1
    return result


@njit(cache=True)
def _rank_mod_p_loop(a, p):
    m, n = a.shape
    for i in range(m):
        for j in range(n):
            a[i, j] %= p
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, n):
                t = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = t
        inv = _inv_mod(a[r, c], p)
        for j in range(c, n):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(r + 1, m):
            f = a[i, c]
            if f != 0:
                for j in range(c, n):
                    a[i, j] = (a[i, j] - f * a[r, j]) % p
        r += 1
    return r


@njit(cache=True)
def _next_combination(idx, n):
    k = idx.shape[0]
    i = k - 1
    while i >= 0 and idx[i] == n - k + i:
        i -= 1
    if i < 0:
        return False
    idx[i] += 1
    for j in range(i + 1, k):
        idx[j] = idx[j - 1] + 1
    return True


@njit(cache=True)
def _scan_minors_loop(a, k, bound, stop_early):
    # Lex order over row sets, then column sets. Returns (best, rows, cols):
    # with stop_early, the first minor with |det| > bound; otherwise the max.
    m, n = a.shape
    rows = np.arange(k)
    cols = np.arange(k)
    sub = np.empty((k, k), dtype=np.int64)
    best = -1
    best_rows = np.full(k, -1)
    best_cols = np.full(k, -1)
    more_rows = True
    while more_rows:
        for j in range(k):
            cols[j] = j
        more_cols = True
        while more_cols:
            for i in range(k):
                for j in range(k):
                    sub[i, j] = a[rows[i], cols[j]]
            d = _det_loop(sub)
            if d < 0:
                d = -d
            if d > best:
                best = d
                best_rows[:] = rows
                best_cols[:] = cols
                if stop_early and d > bound:
                    return best, best_rows, best_cols
            more_cols = _next_combination(cols, n)
        more_rows = _next_combination(rows, m)
    return best, best_rows, best_cols


@njit(cache=True)
def _span_mask_loop(a, nsel):
    # Columns [0, nsel) are the spanning set; returns a boolean per column
    # marking membership in their span.
    m, n = a.shape
    r = 0
    prev = 1
    for c in range(nsel):
        if r == m:
            break
        p = -1
        for i in range(r, m):
            if a[i, c] != 0:
                p = i
                break
        if p < 0:
            continue
        if p != r:
            for j in range(c, n):
                t = a[r, j]
                a[r, j] = a[p, j]
                a[p, j] = t
        piv = a[r, c]
        for i in range(r + 1, m):
            aic = a[i, c]
            for j in range(c + 1, n):
                a[i, j] = (piv * a[i, j] - aic * a[r, j]) // prev
            a[i, c] = 0
        prev = piv
        r += 1
    out = np.zeros(n, dtype=np.bool_)
    for j in range(n):
        if j < nsel:
            out[j] = True
            continue
        inside = True
        for i in range(r, m):
            if a[i, j] != 0:
                inside = False
                break
        out[j] = inside
    return out


@njit(cache=True)
def _span_mask_mod_p_loop(a, nsel, p):
    m, n = a.shape
    for i in range(m):
        for j in range(n):
            a[i, j] %= p
    r = 0
    for c in range(nsel):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, n):
                t = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = t
        inv = _inv_mod(a[r, c], p)
        for j in range(c, n):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(r + 1, m):
            f = a[i, c]
            if f != 0:
                for j in range(c, n):
                    a[i, j] = (a[i, j] - f * a[r, j]) % p
        r += 1
    out = np.zeros(n, dtype=np.bool_)
    for j in range(n):
        if j < nsel:
            out[j] = True
            continue
        inside = True
        for i in range(r, m):
            if a[i, j] != 0:
                inside = False
                break
        out[j] = inside
    return out


# ---------------------------------------------------------------------------
# numpy kernels
# ---------------------------------------------------------------------------


def det_batch_numpy(stack: np.ndarray) -> np.ndarray:
    """Bareiss determinants of a ``(B, k, k)`` stack, vectorised over B."""
    a = np.array(stack, dtype=np.int64, copy=True)
    b, n, _ = a.shape
    if n == 0:
        return np.ones(b, dtype=np.int64)
    sign = np.ones(b, dtype=np.int64)
    prev = np.ones(b, dtype=np.int64)
    alive = np.ones(b, dtype=bool)
    ar = np.arange(b)
    for k in range(n - 1):
        col = a[:, k:, k]
        nz = col != 0
        has = nz.any(axis=1)
        alive &= has
        p = k + np.argmax(nz, axis=1)
        swap = alive & (p != k)
        if swap.any():
            s = ar[swap]
            pk = a[s, k, :].copy()
            a[s, k, :] = a[s, p[swap], :]
            a[s, p[swap], :] = pk
            sign[swap] = -sign[swap]
        akk = np.where(alive, a[:, k, k], 1)
        lower = a[:, k + 1 :, k + 1 :]
        num = lower * akk[:, None, None] - a[:, k + 1 :, k, None] * a[:, None, k, k + 1 :]
        a[:, k + 1 :, k + 1 :] = num // prev[:, None, None]
        prev = akk
    out = sign * a[:, n - 1, n - 1]
    out[~alive] = 0
    return out


def rank_numpy(mat: np.ndarray) -> int:
    a = np.array(mat, dtype=np.int64, copy=True)
    m, n = a.shape
    r = 0
    prev = 1
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            a[[r, p]] = a[[p, r]]
        piv = a[r, c]
        below = a[r + 1 :, c:]
        a[r + 1 :, c:] = (piv * below - below[:, :1] * a[r, c:]) // prev
        prev = piv
        r += 1
    return r


def rank_mod_p_numpy(mat: np.ndarray, p: int) -> int:
    a = np.mod(np.array(mat, dtype=np.int64), p)
    m, n = a.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        q = r + nz[0]
        if q != r:
            a[[r, q]] = a[[q, r]]
        a[r, c:] = (a[r, c:] * pow(int(a[r, c]), p - 2, p)) % p
        a[r + 1 :, c:] = (a[r + 1 :, c:] - a[r + 1 :, c : c + 1] * a[r, c:]) % p
        r += 1
    return r


_CHUNK = 4096


def _minor_stack(a: np.ndarray, pairs):
    rows = np.array([p[0] for p in pairs], dtype=np.intp)
    cols = np.array([p[1] for p in pairs], dtype=np.intp)
    return a[rows[:, :, None], cols[:, None, :]]


def _pair_iter(m: int, n: int, k: int):
    for rows in combinations(range(m), k):
        for cols in combinations(range(n), k):
            yield rows, cols


def scan_minors_numpy(a: np.ndarray, k: int, bound: int, stop_early: bool):
    m, n = a.shape
    best, best_rows, best_cols = -1, None, None
    it = _pair_iter(m, n, k)
    while True:
        chunk = list(islice(it, _CHUNK))
        if not chunk:
            break
        dets = np.abs(det_batch_numpy(_minor_stack(a, chunk)))
        if stop_early:
            over = np.nonzero(dets > bound)[0]
            if over.size:
                i = int(over[0])
                return int(dets[i]), chunk[i][0], chunk[i][1]
        i = int(np.argmax(dets))
        if dets[i] > best:
            best, best_rows, best_cols = int(dets[i]), chunk[i][0], chunk[i][1]
    return best, best_rows, best_cols


def span_mask_numpy(mat: np.ndarray, nsel: int) -> np.ndarray:
    base = rank_numpy(mat[:, :nsel])
    out = np.ones(mat.shape[1], dtype=bool)
    for j in range(nsel, mat.shape[1]):
        out[j] = rank_numpy(mat[:, list(range(nsel)) + [j]]) == base
    return out


def span_mask_mod_p_numpy(mat: np.ndarray, nsel: int, p: int) -> np.ndarray:
    base = rank_mod_p_numpy(mat[:, :nsel], p)
    out = np.ones(mat.shape[1], dtype=bool)
    for j in range(nsel, mat.shape[1]):
        out[j] = rank_mod_p_numpy(mat[:, list(range(nsel)) + [j]], p) == base
    return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def det(a: np.ndarray) -> int:
    if HAVE_NUMBA:
        return int(_det_loop(np.array(a, dtype=np.int64, copy=True)))
    return int(det_batch_numpy(np.asarray(a, dtype=np.int64)[None])[0])


def det_batch(stack: np.ndarray) -> np.ndarray:
    if HAVE_NUMBA:
        out = np.empty(stack.shape[0], dtype=np.int64)
        for i in range(stack.shape[0]):
            out[i] = _det_loop(np.array(stack[i], dtype=np.int64, copy=True))
        return out
    return det_batch_numpy(stack)


def rank(a: np.ndarray) -> int:
    if HAVE_NUMBA:
        return int(_rank_loop(np.array(a, dtype=np.int64, copy=True)))
    return rank_numpy(a)


def rank_mod_p(a: np.ndarray, p: int) -> int:
    if HAVE_NUMBA:
        return int(_rank_mod_p_loop(np.array(a, dtype=np.int64, copy=True), p))
    return rank_mod_p_numpy(a, p)


def _scan(a: np.ndarray, k: int, bound: int, stop_early: bool):
    a = np.ascontiguousarray(a, dtype=np.int64)
    if HAVE_NUMBA:
        best, rows, cols = _scan_minors_loop(a, k, bound, stop_early)
        return int(best), tuple(int(x) for x in rows), tuple(int(x) for x in cols)
    return scan_minors_numpy(a, k, bound, stop_early)


def max_abs_minor(a: np.ndarray, k: int):
    """Largest ``|det|`` over all ``k x k`` submatrices, with its location."""
    return _scan(a, k, 0, False)


def first_minor_exceeding(a: np.ndarray, k: int, bound: int):
    """First ``k x k`` minor (lex order) with ``|det| > bound``, or None."""
    best, rows, cols = _scan(a, k, bound, True)
    if best > bound:
        return best, rows, cols
    return None


def span_mask(a: np.ndarray, nsel: int) -> np.ndarray:
    if HAVE_NUMBA:
        return _span_mask_loop(np.array(a, dtype=np.int64, copy=True), nsel)
    return span_mask_numpy(np.asarray(a, dtype=np.int64), nsel)


def span_mask_mod_p(a: np.ndarray, nsel: int, p: int) -> np.ndarray:
    if HAVE_NUMBA:
        return _span_mask_mod_p_loop(np.array(a, dtype=np.int64, copy=True), nsel, p)
    return span_mask_mod_p_numpy(np.asarray(a, dtype=np.int64), nsel, p)
