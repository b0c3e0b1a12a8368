"""Compiled GF(2^m) kernels for dense matrices of wide field elements.

Elements are stored as little-endian arrays of ``W = ceil(m/64)`` uint64
words, so a matrix is an array of shape ``(rows, cols, W)``.  The modulus
is ``x^m + r(x)`` and is passed as the exponent list of ``r``.

Products are formed with an 8-bit window table of the left operand and are
accumulated unreduced (``2W + 2`` words) so that a dot product pays for a
single reduction.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_U64 = np.uint64


def words_for(m: int) -> int:
    return (m + 63) // 64


def ints_to_words(values, W: int) -> np.ndarray:
    """Flat iterable of non-negative ints -> ``(len, W)`` uint64 array."""
    nbytes = 8 * W
    buf = b"".join(v.to_bytes(nbytes, "little") for v in values)
    return np.frombuffer(buf, dtype="<u8").reshape(-1, W).copy()


def words_to_ints(arr: np.ndarray) -> list[int]:
    W = arr.shape[-1]
    flat = np.ascontiguousarray(arr.reshape(-1, W), dtype="<u8")
    raw = flat.tobytes()
    step = 8 * W
    return [int.from_bytes(raw[i:i + step], "little") for i in range(0, len(raw), step)]


@njit(cache=True)
def _build_table(a, tab):
    # tab[t] = a * t for t < 256, W + 1 words each
    W = a.shape[0]
    for x in range(W + 1):
        tab[0, x] = 0
        tab[1, x] = 0
    for x in range(W):
        tab[1, x] = a[x]
    for t in range(2, 256):
        if t & 1:
            for x in range(W + 1):
                tab[t, x] = tab[t - 1, x] ^ tab[1, x]
        else:
            h = t >> 1
            carry = _U64(0)
            for x in range(W + 1):
                v = tab[h, x]
                tab[t, x] = (v << _U64(1)) | carry
                carry = v >> _U64(63)


@njit(cache=True)
def _accumulate(tab, b, acc):
    # acc ^= a * b (unreduced), with tab the window table of a
    W = b.shape[0]
    for w in range(W):
        bw = b[w]
        if bw == 0:
            continue
        for q in range(8):
            byte = (bw >> _U64(8 * q)) & _U64(255)
            if byte == 0:
                continue
            sh = 8 * q
            base = w
            if sh == 0:
                for x in range(W + 1):
                    acc[base + x] ^= tab[byte, x]
            else:
                ush = _U64(sh)
                back = _U64(64 - sh)
                for x in range(W + 1):
                    v = tab[byte, x]
                    acc[base + x] ^= v << ush
                    acc[base + x + 1] ^= v >> back


@njit(cache=True)
def _reduce(acc, m, rexp, out):
    # out = acc mod (x^m + r); acc is destroyed
    L = acc.shape[0]
    W = out.shape[0]
    ws = m // 64
    bs = m % 64
    hi = np.zeros(L, dtype=np.uint64)
    while True:
        nonzero = False
        for x in range(L):
            src = ws + x
            v = _U64(0)
            if src < L:
                if bs == 0:
                    v = acc[src]
                else:
                    v = acc[src] >> _U64(bs)
                    if src + 1 < L:
                        v |= acc[src + 1] << _U64(64 - bs)
            hi[x] = v
            if v != 0:
                nonzero = True
        if not nonzero:
            break
        if bs == 0:
            acc[ws] = 0
        else:
            acc[ws] &= (_U64(1) << _U64(bs)) - _U64(1)
        for x in range(ws + 1, L):
            acc[x] = 0
        for e in rexp:
            ew = e // 64
            eb = e % 64
            for x in range(L):
                v = hi[x]
                if v == 0:
                    continue
                if x + ew < L:
                    acc[x + ew] ^= v << _U64(eb)
                if eb != 0 and x + ew + 1 < L:
                    acc[x + ew + 1] ^= v >> _U64(64 - eb)
    for x in range(W):
        out[x] = acc[x]


@njit(cache=True)
def _is_zero(a):
    for x in range(a.shape[0]):
        if a[x] != 0:
            return False
    return True


@njit(cache=True)
def _mul(a, b, m, rexp, out):
    W = a.shape[0]
    tab = np.zeros((256, W + 1), dtype=np.uint64)
    _build_table(a, tab)
    acc = np.zeros(2 * W + 2, dtype=np.uint64)
    _accumulate(tab, b, acc)
    _reduce(acc, m, rexp, out)


@njit(cache=True)
def _inv(a, m, rexp, out):
    # a^(2^m - 2) = prod_{i=1}^{m-1} a^(2^i)
    W = a.shape[0]
    sq = a.copy()
    res = np.zeros(W, dtype=np.uint64)
    res[0] = 1
    tmp = np.zeros(W, dtype=np.uint64)
    for _ in range(1, m):
        _mul(sq, sq, m, rexp, tmp)
        sq[:] = tmp
        _mul(res, sq, m, rexp, tmp)
        res[:] = tmp
    out[:] = res


@njit(cache=True)
def mul_elementwise(A, B, m, rexp):
    n = A.shape[0]
    W = A.shape[1]
    out = np.zeros((n, W), dtype=np.uint64)
    for i in range(n):
        _mul(A[i], B[i], m, rexp, out[i])
    return out


@njit(cache=True)
def inv_elementwise(A, m, rexp):
    n = A.shape[0]
    W = A.shape[1]
    out = np.zeros((n, W), dtype=np.uint64)
    for i in range(n):
        _inv(A[i], m, rexp, out[i])
    return out


@njit(cache=True)
def matmul(A, B, m, rexp):
    """Dense product skipping zero entries on both sides."""
    R, K, W = A.shape
    C = B.shape[1]
    out = np.zeros((R, C, W), dtype=np.uint64)
    tab = np.zeros((256, W + 1), dtype=np.uint64)
    acc = np.zeros((C, 2 * W + 2), dtype=np.uint64)
    bnz = np.zeros((K, C), dtype=np.bool_)
    for j in range(K):
        for c in range(C):
            bnz[j, c] = not _is_zero(B[j, c])
    for i in range(R):
        acc[:, :] = 0
        for j in range(K):
            if _is_zero(A[i, j]):
                continue
            _build_table(A[i, j], tab)
            for c in range(C):
                if bnz[j, c]:
                    _accumulate(tab, B[j, c], acc[c])
        for c in range(C):
            _reduce(acc[c], m, rexp, out[i, c])
    return out


@njit(cache=True)
def row_basis(A, m, rexp):
    """Insert the rows of ``A`` one by one into a fully reduced row basis.

    Returns ``(basis, pivots, profile)``: the first ``profile[-1]`` rows of
    ``basis`` are normalised (pivot entry 1) and zero in every other pivot
    column; ``profile[t]`` is the rank of rows ``0..t``.  Pivots are the
    first nonzero column of each newly independent row.
    """
    R, C, W = A.shape
    cap = min(R, C)
    basis = np.zeros((cap, C, W), dtype=np.uint64)
    pivots = np.full(cap, -1, dtype=np.int64)
    profile = np.zeros(R, dtype=np.int64)
    tab = np.zeros((256, W + 1), dtype=np.uint64)
    acc = np.zeros((C, 2 * W + 2), dtype=np.uint64)
    row = np.zeros((C, W), dtype=np.uint64)
    tmp = np.zeros(W, dtype=np.uint64)
    coef = np.zeros(W, dtype=np.uint64)
    pinv = np.zeros(W, dtype=np.uint64)
    nb = 0
    for r in range(R):
        if nb == cap:
            profile[r] = nb
            continue
        acc[:, :] = 0
        for c in range(C):
            for x in range(W):
                acc[c, x] = A[r, c, x]
        # fully reduced basis: every coefficient is read off the input row
        for t in range(nb):
            p = pivots[t]
            if _is_zero(A[r, p]):
                continue
            _build_table(A[r, p], tab)
            for c in range(p, C):
                if not _is_zero(basis[t, c]):
                    _accumulate(tab, basis[t, c], acc[c])
        lead = -1
        for c in range(C):
            _reduce(acc[c], m, rexp, row[c])
            if lead < 0 and not _is_zero(row[c]):
                lead = c
        if lead < 0:
            profile[r] = nb
            continue
        _inv(row[lead], m, rexp, pinv)
        _build_table(pinv, tab)
        for c in range(lead, C):
            if _is_zero(row[c]):
                continue
            acc[c, :] = 0
            _accumulate(tab, row[c], acc[c])
            _reduce(acc[c], m, rexp, tmp)
            row[c] = tmp
        for c in range(lead):
            row[c] = 0
        # clear the new pivot column from the existing basis rows
        for t in range(nb):
            if _is_zero(basis[t, lead]):
                continue
            coef[:] = basis[t, lead]
            _build_table(coef, tab)
            for c in range(lead, C):
                if _is_zero(row[c]):
                    continue
                acc[c, :] = 0
                for x in range(W):
                    acc[c, x] = basis[t, c, x]
                _accumulate(tab, row[c], acc[c])
                _reduce(acc[c], m, rexp, tmp)
                basis[t, c] = tmp
        basis[nb] = row
        pivots[nb] = lead
        nb += 1
        profile[r] = nb
    return basis, pivots, profile
