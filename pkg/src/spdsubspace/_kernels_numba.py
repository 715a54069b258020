"""Numba-compiled hot kernels.

Signatures here define the kernel contract; `_kernels_numpy` mirrors every
function with vectorized numpy so the package runs without numba.  RNG
state is a one-element uint64 array advanced by the documented
xorshift64* update (see `rng.py`), so Python-side and kernel-side streams
are interchangeable.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

_MULT = np.uint64(0x2545F4914F6CDD1D)


@njit(cache=True, inline="always")
def _rng_next(state):
    s = state[0]
    s ^= s >> np.uint64(12)
    s ^= (s << np.uint64(25)) & np.uint64(0xFFFFFFFFFFFFFFFF)
    s ^= s >> np.uint64(27)
    state[0] = s
    return s * _MULT


@njit(cache=True, inline="always")
def _mulhi64(a, b):
    # high 64 bits of the 128-bit product, from 32-bit limbs
    mask32 = np.uint64(0xFFFFFFFF)
    a_lo = a & mask32
    a_hi = a >> np.uint64(32)
    b_lo = b & mask32
    b_hi = b >> np.uint64(32)
    lo_lo = a_lo * b_lo
    mid1 = a_hi * b_lo + (lo_lo >> np.uint64(32))
    mid2 = a_lo * b_hi + (mid1 & mask32)
    return a_hi * b_hi + (mid1 >> np.uint64(32)) + (mid2 >> np.uint64(32))


@njit(cache=True, inline="always")
def _randbelow(state, m):
    return np.int64(_mulhi64(_rng_next(state), np.uint64(m)))


@njit(cache=True, inline="always")
def _uniform(state):
    return (_rng_next(state) >> np.uint64(11)) * 2.0**-53


@njit(cache=True)
def rng_fill_uniform(state, out):
    for k in range(out.shape[0]):
        out[k] = _uniform(state)


@njit(cache=True)
def rng_permutation(state, n, out):
    for k in range(n):
        out[k] = k
    for i in range(n - 1, 0, -1):
        j = _randbelow(state, i + 1)
        tmp = out[i]
        out[i] = out[j]
        out[j] = tmp


@njit(cache=True)
def sample_pair_uniform(state, n):
    """Uniform (i, j) with 0 <= j <= i < n over all n(n+1)/2 pairs."""
    d = n * (n + 1) // 2
    r = _randbelow(state, d)
    i = np.int64((math.sqrt(8.0 * r + 1.0) - 1.0) / 2.0)
    while (i + 1) * (i + 2) // 2 <= r:
        i += 1
    while i * (i + 1) // 2 > r:
        i -= 1
    j = r - i * (i + 1) // 2
    return i, j


@njit(cache=True)
def sample_direction_set(state, n, out_i, out_j):
    """Permute 0..n-1, pair consecutive entries; per pair (k, l) emit the
    two diagonal directions with probability 1/n, else the off-diagonal
    (max, min).  Returns the number of directions written."""
    perm = np.empty(n, dtype=np.int64)
    rng_permutation(state, n, perm)
    count = 0
    for c in range(n // 2):
        k = perm[2 * c]
        l = perm[2 * c + 1]
        if _uniform(state) < 1.0 / n:
            out_i[count] = k
            out_j[count] = k
            count += 1
            out_i[count] = l
            out_j[count] = l
            count += 1
        else:
            hi = k if k > l else l
            lo = l if k > l else k
            out_i[count] = hi
            out_j[count] = lo
            count += 1
    return count


@njit(cache=True)
def cholesky_kernel(a, out):
    """Lower Cholesky factor of `a` into `out`.  Returns -1 on success or
    the index of the first non-positive pivot."""
    n = a.shape[0]
    for j in range(n):
        s = a[j, j]
        for k in range(j):
            s -= out[j, k] * out[j, k]
        if s <= 0.0 or not math.isfinite(s):
            return j
        d = math.sqrt(s)
        out[j, j] = d
        for i in range(j + 1, n):
            t = a[i, j]
            for k in range(j):
                t -= out[i, k] * out[j, k]
            out[i, j] = t / d
    return -1


@njit(cache=True)
def solve_lower_kernel(l, b, out):
    """Forward substitution: out solves l @ out = b for (n, m) rhs."""
    n = l.shape[0]
    m = b.shape[1]
    for i in range(n):
        d = l[i, i]
        for c in range(m):
            t = b[i, c]
            for k in range(i):
                t -= l[i, k] * out[k, c]
            out[i, c] = t / d


@njit(cache=True)
def jacobi_kernel(a, v, tol, max_sweeps):
    """Cyclic Jacobi sweeps on symmetric `a` (overwritten toward diagonal),
    accumulating rotations into `v`.  Returns (rotations, converged)."""
    n = a.shape[0]
    for i in range(n):
        for j in range(n):
            v[i, j] = 1.0 if i == j else 0.0
    norm_a = 0.0
    for i in range(n):
        for j in range(n):
            norm_a += a[i, j] * a[i, j]
    thresh = tol * max(1.0, math.sqrt(norm_a))
    rotations = 0
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * a[i, j] * a[i, j]
        if math.sqrt(off) <= thresh:
            return rotations, True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    if k != p and k != q:
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * akq
                        a[p, k] = a[k, p]
                        a[k, q] = s * akp + c * akq
                        a[q, k] = a[k, q]
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
                rotations += 1
    off = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            off += 2.0 * a[i, j] * a[i, j]
    return rotations, math.sqrt(off) <= thresh


@njit(cache=True)
def apply_factor_kernel(b, idx_i, idx_j, diag_j, diag_i, off):
    """In-place B <- B f for an update factor given per-direction scalars.
    Only rows at or below the touched column hold nonzeros."""
    n = b.shape[0]
    for d in range(idx_i.shape[0]):
        i = idx_i[d]
        j = idx_j[d]
        if i == j:
            s = diag_j[d]
            for r in range(j, n):
                b[r, j] *= s
        else:
            u = diag_j[d]
            w = diag_i[d]
            v = off[d]
            for r in range(j, n):
                b[r, j] = u * b[r, j] + v * b[r, i]
            for r in range(i, n):
                b[r, i] *= w
    return None


@njit(cache=True)
def congruence_lower_kernel(m, idx_i, idx_j, tjj, tii, tij):
    """In-place M <- T M T^T for sparse lower-triangular T with entries
    (j,j) = tjj, (i,i) = tii, (i,j) = tij per direction (T = f^{-1} when
    called with the structurally inverted factor).  Returns the trace
    change over the touched diagonal entries."""
    n = m.shape[0]
    delta = 0.0
    for d in range(idx_i.shape[0]):
        i = idx_i[d]
        j = idx_j[d]
        if i == j:
            a = tjj[d]
            delta -= m[j, j]
            for k in range(n):
                m[j, k] *= a
            for k in range(n):
                m[k, j] *= a
            delta += m[j, j]
        else:
            a = tjj[d]
            bb = tii[d]
            c = tij[d]
            delta -= m[j, j] + m[i, i]
            for k in range(n):
                rj = m[j, k]
                m[j, k] = a * rj
                m[i, k] = bb * m[i, k] + c * rj
            for k in range(n):
                cj = m[k, j]
                m[k, j] = a * cj
                m[k, i] = bb * m[k, i] + c * cj
            delta += m[j, j] + m[i, i]
    return delta


@njit(cache=True)
def congruence_upper_kernel(m, idx_i, idx_j, tjj, tii, tji):
    """In-place M <- T M T^T for sparse upper-triangular T with entries
    (j,j) = tjj, (i,i) = tii, (j,i) = tji per direction (T = f^T when
    called with the factor's own scalars).  Returns the trace change over
    the touched diagonal entries."""
    n = m.shape[0]
    delta = 0.0
    for d in range(idx_i.shape[0]):
        i = idx_i[d]
        j = idx_j[d]
        if i == j:
            s = tjj[d]
            delta -= m[j, j]
            for k in range(n):
                m[j, k] *= s
            for k in range(n):
                m[k, j] *= s
            delta += m[j, j]
        else:
            u = tjj[d]
            w = tii[d]
            v = tji[d]
            delta -= m[j, j] + m[i, i]
            for k in range(n):
                ri = m[i, k]
                m[j, k] = u * m[j, k] + v * ri
                m[i, k] = w * ri
            for k in range(n):
                ci = m[k, i]
                m[k, j] = u * m[k, j] + v * ci
                m[k, i] = w * ci
            delta += m[j, j] + m[i, i]
    return delta


@njit(cache=True)
def greedy_scan_kernel(order_i, order_j, n, out_i, out_j):
    """Scan (i, j) pairs in precedence order, keeping a pair when none of
    its indices was consumed yet.  Returns the count kept."""
    consumed = np.zeros(n, dtype=np.bool_)
    count = 0
    for t in range(order_i.shape[0]):
        i = order_i[t]
        j = order_j[t]
        if consumed[i] or consumed[j]:
            continue
        consumed[i] = True
        consumed[j] = True
        out_i[count] = i
        out_j[count] = j
        count += 1
    return count
