"""Pure-numpy fallback kernels.

Same contract as `_kernels_numba`, with loops replaced by slice
arithmetic where it pays off.  The RNG functions run the documented
xorshift64* update on Python integers, so the streams match the numba
kernels draw for draw.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_MULT = 0x2545F4914F6CDD1D


def _rng_next(state) -> int:
    s = int(state[0])
    s = (s ^ (s >> 12)) & _MASK
    s = (s ^ (s << 25)) & _MASK
    s = (s ^ (s >> 27)) & _MASK
    state[0] = s
    return (s * _MULT) & _MASK


def _randbelow(state, m: int) -> int:
    return (_rng_next(state) * m) >> 64


def _uniform(state) -> float:
    return (_rng_next(state) >> 11) * 2.0**-53


def rng_fill_uniform(state, out) -> None:
    for k in range(out.shape[0]):
        out[k] = _uniform(state)


def rng_permutation(state, n, out) -> None:
    out[:n] = np.arange(n, dtype=np.int64)
    for i in range(n - 1, 0, -1):
        j = _randbelow(state, i + 1)
        out[i], out[j] = out[j], out[i]


def sample_pair_uniform(state, n):
    d = n * (n + 1) // 2
    r = _randbelow(state, d)
    i = int((math.sqrt(8.0 * r + 1.0) - 1.0) / 2.0)
    while (i + 1) * (i + 2) // 2 <= r:
        i += 1
    while i * (i + 1) // 2 > r:
        i -= 1
    return i, r - i * (i + 1) // 2


def sample_direction_set(state, n, out_i, out_j) -> int:
    perm = np.empty(n, dtype=np.int64)
    rng_permutation(state, n, perm)
    count = 0
    for c in range(n // 2):
        k = int(perm[2 * c])
        l = int(perm[2 * c + 1])
        if _uniform(state) < 1.0 / n:
            out_i[count] = k
            out_j[count] = k
            out_i[count + 1] = l
            out_j[count + 1] = l
            count += 2
        else:
            out_i[count] = max(k, l)
            out_j[count] = min(k, l)
            count += 1
    return count


def cholesky_kernel(a, out) -> int:
    n = a.shape[0]
    for j in range(n):
        s = a[j, j] - out[j, :j] @ out[j, :j]
        if s <= 0.0 or not math.isfinite(s):
            return j
        d = math.sqrt(s)
        out[j, j] = d
        out[j + 1 :, j] = (a[j + 1 :, j] - out[j + 1 :, :j] @ out[j, :j]) / d
    return -1


def solve_lower_kernel(l, b, out) -> None:
    n = l.shape[0]
    for i in range(n):
        out[i, :] = (b[i, :] - l[i, :i] @ out[:i, :]) / l[i, i]


def jacobi_kernel(a, v, tol, max_sweeps):
    n = a.shape[0]
    v[:] = np.eye(n)
    thresh = tol * max(1.0, float(np.linalg.norm(a)))
    rotations = 0
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))
        if off <= thresh:
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
                app, aqq = a[p, p], a[q, q]
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                a[p, :] = a[:, p].copy()
                a[q, :] = a[:, q].copy()
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vkp = v[:, p].copy()
                v[:, p] = c * vkp - s * v[:, q]
                v[:, q] = s * vkp + c * v[:, q]
                rotations += 1
    off = math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))
    return rotations, off <= thresh


def apply_factor_kernel(b, idx_i, idx_j, diag_j, diag_i, off) -> None:
    for d in range(idx_i.shape[0]):
        i = int(idx_i[d])
        j = int(idx_j[d])
        if i == j:
            b[j:, j] *= diag_j[d]
        else:
            b[j:, j] = diag_j[d] * b[j:, j] + off[d] * b[j:, i]
            b[i:, i] *= diag_i[d]


def congruence_lower_kernel(m, idx_i, idx_j, tjj, tii, tij) -> float:
    delta = 0.0
    for d in range(idx_i.shape[0]):
        i = int(idx_i[d])
        j = int(idx_j[d])
        if i == j:
            a = tjj[d]
            delta -= m[j, j]
            m[j, :] *= a
            m[:, j] *= a
            delta += m[j, j]
        else:
            a = tjj[d]
            bb = tii[d]
            c = tij[d]
            delta -= m[j, j] + m[i, i]
            rj = m[j, :].copy()
            m[j, :] = a * rj
            m[i, :] = bb * m[i, :] + c * rj
            cj = m[:, j].copy()
            m[:, j] = a * cj
            m[:, i] = bb * m[:, i] + c * cj
            delta += m[j, j] + m[i, i]
    return delta


def congruence_upper_kernel(m, idx_i, idx_j, tjj, tii, tji) -> float:
    delta = 0.0
    for d in range(idx_i.shape[0]):
        i = int(idx_i[d])
        j = int(idx_j[d])
        if i == j:
            s = tjj[d]
            delta -= m[j, j]
            m[j, :] *= s
            m[:, j] *= s
            delta += m[j, j]
        else:
            u = tjj[d]
            w = tii[d]
            v = tji[d]
            delta -= m[j, j] + m[i, i]
            ri = m[i, :].copy()
            m[j, :] = u * m[j, :] + v * ri
            m[i, :] = w * ri
            ci = m[:, i].copy()
            m[:, j] = u * m[:, j] + v * ci
            m[:, i] = w * ci
            delta += m[j, j] + m[i, i]
    return delta


def greedy_scan_kernel(order_i, order_j, n, out_i, out_j) -> int:
    consumed = np.zeros(n, dtype=bool)
    count = 0
    for t in range(order_i.shape[0]):
        i = int(order_i[t])
        j = int(order_j[t])
        if consumed[i] or consumed[j]:
            continue
        consumed[i] = True
        consumed[j] = True
        out_i[count] = i
        out_j[count] = j
        count += 1
    return count
