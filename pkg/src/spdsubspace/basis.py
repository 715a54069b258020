"""Canonical tangent basis, sparse Cholesky update factors, and the two
direction-selection rules.

Basis vectors are G_ij(X) = B E_ij B^T where E_ij holds 1/sqrt(2) at
(i, j) and (j, i) for i != j, and E_ii holds 1 at (i, i).  Indices are
0-based throughout, with j <= i (lower triangle).

A step of size alpha along directions {(i, j, beta_ij)} multiplies the
factor: B <- B * L(exp(-alpha * sum beta_ij E_ij)).  For non-overlapping
directions that Cholesky factor is sparse: per direction it touches at
most two diagonal entries and one lower off-diagonal entry.  With
theta = alpha * beta and w = exp(-theta / sqrt(2)):

    i != j:  (j,j) <- u,  (i,i) <- 1/u,  (i,j) <- (w - 1/w) / (2u),
             where u = sqrt((w + 1/w) / 2)
    i == j:  (i,i) <- sqrt(exp(-theta))

The structural inverse flips diagonals and negates the off-diagonal
entry, which is what makes O(n) state maintenance possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import get_kernels
from .errors import (
    DimensionMismatch,
    OverlappingDirections,
    Overflow,
    StructureViolation,
)
from .ledger import FlopLedger, charge
from .manifold import CholeskyPoint
from .rng import Xorshift

_K = get_kernels()

SQRT2 = math.sqrt(2.0)
THETA_EXP_CAP = 700.0


def basis_matrix(n: int, i: int, j: int) -> np.ndarray:
    """Dense E_ij (oracle-side only)."""
    e = np.zeros((n, n))
    if i == j:
        e[i, i] = 1.0
    else:
        e[i, j] = e[j, i] = 1.0 / SQRT2
    return e


def beta_from_F(f_entry: float, i: int, j: int) -> float:
    """Projection coefficient from an entry of F(X) = B^-1 grad^R f B^-T:
    beta_ij = sqrt(2)^[i != j] * F_ij."""
    if j > i:
        raise ValueError("need j <= i")
    return f_entry * SQRT2 if i != j else f_entry


@dataclass
class DirectionSet:
    """Non-overlapping basis directions with their coefficients."""

    n: int
    idx_i: np.ndarray
    idx_j: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        self.idx_i = np.asarray(self.idx_i, dtype=np.int64)
        self.idx_j = np.asarray(self.idx_j, dtype=np.int64)
        self.betas = np.asarray(self.betas, dtype=np.float64)
        k = self.idx_i.shape[0]
        if not (1 <= k <= self.n):
            raise OverlappingDirections(f"need 1 <= K <= n, got K={k}, n={self.n}")
        if self.idx_j.shape[0] != k or self.betas.shape[0] != k:
            raise DimensionMismatch("index/beta arrays disagree in length")
        if (self.idx_j > self.idx_i).any():
            raise ValueError("need j <= i for every direction")
        if (self.idx_j < 0).any() or (self.idx_i >= self.n).any():
            raise ValueError("direction index out of range")
        touched = np.sort(np.concatenate([self.idx_j, self.idx_i[self.idx_i != self.idx_j]]))
        if touched.shape[0] > 1 and (touched[1:] == touched[:-1]).any():
            raise OverlappingDirections("directions share a row/column index")

    def __len__(self) -> int:
        return int(self.idx_i.shape[0])

    def pairs(self):
        return list(zip(self.idx_i.tolist(), self.idx_j.tolist(), self.betas.tolist()))


@dataclass
class UpdateFactor:
    """Sparse lower-triangular factor L(exp(-alpha sum beta E)).

    Arrays hold, per direction, the touched entries: diag_j at (j, j),
    diag_i at (i, i) and off at (i, j); identity elsewhere.  A diagonal
    direction (i == j) uses diag_j for its single touched entry."""

    n: int
    idx_i: np.ndarray
    idx_j: np.ndarray
    diag_j: np.ndarray
    diag_i: np.ndarray
    off: np.ndarray

    def to_dense(self) -> np.ndarray:
        f = np.eye(self.n)
        for d in range(len(self.idx_i)):
            i, j = int(self.idx_i[d]), int(self.idx_j[d])
            if i == j:
                f[j, j] = self.diag_j[d]
            else:
                f[j, j] = self.diag_j[d]
                f[i, i] = self.diag_i[d]
                f[i, j] = self.off[d]
        return f

    def logdet(self) -> float:
        offdiag = self.idx_i != self.idx_j
        return float(np.log(self.diag_j).sum() + np.log(self.diag_i[offdiag]).sum())

    def det(self) -> float:
        return math.exp(self.logdet())

    @staticmethod
    def from_dense(f: np.ndarray) -> "UpdateFactor":
        """Parse a dense matrix with update-factor sparsity; raises
        StructureViolation otherwise."""
        n = f.shape[0]
        if f.shape != (n, n):
            raise StructureViolation("not square")
        if np.abs(np.triu(f, 1)).max(initial=0.0) != 0.0:
            raise StructureViolation("entries above the diagonal")
        lower = np.tril(f, -1)
        rows, cols = np.nonzero(lower)
        used = np.zeros(n, dtype=bool)
        idx_i, idx_j, dj, di, off = [], [], [], [], []
        for i, j in zip(rows.tolist(), cols.tolist()):
            if used[i] or used[j]:
                raise StructureViolation("off-diagonal entries overlap")
            used[i] = used[j] = True
            idx_i.append(i)
            idx_j.append(j)
            dj.append(f[j, j])
            di.append(f[i, i])
            off.append(f[i, j])
        for d in range(n):
            if used[d]:
                continue
            if f[d, d] != 1.0:
                idx_i.append(d)
                idx_j.append(d)
                dj.append(f[d, d])
                di.append(f[d, d])
                off.append(0.0)
        if not idx_i:
            idx_i, idx_j, dj, di, off = [0], [0], [1.0], [1.0], [0.0]
        fac = UpdateFactor(
            n,
            np.array(idx_i, dtype=np.int64),
            np.array(idx_j, dtype=np.int64),
            np.array(dj),
            np.array(di),
            np.array(off),
        )
        if (fac.diag_j <= 0).any() or (fac.diag_i <= 0).any():
            raise StructureViolation("touched diagonal entries must be positive")
        return fac


def _uni_scalars(i: int, j: int, theta: float) -> tuple[float, float, float]:
    if i == j:
        if abs(theta) > THETA_EXP_CAP:
            raise Overflow(f"|theta| = {abs(theta):.3g} exceeds exponent cap")
        s = math.exp(-0.5 * theta)
        return s, s, 0.0
    if abs(theta) > THETA_EXP_CAP * SQRT2:
        raise Overflow(f"|theta| = {abs(theta):.3g} exceeds exponent cap")
    w = math.exp(-theta / SQRT2)
    u = math.sqrt(0.5 * (w + 1.0 / w))
    return u, 1.0 / u, (w - 1.0 / w) / (2.0 * u)


def _uni_scalars_vec(idx_i, idx_j, thetas):
    """Vectorized factor scalars for a direction batch."""
    diag = idx_i == idx_j
    cap = np.where(diag, THETA_EXP_CAP, THETA_EXP_CAP * SQRT2)
    if (np.abs(thetas) > cap).any():
        worst = float(np.abs(thetas).max())
        raise Overflow(f"|theta| = {worst:.3g} exceeds exponent cap")
    w = np.exp(-thetas / np.where(diag, 2.0, SQRT2))
    u = np.sqrt(0.5 * (w + 1.0 / w))
    dj = np.where(diag, w, u)
    di = np.where(diag, w, 1.0 / u)
    off = np.where(diag, 0.0, (w - 1.0 / w) / (2.0 * u))
    return dj, di, off


def update_factor_uni(
    n: int, i: int, j: int, theta: float, ledger: FlopLedger | None = None
) -> UpdateFactor:
    """Factor for a single direction with theta = alpha * beta_ij."""
    if j > i:
        raise ValueError("need j <= i")
    dj, di, off = _uni_scalars(i, j, theta)
    charge(ledger, 5)
    return UpdateFactor(
        n,
        np.array([i], dtype=np.int64),
        np.array([j], dtype=np.int64),
        np.array([dj]),
        np.array([di]),
        np.array([off]),
    )


def update_factor_multi(
    dirs: DirectionSet, alpha: float, ledger: FlopLedger | None = None
) -> UpdateFactor:
    """Factor for a non-overlapping direction set; equals the sum of the
    per-direction factors minus (K-1) I."""
    dj, di, off = _uni_scalars_vec(dirs.idx_i, dirs.idx_j, alpha * dirs.betas)
    charge(ledger, 5 * len(dirs))
    return UpdateFactor(dirs.n, dirs.idx_i.copy(), dirs.idx_j.copy(), dj, di, off)


def invert_update_factor(f: UpdateFactor) -> UpdateFactor:
    """Structural inverse: diagonal entries inverted, off-diagonal negated."""
    return UpdateFactor(
        f.n, f.idx_i.copy(), f.idx_j.copy(), 1.0 / f.diag_j, 1.0 / f.diag_i, -f.off
    )


def apply_update(
    point: CholeskyPoint, f: UpdateFactor, ledger: FlopLedger | None = None
) -> CholeskyPoint:
    """B <- B f, touching only the columns the factor touches.

    The result keeps lower-triangular structure and a positive diagonal by
    construction (touched columns are scaled by positive factor diagonals,
    and the off-diagonal contribution lands strictly below the diagonal),
    so only the diagonal is re-checked here."""
    if point.n != f.n:
        raise DimensionMismatch(f"point dim {point.n} != factor dim {f.n}")
    b = point.b.copy()
    _K.apply_factor_kernel(b, f.idx_i, f.idx_j, f.diag_j, f.diag_i, f.off)
    charge(ledger, apply_update_cost(point.n, f))
    d = b.diagonal()
    if not ((d > 0.0).all() and np.isfinite(d).all()):
        raise ValueError("factor update lost the positive diagonal (underflow?)")
    return CholeskyPoint._trusted(b)


def apply_update_cost(n: int, f: UpdateFactor) -> int:
    offdiag = int(np.sum(f.idx_i != f.idx_j))
    diag = len(f.idx_i) - offdiag
    return max(1, 3 * n * offdiag + n * diag)


def random_direction_set(n: int, rng: Xorshift) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs of the permutation-based sampling rule (betas are the
    caller's job).  Guarantees floor(n/2) <= K <= n, non-overlapping."""
    if n < 2:
        raise ValueError("need n >= 2")
    out_i = np.empty(n, dtype=np.int64)
    out_j = np.empty(n, dtype=np.int64)
    k = _K.sample_direction_set(rng.state_array(), n, out_i, out_j)
    return out_i[:k].copy(), out_j[:k].copy()


def uniform_direction(n: int, rng: Xorshift) -> tuple[int, int]:
    """Single (i, j), j <= i, uniform over all n(n+1)/2 basis pairs."""
    i, j = _K.sample_pair_uniform(rng.state_array(), n)
    return int(i), int(j)


_TRIL_CACHE: dict = {}


def tril_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-major (i, j) enumeration of the lower triangle, cached per n."""
    if n not in _TRIL_CACHE:
        ii, jj = np.tril_indices(n)
        _TRIL_CACHE[n] = (
            np.ascontiguousarray(ii, dtype=np.int64),
            np.ascontiguousarray(jj, dtype=np.int64),
        )
    return _TRIL_CACHE[n]


def greedy_direction_set(f_lower: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Scan lower-triangle entries by descending |F_ij| (ties broken by
    ascending (i, j)), keeping each pair whose indices are still free."""
    n = f_lower.shape[0]
    ii, jj = tril_pairs(n)
    vals = np.abs(f_lower[ii, jj])
    # stable sort on the single key keeps the row-major (i, j) tie order
    order = np.argsort(-vals, kind="stable")
    out_i = np.empty(n, dtype=np.int64)
    out_j = np.empty(n, dtype=np.int64)
    k = _K.greedy_scan_kernel(
        np.ascontiguousarray(ii[order]), np.ascontiguousarray(jj[order]), n, out_i, out_j
    )
    return out_i[:k].copy(), out_j[:k].copy()
