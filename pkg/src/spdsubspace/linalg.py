"""Desk-scale dense linear algebra on full square float64 storage.

Factorizations and the symmetric eigensolver are hand-rolled (cyclic
Jacobi) so that the flop ledger can charge the documented analytic count
per kernel; see `ledger.py` for the cost table.  Matrix products go
through `matmul` so they are charged too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import get_kernels
from .errors import (
    DimensionMismatch,
    DomainError,
    NoConvergence,
    NotPositiveDefinite,
    SingularFactor,
)
from .ledger import FlopLedger, charge

_K = get_kernels()

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 30


@dataclass
class EigenDecomposition:
    """Eigenvalues ascending; columns of `vectors` are the eigenvectors."""

    values: np.ndarray
    vectors: np.ndarray
    rotations: int

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def as_matrix(a) -> np.ndarray:
    m = np.ascontiguousarray(a, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    return m


def require_symmetric(a: np.ndarray) -> np.ndarray:
    a = as_matrix(a)
    if not np.isfinite(a).all():
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - a.T).max() > 1e-8 * scale:
        raise ValueError("matrix is not symmetric")
    return a


def sym_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def matmul(a: np.ndarray, b: np.ndarray, ledger: FlopLedger | None = None) -> np.ndarray:
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    charge(ledger, max(1, a.shape[0] * a.shape[1] * b.shape[1]))
    return a @ b


def cholesky(a: np.ndarray, ledger: FlopLedger | None = None) -> np.ndarray:
    """Lower factor R with R @ R.T == a; raises NotPositiveDefinite on a
    non-positive pivot.  Charged n^3 // 3."""
    a = require_symmetric(a)
    n = a.shape[0]
    out = np.zeros_like(a)
    bad = _K.cholesky_kernel(a, out)
    charge(ledger, max(1, n * n * n // 3))
    if bad >= 0:
        raise NotPositiveDefinite(f"non-positive pivot at index {bad}")
    return out


def tri_solve_lower(
    l: np.ndarray,
    rhs: np.ndarray,
    side: str = "left",
    ledger: FlopLedger | None = None,
) -> np.ndarray:
    """side='left' solves l @ x = rhs; side='right_t' solves x @ l.T = rhs.
    Charged n^2 * m // 2 for m right-hand sides."""
    l = as_matrix(l)
    n = l.shape[0]
    if (np.diag(l) == 0.0).any():
        raise SingularFactor("triangular factor has a zero diagonal entry")
    rhs = np.ascontiguousarray(rhs, dtype=np.float64)
    squeeze = rhs.ndim == 1
    if squeeze:
        rhs = rhs[:, None]
    if side == "left":
        if rhs.shape[0] != n:
            raise DimensionMismatch(f"rhs rows {rhs.shape[0]} != {n}")
        m = rhs.shape[1]
        out = np.empty_like(rhs)
        _K.solve_lower_kernel(l, rhs, out)
    elif side == "right_t":
        if rhs.shape[1] != n:
            raise DimensionMismatch(f"rhs cols {rhs.shape[1]} != {n}")
        m = rhs.shape[0]
        tmp = np.ascontiguousarray(rhs.T)
        out_t = np.empty_like(tmp)
        _K.solve_lower_kernel(l, tmp, out_t)
        out = np.ascontiguousarray(out_t.T)
    else:
        raise ValueError(f"side must be 'left' or 'right_t', got {side!r}")
    charge(ledger, max(1, n * n * m // 2))
    return out[:, 0] if squeeze else out


def sym_eig(a: np.ndarray, ledger: FlopLedger | None = None) -> EigenDecomposition:
    """Cyclic Jacobi eigendecomposition, values ascending.
    Charged 6n per rotation performed."""
    a = require_symmetric(a)
    n = a.shape[0]
    work = sym_part(a)
    v = np.empty_like(work)
    rotations, converged = _K.jacobi_kernel(work, v, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    charge(ledger, max(1, 6 * n * int(rotations)))
    if not converged:
        raise NoConvergence(
            f"Jacobi sweep budget ({JACOBI_MAX_SWEEPS}) exhausted at n={n}"
        )
    vals = np.diag(work).copy()
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(vals[order], np.ascontiguousarray(v[:, order]), int(rotations))


_NEEDS_POSITIVE = {"log", "sqrt", "inv", "inv_sqrt"}


def sym_matfn(
    a: np.ndarray,
    fn: str,
    ledger: FlopLedger | None = None,
    exponent: float | None = None,
) -> np.ndarray:
    """Spectral matrix function U f(diag) U^T for symmetric input.
    fn is one of exp|log|sqrt|inv|inv_sqrt|power (power takes `exponent`).
    Charged the sym_eig cost plus n^3 + n^2 for the reconstruction."""
    eig = sym_eig(a, ledger)
    lam = eig.values
    n = lam.shape[0]
    if fn in _NEEDS_POSITIVE and lam[0] <= 0.0:
        raise DomainError(f"{fn} requires positive definite input (min eig {lam[0]:g})")
    if fn == "exp":
        f = np.exp(lam)
    elif fn == "log":
        f = np.log(lam)
    elif fn == "sqrt":
        f = np.sqrt(lam)
    elif fn == "inv":
        f = 1.0 / lam
    elif fn == "inv_sqrt":
        f = 1.0 / np.sqrt(lam)
    elif fn == "power":
        if exponent is None:
            raise ValueError("power requires an exponent")
        if lam[0] <= 0.0 and (exponent < 0 or exponent != int(exponent)):
            raise DomainError("fractional or negative power requires positive definite input")
        f = lam**exponent
    else:
        raise ValueError(f"unknown matrix function {fn!r}")
    charge(ledger, n * n * n + n * n)
    return sym_part((eig.vectors * f) @ eig.vectors.T)


def spd_inverse(a: np.ndarray, ledger: FlopLedger | None = None) -> np.ndarray:
    """X^{-1} = B^{-T} B^{-1} from the Cholesky factor of X."""
    b = cholesky(a, ledger)
    z = tri_solve_lower(b, np.eye(a.shape[0]), "left", ledger)
    return matmul(z.T, z, ledger)
