"""Geometry of the SPD manifold, carried entirely on Cholesky factors.

A point X = B B^T is represented by its lower factor B with positive
diagonal, so positive definiteness holds by construction and is never
restored by projection.  The metric is <xi, eta>_X = tr(X^-1 xi X^-1 eta);
the geodesic from X with velocity xi is

    gamma(t) = B exp(t B^-1 xi B^-T) B^T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DimensionMismatch, Overflow
from .ledger import FlopLedger, charge

EXP_EIG_CAP = 700.0


@dataclass
class CholeskyPoint:
    """Iterate stored as its lower-triangular Cholesky factor."""

    b: np.ndarray

    def __post_init__(self):
        b = linalg.as_matrix(self.b)
        if np.abs(np.triu(b, 1)).max(initial=0.0) != 0.0:
            raise ValueError("factor has entries above the diagonal")
        if not (np.diag(b) > 0.0).all():
            raise ValueError("factor diagonal must be strictly positive")
        if not np.isfinite(b).all():
            raise ValueError("factor has non-finite entries")
        self.b = b

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def x(self) -> np.ndarray:
        """Dense X = B B^T."""
        return self.b @ self.b.T

    def logdet(self) -> float:
        """log det X = 2 sum log diag(B)."""
        return 2.0 * float(np.log(np.diag(self.b)).sum())

    def copy(self) -> "CholeskyPoint":
        return CholeskyPoint(self.b.copy())

    @staticmethod
    def identity(n: int) -> "CholeskyPoint":
        return CholeskyPoint(np.eye(n))

    @classmethod
    def _trusted(cls, b: np.ndarray) -> "CholeskyPoint":
        """Wrap a factor known valid by construction (hot paths only);
        skips the full structural validation."""
        point = object.__new__(cls)
        point.b = b
        return point

    @staticmethod
    def from_spd(x: np.ndarray, ledger: FlopLedger | None = None) -> "CholeskyPoint":
        return CholeskyPoint(linalg.cholesky(x, ledger))


def _check_dims(at: CholeskyPoint, *mats: np.ndarray) -> None:
    for m in mats:
        if m.shape != (at.n, at.n):
            raise DimensionMismatch(f"tangent shape {m.shape} != point dim {at.n}")


def whiten(at: CholeskyPoint, xi: np.ndarray, ledger: FlopLedger | None = None) -> np.ndarray:
    """B^-1 xi B^-T, the tangent vector in the coordinates where X = I."""
    _check_dims(at, xi)
    y = linalg.tri_solve_lower(at.b, xi, "left", ledger)
    return linalg.tri_solve_lower(at.b, y, "right_t", ledger)


def inner(
    at: CholeskyPoint,
    xi: np.ndarray,
    eta: np.ndarray,
    ledger: FlopLedger | None = None,
) -> float:
    """tr(X^-1 xi X^-1 eta) via two triangular solves per argument."""
    _check_dims(at, xi, eta)
    wx = whiten(at, xi, ledger)
    we = wx if eta is xi else whiten(at, eta, ledger)
    charge(ledger, at.n * at.n)
    return float(np.sum(wx * we))


def norm(at: CholeskyPoint, xi: np.ndarray, ledger: FlopLedger | None = None) -> float:
    return float(np.sqrt(max(0.0, inner(at, xi, xi, ledger))))


def exp_whitened(
    at: CholeskyPoint,
    w: np.ndarray,
    ledger: FlopLedger | None = None,
) -> CholeskyPoint:
    """Factor of B exp(W) B^T for a whitened symmetric step W.

    Raises Overflow if any eigenvalue of W exceeds the double-precision
    exponent cap in magnitude (divergent steps surface loudly)."""
    eig = linalg.sym_eig(linalg.sym_part(w), ledger)
    if np.abs(eig.values).max(initial=0.0) > EXP_EIG_CAP:
        raise Overflow(
            f"geodesic step eigenvalue {np.abs(eig.values).max():.3g} exceeds {EXP_EIG_CAP:g}"
        )
    s = linalg.sym_part((eig.vectors * np.exp(eig.values)) @ eig.vectors.T)
    charge(ledger, at.n**3 + at.n**2)
    bs = linalg.matmul(at.b, s, ledger)
    x_next = linalg.sym_part(linalg.matmul(bs, at.b.T, ledger))
    return CholeskyPoint(linalg.cholesky(x_next, ledger))


def exp_map(
    at: CholeskyPoint,
    xi: np.ndarray,
    t: float = 1.0,
    ledger: FlopLedger | None = None,
) -> CholeskyPoint:
    """Point at time t on the geodesic from `at` with velocity `xi`:
    gamma(t) = B exp(t B^-1 xi B^-T) B^T, re-factored."""
    return exp_whitened(at, linalg.sym_part(whiten(at, xi, ledger)) * t, ledger)


def riemannian_grad(
    at: CholeskyPoint,
    euclid_grad: np.ndarray,
    ledger: FlopLedger | None = None,
) -> np.ndarray:
    """grad^R f(X) = X grad f(X) X."""
    _check_dims(at, euclid_grad)
    x = linalg.matmul(at.b, at.b.T, ledger)
    return linalg.sym_part(linalg.matmul(linalg.matmul(x, euclid_grad, ledger), x, ledger))


def distance(
    x: CholeskyPoint,
    y: CholeskyPoint,
    ledger: FlopLedger | None = None,
) -> float:
    """Affine-invariant distance: ||log(X^-1/2 Y X^-1/2)||_F, computed from
    the eigenvalues of B^-1 Y B^-T (similar to X^-1/2 Y X^-1/2)."""
    if x.n != y.n:
        raise DimensionMismatch(f"dimension mismatch {x.n} != {y.n}")
    m = whiten(x, y.x(), ledger)
    eig = linalg.sym_eig(linalg.sym_part(m), ledger)
    if eig.values[0] <= 0.0:
        raise ValueError("whitened matrix lost positivity; inputs were not SPD")
    return float(np.sqrt(np.sum(np.log(eig.values) ** 2)))


def log_map(
    x: CholeskyPoint,
    y: CholeskyPoint,
    ledger: FlopLedger | None = None,
) -> np.ndarray:
    """Inverse of exp_map: the xi with exp_map(x, xi, 1) = y, computed as
    B log(B^-1 Y B^-T) B^T."""
    if x.n != y.n:
        raise DimensionMismatch(f"dimension mismatch {x.n} != {y.n}")
    m = linalg.sym_part(whiten(x, y.x(), ledger))
    lg = linalg.sym_matfn(m, "log", ledger)
    return linalg.sym_part(
        linalg.matmul(linalg.matmul(x.b, lg, ledger), x.b.T, ledger)
    )
