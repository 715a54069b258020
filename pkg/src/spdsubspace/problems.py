"""Benchmark problem generation and closed-form optima.

The experiment family is f(X) = tr(C X^-1 + D X) + k log det X with
C = C_temp C_temp^T / n^2 for an n x n matrix of integers drawn uniformly
from [1, 10], and D = I.  Recognized closed forms:

    D = I, k =  0:   X* = C^(1/2)
    C = 0, k = -1:   X* = D^(-1)
    D = I, k = -1:   X* = U diag((1 + sqrt(1 + 4 s_i)) / 2) U^T,
                     where C = U diag(s) U^T.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, objective
from .errors import NoClosedForm
from .manifold import CholeskyPoint, inner, riemannian_grad
from .rng import Xorshift

OPTIMUM_RESIDUAL_TOL = 1e-8


@dataclass
class ProblemInstance:
    n: int
    c: np.ndarray
    d: np.ndarray
    k: float
    seed: int | None = None
    f_star: float | None = None
    x_star: CholeskyPoint | None = None

    def to_objective(self) -> objective.ObjectiveSpec:
        return objective.ObjectiveSpec(
            self.n, [self.c], [self.d], objective.QuadLogDet(self.k)
        )


def gen_problem(n: int, seed: int, k: float = 0.0) -> ProblemInstance:
    """Deterministic instance from the documented PRNG: C_temp is filled
    row-major with 1 + randbelow(10), then C = C_temp C_temp^T / n^2."""
    if n < 2:
        raise ValueError("need n >= 2")
    rng = Xorshift(seed)
    temp = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            temp[i, j] = 1 + rng.randbelow(10)
    c = linalg.sym_part(temp @ temp.T / float(n * n))
    return ProblemInstance(n, c, np.eye(n), float(k), seed)


def _is_identity(m: np.ndarray) -> bool:
    return bool(np.allclose(m, np.eye(m.shape[0]), rtol=0.0, atol=1e-12))


def _is_zero(m: np.ndarray) -> bool:
    return bool(np.all(m == 0.0))


def closed_form_optimum(inst: ProblemInstance) -> tuple[CholeskyPoint, float]:
    """Optimum of a recognized (C, D, k) pattern, with an optimality
    residual check ||grad^R f(X*)||_X <= 1e-8."""
    n = inst.n
    if _is_identity(inst.d) and inst.k == 0.0:
        eig = linalg.sym_eig(inst.c)
        if eig.values[0] <= 0:
            raise NoClosedForm("C must be positive definite for the sqrt form")
        root = np.sqrt(eig.values)
        x_star = linalg.sym_part((eig.vectors * root) @ eig.vectors.T)
        f_star = 2.0 * float(root.sum())
    elif _is_zero(inst.c) and inst.k == -1.0:
        eig = linalg.sym_eig(inst.d)
        if eig.values[0] <= 0:
            raise NoClosedForm("D must be positive definite for the inverse form")
        x_star = linalg.sym_part((eig.vectors / eig.values) @ eig.vectors.T)
        f_star = float(n + np.log(eig.values).sum())
    elif _is_identity(inst.d) and inst.k == -1.0:
        eig = linalg.sym_eig(inst.c)
        if eig.values[0] <= 0:
            raise NoClosedForm("C must be positive definite for the quadratic-root form")
        sig = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * eig.values))
        x_star = linalg.sym_part((eig.vectors * sig) @ eig.vectors.T)
        f_star = float(np.sum(eig.values / sig + sig - np.log(sig)))
    else:
        raise NoClosedForm("no recognized closed form for this (C, D, k)")

    point = CholeskyPoint.from_spd(x_star)
    spec = inst.to_objective()
    grad = riemannian_grad(point, objective.euclidean_grad(spec, point))
    residual = float(np.sqrt(max(0.0, inner(point, grad, grad))))
    if residual > OPTIMUM_RESIDUAL_TOL:
        raise NoClosedForm(f"closed-form optimum residual {residual:.3g} too large")
    return point, f_star


def with_optimum(inst: ProblemInstance) -> ProblemInstance:
    inst.x_star, inst.f_star = closed_form_optimum(inst)
    return inst
