"""Objectives of the form g(tr(C_p X^-1), tr(D_q X), log det X).

The whole point of the class: with X = B B^T, every coefficient
beta_ij depends on X only through the maintained matrices

    M1_p = B^-1 C_p B^-T      (so tr M1_p = tr(C_p X^-1))
    M2_q = B^T  D_q B         (so tr M2_q = tr(D_q X))

plus logdet = 2 sum log diag(B).  A sparse factor update B <- B f maps to

    M1_p <- f^-1 M1_p f^-T,   M2_q <- f^T M2_q f,
    logdet += 2 log det f,

touching only the rows/columns the factor touches, so a single direction
costs O(n) per maintained matrix and one beta costs O(P + Q) afterwards.

The combination matrix whose entries drive the updates is

    F(X) = -sum_p (dg/df1_p) M1_p + sum_q (dg/df2_q) M2_q + (dg/df3) I

with beta_ij = sqrt(2)^[i != j] * F_ij.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .backend import get_kernels
from .basis import SQRT2, UpdateFactor, invert_update_factor
from .errors import DimensionMismatch
from .ledger import FlopLedger, charge
from .manifold import CholeskyPoint

_K = get_kernels()

LOGDET_REFRESH_EVERY = 10_000


class QuadLogDet:
    """g = sum_p f1_p + sum_q f2_q + k * f3 (linear outer function)."""

    def __init__(self, k: float = 0.0):
        self.k = float(k)

    def value(self, f1, f2, f3: float) -> float:
        return float(np.sum(f1) + np.sum(f2) + self.k * f3)

    def partials(self, f1, f2, f3: float):
        return np.ones(len(f1)), np.ones(len(f2)), self.k

    def __repr__(self):
        return f"QuadLogDet(k={self.k})"


class LogDetComposite:
    """g = a * log(exp(b1 * f3) + b2) - c * f3 with P = Q = 0; a smooth
    nonlinear function of the log-determinant alone."""

    def __init__(self, a: float, b1: float, b2: float, c: float):
        self.a, self.b1, self.b2, self.c = float(a), float(b1), float(b2), float(c)

    def value(self, f1, f2, f3: float) -> float:
        return self.a * math.log(math.exp(self.b1 * f3) + self.b2) - self.c * f3

    def partials(self, f1, f2, f3: float):
        e = math.exp(self.b1 * f3)
        d3 = self.a * self.b1 * e / (e + self.b2) - self.c
        return np.ones(len(f1)), np.ones(len(f2)), d3

    def __repr__(self):
        return f"LogDetComposite(a={self.a}, b1={self.b1}, b2={self.b2}, c={self.c})"


@dataclass
class ObjectiveSpec:
    """Problem data: SPD (or zero) matrices C_p, D_q and the outer g.

    When `s` is set the objective is the finite sum over s of
    h_s = tr(C_s X^-1) + tr(D_s X) + (k/s) log det X, which requires g to
    be QuadLogDet and len(c_list) == len(d_list) == s."""

    n: int
    c_list: list
    d_list: list
    g: object
    s: int | None = None

    def __post_init__(self):
        self.c_list = [linalg.require_symmetric(c) for c in self.c_list]
        self.d_list = [linalg.require_symmetric(d) for d in self.d_list]
        for m in self.c_list + self.d_list:
            if m.shape != (self.n, self.n):
                raise DimensionMismatch(f"matrix shape {m.shape} != n={self.n}")
        if self.s is not None:
            if not isinstance(self.g, QuadLogDet):
                raise ValueError("finite-sum objectives require the linear outer g")
            if len(self.c_list) != self.s or len(self.d_list) != self.s:
                raise ValueError("finite-sum objectives need one (C_s, D_s) per sample")

    @property
    def p(self) -> int:
        return len(self.c_list)

    @property
    def q(self) -> int:
        return len(self.d_list)


@dataclass
class ObjectiveState:
    """Maintained intermediates for one iterate."""

    m1: list
    m2: list
    logdet: float
    tr_m1: np.ndarray
    tr_m2: np.ndarray
    advances: int = 0
    _scratch: dict = field(default_factory=dict, repr=False)

    def args(self):
        return self.tr_m1, self.tr_m2, self.logdet

    def copy(self) -> "ObjectiveState":
        return ObjectiveState(
            [m.copy() for m in self.m1],
            [m.copy() for m in self.m2],
            self.logdet,
            self.tr_m1.copy(),
            self.tr_m2.copy(),
            self.advances,
        )


def init_state(
    spec: ObjectiveSpec, at: CholeskyPoint, ledger: FlopLedger | None = None
) -> ObjectiveState:
    if at.n != spec.n:
        raise DimensionMismatch(f"point dim {at.n} != objective dim {spec.n}")
    m1 = []
    for c in spec.c_list:
        y = linalg.tri_solve_lower(at.b, c, "left", ledger)
        m1.append(linalg.sym_part(linalg.tri_solve_lower(at.b, y, "right_t", ledger)))
    m2 = []
    bt = np.ascontiguousarray(at.b.T)
    for d in spec.d_list:
        m2.append(linalg.sym_part(linalg.matmul(linalg.matmul(bt, d, ledger), at.b, ledger)))
    return ObjectiveState(
        m1,
        m2,
        at.logdet(),
        np.array([np.trace(m) for m in m1]),
        np.array([np.trace(m) for m in m2]),
    )


def value(spec: ObjectiveSpec, state: ObjectiveState) -> float:
    return spec.g.value(*state.args())


def value_at(
    spec: ObjectiveSpec, at: CholeskyPoint, ledger: FlopLedger | None = None
) -> float:
    return value(spec, init_state(spec, at, ledger))


def beta_coeff(
    spec: ObjectiveSpec,
    state: ObjectiveState,
    i: int,
    j: int,
    ledger: FlopLedger | None = None,
) -> float:
    """beta_ij from the maintained state in O(P + Q)."""
    w1, w2, w3 = spec.g.partials(*state.args())
    acc = 0.0
    for p in range(spec.p):
        acc -= w1[p] * state.m1[p][i, j]
    for q in range(spec.q):
        acc += w2[q] * state.m2[q][i, j]
    charge(ledger, spec.p + spec.q + 1)
    if i == j:
        return acc + w3
    return SQRT2 * acc


def betas_for(
    spec: ObjectiveSpec,
    state: ObjectiveState,
    idx_i: np.ndarray,
    idx_j: np.ndarray,
    ledger: FlopLedger | None = None,
) -> np.ndarray:
    """Vectorized beta_coeff over a set of index pairs."""
    w1, w2, w3 = spec.g.partials(*state.args())
    acc = np.zeros(idx_i.shape[0])
    for p in range(spec.p):
        acc -= w1[p] * state.m1[p][idx_i, idx_j]
    for q in range(spec.q):
        acc += w2[q] * state.m2[q][idx_i, idx_j]
    charge(ledger, (spec.p + spec.q + 1) * idx_i.shape[0])
    diag = idx_i == idx_j
    return np.where(diag, acc + w3, SQRT2 * acc)


def lower_F(
    spec: ObjectiveSpec, state: ObjectiveState, ledger: FlopLedger | None = None
) -> np.ndarray:
    """All entries of F(X) as a full symmetric matrix (read j <= i for the
    lower-triangle table).  Costs (P + Q + 1) per entry."""
    w1, w2, w3 = spec.g.partials(*state.args())
    n = spec.n
    f = np.zeros((n, n))
    for p in range(spec.p):
        f -= w1[p] * state.m1[p]
    for q in range(spec.q):
        f += w2[q] * state.m2[q]
    f[np.diag_indices(n)] += w3
    charge(ledger, (spec.p + spec.q + 1) * n * (n + 1) // 2)
    return f


def advance_state(
    state: ObjectiveState,
    f: UpdateFactor,
    ledger: FlopLedger | None = None,
) -> ObjectiveState:
    """Advance M1/M2/logdet in place through a factor update (returns the
    same object).  Only rows/columns touched by `f` change."""
    finv = invert_update_factor(f)
    offdiag = int(np.sum(f.idx_i != f.idx_j))
    diag = len(f.idx_i) - offdiag
    per_matrix = 6 * f.n * offdiag + 2 * f.n * diag
    for t, m in enumerate(state.m1):
        state.tr_m1[t] += _K.congruence_lower_kernel(
            m, finv.idx_i, finv.idx_j, finv.diag_j, finv.diag_i, finv.off
        )
        charge(ledger, per_matrix)
    for t, m in enumerate(state.m2):
        state.tr_m2[t] += _K.congruence_upper_kernel(
            m, f.idx_i, f.idx_j, f.diag_j, f.diag_i, f.off
        )
        charge(ledger, per_matrix)
    state.logdet += 2.0 * f.logdet()
    state.advances += 1
    charge(ledger, 1)
    return state


def refresh_logdet(state: ObjectiveState, at: CholeskyPoint) -> None:
    """Exact O(n) recomputation that bounds accumulation drift."""
    state.logdet = at.logdet()


def euclidean_grad(
    spec: ObjectiveSpec, at: CholeskyPoint, ledger: FlopLedger | None = None
) -> np.ndarray:
    """grad f(X) = -sum w1_p X^-1 C_p X^-1 + sum w2_q D_q + w3 X^-1
    (dense path; used by the full-gradient baseline and the oracles)."""
    state = init_state(spec, at, ledger)
    w1, w2, w3 = spec.g.partials(*state.args())
    n = spec.n
    z = linalg.tri_solve_lower(at.b, np.eye(n), "left", ledger)  # B^-1
    x_inv = linalg.matmul(np.ascontiguousarray(z.T), z, ledger)
    g = w3 * x_inv
    for p in range(spec.p):
        g -= w1[p] * linalg.matmul(
            linalg.matmul(np.ascontiguousarray(z.T), state.m1[p], ledger), z, ledger
        )
    for q in range(spec.q):
        g += w2[q] * spec.d_list[q]
    return linalg.sym_part(g)


def whitened_grad(
    spec: ObjectiveSpec, at: CholeskyPoint, ledger: FlopLedger | None = None
) -> np.ndarray:
    """F(X) = B^-1 grad^R f(X) B^-T computed fresh from the point."""
    return lower_F(spec, init_state(spec, at, ledger), ledger)


def sample_spec(spec: ObjectiveSpec, s: int) -> ObjectiveSpec:
    """Single-sample objective h_s of a finite-sum spec."""
    if spec.s is None:
        raise ValueError("not a finite-sum objective")
    return ObjectiveSpec(
        spec.n,
        [spec.c_list[s]],
        [spec.d_list[s]],
        QuadLogDet(spec.g.k / spec.s),
    )
