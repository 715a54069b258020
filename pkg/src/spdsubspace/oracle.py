"""Independent brute-force checks: finite differences, Hessian quadratic
forms, convexity/smoothness certificates, and the dense step oracle that
every sparse fast path is tested against.

Sampling convention for (X, V) pairs, documented for reproducibility:
W is a symmetrized standard Gaussian from numpy's seeded Generator,
X = Exp_I(sigma * W) and V = sigma * W' with sigma in {0.1, 1}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, objective
from .basis import SQRT2, DirectionSet, basis_matrix
from .errors import NotPositiveDefinite
from .ledger import FlopLedger
from .manifold import CholeskyPoint, exp_map, inner, log_map, norm, riemannian_grad

ORACLE_MAX_N = 32


@dataclass
class VerificationReport:
    name: str
    max_residual: float
    tolerance: float
    passed: bool
    details: list = field(default_factory=list)

    @staticmethod
    def from_residual(name: str, residual: float, tolerance: float, details=None):
        return VerificationReport(
            name, float(residual), float(tolerance), bool(residual <= tolerance),
            details or [],
        )


def sample_spd_point(n: int, rng: np.random.Generator, sigma: float = 1.0) -> CholeskyPoint:
    w = rng.standard_normal((n, n))
    w = linalg.sym_part(w) * sigma
    return exp_map(CholeskyPoint.identity(n), w)


def sample_tangent(n: int, rng: np.random.Generator, sigma: float = 1.0) -> np.ndarray:
    return linalg.sym_part(rng.standard_normal((n, n))) * sigma


def fd_directional_check(
    spec: objective.ObjectiveSpec,
    point: CholeskyPoint,
    xi: np.ndarray,
    h_sequence=(1e-4, 1e-5, 1e-6),
) -> VerificationReport:
    """Forward differences of f along the geodesic against
    <grad^R f(X), xi>_X."""
    grad = riemannian_grad(point, objective.euclidean_grad(spec, point))
    analytic = inner(point, grad, xi)
    f0 = objective.value_at(spec, point)
    scale = max(1.0, abs(analytic))
    best = np.inf
    details = []
    for h in h_sequence:
        fh = objective.value_at(spec, exp_map(point, xi, h))
        resid = abs((fh - f0) / h - analytic) / scale
        details.append({"h": h, "residual": resid})
        best = min(best, resid)
    return VerificationReport.from_residual("fd-directional", best, 1e-5, details)


def hessian_quadratic_form(
    c: np.ndarray, d: np.ndarray, point: CholeskyPoint, v: np.ndarray
) -> float:
    """tr(D V X^-1 V) + tr(V X^-1 V X^-1 C X^-1) for the quadratic family
    tr(C X^-1 + D X) + k logdet (the logdet term is geodesically linear
    and contributes nothing)."""
    v = linalg.sym_part(v)
    z = linalg.tri_solve_lower(point.b, np.eye(point.n), "left")
    x_inv = z.T @ z
    term1 = float(np.trace(d @ v @ x_inv @ v))
    term2 = float(np.trace(v @ x_inv @ v @ x_inv @ c @ x_inv))
    return term1 + term2


def strong_convexity_certificate(
    c: np.ndarray,
    d: np.ndarray,
    sample_count: int = 200,
    seed: int = 0,
) -> VerificationReport:
    """Lemma-style certificate mu = min(lambda_min(C), lambda_min(D)):
    checks the Hessian form dominates mu ||V||_X^2 on sampled (X, V)."""
    eig_c = linalg.sym_eig(c)
    eig_d = linalg.sym_eig(d)
    if eig_c.values[0] <= 0 or eig_d.values[0] <= 0:
        raise NotPositiveDefinite("certificate requires C and D positive definite")
    mu = min(eig_c.values[0], eig_d.values[0])
    rng = np.random.default_rng(seed)
    n = c.shape[0]
    worst = np.inf
    for k in range(sample_count):
        sigma = 0.1 if k % 2 == 0 else 1.0
        x = sample_spd_point(n, rng, sigma)
        v = sample_tangent(n, rng, sigma)
        lhs = hessian_quadratic_form(c, d, x, v)
        rhs = mu * inner(x, v, v)
        worst = min(worst, lhs - rhs)
    report = VerificationReport.from_residual(
        "strong-convexity", max(0.0, -worst), 1e-9,
        [{"mu": float(mu), "min_margin": float(worst), "samples": sample_count}],
    )
    return report


def lipschitz_ball_certificate(radius: float, grid_points: int = 1000) -> float:
    """Smoothness constant L = e^R + e^-R for tr(X^-1 + X) on the ball of
    radius R around the identity; verifies the eigenvalue window
    lam^2 + 1 - L lam <= 0 on a grid over [e^-R, e^R]."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    lip = np.exp(radius) + np.exp(-radius)
    lam = np.linspace(np.exp(-radius), np.exp(radius), grid_points)
    margin = lam * lam + 1.0 - lip * lam
    if margin.max() > 1e-9:
        raise AssertionError(f"eigenvalue window violated by {margin.max():.3g}")
    return float(lip)


def condition_numbers(c: np.ndarray) -> tuple[float, float]:
    """Condition numbers at the optima of the D = I pair of objectives:
    with logdet regularization kappa1 = sqrt((1+4 lmax)/(1+4 lmin)),
    without it kappa2 = sqrt(lmax/lmin)."""
    eig = linalg.sym_eig(c)
    lmin, lmax = float(eig.values[0]), float(eig.values[-1])
    if lmin <= 0:
        raise NotPositiveDefinite("condition numbers need C positive definite")
    kappa1 = float(np.sqrt((1 + 4 * lmax) / (1 + 4 * lmin)))
    kappa2 = float(np.sqrt(lmax / lmin))
    return kappa1, kappa2


def dense_step_oracle(
    spec_or_n,
    point: CholeskyPoint,
    dirs: DirectionSet,
    alpha: float,
    ledger: FlopLedger | None = None,
) -> CholeskyPoint:
    """Ground-truth update through the square-root geodesic form
    X^1/2 exp(X^-1/2 xi X^-1/2) X^1/2 with xi = -alpha sum beta G_ij,
    using only dense eigendecomposition machinery."""
    n = point.n
    if n > ORACLE_MAX_N:
        raise ValueError(f"oracle is desk-scale only (n <= {ORACLE_MAX_N})")
    e_sum = np.zeros((n, n))
    for i, j, beta in dirs.pairs():
        e_sum += beta * basis_matrix(n, i, j)
    xi = -alpha * (point.b @ e_sum @ point.b.T)
    x = point.x()
    x_half = linalg.sym_matfn(x, "sqrt", ledger)
    x_inv_half = linalg.sym_matfn(x, "inv_sqrt", ledger)
    inner_mat = linalg.sym_part(x_inv_half @ xi @ x_inv_half)
    s = linalg.sym_matfn(inner_mat, "exp", ledger)
    x_next = linalg.sym_part(x_half @ s @ x_half)
    return CholeskyPoint.from_spd(x_next, ledger)


def paper_placement_residual(i: int, j: int, theta: float, n: int = 4) -> float:
    """Residual of the transcribed index placement (u at (i,i), 1/u at
    (j,j)) against the dense exponential; recorded alongside the
    implemented convention for the record."""
    w = np.exp(-theta / SQRT2)
    u = np.sqrt(0.5 * (w + 1.0 / w))
    f = np.eye(n)
    f[i, i] = u
    f[j, j] = 1.0 / u
    f[i, j] = (w - 1.0 / w) / (2.0 * u)
    dense = linalg.sym_matfn(-theta * basis_matrix(n, i, j), "exp")
    return float(np.linalg.norm(f @ f.T - dense) / max(1.0, np.linalg.norm(dense)))


def gradient_domination_check(
    c: np.ndarray, d: np.ndarray, sample_count: int = 100, seed: int = 1
) -> VerificationReport:
    """(2/mu) ||grad^R f||_X^2 >= f(X) - f(X*) for f = tr(C X^-1 + D X),
    with X* = D^-1/2 (D^1/2 C D^1/2)^1/2 D^-1/2 solving X D X = C."""
    eig_c = linalg.sym_eig(c)
    eig_d = linalg.sym_eig(d)
    if eig_c.values[0] <= 0 or eig_d.values[0] <= 0:
        raise NotPositiveDefinite("need C, D positive definite")
    mu = min(eig_c.values[0], eig_d.values[0])
    n = c.shape[0]
    d_half = linalg.sym_matfn(d, "sqrt")
    d_inv_half = linalg.sym_matfn(d, "inv_sqrt")
    mid = linalg.sym_matfn(linalg.sym_part(d_half @ c @ d_half), "sqrt")
    x_star = linalg.sym_part(d_inv_half @ mid @ d_inv_half)
    spec = objective.ObjectiveSpec(n, [c], [d], objective.QuadLogDet(0.0))
    f_star = objective.value_at(spec, CholeskyPoint.from_spd(x_star))
    rng = np.random.default_rng(seed)
    worst = np.inf
    for k in range(sample_count):
        x = sample_spd_point(n, rng, 0.1 if k % 2 == 0 else 1.0)
        grad = riemannian_grad(x, objective.euclidean_grad(spec, x))
        lhs = (2.0 / mu) * inner(x, grad, grad)
        rhs = objective.value_at(spec, x) - f_star
        worst = min(worst, lhs - rhs)
    return VerificationReport.from_residual(
        "gradient-domination", max(0.0, -worst), 1e-9,
        [{"mu": float(mu), "min_margin": float(worst)}],
    )


def _sparse_dense_report(kind: str, cases: int, seed: int) -> VerificationReport:
    from .basis import apply_update, random_direction_set, update_factor_multi, update_factor_uni, uniform_direction
    from .rng import Xorshift

    rng = np.random.default_rng(seed)
    stream = Xorshift(seed)
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 9))
        point = sample_spd_point(n, rng, 0.5)
        if kind == "uni":
            i, j = uniform_direction(n, stream)
            beta = float(rng.uniform(-5.0, 5.0))
            dirs = DirectionSet(n, [i], [j], [beta])
            factor = update_factor_uni(n, i, j, 1.0 * beta)
        else:
            ii, jj = random_direction_set(n, stream)
            betas = rng.uniform(-5.0, 5.0, size=ii.shape[0])
            dirs = DirectionSet(n, ii, jj, betas)
            factor = update_factor_multi(dirs, 1.0)
        fast = apply_update(point, factor)
        truth = dense_step_oracle(None, point, dirs, 1.0)
        ref = truth.x()
        resid = float(np.linalg.norm(fast.x() - ref) / max(1.0, np.linalg.norm(ref)))
        worst = max(worst, resid)
    return VerificationReport.from_residual(f"sparse-dense-{kind}", worst, 1e-10)


def verify_suite(fast: bool = False) -> list:
    """The standard battery behind the `verify` CLI subcommand."""
    rng = np.random.default_rng(11)
    reports = []

    spec = objective.ObjectiveSpec(
        4,
        [linalg.sym_part(np.eye(4) + 0.2 * rng.standard_normal((4, 4)) @ np.eye(4))],
        [np.eye(4)],
        objective.QuadLogDet(-1.0),
    )
    point = sample_spd_point(4, rng, 0.5)
    reports.append(fd_directional_check(spec, point, sample_tangent(4, rng, 0.5)))

    c = _random_spd(5, rng)
    d = _random_spd(5, rng)
    reports.append(strong_convexity_certificate(c, d, 50 if fast else 200))
    reports.append(gradient_domination_check(c, d, 30 if fast else 100))
    reports.append(strong_convexity_pairs_check(c, d, 30 if fast else 100))

    grid_ok = 0.0
    for radius in (0.5, 1.0, 2.0):
        lipschitz_ball_certificate(radius)
    reports.append(VerificationReport.from_residual("lipschitz-ball-grid", grid_ok, 1e-9))

    cases = 100 if fast else 1000
    reports.append(_sparse_dense_report("uni", cases, 3))
    reports.append(_sparse_dense_report("multi", cases, 4))

    ours = []
    theirs = []
    for theta in (0.7, -1.3, 2.5):
        from .basis import apply_update, update_factor_uni

        factor = update_factor_uni(4, 2, 0, theta)
        dense = linalg.sym_matfn(-theta * basis_matrix(4, 2, 0), "exp")
        f = factor.to_dense()
        ours.append(float(np.linalg.norm(f @ f.T - dense) / max(1.0, np.linalg.norm(dense))))
        theirs.append(paper_placement_residual(2, 0, theta))
    reports.append(
        VerificationReport.from_residual(
            "factor-index-convention", max(ours), 1e-12,
            [{"implemented_max_residual": max(ours), "transposed_placement_max_residual": max(theirs)}],
        )
    )
    return reports


def _random_spd(n: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.standard_normal((n, n))
    return linalg.sym_part(m @ m.T + n * np.eye(n))


def strong_convexity_pairs_check(
    c: np.ndarray, d: np.ndarray, sample_count: int = 100, seed: int = 2
) -> VerificationReport:
    """Sampled-pairs form of mu-strong geodesic convexity,
    f(Y) >= f(X) + <grad, xi_XY>_X + (mu/2) ||xi_XY||_X^2,
    with xi_XY = B log(B^-1 Y B^-T) B^T."""
    eig_c = linalg.sym_eig(c)
    eig_d = linalg.sym_eig(d)
    mu = min(eig_c.values[0], eig_d.values[0])
    if mu <= 0:
        raise NotPositiveDefinite("need C, D positive definite")
    n = c.shape[0]
    spec = objective.ObjectiveSpec(n, [c], [d], objective.QuadLogDet(0.0))
    rng = np.random.default_rng(seed)
    worst = np.inf
    for k in range(sample_count):
        sigma = 0.1 if k % 2 == 0 else 1.0
        x = sample_spd_point(n, rng, sigma)
        y = sample_spd_point(n, rng, sigma)
        xi = log_map(x, y)
        grad = riemannian_grad(x, objective.euclidean_grad(spec, x))
        lhs = objective.value_at(spec, y)
        rhs = (
            objective.value_at(spec, x)
            + inner(x, grad, xi)
            + 0.5 * mu * inner(x, xi, xi)
        )
        worst = min(worst, lhs - rhs)
    return VerificationReport.from_residual(
        "strong-convexity-pairs", max(0.0, -worst), 1e-7,
        [{"mu": float(mu), "min_margin": float(worst)}],
    )
