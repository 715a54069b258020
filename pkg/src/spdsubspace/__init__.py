"""Riemannian subspace descent on the SPD manifold via sparse updates of
Cholesky factors."""

from .backend import BACKEND
from .basis import (
    DirectionSet,
    UpdateFactor,
    apply_update,
    beta_from_F,
    greedy_direction_set,
    invert_update_factor,
    random_direction_set,
    update_factor_multi,
    update_factor_uni,
)
from .ledger import FlopLedger
from .linalg import EigenDecomposition, cholesky, sym_eig, sym_matfn, tri_solve_lower
from .manifold import CholeskyPoint, distance, exp_map, inner, log_map, riemannian_grad
from .objective import (
    LogDetComposite,
    ObjectiveSpec,
    ObjectiveState,
    QuadLogDet,
    advance_state,
    beta_coeff,
    euclidean_grad,
    init_state,
    lower_F,
    value,
)
from .oracle import condition_numbers, dense_step_oracle, lipschitz_ball_certificate
from .problems import ProblemInstance, closed_form_optimum, gen_problem
from .rng import Xorshift
from .solvers import RunRecord, SolverConfig, run

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CholeskyPoint",
    "DirectionSet",
    "EigenDecomposition",
    "FlopLedger",
    "LogDetComposite",
    "ObjectiveSpec",
    "ObjectiveState",
    "ProblemInstance",
    "QuadLogDet",
    "RunRecord",
    "SolverConfig",
    "UpdateFactor",
    "Xorshift",
    "advance_state",
    "apply_update",
    "beta_coeff",
    "beta_from_F",
    "cholesky",
    "closed_form_optimum",
    "condition_numbers",
    "dense_step_oracle",
    "distance",
    "euclidean_grad",
    "exp_map",
    "gen_problem",
    "greedy_direction_set",
    "init_state",
    "inner",
    "invert_update_factor",
    "lipschitz_ball_certificate",
    "log_map",
    "lower_F",
    "random_direction_set",
    "riemannian_grad",
    "run",
    "sym_eig",
    "sym_matfn",
    "tri_solve_lower",
    "update_factor_multi",
    "update_factor_uni",
    "value",
]
