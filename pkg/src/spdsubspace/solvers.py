"""Step functions and run loops.

Algorithms:

    rgd         full Riemannian gradient step, O(n^3) per iteration
    rrsd_uni    one uniformly random basis direction, O(n)
    rrsd_multi  permutation-sampled non-overlapping set, O(n^2)
    rgsd_uni    steepest single direction (argmax |beta|), O(n^2)
    rgsd_multi  greedy non-overlapping set from sorted |F|, O(n^2 log n)
    rsgd        per-sample dense stochastic step (finite sums), O(n^3)

Every step charges the flop ledger through the kernels it calls and bumps
the direction / F-entry counters the benchmark metrics are built on.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import objective
from .basis import (
    DirectionSet,
    apply_update,
    beta_from_F,
    greedy_direction_set,
    random_direction_set,
    tril_pairs,
    uniform_direction,
    update_factor_multi,
    update_factor_uni,
)
from .errors import ConfigError, Overflow
from .ledger import FlopLedger
from .manifold import CholeskyPoint, exp_whitened
from .objective import ObjectiveSpec, ObjectiveState
from .rng import Xorshift

ALGORITHMS = ("rgd", "rrsd_uni", "rrsd_multi", "rgsd_uni", "rgsd_multi", "rsgd")

DIVERGENCE_FACTOR = 1e3


@dataclass
class SolverConfig:
    algo: str
    alpha: float
    max_iters: int
    tol: float = 0.0
    seed: int = 0
    check_every: int = 100

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algo!r}; choose from {ALGORITHMS}")
        if not self.alpha > 0:
            raise ConfigError("alpha must be positive")
        if self.max_iters < 0:
            raise ConfigError("max_iters must be >= 0")
        if self.check_every < 1:
            raise ConfigError("check_every must be >= 1")


@dataclass
class Counters:
    directions: int = 0
    f_entries: int = 0

    def bump(self, directions: int, f_entries: int) -> None:
        self.directions += directions
        self.f_entries += f_entries


@dataclass
class RunRecord:
    """Per-iteration metric ledger of one run."""

    algo: str
    n: int
    seed: int
    alpha: float
    f_star: float | None
    d0: float | None
    iters: list = field(default_factory=list)
    f_values: list = field(default_factory=list)
    gaps: list = field(default_factory=list)
    cum_directions: list = field(default_factory=list)
    cum_f_entries: list = field(default_factory=list)
    cum_flops: list = field(default_factory=list)
    elapsed_ns: list = field(default_factory=list)
    status: str = "max_iters"
    message: str = ""
    final_point: CholeskyPoint | None = None

    def append(self, it, f, counters: Counters, ledger: FlopLedger, t0_ns: int) -> None:
        self.iters.append(it)
        self.f_values.append(f)
        self.gaps.append(None if self.f_star is None else f - self.f_star)
        self.cum_directions.append(counters.directions)
        self.cum_f_entries.append(counters.f_entries)
        self.cum_flops.append(ledger.count)
        self.elapsed_ns.append(time.perf_counter_ns() - t0_ns)

    @property
    def rows(self) -> int:
        return len(self.iters)


def _pairs_count(n: int) -> int:
    return n * (n + 1) // 2


def rrsd_uni_step(
    spec: ObjectiveSpec,
    point: CholeskyPoint,
    state: ObjectiveState,
    alpha: float,
    rng: Xorshift,
    ledger: FlopLedger | None = None,
    counters: Counters | None = None,
):
    """One uniformly random direction; O(n) for objectives in the class."""
    i, j = uniform_direction(spec.n, rng)
    beta = objective.beta_coeff(spec, state, i, j, ledger)
    f = update_factor_uni(spec.n, i, j, alpha * beta, ledger)
    point = apply_update(point, f, ledger)
    objective.advance_state(state, f, ledger)
    if counters is not None:
        counters.bump(1, 1)
    return point, state


def rrsd_multi_step(
    spec: ObjectiveSpec,
    point: CholeskyPoint,
    state: ObjectiveState,
    alpha: float,
    rng: Xorshift,
    ledger: FlopLedger | None = None,
    counters: Counters | None = None,
):
    """Permutation-sampled non-overlapping direction set."""
    ii, jj = random_direction_set(spec.n, rng)
    betas = objective.betas_for(spec, state, ii, jj, ledger)
    dirs = DirectionSet(spec.n, ii, jj, betas)
    f = update_factor_multi(dirs, alpha, ledger)
    point = apply_update(point, f, ledger)
    objective.advance_state(state, f, ledger)
    if counters is not None:
        counters.bump(len(dirs), len(dirs))
    return point, state


def rgsd_uni_step(
    spec: ObjectiveSpec,
    point: CholeskyPoint,
    state: ObjectiveState,
    alpha: float,
    ledger: FlopLedger | None = None,
    counters: Counters | None = None,
):
    """Steepest single direction: argmax |beta| over the full table (ties
    broken by lexicographic (i, j))."""
    table = objective.lower_F(spec, state, ledger)
    ii, jj = tril_pairs(spec.n)
    absbeta = np.abs(table[ii, jj]) * np.where(ii == jj, 1.0, np.sqrt(2.0))
    best = int(np.argmax(absbeta))
    i, j = int(ii[best]), int(jj[best])
    beta = beta_from_F(table[i, j], i, j)
    f = update_factor_uni(spec.n, i, j, alpha * beta, ledger)
    point = apply_update(point, f, ledger)
    objective.advance_state(state, f, ledger)
    if counters is not None:
        counters.bump(1, _pairs_count(spec.n))
    return point, state


def rgsd_multi_step(
    spec: ObjectiveSpec,
    point: CholeskyPoint,
    state: ObjectiveState,
    alpha: float,
    ledger: FlopLedger | None = None,
    counters: Counters | None = None,
):
    """Greedy non-overlapping set scanned from the sorted |F| table."""
    table = objective.lower_F(spec, state, ledger)
    ii, jj = greedy_direction_set(table)
    betas = np.where(ii == jj, 1.0, np.sqrt(2.0)) * table[ii, jj]
    dirs = DirectionSet(spec.n, ii, jj, betas)
    f = update_factor_multi(dirs, alpha, ledger)
    point = apply_update(point, f, ledger)
    objective.advance_state(state, f, ledger)
    if counters is not None:
        counters.bump(len(dirs), _pairs_count(spec.n))
    return point, state


def rgd_step(
    spec: ObjectiveSpec,
    point: CholeskyPoint,
    alpha: float,
    ledger: FlopLedger | None = None,
    counters: Counters | None = None,
) -> CholeskyPoint:
    """Full gradient step B exp(-alpha B^-1 grad^R f B^-T) B^T."""
    new_point, _ = _rgd_iteration(spec, point, alpha, ledger, counters)
    return new_point


def _rgd_iteration(spec, point, alpha, ledger, counters):
    state = objective.init_state(spec, point, ledger)
    f_here = objective.value(spec, state)
    fw = objective.lower_F(spec, state, ledger)
    new_point = exp_whitened(point, -alpha * fw, ledger)
    if counters is not None:
        counters.bump(_pairs_count(spec.n), _pairs_count(spec.n))
    return new_point, f_here


def rsgd_step(
    spec: ObjectiveSpec,
    point: CholeskyPoint,
    alpha: float,
    rng: Xorshift,
    ledger: FlopLedger | None = None,
    counters: Counters | None = None,
) -> CholeskyPoint:
    """Dense per-sample stochastic step with the S-scaled gradient."""
    if spec.s is None:
        raise ConfigError("rsgd needs a finite-sum objective (spec.s set)")
    s = rng.randbelow(spec.s)
    fw = objective.whitened_grad(objective.sample_spec(spec, s), point, ledger)
    new_point = exp_whitened(point, -alpha * spec.s * fw, ledger)
    if counters is not None:
        counters.bump(_pairs_count(spec.n), _pairs_count(spec.n))
    return new_point


def grad_norm_sq(spec: ObjectiveSpec, state: ObjectiveState, ledger=None) -> float:
    """||grad^R f||_X^2 = sum over j <= i of beta_ij^2 = ||F||_F^2."""
    f = objective.lower_F(spec, state, ledger)
    return float(np.sum(f * f))


def run(
    spec: ObjectiveSpec,
    config: SolverConfig,
    x0: CholeskyPoint,
    f_star: float | None = None,
) -> RunRecord:
    """Iterate the configured algorithm from x0.

    Stops at max_iters; or, when f_star is known and tol > 0, at
    gap <= tol; otherwise (tol > 0) when the squared gradient norm drops
    to tol, checked every `check_every` iterations and charged to the
    ledger.  A value explosion or an Overflow from a step ends the run
    with a diagnostic 'diverged' record instead of raising."""
    ledger = FlopLedger()
    counters = Counters()
    rng = Xorshift(config.seed)
    t0 = time.perf_counter_ns()
    point = x0.copy()
    rec = RunRecord(config.algo, spec.n, config.seed, config.alpha, f_star, None)

    stateful = config.algo in ("rrsd_uni", "rrsd_multi", "rgsd_uni", "rgsd_multi")
    state = objective.init_state(spec, point, ledger) if stateful else None
    f0 = (
        objective.value(spec, state)
        if stateful
        else objective.value_at(spec, point)
    )
    rec.d0 = None if f_star is None else f0 - f_star
    divergence_cap = f0 + DIVERGENCE_FACTOR * max(
        1.0, abs(f0), 0.0 if rec.d0 is None else rec.d0
    )
    rec.append(0, f0, counters, ledger, t0)

    f_here = f0
    try:
        for it in range(1, config.max_iters + 1):
            if config.algo == "rrsd_uni":
                point, state = rrsd_uni_step(spec, point, state, config.alpha, rng, ledger, counters)
                f_here = objective.value(spec, state)
            elif config.algo == "rrsd_multi":
                point, state = rrsd_multi_step(spec, point, state, config.alpha, rng, ledger, counters)
                f_here = objective.value(spec, state)
            elif config.algo == "rgsd_uni":
                point, state = rgsd_uni_step(spec, point, state, config.alpha, ledger, counters)
                f_here = objective.value(spec, state)
            elif config.algo == "rgsd_multi":
                point, state = rgsd_multi_step(spec, point, state, config.alpha, ledger, counters)
                f_here = objective.value(spec, state)
            elif config.algo == "rgd":
                point, _ = _rgd_iteration(spec, point, config.alpha, ledger, counters)
                f_here = objective.value_at(spec, point)
            else:
                point = rsgd_step(spec, point, config.alpha, rng, ledger, counters)
                f_here = objective.value_at(spec, point)

            if state is not None and state.advances % objective.LOGDET_REFRESH_EVERY == 0:
                objective.refresh_logdet(state, point)
            rec.append(it, f_here, counters, ledger, t0)

            if not np.isfinite(f_here) or f_here > divergence_cap:
                rec.status = "diverged"
                rec.message = f"value {f_here:.6g} exploded at iteration {it}"
                break
            if f_star is not None and config.tol > 0 and f_here - f_star <= config.tol:
                rec.status = "converged"
                break
            if (
                f_star is None
                and config.tol > 0
                and stateful
                and it % config.check_every == 0
                and grad_norm_sq(spec, state, ledger) <= config.tol
            ):
                rec.status = "converged"
                break
    except Overflow as exc:
        rec.status = "diverged"
        rec.message = f"overflow at iteration {len(rec.iters)}: {exc}"

    rec.final_point = point
    return rec
