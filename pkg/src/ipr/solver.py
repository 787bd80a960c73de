"""Primal-dual interior-point relaxation loop with an adaptive barrier.

mu enters the Newton system as an unknown (target mu + gamma*phi = 0) and
is reduced every iteration; iterates need not be interior.  The merit is
phi = 1/2 ||(r_dual, r_eq, z - g)||^2 with (z, y) the relaxation pair.
"""
from __future__ import annotations

import enum
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional

import numpy as np

from .newton import (
    DegenerateSystemError,
    Direction,
    HessianRegularizationError,
    KktSystem,
    assemble_system,
    lp_reduced_direction,
    regularize_hessian,
    solve_direction,
)
from .relaxation import RelaxationPair, eval_pair
from .residuals import (
    KktError,
    PointEval,
    ResidualBundle,
    delta_mu,
    evaluate_point,
    kkt_error_at,
    residuals_at,
)

logger = logging.getLogger(__name__)


class Status(str, enum.Enum):
    KKT_SOLVED = "kkt_solved"
    MAX_ITERS = "max_iters"
    SMALL_STEP = "small_step"
    DEGENERATE_KKT = "degenerate_kkt"
    GUARD_CONVERGED = "guard_converged"


class SmallStepError(RuntimeError):
    pass


class GuardLoopError(RuntimeError):
    """Barrier guard hit its loop cap while phi was still above eps."""


@dataclass(frozen=True)
class SolverConfig:
    mu0: float = 0.1
    rho0: float = 1.0
    eta: float = 10.0
    gamma0: float = 0.001
    delta: float = 0.5
    tau: float = 0.01
    sigma: float = 0.01
    eps: float = 1e-8
    max_iters: int = 500
    min_step_power: int = 40
    guard_max_loops: int = 200

    def __post_init__(self):
        checks = [
            (self.mu0 > 0, "mu0 must be positive"),
            (self.rho0 > 0, "rho0 must be positive"),
            (self.eta > 1, "eta must exceed 1"),
            (0 < self.gamma0 < 1, "gamma0 must lie in (0, 1)"),
            (0 < self.delta < 1, "delta must lie in (0, 1)"),
            (0 < self.tau < 1, "tau must lie in (0, 1)"),
            (0 < self.sigma < 1, "sigma must lie in (0, 1)"),
            (0 < self.eps < self.mu0, "eps must lie in (0, mu0)"),
            (self.max_iters >= 0, "max_iters must be nonnegative"),
            (self.min_step_power >= 0, "min_step_power must be nonnegative"),
            (self.guard_max_loops >= 1, "guard_max_loops must be at least 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(msg)

    @property
    def mu_floor(self) -> float:
        return self.gamma0 / self.eta * self.eps


@dataclass
class Iterate:
    point: PointEval
    lam: np.ndarray
    s: np.ndarray
    mu: float
    rho: float
    pair: RelaxationPair
    residuals: ResidualBundle
    error: KktError
    gamma: float = 0.0
    k: int = 0

    @property
    def x(self) -> np.ndarray:
        return self.point.x

    @property
    def phi(self) -> float:
        return self.residuals.phi


@dataclass
class TraceRow:
    k: int
    mu: float
    x: List[float]
    s: List[float]
    f: float
    v: float
    phi: float
    E: float
    lam: List[float] = field(default_factory=list)
    rho: float = 1.0
    gamma: float = 0.0
    guard_loops: int = 0
    d_mu: Optional[float] = None
    alpha: Optional[float] = None
    xi: Optional[float] = None
    # phi at the accepted trial point, before the rho update and guard
    phi_trial: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Counters:
    iterations: int = 0
    f_evals: int = 0
    grad_evals: int = 0
    hess_evals: int = 0
    wall_time: float = 0.0


@dataclass
class SolveReport:
    status: Status
    trace: List[TraceRow]
    counters: Counters
    x: np.ndarray
    lam: np.ndarray
    s: np.ndarray
    message: str = ""

    @property
    def success(self) -> bool:
        return self.status in (Status.KKT_SOLVED, Status.GUARD_CONVERGED)

    @property
    def final(self) -> TraceRow:
        return self.trace[-1]


class _Evaluator:
    """Counts problem callback invocations; reuses the last point."""

    def __init__(self, problem, counters: Counters):
        self.problem = problem
        self.counters = counters
        self._last: Optional[PointEval] = None

    def point(self, x) -> PointEval:
        x = np.asarray(x, dtype=float)
        if self._last is not None and np.array_equal(self._last.x, x):
            return self._last
        pt = evaluate_point(self.problem, x.copy())
        self.counters.f_evals += 1
        self.counters.grad_evals += 1
        self._last = pt
        return pt

    def hessian(self, x, lam, s) -> np.ndarray:
        self.counters.hess_evals += 1
        return np.asarray(self.problem.eval_hess_lagrangian(x, lam, s), dtype=float)


def make_iterate(point: PointEval, lam, s, mu: float, rho: float, k: int = 0) -> Iterate:
    pair = eval_pair(point.g, s, mu, rho)
    res = residuals_at(point, lam, s, pair)
    return Iterate(
        point=point, lam=np.asarray(lam, dtype=float), s=np.asarray(s, dtype=float),
        mu=float(mu), rho=float(rho), pair=pair, residuals=res,
        error=kkt_error_at(point, lam, s), k=k,
    )


def barrier_guard(phi_eval: Callable, mu: float, cfg: SolverConfig):
    """Divide mu by eta while mu > max(eta*phi(mu), eps).

    ``phi_eval(mu)`` returns ``(state, phi)`` recomputed at the trial mu.
    Returns ``(mu, state, phi, loops)``.  Reaching ``guard_max_loops``
    returns normally only when phi <= eps.
    """
    state, phi = phi_eval(mu)
    loops = 0
    while mu > max(cfg.eta * phi, cfg.eps):
        if loops >= cfg.guard_max_loops:
            if phi <= cfg.eps:
                break
            raise GuardLoopError(f"barrier guard exceeded {cfg.guard_max_loops} loops (phi={phi:.3e})")
        mu = mu / cfg.eta
        state, phi = phi_eval(mu)
        loops += 1
    return mu, state, phi, loops


def select_gamma(cfg: SolverConfig, mu: float, phi: float) -> float:
    if phi <= 0.0:
        return cfg.gamma0
    return min(cfg.gamma0, mu / phi)


def update_rho(rho: float, x, s, cfg: SolverConfig) -> float:
    s_inf = float(np.max(np.abs(s))) if np.size(s) else 0.0
    return max(rho, cfg.sigma * s_inf / max(float(np.linalg.norm(x)), 1.0))


def _trial(ev: _Evaluator, it: Iterate, d: Direction, alpha: float) -> Iterate:
    pt = ev.point(it.x + alpha * d.d_x)
    return make_iterate(
        pt, it.lam + alpha * d.d_lambda, it.s + alpha * d.d_s, it.mu + alpha * d.d_mu, it.rho, it.k
    )


def line_search(problem, it: Iterate, d_mu: float, d: Direction, cfg: SolverConfig, evaluator=None) -> float:
    """Largest alpha in {1, delta, delta**2, ...} meeting the merit decrease
    phi(trial) <= (1 - 2*tau*alpha) * phi(it), rho fixed.

    Raises SmallStepError when no alpha >= delta**min_step_power qualifies.
    """
    ev = evaluator if evaluator is not None else _Evaluator(problem, Counters())
    if d.d_mu != d_mu:
        d = Direction(d_mu=d_mu, d_x=d.d_x, d_lambda=d.d_lambda, d_s=d.d_s)
    phi0 = it.phi
    alpha = 1.0
    for _ in range(cfg.min_step_power + 1):
        trial = _trial(ev, it, d, alpha)
        if np.isfinite(trial.phi) and trial.phi <= (1.0 - 2.0 * cfg.tau * alpha) * phi0:
            return alpha
        alpha *= cfg.delta
    raise SmallStepError(f"no acceptable step down to alpha = delta**{cfg.min_step_power}")


def default_multipliers(problem, x0, s0) -> np.ndarray:
    """Least-squares lambda for jac_h lam = grad_f - jac_g s0 (zeros if rank deficient)."""
    if problem.m == 0:
        return np.zeros(0)
    pt = evaluate_point(problem, x0)
    target = pt.grad_f - pt.jac_g @ s0
    lam, _, rank, _ = np.linalg.lstsq(pt.jac_h, target, rcond=None)
    if rank < problem.m:
        return np.zeros(problem.m)
    return lam


def _row(it: Iterate, loops: int) -> TraceRow:
    g, h = it.point.g, it.point.h
    viol = max(
        float(np.max(np.maximum(-g, 0.0))) if g.size else 0.0,
        float(np.max(np.abs(h))) if h.size else 0.0,
    )
    return TraceRow(
        k=it.k, mu=it.mu, x=it.x.tolist(), s=it.s.tolist(), f=it.point.f, v=viol,
        phi=it.phi, E=it.error.value, lam=it.lam.tolist(), rho=it.rho, gamma=it.gamma,
        guard_loops=loops,
    )


def solve(
    problem,
    x0=None,
    lam0=None,
    s0=None,
    cfg: Optional[SolverConfig] = None,
    lp_reduced: bool = False,
    callback: Optional[Callable] = None,
) -> SolveReport:
    """Run the relaxation method from an arbitrary (x0, lam0, s0).

    Stops with ``kkt_solved`` once mu <= eps, phi <= eps and E <= eps hold
    together.  ``callback(iterate, direction, system)`` is invoked after
    each line search; ``system`` is None on the reduced LP path.
    """
    cfg = cfg or SolverConfig()
    if lp_reduced and not problem.is_lp:
        raise ValueError(f"problem {problem.name!r} is not a standard-form LP")
    counters = Counters()
    ev = _Evaluator(problem, counters)
    t0 = time.perf_counter()

    x = problem.initial_point() if x0 is None else np.asarray(x0, dtype=float)
    s = np.ones(problem.m_ineq) if s0 is None else np.asarray(s0, dtype=float)
    lam = default_multipliers(problem, x, s) if lam0 is None else np.asarray(lam0, dtype=float)
    if lam.shape != (problem.m,) or s.shape != (problem.m_ineq,) or x.shape != (problem.n,):
        raise ValueError("starting point dimensions do not match the problem")

    def guarded(point, lam, s, mu, rho, k):
        def phi_eval(trial_mu):
            cand = make_iterate(point, lam, s, trial_mu, rho, k)
            return cand, cand.phi

        mu, it, phi, loops = barrier_guard(phi_eval, mu, cfg)
        it.gamma = select_gamma(cfg, it.mu, it.phi)
        return it, loops, loops >= cfg.guard_max_loops

    it, loops, capped = guarded(ev.point(x), lam, s, cfg.mu0, cfg.rho0, 0)
    trace = [_row(it, loops)]
    status, message = None, ""

    while True:
        if capped:
            status = Status.GUARD_CONVERGED
            break
        if it.mu <= cfg.eps and it.phi <= cfg.eps and it.error.value <= cfg.eps:
            status = Status.KKT_SOLVED
            break
        if it.k >= cfg.max_iters:
            status = Status.MAX_ITERS
            break
        # gamma <= mu/phi makes d_mu <= 0; gamma = mu/phi can round to +1 ulp
        dmu = min(delta_mu(it.mu, it.gamma, it.phi), 0.0)
        system: Optional[KktSystem] = None
        try:
            if lp_reduced:
                lp = problem.lp
                direction = lp_reduced_direction(lp.A, lp.b, lp.c, it, dmu)
                trace[-1].xi = 0.0
            else:
                B, xi = regularize_hessian(ev.hessian(it.x, it.lam, it.s))
                system = assemble_system(problem, it, dmu, B=B)
                system = KktSystem(system.matrix, system.rhs, system.block_dims, dmu, xi)
                direction = solve_direction(system)
                trace[-1].xi = xi
        except (DegenerateSystemError, HessianRegularizationError) as exc:
            status, message = Status.DEGENERATE_KKT, str(exc)
            break
        try:
            alpha = line_search(problem, it, dmu, direction, cfg, evaluator=ev)
        except SmallStepError as exc:
            status, message = Status.SMALL_STEP, str(exc)
            break
        direction.alpha = alpha
        if callback is not None:
            callback(it, direction, system)
        trial = _trial(ev, it, direction, alpha)
        row = trace[-1]
        row.d_mu, row.alpha, row.phi_trial = dmu, alpha, trial.phi
        rho = update_rho(it.rho, trial.x, trial.s, cfg)
        logger.debug("k=%d mu=%.3e phi=%.3e E=%.3e alpha=%.3g", it.k, it.mu, it.phi, it.error.value, alpha)
        it, loops, capped = guarded(trial.point, trial.lam, trial.s, trial.mu, rho, it.k + 1)
        trace.append(_row(it, loops))

    counters.iterations = it.k
    counters.wall_time = time.perf_counter() - t0
    return SolveReport(
        status=status, trace=trace, counters=counters, x=it.x.copy(), lam=it.lam.copy(),
        s=it.s.copy(), message=message,
    )
