"""KKT residuals, the merit function phi, the error measure E and delta-mu."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .relaxation import RelaxationPair, eval_pair


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class PointEval:
    """All first-order problem data at one primal point."""

    x: np.ndarray
    f: float
    grad_f: np.ndarray
    h: np.ndarray
    jac_h: np.ndarray
    g: np.ndarray
    jac_g: np.ndarray


def evaluate_point(problem, x) -> PointEval:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise DimensionError(f"x has shape {x.shape}, problem has n={problem.n}")
    return PointEval(
        x=x,
        f=float(problem.eval_f(x)),
        grad_f=np.asarray(problem.eval_grad_f(x), dtype=float),
        h=np.asarray(problem.eval_h(x), dtype=float).reshape(problem.m),
        jac_h=np.asarray(problem.eval_jac_h(x), dtype=float).reshape(problem.n, problem.m),
        g=np.asarray(problem.eval_g(x), dtype=float).reshape(problem.m_ineq),
        jac_g=np.asarray(problem.eval_jac_g(x), dtype=float).reshape(problem.n, problem.m_ineq),
    )


@dataclass(frozen=True)
class ResidualBundle:
    r_dual: np.ndarray
    r_eq: np.ndarray
    r_relax: np.ndarray
    phi: float


@dataclass(frozen=True)
class KktError:
    e_dual: float
    e_feas_eq: float
    e_feas_ineq: float
    e_comp: float

    @property
    def value(self) -> float:
        return max(self.e_dual, self.e_feas_eq, self.e_feas_ineq, self.e_comp)


def _norm_inf(v) -> float:
    return float(np.max(np.abs(v))) if np.size(v) else 0.0


def _check_duals(point: PointEval, lam, s):
    lam = np.asarray(lam, dtype=float).reshape(-1)
    s = np.asarray(s, dtype=float).reshape(-1)
    if lam.size != point.h.size:
        raise DimensionError(f"lambda has length {lam.size}, expected {point.h.size}")
    if s.size != point.g.size:
        raise DimensionError(f"s has length {s.size}, expected {point.g.size}")
    return lam, s


def dual_residual(point: PointEval, lam, s) -> np.ndarray:
    return point.grad_f - point.jac_h @ lam - point.jac_g @ s


def residuals_at(point: PointEval, lam, s, pair: RelaxationPair) -> ResidualBundle:
    lam, s = _check_duals(point, lam, s)
    if pair.z.shape != point.g.shape:
        raise DimensionError("relaxation pair does not match the inequality count")
    r_dual = dual_residual(point, lam, s)
    r_eq = point.h.copy()
    r_relax = pair.z - point.g
    phi = 0.5 * (r_dual @ r_dual + r_eq @ r_eq + r_relax @ r_relax)
    return ResidualBundle(r_dual=r_dual, r_eq=r_eq, r_relax=r_relax, phi=float(phi))


def kkt_error_at(point: PointEval, lam, s) -> KktError:
    lam, s = _check_duals(point, lam, s)
    return KktError(
        e_dual=_norm_inf(dual_residual(point, lam, s)),
        e_feas_eq=_norm_inf(point.h),
        e_feas_ineq=_norm_inf(np.maximum(-(point.g + s), 0.0)),
        e_comp=_norm_inf(point.g * s),
    )


def kkt_residuals(problem, x, lam, s, pair: RelaxationPair) -> ResidualBundle:
    """Residual vectors and phi; ``pair`` must be built from (g(x), s, mu, rho)."""
    return residuals_at(evaluate_point(problem, x), lam, s, pair)


def merit_phi(problem, x, lam, s, mu: float, rho: float) -> float:
    point = evaluate_point(problem, x)
    pair = eval_pair(point.g, np.asarray(s, dtype=float).reshape(-1), mu, rho)
    return residuals_at(point, lam, s, pair).phi


def error_E(problem, x, lam, s) -> KktError:
    """Infinity-norm KKT error of the original problem (no scaling)."""
    return kkt_error_at(evaluate_point(problem, x), lam, s)


def delta_mu(mu: float, gamma: float, phi: float) -> float:
    if not 0.0 < gamma <= 1.0:
        raise ValueError(f"gamma must lie in (0, 1], got {gamma!r}")
    return -mu + gamma * phi
