"""Newton system for the extended KKT system, Hessian regularization, LP path.

Unknowns are ordered (d_x, d_lambda, d_s).  With D = (Z + Y)^-1::

    [ B           -jac_h   -jac_g        ] [d_x]   [ -r_dual                  ]
    [ jac_h'       0        0            ] [d_l] = [ -r_eq                    ]
    [ D Y jac_g'   0        D Z / rho    ] [d_s]   [ r_relax + d_mu/rho * D e ]

where B is the (regularized) Hessian of f - lam'h - s'g.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.linalg
from scipy.linalg import lapack

logger = logging.getLogger(__name__)

RCOND_MIN = 1e-14
PIVOT_TOL = 1e-12


class DegenerateSystemError(RuntimeError):
    """The Newton matrix is singular or numerically degenerate."""


class HessianRegularizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class KktSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    block_dims: Tuple[int, int, int]
    d_mu: float = 0.0
    xi: float = 0.0


@dataclass
class Direction:
    d_mu: float
    d_x: np.ndarray
    d_lambda: np.ndarray
    d_s: np.ndarray
    alpha: Optional[float] = None

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.d_x, self.d_lambda, self.d_s])


def is_psd(B: np.ndarray, tol: float = PIVOT_TOL) -> bool:
    """Positive-semidefiniteness via LDL' with diagonal pivoting.

    A pivot below ``-tol*scale`` rejects.  Once every remaining diagonal is
    within ``tol*scale`` of zero the trailing block must vanish to that
    tolerance, since |a_ij| <= sqrt(a_ii a_jj) for PSD matrices.
    """
    S = np.array(B, dtype=float)
    n = S.shape[0]
    thresh = tol * max(1.0, float(np.max(np.abs(S))) if n else 1.0)
    for k in range(n):
        d = np.diag(S)[k:]
        p = k + int(np.argmax(d))
        if S[p, p] < -thresh:
            return False
        if S[p, p] <= thresh:
            tail = S[k:, k:]
            return bool(np.min(np.diag(tail)) >= -thresh and np.max(np.abs(tail)) <= thresh)
        if p != k:
            S[[k, p], :] = S[[p, k], :]
            S[:, [k, p]] = S[:, [p, k]]
        piv = S[k, k]
        col = S[k + 1 :, k].copy()
        S[k + 1 :, k + 1 :] -= np.outer(col, col) / piv
    return True


def regularize_hessian(B, bisect_steps: int = 60) -> Tuple[np.ndarray, float]:
    """Return (B + xi*I, xi) with xi >= 0 as small as the PSD test allows.

    xi is bracketed on the grid xi0*2**i (xi0 = 1e-8*max(1, ||B||_inf)) and
    then refined by bisection inside the bracket.
    """
    B = np.asarray(B, dtype=float)
    if not np.all(np.isfinite(B)):
        raise HessianRegularizationError("Hessian has non-finite entries")
    B = 0.5 * (B + B.T)
    if is_psd(B):
        return B, 0.0
    n = B.shape[0]
    eye = np.eye(n)
    xi0 = 1e-8 * max(1.0, float(np.max(np.sum(np.abs(B), axis=1))))
    lo, hi = 0.0, xi0
    while not is_psd(B + hi * eye):
        lo, hi = hi, 2.0 * hi
        if hi > 1e16 * xi0:
            raise HessianRegularizationError("Hessian shift exceeded 1e16 * xi0")
    for _ in range(bisect_steps):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if is_psd(B + mid * eye):
            hi = mid
        else:
            lo = mid
    return B + hi * eye, hi


def assemble_system(problem, it, d_mu: float, B: Optional[np.ndarray] = None) -> KktSystem:
    """Build the Newton matrix and right-hand side at iterate ``it``.

    ``it`` needs ``point`` (a PointEval), ``lam``, ``s``, ``mu``, ``rho``,
    ``pair`` and ``residuals``.  Without ``B`` the exact Lagrangian Hessian
    is evaluated and regularized.
    """
    if not it.mu > 0:
        raise DegenerateSystemError("relaxation block is singular at mu = 0")
    n, m, mi = problem.n, problem.m, problem.m_ineq
    xi = 0.0
    if B is None:
        B, xi = regularize_hessian(problem.eval_hess_lagrangian(it.point.x, it.lam, it.s))
    z, y, rho = it.pair.z, it.pair.y, it.rho
    dinv = 1.0 / (z + y)
    N = n + m + mi
    K = np.zeros((N, N))
    K[:n, :n] = B
    K[:n, n : n + m] = -it.point.jac_h
    K[:n, n + m :] = -it.point.jac_g
    K[n : n + m, :n] = it.point.jac_h.T
    K[n + m :, :n] = (dinv * y)[:, None] * it.point.jac_g.T
    K[n + m :, n + m :] = np.diag(dinv * z / rho)
    res = it.residuals
    rhs = np.concatenate([-res.r_dual, -res.r_eq, res.r_relax + (d_mu / rho) * dinv])
    return KktSystem(matrix=K, rhs=rhs, block_dims=(n, m, mi), d_mu=float(d_mu), xi=xi)


def _residual_ok(K, d, rhs) -> bool:
    r = K @ d - rhs
    return float(np.max(np.abs(r), initial=0.0)) <= 1e-10 * (1.0 + float(np.max(np.abs(rhs), initial=0.0)))


def solve_direction(system: KktSystem) -> Direction:
    """Dense LU solve with a condition check and one refinement step."""
    K, rhs = system.matrix, system.rhs
    n, m, mi = system.block_dims
    if not (np.all(np.isfinite(K)) and np.all(np.isfinite(rhs))):
        raise DegenerateSystemError("non-finite entries in the Newton system")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(K, check_finite=False)
    if np.any(np.diag(lu) == 0.0):
        raise DegenerateSystemError("LU factorization broke down (zero pivot)")
    rcond, info = lapack.dgecon(lu, np.linalg.norm(K, 1), norm="1")
    if info != 0 or rcond < RCOND_MIN:
        raise DegenerateSystemError(f"Newton matrix is degenerate (rcond={rcond:.3e})")
    d = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
    if not _residual_ok(K, d, rhs):
        d = d + scipy.linalg.lu_solve((lu, piv), rhs - K @ d, check_finite=False)
        if not _residual_ok(K, d, rhs):
            raise DegenerateSystemError("Newton solve residual check failed")
    return Direction(d_mu=system.d_mu, d_x=d[:n], d_lambda=d[n : n + m], d_s=d[n + m :])


def _normal_factor(A, z2):
    M = (A * z2) @ A.T
    try:
        cf = scipy.linalg.cho_factor(M, check_finite=False)
    except np.linalg.LinAlgError:
        raise DegenerateSystemError("normal matrix A Z^2 A' is rank deficient") from None
    if M.shape[0]:
        rcond, info = lapack.dpocon(cf[0], np.linalg.norm(M, 1), uplo="L" if cf[1] else "U")
        if info != 0 or rcond < RCOND_MIN:
            raise DegenerateSystemError(f"normal matrix is degenerate (rcond={rcond:.3e})")
    return cf


def _lp_block_solve(A, cf, z, mu, p, q, t):
    """Solve A'dl + ds = p, A dx = q, rho*Y dx + Z ds = t with rho*Y = mu/Z."""
    z2 = z * z
    d_lam = scipy.linalg.cho_solve(cf, mu * q - A @ (z * t) + A @ (z2 * p), check_finite=False)
    d_s = p - A.T @ d_lam
    d_x = z * (t - z * d_s) / mu
    return d_x, d_lam, d_s


def lp_reduced_direction(A, b, c, it, d_mu: float, refine: int = 2) -> Direction:
    """Direction for min c'x, Ax = b, x >= 0 from the m x m system in A Z^2 A'.

    d_lambda, d_s, d_x follow the normal-equation elimination with
    rho*Y*Z = mu*I and all correction terms kept.  Recovering d_x divides by
    mu, which amplifies rounding in d_s by about z^2/mu; ``refine`` passes of
    iterative refinement on the scaled system ``[0 A' I; A 0 0; rho*Y 0 Z]``
    reuse the same factorization and recover full accuracy.
    """
    A = np.asarray(A, dtype=float)
    x, lam, s = it.point.x, it.lam, it.s
    mu, rho = it.mu, it.rho
    if not mu > 0:
        raise DegenerateSystemError("reduced LP path requires mu > 0")
    z, y = it.pair.z, it.pair.y
    z2 = z * z
    res = getattr(it, "residuals", None)
    if res is not None:
        # same rounded residuals as the full system, so both solve one problem
        rd, q, gap = res.r_dual, -res.r_eq, res.r_relax
    else:
        rd, q, gap = c - A.T @ lam - s, b - A @ x, z - x
    cf = _normal_factor(A, z2)
    rhs = mu * q + A @ (z2 * rd) - A @ ((mu + rho * z2) * gap) - d_mu * (A @ z)
    d_lam = scipy.linalg.cho_solve(cf, rhs, check_finite=False)
    d_s = rd - A.T @ d_lam
    d_x = (1.0 + (rho / mu) * z2) * gap + (d_mu * z - z2 * d_s) / mu
    logger.debug("reduced LP path: min z/mu = %.3e", float(np.min(z) / mu) if z.size else np.nan)
    t = rho * (z + y) * gap + d_mu
    ry = rho * y
    for _ in range(refine):
        dx2, dl2, ds2 = _lp_block_solve(
            A, cf, z, mu,
            rd - (A.T @ d_lam + d_s),
            q - A @ d_x,
            t - (ry * d_x + z * d_s),
        )
        d_x, d_lam, d_s = d_x + dx2, d_lam + dl2, d_s + ds2
    return Direction(d_mu=float(d_mu), d_x=d_x, d_lambda=d_lam, d_s=d_s)
