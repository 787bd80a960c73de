"""Relaxation pair (z, y) and the mini-max building blocks G and F.

For a constraint value ``w`` (a bound variable or ``g_j(x)``), a dual
estimate ``s``, barrier ``mu >= 0`` and penalty ``rho > 0``::

    r = sqrt((s - rho*w)**2 + 4*rho*mu)
    z = (r - (s - rho*w)) / (2*rho)
    y = (r + (s - rho*w)) / (2*rho)

so that ``z*y = mu/rho`` and ``z - w = y - s/rho``.  At ``mu = 0`` the pair
collapses to ``z = max(0, w - s/rho)``, ``y = max(0, s/rho - w)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class RelaxationError(ValueError):
    """Invalid arguments for the relaxation pair."""


class DegenerateDerivativeError(RelaxationError):
    """Pair derivatives requested at a kink (z_j + y_j = 0)."""


@dataclass(frozen=True)
class RelaxationPair:
    z: np.ndarray
    y: np.ndarray
    mu: float
    rho: float


@dataclass(frozen=True)
class PairJacobian:
    """Diagonal partial derivatives of (z, y), one entry per component."""

    dz_dw: np.ndarray
    dy_dw: np.ndarray
    dz_ds: np.ndarray
    dy_ds: np.ndarray
    dz_dmu: np.ndarray
    dy_dmu: np.ndarray
    dz_drho: np.ndarray
    dy_drho: np.ndarray


def _check_params(mu: float, rho: float) -> None:
    if not rho > 0:
        raise RelaxationError(f"rho must be positive, got {rho!r}")
    if not mu >= 0:
        raise RelaxationError(f"mu must be nonnegative, got {mu!r}")


def eval_pair(w, s, mu: float, rho: float) -> RelaxationPair:
    """Evaluate (z, y) componentwise.

    The root that would be formed as a difference of nearly equal numbers
    is recovered from the product identity ``z*y = mu/rho`` instead.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if w.shape != s.shape:
        raise RelaxationError(f"w and s differ in shape: {w.shape} vs {s.shape}")
    mu = float(mu)
    rho = float(rho)
    _check_params(mu, rho)

    t = s - rho * w
    r = np.hypot(t, 2.0 * np.sqrt(rho * mu))
    big_y = r + t  # 2*rho*y, accurate when t > 0
    big_z = r - t  # 2*rho*z, accurate when t <= 0
    pos = t > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(pos, 2.0 * mu / np.where(pos, big_y, 1.0), big_z / (2.0 * rho))
        y = np.where(pos, big_y / (2.0 * rho), 2.0 * mu / np.where(pos, 1.0, big_z))
    # r = t = 0 only happens at mu = 0 on the kink
    y = np.where(~pos & (big_z == 0.0), 0.0, y)
    return RelaxationPair(z=z, y=y, mu=mu, rho=rho)


def eval_pair_derivatives(pair: RelaxationPair, w, s) -> PairJacobian:
    w = np.atleast_1d(np.asarray(w, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    z, y, rho = pair.z, pair.y, pair.rho
    if w.shape != z.shape or s.shape != z.shape:
        raise RelaxationError("pair, w and s must have equal length")
    tot = z + y
    if np.any(tot <= 0.0):
        raise DegenerateDerivativeError(
            f"z_j + y_j = 0 at components {np.flatnonzero(tot <= 0.0).tolist()}"
        )
    fz = z / tot
    fy = y / tot
    return PairJacobian(
        dz_dw=fz,
        dy_dw=-fy,
        dz_ds=-fz / rho,
        dy_ds=fy / rho,
        dz_dmu=1.0 / (rho * tot),
        dy_dmu=1.0 / (rho * tot),
        dz_drho=fz * (w - z) / rho,
        dy_drho=-fy * (y + w) / rho,
    )


def eval_G(w, s, mu: float, rho: float):
    """-mu*ln(z) + s*(z - w) + rho/2*(z - w)**2, elementwise.

    Returns a float for scalar input, an array otherwise.
    """
    scalar = np.ndim(w) == 0 and np.ndim(s) == 0
    pair = eval_pair(w, s, mu, rho)
    z = pair.z
    if np.any(z <= 0.0):
        raise RelaxationError("logarithm of z undefined: z_j = 0 (requires mu > 0)")
    w = np.atleast_1d(np.asarray(w, dtype=float))
    s = np.atleast_1d(np.asarray(s, dtype=float))
    d = z - w
    out = -mu * np.log(z) + s * d + 0.5 * rho * d * d
    return float(out[0]) if scalar else out


def eval_F(problem, x, s, mu: float, rho: float) -> float:
    """Mini-max function f(x) + sum_j G(g_j(x), s_j)."""
    x = np.asarray(x, dtype=float)
    g = problem.eval_g(x)
    total = float(problem.eval_f(x))
    if g.size:
        total += float(np.sum(eval_G(g, np.asarray(s, dtype=float), mu, rho)))
    return total


def dF_drho(problem, x, s, mu: float, rho: float) -> float:
    """Derivative of F in rho: 1/2 ||z - g||^2.

    dG/dz = -mu/z + s + rho*(z - w) = -mu/z + rho*y = 0, so only the
    explicit rho in the quadratic term contributes.
    """
    g = np.asarray(problem.eval_g(np.asarray(x, dtype=float)), dtype=float)
    pair = eval_pair(g, np.asarray(s, dtype=float), mu, rho)
    d = pair.z - g
    return 0.5 * float(d @ d)


def dF_drho_stated(problem, x, s, mu: float, rho: float) -> float:
    """((rho-1)/rho) * (z-g)' (Z+Y)^-1 Z (z-g).

    This is the closed form usually quoted for the rho-derivative of F.  It
    does not match finite differences (it vanishes at rho = 1 while F does
    not stay constant there); use dF_drho.  Kept so the discrepancy stays
    checkable.
    """
    g = np.asarray(problem.eval_g(np.asarray(x, dtype=float)), dtype=float)
    pair = eval_pair(g, np.asarray(s, dtype=float), mu, rho)
    d = pair.z - g
    return (rho - 1.0) / rho * float(np.sum(pair.z / (pair.z + pair.y) * d * d))
