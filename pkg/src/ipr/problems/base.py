"""Smooth NLP problem abstraction: min f(x) s.t. h(x) = 0, g(x) >= 0."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np


class ProblemError(ValueError):
    """Malformed problem data."""


@dataclass(frozen=True)
class LpData:
    """Standard-form LP data: min c'x s.t. Ax = b, x >= 0."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        if A.shape != (b.size, c.size):
            raise ProblemError(
                f"inconsistent LP dimensions: A is {A.shape}, b has {b.size}, c has {c.size}"
            )
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.c.size

    @property
    def m(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class ProblemSpec:
    """Callbacks and metadata for one NLP.

    Jacobians are returned column-wise: ``eval_jac_h(x)`` is n x m with
    column i equal to the gradient of h_i, and likewise for g.
    ``eval_hess_lagrangian(x, lam, s)`` returns the Hessian of
    ``f - lam'h - s'g``.
    """

    name: str
    n: int
    m: int
    m_ineq: int
    eval_f: Callable[[np.ndarray], float]
    eval_grad_f: Callable[[np.ndarray], np.ndarray]
    eval_h: Callable[[np.ndarray], np.ndarray]
    eval_jac_h: Callable[[np.ndarray], np.ndarray]
    eval_g: Callable[[np.ndarray], np.ndarray]
    eval_jac_g: Callable[[np.ndarray], np.ndarray]
    eval_hess_lagrangian: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    standard_start: np.ndarray
    known_solution: Optional[Tuple[np.ndarray, float]] = None
    # bounds already appear among the g_j; kept here to place the start
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    lp: Optional[LpData] = None
    description: str = ""

    @property
    def is_lp(self) -> bool:
        return self.lp is not None

    def initial_point(self) -> np.ndarray:
        """Standard start pushed off declared bounds by 1e-2*max(1, |bound|)."""
        x = np.array(self.standard_start, dtype=float)
        if self.lower is not None:
            lo = np.asarray(self.lower, dtype=float)
            fin = np.isfinite(lo)
            x[fin] = np.maximum(x[fin], lo[fin] + 1e-2 * np.maximum(1.0, np.abs(lo[fin])))
        if self.upper is not None:
            up = np.asarray(self.upper, dtype=float)
            fin = np.isfinite(up)
            x[fin] = np.minimum(x[fin], up[fin] - 1e-2 * np.maximum(1.0, np.abs(up[fin])))
        return x


def _stack_rows(values, n):
    if len(values) == 0:
        return np.zeros((0, n))
    return np.array(values, dtype=float).reshape(len(values), n)


def build_problem(
    name: str,
    n: int,
    f: Callable,
    grad_f: Callable,
    hess_f: Callable,
    start: Sequence[float],
    eq: Sequence[Tuple[Callable, Callable, Callable]] = (),
    ineq: Sequence[Tuple[Callable, Callable, Callable]] = (),
    lower: Optional[Sequence[float]] = None,
    upper: Optional[Sequence[float]] = None,
    solution: Optional[Tuple[Sequence[float], float]] = None,
    description: str = "",
) -> ProblemSpec:
    """Assemble a ProblemSpec from per-constraint (value, gradient, Hessian) triples.

    Finite entries of ``lower``/``upper`` are appended to the inequalities as
    ``x_i - l_i >= 0`` and ``u_i - x_i >= 0``, after the general ones.
    """
    eq = list(eq)
    ineq = list(ineq)
    zero_h = lambda x: np.zeros((n, n))  # noqa: E731
    for bnd, sign in ((lower, 1.0), (upper, -1.0)):
        if bnd is None:
            continue
        for i, val in enumerate(bnd):
            if val is None or not np.isfinite(val):
                continue
            e = np.zeros(n)
            e[i] = sign
            ineq.append(
                (
                    lambda x, i=i, val=val, sign=sign: sign * (x[i] - val),
                    lambda x, e=e: e,
                    zero_h,
                )
            )
    m, mi = len(eq), len(ineq)

    def eval_h(x):
        return np.array([c[0](x) for c in eq], dtype=float)

    def eval_jac_h(x):
        return _stack_rows([c[1](x) for c in eq], n).T

    def eval_g(x):
        return np.array([c[0](x) for c in ineq], dtype=float)

    def eval_jac_g(x):
        return _stack_rows([c[1](x) for c in ineq], n).T

    def eval_hess(x, lam, s):
        H = np.array(hess_f(x), dtype=float).reshape(n, n)
        for li, c in zip(lam, eq):
            if li != 0.0:
                H = H - li * np.asarray(c[2](x), dtype=float)
        for sj, c in zip(s, ineq):
            if sj != 0.0:
                H = H - sj * np.asarray(c[2](x), dtype=float)
        return H

    def to_bounds(b):
        if b is None:
            return None
        return np.array([np.nan if v is None else v for v in b], dtype=float)

    known = None
    if solution is not None:
        known = (np.asarray(solution[0], dtype=float), float(solution[1]))
    lo, up = to_bounds(lower), to_bounds(upper)
    if lo is not None:
        lo = np.where(np.isnan(lo), -np.inf, lo)
    if up is not None:
        up = np.where(np.isnan(up), np.inf, up)
    return ProblemSpec(
        name=name,
        n=n,
        m=m,
        m_ineq=mi,
        eval_f=lambda x: float(f(x)),
        eval_grad_f=lambda x: np.asarray(grad_f(x), dtype=float).reshape(n),
        eval_h=eval_h,
        eval_jac_h=eval_jac_h,
        eval_g=eval_g,
        eval_jac_g=eval_jac_g,
        eval_hess_lagrangian=eval_hess,
        standard_start=np.asarray(start, dtype=float),
        known_solution=known,
        lower=lo,
        upper=up,
        description=description,
    )


def _full_row_rank(A: np.ndarray) -> bool:
    import scipy.linalg

    m = A.shape[0]
    if m == 0:
        return True
    if m > A.shape[1]:
        return False
    # rank-revealing QR of A' (column pivoting)
    R = scipy.linalg.qr(A.T, mode="r", pivoting=True)[0]
    d = np.abs(np.diag(R))
    return bool(d.size == m and d[-1] > 1e-12 * max(1.0, d[0]))


def lp_problem(data: LpData, name: str = "lp", start=None) -> ProblemSpec:
    """Wrap standard-form LP data; rejects rank-deficient A."""
    if not _full_row_rank(data.A):
        raise ProblemError("LP constraint matrix A does not have full row rank")
    A, b, c = data.A, data.b, data.c
    n, m = data.n, data.m
    eye = np.eye(n)
    return ProblemSpec(
        name=name,
        n=n,
        m=m,
        m_ineq=n,
        eval_f=lambda x: float(c @ x),
        eval_grad_f=lambda x: c.copy(),
        eval_h=lambda x: A @ x - b,
        eval_jac_h=lambda x: A.T.copy(),
        eval_g=lambda x: np.array(x, dtype=float),
        eval_jac_g=lambda x: eye.copy(),
        eval_hess_lagrangian=lambda x, lam, s: np.zeros((n, n)),
        standard_start=np.ones(n) if start is None else np.asarray(start, dtype=float),
        lp=data,
        description="standard-form LP",
    )


class LpParseError(ProblemError):
    pass


def lp_from_file(path) -> LpData:
    """Read the plain-text LP format.

    Non-comment lines, in order: ``n m``, the n entries of c, the m entries
    of b, then m rows of A.  ``#`` starts a comment.
    """
    lines = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if text:
                lines.append((lineno, text))

    def numbers(idx, fieldname, count=None):
        if idx >= len(lines):
            raise LpParseError(f"{path}: missing field '{fieldname}'")
        lineno, text = lines[idx]
        try:
            vals = [float(tok) for tok in text.split()]
        except ValueError as exc:
            raise LpParseError(f"{path}:{lineno}: field '{fieldname}': {exc}") from None
        if count is not None and len(vals) != count:
            raise LpParseError(
                f"{path}:{lineno}: field '{fieldname}' has {len(vals)} values, expected {count}"
            )
        return vals

    if not lines:
        raise LpParseError(f"{path}: missing field 'n m'")
    head = numbers(0, "n m", 2)
    if any(v != int(v) or v < 0 for v in head):
        raise LpParseError(f"{path}:{lines[0][0]}: field 'n m' must be nonnegative integers")
    n, m = int(head[0]), int(head[1])
    c = numbers(1, "c", n)
    b = numbers(2, "b", m) if m > 0 else []
    start = 3 if m > 0 else 2
    rows = [numbers(start + i, f"A row {i + 1}", n) for i in range(m)]
    extra = lines[start + m :]
    if extra:
        raise LpParseError(f"{path}:{extra[0][0]}: unexpected data after A")
    return LpData(A=np.array(rows, dtype=float).reshape(m, n), b=np.array(b), c=np.array(c))


def random_lp(seed: int, n: Optional[int] = None, m: Optional[int] = None) -> LpData:
    """Feasible, bounded random LP; the optimum exists by construction.

    b = A x_f for a positive x_f and c = A'l + s_f for a positive s_f.
    Defaults draw n in [5, 50] and m in [1, min(20, n - 1)].
    """
    rng = np.random.default_rng(seed)
    if n is None:
        n = int(rng.integers(5, 51))
    if m is None:
        m = int(rng.integers(1, min(20, n - 1) + 1))
    A = rng.standard_normal((m, n))
    x_f = rng.uniform(0.5, 2.0, n)
    lam = rng.standard_normal(m)
    s_f = rng.uniform(0.5, 2.0, n)
    return LpData(A=A, b=A @ x_f, c=A.T @ lam + s_f)
