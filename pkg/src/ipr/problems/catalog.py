"""Hand-coded test problems.

``wb`` is the Waechter-Biegler jamming example; the ``hsNNN`` entries follow
the Hock-Schittkowski collection (numbering, standard starts, published
solutions).  Bounds are appended to g after the general inequalities.
"""
from __future__ import annotations

import numpy as np

from .base import ProblemSpec, build_problem


def _const(mat):
    arr = np.asarray(mat, dtype=float)
    return lambda x: arr


def _real_root(coeffs, lo, hi):
    roots = np.roots(coeffs)
    good = [r.real for r in roots if abs(r.imag) < 1e-12 and lo <= r.real <= hi]
    if len(good) != 1:
        raise RuntimeError(f"expected one real root in [{lo}, {hi}], got {good}")
    # one Newton polish
    r = good[0]
    p, dp = np.polyval(coeffs, r), np.polyval(np.polyder(coeffs), r)
    return r - p / dp


def wb_problem() -> ProblemSpec:
    """min x  s.t.  x**2 - 1 >= 0,  x - 2 >= 0."""
    return build_problem(
        "wb",
        1,
        f=lambda x: x[0],
        grad_f=lambda x: [1.0],
        hess_f=_const([[0.0]]),
        start=[-4.0],
        ineq=[
            (lambda x: x[0] ** 2 - 1.0, lambda x: [2.0 * x[0]], _const([[2.0]])),
            (lambda x: x[0] - 2.0, lambda x: [1.0], _const([[0.0]])),
        ],
        solution=([2.0], 2.0),
        description="Waechter-Biegler example; jams line-search infeasible IPMs from x0=-4",
    )


def _rosen(x):
    return 100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2


def _rosen_grad(x):
    return [
        -400.0 * x[0] * (x[1] - x[0] ** 2) - 2.0 * (1.0 - x[0]),
        200.0 * (x[1] - x[0] ** 2),
    ]


def _rosen_hess(x):
    return [[1200.0 * x[0] ** 2 - 400.0 * x[1] + 2.0, -400.0 * x[0]], [-400.0 * x[0], 200.0]]


def hs001():
    return build_problem(
        "hs001", 2, _rosen, _rosen_grad, _rosen_hess,
        start=[-2.0, 1.0], lower=[None, -1.5],
        solution=([1.0, 1.0], 0.0),
        description="Rosenbrock, one bound",
    )


def hs002():
    # x2 = 1.5 active; x1 solves d/dx1 = 0: 400 x1^3 - 598 x1 - 2 = 0
    x1 = _real_root([400.0, 0.0, 2.0 - 400.0 * 1.5, -2.0], 1.0, 1.5)
    xs = [x1, 1.5]
    return build_problem(
        "hs002", 2, _rosen, _rosen_grad, _rosen_hess,
        start=[-2.0, 1.0], lower=[None, 1.5],
        solution=(xs, _rosen(xs)),
        description="Rosenbrock, active bound",
    )


def hs003():
    return build_problem(
        "hs003", 2,
        f=lambda x: x[1] + 1e-5 * (x[1] - x[0]) ** 2,
        grad_f=lambda x: [-2e-5 * (x[1] - x[0]), 1.0 + 2e-5 * (x[1] - x[0])],
        hess_f=_const([[2e-5, -2e-5], [-2e-5, 2e-5]]),
        start=[10.0, 1.0], lower=[None, 0.0],
        solution=([0.0, 0.0], 0.0),
    )


def hs004():
    return build_problem(
        "hs004", 2,
        f=lambda x: (x[0] + 1.0) ** 3 / 3.0 + x[1],
        grad_f=lambda x: [(x[0] + 1.0) ** 2, 1.0],
        hess_f=lambda x: [[2.0 * (x[0] + 1.0), 0.0], [0.0, 0.0]],
        start=[1.125, 0.125], lower=[1.0, 0.0],
        solution=([1.0, 0.0], 8.0 / 3.0),
    )


def hs005():
    def f(x):
        return np.sin(x[0] + x[1]) + (x[0] - x[1]) ** 2 - 1.5 * x[0] + 2.5 * x[1] + 1.0

    def grad(x):
        c = np.cos(x[0] + x[1])
        d = 2.0 * (x[0] - x[1])
        return [c + d - 1.5, c - d + 2.5]

    def hess(x):
        sn = -np.sin(x[0] + x[1])
        return [[sn + 2.0, sn - 2.0], [sn - 2.0, sn + 2.0]]

    xs = [-np.pi / 3.0 + 0.5, -np.pi / 3.0 - 0.5]
    return build_problem(
        "hs005", 2, f, grad, hess,
        start=[0.0, 0.0], lower=[-1.5, -3.0], upper=[4.0, 3.0],
        solution=(xs, f(xs)),
    )


def hs006():
    return build_problem(
        "hs006", 2,
        f=lambda x: (1.0 - x[0]) ** 2,
        grad_f=lambda x: [-2.0 * (1.0 - x[0]), 0.0],
        hess_f=_const([[2.0, 0.0], [0.0, 0.0]]),
        start=[-1.2, 1.0],
        eq=[(
            lambda x: 10.0 * (x[1] - x[0] ** 2),
            lambda x: [-20.0 * x[0], 10.0],
            _const([[-20.0, 0.0], [0.0, 0.0]]),
        )],
        solution=([1.0, 1.0], 0.0),
    )


def hs007():
    return build_problem(
        "hs007", 2,
        f=lambda x: np.log(1.0 + x[0] ** 2) - x[1],
        grad_f=lambda x: [2.0 * x[0] / (1.0 + x[0] ** 2), -1.0],
        hess_f=lambda x: [[2.0 * (1.0 - x[0] ** 2) / (1.0 + x[0] ** 2) ** 2, 0.0], [0.0, 0.0]],
        start=[2.0, 2.0],
        eq=[(
            lambda x: (1.0 + x[0] ** 2) ** 2 + x[1] ** 2 - 4.0,
            lambda x: [4.0 * x[0] * (1.0 + x[0] ** 2), 2.0 * x[1]],
            lambda x: [[4.0 + 12.0 * x[0] ** 2, 0.0], [0.0, 2.0]],
        )],
        solution=([0.0, np.sqrt(3.0)], -np.sqrt(3.0)),
    )


def hs009():
    a, b = np.pi / 12.0, np.pi / 16.0

    def f(x):
        return np.sin(a * x[0]) * np.cos(b * x[1])

    def grad(x):
        return [a * np.cos(a * x[0]) * np.cos(b * x[1]), -b * np.sin(a * x[0]) * np.sin(b * x[1])]

    def hess(x):
        s1, c1 = np.sin(a * x[0]), np.cos(a * x[0])
        s2, c2 = np.sin(b * x[1]), np.cos(b * x[1])
        return [[-a * a * s1 * c2, -a * b * c1 * s2], [-a * b * c1 * s2, -b * b * s1 * c2]]

    return build_problem(
        "hs009", 2, f, grad, hess,
        start=[0.0, 0.0],
        eq=[(lambda x: 4.0 * x[0] - 3.0 * x[1], lambda x: [4.0, -3.0], _const(np.zeros((2, 2))))],
        solution=([-3.0, -4.0], -0.5),
        description="periodic objective; any (12k-3, 16k-4) is optimal",
    )


def hs010():
    return build_problem(
        "hs010", 2,
        f=lambda x: x[0] - x[1],
        grad_f=lambda x: [1.0, -1.0],
        hess_f=_const(np.zeros((2, 2))),
        start=[-10.0, 10.0],
        ineq=[(
            lambda x: -3.0 * x[0] ** 2 + 2.0 * x[0] * x[1] - x[1] ** 2 + 1.0,
            lambda x: [-6.0 * x[0] + 2.0 * x[1], 2.0 * x[0] - 2.0 * x[1]],
            _const([[-6.0, 2.0], [2.0, -2.0]]),
        )],
        solution=([0.0, 1.0], -1.0),
    )


def hs011():
    # x2 = x1^2 active; x1 solves 2 x1^3 + x1 - 5 = 0
    x1 = _real_root([2.0, 0.0, 1.0, -5.0], 0.0, 5.0)
    xs = [x1, x1 * x1]
    return build_problem(
        "hs011", 2,
        f=lambda x: (x[0] - 5.0) ** 2 + x[1] ** 2 - 25.0,
        grad_f=lambda x: [2.0 * (x[0] - 5.0), 2.0 * x[1]],
        hess_f=_const([[2.0, 0.0], [0.0, 2.0]]),
        start=[4.9, 0.1],
        ineq=[(lambda x: -x[0] ** 2 + x[1], lambda x: [-2.0 * x[0], 1.0], _const([[-2.0, 0.0], [0.0, 0.0]]))],
        solution=(xs, (x1 - 5.0) ** 2 + x1 ** 4 - 25.0),
    )


def hs012():
    return build_problem(
        "hs012", 2,
        f=lambda x: 0.5 * x[0] ** 2 + x[1] ** 2 - x[0] * x[1] - 7.0 * x[0] - 7.0 * x[1],
        grad_f=lambda x: [x[0] - x[1] - 7.0, 2.0 * x[1] - x[0] - 7.0],
        hess_f=_const([[1.0, -1.0], [-1.0, 2.0]]),
        start=[0.0, 0.0],
        ineq=[(
            lambda x: 25.0 - 4.0 * x[0] ** 2 - x[1] ** 2,
            lambda x: [-8.0 * x[0], -2.0 * x[1]],
            _const([[-8.0, 0.0], [0.0, -2.0]]),
        )],
        solution=([2.0, 3.0], -30.0),
    )


def hs014():
    r7 = np.sqrt(7.0)
    return build_problem(
        "hs014", 2,
        f=lambda x: (x[0] - 2.0) ** 2 + (x[1] - 1.0) ** 2,
        grad_f=lambda x: [2.0 * (x[0] - 2.0), 2.0 * (x[1] - 1.0)],
        hess_f=_const([[2.0, 0.0], [0.0, 2.0]]),
        start=[2.0, 2.0],
        eq=[(lambda x: x[0] - 2.0 * x[1] + 1.0, lambda x: [1.0, -2.0], _const(np.zeros((2, 2))))],
        ineq=[(
            lambda x: -0.25 * x[0] ** 2 - x[1] ** 2 + 1.0,
            lambda x: [-0.5 * x[0], -2.0 * x[1]],
            _const([[-0.5, 0.0], [0.0, -2.0]]),
        )],
        solution=([0.5 * (r7 - 1.0), 0.25 * (r7 + 1.0)], 9.0 - 2.875 * r7),
    )


def hs021():
    return build_problem(
        "hs021", 2,
        f=lambda x: 0.01 * x[0] ** 2 + x[1] ** 2 - 100.0,
        grad_f=lambda x: [0.02 * x[0], 2.0 * x[1]],
        hess_f=_const([[0.02, 0.0], [0.0, 2.0]]),
        start=[-1.0, -1.0],
        ineq=[(lambda x: 10.0 * x[0] - x[1] - 10.0, lambda x: [10.0, -1.0], _const(np.zeros((2, 2))))],
        lower=[2.0, -50.0], upper=[50.0, 50.0],
        solution=([2.0, 0.0], -99.96),
    )


def hs028():
    return build_problem(
        "hs028", 3,
        f=lambda x: (x[0] + x[1]) ** 2 + (x[1] + x[2]) ** 2,
        grad_f=lambda x: [2.0 * (x[0] + x[1]), 2.0 * (x[0] + x[1]) + 2.0 * (x[1] + x[2]), 2.0 * (x[1] + x[2])],
        hess_f=_const([[2.0, 2.0, 0.0], [2.0, 4.0, 2.0], [0.0, 2.0, 2.0]]),
        start=[-4.0, 1.0, 1.0],
        eq=[(lambda x: x[0] + 2.0 * x[1] + 3.0 * x[2] - 1.0, lambda x: [1.0, 2.0, 3.0], _const(np.zeros((3, 3))))],
        solution=([0.5, -0.5, 0.5], 0.0),
    )


_HS35_G = np.array([[4.0, 2.0, 2.0], [2.0, 4.0, 0.0], [2.0, 0.0, 2.0]])
_HS35_C = np.array([-8.0, -6.0, -4.0])


def hs035():
    return build_problem(
        "hs035", 3,
        f=lambda x: 0.5 * x @ _HS35_G @ x + _HS35_C @ x + 9.0,
        grad_f=lambda x: _HS35_G @ x + _HS35_C,
        hess_f=_const(_HS35_G),
        start=[0.5, 0.5, 0.5],
        ineq=[(lambda x: 3.0 - x[0] - x[1] - 2.0 * x[2], lambda x: [-1.0, -1.0, -2.0], _const(np.zeros((3, 3))))],
        lower=[0.0, 0.0, 0.0],
        solution=([4.0 / 3.0, 7.0 / 9.0, 4.0 / 9.0], 1.0 / 9.0),
        description="convex QP",
    )


def hs039():
    z4 = _const(np.zeros((4, 4)))
    return build_problem(
        "hs039", 4,
        f=lambda x: -x[0],
        grad_f=lambda x: [-1.0, 0.0, 0.0, 0.0],
        hess_f=z4,
        start=[2.0, 2.0, 2.0, 2.0],
        eq=[
            (
                lambda x: x[1] - x[0] ** 3 - x[2] ** 2,
                lambda x: [-3.0 * x[0] ** 2, 1.0, -2.0 * x[2], 0.0],
                lambda x: np.diag([-6.0 * x[0], 0.0, -2.0, 0.0]),
            ),
            (
                lambda x: x[0] ** 2 - x[1] - x[3] ** 2,
                lambda x: [2.0 * x[0], -1.0, 0.0, -2.0 * x[3]],
                _const(np.diag([2.0, 0.0, 0.0, -2.0])),
            ),
        ],
        solution=([1.0, 1.0, 0.0, 0.0], -1.0),
    )


def hs043():
    def f(x):
        return x[0] ** 2 + x[1] ** 2 + 2.0 * x[2] ** 2 + x[3] ** 2 - 5.0 * x[0] - 5.0 * x[1] - 21.0 * x[2] + 7.0 * x[3]

    return build_problem(
        "hs043", 4, f,
        grad_f=lambda x: [2.0 * x[0] - 5.0, 2.0 * x[1] - 5.0, 4.0 * x[2] - 21.0, 2.0 * x[3] + 7.0],
        hess_f=_const(np.diag([2.0, 2.0, 4.0, 2.0])),
        start=[0.0, 0.0, 0.0, 0.0],
        ineq=[
            (
                lambda x: 8.0 - x[0] ** 2 - x[1] ** 2 - x[2] ** 2 - x[3] ** 2 - x[0] + x[1] - x[2] + x[3],
                lambda x: [-2.0 * x[0] - 1.0, -2.0 * x[1] + 1.0, -2.0 * x[2] - 1.0, -2.0 * x[3] + 1.0],
                _const(np.diag([-2.0, -2.0, -2.0, -2.0])),
            ),
            (
                lambda x: 10.0 - x[0] ** 2 - 2.0 * x[1] ** 2 - x[2] ** 2 - 2.0 * x[3] ** 2 + x[0] + x[3],
                lambda x: [-2.0 * x[0] + 1.0, -4.0 * x[1], -2.0 * x[2], -4.0 * x[3] + 1.0],
                _const(np.diag([-2.0, -4.0, -2.0, -4.0])),
            ),
            (
                lambda x: 5.0 - 2.0 * x[0] ** 2 - x[1] ** 2 - x[2] ** 2 - 2.0 * x[0] + x[1] + x[3],
                lambda x: [-4.0 * x[0] - 2.0, -2.0 * x[1] + 1.0, -2.0 * x[2], 1.0],
                _const(np.diag([-4.0, -2.0, -2.0, 0.0])),
            ),
        ],
        solution=([0.0, 1.0, 2.0, -1.0], -44.0),
        description="Rosen-Suzuki",
    )


def hs048():
    z5 = _const(np.zeros((5, 5)))
    return build_problem(
        "hs048", 5,
        f=lambda x: (x[0] - 1.0) ** 2 + (x[1] - x[2]) ** 2 + (x[3] - x[4]) ** 2,
        grad_f=lambda x: [
            2.0 * (x[0] - 1.0), 2.0 * (x[1] - x[2]), -2.0 * (x[1] - x[2]),
            2.0 * (x[3] - x[4]), -2.0 * (x[3] - x[4]),
        ],
        hess_f=_const([
            [2.0, 0, 0, 0, 0], [0, 2.0, -2.0, 0, 0], [0, -2.0, 2.0, 0, 0],
            [0, 0, 0, 2.0, -2.0], [0, 0, 0, -2.0, 2.0],
        ]),
        start=[3.0, 5.0, -3.0, 2.0, -2.0],
        eq=[
            (lambda x: np.sum(x) - 5.0, lambda x: np.ones(5), z5),
            (lambda x: x[2] - 2.0 * (x[3] + x[4]) + 3.0, lambda x: [0.0, 0.0, 1.0, -2.0, -2.0], z5),
        ],
        solution=([1.0] * 5, 0.0),
    )


def hs071():
    def f(x):
        return x[0] * x[3] * (x[0] + x[1] + x[2]) + x[2]

    def grad(x):
        s = x[0] + x[1] + x[2]
        return [x[3] * (s + x[0]), x[0] * x[3], x[0] * x[3] + 1.0, x[0] * s]

    def hess(x):
        s = x[0] + x[1] + x[2]
        return [
            [2.0 * x[3], x[3], x[3], s + x[0]],
            [x[3], 0.0, 0.0, x[0]],
            [x[3], 0.0, 0.0, x[0]],
            [s + x[0], x[0], x[0], 0.0],
        ]

    def prod_hess(x):
        a, b, c, d = x
        return [
            [0.0, c * d, b * d, b * c],
            [c * d, 0.0, a * d, a * c],
            [b * d, a * d, 0.0, a * b],
            [b * c, a * c, a * b, 0.0],
        ]

    xs = [1.0, 4.7429994, 3.8211503, 1.3794082]
    return build_problem(
        "hs071", 4, f, grad, hess,
        start=[1.0, 5.0, 5.0, 1.0],
        eq=[(lambda x: x @ x - 40.0, lambda x: 2.0 * np.asarray(x), _const(2.0 * np.eye(4)))],
        ineq=[(
            lambda x: x[0] * x[1] * x[2] * x[3] - 25.0,
            lambda x: [x[1] * x[2] * x[3], x[0] * x[2] * x[3], x[0] * x[1] * x[3], x[0] * x[1] * x[2]],
            prod_hess,
        )],
        lower=[1.0] * 4, upper=[5.0] * 4,
        solution=(xs, f(np.array(xs))),
    )


_HS76_H = np.array([[2.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 2.0, 1.0], [0.0, 0.0, 1.0, 1.0]])
_HS76_C = np.array([-1.0, -3.0, 1.0, -1.0])


def hs076():
    z4 = _const(np.zeros((4, 4)))
    xs = np.array([3.0 / 11.0, 23.0 / 11.0, 0.0, 6.0 / 11.0])
    f = lambda x: 0.5 * x @ _HS76_H @ x + _HS76_C @ x  # noqa: E731
    return build_problem(
        "hs076", 4, f,
        grad_f=lambda x: _HS76_H @ x + _HS76_C,
        hess_f=_const(_HS76_H),
        start=[0.5, 0.5, 0.5, 0.5],
        ineq=[
            (lambda x: 5.0 - x[0] - 2.0 * x[1] - x[2] - x[3], lambda x: [-1.0, -2.0, -1.0, -1.0], z4),
            (lambda x: 4.0 - 3.0 * x[0] - x[1] - 2.0 * x[2] + x[3], lambda x: [-3.0, -1.0, -2.0, 1.0], z4),
            (lambda x: x[1] + 4.0 * x[2] - 1.5, lambda x: [0.0, 1.0, 4.0, 0.0], z4),
        ],
        lower=[0.0] * 4,
        solution=(xs, f(xs)),
        description="convex QP",
    )


HS_PROBLEMS = {
    fn.__name__: fn
    for fn in (
        hs001, hs002, hs003, hs004, hs005, hs006, hs007, hs009, hs010, hs011,
        hs012, hs014, hs021, hs028, hs035, hs039, hs043, hs048, hs071, hs076,
    )
}
