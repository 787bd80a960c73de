import numpy as np
import pytest

from ipr.newton import Direction
from ipr.problems import available, registry, wb_problem
from ipr.residuals import evaluate_point
from ipr.solver import (
    GuardLoopError,
    SmallStepError,
    SolverConfig,
    Status,
    barrier_guard,
    default_multipliers,
    line_search,
    make_iterate,
    select_gamma,
    solve,
    update_rho,
)

CFG = SolverConfig()
SOLVED_NAMES = ["wb", "hs003", "hs010", "hs014", "hs035", "hs071", "hs076", "lp-0", "lp-1"]


def state(problem, x, lam, s, mu, rho=1.0):
    return make_iterate(evaluate_point(problem, np.asarray(x, float)), np.asarray(lam, float),
                        np.asarray(s, float), mu, rho)


@pytest.fixture(scope="module")
def wb_report():
    return solve(wb_problem())


class TestConfig:
    def test_defaults(self):
        c = SolverConfig()
        assert (c.mu0, c.rho0, c.eta, c.gamma0, c.delta, c.tau, c.sigma, c.eps) == (
            0.1, 1.0, 10.0, 0.001, 0.5, 0.01, 0.01, 1e-8)
        assert (c.max_iters, c.min_step_power, c.guard_max_loops) == (500, 40, 200)
        assert c.mu_floor == pytest.approx(1e-12)

    @pytest.mark.parametrize("kw", [
        dict(mu0=0.0), dict(rho0=-1.0), dict(eta=1.0), dict(gamma0=1.0), dict(delta=0.0),
        dict(tau=1.0), dict(sigma=0.0), dict(eps=0.2), dict(eps=0.0), dict(max_iters=-1),
        dict(min_step_power=-1), dict(guard_max_loops=0),
    ])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            SolverConfig(**kw)


class TestGuard:
    def test_reference_start_untouched(self):
        mu, state_, phi, loops = barrier_guard(lambda m: ("st", 50.5785), 0.1, CFG)
        assert (mu, loops, phi, state_) == (0.1, 0, 50.5785, "st")

    def test_constant_phi(self):
        mu, _, _, loops = barrier_guard(lambda m: (None, 0.001), 1.0, CFG)
        assert mu == pytest.approx(0.01) and loops == 2

    def test_reference_k2_state(self):
        mu, _, _, loops = barrier_guard(lambda m: (None, 3.1754e-05), 5.5681e-05, CFG)
        assert mu == 5.5681e-05 and loops == 0

    def test_equality_exits(self):
        mu, _, _, loops = barrier_guard(lambda m: (None, 0.01), 0.1, CFG)
        assert mu == 0.1 and loops == 0

    def test_phi_recomputed_at_each_mu(self):
        seen = []

        def phi_eval(m):
            seen.append(m)
            return m, m * m

        mu, st, phi, loops = barrier_guard(phi_eval, 1.0, CFG)
        assert st == mu and phi == mu * mu
        assert np.allclose(seen, [10.0 ** -i for i in range(loops + 1)], rtol=1e-15)
        assert mu <= max(CFG.eta * phi, CFG.eps)

    def test_cap_with_small_phi_returns(self):
        cfg = SolverConfig(guard_max_loops=2)
        mu, _, _, loops = barrier_guard(lambda m: (None, 0.0), 1.0, cfg)
        assert loops == 2 and mu == pytest.approx(0.01)

    def test_cap_with_large_phi_raises(self):
        cfg = SolverConfig(guard_max_loops=2)
        with pytest.raises(GuardLoopError):
            barrier_guard(lambda m: (None, 1e-7), 1.0, cfg)


@pytest.mark.parametrize("mu,phi,expected", [
    (0.1, 50.5785, 0.001),
    (1e-9, 1.0, 1e-9),
    (0.5, 500.0, 0.001),
])
def test_select_gamma(mu, phi, expected):
    assert select_gamma(CFG, mu, phi) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("rho,x,s,expected", [
    (1.0, [2.0], [1.0, 1.0], 1.0),
    (1.0, [1.5], [300.0, -2.0], 2.0),
    (5.0, [0.1, 0.1], [1.0], 5.0),
])
def test_update_rho(rho, x, s, expected):
    assert update_rho(rho, np.array(x), np.array(s), CFG) == pytest.approx(expected)


def test_update_rho_never_decreases(rng):
    for _ in range(200):
        rho = float(rng.uniform(0.1, 10))
        assert update_rho(rho, rng.standard_normal(3), rng.standard_normal(2) * 100, CFG) >= rho


class TestLineSearch:
    def _wb_start(self):
        wb = wb_problem()
        it = state(wb, [-4.0], [], [1.0, 1.0], 0.1)
        it.gamma = select_gamma(CFG, it.mu, it.phi)
        return wb, it

    def _direction(self, wb, it, d_mu):
        from ipr.newton import assemble_system, solve_direction

        return solve_direction(assemble_system(wb, it, d_mu))

    def test_full_step_at_start(self):
        wb, it = self._wb_start()
        d_mu = -it.mu + it.gamma * it.phi
        d = self._direction(wb, it, d_mu)
        assert line_search(wb, it, d_mu, d, CFG) == 1.0

    def test_zero_merit_trial_accepted(self):
        wb = wb_problem()
        it = state(wb, [3.0], [], [0.5, 0.5], 0.1)
        d = Direction(d_mu=-0.1, d_x=np.array([-1.0]), d_lambda=np.zeros(0), d_s=np.array([-0.5, 0.5]))
        assert line_search(wb, it, -0.1, d, CFG) == 1.0

    def test_ascent_direction_fails(self):
        wb, it = self._wb_start()
        d_mu = -it.mu + it.gamma * it.phi
        d = self._direction(wb, it, d_mu)
        flipped = Direction(d_mu=-d_mu, d_x=-d.d_x, d_lambda=-d.d_lambda, d_s=-d.d_s)
        with pytest.raises(SmallStepError):
            line_search(wb, it, -d_mu, flipped, CFG)


class TestWbSolve:
    def test_status_and_solution(self, wb_report):
        r = wb_report
        assert r.status is Status.KKT_SOLVED and r.success
        assert r.counters.iterations == 4 and len(r.trace) == 5
        assert abs(r.x[0] - 2.0) <= 1e-6
        assert r.s == pytest.approx([0.0, 1.0], abs=1e-6)
        assert r.final.E <= 1e-8

    @pytest.mark.parametrize("k,mu,phi,E", [
        (0, 0.1, 50.5785, 15.0),
        (1, 0.0506, 0.0557, 0.3328),
        (2, 5.5681e-05, 3.1754e-05, 0.0080),
    ])
    def test_reference_rows(self, wb_report, k, mu, phi, E):
        row = wb_report.trace[k]
        assert row.mu == pytest.approx(mu, rel=1e-3)
        assert row.phi == pytest.approx(phi, rel=1e-3)
        assert row.E == pytest.approx(E, rel=1e-2 if k == 2 else 1e-3)

    def test_row3_violation_and_error(self, wb_report):
        row = wb_report.trace[3]
        assert row.v == pytest.approx(4.6437e-07, rel=1e-3)
        assert row.E == pytest.approx(6.1372e-07, rel=1e-3)

    def test_last_two_steps_are_full(self, wb_report):
        assert [row.alpha for row in wb_report.trace[-3:-1]] == [1.0, 1.0]

    def test_evaluation_counts(self, wb_report):
        c = wb_report.counters
        assert c.f_evals == c.grad_evals == 5
        assert c.hess_evals == 4
        assert c.wall_time > 0


def rows_before_plain_stop(trace):
    """Rows up to the first one with mu <= eps and phi <= eps.

    The solver keeps iterating past that row until E <= eps too, and the
    mu floor only holds while phi > eps.
    """
    out = []
    for row in trace:
        out.append(row)
        if row.mu <= CFG.eps and row.phi <= CFG.eps:
            break
    return out


@pytest.mark.parametrize("name", SOLVED_NAMES)
def test_trace_invariants(name):
    r = solve(registry(name))
    assert r.status is Status.KKT_SOLVED
    t = r.trace
    for a, b in zip(t, t[1:]):
        assert b.mu <= a.mu
        assert b.rho >= a.rho
        assert b.phi <= a.phi
        assert a.phi_trial <= (1 - 2 * CFG.tau * a.alpha) * a.phi
    for row in rows_before_plain_stop(t):
        assert row.mu >= CFG.mu_floor
    for row in t:
        assert row.mu <= max(CFG.eta * row.phi, CFG.eps)
        assert row.gamma * row.phi <= row.mu * (1 + 1e-15)
    assert t[-1].mu <= CFG.eps and t[-1].phi <= CFG.eps


def test_exact_kkt_start_stops_immediately():
    r = solve(wb_problem(), x0=[2.0], s0=[0.0, 1.0])
    assert r.status is Status.KKT_SOLVED and r.counters.iterations == 0
    assert r.trace[0].guard_loops > 0


def test_guard_converged_status():
    r = solve(wb_problem(), x0=[2.0], s0=[0.0, 1.0], cfg=SolverConfig(guard_max_loops=3))
    assert r.status is Status.GUARD_CONVERGED and r.success
    assert r.final.phi <= 1e-8


def test_guard_hard_error():
    with pytest.raises(GuardLoopError):
        solve(wb_problem(), x0=[2.0], s0=[0.0, 1.0], cfg=SolverConfig(guard_max_loops=1))


@pytest.mark.parametrize("name", ["hs035", "hs076"])
def test_convex_qp(name):
    r = solve(registry(name))
    assert r.status is Status.KKT_SOLVED
    assert r.final.E <= 1e-8 and r.counters.iterations <= 500
    xs, fs = registry(name).known_solution
    assert r.x == pytest.approx(xs, abs=1e-6)


def test_max_iters():
    r = solve(registry("hs001"), cfg=SolverConfig(max_iters=3))
    assert r.status is Status.MAX_ITERS and r.counters.iterations == 3 and not r.success


def test_small_step_status():
    r = solve(registry("hs005"))
    assert r.status is Status.SMALL_STEP and "alpha" in r.message


def test_degenerate_status():
    r = solve(registry("hs009"))
    assert r.status is Status.DEGENERATE_KKT and len(r.trace) == 1


def test_default_multipliers():
    p = registry("hs028")
    x0 = p.initial_point()
    lam = default_multipliers(p, x0, np.ones(p.m_ineq))
    pt = evaluate_point(p, x0)
    ref = np.linalg.lstsq(pt.jac_h, pt.grad_f - pt.jac_g @ np.ones(p.m_ineq), rcond=None)[0]
    assert lam == pytest.approx(ref)
    assert default_multipliers(wb_problem(), np.array([1.0]), np.ones(2)).size == 0


def test_callback_sees_every_step():
    seen = []
    r = solve(wb_problem(), callback=lambda it, d, sys_: seen.append((it.k, d.alpha, sys_ is not None)))
    assert [k for k, _, _ in seen] == list(range(r.counters.iterations))
    assert all(a is not None and has for _, a, has in seen)


def test_lp_reduced_path():
    p = registry("lp-5")
    full, red = solve(p), solve(p, lp_reduced=True)
    assert red.status is Status.KKT_SOLVED
    assert red.counters.iterations == full.counters.iterations
    assert red.x == pytest.approx(full.x, abs=1e-8)
    with pytest.raises(ValueError):
        solve(wb_problem(), lp_reduced=True)


def test_bad_start_dimensions():
    with pytest.raises(ValueError):
        solve(wb_problem(), x0=[1.0, 2.0])
    with pytest.raises(ValueError):
        solve(wb_problem(), s0=[1.0])


def test_arbitrary_start_needs_no_interiority():
    # x0 violates both inequalities
    r = solve(wb_problem(), x0=[-10.0], s0=[3.0, -1.0])
    assert r.status is Status.KKT_SOLVED and abs(r.x[0] - 2.0) <= 1e-6


def test_deterministic():
    a, b = solve(registry("hs071")), solve(registry("hs071"))
    assert np.array_equal(a.x, b.x) and a.counters.iterations == b.counters.iterations


def test_mu_never_rises_when_gamma_is_mu_over_phi():
    # hs001 starts with mu/phi < gamma0, where -mu + gamma*phi rounds to +1e-17
    r = solve(registry("hs001"))
    assert r.trace[0].gamma < CFG.gamma0 and r.trace[0].d_mu == 0.0
    assert all(b.mu <= a.mu for a, b in zip(r.trace, r.trace[1:]))
