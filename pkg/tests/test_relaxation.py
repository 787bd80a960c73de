import math

import mpmath
import numpy as np
import pytest

from conftest import central_diff
from ipr.problems import wb_problem
from ipr.relaxation import (
    DegenerateDerivativeError,
    RelaxationError,
    dF_drho,
    eval_F,
    eval_G,
    eval_pair,
    eval_pair_derivatives,
)

mpmath.mp.dps = 40


def mp_pair(w, s, mu, rho):
    """Unsimplified closed form in 40-digit arithmetic."""
    w, s, mu, rho = map(mpmath.mpf, (w, s, mu, rho))
    t = s - rho * w
    r = mpmath.sqrt(t * t + 4 * rho * mu)
    return float((r - t) / (2 * rho)), float((r + t) / (2 * rho))


def random_draws(rng, n):
    w = rng.uniform(-10, 10, n)
    s = rng.uniform(-10, 10, n)
    mu = float(rng.uniform(1e-12, 1.0))
    rho = float(rng.uniform(1e-12, 10.0))
    return w, s, mu, rho


class TestEvalPair:
    def test_reference_start_values(self):
        w, s = np.array([15.0, -6.0]), np.array([1.0, 1.0])
        p = eval_pair(w, s, 0.1, 1.0)
        for j in range(2):
            zr, yr = mp_pair(w[j], s[j], 0.1, 1.0)
            assert p.z[j] == pytest.approx(zr, rel=1e-14)
            assert p.y[j] == pytest.approx(yr, rel=1e-14)
        assert p.z == pytest.approx([14.00714, 0.01425], abs=1e-5)
        assert p.y == pytest.approx([0.00714, 7.01426], abs=1e-5)

    def test_mu_zero_is_the_kink(self):
        p = eval_pair(2.0, 1.0, 0.0, 1.0)
        assert p.z[0] == 1.0 and p.y[0] == 0.0
        p = eval_pair(-1.0, 1.0, 0.0, 1.0)
        assert p.z[0] == 0.0 and p.y[0] == 2.0

    def test_fixed_point(self):
        # w*s = mu gives z = w, y = s/rho
        p = eval_pair(1.0, 0.5, 0.5, 2.0)
        assert p.z[0] == pytest.approx(1.0, rel=1e-15)
        assert p.y[0] == pytest.approx(0.25, rel=1e-15)

    @pytest.mark.parametrize("w,s", [(-1e8, 1.0), (1e8, -1.0), (3.0, 1e9), (-5.0, -1e9)])
    def test_small_root_keeps_digits(self, w, s):
        p = eval_pair(w, s, 1e-6, 1.0)
        zr, yr = mp_pair(w, s, 1e-6, 1.0)
        assert p.z[0] == pytest.approx(zr, rel=1e-13)
        assert p.y[0] == pytest.approx(yr, rel=1e-13)

    def test_errors(self):
        with pytest.raises(RelaxationError):
            eval_pair([1.0, 2.0], [1.0], 0.1, 1.0)
        with pytest.raises(RelaxationError):
            eval_pair(1.0, 1.0, 0.1, 0.0)
        with pytest.raises(RelaxationError):
            eval_pair(1.0, 1.0, -1e-3, 1.0)

    def test_identities_on_1e5_draws(self, rng):
        for _ in range(10):
            w, s, mu, rho = random_draws(rng, 10_000)
            p = eval_pair(w, s, mu, rho)
            z, y = p.z, p.y
            assert np.all(z >= 0) and np.all(y >= 0)
            assert np.all(np.abs(z * y - mu / rho) <= 1e-10 * mu / rho)
            lhs, rhs = z - w, y - s / rho
            scale = np.maximum.reduce([np.abs(z), np.abs(w), np.abs(y), np.abs(s / rho)])
            assert np.all(np.abs(lhs - rhs) <= 1e-10 * scale)
            r = np.sqrt((s - rho * w) ** 2 + 4 * rho * mu)
            assert np.all(np.abs(rho * (z + y) - r) <= 1e-10 * r)

    def test_gap_identity(self, rng):
        w, s, mu, rho = random_draws(rng, 20_000)
        p = eval_pair(w, s, mu, rho)
        ok = np.abs(p.y + w) >= 1e-3
        lhs = p.z - w
        rhs = (mu - w * s) / (rho * (p.y + w))
        assert np.all(np.abs(lhs - rhs)[ok] <= 1e-9 * np.maximum(np.abs(lhs), 1e-300)[ok] + 1e-15)

    def test_gap_shrinks_with_rho(self, rng):
        w, s, _, _ = random_draws(rng, 500)
        mu = 0.3
        rhos = np.linspace(0.1, 10, 40)
        norms = [np.linalg.norm(eval_pair(w, s, mu, r).z - w) for r in rhos]
        assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))


class TestDerivatives:
    def test_symmetric_point(self):
        p = eval_pair(1.0, 1.0, 1.0, 1.0)
        assert p.z[0] == pytest.approx(1.0) and p.y[0] == pytest.approx(1.0)
        J = eval_pair_derivatives(p, 1.0, 1.0)
        expected = dict(dz_dw=0.5, dy_dw=-0.5, dz_ds=-0.5, dy_ds=0.5, dz_dmu=0.5, dy_dmu=0.5)
        for name, val in expected.items():
            assert getattr(J, name)[0] == pytest.approx(val, rel=1e-14)

    def test_partition_of_unity(self, rng):
        w, s, mu, rho = random_draws(rng, 1000)
        J = eval_pair_derivatives(eval_pair(w, s, mu, rho), w, s)
        assert np.all(np.abs(J.dz_dw - J.dy_dw - 1.0) <= 1e-12)

    def test_kink_is_degenerate(self):
        p = eval_pair(1.0, 1.0, 0.0, 1.0)
        with pytest.raises(DegenerateDerivativeError):
            eval_pair_derivatives(p, 1.0, 1.0)

    @staticmethod
    def _fd_jacobian(w, s, mu, rho):
        """Central differences of (z, y) in w, s, mu, rho (h = 1e-6*max(1,|v|))."""
        def zy(w_, s_, mu_, rho_):
            p = eval_pair(w_, s_, mu_, rho_)
            return np.stack([p.z, p.y])

        out = {}
        out["w"] = central_diff(lambda v: zy(v, s, mu, rho), w)
        out["s"] = central_diff(lambda v: zy(w, v, mu, rho), s)
        out["mu"] = central_diff(lambda v: zy(w, s, v, rho), mu)
        out["rho"] = central_diff(lambda v: zy(w, s, mu, v), rho)
        return out

    @classmethod
    def _check(cls, w, s, mu, rho, tol=1e-6):
        w, s = np.atleast_1d(w), np.atleast_1d(s)
        J = eval_pair_derivatives(eval_pair(w, s, mu, rho), w, s)
        fd = cls._fd_jacobian(w, s, mu, rho)
        pairs = [("w", J.dz_dw, J.dy_dw), ("s", J.dz_ds, J.dy_ds),
                 ("mu", J.dz_dmu, J.dy_dmu), ("rho", J.dz_drho, J.dy_drho)]
        worst = 0.0
        for key, dz, dy in pairs:
            an = np.stack([dz, dy])
            rel = np.abs(fd[key] - an) / np.abs(an)
            worst = max(worst, float(np.max(rel)))
        assert worst <= tol
        return worst

    def test_fd_at_reference_start(self):
        self._check(np.array([15.0, -6.0]), np.array([1.0, 1.0]), 0.1, 1.0)

    @staticmethod
    def _fd_mp(w, s, mu, rho):
        """Same central differences, function values in 40-digit arithmetic.

        In double precision the oracle's rounding floor is about eps*|z|/h,
        comparable to 1e-6 relative when a derivative such as dz/drho
        ~ (w - z) is itself tiny.
        """
        args = [mpmath.mpf(float(a)) for a in (w, s, mu, rho)]

        def zy(a):
            t = a[1] - a[3] * a[0]
            r = mpmath.sqrt(t * t + 4 * a[3] * a[2])
            return (r - t) / (2 * a[3]), (r + t) / (2 * a[3])

        out = []
        for k in range(4):
            h = mpmath.mpf(1e-6 * max(1.0, abs(float(args[k]))))
            up, dn = list(args), list(args)
            up[k] += h
            dn[k] -= h
            zu, yu = zy(up)
            zd, yd = zy(dn)
            out.append([float((zu - zd) / (2 * h)), float((yu - yd) / (2 * h))])
        return np.array(out)

    def test_fd_on_1e3_random_points(self, rng):
        w = rng.uniform(-10, 10, 1000)
        s = rng.uniform(-10, 10, 1000)
        mu = rng.uniform(1e-12, 1.0, 1000)
        rho = rng.uniform(1e-12, 10.0, 1000)
        checked = 0
        for i in range(1000):
            p = eval_pair(w[i], s[i], mu[i], rho[i])
            if p.z[0] + p.y[0] < 1e-4:
                continue
            J = eval_pair_derivatives(p, w[i], s[i])
            an = np.array([[J.dz_dw[0], J.dy_dw[0]], [J.dz_ds[0], J.dy_ds[0]],
                           [J.dz_dmu[0], J.dy_dmu[0]], [J.dz_drho[0], J.dy_drho[0]]])
            fd = self._fd_mp(w[i], s[i], mu[i], rho[i])
            assert np.all(np.abs(fd - an) <= 1e-6 * np.abs(an))
            checked += 1
        assert checked > 900


class TestG:
    def test_zero_at_unit_point(self):
        assert eval_G(1.0, 0.1, 0.1, 1.0) == pytest.approx(0.0, abs=1e-15)

    def test_value_at_maximizer(self):
        assert eval_G(math.e, 1.0 / math.e, 1.0, 1.0) == pytest.approx(-1.0, rel=1e-14)

    def test_grid_maximum(self):
        grid = np.linspace(-10.0, 10.0, 1_000_001)
        vals = eval_G(np.ones_like(grid), grid, 0.1, 1.0)
        k = int(np.argmax(vals))
        assert abs(grid[k] - 0.1) <= grid[1] - grid[0]
        assert vals[k] <= eval_G(1.0, 0.1, 0.1, 1.0) + 1e-9

    def test_strictly_concave_in_s(self, rng):
        w = rng.uniform(-10, 10, 1000)
        s = rng.uniform(-10, 10, 1000)
        mu, rho = 0.4, 2.0
        h = 1e-3
        second = eval_G(w, s + h, mu, rho) - 2 * eval_G(w, s, mu, rho) + eval_G(w, s - h, mu, rho)
        assert np.all(second < 0)

    def test_log_domain(self):
        with pytest.raises(RelaxationError):
            eval_G(-1.0, 1.0, 0.0, 1.0)

    def test_vector_input(self):
        out = eval_G(np.array([1.0, math.e]), np.array([0.1, 1 / math.e]), 0.1, 1.0)
        assert out.shape == (2,)


class TestF:
    def test_wb_at_maximizer(self):
        p = wb_problem()
        mu = 0.1
        x = np.array([2.5])
        s = np.array([mu / 5.25, mu / 0.5])
        assert eval_F(p, x, s, mu, 1.0) == pytest.approx(2.5 - mu * (math.log(5.25) + math.log(0.5)), rel=1e-13)

    def test_finite_at_infeasible_points(self):
        p = wb_problem()
        assert np.isfinite(eval_F(p, np.array([0.0]), np.array([3.0, -2.0]), 0.1, 1.0))

    def test_rho_derivative_matches_fd(self, rng):
        p = wb_problem()
        for _ in range(1000):
            x = rng.uniform(-5, 5, 1)
            s = rng.uniform(-10, 10, 2)
            mu, rho = float(rng.uniform(0.01, 1.0)), float(rng.uniform(0.1, 10.0))
            fd = central_diff(lambda r: eval_F(p, x, s, mu, r), rho)
            an = dF_drho(p, x, s, mu, rho)
            assert abs(fd - an) <= 1e-6 * max(abs(an), 1e-12)
