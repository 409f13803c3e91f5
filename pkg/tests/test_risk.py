import math

import numpy as np
import pytest

from helpers import naive_center_bounds

from qtvd.intervals import DiscreteInterval
from qtvd.risk import (
    Cauchy,
    ConstantSignal,
    Gaussian,
    HolderCusp,
    Laplace,
    ModelSpec,
    PiecewiseConstantSignal,
    RiskConstants,
    bias_terms,
    bound_components,
    dist_boundary,
    growth_constants,
    lambda_star,
    pointwise_bounds,
    rate_regress,
    sd_bound,
    simulate,
    smallest_admissible_n,
)

DI = DiscreteInterval


class TestNoise:
    @pytest.mark.parametrize("noise", [Cauchy(1.0), Gaussian(1.0), Laplace(1.0), Cauchy(0.3), Laplace(2.0)])
    @pytest.mark.parametrize("tau", [0.3, 0.5, 0.75])
    def test_cdf_at_zero_is_tau(self, noise, tau):
        assert noise.cdf(0.0, tau) == pytest.approx(tau, abs=1e-12)

    def test_centering_frequency(self):
        # empirical fraction of draws below zero stays within 3e-3 of tau
        rng = np.random.default_rng(2024)
        for noise in (Cauchy(1.0), Gaussian(1.0), Laplace(1.0)):
            for tau in (0.25, 0.5, 0.9):
                draws = noise.sample(rng, 1_000_000, tau)
                assert abs(float(np.mean(draws < 0)) - tau) < 3e-3

    def test_cauchy_growth_constant_closed_form(self):
        c1, delta = growth_constants(Cauchy(1.0), 0.5, 1.0)
        assert delta == 1.0
        assert c1 == pytest.approx(1.0 / (math.pi * (1.0 + 1.0**2)), rel=1e-15)

    @pytest.mark.parametrize("noise", [Cauchy(1.0), Gaussian(1.0), Laplace(1.0)])
    @pytest.mark.parametrize("tau", [0.3, 0.5, 0.8])
    def test_growth_condition_on_grid(self, noise, tau):
        c1, delta = growth_constants(noise, tau)
        for t in np.linspace(-delta, delta, 401):
            assert abs(noise.cdf(float(t), tau) - tau) >= c1 * abs(t) - 1e-12

    def test_degenerate_scale_rejected_for_constants(self):
        with pytest.raises(ValueError):
            growth_constants(Cauchy(0.0), 0.5)


class TestSignals:
    def test_holder_norm_spot_check(self):
        for alpha in (0.5, 1.0):
            sig = HolderCusp(alpha, norm=2.0, x0=0.5)
            vals = sig.values(257)
            x = np.arange(1, 258) / 257
            for a in range(0, 257, 16):
                for b in range(a + 1, 257, 16):
                    bound = 2.0 * abs(x[a] - x[b]) ** alpha
                    assert abs(vals[a] - vals[b]) <= bound + 1e-12

    def test_piecewise_constant_levels(self):
        sig = PiecewiseConstantSignal((0.5,), (1.0, 3.0))
        vals = sig.values(4)
        assert list(vals) == [1.0, 1.0, 3.0, 3.0]
        assert sig.local_radius(0.25) == 0.25

    def test_piecewise_validation(self):
        with pytest.raises(ValueError):
            PiecewiseConstantSignal((0.5,), (1.0,))
        with pytest.raises(ValueError):
            PiecewiseConstantSignal((0.0,), (1.0, 2.0))

    def test_ramp_profile(self):
        sig = HolderCusp(1.0, norm=1.0, profile="ramp")
        vals = sig.values(10)
        assert vals[-1] == pytest.approx(1.0)
        assert all(b > a for a, b in zip(vals, vals[1:]))


class TestBoundPieces:
    def test_bias_constant_signal(self):
        assert bias_terms([2.0] * 5, 3, DI(1, 5)) == (0.0, 0.0)

    def test_bias_ramp(self):
        assert bias_terms([0, 1, 2], 1, DI(1, 3)) == (2, 0)

    def test_bias_lipschitz_window(self):
        n = 100
        theta = [k / n for k in range(1, n + 1)]
        plus, minus = bias_terms(theta, 50, DI(40, 60))
        assert plus <= 10 / n + 1e-12 and minus >= -10 / n - 1e-12

    def test_bias_requires_membership(self):
        with pytest.raises(ValueError):
            bias_terms([1, 2, 3], 1, DI(2, 3))

    def test_dist_interior(self):
        assert dist_boundary(50, DI(40, 70), 100, 0.5) == 11

    def test_dist_left_boundary_regime(self):
        assert dist_boundary(1, DI(1, 30), 100, 1.0) == 30

    def test_dist_symmetric_center(self):
        assert dist_boundary(10, DI(5, 15), 100, 0.1) == 6 == min(10 - 5 + 1, 15 - 10 + 1)

    def test_sd_scales_with_c_tilde(self):
        base = RiskConstants(c1=0.2, c_tilde=4.0)
        double = RiskConstants(c1=0.2, c_tilde=8.0)
        j = DI(10, 40)
        assert sd_bound(20, j, 5.0, 100, 0.5, double) == pytest.approx(
            2 * sd_bound(20, j, 5.0, 100, 0.5, base)
        )

    def test_sd_dominated_by_lam_over_len_for_large_lam(self):
        const = RiskConstants(c1=0.2)
        j = DI(10, 40)
        lam = 1e9
        val = sd_bound(20, j, lam, 100, 0.5, const)
        assert val == pytest.approx(const.c_tilde * lam / j.length, rel=1e-6)

    def test_sd_direct_formula_recomputation(self):
        n, tau = 4096, 0.5
        j = DI(1537, 2560)
        lam = math.sqrt(math.log(n) * j.length)
        const = RiskConstants(c1=1.0 / (2 * math.pi), c_tilde=4.0, C1=1.0)
        dist = min(2048 - 1537 + 1, 2560 - 2048 + 1)
        expected = 4.0 * (
            math.sqrt(math.log(n) / dist) + tau * math.log(n) / lam + lam / 1024
        )
        assert sd_bound(2048, j, lam, n, tau, const) == pytest.approx(expected, rel=1e-15)

    def test_sd_rejects_nonpositive_lam(self):
        with pytest.raises(ValueError):
            sd_bound(2, DI(1, 3), 0.0, 10, 0.5, RiskConstants(c1=0.2))

    def test_bound_components_record(self):
        const = RiskConstants(c1=0.25)
        comp = bound_components([0, 1, 2, 1], 2, DI(1, 4), 3.0, 4, 0.5, const)
        assert comp.bias_plus == 1 and comp.bias_minus == -1
        assert comp.bias_plus >= 0 >= comp.bias_minus
        assert comp.dist == dist_boundary(2, DI(1, 4), 4, const.C1)
        assert comp.constants["C"] == pytest.approx(const.lambda_coefficient(0.5))


class TestPointwiseBounds:
    def setup_method(self):
        self.const = RiskConstants.for_noise(Cauchy(1.0), 0.5)

    def test_constant_signal_upper_is_min_sd(self):
        n, tau = 1024, 0.5
        lam = lambda_star(n, 2.0, r0=0.125)
        b = pointwise_bounds([0.0] * n, tau, lam, self.const, locations=[512])
        best = min(
            sd_bound(512, DI(j1, j2), lam, n, tau, self.const)
            for j1 in range(2, 513)
            for j2 in range(512, n)
            if (j2 - j1 + 1) > self.const.min_interval_length(lam)
            and min(512 - j1 + 1, j2 - 512 + 1) >= self.const.C1 * math.log(n)
        )
        assert b.upper[0] == pytest.approx(best, rel=1e-12)

    def test_symmetry_at_median_level(self):
        n = 1024
        lam = lambda_star(n, 2.0, r0=0.125)
        b = pointwise_bounds([0.0] * n, 0.5, lam, self.const, locations=[500])
        assert b.upper[0] == pytest.approx(-b.lower[0], rel=1e-12)

    def test_agrees_with_independent_enumerator(self):
        n = 192
        sig = HolderCusp(1.0, 1.0, 0.5).values(n)
        const = RiskConstants(c1=0.3, C1=1.0)
        lam = max(10.0, const.lambda_floor(n, 0.4))
        for i in (1, 3, 96, 150, n - 2, n):
            got = pointwise_bounds(sig, 0.4, lam, const, locations=[i], allow_small_lambda=True)
            ref_l, ref_u = naive_center_bounds(sig, 0.4, lam, const, i)
            if ref_u is None:
                assert got.flagged == (i,)
            else:
                assert got.upper[0] == pytest.approx(ref_u, rel=1e-12)
                assert got.lower[0] == pytest.approx(ref_l, rel=1e-12)

    def test_small_lambda_rejected_without_override(self):
        with pytest.raises(ValueError):
            pointwise_bounds([0.0] * 64, 0.5, 1.0, self.const, locations=[32])
        pointwise_bounds([0.0] * 64, 0.5, 1.0, self.const, locations=[32], allow_small_lambda=True)

    def test_empty_family_is_flagged(self):
        # lam so large that no interval satisfies the length constraint
        b = pointwise_bounds(
            [0.0] * 64, 0.5, 1e6, RiskConstants(c1=0.2), locations=[32], allow_small_lambda=True
        )
        assert b.flagged == (32,) and b.upper[0] is None and b.lower[0] is None

    def test_overlapping_boundary_regimes_are_flagged(self):
        # C1*log n spans more than half the grid: both one-sided regimes
        # would apply, so no bound is claimed
        const = RiskConstants(c1=0.3, C1=3.0)
        b = pointwise_bounds([0.0] * 8, 0.5, 2.0, const, locations=[4], allow_small_lambda=True)
        assert b.flagged == (4,)

    def test_smallest_admissible_n_report(self):
        n0 = smallest_admissible_n(self.const, 0.5, lambda n: lambda_star(n, 2.0, r0=0.125))
        assert n0 is not None
        assert 256 < n0 <= 1024  # Cauchy constants push past 2**8


class TestLambdaStar:
    def test_locally_constant_case(self):
        assert lambda_star(1024, 2.0, r0=0.5) == pytest.approx(math.sqrt(512 * math.log(1024)))

    def test_smooth_case(self):
        n = 4096
        b = math.floor(n ** (2 / 3) * math.log(n) ** (1 / 3))
        assert lambda_star(n, 1.0, 1.0) == pytest.approx(math.sqrt(math.log(n) * b))

    def test_monotone_in_n(self):
        for alpha in (0.5, 1.0, 2.0):
            assert lambda_star(2048, alpha) > lambda_star(1024, alpha)

    def test_validation(self):
        with pytest.raises(ValueError):
            lambda_star(1, 1.0)
        with pytest.raises(ValueError):
            lambda_star(16, 0.0)


class TestSimulate:
    def test_zero_noise_zero_lambda_is_exact(self):
        model = ModelSpec(32, 0.5, ConstantSignal(2.0), Cauchy(0.0), seed=1)
        rep = simulate(model, 0.0, 6)
        assert rep.errors == (0.0,) * 6
        assert rep.median_abs_error == 0.0

    def test_deterministic_given_seed(self):
        model = ModelSpec(128, 0.5, ConstantSignal(0.0), Cauchy(1.0), seed=9)
        r1 = simulate(model, 12.0, 10)
        r2 = simulate(model, 12.0, 10)
        assert r1.errors == r2.errors

    def test_replication_streams_independent_of_count(self):
        model = ModelSpec(64, 0.5, ConstantSignal(0.0), Laplace(1.0), seed=5)
        short = simulate(model, 6.0, 4)
        long = simulate(model, 6.0, 8)
        assert long.errors[:4] == short.errors

    def test_location_is_floor_n_x0(self):
        model = ModelSpec(100, 0.5, ConstantSignal(0.0), Gaussian(1.0), seed=2)
        rep = simulate(model, 5.0, 2, x0=0.333)
        assert rep.location == 33

    def test_certificates_checked(self):
        model = ModelSpec(256, 0.5, ConstantSignal(0.0), Cauchy(1.0), seed=4)
        rep = simulate(model, 20.0, 25)
        assert rep.certificate_failures == 0

    def test_summary_and_csv_rows(self):
        model = ModelSpec(64, 0.25, ConstantSignal(0.0), Gaussian(1.0), seed=8)
        rep = simulate(model, 8.0, 3)
        rows = list(rep.csv_rows())
        assert len(rows) == 3
        assert rows[0][:5] == (8, 64, 0.25, 8.0, 32)
        summary = rep.summary()
        assert summary["schema"] == "qtvd.risk/1"
        assert "runtime_seconds" not in summary
        assert "runtime_seconds" in rep.summary(include_runtime=True)

    def test_coverage_against_bounds(self):
        model = ModelSpec(1024, 0.5, ConstantSignal(0.0), Cauchy(1.0), seed=6)
        lam = lambda_star(1024, 2.0, r0=0.125)
        rep = simulate(model, lam, 30, compute_bounds=True)
        assert rep.bound_upper is not None and rep.bound_lower is not None
        assert rep.coverage == 1.0

    def test_cauchy_median_error_decreases_in_n(self):
        # no fixed numbers, only the monotone trend across the grid
        meds = []
        for n in (128, 512, 2048):
            model = ModelSpec(n, 0.5, ConstantSignal(0.0), Cauchy(1.0), seed=42)
            meds.append(simulate(model, lambda_star(n, 2.0, r0=0.5), 100, x0=0.5).median_abs_error)
        assert meds[0] > meds[1] > meds[2]

    def test_sign_balance_with_symmetric_noise(self):
        model = ModelSpec(512, 0.5, ConstantSignal(0.0), Cauchy(1.0), seed=7)
        rep = simulate(model, lambda_star(512, 2.0, r0=0.5), 200, x0=0.5)
        balance = float(np.mean(np.sign(rep.errors)))
        assert abs(balance) < 0.2


class TestRateRegress:
    def test_synthetic_cuberoot(self):
        ns = [256, 512, 1024, 2048]
        meds = [3.0 * n ** (-1 / 3) for n in ns]
        reg = rate_regress(ns, meds)
        assert reg.slope == pytest.approx(-1 / 3, abs=1e-12)
        assert reg.residual_std == pytest.approx(0.0, abs=1e-12)

    def test_constant_errors(self):
        reg = rate_regress([256, 512, 1024, 2048], [0.25] * 4)
        assert reg.slope == pytest.approx(0.0, abs=1e-12)

    def test_degenerate_grids_rejected(self):
        with pytest.raises(ValueError):
            rate_regress([256, 512, 1024], [1, 1, 1])
        with pytest.raises(ValueError):
            rate_regress([256] * 4, [1, 1, 1, 1])
        with pytest.raises(ValueError):
            rate_regress([256, 512, 1024, 2048], [1, 1, 0, 1])
