# tests/test_acceptance.py
"""End-to-end properties of the ordering and polarization machinery."""
import numpy as np
import pytest

from polarorder.core.channel import (
    delta_distribution,
    make_bec,
    make_bsc,
    make_z,
    symmetrize,
)
from polarorder.core.delta import abs_distribution, b_distribution, expectation_phi
from polarorder.core.examples import zbsc_study
from polarorder.core.functionals import BUILTIN_FUNCTIONALS, power
from polarorder.core.infoset import containment_grid
from polarorder.core.ordering import (
    cut_criterion,
    cx_check,
    degradation_check,
    dominating_bec_bhattacharyya,
    dominating_bec_variational,
    find_mean_preserving_kernel,
    icx_check,
    symmetric_convex_check,
)
from polarorder.core.polar import channel_minus, channel_plus, f_plus_compose, minus_transform, plus_transform

from tests.factories import (
    TOL_EXACT,
    TOL_QUANT,
    degraded_pair,
    mean_preserving_spread,
    random_channel,
    random_distribution,
    symmetric_convex_pair,
)

P_GRID = [0.1, 0.25, 0.5, 0.75, 0.9]
EPS_GRID = [0.5, 0.2, 0.1, 0.01]
COMPOSE_FUNCTIONALS = {**BUILTIN_FUNCTIONALS, "power(2)": power(2)}


class TestZChannelVersusBsc:
    @pytest.mark.parametrize("p", P_GRID)
    def test_degradation_threshold(self, p):
        threshold = p / (1 + p)
        assert degradation_check(make_z(p), make_bsc(min(threshold + 1e-6, 0.5))).holds
        assert not degradation_check(make_z(p), make_bsc(threshold - 1e-6)).holds

    @pytest.mark.parametrize("p", P_GRID)
    def test_symmetric_convex_threshold(self, p):
        assert symmetric_convex_check(make_bsc(p / 2 + 1e-6), make_z(p)).holds
        assert not symmetric_convex_check(make_bsc(p / 2 - 1e-6), make_z(p)).holds

    @pytest.mark.parametrize("p", P_GRID)
    def test_bisection_agrees_with_closed_forms(self, p):
        report = zbsc_study(p)
        assert report.degradation_threshold == pytest.approx(p / (1 + p), abs=1e-6)
        assert report.symmetric_convex_threshold == pytest.approx(p / 2, abs=1e-6)
        assert report.symmetrization_threshold == pytest.approx(p / 2, abs=1e-6)
        assert report.strict

    def test_half_gives_one_third_and_one_quarter(self):
        report = zbsc_study(0.5)
        assert report.degradation_closed_form == pytest.approx(1 / 3, abs=1e-15)
        assert report.symmetric_convex_closed_form == 0.25


class TestOrderSurvivesPolarization:
    def test_random_pairs(self, rng):
        for _ in range(200):
            v, w = symmetric_convex_pair(rng)
            dv, dw = delta_distribution(v), delta_distribution(w)
            assert icx_check(abs_distribution(dv), abs_distribution(dw), tol=TOL_QUANT).holds
            for transform in (minus_transform, plus_transform):
                verdict = icx_check(abs_distribution(transform(dv)), abs_distribution(transform(dw)), tol=TOL_QUANT)
                assert verdict.holds, verdict.details


class TestInformationSetContainment:
    PHIS = [BUILTIN_FUNCTIONALS[name] for name in sorted(BUILTIN_FUNCTIONALS)]

    def assert_contained(self, reports):
        assert len(reports) == len(self.PHIS) * len(EPS_GRID)
        for report in reports:
            assert report.contained, (report.phi, report.eps, report.violations)

    def test_bec_pair(self):
        self.assert_contained(containment_grid(make_bec(0.5), make_bec(0.3), 8, self.PHIS, EPS_GRID))

    @pytest.mark.parametrize("p", [0.25, 0.5])
    def test_bsc_z_pairs(self, p):
        self.assert_contained(containment_grid(make_bsc(p / 2), make_z(p), 4, self.PHIS, EPS_GRID))

    @pytest.mark.parametrize("p", [0.25, 0.5])
    def test_bsc_z_pairs_at_depth_eight(self, p):
        reports = containment_grid(make_bsc(p / 2), make_z(p), 8, self.PHIS, EPS_GRID, budget=128, max_concurrency=4)
        self.assert_contained(reports)

    def test_random_degraded_pairs(self, rng):
        for _ in range(20):
            v, w = degraded_pair(rng, max_size=3)
            self.assert_contained(containment_grid(v, w, 2, self.PHIS, EPS_GRID))

    def test_random_degraded_pairs_with_budget(self, rng):
        for _ in range(20):
            v, w = degraded_pair(rng, max_size=3)
            self.assert_contained(containment_grid(v, w, 6, self.PHIS, EPS_GRID, budget=64))


class TestChannelAndDeltaRecursionsAgree:
    def check(self, w):
        dist = delta_distribution(w)
        assert minus_transform(dist).allclose(delta_distribution(channel_minus(w)), atol=TOL_EXACT)
        assert plus_transform(dist).allclose(delta_distribution(channel_plus(w)), atol=TOL_EXACT)

    @pytest.mark.parametrize("w", [make_bsc(0.1), make_bsc(0.3), make_bec(0.2), make_bec(0.6), make_z(0.4)])
    def test_standard_channels(self, w):
        self.check(w)

    def test_random_channels(self, rng):
        for _ in range(20):
            self.check(random_channel(rng, max_size=4))

    @pytest.mark.parametrize("eps", [0.1, 0.35, 0.8])
    def test_bec_closed_forms(self, eps):
        bec = delta_distribution(make_bec(eps))
        assert minus_transform(bec).allclose(delta_distribution(make_bec(2 * eps - eps ** 2)), atol=TOL_EXACT)
        assert plus_transform(bec).allclose(delta_distribution(make_bec(eps ** 2)), atol=TOL_EXACT)


class TestPlusCompositionIsConvex:
    @pytest.mark.parametrize("phi_name", sorted(COMPOSE_FUNCTIONALS))
    def test_second_differences(self, phi_name):
        phi = COMPOSE_FUNCTIONALS[phi_name]
        d1 = np.linspace(-1.0, 1.0, 201)
        d2 = np.linspace(-1.0, 1.0, 21)
        grid = f_plus_compose(phi, d1[:, None], d2[None, :])
        assert np.diff(grid, n=2, axis=0).min() >= -1e-8
        assert np.diff(grid, n=2, axis=1).min() >= -1e-8

    def test_symmetry(self, rng):
        d1, d2 = rng.uniform(-1, 1, 1000), rng.uniform(-1, 1, 1000)
        for phi in COMPOSE_FUNCTIONALS.values():
            np.testing.assert_allclose(f_plus_compose(phi, d1, d2), f_plus_compose(phi, -d1, d2), atol=TOL_EXACT)


class TestOrderingMachinery:
    def test_cut_criterion_is_sound(self, rng):
        confirmed = 0
        for _ in range(500):
            x, y = abs_distribution(random_distribution(rng)), abs_distribution(random_distribution(rng))
            if cut_criterion(x, y).holds:
                confirmed += 1
                assert icx_check(x, y, tol=TOL_QUANT).holds
        assert confirmed > 0

    def test_blackwell_kernel_iff_cx(self, rng):
        for i in range(200):
            x = random_distribution(rng, max_size=5)
            if i % 2:
                lhs, rhs = x, mean_preserving_spread(x, float(rng.uniform(0.05, 0.5)))
            else:
                lhs, rhs = mean_preserving_spread(x, float(rng.uniform(0.05, 0.5))), x
            cx = cx_check(lhs, rhs, tol=TOL_QUANT).holds
            kernel = find_mean_preserving_kernel(lhs, rhs)
            assert (kernel is not None) == cx
            if kernel is not None:
                np.testing.assert_allclose(kernel.rows @ rhs.values, lhs.values, atol=1e-9)
                np.testing.assert_allclose(lhs.weights @ kernel.rows, rhs.weights, atol=1e-9)

    def test_degradation_implies_cx(self, rng):
        for _ in range(200):
            v, w = degraded_pair(rng)
            dv, dw = delta_distribution(v), delta_distribution(w)
            assert dv.mean == pytest.approx(dw.mean, abs=1e-9)
            assert cx_check(dv, dw, tol=TOL_EXACT).holds


class TestSymmetrization:
    def test_functionals_are_invariant(self, rng):
        for _ in range(50):
            w = random_channel(rng)
            for phi in BUILTIN_FUNCTIONALS.values():
                before = expectation_phi(delta_distribution(w), phi)
                after = expectation_phi(delta_distribution(symmetrize(w)), phi)
                assert after == pytest.approx(before, abs=TOL_EXACT)

    def test_symmetrization_route_threshold(self):
        for p in (0.25, 0.5):
            assert zbsc_study(p).symmetrization_threshold == pytest.approx(p / 2, abs=1e-6)


class TestBecDomination:
    def test_random_channels(self, rng):
        for _ in range(50):
            w = random_channel(rng)
            dw = delta_distribution(w)
            bec_v = delta_distribution(make_bec(dominating_bec_variational(w)))
            assert icx_check(abs_distribution(dw), abs_distribution(bec_v), tol=TOL_EXACT).holds
            bec_b = delta_distribution(make_bec(dominating_bec_bhattacharyya(w)))
            assert icx_check(b_distribution(dw), b_distribution(bec_b), tol=TOL_EXACT).holds

    @pytest.mark.parametrize("eps", [0.0, 0.3, 0.7, 1.0])
    def test_bec_self_cases(self, eps):
        assert dominating_bec_variational(make_bec(eps)) == pytest.approx(eps, abs=TOL_EXACT)
        assert dominating_bec_bhattacharyya(make_bec(eps)) == pytest.approx(eps, abs=TOL_EXACT)
