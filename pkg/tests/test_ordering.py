# tests/test_ordering.py
import numpy as np
import pytest

from polarorder.core.channel import (
    degrade,
    delta_distribution,
    make_bec,
    make_bsc,
    make_z,
    symmetrize,
)
from polarorder.core.delta import abs_distribution, stop_loss
from polarorder.core.examples import z_to_bsc_kernel
from polarorder.core.models import DeltaDistribution, KernelWitness, StopLossWitness
from polarorder.core.ordering import (
    blackwell_check,
    cut_criterion,
    cx_check,
    dcv_check,
    degradation_check,
    dominating_bec_bhattacharyya,
    dominating_bec_variational,
    find_mean_preserving_kernel,
    icx_check,
    order_check,
    posterior_kernel,
    symmetric_convex_check,
    symmetric_cx_equivalence,
)

from tests.factories import (
    TOL_EXACT,
    degraded_pair,
    mean_preserving_spread,
    random_channel,
    random_distribution,
    random_kernel,
)


def point(value):
    return DeltaDistribution.point_mass(value)


class TestIcx:
    def test_point_below_spread(self):
        spread = DeltaDistribution.from_atoms([0.0, 1.0], [0.5, 0.5])
        assert icx_check(point(0.5), spread).holds

    def test_witness_on_failure(self):
        verdict = icx_check(point(0.6), point(0.5))
        assert not verdict.holds
        assert isinstance(verdict.witness, StopLossWitness)
        w = verdict.witness
        assert w.lhs > w.rhs
        assert w.lhs == pytest.approx(stop_loss(point(0.6), w.t), abs=TOL_EXACT)

    def test_reflexive(self, rng):
        for _ in range(20):
            dist = random_distribution(rng)
            assert icx_check(dist, dist).holds
            assert dcv_check(dist, dist).holds
            assert cx_check(dist, dist).holds

    def test_dcv_is_reversed_icx(self):
        lo, hi = point(0.2), point(0.4)
        assert icx_check(lo, hi).holds
        assert not dcv_check(lo, hi).holds
        assert dcv_check(hi, lo).holds
        assert dcv_check(hi, lo).method == "dcv"

    def test_cx_needs_equal_means(self):
        verdict = cx_check(point(0.2), point(0.4))
        assert not verdict.holds
        assert verdict.details["mean_lhs"] == pytest.approx(0.2)

    def test_spread_is_cx_larger(self, rng):
        for _ in range(20):
            dist = random_distribution(rng)
            wide = mean_preserving_spread(dist, 0.2)
            assert cx_check(dist, wide).holds


class TestSymmetricConvex:
    def test_bsc_quarter_below_z_half(self):
        assert symmetric_convex_check(make_bsc(0.25), make_z(0.5)).holds

    def test_bsc_too_good(self):
        assert not symmetric_convex_check(make_bsc(0.2), make_z(0.5)).holds

    def test_bsc_family_is_ordered(self):
        for a, b in [(0.3, 0.1), (0.4, 0.2), (0.5, 0.0)]:
            assert symmetric_convex_check(make_bsc(a), make_bsc(b)).holds

    def test_equivalence_for_symmetric_channels(self, rng):
        outcomes = []
        for _ in range(100):
            v = symmetrize(random_channel(rng))
            w = symmetrize(random_channel(rng))
            sym, cx = symmetric_cx_equivalence(v, w)
            assert sym.holds == cx.holds, (sym.details, cx.details)
            outcomes.append(sym.holds)
        assert any(outcomes) and not all(outcomes)


class TestCut:
    def test_single_crossing(self):
        lhs = DeltaDistribution.from_atoms([0.2, 0.8], [0.5, 0.5])
        rhs = DeltaDistribution.from_atoms([0.0, 1.0], [0.5, 0.5])
        verdict = cut_criterion(lhs, rhs)
        assert verdict.holds
        assert verdict.witness.delta == pytest.approx(0.8)
        assert verdict.witness.sign_changes == 1

    def test_mean_condition(self):
        verdict = cut_criterion(point(0.6), point(0.5))
        assert not verdict.holds
        assert verdict.method == "cut"

    def test_multiple_crossings_are_inconclusive(self):
        lhs = DeltaDistribution.from_atoms([0.1, 0.5, 0.9], [0.3, 0.4, 0.3])
        rhs = DeltaDistribution.from_atoms([0.0, 0.3, 0.7, 1.0], [0.2, 0.3, 0.3, 0.2])
        verdict = cut_criterion(rhs, lhs)
        assert not verdict.holds
        assert verdict.method == "cut-inconclusive"
        assert verdict.witness.sign_changes >= 2

    def test_z_channels(self):
        lhs = abs_distribution(delta_distribution(make_bsc(0.25)))
        rhs = abs_distribution(delta_distribution(make_z(0.5)))
        assert cut_criterion(lhs, rhs).holds


class TestDegradation:
    def test_bsc_cascade(self):
        verdict = degradation_check(make_bsc(0.1), make_bsc(0.18))
        assert verdict.holds
        assert isinstance(verdict.witness, KernelWitness)
        assert verdict.witness.kind == "degrading_kernel"
        rebuilt = degrade(make_bsc(0.1), verdict.witness.kernel)
        np.testing.assert_allclose(rebuilt.matrix, make_bsc(0.18).matrix, atol=1e-9)

    def test_better_channel_is_not_degraded(self):
        assert not degradation_check(make_bsc(0.2), make_bsc(0.1)).holds

    def test_z_to_bsc(self):
        assert degradation_check(make_z(0.5), make_bsc(1 / 3 + 1e-6)).holds
        assert not degradation_check(make_z(0.5), make_bsc(0.25)).holds

    def test_implies_cx(self, rng):
        for _ in range(50):
            v, w = degraded_pair(rng)
            assert cx_check(delta_distribution(v), delta_distribution(w), tol=1e-12).holds


class TestBlackwell:
    def test_kernel_residuals(self, rng):
        for _ in range(30):
            x = random_distribution(rng, max_size=5)
            y = mean_preserving_spread(x, 0.3)
            kernel = find_mean_preserving_kernel(x, y)
            assert kernel is not None
            rows = kernel.rows
            np.testing.assert_allclose(rows @ y.values, x.values, atol=1e-9)
            np.testing.assert_allclose(x.weights @ rows, y.weights, atol=1e-9)

    def test_no_kernel_when_means_differ(self):
        assert find_mean_preserving_kernel(point(0.1), point(0.2)) is None

    def test_no_kernel_in_the_contracting_direction(self):
        y = DeltaDistribution.from_atoms([-0.5, 0.5], [0.5, 0.5])
        assert find_mean_preserving_kernel(y, point(0.0)) is None
        assert blackwell_check(point(0.0), y).holds

    def test_posterior_kernel_reproduces_degraded_delta(self, rng):
        for _ in range(30):
            w = random_channel(rng)
            kernel = random_kernel(rng, w.output_labels)
            v = degrade(w, kernel)
            posterior = posterior_kernel(w, kernel)
            delta_w = (w.row0 - w.row1) / (w.row0 + w.row1)
            delta_v = (v.row0 - v.row1) / (v.row0 + v.row1)
            np.testing.assert_allclose(posterior.rows @ delta_w, delta_v, atol=1e-12)


class TestBecDomination:
    def test_self_cases(self):
        assert dominating_bec_variational(make_bec(0.3)) == pytest.approx(0.3, abs=TOL_EXACT)
        assert dominating_bec_bhattacharyya(make_bec(0.3)) == pytest.approx(0.3, abs=TOL_EXACT)

    def test_bsc(self):
        assert dominating_bec_variational(make_bsc(0.25)) == pytest.approx(0.5, abs=TOL_EXACT)
        assert dominating_bec_bhattacharyya(make_bsc(0.25)) == pytest.approx(np.sqrt(0.75), abs=TOL_EXACT)


class TestOrderCheck:
    @pytest.mark.parametrize("method", ["icx", "dcv", "cx", "cut", "degradation", "blackwell", "symmetric"])
    def test_reflexive(self, method):
        w = make_z(0.3)
        assert order_check(w, w, method).holds

    def test_bsc_below_z_only_symmetrically(self):
        lhs, rhs = make_bsc(0.25), make_z(0.5)
        assert order_check(lhs, rhs, "symmetric").holds
        assert not order_check(lhs, rhs, "degradation").holds

    def test_degradation_direction(self):
        v = degrade(make_z(0.5), z_to_bsc_kernel(0.5, 0.0))
        assert order_check(v, make_z(0.5), "degradation").holds
        assert not order_check(make_z(0.5), v, "degradation").holds

    def test_bec_pair(self):
        assert order_check(make_bec(0.5), make_bec(0.3), "cx").holds
        assert order_check(make_bec(0.5), make_bec(0.3), "degradation").holds

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            order_check(make_bsc(0.1), make_bsc(0.1), "hazard")
