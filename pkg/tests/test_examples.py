# tests/test_examples.py
import pytest

from polarorder.core.channel import degrade, make_bsc, make_z
from polarorder.core.errors import ChannelValidationError
from polarorder.core.examples import bisect_threshold, degradation_interval, z_to_bsc_kernel, zbsc_study


class TestZToBscKernel:
    @pytest.mark.parametrize("p, alpha", [(0.5, 0.0), (0.5, 1.0), (0.25, 0.3), (0.9, 0.5)])
    def test_kernel_produces_a_bsc(self, p, alpha):
        eps = (p + (1 - p) * alpha) / (1 + p)
        v = degrade(make_z(p), z_to_bsc_kernel(p, alpha))
        assert v.row0[1] == pytest.approx(eps, abs=1e-12)
        assert v.row1[0] == pytest.approx(eps, abs=1e-12)

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            z_to_bsc_kernel(0.5, 1.5)

    def test_interval(self):
        lo, hi = degradation_interval(0.5)
        assert lo == pytest.approx(1 / 3)
        assert hi == pytest.approx(2 / 3)

    def test_rejects_bad_p(self):
        with pytest.raises(ChannelValidationError):
            degradation_interval(-0.1)


class TestBisection:
    def test_finds_threshold(self):
        assert bisect_threshold(lambda x: x >= 0.3, 0.0, 1.0, 1e-9) == pytest.approx(0.3, abs=1e-9)

    def test_true_at_lower_end(self):
        assert bisect_threshold(lambda x: True, 0.2, 0.5) == 0.2

    def test_never_true(self):
        with pytest.raises(ValueError):
            bisect_threshold(lambda x: False, 0.0, 1.0)


class TestZBscStudy:
    def test_half(self):
        report = zbsc_study(0.5, tol=1e-8)
        assert report.degradation_closed_form == pytest.approx(1 / 3)
        assert report.symmetric_convex_closed_form == 0.25
        assert report.degradation_threshold == pytest.approx(1 / 3, abs=1e-6)
        assert report.symmetric_convex_threshold == pytest.approx(0.25, abs=1e-6)
        assert report.symmetrization_threshold == pytest.approx(0.25, abs=1e-6)
        assert report.strict

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_limits_coincide(self, p):
        report = zbsc_study(p)
        assert report.degradation_threshold == pytest.approx(report.symmetric_convex_threshold, abs=1e-6)
        assert not report.strict

    def test_bsc_at_threshold_is_degraded(self):
        p = 0.25
        report = zbsc_study(p)
        assert degrade(make_z(p), z_to_bsc_kernel(p, 0.0)).row0[1] == pytest.approx(report.degradation_closed_form)
        assert make_bsc(report.degradation_threshold).row0[1] >= report.degradation_closed_form - 1e-6
