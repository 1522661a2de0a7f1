import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from secrecysim.channel import ChannelRealization
from secrecysim.model import NetworkConfig
from secrecysim.sinr import lsma_sinrs, objective_from_sinrs, phi, relay_gain, sinrs

gain = st.floats(min_value=1e-2, max_value=1e5)
lam_st = st.floats(min_value=1e-4, max_value=1 - 1e-4)


class TestRelayGain:
    def test_equal_gains_half(self):
        assert relay_gain(ChannelRealization(1.0, 1.0, 0.0), 0.5, 1.0) == pytest.approx(0.5)

    def test_noise_only(self):
        assert relay_gain(ChannelRealization(5.0, 0.0, 0.0), 1e-9, 1.0) == pytest.approx(1.0, rel=1e-8)

    def test_substitution(self):
        assert relay_gain(ChannelRealization(100.0, 10.0, 40.0), 0.3, 1.0) == pytest.approx(1 / 78)

    @pytest.mark.parametrize("lam", [0.0, 1.0, -0.1, float("nan")])
    def test_lambda_domain(self, lam):
        with pytest.raises(ValueError):
            relay_gain(ChannelRealization(1.0, 1.0, 1.0), lam, 1.0)


class TestSinrs:
    def test_symmetric_point(self):
        g = 7.0
        s = sinrs(ChannelRealization(g, g, 0.0), 0.5, 1.0, 1.0)
        assert s.gamma_bs == pytest.approx((g * g / 2) / (2 * g + 1))
        assert s.gamma_mu == pytest.approx(s.gamma_bs)

    def test_relay_substitution(self):
        s = sinrs(ChannelRealization(1000.0, 20.0, 100.0), 0.3, 1.0, 0.0)
        assert s.gamma_r == pytest.approx(3.14)

    def test_jamming_dominates(self):
        s = sinrs(ChannelRealization(100.0, 20.0, 1e15), 0.4, 1.0, 0.0)
        assert max(s.gamma_bs, s.gamma_mu, s.gamma_r) < 1e-9

    def test_singular_relay(self):
        with pytest.raises(ValueError, match="relay SINR singular"):
            sinrs(ChannelRealization(1.0, 1.0, 0.0), 0.5, 1.0, 0.0)

    @settings(max_examples=200, deadline=None)
    @given(gain, gain, gain, lam_st, lam_st)
    def test_monotone_in_lambda(self, b, m, f, l1, l2):
        if abs(l1 - l2) < 1e-6:
            return
        lo, hi = sorted((l1, l2))
        a = sinrs(ChannelRealization(b, m, f), lo)
        c = sinrs(ChannelRealization(b, m, f), hi)
        assert c.gamma_bs < a.gamma_bs and c.gamma_mu > a.gamma_mu
        if b > m:
            assert c.gamma_r > a.gamma_r

    @settings(max_examples=100, deadline=None)
    @given(gain, gain, gain, lam_st)
    def test_relay_decreasing_in_jamming(self, b, m, f, lam):
        assert sinrs(ChannelRealization(b, m, 2 * f), lam).gamma_r < sinrs(ChannelRealization(b, m, f), lam).gamma_r


class TestObjective:
    def test_no_signal(self):
        cfg = NetworkConfig(epsilon_relay=1.0)
        obj = phi(ChannelRealization(0.0, 0.0, 0.0), 0.5, cfg)
        assert obj.phi == 1.0 and obj.rs == 0.0

    def test_clamped_rate(self):
        obj = phi(ChannelRealization(1.0, 1.0, 1e-6), 0.5, NetworkConfig())
        assert obj.phi < 1 and obj.rs == 0.0

    def test_lsma_form(self):
        ch = ChannelRealization(1000.0, 30.0, 50.0)
        s = lsma_sinrs(ch)
        assert s.gamma_r == 1.0
        x = 50.0 / 1000.0
        gbs = 30.0 * (1 - x) / (1 + 2 * x)
        assert objective_from_sinrs(s).phi == pytest.approx((1 + gbs) * (1 + 15.0) / 2)

    @settings(max_examples=100, deadline=None)
    @given(gain, gain, gain)
    def test_single_peaked(self, b, m, f):
        lam = np.linspace(1e-3, 1 - 1e-3, 999)
        vals = phi(ChannelRealization(b, m, f), lam, NetworkConfig()).phi
        d = np.diff(vals)
        # ignore steps lost in rounding on flat stretches
        sig = np.sign(d[np.abs(d) > 1e-12 * np.max(vals)])
        assert np.sum(np.diff(sig) != 0) <= 1
        assert np.all(vals > 0)

    @settings(max_examples=100, deadline=None)
    @given(gain, gain, gain, lam_st)
    def test_rate_non_negative(self, b, m, f, lam):
        assert phi(ChannelRealization(b, m, f), lam, NetworkConfig()).rs >= 0
