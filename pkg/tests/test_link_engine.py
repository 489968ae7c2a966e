import math
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from frics_sim.errors import DomainError, InBandInterfererWarning
from frics_sim.fss_circuit import SPEED_OF_LIGHT
from frics_sim.link_engine import (
    LinkPath,
    NoiseSpec,
    energy_efficiency,
    from_db,
    noise_power_dbm,
    path_loss_db,
    shannon_rate,
    sinr_design_a,
    sinr_from_coupling,
    snr_design_b,
    to_db,
)
from frics_sim.surface_models import FricsA, FricsB, PassiveRis, PowerModel, StarRis, surface_power_consumption

NOISE = NoiseSpec()
D2D = LinkPath(10.0, 14e9)
INTERFERER = LinkPath(20.0, 14e9)


class TestPathLoss:
    @pytest.mark.parametrize(
        "f, d, expected",
        [(17e9, 10.0, 77.05676164944884), (17e9, 20.0, 83.07736156272847)],
    )
    def test_friis(self, f, d, expected):
        assert path_loss_db(LinkPath(d, f)) == pytest.approx(expected, abs=1e-9)
        assert path_loss_db(LinkPath(d, f)) == pytest.approx(oracles.friis_loss_db(f, d), abs=1e-9)

    def test_reference_distance(self):
        f = 17e9
        assert path_loss_db(LinkPath(SPEED_OF_LIGHT / (4 * math.pi * f), f)) == pytest.approx(0, abs=1e-9)

    def test_general_exponent(self):
        base = path_loss_db(LinkPath(1.0, 17e9, 3.0))
        assert path_loss_db(LinkPath(10.0, 17e9, 3.0)) == pytest.approx(base + 30.0)

    def test_exponent_two_branches_agree(self):
        assert path_loss_db(LinkPath(7.0, 9e9, 2.0)) == pytest.approx(
            path_loss_db(LinkPath(1.0, 9e9, 2.0)) + 20 * math.log10(7.0)
        )

    def test_invalid(self):
        with pytest.raises(ValueError):
            LinkPath(10.0, 17e9, 1.5)


class TestNoise:
    @pytest.mark.parametrize(
        "spec, expected",
        [
            (NoiseSpec(290, 1e6, 0), -113.97518719422811),
            (NoiseSpec(290, 2e6, 0), -110.9648872375883),
            (NoiseSpec(290, 1e6, 5), -108.97518719422811),
        ],
    )
    def test_ktb(self, spec, expected):
        assert noise_power_dbm(spec) == pytest.approx(expected, abs=1e-9)
        assert noise_power_dbm(spec) == pytest.approx(
            oracles.thermal_noise_dbm(spec.temperature, spec.bandwidth, spec.noise_figure_db), abs=1e-9
        )


class TestSinr:
    def test_noise_limited(self):
        # signal -52.37 dBm against -113.975 dBm of noise
        sinr = sinr_from_coupling(23.0, 30.0, D2D, INTERFERER, 0.0, NOISE)
        assert sinr == pytest.approx(61.60484325877998, abs=1e-9)

    def test_end_to_end_with_small_leak(self):
        # oracle: 19.47790868255838 dB
        sinr = sinr_design_a(23.0, 30.0, D2D, INTERFERER, PassiveRis(0.009), NOISE)
        assert sinr == pytest.approx(19.47790868255838, abs=1e-9)

    def test_equal_signal_and_impairment(self):
        s = 20.0 - path_loss_db(D2D)
        interferer_p = s + path_loss_db(INTERFERER)
        sinr = sinr_from_coupling(20.0, interferer_p, D2D, INTERFERER, 1.0, NoiseSpec(1e-9, 1e-9))
        assert sinr == pytest.approx(0.0, abs=1e-6)

    def test_interference_free_limit(self):
        snr = sinr_from_coupling(23.0, 30.0, D2D, INTERFERER, 0.0, NOISE)
        assert sinr_from_coupling(23.0, 30.0, D2D, INTERFERER, 1e-15, NOISE) == pytest.approx(snr, abs=1e-6)

    @pytest.mark.parametrize("kind", [PassiveRis(), StarRis(), PassiveRis(0.5)])
    def test_monotone(self, kind):
        grid = range(15, 40)
        up = [sinr_design_a(p, 30.0, D2D, INTERFERER, kind, NOISE) for p in grid]
        assert all(b > a for a, b in zip(up, up[1:]))
        down = [sinr_design_a(23.0, p, D2D, INTERFERER, kind, NOISE) for p in grid]
        assert all(b <= a for a, b in zip(down, down[1:]))

    def test_in_band_interferer_warns(self, stack_a):
        with pytest.warns(InBandInterfererWarning):
            sinr_design_a(23.0, 30.0, D2D, LinkPath(20.0, 17e9), FricsA(stack_a), NOISE)

    def test_out_of_band_interferer_silent(self, stack_a):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            sinr_design_a(23.0, 30.0, D2D, INTERFERER, FricsA(stack_a), NOISE)


class TestSnrDesignB:
    def test_gain_two_is_three_db(self):
        from frics_sim.fss_circuit import Topology, filter_stack, resonant_frequency

        stack = filter_stack(Topology.PARALLEL_LC, 0.32e-9, 0.25e-12)
        f0 = resonant_frequency(stack.resonators[0])
        path = LinkPath(30.0, f0)
        doubled = snr_design_b(20.0, path, FricsB(stack, 2.0), True, NOISE)
        unit = snr_design_b(20.0, path, FricsB(stack, 1.0), True, NOISE)
        assert doubled - unit == pytest.approx(10 * math.log10(2), abs=1e-9)

    def test_passive_has_no_transmit_path(self):
        assert snr_design_b(20.0, LinkPath(30.0, 18e9), PassiveRis(), True, NOISE) is None

    def test_frics_b_out_of_band_reflection(self, stack_b):
        from frics_sim.fss_circuit import stack_response

        path = LinkPath(15.0, 15e9)
        s11, _ = stack_response(stack_b, [15e9])
        unit = 20.0 - path_loss_db(path) - noise_power_dbm(NOISE)
        snr = snr_design_b(20.0, path, FricsB(stack_b), False, NOISE)
        assert snr - unit == pytest.approx(20 * math.log10(abs(s11[0])), abs=1e-9)
        # a mild penalty relative to a perfect mirror
        assert -2.0 < snr - unit < 0.0

    def test_direct_term(self):
        path = LinkPath(30.0, 18e9)
        snr = snr_design_b(20.0, path, PassiveRis(), True, NOISE, direct_gain=1.0)
        assert snr == pytest.approx(20.0 - path_loss_db(path) - noise_power_dbm(NOISE))


class TestRateAndEfficiency:
    @pytest.mark.parametrize(
        "bw, sinr, expected",
        [(1e6, 0.0, 1e6), (1e6, 20.0, 6658211.482751795), (2e6, 0.0, 2e6)],
    )
    def test_shannon(self, bw, sinr, expected):
        assert shannon_rate(bw, sinr) == pytest.approx(expected, rel=1e-12)

    def test_no_path_rate(self):
        assert shannon_rate(1e6, None) == 0.0

    def test_ee_ratio(self):
        assert energy_efficiency(1.68e6, 1.68) == pytest.approx(1e6)
        assert energy_efficiency(2 * 3e6, 1.68) == pytest.approx(2 * energy_efficiency(3e6, 1.68))

    def test_ee_power_quotient(self, stack_a):
        pm = PowerModel()
        rate = shannon_rate(1e6, 25.0)
        ratio = energy_efficiency(rate, surface_power_consumption(FricsA(stack_a), pm)) / energy_efficiency(
            rate, surface_power_consumption(PassiveRis(), pm)
        )
        assert ratio == pytest.approx(1.93 / 1.68, rel=1e-12)

    def test_zero_power(self):
        with pytest.raises(DomainError):
            energy_efficiency(1.0, 0.0)

    @given(st.floats(-50, 80), st.floats(-50, 80))
    def test_rate_monotone(self, a, b):
        lo, hi = sorted((a, b))
        assert shannon_rate(1e6, lo) <= shannon_rate(1e6, hi)
        assert shannon_rate(1e6, lo) > 0


@given(st.floats(-200, 200))
def test_db_round_trip(x):
    assert to_db(from_db(x)) == pytest.approx(x, abs=1e-12)
