import numpy as np
import pytest

from frics_sim.errors import OutOfBandError
from frics_sim.fss_circuit import ShuntResonator, Topology, VaractorModel, resonant_frequency
from frics_sim.tuner import TuneRequest, achievable_band, tune_bias, tuned_stack

VAR = VaractorModel()
L_A = 0.365e-9


def test_achievable_band_default():
    band = achievable_band(VAR, L_A)
    assert band.f_low == pytest.approx(5.481099795945883e9, rel=1e-12)
    assert band.f_high == pytest.approx(17.004664922198874e9, rel=1e-12)
    assert band.f_low < band.f_high


def test_band_scales_with_root_inductance():
    a = achievable_band(VAR, 1e-9)
    b = achievable_band(VAR, 4e-9)
    assert b.f_low == pytest.approx(a.f_low / 2)
    assert b.f_high == pytest.approx(a.f_high / 2)


def test_degenerate_varactor_has_zero_width_band():
    flat = VaractorModel(c_zero_bias=1e-12, c_min=1e-12)
    band = achievable_band(flat, L_A)
    assert band.f_low == band.f_high


def test_tune_to_17ghz():
    res = tune_bias(TuneRequest(VAR, L_A, Topology.SERIES_LC, 17e9))
    assert res.bias == pytest.approx(19.0, abs=0.01)
    assert res.capacitance == pytest.approx(0.240e-12, rel=1e-3)
    assert abs(res.achieved - 17e9) / 17e9 <= 1e-6


def test_tune_to_lower_edge_is_zero_bias():
    band = achievable_band(VAR, L_A)
    res = tune_bias(TuneRequest(VAR, L_A, Topology.SERIES_LC, band.f_low))
    assert res.bias == 0.0


def test_out_of_band_carries_edges():
    with pytest.raises(OutOfBandError) as info:
        tune_bias(TuneRequest(VAR, L_A, Topology.SERIES_LC, 25e9))
    band = achievable_band(VAR, L_A)
    assert info.value.f_low == band.f_low
    assert info.value.f_high == band.f_high


def test_monotone_bias_in_target():
    band = achievable_band(VAR, L_A)
    targets = np.linspace(band.f_low, band.f_high, 200)
    biases = [tune_bias(TuneRequest(VAR, L_A, Topology.SERIES_LC, t)).bias for t in targets]
    assert all(b > a for a, b in zip(biases, biases[1:]))


def test_idempotent():
    first = tune_bias(TuneRequest(VAR, L_A, Topology.PARALLEL_LC, 12.3e9))
    again = tune_bias(TuneRequest(VAR, L_A, Topology.PARALLEL_LC, first.achieved))
    assert again.bias == pytest.approx(first.bias, abs=1e-9)


def test_tabulated_curve_round_trip():
    table = ((0.0, 2.31e-12), (3.0, 1.5e-12), (8.0, 0.7e-12), (19.0, 0.24e-12))
    model = VaractorModel(table=table)
    band = achievable_band(model, L_A)
    for t in np.linspace(band.f_low * 1.01, band.f_high * 0.99, 25):
        res = tune_bias(TuneRequest(model, L_A, Topology.SERIES_LC, t))
        assert abs(res.achieved - t) / t <= 1e-6


def test_quantized_bias():
    res = tune_bias(TuneRequest(VAR, L_A, Topology.SERIES_LC, 12e9, quantization_step=0.5))
    assert res.bias % 0.5 == pytest.approx(0.0, abs=1e-12)
    assert abs(res.achieved - 12e9) / 12e9 < 0.05


@pytest.mark.parametrize("tol", [0.0, 1e-2, -1.0])
def test_invalid_tolerance(tol):
    with pytest.raises(ValueError):
        TuneRequest(VAR, L_A, Topology.SERIES_LC, 10e9, tolerance=tol)


def test_tuned_stack_resonance():
    stack, res = tuned_stack(VAR, 0.32e-9, Topology.PARALLEL_LC, 18e9)
    resonator = stack.resonators[0]
    assert isinstance(resonator, ShuntResonator)
    assert resonant_frequency(resonator) == pytest.approx(18e9, rel=1e-6)
    assert resonator.resistance == VAR.r_series
