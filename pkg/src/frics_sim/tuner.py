"""Bias voltage selection that places a resonator on a target frequency.

This plays the role of the FPGA control layer: given the varactor curve and
the element inductance, find the reverse bias whose junction capacitance
resonates at the requested frequency.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError, OutOfBandError
from .fss_circuit import (
    DielectricSlab,
    FREE_SPACE_IMPEDANCE,
    LayerStack,
    ShuntResonator,
    Topology,
    VaractorModel,
    bias_for_capacitance,
    capacitance_at_bias,
    filter_stack,
    resonant_frequency,
)


class Band(NamedTuple):
    f_low: float
    f_high: float


class TuneResult(NamedTuple):
    bias: float
    achieved: float
    capacitance: float


@dataclass(frozen=True)
class TuneRequest:
    varactor: VaractorModel
    inductance: float
    topology: Topology
    target_frequency: float
    tolerance: float = 1e-6
    # None means continuous bias output
    quantization_step: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        if self.target_frequency <= 0:
            raise ValueError("target frequency must be positive")
        if not (0 < self.tolerance < 1e-2):
            raise ValueError("tolerance must lie in (0, 1e-2)")
        if self.inductance <= 0:
            raise ValueError("inductance must be positive")
        if self.quantization_step is not None and self.quantization_step <= 0:
            raise ValueError("quantization step must be positive")


def _resonance(inductance: float, capacitance: float) -> float:
    return 1.0 / (2 * math.pi * math.sqrt(inductance * capacitance))


def achievable_band(varactor: VaractorModel, inductance: float) -> Band:
    if inductance <= 0:
        raise ValueError("inductance must be positive")
    return Band(_resonance(inductance, varactor.c_zero_bias), _resonance(inductance, varactor.c_min))


def tune_bias(req: TuneRequest) -> TuneResult:
    band = achievable_band(req.varactor, req.inductance)
    f = req.target_frequency
    slack = 1e-12 * f
    if f < band.f_low - slack or f > band.f_high + slack:
        raise OutOfBandError(f, band.f_low, band.f_high)

    c_target = 1.0 / ((2 * math.pi * f) ** 2 * req.inductance)
    c_target = min(max(c_target, req.varactor.c_min), req.varactor.c_zero_bias)
    bias = bias_for_capacitance(req.varactor, c_target)

    if req.quantization_step is not None:
        step = req.quantization_step
        bias = min(round(bias / step) * step, req.varactor.v_max)

    cap = capacitance_at_bias(req.varactor, bias)
    achieved = resonant_frequency(ShuntResonator(req.topology, req.inductance, cap))
    if req.quantization_step is None and abs(achieved - f) / f > req.tolerance:
        raise DomainError(
            f"tuning missed target by {abs(achieved - f) / f:.3g} (relative), "
            f"tolerance {req.tolerance:g}"
        )
    return TuneResult(bias, achieved, cap)


def tuned_stack(
    varactor: VaractorModel,
    inductance: float,
    topology: Topology,
    center_frequency: float,
    slab: DielectricSlab | None = None,
    port_impedance: float = FREE_SPACE_IMPEDANCE,
) -> tuple[LayerStack, TuneResult]:
    """Filter stack biased so its resonator sits on ``center_frequency``."""
    result = tune_bias(TuneRequest(varactor, inductance, topology, center_frequency))
    stack = filter_stack(
        topology, inductance, result.capacitance, varactor.r_series, slab, port_impedance
    )
    return stack, result
