"""Power-domain scattering and power consumption of the compared surfaces.

Five surface kinds are modelled: passive, active and STAR RIS baselines, plus
the two filtering designs. Design A puts a bandstop filter in front of an
absorber; Design B puts a bandpass filter in front of an amplifying
computational layer.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DomainError
from .fss_circuit import LayerStack, Topology, stack_response

_EPS = 1e-9


def _check_fraction(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


def _check_gain(name: str, value: float) -> None:
    if value < 1.0:
        raise ValueError(f"{name} must be >= 1, got {value!r}")


@dataclass(frozen=True)
class AbsorberProfile:
    """Band-limited absorption: one fraction inside [f_low, f_high], another outside."""

    f_low: float
    f_high: float
    in_band_absorption: float
    out_band_absorption: float

    def __post_init__(self):
        if not (0 < self.f_low < self.f_high):
            raise ValueError("absorber band requires 0 < f_low < f_high")
        _check_fraction("in_band_absorption", self.in_band_absorption)
        _check_fraction("out_band_absorption", self.out_band_absorption)

    def absorption(self, f: float) -> float:
        if self.f_low <= f <= self.f_high:
            return self.in_band_absorption
        return self.out_band_absorption


@dataclass(frozen=True)
class PassiveRis:
    residual_interference_fraction: float = 0.10
    label: str = "passive_ris"

    def __post_init__(self):
        _check_fraction("residual_interference_fraction", self.residual_interference_fraction)


@dataclass(frozen=True)
class ActiveRis:
    amplification_power_gain: float = 2.0
    per_unit_milliwatts: float = 150.0
    unit_count: int = 64
    residual_interference_fraction: float = 0.02
    label: str = "active_ris"

    def __post_init__(self):
        _check_gain("amplification_power_gain", self.amplification_power_gain)
        _check_fraction("residual_interference_fraction", self.residual_interference_fraction)
        if self.per_unit_milliwatts < 0 or self.unit_count < 0:
            raise ValueError("active RIS unit power and count must be non-negative")


@dataclass(frozen=True)
class StarRis:
    reflect_fraction: float = 0.5
    transmit_fraction: float = 0.5
    gain: float = 1.0
    residual_interference_fraction: float = 0.25
    label: str = "star_ris"

    def __post_init__(self):
        _check_fraction("reflect_fraction", self.reflect_fraction)
        _check_fraction("transmit_fraction", self.transmit_fraction)
        _check_gain("gain", self.gain)
        _check_fraction("residual_interference_fraction", self.residual_interference_fraction)
        if abs(self.reflect_fraction + self.transmit_fraction - 1.0) > _EPS:
            raise ValueError("STAR reflect_fraction + transmit_fraction must equal 1")


@dataclass(frozen=True)
class FricsA:
    filter: LayerStack
    absorber_absorption: float = 0.99
    absorber_profile: AbsorberProfile | None = None
    label: str = "frics_a"

    def __post_init__(self):
        _check_fraction("absorber_absorption", self.absorber_absorption)
        if not self.filter.resonators or any(
            r.topology is not Topology.SERIES_LC for r in self.filter.resonators
        ):
            raise ValueError("Design A needs a bandstop (series LC) filter stack")

    def absorption(self, f: float) -> float:
        if self.absorber_profile is not None:
            return self.absorber_profile.absorption(f)
        return self.absorber_absorption


@dataclass(frozen=True)
class FricsB:
    filter: LayerStack
    computational_power_gain: float = 2.0
    label: str = "frics_b"

    def __post_init__(self):
        _check_gain("computational_power_gain", self.computational_power_gain)
        if not self.filter.resonators or any(
            r.topology is not Topology.PARALLEL_LC for r in self.filter.resonators
        ):
            raise ValueError("Design B needs a bandpass (parallel LC) filter stack")


SurfaceKind = Union[PassiveRis, ActiveRis, StarRis, FricsA, FricsB]

SURFACE_TYPES = {
    "passive_ris": PassiveRis,
    "active_ris": ActiveRis,
    "star_ris": StarRis,
    "frics_a": FricsA,
    "frics_b": FricsB,
}


def kind_name(kind: SurfaceKind) -> str:
    for name, cls in SURFACE_TYPES.items():
        if isinstance(kind, cls):
            return name
    raise TypeError(f"not a surface kind: {kind!r}")


@dataclass(frozen=True)
class SurfaceResponse:
    frequency: float
    reflect_gain: float
    transmit_gain: float
    absorbed_fraction: float = 0.0


@dataclass(frozen=True)
class PowerModel:
    """Control-chain power draw in milliwatts.

    ``per_unit_mw`` is the draw of one passive reflection unit (zero for
    varactor-tuned elements); active amplifiers carry their own figure.
    """

    driver_generator_mw: float = 250.0
    bias_amplifier_mw: float = 180.0
    fpga_mw: float = 1500.0
    per_unit_mw: float = 0.0
    unit_count: int = 64

    def __post_init__(self):
        for name in ("driver_generator_mw", "bias_amplifier_mw", "fpga_mw", "per_unit_mw", "unit_count"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def _filter_power(stack: LayerStack, f: float) -> tuple[float, float]:
    s11, s21 = stack_response(stack, [f])
    return float(abs(s11[0]) ** 2), float(abs(s21[0]) ** 2)


def surface_response(kind: SurfaceKind, f: float) -> SurfaceResponse:
    if f <= 0:
        raise DomainError("frequency must be positive")
    match kind:
        case PassiveRis():
            return SurfaceResponse(f, 1.0, 0.0)
        case ActiveRis():
            return SurfaceResponse(f, kind.amplification_power_gain, 0.0)
        case StarRis():
            return SurfaceResponse(
                f, kind.reflect_fraction * kind.gain, kind.transmit_fraction * kind.gain
            )
        case FricsA():
            r, t = _filter_power(kind.filter, f)
            absorb = kind.absorption(f)
            return SurfaceResponse(f, r, t * (1.0 - absorb), t * absorb)
        case FricsB():
            r, t = _filter_power(kind.filter, f)
            return SurfaceResponse(f, r, t * kind.computational_power_gain)
    raise TypeError(f"not a surface kind: {kind!r}")


def surface_power_consumption(kind: SurfaceKind, power_model: PowerModel) -> float:
    """Total draw in watts."""
    pm = power_model
    control_mw = pm.bias_amplifier_mw + pm.fpga_mw
    match kind:
        case FricsA() | FricsB():
            # no driver generator: tuning is static bias only
            total_mw = control_mw
        case PassiveRis() | StarRis():
            total_mw = pm.driver_generator_mw + control_mw + pm.per_unit_mw * pm.unit_count
        case ActiveRis():
            total_mw = (
                pm.driver_generator_mw
                + control_mw
                + pm.per_unit_mw * pm.unit_count
                + kind.per_unit_milliwatts * kind.unit_count
            )
        case _:
            raise TypeError(f"not a surface kind: {kind!r}")
    return total_mw / 1000.0


def interference_coupling(kind: SurfaceKind, f_interferer: float) -> float:
    """Fraction of incident interference power reaching the protected receiver."""
    if f_interferer <= 0:
        raise DomainError("frequency must be positive")
    if isinstance(kind, (FricsA, FricsB)):
        return surface_response(kind, f_interferer).transmit_gain
    return kind.residual_interference_fraction


def filter_power_curves(stack: LayerStack, freqs) -> tuple[np.ndarray, np.ndarray]:
    """|s11|^2 and |s21|^2 of a filter stack over ``freqs``."""
    s11, s21 = stack_response(stack, freqs)
    return np.abs(s11) ** 2, np.abs(s21) ** 2
