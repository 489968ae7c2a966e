"""Link-budget arithmetic: path loss, thermal noise, SINR/SNR, rate and EE."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import DomainError, InBandInterfererWarning
from .fss_circuit import SPEED_OF_LIGHT
from .surface_models import FricsA, SurfaceKind, interference_coupling, surface_response

BOLTZMANN = 1.380649e-23

# Design A interferer leaking less than this through the filter is being
# reflected, not absorbed.
STOPBAND_LEAK_DB = -30.0


@dataclass(frozen=True)
class NoiseSpec:
    temperature: float = 290.0
    bandwidth: float = 1e6
    noise_figure_db: float = 0.0

    def __post_init__(self):
        if self.temperature <= 0 or self.bandwidth <= 0:
            raise ValueError("noise temperature and bandwidth must be positive")
        if self.noise_figure_db < 0:
            raise ValueError("noise figure must be non-negative")


@dataclass(frozen=True)
class LinkPath:
    distance: float
    carrier: float
    path_loss_exponent: float = 2.0

    def __post_init__(self):
        if self.distance <= 0 or self.carrier <= 0:
            raise ValueError("link distance and carrier must be positive")
        if self.path_loss_exponent < 2:
            raise ValueError("path loss exponent must be >= 2")


def to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def from_db(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def path_loss_db(path: LinkPath) -> float:
    """Friis free-space loss; other exponents use a 1 m reference distance."""
    k = 4 * math.pi * path.carrier / SPEED_OF_LIGHT
    if path.path_loss_exponent == 2:
        return 20.0 * math.log10(k * path.distance)
    return 20.0 * math.log10(k) + 10.0 * path.path_loss_exponent * math.log10(path.distance)


def noise_power_dbm(spec: NoiseSpec) -> float:
    return to_db(BOLTZMANN * spec.temperature * spec.bandwidth / 1e-3) + spec.noise_figure_db


def _power_sum_dbm(*levels_dbm: float | None) -> float:
    return to_db(sum(from_db(level) for level in levels_dbm if level is not None))


def sinr_from_coupling(
    p_tx_desired: float,
    p_tx_interferer: float,
    desired: LinkPath,
    interferer: LinkPath,
    coupling: float,
    noise: NoiseSpec,
) -> float:
    signal = p_tx_desired - path_loss_db(desired)
    noise_dbm = noise_power_dbm(noise)
    if coupling <= 0:
        return signal - noise_dbm
    interference = p_tx_interferer - path_loss_db(interferer) + to_db(coupling)
    return signal - _power_sum_dbm(interference, noise_dbm)


def sinr_design_a(
    p_tx_desired: float,
    p_tx_interferer: float,
    desired: LinkPath,
    interferer: LinkPath,
    surface: SurfaceKind,
    noise: NoiseSpec,
) -> float:
    """SINR (dB) at the indoor receiver with the surface treating the interferer."""
    if isinstance(surface, FricsA):
        leak = surface_response(surface, interferer.carrier)
        through = leak.transmit_gain + leak.absorbed_fraction
        if through <= 0 or to_db(through) < STOPBAND_LEAK_DB:
            warnings.warn(
                f"interferer at {interferer.carrier:.6g} Hz lies in the bandstop filter's "
                "stopband and is reflected rather than absorbed",
                InBandInterfererWarning,
                stacklevel=2,
            )
    coupling = interference_coupling(surface, interferer.carrier)
    return sinr_from_coupling(p_tx_desired, p_tx_interferer, desired, interferer, coupling, noise)


def link_gain(surface: SurfaceKind, carrier: float, use_transmit_side: bool) -> float:
    response = surface_response(surface, carrier)
    return response.transmit_gain if use_transmit_side else response.reflect_gain


def snr_design_b(
    p_tx: float,
    path: LinkPath,
    surface: SurfaceKind,
    use_transmit_side: bool,
    noise: NoiseSpec,
    direct_gain: float = 0.0,
) -> float | None:
    """Received SNR (dB) through the surface, or ``None`` when there is no path.

    ``direct_gain`` adds a line-of-sight term over the same distance.
    """
    gain = link_gain(surface, path.carrier, use_transmit_side) + direct_gain
    if gain <= 0:
        return None
    received = p_tx - path_loss_db(path) + to_db(gain)
    return received - noise_power_dbm(noise)


def shannon_rate(bandwidth: float, sinr_db: float | None) -> float:
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    if sinr_db is None:
        return 0.0
    return bandwidth * math.log2(1.0 + from_db(sinr_db))


def energy_efficiency(rate: float, consumption: float) -> float:
    """Bits per joule."""
    if consumption <= 0:
        raise DomainError("power consumption must be positive")
    return rate / consumption
