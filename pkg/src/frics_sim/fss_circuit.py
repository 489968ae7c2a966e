"""Equivalent-circuit model of the tunable spatial filtering layer.

A unit cell is a shunt resonator (plus an optional substrate slab) on a
free-space transmission line. Layers are chained as ABCD matrices and the
cascade is converted to S-parameters with equal port impedances.
"""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence, Union

import numpy as np

from .errors import DomainError, SingularNetworkError, UnreachableCapacitanceError

SPEED_OF_LIGHT = 299_792_458.0
FREE_SPACE_IMPEDANCE = 376.73

# |Z| below / above these is treated as an ideal short / open.
SHORT_THRESHOLD_OHM = 1e-12
OPEN_THRESHOLD_SIEMENS = 1e-12

DB_FLOOR = -300.0
_BISECTION_MAX_ITER = 200

SWEEP_CSV_HEADER = ("freq_hz", "s11_re", "s11_im", "s21_re", "s21_im", "s11_db", "s21_db")


class Topology(str, enum.Enum):
    SERIES_LC = "series_lc"  # ring element, bandstop
    PARALLEL_LC = "parallel_lc"  # aperture element, bandpass


class Termination(enum.Enum):
    OPEN = "open"


OPEN = Termination.OPEN

Impedance = Union[complex, Termination]


@dataclass(frozen=True)
class VaractorModel:
    """Bias-to-capacitance curve of a tuning diode.

    The default calibration is the SMV2019-079LF endpoints, 2.31 pF at 0 V and
    0.24 pF at 19 V reverse bias, joined by an exponential (log-linear) curve.
    Passing ``table`` as ``((bias, capacitance), ...)`` replaces the curve with
    piecewise-linear interpolation of datasheet points; its first and last
    entries must match ``(0, c_zero_bias)`` and ``(v_max, c_min)``.
    """

    c_zero_bias: float = 2.31e-12
    c_min: float = 0.24e-12
    v_max: float = 19.0
    r_series: float = 0.5
    table: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if not (0 < self.c_min <= self.c_zero_bias):
            raise ValueError("varactor requires 0 < c_min <= c_zero_bias")
        if self.v_max <= 0:
            raise ValueError("varactor v_max must be positive")
        if self.r_series < 0:
            raise ValueError("varactor r_series must be non-negative")
        if self.table is not None:
            table = tuple((float(v), float(c)) for v, c in self.table)
            object.__setattr__(self, "table", table)
            biases = [v for v, _ in table]
            caps = [c for _, c in table]
            if len(table) < 2 or any(b2 <= b1 for b1, b2 in zip(biases, biases[1:])):
                raise ValueError("varactor table biases must be strictly increasing")
            if any(c2 >= c1 for c1, c2 in zip(caps, caps[1:])):
                raise ValueError("varactor table capacitances must be strictly decreasing")
            if biases[0] != 0 or biases[-1] != self.v_max:
                raise ValueError("varactor table must span 0 V to v_max")
            if caps[0] != self.c_zero_bias or caps[-1] != self.c_min:
                raise ValueError("varactor table endpoints must equal c_zero_bias and c_min")


@dataclass(frozen=True)
class ShuntResonator:
    topology: Topology
    inductance: float
    capacitance: float
    resistance: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "topology", Topology(self.topology))
        if self.inductance <= 0 or self.capacitance <= 0:
            raise ValueError("resonator L and C must be positive")
        if self.resistance < 0:
            raise ValueError("resonator resistance must be non-negative")


@dataclass(frozen=True)
class DielectricSlab:
    # FR-4; permittivity is the conventional value, thickness from the unit-cell table.
    rel_permittivity: float = 4.3
    thickness: float = 0.38e-3

    def __post_init__(self):
        if self.rel_permittivity < 1:
            raise ValueError("slab rel_permittivity must be >= 1")
        if self.thickness < 0:
            raise ValueError("slab thickness must be non-negative")


Layer = Union[ShuntResonator, DielectricSlab]


@dataclass(frozen=True)
class AbcdMatrix:
    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def identity(cls) -> "AbcdMatrix":
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    @property
    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "AbcdMatrix") -> "AbcdMatrix":
        return AbcdMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)


@dataclass(frozen=True)
class SParameters:
    frequency: float
    s11: complex
    s21: complex

    @property
    def s11_db(self) -> float:
        return magnitude_db(self.s11)

    @property
    def s21_db(self) -> float:
        return magnitude_db(self.s21)

    @property
    def power_sum(self) -> float:
        return abs(self.s11) ** 2 + abs(self.s21) ** 2


@dataclass(frozen=True)
class LayerStack:
    """Ordered layers from the illuminated side (port 1) to the far side."""

    layers: tuple[Layer, ...]
    port_impedance: float = FREE_SPACE_IMPEDANCE

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ValueError("layer stack must contain at least one layer")
        if self.port_impedance <= 0:
            raise ValueError("port impedance must be positive")

    @property
    def resonators(self) -> tuple[ShuntResonator, ...]:
        return tuple(l for l in self.layers if isinstance(l, ShuntResonator))

    @property
    def is_lossless(self) -> bool:
        return all(r.resistance == 0 for r in self.resonators)


def magnitude_db(x) -> float:
    mag = abs(x)
    if mag == 0:
        return DB_FLOOR
    return max(20.0 * math.log10(mag), DB_FLOOR)


# -- varactor ---------------------------------------------------------------


def capacitance_at_bias(model: VaractorModel, reverse_bias: float) -> float:
    """Junction capacitance at a reverse bias; the sign of ``reverse_bias`` is ignored."""
    v = abs(reverse_bias)
    if v > model.v_max or math.isnan(v):
        raise DomainError(f"bias magnitude {v:g} V outside valid range [0, {model.v_max:g}] V")
    if model.table is not None:
        biases, caps = zip(*model.table)
        return float(np.interp(v, biases, caps))
    if v == 0:
        return model.c_zero_bias
    if v == model.v_max:
        return model.c_min
    return model.c_zero_bias * (model.c_min / model.c_zero_bias) ** (v / model.v_max)


def bias_for_capacitance(model: VaractorModel, target: float) -> float:
    """Reverse-bias magnitude (volts) at which the varactor reaches ``target``."""
    lo, hi = model.c_min, model.c_zero_bias
    # absorb rounding at the endpoints
    if hi * (1 - 1e-12) <= target <= hi * (1 + 1e-12):
        return 0.0
    if lo * (1 - 1e-12) <= target <= lo * (1 + 1e-12):
        return model.v_max
    if not (lo <= target <= hi):
        raise UnreachableCapacitanceError(
            f"capacitance {target:.6g} F unreachable; varactor spans [{lo:.6g}, {hi:.6g}] F"
        )
    if model.table is not None:
        return _bisect_bias(model, target)
    return model.v_max * math.log(target / hi) / math.log(lo / hi)


def _bisect_bias(model: VaractorModel, target: float) -> float:
    lo, hi = 0.0, model.v_max
    for _ in range(_BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        c_mid = capacitance_at_bias(model, mid)
        if abs(c_mid - target) <= 1e-13 * target:
            return mid
        # capacitance falls with bias
        if c_mid > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- resonators and two-port primitives ----------------------------------------


def resonant_frequency(res: ShuntResonator) -> float:
    return 1.0 / (2 * math.pi * math.sqrt(res.inductance * res.capacitance))


def shunt_impedance(res: ShuntResonator, f: float) -> Impedance:
    """Impedance of the resonator at ``f``; returns ``OPEN`` at a lossless parallel resonance."""
    if f <= 0:
        raise DomainError("frequency must be positive")
    w = 2 * math.pi * f
    if res.topology is Topology.SERIES_LC:
        return complex(res.resistance, w * res.inductance - 1.0 / (w * res.capacitance))
    y = 1j * w * res.capacitance + 1.0 / (res.resistance + 1j * w * res.inductance)
    if abs(y) <= OPEN_THRESHOLD_SIEMENS:
        return OPEN
    return 1.0 / y


def abcd_of_shunt(z: Impedance) -> AbcdMatrix:
    if z is OPEN or (isinstance(z, (int, float, complex)) and math.isinf(abs(z))):
        return AbcdMatrix.identity()
    if abs(z) < SHORT_THRESHOLD_OHM:
        raise SingularNetworkError(
            "a shunt short has no finite ABCD matrix; evaluate it through a LayerStack"
        )
    return AbcdMatrix(1 + 0j, 0j, 1.0 / complex(z), 1 + 0j)


def abcd_of_slab(slab: DielectricSlab, f: float, eta0: float = FREE_SPACE_IMPEDANCE) -> AbcdMatrix:
    if f <= 0:
        raise DomainError("frequency must be positive")
    n = math.sqrt(slab.rel_permittivity)
    zs = eta0 / n
    theta = 2 * math.pi * f * n * slab.thickness / SPEED_OF_LIGHT
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return AbcdMatrix(complex(cos_t), 1j * zs * sin_t, 1j * sin_t / zs, complex(cos_t))


def cascade(matrices: Sequence[AbcdMatrix]) -> AbcdMatrix:
    if not matrices:
        raise ValueError("cascade needs at least one matrix")
    out = matrices[0]
    for m in matrices[1:]:
        out = out @ m
    return out


def s_parameters(m: AbcdMatrix, z0: float, f: float) -> SParameters:
    if z0 <= 0:
        raise ValueError("reference impedance must be positive")
    denom = m.a + m.b / z0 + m.c * z0 + m.d
    if abs(denom) < 1e-30:
        raise SingularNetworkError("ABCD to S conversion is singular")
    return SParameters(f, (m.a + m.b / z0 - m.c * z0 - m.d) / denom, 2.0 / denom)


# -- whole stacks ----------------------------------------------------------------


def _shunt_admittance_array(res: ShuntResonator, w: np.ndarray):
    """Admittance over angular frequencies, plus a mask of exact shorts."""
    if res.topology is Topology.SERIES_LC:
        z = res.resistance + 1j * (w * res.inductance - 1.0 / (w * res.capacitance))
        short = np.abs(z) < SHORT_THRESHOLD_OHM
        y = np.divide(1.0, z, out=np.zeros_like(z), where=~short)
        return y, short
    y = 1j * w * res.capacitance + 1.0 / (res.resistance + 1j * w * res.inductance)
    return y, np.zeros(w.shape, dtype=bool)


def stack_response(stack: LayerStack, freqs) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised (s11, s21) of a stack over an array of frequencies.

    A shunt short blocks everything behind it: s21 is zero and s11 is the
    reflection of the layers in front of it terminated in a short.
    """
    f = np.atleast_1d(np.asarray(freqs, dtype=float))
    if np.any(f <= 0):
        raise DomainError("frequencies must be positive")
    z0 = stack.port_impedance
    w = 2 * np.pi * f
    a = np.ones(f.shape, dtype=complex)
    b = np.zeros(f.shape, dtype=complex)
    c = np.zeros(f.shape, dtype=complex)
    d = np.ones(f.shape, dtype=complex)
    shorted = np.zeros(f.shape, dtype=bool)
    s11_short = np.zeros(f.shape, dtype=complex)

    for layer in stack.layers:
        if isinstance(layer, ShuntResonator):
            y, short = _shunt_admittance_array(layer, w)
            fresh = short & ~shorted
            if fresh.any():
                s11_short[fresh] = ((b - z0 * d) / (b + z0 * d))[fresh]
                shorted |= short
            a, c = a + b * y, c + d * y
        else:
            n = math.sqrt(layer.rel_permittivity)
            zs = FREE_SPACE_IMPEDANCE / n
            theta = w * n * layer.thickness / SPEED_OF_LIGHT
            la = np.cos(theta)
            lb = 1j * zs * np.sin(theta)
            lc = 1j * np.sin(theta) / zs
            a, b, c, d = a * la + b * lc, a * lb + b * la, c * la + d * lc, c * lb + d * la

    denom = a + b / z0 + c * z0 + d
    live = ~shorted
    if np.any(np.abs(denom[live]) < 1e-30):
        raise SingularNetworkError("ABCD to S conversion is singular")
    safe = np.where(live, denom, 1.0)
    s21 = np.where(live, 2.0 / safe, 0j)
    s11 = np.where(live, (a + b / z0 - c * z0 - d) / safe, s11_short)
    return s11, s21


def stack_abcd(stack: LayerStack, f: float) -> AbcdMatrix:
    """Cascade of the stack at one frequency (raises on an exact shunt short)."""
    mats = []
    for layer in stack.layers:
        if isinstance(layer, ShuntResonator):
            mats.append(abcd_of_shunt(shunt_impedance(layer, f)))
        else:
            mats.append(abcd_of_slab(layer, f))
    return cascade(mats)


def stack_s_parameters(stack: LayerStack, f: float) -> SParameters:
    s11, s21 = stack_response(stack, [f])
    return SParameters(float(f), complex(s11[0]), complex(s21[0]))


def frequency_grid(f_start: float, f_stop: float, points: int) -> np.ndarray:
    if not f_start < f_stop:
        raise ValueError("f_start must be below f_stop")
    if points < 2:
        raise ValueError("a sweep needs at least 2 points")
    if f_start <= 0:
        raise DomainError("frequencies must be positive")
    return np.linspace(f_start, f_stop, int(points))


def sweep_s_parameters(
    stack: LayerStack, f_start: float, f_stop: float, points: int = 1001
) -> list[SParameters]:
    freqs = frequency_grid(f_start, f_stop, points)
    s11, s21 = stack_response(stack, freqs)
    return [SParameters(float(f), complex(r), complex(t)) for f, r, t in zip(freqs, s11, s21)]


def filter_stack(
    topology: Topology,
    inductance: float,
    capacitance: float,
    resistance: float = 0.0,
    slab: DielectricSlab | None = None,
    port_impedance: float = FREE_SPACE_IMPEDANCE,
) -> LayerStack:
    layers: list[Layer] = [ShuntResonator(topology, inductance, capacitance, resistance)]
    if slab is not None:
        layers.append(slab)
    return LayerStack(tuple(layers), port_impedance)


def write_sweep_csv(sweep: Iterable[SParameters], fh: IO[str]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for sp in sweep:
        writer.writerow(
            [
                f"{sp.frequency:.9g}",
                f"{sp.s11.real:.9g}",
                f"{sp.s11.imag:.9g}",
                f"{sp.s21.real:.9g}",
                f"{sp.s21.imag:.9g}",
                f"{sp.s11_db:.9g}",
                f"{sp.s21_db:.9g}",
            ]
        )
