"""The two link-level experiments, swept over transmit power.

Design A: an indoor D2D link next to a single dominant interferer; each
surface decides how much interference leaks to the D2D receiver.

Design B: a vehicle reaches the RSU through the surface (transmit side, in
band) while a V2V partner is served by reflection (reflect side, out of band).
"""
from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from statistics import fmean
from typing import IO, Any, NamedTuple

from .errors import ConfigError
from .link_engine import (
    LinkPath,
    NoiseSpec,
    energy_efficiency,
    noise_power_dbm,
    path_loss_db,
    shannon_rate,
    sinr_design_a,
    snr_design_b,
)
from .surface_models import (
    ActiveRis,
    FricsA,
    FricsB,
    PassiveRis,
    PowerModel,
    StarRis,
    SurfaceKind,
    kind_name,
    surface_power_consumption,
)

RESULT_CSV_HEADER = ("tx_power_dbm", "surface", "metric", "value")
NO_PATH = "no_path"

DESIGN_A_METRICS = ("sinr_db", "rate_bps", "ee_bits_per_joule", "power_w")
DESIGN_B_METRICS = ("snr_rsu_db", "snr_v2v_db", "rate_bps", "ee_bits_per_joule", "power_w")


class Scenario(str, enum.Enum):
    DESIGN_A = "design_a"
    DESIGN_B = "design_b"


@dataclass(frozen=True)
class PowerSweep:
    start: float = 15.0
    stop: float = 39.0
    step: float = 2.0

    def __post_init__(self):
        if not self.start < self.stop:
            raise ConfigError("tx_power_sweep: start must be below stop")
        if self.step <= 0:
            raise ConfigError("tx_power_sweep.step: must be positive")

    def points(self) -> list[float]:
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [self.start + i * self.step for i in range(count)]


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: Scenario
    f1: float
    f2: float
    f3: float
    # design_a: "d2d", "interferer"; design_b: "rsu", "v2v"
    distances: dict[str, float]
    surfaces: tuple[SurfaceKind, ...]
    tx_power_sweep: PowerSweep = PowerSweep()
    interferer_power: float = 30.0
    interferer_band: str = "f1"
    noise: NoiseSpec = NoiseSpec()
    power_model: PowerModel = PowerModel()
    path_loss_exponent: float = 2.0
    direct_path: bool = False
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        object.__setattr__(self, "surfaces", tuple(self.surfaces))
        freqs = (self.f1, self.f2, self.f3)
        if any(f <= 0 for f in freqs):
            raise ConfigError(f"{self.scenario.value}.frequencies: must be positive")
        if len(set(freqs)) != 3:
            raise ConfigError(f"{self.scenario.value}.frequencies: f1, f2, f3 must be distinct")
        if not self.surfaces:
            raise ConfigError(f"{self.scenario.value}.surfaces: at least one surface is required")
        needed = ("d2d", "interferer") if self.scenario is Scenario.DESIGN_A else ("rsu", "v2v")
        for key in needed:
            if self.distances.get(key, 0) <= 0:
                raise ConfigError(f"{self.scenario.value}.distances.{key}: must be positive")
        if self.interferer_band not in ("f1", "f2", "f3"):
            raise ConfigError("design_a.interferer_band: must be one of f1, f2, f3")

    def band(self, name: str) -> float:
        return {"f1": self.f1, "f2": self.f2, "f3": self.f3}[name]


class Row(NamedTuple):
    tx_power_dbm: float
    surface: str
    metric: str
    value: float | None


@dataclass(frozen=True)
class SweepResult:
    scenario: Scenario
    rows: tuple[Row, ...]
    surfaces: tuple[SurfaceKind, ...]
    powers: tuple[float, ...]
    metrics: tuple[str, ...]
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.surfaces)

    def series(self, index: int, metric: str) -> list[float | None]:
        """Values of ``metric`` for the ``index``-th surface, in power order."""
        per_surface = len(self.powers) * len(self.metrics)
        m = self.metrics.index(metric)
        block = self.rows[index * per_surface : (index + 1) * per_surface]
        return [block[p * len(self.metrics) + m].value for p in range(len(self.powers))]

    def to_csv(self, fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_CSV_HEADER)
        for row in self.rows:
            value = NO_PATH if row.value is None else f"{row.value:.9g}"
            writer.writerow([f"{row.tx_power_dbm:.9g}", row.surface, row.metric, value])

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()

    def summary(self) -> dict[str, Any]:
        surfaces = []
        for i, surface in enumerate(self.surfaces):
            stats = {}
            for metric in self.metrics:
                values = [v for v in self.series(i, metric) if v is not None]
                if values:
                    stats[metric] = {"min": min(values), "max": max(values), "mean": fmean(values)}
                else:
                    stats[metric] = {"min": None, "max": None, "mean": None}
            surfaces.append({"label": surface.label, "kind": kind_name(surface), "metrics": stats})
        return {
            "scenario": self.scenario.value,
            "tx_power_dbm": list(self.powers),
            "surfaces": surfaces,
            "ordering_checks": ordering_checks(self),
            "metadata": self.metadata,
        }


def _design_a_links(cfg: ScenarioConfig) -> tuple[LinkPath, LinkPath]:
    desired = LinkPath(cfg.distances["d2d"], cfg.f1, cfg.path_loss_exponent)
    interferer = LinkPath(
        cfg.distances["interferer"], cfg.band(cfg.interferer_band), cfg.path_loss_exponent
    )
    return desired, interferer


def _design_b_links(cfg: ScenarioConfig) -> tuple[LinkPath, LinkPath]:
    rsu = LinkPath(cfg.distances["rsu"], cfg.f2, cfg.path_loss_exponent)
    v2v = LinkPath(cfg.distances["v2v"], cfg.f1, cfg.path_loss_exponent)
    return rsu, v2v


def evaluate_point(cfg: ScenarioConfig, surface: SurfaceKind, p_tx: float) -> dict[str, float | None]:
    """All metrics of one surface at one transmit power, keyed by metric name."""
    consumption = surface_power_consumption(surface, cfg.power_model)
    if cfg.scenario is Scenario.DESIGN_A:
        desired, interferer = _design_a_links(cfg)
        sinr = sinr_design_a(p_tx, cfg.interferer_power, desired, interferer, surface, cfg.noise)
        rate = shannon_rate(cfg.noise.bandwidth, sinr)
        values = (sinr, rate, energy_efficiency(rate, consumption), consumption)
        return dict(zip(DESIGN_A_METRICS, values))
    rsu, v2v = _design_b_links(cfg)
    direct = 1.0 if cfg.direct_path else 0.0
    snr_rsu = snr_design_b(p_tx, rsu, surface, True, cfg.noise, direct)
    snr_v2v = snr_design_b(p_tx, v2v, surface, False, cfg.noise, direct)
    # EE belongs to the RSU link
    rate = shannon_rate(cfg.noise.bandwidth, snr_rsu)
    values = (snr_rsu, snr_v2v, rate, energy_efficiency(rate, consumption), consumption)
    return dict(zip(DESIGN_B_METRICS, values))


def _sweep(cfg: ScenarioConfig, metrics: tuple[str, ...]) -> tuple[list[float], list[Row]]:
    powers = cfg.tx_power_sweep.points()
    rows: list[Row] = []
    for surface in cfg.surfaces:
        for p in powers:
            values = evaluate_point(cfg, surface, p)
            rows.extend(Row(p, surface.label, m, values[m]) for m in metrics)
    return powers, rows


def run_design_a(cfg: ScenarioConfig) -> SweepResult:
    if cfg.scenario is not Scenario.DESIGN_A:
        raise ConfigError("scenario: run_design_a needs scenario design_a")
    powers, rows = _sweep(cfg, DESIGN_A_METRICS)
    return SweepResult(
        cfg.scenario, tuple(rows), cfg.surfaces, tuple(powers), DESIGN_A_METRICS, dict(cfg.metadata)
    )


def run_design_b(cfg: ScenarioConfig) -> SweepResult:
    if cfg.scenario is not Scenario.DESIGN_B:
        raise ConfigError("scenario: run_design_b needs scenario design_b")
    powers, rows = _sweep(cfg, DESIGN_B_METRICS)
    rsu, v2v = _design_b_links(cfg)
    meta = dict(cfg.metadata)
    meta["reference_snr_db"] = {
        "rsu": [_reference_snr(p, rsu, cfg) for p in powers],
        "v2v": [_reference_snr(p, v2v, cfg) for p in powers],
    }
    return SweepResult(cfg.scenario, tuple(rows), cfg.surfaces, tuple(powers), DESIGN_B_METRICS, meta)


def run_scenario(cfg: ScenarioConfig) -> SweepResult:
    if cfg.scenario is Scenario.DESIGN_A:
        return run_design_a(cfg)
    return run_design_b(cfg)


def _reference_snr(p: float, path: LinkPath, cfg: ScenarioConfig) -> float | None:
    """SNR with no surface present: nothing, or the direct path when enabled."""
    if not cfg.direct_path:
        return None
    return p - path_loss_db(path) - noise_power_dbm(cfg.noise)


# -- ordering checks ---------------------------------------------------------------


def _rank(v: float | None) -> float:
    return -math.inf if v is None else v


def _first(result: SweepResult, cls) -> int | None:
    for i, s in enumerate(result.surfaces):
        if isinstance(s, cls):
            return i
    return None


def _improves(value: float | None, reference: float | None) -> bool:
    if value is None:
        return False
    return reference is None or value > reference


def _monotone(result: SweepResult, metrics: tuple[str, ...]) -> bool:
    for i in range(len(result.surfaces)):
        for metric in metrics:
            values = [_rank(v) for v in result.series(i, metric)]
            if any(b < a for a, b in zip(values, values[1:])):
                return False
    return True


def ordering_checks(result: SweepResult) -> dict[str, bool | None]:
    """Boolean checks of the per-surface orderings at every power point.

    A check is ``None`` when the surfaces it needs are not configured.
    """
    n = len(result.powers)
    if result.scenario is Scenario.DESIGN_A:
        fa = _first(result, FricsA)
        chain = [_first(result, cls) for cls in (FricsA, ActiveRis, PassiveRis, StarRis)]
        sinr = {i: result.series(i, "sinr_db") for i in range(len(result.surfaces))}
        ee = {i: result.series(i, "ee_bits_per_joule") for i in range(len(result.surfaces))}
        checks: dict[str, bool | None] = {
            "frics_a_highest_sinr": None,
            "sinr_order_frics_a_active_passive_star": None,
            "frics_a_highest_ee": None,
        }
        if fa is not None:
            others = [i for i, s in enumerate(result.surfaces) if not isinstance(s, FricsA)]
            checks["frics_a_highest_sinr"] = all(
                sinr[fa][p] > sinr[o][p] for p in range(n) for o in others
            )
            checks["frics_a_highest_ee"] = all(
                ee[fa][p] > ee[o][p] for p in range(n) for o in others
            )
        if None not in chain:
            checks["sinr_order_frics_a_active_passive_star"] = all(
                sinr[a][p] > sinr[b][p] for p in range(n) for a, b in zip(chain, chain[1:])
            )
        checks["sinr_monotone_in_power"] = _monotone(result, ("sinr_db",))
        return checks

    fb = _first(result, FricsB)
    passive = _first(result, PassiveRis)
    rsu = {i: result.series(i, "snr_rsu_db") for i in range(len(result.surfaces))}
    v2v = {i: result.series(i, "snr_v2v_db") for i in range(len(result.surfaces))}
    ref_rsu = result.metadata.get("reference_snr_db", {}).get("rsu", [None] * n)
    ref_v2v = result.metadata.get("reference_snr_db", {}).get("v2v", [None] * n)

    def improves_both(i: int, p: int) -> bool:
        return _improves(rsu[i][p], ref_rsu[p]) and _improves(v2v[i][p], ref_v2v[p])

    checks = {
        "frics_b_highest_rsu_snr": None,
        "passive_worst_rsu_snr": None,
        "only_frics_b_improves_rsu_and_v2v": None,
    }
    if fb is not None:
        others = [i for i, s in enumerate(result.surfaces) if not isinstance(s, FricsB)]
        checks["frics_b_highest_rsu_snr"] = all(
            _rank(rsu[fb][p]) > _rank(rsu[o][p]) for p in range(n) for o in others
        )
        checks["only_frics_b_improves_rsu_and_v2v"] = all(
            improves_both(fb, p) for p in range(n)
        ) and not any(improves_both(o, p) for p in range(n) for o in others)
    if passive is not None:
        checks["passive_worst_rsu_snr"] = all(
            _rank(rsu[passive][p]) <= _rank(rsu[o][p]) for p in range(n) for o in rsu
        )
    checks["snr_monotone_in_power"] = _monotone(result, ("snr_rsu_db", "snr_v2v_db"))
    return checks
