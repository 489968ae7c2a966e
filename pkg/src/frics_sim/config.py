"""Scenario configuration: YAML schema, defaults, and translation to model objects.

The schema is validated with pydantic so that problems are reported with the
key path that caused them. Every value that was filled from a default rather
than read from the file is tracked, so run manifests can list it.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Annotated, Any, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .errors import ConfigError
from .fss_circuit import DielectricSlab, LayerStack, Topology, VaractorModel, filter_stack
from .link_engine import NoiseSpec
from .scenario_runner import PowerSweep, Scenario, ScenarioConfig
from .surface_models import (
    AbsorberProfile,
    ActiveRis,
    FricsA,
    FricsB,
    PassiveRis,
    PowerModel,
    StarRis,
    SurfaceKind,
)
from .tuner import TuneResult, tuned_stack


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class VaractorSection(_Section):
    c_zero_bias: float = 2.31e-12
    c_min: float = 0.24e-12
    v_max: float = 19.0
    r_series: float = 0.5
    table: Optional[list[tuple[float, float]]] = None


class DesignFilterSection(_Section):
    inductance: float
    center_frequency: float


class SubstrateSection(_Section):
    enabled: bool = True
    rel_permittivity: float = 4.3
    thickness: float = 0.38e-3


class GeometrySection(_Section):
    # carried as metadata; L and C are direct circuit inputs
    substrate_side_length: float = 6e-3
    substrate_material: str = "FR-4"
    patch_width: float = 1e-3
    patch_material: str = "Copper"
    patch_thickness: float = 0.038e-3
    pore_size: float = 1e-3


class FilterSection(_Section):
    port_impedance: float = 376.73
    design_a: DesignFilterSection = DesignFilterSection(inductance=0.365e-9, center_frequency=17e9)
    design_b: DesignFilterSection = DesignFilterSection(inductance=0.32e-9, center_frequency=18e9)
    substrate: SubstrateSection = SubstrateSection()
    geometry: GeometrySection = GeometrySection()
    bias_quantization: Optional[float] = None


class NoiseSection(_Section):
    temperature: float = 290.0
    bandwidth: float = 1e6
    noise_figure_db: float = 0.0


class PowerModelSection(_Section):
    driver_generator_mw: float = 250.0
    bias_amplifier_mw: float = 180.0
    fpga_mw: float = 1500.0
    per_unit_mw: float = 0.0
    unit_count: int = 64


class SweepSection(_Section):
    start: float = 15.0
    stop: float = 39.0
    step: float = 2.0


class PassiveRisSection(_Section):
    kind: Literal["passive_ris"]
    label: Optional[str] = None
    residual_interference_fraction: float = 0.10


class ActiveRisSection(_Section):
    kind: Literal["active_ris"]
    label: Optional[str] = None
    amplification_power_gain: float = 2.0
    per_unit_milliwatts: float = 150.0
    unit_count: int = 64
    residual_interference_fraction: float = 0.02


class StarRisSection(_Section):
    kind: Literal["star_ris"]
    label: Optional[str] = None
    reflect_fraction: float = 0.5
    transmit_fraction: float = 0.5
    gain: float = 1.0
    residual_interference_fraction: float = 0.25


class AbsorberProfileSection(_Section):
    f_low: float
    f_high: float
    in_band_absorption: float
    out_band_absorption: float


class FricsASection(_Section):
    kind: Literal["frics_a"]
    label: Optional[str] = None
    absorber_absorption: float = 0.99
    absorber_profile: Optional[AbsorberProfileSection] = None


class FricsBSection(_Section):
    kind: Literal["frics_b"]
    label: Optional[str] = None
    computational_power_gain: float = 2.0


SurfaceSection = Annotated[
    Union[PassiveRisSection, ActiveRisSection, StarRisSection, FricsASection, FricsBSection],
    Field(discriminator="kind"),
]


def _design_a_surfaces() -> list:
    return [
        FricsASection(kind="frics_a"),
        ActiveRisSection(kind="active_ris"),
        PassiveRisSection(kind="passive_ris"),
        StarRisSection(kind="star_ris"),
    ]


def _design_b_surfaces() -> list:
    return [
        FricsBSection(kind="frics_b"),
        ActiveRisSection(kind="active_ris"),
        PassiveRisSection(kind="passive_ris"),
        StarRisSection(kind="star_ris", reflect_fraction=0.0, transmit_fraction=1.0, gain=1.0),
    ]


class DesignASection(_Section):
    f1: float = 14e9
    f2: float = 17e9
    f3: float = 20e9
    d2d_distance: float = 10.0
    interferer_distance: float = 20.0
    interferer_power_dbm: float = 30.0
    interferer_band: Literal["f1", "f2", "f3"] = "f1"
    surfaces: list[SurfaceSection] = Field(default_factory=_design_a_surfaces)


class DesignBSection(_Section):
    f1: float = 15e9
    f2: float = 18e9
    f3: float = 21e9
    rsu_distance: float = 30.0
    v2v_distance: float = 15.0
    direct_path: bool = False
    surfaces: list[SurfaceSection] = Field(default_factory=_design_b_surfaces)


class CompareSection(_Section):
    reference_power_dbm: float = 27.0


class AppConfig(_Section):
    scenario: Literal["design_a", "design_b"] = "design_a"
    varactor: VaractorSection = VaractorSection()
    filter: FilterSection = FilterSection()
    noise: NoiseSection = NoiseSection()
    power_model: PowerModelSection = PowerModelSection()
    tx_power_sweep: SweepSection = SweepSection()
    path_loss_exponent: float = 2.0
    design_a: DesignASection = DesignASection()
    design_b: DesignBSection = DesignBSection()
    compare: CompareSection = CompareSection()


# Defaults the source material never states; surfaced in output metadata.
FLAGGED_DEFAULTS = (
    "varactor.r_series",
    "filter.substrate.rel_permittivity",
    "noise.temperature",
    "noise.noise_figure_db",
    "design_a.interferer_power_dbm",
    "design_b.rsu_distance",
    "design_b.v2v_distance",
)


# -- loading --------------------------------------------------------------------


def _format_validation_error(err: ValidationError) -> str:
    lines = []
    for item in err.errors():
        loc = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{loc}: {item['msg']}")
    return "; ".join(lines)


def parse_config(data: Any) -> AppConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("<root>: config must be a mapping")
    try:
        return AppConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(_format_validation_error(err)) from None


def load_config(path: str | Path | None) -> AppConfig:
    if path is None:
        return AppConfig()
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = yaml.safe_load(p.read_text())
    except yaml.YAMLError as err:
        raise ConfigError(f"{p}: invalid YAML: {err}") from None
    return parse_config(data)


def resolved_defaults(cfg: BaseModel, prefix: str = "") -> dict[str, Any]:
    """Key paths (and values) of every field taken from a default."""
    out: dict[str, Any] = {}
    for name in type(cfg).model_fields:
        path = f"{prefix}{name}"
        value = getattr(cfg, name)
        if isinstance(value, BaseModel):
            # a defaulted section reports each of its leaves
            out.update(resolved_defaults(value, path + "."))
        elif name not in cfg.model_fields_set:
            out[path] = _plain(value)
        elif isinstance(value, list):
            for i, item in enumerate(value):
                if isinstance(item, BaseModel):
                    out.update(resolved_defaults(item, f"{path}.{i}."))
    return out


def _plain(value: Any) -> Any:
    if isinstance(value, BaseModel):
        return value.model_dump(mode="json")
    if isinstance(value, list):
        return [_plain(v) for v in value]
    return value


def config_hash(cfg: AppConfig) -> str:
    canonical = json.dumps(cfg.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


# -- translation to model objects ---------------------------------------------------


def _wrap(key: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (ValueError, ConfigError) as err:
        raise ConfigError(f"{key}: {err}") from None


def build_varactor(cfg: AppConfig) -> VaractorModel:
    v = cfg.varactor
    table = tuple(map(tuple, v.table)) if v.table is not None else None
    return _wrap("varactor", VaractorModel, v.c_zero_bias, v.c_min, v.v_max, v.r_series, table)


def build_slab(cfg: AppConfig) -> DielectricSlab | None:
    s = cfg.filter.substrate
    if not s.enabled:
        return None
    return _wrap("filter.substrate", DielectricSlab, s.rel_permittivity, s.thickness)


DESIGN_TOPOLOGY = {"A": Topology.SERIES_LC, "B": Topology.PARALLEL_LC}


def design_filter(cfg: AppConfig, design: str) -> DesignFilterSection:
    return cfg.filter.design_a if design == "A" else cfg.filter.design_b


def build_filter(
    cfg: AppConfig, design: str, capacitance: float | None = None
) -> tuple[LayerStack, TuneResult | None]:
    """Filter stack for design "A" or "B".

    With ``capacitance`` the resonator uses it directly; otherwise the varactor
    is tuned to the configured centre frequency.
    """
    design = design.upper()
    section = design_filter(cfg, design)
    varactor = build_varactor(cfg)
    slab = build_slab(cfg)
    topology = DESIGN_TOPOLOGY[design]
    key = f"filter.design_{design.lower()}"
    if capacitance is not None:
        stack = _wrap(
            key,
            filter_stack,
            topology,
            section.inductance,
            capacitance,
            varactor.r_series,
            slab,
            cfg.filter.port_impedance,
        )
        return stack, None
    return _wrap(
        key,
        tuned_stack,
        varactor,
        section.inductance,
        topology,
        section.center_frequency,
        slab,
        cfg.filter.port_impedance,
    )


def _build_surface(section, cfg: AppConfig, key: str) -> SurfaceKind:
    params = section.model_dump(exclude={"kind", "label"})
    label = section.label or section.kind
    match section.kind:
        case "passive_ris":
            return _wrap(key, PassiveRis, label=label, **params)
        case "active_ris":
            return _wrap(key, ActiveRis, label=label, **params)
        case "star_ris":
            return _wrap(key, StarRis, label=label, **params)
        case "frics_a":
            stack, _ = build_filter(cfg, "A")
            profile = None
            if section.absorber_profile is not None:
                profile = _wrap(
                    key + ".absorber_profile",
                    AbsorberProfile,
                    **section.absorber_profile.model_dump(),
                )
            return _wrap(
                key,
                FricsA,
                stack,
                section.absorber_absorption,
                absorber_profile=profile,
                label=label,
            )
        case "frics_b":
            stack, _ = build_filter(cfg, "B")
            return _wrap(key, FricsB, stack, section.computational_power_gain, label=label)
    raise ConfigError(f"{key}.kind: unknown surface kind {section.kind!r}")


def build_scenario(cfg: AppConfig, scenario: str | None = None) -> ScenarioConfig:
    name = Scenario(scenario or cfg.scenario)
    section = cfg.design_a if name is Scenario.DESIGN_A else cfg.design_b
    surfaces = tuple(
        _build_surface(s, cfg, f"{name.value}.surfaces.{i}") for i, s in enumerate(section.surfaces)
    )
    sweep = _wrap("tx_power_sweep", PowerSweep, **cfg.tx_power_sweep.model_dump())
    noise = _wrap("noise", NoiseSpec, **cfg.noise.model_dump())
    power_model = _wrap("power_model", PowerModel, **cfg.power_model.model_dump())
    defaults = resolved_defaults(cfg)
    metadata = {
        "flagged_defaults": {k: defaults[k] for k in FLAGGED_DEFAULTS if k in defaults},
        "geometry": cfg.filter.geometry.model_dump(),
    }
    common = dict(
        surfaces=surfaces,
        tx_power_sweep=sweep,
        noise=noise,
        power_model=power_model,
        path_loss_exponent=cfg.path_loss_exponent,
        metadata=metadata,
    )
    if name is Scenario.DESIGN_A:
        a = cfg.design_a
        return _wrap(
            "design_a",
            ScenarioConfig,
            name,
            a.f1,
            a.f2,
            a.f3,
            {"d2d": a.d2d_distance, "interferer": a.interferer_distance},
            interferer_power=a.interferer_power_dbm,
            interferer_band=a.interferer_band,
            **common,
        )
    b = cfg.design_b
    return _wrap(
        "design_b",
        ScenarioConfig,
        name,
        b.f1,
        b.f2,
        b.f3,
        {"rsu": b.rsu_distance, "v2v": b.v2v_distance},
        direct_path=b.direct_path,
        **common,
    )


DEFAULT_CONFIG_YAML = """\
# Scenario configuration. Every key is optional; omitted keys take the
# values shown here. Units are SI (F, H, Hz, m, V, ohm, K) unless the key
# name says otherwise (dBm, dB, mw).

scenario: design_a            # design_a | design_b; which experiment `simulate` runs

varactor:
  c_zero_bias: 2.31e-12       # SMV2019-079LF capacitance at 0 V
  c_min: 2.4e-13              # SMV2019-079LF capacitance at -19 V
  v_max: 19.0                 # largest reverse bias magnitude used by the controller
  r_series: 0.5               # resonator loss; not stated for the unit cell, assumed
  table: null                 # optional [[bias, capacitance], ...] datasheet curve

filter:
  port_impedance: 376.73      # free-space wave impedance
  design_a:                   # bandstop (ring / series LC) element
    inductance: 3.65e-10      # puts 0.24 pF on 17 GHz
    center_frequency: 1.7e+10 # centre of the 16-18 GHz stopband
  design_b:                   # bandpass (aperture / parallel LC) element
    inductance: 3.2e-10       # lets the varactor reach 18 GHz (tops out at 18.16 GHz)
    center_frequency: 1.8e+10 # centre of the 17-19 GHz passband
  substrate:
    enabled: true
    rel_permittivity: 4.3     # conventional FR-4 value
    thickness: 3.8e-4         # unit-cell substrate thickness 0.38 mm
  geometry:                   # unit-cell table; metadata only
    substrate_side_length: 0.006
    substrate_material: FR-4
    patch_width: 0.001
    patch_material: Copper
    patch_thickness: 3.8e-5
    pore_size: 0.001
  bias_quantization: null     # controller bias step in volts; null = continuous

noise:
  temperature: 290.0          # standard reference temperature, assumed
  bandwidth: 1.0e+6           # 1 MHz evaluation bandwidth
  noise_figure_db: 0.0        # ideal receiver, assumed

power_model:                  # control-chain draw of varactor-tuned surfaces
  driver_generator_mw: 250.0
  bias_amplifier_mw: 180.0
  fpga_mw: 1500.0
  per_unit_mw: 0.0            # passive reflection units draw nothing
  unit_count: 64

tx_power_sweep:               # desired transmitter power, 15-39 dBm
  start: 15.0
  stop: 39.0
  step: 2.0

path_loss_exponent: 2.0       # 2 = Friis free space

design_a:                     # indoor D2D link with one dominant interferer
  f1: 1.4e+10                 # D2D and interferer band, out of the stopband
  f2: 1.7e+10                 # reflected cellular band
  f3: 2.0e+10
  d2d_distance: 10.0          # D2D distance 10 m
  interferer_distance: 20.0   # cellular distance 20 m
  interferer_power_dbm: 30.0  # only the desired power is swept; assumed
  interferer_band: f1
  surfaces:
    - kind: frics_a
      absorber_absorption: 0.99          # absorber peak absorption 99 %
      absorber_profile: null             # or {f_low, f_high, in_band_absorption, out_band_absorption}
    - kind: active_ris
      amplification_power_gain: 2.0      # amplification factor 2 (power)
      per_unit_milliwatts: 150.0         # 150 mW per amplifying unit
      unit_count: 64                     # element count, assumed
      residual_interference_fraction: 0.02
    - kind: passive_ris
      residual_interference_fraction: 0.1
    - kind: star_ris
      reflect_fraction: 0.5
      transmit_fraction: 0.5
      gain: 1.0
      residual_interference_fraction: 0.25

design_b:                     # V2X: RSU through the surface, V2V by reflection
  f1: 1.5e+10                 # V2V band, reflected
  f2: 1.8e+10                 # RSU band, in the passband
  f3: 2.1e+10
  rsu_distance: 30.0          # assumed
  v2v_distance: 15.0          # assumed
  direct_path: false          # add a unit-gain line-of-sight term
  surfaces:
    - kind: frics_b
      computational_power_gain: 2.0      # computational-layer gain 2
    - kind: active_ris
      amplification_power_gain: 2.0
      per_unit_milliwatts: 150.0
      unit_count: 64
      residual_interference_fraction: 0.02
    - kind: passive_ris
      residual_interference_fraction: 0.1
    - kind: star_ris                     # full transmission mode
      reflect_fraction: 0.0
      transmit_fraction: 1.0
      gain: 1.0
      residual_interference_fraction: 0.25

compare:
  reference_power_dbm: 27.0   # power point used by `compare`
"""
