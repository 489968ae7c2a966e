"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 domain error
(for example a tuning target outside the achievable band).
"""
from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .config import (
    DEFAULT_CONFIG_YAML,
    AppConfig,
    build_filter,
    build_scenario,
    build_varactor,
    config_hash,
    design_filter,
    DESIGN_TOPOLOGY,
    load_config,
    resolved_defaults,
)
from .errors import ConfigError, DomainError, OutOfBandError
from .fss_circuit import capacitance_at_bias, sweep_s_parameters, write_sweep_csv
from .scenario_runner import evaluate_point, run_scenario
from .surface_models import kind_name
from .tuner import TuneRequest, achievable_band, tune_bias

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3


class UsageError(Exception):
    pass


def _manifest(cfg: AppConfig, config_path: str | None, command: str) -> dict[str, Any]:
    return {
        "tool": "frics_sim",
        "version": __version__,
        "command": command,
        "config_path": config_path,
        "config_hash": config_hash(cfg),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "resolved_defaults": resolved_defaults(cfg),
    }


def _write_json(path: Path, payload: Any) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    design = args.band_design
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    if args.capacitance is not None:
        capacitance = args.capacitance
        bias = None
    else:
        bias = args.bias
        capacitance = capacitance_at_bias(build_varactor(cfg), bias)
    stack, _ = build_filter(cfg, design, capacitance=capacitance)
    sweep = sweep_s_parameters(stack, args.f_from, args.f_to, args.points)

    if args.out is None:
        write_sweep_csv(sweep, sys.stdout)
        return EXIT_OK
    path = Path(args.out)
    with path.open("w", newline="") as fh:
        write_sweep_csv(sweep, fh)
    manifest = _manifest(cfg, args.config, "sweep")
    manifest["sweep"] = {
        "band_design": design,
        "bias_v": bias,
        "capacitance_f": capacitance,
        "f_from_hz": args.f_from,
        "f_to_hz": args.f_to,
        "points": args.points,
    }
    _write_json(path.with_name(path.name + ".manifest.json"), manifest)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_tune(args) -> int:
    cfg = load_config(args.config)
    varactor = build_varactor(cfg)
    section = design_filter(cfg, args.band_design)
    band = achievable_band(varactor, section.inductance)
    try:
        result = tune_bias(
            TuneRequest(
                varactor,
                section.inductance,
                DESIGN_TOPOLOGY[args.band_design],
                args.target,
                quantization_step=cfg.filter.bias_quantization,
            )
        )
    except OutOfBandError as err:
        print(f"error: {err}", file=sys.stderr)
        print(f"band_low_hz {band.f_low:.9g}")
        print(f"band_high_hz {band.f_high:.9g}")
        return EXIT_DOMAIN
    print(f"bias_v {result.bias:.9g}")
    print(f"capacitance_f {result.capacitance:.9g}")
    print(f"achieved_hz {result.achieved:.9g}")
    print(f"band_low_hz {band.f_low:.9g}")
    print(f"band_high_hz {band.f_high:.9g}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    scenario = build_scenario(cfg, args.scenario)
    result = run_scenario(scenario)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / "results.csv").open("w", newline="") as fh:
        result.to_csv(fh)
    _write_json(out_dir / "summary.json", result.summary())
    _write_json(out_dir / "manifest.json", _manifest(cfg, args.config, "simulate"))
    checks = result.summary()["ordering_checks"]
    for name, ok in checks.items():
        print(f"{name}: {ok}")
    return EXIT_OK


def compare_table(cfg: AppConfig, scenario: str | None, power: float | None) -> list[dict[str, Any]]:
    sc = build_scenario(cfg, scenario)
    p = cfg.compare.reference_power_dbm if power is None else power
    rows = []
    for surface in sc.surfaces:
        values = evaluate_point(sc, surface, p)
        rows.append({"surface": surface.label, "kind": kind_name(surface), "tx_power_dbm": p, **values})
    return rows


def cmd_compare(args) -> int:
    cfg = load_config(args.config)
    rows = compare_table(cfg, args.scenario, args.power)
    link = "sinr_db" if "sinr_db" in rows[0] else "snr_rsu_db"
    header = ("surface", "power_w", link, "rate_bps", "ee_bits_per_joule")
    print("  ".join(f"{h:>18}" for h in header))
    for row in rows:
        cells = [row["surface"]]
        for key in header[1:]:
            v = row[key]
            cells.append("no_path" if v is None else f"{v:.6g}")
        print("  ".join(f"{c:>18}" for c in cells))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frics-sim",
        description="Tunable filtering metasurface: circuit sweeps, bias tuning and link-level comparisons.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--write-default-config",
        metavar="PATH",
        help="write the fully commented default configuration to PATH and exit",
    )
    sub = parser.add_subparsers(dest="command")

    def add_config(p):
        p.add_argument("config", nargs="?", help="YAML configuration file (defaults if omitted)")

    p = sub.add_parser("sweep", help="S-parameter sweep of one filter design")
    add_config(p)
    p.add_argument("--band-design", choices=("A", "B"), default="A")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--bias", type=float, help="varactor reverse bias in volts")
    group.add_argument("--capacitance", type=float, help="resonator capacitance in farads")
    p.add_argument("--from", dest="f_from", type=float, default=10e9, help="start frequency (Hz)")
    p.add_argument("--to", dest="f_to", type=float, default=25e9, help="stop frequency (Hz)")
    p.add_argument("--points", type=int, default=1001)
    p.add_argument("--out", help="CSV output path (stdout if omitted)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tune", help="bias voltage for a target resonance")
    add_config(p)
    p.add_argument("--target", type=float, required=True, help="target frequency (Hz)")
    p.add_argument("--band-design", choices=("A", "B"), default="A")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("simulate", help="run a scenario power sweep")
    add_config(p)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--scenario", choices=("design_a", "design_b"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="power and energy efficiency per surface")
    add_config(p)
    p.add_argument("--scenario", choices=("design_a", "design_b"))
    p.add_argument("--power", type=float, help="transmit power in dBm (config default 27)")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.write_default_config:
        Path(args.write_default_config).write_text(DEFAULT_CONFIG_YAML)
        return EXIT_OK
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, UsageError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
