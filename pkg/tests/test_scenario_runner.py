import dataclasses
import math

import pytest

from frics_sim.config import AppConfig, build_scenario, parse_config
from frics_sim.errors import ConfigError
from frics_sim.fss_circuit import stack_response
from frics_sim.link_engine import LinkPath, noise_power_dbm, path_loss_db
from frics_sim.scenario_runner import (
    DESIGN_A_METRICS,
    DESIGN_B_METRICS,
    NO_PATH,
    RESULT_CSV_HEADER,
    PowerSweep,
    ScenarioConfig,
    evaluate_point,
    ordering_checks,
    run_design_a,
    run_design_b,
    run_scenario,
)
from frics_sim.surface_models import FricsB, PassiveRis, StarRis


@pytest.fixture(scope="module")
def scen_a():
    return build_scenario(AppConfig(), "design_a")


@pytest.fixture(scope="module")
def scen_b():
    return build_scenario(AppConfig(), "design_b")


def test_power_grid():
    pts = PowerSweep().points()
    assert len(pts) == 13
    assert pts[0] == 15 and pts[-1] == 39


def test_power_grid_rejects_nonsense():
    with pytest.raises(ConfigError):
        PowerSweep(10, 5, 1)
    with pytest.raises(ConfigError):
        PowerSweep(10, 20, 0)


def test_grid_completeness(scen_a, scen_b):
    a = run_design_a(scen_a)
    assert len(a.rows) == 13 * len(scen_a.surfaces) * len(DESIGN_A_METRICS)
    b = run_design_b(scen_b)
    assert len(b.rows) == 13 * len(scen_b.surfaces) * len(DESIGN_B_METRICS)
    keys = {(r.tx_power_dbm, r.surface, r.metric) for r in b.rows}
    assert len(keys) == len(b.rows)


def test_wrong_runner_rejected(scen_a, scen_b):
    with pytest.raises(ConfigError):
        run_design_b(scen_a)
    with pytest.raises(ConfigError):
        run_design_a(scen_b)


def test_deterministic_csv(scen_a, scen_b):
    for scen in (scen_a, scen_b):
        assert run_scenario(scen).csv_text() == run_scenario(scen).csv_text()


def test_csv_layout(scen_b):
    text = run_scenario(scen_b).csv_text().splitlines()
    assert text[0] == ",".join(RESULT_CSV_HEADER)
    passive_rsu = [l for l in text if ",passive_ris,snr_rsu_db," in l]
    assert passive_rsu and all(l.endswith(NO_PATH) for l in passive_rsu)


def test_default_orderings(scen_a, scen_b):
    for scen in (scen_a, scen_b):
        checks = ordering_checks(run_scenario(scen))
        assert checks and all(v is True for v in checks.values()), checks


def test_missing_kinds_give_none(scen_a):
    only = dataclasses.replace(scen_a, surfaces=(PassiveRis(),))
    checks = ordering_checks(run_scenario(only))
    assert checks["frics_a_highest_sinr"] is None
    assert checks["sinr_order_frics_a_active_passive_star"] is None
    assert checks["sinr_monotone_in_power"] is True


def test_equal_couplings_coincide(scen_a):
    scen = dataclasses.replace(scen_a, surfaces=(PassiveRis(0.2), StarRis(residual_interference_fraction=0.2)))
    res = run_scenario(scen)
    for x, y in zip(res.series(0, "sinr_db"), res.series(1, "sinr_db")):
        assert x == pytest.approx(y, abs=1e-9)


def test_frics_b_rsu_is_ideal_minus_insertion_loss(scen_b, stack_b):
    kind = FricsB(stack_b, 1.0)
    p = 27.0
    rsu = LinkPath(scen_b.distances["rsu"], scen_b.f2)
    _, s21 = stack_response(stack_b, [scen_b.f2])
    ideal = p - path_loss_db(rsu) - noise_power_dbm(scen_b.noise)
    got = evaluate_point(scen_b, kind, p)["snr_rsu_db"]
    assert got == pytest.approx(ideal + 20 * math.log10(abs(s21[0])), abs=1e-9)
    assert got < ideal


def test_frics_b_v2v_uses_reflection(scen_b, stack_b):
    p = 27.0
    v2v = LinkPath(scen_b.distances["v2v"], scen_b.f1)
    s11, _ = stack_response(stack_b, [scen_b.f1])
    ideal = p - path_loss_db(v2v) - noise_power_dbm(scen_b.noise)
    got = evaluate_point(scen_b, FricsB(stack_b), p)["snr_v2v_db"]
    assert got == pytest.approx(ideal + 20 * math.log10(abs(s11[0])), abs=1e-9)


def test_direct_path_adds_reference(scen_b):
    with_direct = dataclasses.replace(scen_b, direct_path=True)
    res = run_scenario(with_direct)
    ref = res.metadata["reference_snr_db"]
    assert all(v is not None for v in ref["rsu"])
    i = [type(s) for s in res.surfaces].index(PassiveRis)
    # passive now has the direct link on the RSU side, equal to the reference
    assert res.series(i, "snr_rsu_db") == pytest.approx(ref["rsu"])
    assert ordering_checks(res)["only_frics_b_improves_rsu_and_v2v"] is True


def test_no_direct_path_reference_is_missing(scen_b):
    ref = run_scenario(scen_b).metadata["reference_snr_db"]
    assert ref["rsu"] == [None] * 13


def test_design_a_ee_uses_consumption(scen_a):
    row = evaluate_point(scen_a, scen_a.surfaces[0], 27.0)
    assert row["ee_bits_per_joule"] == pytest.approx(row["rate_bps"] / row["power_w"])


def test_summary_shape(scen_b):
    summary = run_scenario(scen_b).summary()
    assert summary["scenario"] == "design_b"
    assert len(summary["tx_power_dbm"]) == 13
    labels = [s["label"] for s in summary["surfaces"]]
    assert labels == [s.label for s in scen_b.surfaces]
    passive = next(s for s in summary["surfaces"] if s["kind"] == "passive_ris")
    assert passive["metrics"]["snr_rsu_db"]["max"] is None
    assert "flagged_defaults" in summary["metadata"]


@pytest.mark.parametrize(
    "patch, key",
    [
        ({"f1": 17e9}, "frequencies"),
        ({"distances": {"d2d": 0.0, "interferer": 20.0}}, "distances.d2d"),
        ({"surfaces": ()}, "surfaces"),
        ({"interferer_band": "f9"}, "interferer_band"),
    ],
)
def test_scenario_validation(scen_a, patch, key):
    with pytest.raises(ConfigError, match=key):
        dataclasses.replace(scen_a, **patch)


def test_interferer_band_switch():
    cfg = parse_config({"design_a": {"interferer_band": "f3"}})
    res = run_scenario(build_scenario(cfg))
    assert all(v is True for v in ordering_checks(res).values())


def test_scenario_config_direct_construction():
    scen = ScenarioConfig("design_a", 14e9, 17e9, 20e9, {"d2d": 10, "interferer": 20}, (PassiveRis(),))
    assert len(run_scenario(scen).rows) == 13 * 4
