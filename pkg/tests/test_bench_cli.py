import json
import re
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from grover_ite_lab import bench
from grover_ite_lab.bench import ExperimentConfig, custom_rows, fig_a_rows, resolve_schedule
from grover_ite_lab.cli import main, parse_formula
from grover_ite_lab.errors import ConfigInvalid
from grover_ite_lab.pf_compiler import AngleSchedule, FiveCopies, GroupCommutator, TwoCopies
from grover_ite_lab.qsp_engine import ChebyshevPoly


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv(bench.CACHE_ENV_VAR, str(tmp_path / "cache"))
    return tmp_path


CHEAP = dict(n_qubits=(4,), iterations=2, s_values=(0.5,), seed=3)


def test_config_validation():
    with pytest.raises(ConfigInvalid):
        ExperimentConfig.for_experiment("fig-z")
    with pytest.raises(ConfigInvalid):
        ExperimentConfig.for_experiment("custom", bogus_field=1)
    with pytest.raises(ConfigInvalid):
        ExperimentConfig.for_experiment("custom", n_qubits=(20,))
    with pytest.raises(ConfigInvalid):
        ExperimentConfig.for_experiment("custom", delta2=2.0)


def test_unknown_schedule_token_carries_token():
    cfg = ExperimentConfig.for_experiment("custom", schedule="who-dis", **CHEAP)
    with pytest.raises(ConfigInvalid, match="who-dis"):
        custom_rows(cfg)


def test_empty_sweep_header_only():
    cfg = ExperimentConfig.for_experiment("custom", n_qubits=(4,), iterations=2,
                                          s_values=(), seed=0)
    text = bench.run_custom(cfg)
    lines = text.strip().split("\n")
    assert len(lines) == 2
    assert lines[1] == "s,M,e0,infidelity"


def test_csv_header_comment_format():
    cfg = ExperimentConfig.for_experiment("custom", **CHEAP)
    text = bench.run_custom(cfg)
    first = text.split("\n", 1)[0]
    assert re.fullmatch(r"# grover-ite-lab v0\.1\.0 config=[0-9a-f]{12} seed=3", first)


def test_seed_determinism_bitwise_and_cache_warm():
    cfg = ExperimentConfig.for_experiment("custom", **CHEAP)
    cold = bench.run_custom(cfg)
    warm = bench.run_custom(cfg)  # second run hits the phase cache
    assert cold == warm
    assert (Path(bench.cache_dir())).exists()
    assert list(Path(bench.cache_dir()).glob("*.json"))


def test_custom_single_point_matches_fig_a_row():
    fig_cfg = ExperimentConfig.for_experiment(
        "fig-a", n_qubits=(4,), iterations=2, s_values=(0.5,), seed=3
    )
    fig = {(s, m): (e0, inf) for s, m, e0, inf in fig_a_rows(fig_cfg)}
    cus_cfg = ExperimentConfig.for_experiment("custom", marked_counts=(5,), **CHEAP)
    kind, rows = custom_rows(cus_cfg)
    assert kind == "infidelity"
    assert len(rows) == 1
    s, m, e0, inf = rows[0]
    assert (e0, inf) == fig[(s, m)]


def test_fig_a_row_cardinality_cheap():
    cfg = ExperimentConfig.for_experiment(
        "fig-a", n_qubits=(4,), iterations=2, s_values=(0.5, 1.0), seed=3
    )
    rows = fig_a_rows(cfg)
    assert len(rows) == 2 * 15
    assert all(inf >= 0.0 for _, _, _, inf in rows)


def test_fig_b_rows_shape_cheap():
    cfg = ExperimentConfig.for_experiment(
        "fig-b", n_qubits=(3, 4), iterations=2, s_values=(0.5, 1.0), seed=3
    )
    rows = bench.fig_b_rows(cfg)
    assert len(rows) == 4
    assert all(np.isfinite(v) and v >= 0 for _, _, v in rows)


def test_fig_c_rows_and_flag_cheap():
    cfg = ExperimentConfig.for_experiment(
        "fig-c", n_qubits=(4,), iterations=2, s_values=(0.5, 1.0), seed=3
    )
    rows, trend = bench.fig_c_rows(cfg)
    assert isinstance(trend, bool)
    assert all(0.0 <= inf <= 1.0 + 1e-12 for _, inf in rows)
    text = bench.run_fig_c(cfg)
    assert "# monotone_trend_s_ge_1=" in text


def test_fixed_point_rows_cheap():
    cfg = ExperimentConfig.for_experiment(
        "fixed-point", n_qubits=(5,), iterations=6, delta2=0.1, eta=0.35, seed=3
    )
    rows, valid_from = bench.fixed_point_rows(cfg)
    names = sorted(set(name for name, *_ in rows))
    assert names == ["fixed-point-chebyshev", "original-pi", "sign-qsp"]
    assert len(rows) == 3 * 31
    assert valid_from is not None
    level = 1.0 - cfg.delta2
    cheb = [(e0, ov) for name, _, e0, ov in rows if name == "fixed-point-chebyshev"]
    assert all(ov >= level - 1e-9 for e0, ov in cheb if e0 >= valid_from)
    text = bench.run_fixed_point(cfg)
    assert "# chebyshev_valid_e0_min=" in text


def test_resolve_schedule_json_path(tmp_path):
    cfg = ExperimentConfig.for_experiment("custom", **CHEAP)
    sched = AngleSchedule.from_json(
        '{"s_target": 0.0, "claimed_order": 0, "pulses": '
        '[{"g": "O", "theta": 3.14}, {"g": "D", "theta": 3.14}]}'
    )
    path = tmp_path / "sched.json"
    path.write_text(sched.to_json())
    loaded = resolve_schedule(str(path), cfg)
    assert loaded == sched
    assert resolve_schedule("original-pi", cfg).kind == "original-pi"


def test_parse_formula_grammar():
    assert parse_formula("gc") == GroupCommutator()
    assert parse_formula("two-copies(gc)") == TwoCopies(GroupCommutator())
    assert parse_formula("five-copies(two-copies(gc))") == FiveCopies(TwoCopies(GroupCommutator()))
    with pytest.raises(ConfigInvalid):
        parse_formula("sixth(gc)")


# ---------------------------------------------------------------------------
# CLI surface


def test_cli_geodesic():
    res = CliRunner().invoke(main, ["geodesic", "--n", "4", "--marked", "3"])
    assert res.exit_code == 0
    assert "fs_distance" in res.output
    assert "query_bound" in res.output


def test_cli_geodesic_rejects_bad_instance():
    res = CliRunner().invoke(main, ["geodesic", "--n", "4", "--marked", ""])
    assert res.exit_code == 2


def test_cli_compile_and_simulate(tmp_path):
    out = tmp_path / "sched.json"
    res = CliRunner().invoke(
        main, ["compile", "--kind", "jean-koseleff(gc)", "--s", "0.3", "--out", str(out)]
    )
    assert res.exit_code == 0
    sched = AngleSchedule.from_json(out.read_text())
    assert sched.claimed_order == 4

    res2 = CliRunner().invoke(
        main,
        ["simulate", "--n", "3", "--marked", "1,5", "--schedule", str(out), "--mode", "reduced"],
    )
    assert res2.exit_code == 0
    assert res2.output.splitlines()[1] == "step,success_probability"

    res3 = CliRunner().invoke(main, ["compile", "--kind", "nope", "--s", "0.3"])
    assert res3.exit_code == 2


def test_cli_bench_custom_and_errors(tmp_path):
    out = tmp_path / "rows.csv"
    res = CliRunner().invoke(
        main,
        ["bench", "custom", "--n", "4", "--iters", "2", "--s", "0.5", "--seed", "3",
         "--out", str(out)],
    )
    assert res.exit_code == 0
    assert out.read_text().startswith("# grover-ite-lab")
    res2 = CliRunner().invoke(main, ["bench", "custom", "--n", "40"])
    assert res2.exit_code == 2


def test_cli_bench_json_config(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"n_qubits": [4], "iterations": 2, "s_values": [0.5]}))
    res = CliRunner().invoke(
        main, ["bench", "custom", "--seed", "3", "--json-config", str(cfg_path)]
    )
    assert res.exit_code == 0
    assert "0.5,1," in res.output


def test_cli_qsp_fit_map_check(tmp_path):
    poly_path = tmp_path / "poly.json"
    poly_path.write_text(ChebyshevPoly((0.0, 1.0), "odd").to_json())
    phases_path = tmp_path / "phases.json"
    res = CliRunner().invoke(
        main,
        ["qsp", "fit", "--target", str(poly_path), "--k", "1", "--seed", "2",
         "--out", str(phases_path)],
    )
    assert res.exit_code == 0
    payload = json.loads(phases_path.read_text())
    assert payload["convention"] == "R"
    assert len(payload["phases"]) == 2

    sched_path = tmp_path / "sched.json"
    res2 = CliRunner().invoke(
        main, ["compile", "--kind", "gc", "--s", "0.2", "--out", str(sched_path)]
    )
    assert res2.exit_code == 0
    mapped = tmp_path / "mapped.json"
    res3 = CliRunner().invoke(
        main, ["qsp", "map", "--from-schedule", str(sched_path), "--out", str(mapped)]
    )
    assert res3.exit_code == 0
    back = tmp_path / "back.json"
    res4 = CliRunner().invoke(
        main, ["qsp", "map", "--from-phases", str(mapped), "--out", str(back)]
    )
    assert res4.exit_code == 0
    orig = AngleSchedule.from_json(sched_path.read_text())
    round_tripped = AngleSchedule.from_json(back.read_text())
    assert round_tripped.grover_pairs() == pytest.approx(orig.grover_pairs())

    res5 = CliRunner().invoke(main, ["qsp", "check", "--poly", str(poly_path), "--k", "1"])
    assert res5.exit_code == 0
    assert "overall: achievable" in res5.output

    res6 = CliRunner().invoke(main, ["qsp", "map"])
    assert res6.exit_code == 2


def test_cli_strict_exit_code_on_threshold_miss():
    # iters=2 gives a 4-reflection budget, far too small for s=3: the fig-a
    # thresholds must fail and --strict turns that into exit code 3
    res = CliRunner().invoke(
        main,
        ["bench", "fig-a", "--n", "4", "--iters", "2", "--s", "3.0", "--seed", "3",
         "--strict"],
    )
    assert res.exit_code == 3


def test_cli_strict_passes_on_met_thresholds():
    res = CliRunner().invoke(
        main,
        ["bench", "fig-b", "--n", "3", "--n", "4", "--iters", "2", "--s", "0.5",
         "--seed", "3", "--strict"],
    )
    assert res.exit_code == 0
