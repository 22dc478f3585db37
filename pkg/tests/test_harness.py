import csv
import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkd_twostep.harness import (
    ConfigError,
    ExperimentConfig,
    aggregate,
    run_sweep,
    run_trial,
    summary_matches,
    trial_seed,
    wilson_interval,
    write_outputs,
)
from qkd_twostep.harness.calculators import bound_calc, key_consumption_table, verify_cmd
from qkd_twostep.harness.cli import EXIT_CONFIG, EXIT_OK, main
from qkd_twostep.harness.config import AUTH_NAMES, PROTOCOL_NAMES

SMALL = ExperimentConfig(protocol="1", attack="p1-interleave-qm", n=512, trials=4, seed=5)

configs = st.builds(
    ExperimentConfig,
    protocol=st.sampled_from(PROTOCOL_NAMES),
    auth=st.sampled_from(AUTH_NAMES),
    n=st.integers(16, 1 << 16),
    z_bits=st.integers(1, 64),
    t_bits=st.integers(1, 64),
    w_max=st.integers(0, 6),
    trials=st.integers(0, 10_000),
    seed=st.integers(0, 2 ** 63),
    loss=st.floats(0, 0.99),
    flip=st.floats(0, 1),
    out=st.sampled_from(["", "run.jsonl", "out/x.jsonl"]),
    csv=st.booleans(),
    timing=st.booleans(),
    workers=st.integers(1, 8),
)


@given(configs)
def test_config_text_roundtrip(cfg):
    assert ExperimentConfig.from_text(cfg.to_text()) == cfg


def test_config_file_comments(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("# sweep\n\nprotocol = 3\nattack = p3-intercept-resend\ncsv = yes\n")
    cfg = ExperimentConfig.load(path)
    assert (cfg.protocol, cfg.attack, cfg.csv) == ("3", "p3-intercept-resend", True)


@pytest.mark.parametrize("text", ["bogus = 1", "n = ten", "csv = maybe", "protocol"])
def test_config_text_errors(text):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_text(text)


def test_config_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / "missing.cfg")


@pytest.mark.parametrize("changes", [
    {"protocol": "9"},
    {"auth": "md5"},
    {"attack": "nope"},
    {"protocol": "1", "attack": "p3-intercept-resend"},
    {"n": 8},
    {"z_bits": 0},
    {"t_bits": 65},
    {"w_max": -1},
    {"trials": -1},
    {"seed": -3},
    {"loss": 1.0},
    {"flip": 1.5},
    {"workers": 0},
])
def test_config_validation(changes):
    with pytest.raises(ConfigError):
        ExperimentConfig(**changes).validate()


def test_trial_seed_is_stable():
    assert trial_seed(0, 0) == trial_seed(0, 0)
    assert trial_seed(0, 0) != trial_seed(0, 1)
    assert trial_seed(1, 0) != trial_seed(0, 0)
    assert 0 <= trial_seed(7, 3) < 2 ** 64


def test_wilson():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert wilson_interval(0, 0) == (0.0, 1.0)
    assert wilson_interval(10, 10)[1] == pytest.approx(1.0)


def test_trial_rerun_matches_sweep():
    result = run_sweep(SMALL)
    assert run_trial(SMALL, 2) == result.records[2]


def test_sweep_summary_reaggregates():
    result = run_sweep(SMALL)
    assert summary_matches(result.records, result.summary)
    assert result.summary["trials"] == 4
    assert result.summary["expected_match_rate"] == 1.0


def test_sweep_zero_trials():
    s = run_sweep(SMALL.replace(trials=0)).summary
    assert s["degenerate"] and s["success_rate"] is None


def test_aggregate_counts():
    recs = run_sweep(SMALL.replace(trials=3)).records
    recs[0] = {**recs[0], "success": False}
    assert aggregate(recs)["successes"] == 2


def test_jsonl_byte_identical(tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    write_outputs(run_sweep(SMALL), a)
    write_outputs(run_sweep(SMALL), b)
    assert a.read_bytes() == b.read_bytes()


def test_worker_count_does_not_change_records():
    one = run_sweep(SMALL)
    two = run_sweep(SMALL.replace(workers=2))
    assert one.records == two.records


def test_jsonl_layout(tmp_path):
    out = tmp_path / "r.jsonl"
    write_outputs(run_sweep(SMALL.replace(out=str(out), csv=True)))
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert [r["type"] for r in rows] == ["config"] + ["trial"] * 4 + ["summary"]
    with open(str(out) + ".csv", newline="") as fh:
        table = list(csv.DictReader(fh))
    assert int(table[0]["trials"]) == 4


def test_timing_is_opt_in():
    rec = run_trial(SMALL, 0)
    assert "wall_time" not in rec
    assert "wall_time" in run_trial(SMALL.replace(timing=True), 0)


def test_unwritable_output(tmp_path):
    with pytest.raises(ConfigError):
        write_outputs(run_sweep(SMALL.replace(trials=1)), tmp_path / "no" / "x.jsonl")


def test_key_consumption_numbers():
    tab = key_consumption_table(256, 64)
    assert tab["two_step_bits"] == 320
    assert tab["its_bits"] == 576
    bits = [tab["sizes"][k]["key_bits"] for k in
            ("terabit", "petabit", "exabit", "zettabit", "yottabit")]
    assert bits == [260, 280, 298, 318, 338]


def test_bound_calc_errors():
    with pytest.raises(ValueError):
        bound_calc("nope")


def test_subseq_report():
    rep = bound_calc("subseq-exact", n_max=6)
    assert rep["all_equal"]


@pytest.mark.parametrize("selector,verdict", [
    ("all-functions", True), ("su2", True), ("constant", False),
])
def test_verify_selectors(selector, verdict):
    assert verify_cmd(selector, 3, 2, 2)["verdict"] == verdict


def test_verify_composed():
    rep = verify_cmd("composed", 4, 2, 2)
    assert rep["identity_holds"] and rep["iff_holds"]
    assert Fraction(rep["epsilon_g"]) == Fraction(3, 4)


# CLI ---------------------------------------------------------------------
def test_cli_run(tmp_path, capsys):
    out = tmp_path / "cli.jsonl"
    rc = main(["run", "--protocol", "1", "--attack", "p1-interleave-qm", "--n", "512",
               "--trials", "2", "--seed", "1", "--out", str(out)])
    assert rc == EXIT_OK
    assert json.loads(capsys.readouterr().out)["trials"] == 2
    assert out.exists()


def test_cli_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("protocol = 2\nattack = p2-onesided-qm\nn = 512\ntrials = 5\n")
    assert main(["run", "--config", str(cfg), "--trials", "1"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["trials"] == 1


@pytest.mark.parametrize("argv", [
    ["run", "--n", "4"],
    ["run", "--protocol", "1", "--attack", "b-memory"],
    ["run", "--loss", "2"],
    ["run", "--out", "/nonexistent/dir/x.jsonl", "--trials", "1", "--n", "64"],
    ["verify", "composed", "--m", "40", "--z", "40", "--t", "40"],
    ["bound", "lemma2", "--n", "10", "--k", "50"],
])
def test_cli_config_errors(argv, capsys):
    assert main(argv) == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_cli_rejects_unknown_choice():
    with pytest.raises(SystemExit) as exc:
        main(["run", "--protocol", "7"])
    assert exc.value.code != 0


def test_cli_bound(capsys):
    assert main(["bound", "key-consumption", "--z-bits", "256", "--t-bits", "64"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["its_bits"] == 576


def test_cli_verify(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "composed", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["iff_holds"] is True


def test_cli_attack_trace(capsys):
    rc = main(["attack-trace", "--protocol", "3", "--attack", "p3-intercept-resend",
               "--n", "512", "--seed", "7"])
    assert rc == EXIT_OK
    data = json.loads(capsys.readouterr().out)
    assert data["events"][0]["kind"].startswith("Q")
    assert any(e["forged"] for e in data["events"])
    assert data["outcome"]["final_relation"] == "KA=KE=KB"


def test_ball_bound_at_full_width():
    rep = bound_calc("lemma1", ell=4096, w=32, z_bits=256)
    assert rep["bound_full"] >= 0.999


def test_cli_bound_writes_out(tmp_path):
    out = tmp_path / "b.json"
    assert main(["bound", "subseq-exact", "--n-max", "5", "--out", str(out)]) == EXIT_OK
    assert json.loads(out.read_text())["all_equal"] is True
