"""Command-line interface: CSV artifacts, determinism, exit codes."""
import json
import math

import pytest

from cachewave import cli
from cachewave._backend import backend_name
from cachewave.mc import McEstimate


# ============================================================
# Helpers
# ============================================================

def _cfg_file(tmp_path, obj, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def _run(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _parse_csv(text):
    lines = text.splitlines()
    preamble = [ln for ln in lines if ln.startswith("#")]
    data = [ln for ln in lines if not ln.startswith("#")]
    header = data[0].split(",")
    rows = [ln.split(",") for ln in data[1:]]
    return preamble, header, rows


_FAST = {"n_trials": 2000, "grid_resolution": 5}


# ============================================================
# eval
# ============================================================

def test_eval_zero_rates_every_probability_is_one(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, {**_FAST, "r": 0.0, "r_tilde": 0.0})
    code, out, _ = _run(capsys, ["eval", "--config", cfg])
    assert code == 0
    preamble, header, rows = _parse_csv(out)
    assert len(rows) == 4
    for row in rows:
        rec = dict(zip(header, row))
        for col in ("stp_jensen", "stp_exact", "mc_physical_mean", "mc_ff_mean"):
            assert rec[col] == "1"
        assert rec["mc_physical_stderr"] == "0"
        assert rec["mc_ff_stderr"] == "0"


def test_eval_artifact_shape(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, {**_FAST, "methods": ["M1", "M2"]})
    code, out, _ = _run(capsys, ["eval", "--config", cfg])
    assert code == 0
    preamble, header, rows = _parse_csv(out)

    assert len(preamble) == 6
    assert preamble[0].startswith("# cachewave ")
    assert preamble[1] == "# command: eval"
    assert preamble[2] == "# seed: 0"
    digest = preamble[3].removeprefix("# config_sha256: ")
    assert len(digest) == 64 and all(c in "0123456789abcdef" for c in digest)
    assert preamble[4] == f"# backend: {backend_name}"
    assert preamble[5].startswith("# units: ")

    assert header[:15] == [
        "method", "snr_db", "lambda1", "lambda2", "r", "r_tilde",
        "alpha", "r1", "r_tilde1", "stp_jensen", "stp_exact",
        "mc_physical_mean", "mc_physical_stderr", "mc_ff_mean", "mc_ff_stderr"]
    assert header[15:] == [
        "factor_eta1", "factor_eta2", "factor_gamma1", "factor_gamma2",
        "factor_gamma_bar1", "factor_gamma_bar2", "factor_breve11",
        "factor_breve12", "factor_breve21", "factor_breve22",
        "factor_hat12", "factor_hat21"]

    m1 = dict(zip(header, rows[0]))
    m2 = dict(zip(header, rows[1]))
    assert m1["method"] == "M1_joint_sic" and m2["method"] == "M2_joint_nosic"
    # Each method reports only its own factors; the rest stay blank.
    assert m1["factor_eta1"] != "" and m1["factor_gamma_bar1"] == ""
    assert m2["factor_gamma_bar1"] != "" and m2["factor_eta1"] == ""
    assert 0.0 <= float(m1["stp_exact"]) <= float(m1["stp_jensen"]) <= 1.0


def test_eval_reruns_are_byte_identical(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, {**_FAST, "methods": ["M1"], "snr_db": 7.5})
    code1, out1, _ = _run(capsys, ["eval", "--config", cfg])
    code2, out2, _ = _run(capsys, ["eval", "--config", cfg])
    assert code1 == code2 == 0
    assert out1 == out2


def test_overrides_change_seed_line_and_digest(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, {**_FAST, "methods": ["M2"]})
    _, base, _ = _run(capsys, ["eval", "--config", cfg])
    _, seeded, _ = _run(capsys, ["eval", "--config", cfg, "--seed", "123"])
    _, trialed, _ = _run(capsys, ["eval", "--config", cfg, "--trials", "4000"])

    assert "# seed: 0" in base and "# seed: 123" in seeded
    digests = set()
    for text in (base, seeded, trialed):
        preamble, _, _ = _parse_csv(text)
        digests.add(preamble[3])
    assert len(digests) == 3  # effective config differs in each run


def test_out_flag_and_config_out_key(tmp_path, capsys):
    out_file = tmp_path / "artifact.csv"
    cfg = _cfg_file(tmp_path, {**_FAST, "methods": ["M2"]})
    code, out, _ = _run(capsys, ["eval", "--config", cfg, "--out", str(out_file)])
    assert code == 0
    assert out == ""  # everything went to the file
    preamble, header, rows = _parse_csv(out_file.read_text())
    assert len(rows) == 1 and rows[0][0] == "M2_joint_nosic"

    out_file2 = tmp_path / "artifact2.csv"
    cfg2 = _cfg_file(tmp_path, {**_FAST, "methods": ["M2"], "out": str(out_file2)},
                     name="cfg2.json")
    code, out, _ = _run(capsys, ["eval", "--config", cfg2])
    assert code == 0 and out == ""
    assert out_file2.read_text().splitlines()[-1] == out_file.read_text().splitlines()[-1]


# ============================================================
# Exit codes
# ============================================================

@pytest.mark.parametrize("bad", [
    {"bogus_key": 1},
    {"methods": ["M9"]},
    {"methods": []},
    {"methods": ["M1", "M1"]},
    {"snr_grid_db": [5.0, 5.0]},
    {"r": 0.5, "r1": 2.0},
    {"alpha": 1.5},
    {"lambda1": 0.0},
    {"gamma_mode": "approximate"},
    {"strategy": "annealing"},
    {"grid_resolution": 1},
    {"ga": {"popsize": 9}},
    {"ga": {"mutation_rate": 2.0}},
    {"out": 7},
])
def test_config_errors_exit_2(tmp_path, capsys, bad):
    cfg = _cfg_file(tmp_path, bad)
    code, out, err = _run(capsys, ["eval", "--config", cfg])
    assert code == 2
    assert out == ""
    assert "config error" in err


def test_unreadable_or_malformed_config_exit_2(tmp_path, capsys):
    code, _, err = _run(capsys, ["eval", "--config", str(tmp_path / "missing.json")])
    assert code == 2 and "cannot read config" in err

    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    code, _, err = _run(capsys, ["eval", "--config", str(bad)])
    assert code == 2 and "not valid JSON" in err

    arr = tmp_path / "array.json"
    arr.write_text("[1, 2]")
    code, _, err = _run(capsys, ["eval", "--config", str(arr)])
    assert code == 2 and "JSON object" in err


def test_numeric_failure_exit_3(tmp_path, capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise ValueError("synthetic numeric failure")

    monkeypatch.setattr(cli, "evaluate", boom)
    cfg = _cfg_file(tmp_path, {**_FAST, "methods": ["M1"]})
    code, out, err = _run(capsys, ["eval", "--config", cfg])
    assert code == 3
    assert out == ""
    assert "evaluation failed" in err and "synthetic numeric failure" in err


def test_check_disagreement_exit_4(tmp_path, capsys, monkeypatch):
    def biased(ch, alpha, rates, method, config):
        return McEstimate(mean=0.123, std_err=1e-15,
                          n_trials=config.n_trials, mode=config.mode)

    monkeypatch.setattr(cli, "estimate_stp", biased)
    cfg = _cfg_file(tmp_path, {**_FAST, "methods": ["M1"]})
    code, out, err = _run(capsys, ["eval", "--config", cfg, "--check"])
    assert code == 4
    assert out == ""
    assert "check failed" in err


def test_check_passes_on_degenerate_point(tmp_path, capsys):
    # Zero rates: analytic and MC are both exactly 1, so --check must pass.
    cfg = _cfg_file(tmp_path, {**_FAST, "r": 0.0, "r_tilde": 0.0})
    code, _, _ = _run(capsys, ["eval", "--config", cfg, "--check"])
    assert code == 0


# ============================================================
# optimize
# ============================================================

def test_optimize_grid_rows(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, {"grid_resolution": 5, "methods": ["M2", "M4"]})
    code, out, _ = _run(capsys, ["optimize", "--config", cfg])
    assert code == 0
    _, header, rows = _parse_csv(out)
    assert header == ["method", "snr_db", "r", "r_tilde", "strategy", "objective",
                      "best_alpha", "best_r1", "best_r_tilde1", "best_stp",
                      "evaluations"]
    rec2, rec4 = (dict(zip(header, row)) for row in rows)
    assert rec2["strategy"] == rec4["strategy"] == "grid"
    assert rec2["evaluations"] == "5"       # split-invariant method: alpha axis only
    assert rec4["evaluations"] == "125"
    assert 0.0 <= float(rec2["best_stp"]) <= 1.0


def test_optimize_genetic_deterministic(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, {
        "strategy": "genetic", "methods": ["M4"],
        "ga": {"population": 8, "generations": 3, "seed": 5}})
    code1, out1, _ = _run(capsys, ["optimize", "--config", cfg])
    code2, out2, _ = _run(capsys, ["optimize", "--config", cfg])
    assert code1 == code2 == 0
    assert out1 == out2
    _, header, rows = _parse_csv(out1)
    rec = dict(zip(header, rows[0]))
    assert rec["strategy"] == "genetic"
    assert rec["evaluations"] == str(8 + 3 * 7)


# ============================================================
# Figure sweeps
# ============================================================

def test_fig3_shape_and_determinism(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, {
        **_FAST, "snr_grid_db": [0.0, 10.0], "methods": ["M1", "M4"]})
    code, out, _ = _run(capsys, ["fig3", "--config", cfg])
    assert code == 0
    _, header, rows = _parse_csv(out)
    assert header == ["snr_db", "method", "stp_optimized", "stp_exact_at_optimum",
                      "mc_mean", "mc_stderr"]
    assert [(r[0], r[1]) for r in rows] == [
        ("0", "M1_joint_sic"), ("0", "M4_separate_nosic"),
        ("10", "M1_joint_sic"), ("10", "M4_separate_nosic")]
    for row in rows:
        rec = dict(zip(header, row))
        assert 0.0 <= float(rec["stp_exact_at_optimum"]) <= float(rec["stp_optimized"]) <= 1.0
        assert 0.0 <= float(rec["mc_mean"]) <= 1.0
    _, again, _ = _run(capsys, ["fig3", "--config", cfg])
    assert again == out


def test_fig4_sweeps_rate_and_snr(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, {
        "grid_resolution": 5, "rate_grid": [0.5, 1.0], "snr_grid_db": [10.0],
        "methods": ["M4"]})
    code, out, _ = _run(capsys, ["fig4", "--config", cfg])
    assert code == 0
    _, header, rows = _parse_csv(out)
    assert header == ["rate", "snr_db", "method", "stp"]
    assert [(r[0], r[1]) for r in rows] == [("0.5", "10"), ("1", "10")]
    # Success probability cannot improve when the target rate doubles.
    assert float(rows[1][3]) <= float(rows[0][3])


def test_fig5_variants_and_union(tmp_path, capsys):
    cfg = _cfg_file(tmp_path, {"grid_resolution": 5, "snr_grid_db": [10.0]})
    code, out, _ = _run(capsys, ["fig5", "--config", cfg])
    assert code == 0
    _, header, rows = _parse_csv(out)
    assert header == ["snr_db", "method", "variant", "stp",
                      "best_alpha", "best_r1", "best_r_tilde1"]
    recs = [dict(zip(header, row)) for row in rows]
    assert len(recs) == 2 * 4  # default methods M1, M3 x four variants
    for method in ("M1_joint_sic", "M3_separate_sic"):
        group = {r["variant"]: r for r in recs if r["method"] == method}
        assert set(group) == {"full", "uniform_power", "equal_split",
                              "uniform_power_equal_split"}
        full = float(group["full"]["stp"])
        for variant in ("uniform_power", "equal_split", "uniform_power_equal_split"):
            assert full >= float(group[variant]["stp"])
        # Pinned axes are reported at their pinned values.
        assert abs(float(group["uniform_power"]["best_alpha"]) - math.sqrt(0.5)) < 1e-12
        assert group["equal_split"]["best_r1"] == "1"
        assert group["equal_split"]["best_r_tilde1"] == "1"
