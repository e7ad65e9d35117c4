import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctdwells.cli import run
from ctdwells.config import ConfigError, ExperimentConfig, apply, read_config_file, validate
from ctdwells.io import strip_timestamp


def rows_of(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]


def test_analyze_zero_beta_is_uniform(tmp_path):
    out = tmp_path / "a.csv"
    assert run(["analyze", "--epsilon", "0.25", "--truncation", "4", "--beta", "0", "--out", str(out)]) == 0
    rows = rows_of(out.read_text())
    assert len(rows) == 5
    lengths = [2 * math.pi - 2 * 0.25**3 - 2 * 0.25**9, *[0.0] * 4]
    assert float(rows[0]["probability"]) == pytest.approx(lengths[0] / (2 * math.pi), rel=1e-12)
    assert rows[0]["argmax"] == "1"


def test_analyze_schedule_marks_argmax(tmp_path):
    out = tmp_path / "a.csv"
    assert run(["analyze", "--schedule", "3..6", "--out", str(out)]) == 0
    rows = rows_of(out.read_text())
    betas = sorted({r["beta"] for r in rows}, key=float)
    assert [next(r["argmax"] for r in rows if r["beta"] == b) for b in betas] == ["3", "4", "5", "6"]


def test_schedule_rows(tmp_path):
    out = tmp_path / "s.csv"
    assert run(["schedule", "--epsilon", "0.1", "--schedule", "2..10", "--out", str(out)]) == 0
    rows = rows_of(out.read_text())
    assert len(rows) == 9
    assert all(float(r["ratio_to_previous"]) == pytest.approx(6.0, rel=1e-12) for r in rows[1:])
    chars = [r["character"] for r in rows]
    assert all(a != b for a, b in zip(chars, chars[1:]))
    assert all(r["pins_n"] == "true" for r in rows)


def test_infeasible_schedule_exit_code(tmp_path):
    out = tmp_path / "s.csv"
    code = run(["schedule", "--truncation", "500", "--schedule", "390..399", "--out", str(out)])
    assert code == 4
    assert not out.exists()


def test_malformed_config_no_output(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("epsilon = 0.1\nbeta = 1\nthis is not a setting\n")
    out = tmp_path / "o.csv"
    assert run(["analyze", "--config", str(cfg), "--out", str(out)]) == 2
    assert "bad.cfg:3" in capsys.readouterr().err
    assert not out.exists()
    assert list(tmp_path.iterdir()) == [cfg]


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["analyze", "--epsilon", "1.5", "--beta", "1"], "epsilon"),
        (["analyze", "--beta", "x"], "beta"),
        (["analyze"], "beta"),
        (["sample", "--beta", "1", "--dims", "10"], "seed"),
        (["mcmc", "--beta", "1", "--seed", "1", "--sweeps", "5", "--burn-in", "9"], "burn_in"),
        (["schedule", "--schedule", "5..2"], "schedule"),
        (["verify", "--tol", "nope=1"], "nope"),
        (["verify", "--criteria", "11"], "criteria"),
    ],
)
def test_config_errors(argv, needle, capsys):
    assert run(argv) == 2
    assert needle in capsys.readouterr().err


def test_sample_emits_length_minus_one_rows(tmp_path):
    out = tmp_path / "x.csv"
    argv = ["sample", "--epsilon", "0.25", "--truncation", "4", "--beta", "20", "--dims", "50", "--seed", "3"]
    assert run([*argv, "--out", str(out)]) == 0
    rows = rows_of(out.read_text())
    assert len(rows) == 49
    assert "# config: seed=3" in out.read_text()


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "--epsilon", "0.25", "--truncation", "4", "--beta", "20", "--dims", "40", "--seed", "8"],
        ["mcmc", "--epsilon", "0.25", "--truncation", "4", "--beta", "20", "--dims", "30", "--sweeps", "300",
         "--burn-in", "100", "--thin", "20", "--seed", "8"],
        ["ctd-demo", "--epsilon", "0.25", "--truncation", "4", "--schedule", "2..3", "--dims", "30",
         "--sweeps", "50", "--seed", "8", "--replicas", "2", "--format", "json"],
        ["analyze", "--mode", "paper", "--beta", "0,3.5,87.58", "--format", "json"],
    ],
)
def test_rerun_from_header_is_identical(tmp_path, argv):
    first, second, third = tmp_path / "1", tmp_path / "2", tmp_path / "3"
    assert run([*argv, "--out", str(first)]) == 0
    assert run([*argv, "--out", str(second)]) == 0
    assert run([argv[0], "--config", str(first), "--out", str(third)]) == 0
    ref = strip_timestamp(first.read_text())
    assert strip_timestamp(second.read_text()) == ref
    assert strip_timestamp(third.read_text()) == ref


def test_mcmc_regime_violation_names_width(capsys):
    code = run(["mcmc", "--epsilon", "0.1", "--truncation", "4", "--beta", "1", "--seed", "1"])
    assert code == 3
    assert "half-width" in capsys.readouterr().err


def test_verify_rejects_large_epsilon(capsys):
    assert run(["verify", "--epsilon", "0.9"]) == 2
    assert "not small enough" in capsys.readouterr().err


def test_verify_fast_subset_passes(tmp_path):
    out = tmp_path / "v.json"
    assert run(["verify", "--criteria", "1,2,3,4,5,6,7", "--format", "json", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["verdict"]["passed"] is True
    assert doc["verdict"]["first_failure"] is None


def test_verify_tampered_tolerance_fails(tmp_path, capsys):
    out = tmp_path / "v.json"
    code = run(["verify", "--criteria", "4,7", "--tol", "offset_rel=1e-18", "--format", "json", "--out", str(out)])
    assert code == 1
    doc = json.loads(out.read_text())
    assert doc["verdict"]["first_failure"]["criterion"] == 4
    assert "criterion 4" in capsys.readouterr().err


def test_verify_tolerance_from_config_file(tmp_path):
    cfg = tmp_path / "t.cfg"
    cfg.write_text("# tampered\ntol.quadrature_rel = 1e-17\ncriteria = 7\n")
    assert run(["verify", "--config", str(cfg), "--out", str(tmp_path / "v.csv")]) == 1


def test_flags_override_config_file(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("epsilon = 0.2\ntruncation = 5\nbeta = 1\n")
    c = read_config_file(cfg)
    apply(c, "epsilon", "0.3")
    assert c.epsilon == 0.3 and c.truncation == 5


@settings(max_examples=60, deadline=None)
@given(
    eps=st.floats(0.01, 0.9),
    trunc=st.integers(2, 60),
    betas=st.lists(st.floats(0.0, 1e9), max_size=4),
    seed=st.one_of(st.none(), st.integers(0, 2**63)),
    dims=st.lists(st.integers(2, 500), min_size=1, max_size=2),
    mode=st.sampled_from(["exact", "paper"]),
)
def test_config_round_trip(tmp_path_factory, eps, trunc, betas, seed, dims, mode):
    cfg = ExperimentConfig(
        command="analyze", epsilon=eps, truncation=trunc, beta=tuple(betas), seed=seed,
        dims=tuple(dims), mode=mode, tol={"offset_rel": 1e-11}, suite={"mcmc_sweeps": 1000},
    )
    path = tmp_path_factory.mktemp("cfg") / "c.cfg"
    path.write_text("".join(f"# config: {k}={v}\n" for k, v in cfg.items()))
    back = read_config_file(path)
    assert back.items() == cfg.items()


def test_validate_checks_before_compute():
    cfg = ExperimentConfig(command="mcmc", beta=(1.0,), seed=None)
    with pytest.raises(ConfigError, match="seed"):
        validate(cfg)
