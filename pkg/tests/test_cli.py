import csv
import json

import numpy as np
import pytest

from nwspec.cli import main
from nwspec.config import parse_config, parse_state
from nwspec.errors import ConfigError
from nwspec.report import build_report, validate_report

BASE = """
[grid]
points_N = 256
half_width_L = 10
hbar = 1
"""


def write(tmp_path, body, name="exp.ini"):
    path = tmp_path / name
    path.write_text(BASE + body)
    return str(path)


def test_dump_coherent(tmp_path):
    cfg = write(tmp_path, "[state]\nstate = coherent{0,0}\n")
    assert main(["dump", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "dump_report.json").read_text())
    validate_report(report)
    assert report["results"]["max"] == pytest.approx(1 / np.pi, abs=1e-8)
    assert report["pass_fail"] == {"normalized": True}
    rows = list(csv.reader((tmp_path / "wigner.csv").open()))
    vals = np.array([float(r[2]) for r in rows[1:]])
    assert vals.max() == pytest.approx(1 / np.pi, abs=1e-8)


def test_spectrum_fock1(tmp_path):
    cfg = write(tmp_path, "[state]\nstate = fock{1}\n[spectrum]\ntrials = 20\n[run]\nseed = 0\n")
    assert main(["spectrum", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "spectrum_report.json").read_text())
    assert report["results"]["bracket"]["kind"] == "discrete"
    assert report["pass_fail"]["testers_consistent"] is True
    lines = (tmp_path / "lambda_curve.csv").read_text().splitlines()
    assert lines[0] == "alpha,lambda_min,verdict"
    assert len(lines) > 10


def test_husimi_task(tmp_path):
    cfg = write(tmp_path, "[state]\nstate = fock{2}\n")
    assert main(["husimi", "--config", cfg, "--out", str(tmp_path)]) == 0
    zeros = json.loads((tmp_path / "husimi_zeros.json").read_text())
    assert zeros and all(set(z) == {"q", "p", "refined_value"} for z in zeros)


def test_klm_task(tmp_path):
    cfg = write(tmp_path, "[state]\nstate = fock{1}\n[klm]\nalpha = 0.5\ntrials = 10\n[run]\nseed = 3\n")
    assert main(["klm", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "klm_report.json").read_text())
    assert report["results"]["verdict"] == "excluded"
    assert report["pass_fail"]["certificate_reproduces"] is True


@pytest.mark.parametrize("body", [
    "[state]\nstate = fock{1}\n",                                  # stochastic task without a seed
    "[state]\nstate = fock{1}\n[spectrum]\nbogus = 1\n[run]\nseed = 0\n",
    "[state]\nstate = fock{1,2\n[run]\nseed = 0\n",
    "[state]\nstate = coherent{50,0}\n[run]\nseed = 0\n",
    "[state]\nstate = fock{1}\n[spectrum]\ntol_psd = -1\n[run]\nseed = 0\n",
])
def test_bad_config_exits_2(tmp_path, body):
    assert main(["spectrum", "--config", write(tmp_path, body), "--out", str(tmp_path)]) == 2


def test_missing_config_exits_2(tmp_path):
    assert main(["dump", "--config", str(tmp_path / "nope.ini")]) == 2


def test_spectrum_is_deterministic(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    cfg = write(tmp_path, "[state]\nstate = mixture{[fock{0},fock{1}],[0.5,0.5]}\n"
                          "[spectrum]\ntrials = 12\nalpha_max = 1.0\n[run]\nseed = 5\n")
    texts = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["spectrum", "--config", cfg, "--out", str(out)]) == 0
        texts.append((out / "spectrum_report.json").read_text())
    assert texts[0] == texts[1]
    assert json.loads(texts[0])["provenance"]["timestamp"] == "2023-11-14T22:13:20Z"


def test_seed_flag_overrides(tmp_path):
    cfg = parse_config(BASE + "[state]\nstate = fock{0}\n[run]\nseed = 1\n", "spectrum", seed=9)
    assert cfg.seed == 9


def test_parse_state_descriptors():
    m = parse_state("mixture{[fock{0}, coherent{1,0.5}], [0.25, 0.75]}")
    assert [c["kind"] for c in m["components"]] == ["fock", "coherent"]
    assert m["weights"] == [0.25, 0.75]
    g = parse_state("gaussian{[[2,0.5],[0.5,1]],[0,0]}")
    assert g["A"] == [[2, 0.5], [0.5, 1]]
    with pytest.raises(ConfigError):
        parse_state("wavelet{1}")


def test_validate_report_rejects():
    rep = build_report("dump", {}, {"x": float("nan")}, {"ok": True}, None, "0.1.0")
    assert rep["results"]["x"] is None
    validate_report(rep)
    bad = dict(rep, pass_fail={"ok": 1})
    with pytest.raises(ValueError):
        validate_report(bad)
    with pytest.raises(ValueError):
        validate_report({k: v for k, v in rep.items() if k != "provenance"})
