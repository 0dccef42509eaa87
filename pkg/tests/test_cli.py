import csv
import io
import json
import math

import pytest
from click.testing import CliRunner

import _cache
from shrinkers import models
from shrinkers.cli import cli


def run(*args):
    return CliRunner().invoke(cli, [str(a) for a in args])


def read_csv(text):
    lines = text.splitlines()
    meta = [l for l in lines if l.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(l for l in lines if not l.startswith("#")))))
    return meta, rows


def test_find_hm4_two_records(tmp_path):
    out = tmp_path / "sols.json"
    r = run("find", "--model", "hm", "--d", 4, "--n-max", 2, "--out", out)
    assert r.exit_code == 0, r.output
    doc = json.loads(out.read_text())
    assert set(doc) >= {"config", "results", "checks"}
    assert [x["n"] for x in doc["results"]] == [1, 2]
    for rec, (a, b) in zip(doc["results"], _cache.HM_ORACLE[4]):
        assert rec["a"] == pytest.approx(a, abs=1e-7)
        assert rec["b"] == pytest.approx(b, abs=1e-7)
    for n in (1, 2):
        meta, rows = read_csv((tmp_path / f"sols_profile_n{n}.csv").read_text())
        assert meta[0].startswith("# config: ")
        assert list(rows[0]) == ["y", "f", "fp", "h", "hp", "type1"]
        assert float(rows[0]["y"]) == 0.0 and float(rows[0]["f"]) == 0.0


def test_find_hm9_none_found():
    r = run("find", "--model", "hm", "--d", 9, "--n-max", 1)
    assert r.exit_code == 0
    assert json.loads(r.output)["results"] == [{"status": "none_found"}]


def test_find_ym5_explicit():
    r = run("find", "--model", "ym", "--d", 5, "--n-max", 1)
    assert r.exit_code == 0, r.output
    gamma, delta, _ = models.ym_g1_constants(5)
    rec = json.loads(r.output)["results"][0]
    assert rec["a"] == pytest.approx(2 / gamma, abs=1e-6)
    assert rec["b"] == pytest.approx(1 / delta, abs=1e-6)


@pytest.mark.parametrize("model,d", [("ym", 7), ("hm", 3)])
def test_verify_passes(model, d):
    r = run("verify", "--model", model, "--d", d)
    assert r.exit_code == 0, r.output
    doc = json.loads(r.output)
    assert doc["results"]["all_passed"] and doc["checks"]


@pytest.mark.parametrize("model,d", [("hm", 2), ("ym", 4)])
def test_verify_rejects_bad_d(model, d):
    assert run("verify", "--model", model, "--d", d).exit_code == 2


def test_bad_window_exit_2():
    assert run("sweep", "--model", "hm", "--d", 5, "--a-min", 2, "--a-max", 1).exit_code == 2
    assert run("find", "--model", "hm", "--d", 5, "--n-max", 0).exit_code == 2


@pytest.mark.parametrize("model,d", [("hm", 7), ("ym", 10)])
def test_sweep_no_tail_matched(tmp_path, model, d):
    out = tmp_path / "sweep.csv"
    r = run("sweep", "--model", model, "--d", d, "--n", 500, "--format", "csv", "--out", out)
    assert r.exit_code == 0, r.output
    meta, rows = read_csv(out.read_text())
    assert len(rows) == 500
    assert not any(x["exit"] == "tail_matched" for x in rows)
    side = json.loads(out.with_suffix(".brackets.json").read_text())
    assert side["results"]["brackets"] == []
    assert side["results"]["exit_counts"]["tail_matched"] == 0


def test_sweep_hm5_brackets():
    r = run("sweep", "--model", "hm", "--d", 5, "--n", 100, "--a-min", 0.1, "--a-max", 50)
    assert r.exit_code == 0
    doc = json.loads(r.output)
    br = doc["results"]["brackets"]
    assert len(br) >= 1
    a1 = _cache.HM_ORACLE[5][0][0]
    assert any(b["a_lo"] <= a1 <= b["a_hi"] for b in br)
    a = [row["a"] for row in doc["results"]["rows"]]
    assert a == sorted(a)


def test_spectrum_transition(tmp_path):
    r = run("spectrum", "--d-min", 6.5, "--d-max", 8, "--d-step", 0.1)
    assert r.exit_code == 0, r.output
    _, rows = read_csv(r.output)
    counts = {round(float(x["d"]), 6): int(x["negative_count"]) for x in rows}
    assert counts[6.9] == 2 and counts[7.0] == 1
    assert all(v >= 1 for v in counts.values())


def test_spectrum_single_d6():
    r = run("spectrum", "--d", 6)
    assert r.exit_code == 0
    _, rows = read_csv(r.output)
    assert float(rows[0]["discriminant"]) == -4.0 and rows[0]["oscillatory"] == "true"


def test_spectrum_empty_range():
    assert run("spectrum", "--d-min", 8, "--d-max", 7).exit_code == 2
    assert run("spectrum", "--d-step", 0).exit_code == 2


def test_spectrum_json():
    r = run("spectrum", "--d", 7.5, "--format", "json")
    doc = json.loads(r.output)
    assert doc["results"][0]["negative_count"] == 1


def test_deterministic_output():
    args = ("sweep", "--model", "hm", "--d", 4, "--n", 30, "--format", "csv")
    assert run(*args).output == run(*args).output


def test_float_round_trip():
    r = run("spectrum", "--d", 7.25, "--format", "csv")
    _, rows = read_csv(r.output)
    x = rows[0]["eig1"]
    assert repr(float(x)) == x and math.isfinite(float(x))
