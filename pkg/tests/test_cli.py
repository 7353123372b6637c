import json
import warnings
from pathlib import Path

import pytest

from tvlab.cli import ExperimentConfig, main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def load(out, command):
    return json.loads((out / f"{command}.json").read_text())


@pytest.mark.parametrize(
    "config,code", [("cone", 0), ("brieskorn", 0), ("product", 2), ("empty_link", 3)]
)
def test_check_assumption_exit_codes(tmp_path, config, code):
    got, out = run(tmp_path, "check-assumption", "--config", str(CONFIGS / f"{config}.ini"))
    assert got == code
    rep = load(out, "check-assumption")
    assert rep["exit_code"] == code
    if config == "cone":
        assert rep["results"]["assumption"]["transversality_margin"] == pytest.approx(1.0, abs=1e-8)
    if config == "product":
        reasons = " ".join(rep["results"]["assumption"]["reasons"])
        assert "codimension" in reasons and "rank" in reasons


def test_parameter_errors(tmp_path):
    cone = str(CONFIGS / "cone.ini")
    assert run(tmp_path, "spectra", "--config", cone, "--degree", "5")[0] == 4  # band [0,4] > d-2
    assert run(tmp_path, "spectra", "--config", str(tmp_path / "missing.ini"))[0] == 4
    assert run(tmp_path, "kernel", "--config", cone, "--degree", "1")[0] == 4
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\nm = 3\nideal = z1\n[tolerances]\nrank = -1\n")
    assert run(tmp_path, "proxy", "--config", str(bad))[0] == 4
    assert run(tmp_path, "proxy")[0] == 4  # no ideal


def test_conditioning_exit_code(tmp_path):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        code, out = run(tmp_path, "proxy", "--config", str(CONFIGS / "near_dependent.ini"))
    assert code == 5
    assert "ConditioningError" in load(out, "proxy")["error"]


def test_kernel_report_and_cache(tmp_path):
    cache = tmp_path / "cache"
    args = ("kernel", "--config", str(CONFIGS / "cone.ini"), "--samples", "6000", "--cache", str(cache))
    code, out = run(tmp_path, *args, name="a")
    assert code == 0
    rep = load(out, "kernel")
    k = rep["results"]["kernel"]
    assert k["dimension_gap"] == 0 and k["max_angle"] <= 1e-3
    assert k["tolerance"] == 1e-6
    assert rep["cache_keys"] == [k["cache_key"]]
    assert (cache / f"{k['cache_key']}.tvlb").exists()
    timings = json.loads((out / "kernel.timings.json").read_text())
    assert timings["cache_misses"] == 1 and "seconds" not in rep
    code, out2 = run(tmp_path, *args, name="b")
    assert json.loads((out2 / "kernel.timings.json").read_text())["cache_hits"] == 1
    assert (out / "kernel.json").read_bytes() == (out2 / "kernel.json").read_bytes()


def test_jet_demo(tmp_path):
    code, out = run(tmp_path, "kernel", "--config", str(CONFIGS / "jet.ini"))
    assert code == 0
    jet = load(out, "kernel")["results"]["jet"]
    assert jet["match"] and jet["kernel_dim"] == jet["ideal_dim"]
    assert jet["statement"] == "kernel = multiples of <z1^2>"


def test_spectra_outputs(tmp_path):
    code, out = run(tmp_path, "spectra", "--config", str(CONFIGS / "cone.ini"), "--degree", "12", "--emit-gnuplot")
    assert code == 0
    rep = load(out, "spectra")["results"]
    assert rep["band"] == [0, 4]
    assert all(s["band"] == [0, 4] for s in rep["spectra"])
    assert rep["adjoint_symmetry_defect"] <= 1e-12
    assert len(rep["decay"]["fits"]) == 9 and all("slope" in f for f in rep["decay"]["fits"])
    csv = (out / "spectra.csv").read_text().splitlines()
    assert csv[0] == "d,band,i,j,k,sigma"
    assert csv[1].startswith("12,0-4,1,1,1,")
    assert "plot 'spectra.csv'" in (out / "spectra.gp").read_text()


def test_full_ball_spectrum_matches_diagonal_law(tmp_path):
    code, out = run(tmp_path, "spectra", "--config", str(CONFIGS / "full_ball.ini"), "--degree", "8",
                    "--ideal", "z1")  # Q = functions of z2, z3 only
    assert code == 4  # configured band [0,10] exceeds d-2
    code, out = run(tmp_path, "spectra", "--config", str(CONFIGS / "full_ball.ini"))
    assert code == 0
    fits = {tuple(f["pair"]): f for f in load(out, "spectra")["results"]["decay"]["fits"]}
    for n, s in zip(fits[(1, 1)]["degrees"], fits[(1, 1)]["sigma_max"]):
        assert s == pytest.approx(1 / (n + 4), rel=1e-12)


def test_norms_and_extend_and_proxy(tmp_path):
    code, out = run(tmp_path, "norms", "--degree", "2", "--weight", "1")
    assert code == 0
    norms = load(out, "norms")["results"]["closed_form"]["norms"]
    assert norms[0]["norm2"] == 1.0 and norms[1]["norm2"] == pytest.approx(1 / 5)  # 1/(m + s + 1)
    code, out = run(tmp_path, "extend", "--config", str(CONFIGS / "linear.ini"), "--samples", "8000")
    assert code == 0
    ext = load(out, "extend")["results"]["extension"]
    assert [r["d"] for r in ext["rows"]] == [4, 6, 8]
    assert max(r["RE_minus_I"] for r in ext["rows"]) <= 1e-8
    code, out = run(tmp_path, "proxy", "--config", str(CONFIGS / "cubic.ini"))
    assert code == 0
    assert (out / "proxy.csv").read_text().splitlines()[5] == "4,31,31,31"


def test_report_merge(tmp_path):
    _, a = run(tmp_path, "proxy", "--config", str(CONFIGS / "cone.ini"), name="a")
    _, b = run(tmp_path, "check-assumption", "--config", str(CONFIGS / "product.ini"), name="b")
    out = tmp_path / "m"
    assert main(["report-merge", str(a / "proxy.json"), str(b / "check-assumption.json"), "--out", str(out)]) == 0
    merged = json.loads((out / "merged.json").read_text())
    assert merged["count"] == 2
    assert [r["command"] for r in merged["reports"]] == ["check-assumption", "proxy"]
    assert main(["report-merge", "--out", str(out)]) == 4


def test_flags_override_config_and_hash():
    import argparse

    cfg = ExperimentConfig.from_file(CONFIGS / "cone.ini")
    h = cfg.hash()
    ns = argparse.Namespace(seed=99, degree=None, weight=None, samples=None, out="elsewhere", ideal=None)
    cfg.override(ns)
    assert cfg.seed == 99 and cfg.d == 6
    assert cfg.hash() != h
    cfg.out = "again"
    assert cfg.hash() == ExperimentConfig.from_file(CONFIGS / "cone.ini").override(ns).hash()
