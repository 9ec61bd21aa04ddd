"""CLI: report schema, frozen payloads, exit-code mapping, determinism."""

import json

import pytest

from kinderlab import cli
from kinderlab.errors import PropertyViolationError


def run_config(command, params, **kw):
    return cli.run(cli.RunConfig(command=command, params=params, **kw))


def test_arith_legendre_payload():
    rep = run_config("arith", {"op": "legendre", "k": 10, "p": 2})
    assert rep.results == {"valuation": 8}
    assert rep.version == cli.ARTIFACT_VERSION


def test_generic_span_exhaustive_payload():
    rep = run_config("generic", {"kind": "span", "n": 2, "s": 3, "q": 2, "mode": "exhaustive"})
    assert rep.results["frequency"] == 0.65625
    assert rep.results["paper_bound"] == 0.625
    assert rep.results["exact"] is True


def test_report_echoes_config():
    cfg = cli.RunConfig(
        command="witness",
        params={"m": 2, "n": 3, "q": 4},
        seed=9,
        trials=7,
        caps={"subgroups": 100},
        out="somewhere.json",
    )
    payload = cli.run(cfg).to_payload()
    assert payload["config"] == {
        "command": "witness",
        "params": {"m": 2, "n": 3, "q": 4},
        "seed": 9,
        "trials": 7,
        "caps": {"subgroups": 100},
        "out": "somewhere.json",
    }
    assert "elapsed_s" in payload and "results" in payload


def test_witness_results():
    rep = run_config("witness", {"m": 3, "n": 3, "q": 3})
    assert rep.results["end_dim_k"] == 1


def test_field_check_results():
    rep = run_config("field-check", {"p": 2, "e": 8})
    assert rep.results["order"] == 256
    assert all(rep.results["checks"].values())


def test_hom_deterministic_payload():
    cfg = dict(command="hom", params={"a": 2, "s": 2, "b": 2, "t": 2, "c": 2, "q": 3})
    r1 = cli.run(cli.RunConfig(seed=7, trials=6, **cfg))
    r2 = cli.run(cli.RunConfig(seed=7, trials=6, **cfg))
    assert json.dumps(r1.results, sort_keys=True) == json.dumps(r2.results, sort_keys=True)
    assert sum(r1.results["dim_hist"].values()) == 6


def test_json_report_valid():
    rep = run_config("alt-codes", {"k": 3, "l": 1})
    parsed = json.loads(rep.to_json())
    assert parsed["results"]["classes"] == 3


def test_b2_demo():
    rep = run_config("b2-demo", {"q": 4})
    assert rep.results["order"] == 256
    assert rep.results["q_image_is_field"] is True


def test_nursery_census_command():
    rep = run_config(
        "nursery-census", {"kind": "matrix", "a": 2, "c": 1, "q": 2, "ell": 3}
    )
    assert rep.results["kinder_count"] == 1 and rep.results["class_count"] == 1


def test_reconstruct_command():
    rep = run_config(
        "reconstruct",
        {"kind": "matrix", "a": 1, "c": 1, "q": 2},
        seed=3,
        trials=4,
    )
    assert rep.results["exact_recoveries"] == 4


def test_suzuki_roundtrip_via_cli(tmp_path):
    cert = tmp_path / "cert.json"
    rep = run_config("suzuki-search", {"e": 4, "cert": str(cert)}, seed=1)
    assert rep.results["found"] is True and rep.results["verified"] is True
    assert cert.exists()
    rep2 = run_config("suzuki-verify", {"cert": str(cert)})
    assert rep2.results == {
        "valid": True,
        "e": 4,
        "degree": 9,
        "s_size": rep.results["s_size"],
    }


def test_main_exit_codes(tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["arith", "--op", "legendre", "--k", "10", "--p", "2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["results"] == {"valuation": 8}
    # invalid config: seed missing for a stochastic command
    assert cli.main(["hom", "--a", "1", "--s", "1", "--b", "1", "--t", "1"]) == 2
    # invalid config: q not a prime power
    assert cli.main(["witness", "--m", "1", "--n", "1", "--q", "6"]) == 2
    # cap exceeded
    assert cli.main(["alt-codes", "--k", "9", "--l", "2"]) == 3


def test_main_property_violation_exit(monkeypatch):
    def boom(config):
        raise PropertyViolationError("synthetic")

    monkeypatch.setitem(cli._HANDLERS, "arith", boom)
    assert cli.main(["arith", "--op", "mu", "--n", "8"]) == 4


def test_verify_tier_validation():
    with pytest.raises(Exception):
        cli.verify_suite("nope")


def test_unknown_command_rejected():
    with pytest.raises(Exception):
        cli.run(cli.RunConfig(command="mystery", params={}))
