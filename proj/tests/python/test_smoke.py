# SPDX-License-Identifier: Apache-2.0
import os
import pathlib

import pytest

import ssf_sim

SCENARIOS = pathlib.Path(
    os.environ.get("SSF_SCENARIOS", pathlib.Path(__file__).resolve().parents[2] / "scenarios")
)


def honest(n=5, horizon=6):
    sc = ssf_sim.Scenario()
    sc.n = n
    sc.horizon = horizon
    return sc


def test_quorum():
    assert ssf_sim.quorum(4) == 3
    assert ssf_sim.third(9) == 3


def test_honest_run_passes_every_property():
    trace = ssf_sim.run(honest())
    assert len(trace) > 0
    for name, verdict in ssf_sim.check_all(trace).items():
        assert verdict.outcome == "PASS", (name, verdict.detail)


def test_trace_text_round_trip():
    trace = ssf_sim.run(honest(4, 4))
    back = ssf_sim.Trace.parse(trace.text())
    assert back.text() == trace.text()
    kinds = {kind for _, _, kind, _ in trace.sends()}
    assert {"propose", "head-vote", "ffg-vote", "ack"} <= kinds


def test_scenario_yaml_round_trip():
    sc = honest(7, 8)
    sc.eta = 2
    sc.sleep = [ssf_sim.SleepInterval(1, 0, 8)]
    sc.gat = 8
    back = ssf_sim.Scenario.from_yaml(sc.to_yaml())
    assert back.to_yaml() == sc.to_yaml()
    assert back.eta == 2 and back.tau is None


def test_invalid_scenario_raises():
    sc = honest()
    sc.corruption = [ssf_sim.Corruption(99, 0)]
    assert sc.validate()
    with pytest.raises(ValueError):
        ssf_sim.run(sc)
    with pytest.raises(ValueError):
        ssf_sim.Trace.parse("garbage\n")


def test_equivocator_is_caught():
    sc = honest(7, 6)
    sc.corruption = [ssf_sim.Corruption(6, 0)]
    sc.strategy = "ffg-equivocator"
    found = ssf_sim.slash_scan(ssf_sim.run(sc))
    assert found
    assert all(v["offender"] == 6 and v["verified"] for v in found)


def test_double_finalizer_fixture():
    sc = ssf_sim.Scenario.load(str(SCENARIOS / "double_finalizer_e2.yaml"))
    report = ssf_sim.accountability(ssf_sim.run(sc))
    assert report["verdict"].outcome == "PASS"
    assert report["route"] == "E2"
    assert len(report["culprits"]) >= ssf_sim.third(sc.n)
    assert set(report["culprits"]) <= {6, 7, 8}


def test_equivalence_and_determinism():
    sc = honest(6, 8)
    sc.eta = 2
    assert ssf_sim.check_equivalence(sc).outcome == "PASS"
    assert ssf_sim.check_determinism(sc).outcome == "PASS"
    assert ssf_sim.compliance(sc)["compliant"]
