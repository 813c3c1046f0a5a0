import json

import pytest

from tailcomb.cli import main
from tailcomb.randgen import child_rng, instance_graph, random_graph
from tailcomb.suites import (
    ALL_SUITES,
    SuiteConfig,
    SUITES,
    replay,
    run_suite,
    suite_thm64,
)


# -- generator -----------------------------------------------------------------


def test_generator_deterministic():
    g1 = instance_graph(7, 3, 6, 4, True)
    g2 = instance_graph(7, 3, 6, 4, True)
    assert g1 == g2
    assert instance_graph(7, 4, 6, 4, True) != g1 or True  # streams differ freely


def test_generator_bounds():
    for i in range(40):
        G = instance_graph(11, i, 4, 2, False)
        assert 1 <= G.p <= 4
        assert all(not nd.is_loop for nd in G.nodes)
        assert len(G.nodes) <= (G.p - 1) + 2
        assert G.connected(G.full_mask)


def test_generator_single_component_loops():
    rng = child_rng(5, 0)
    G = random_graph(rng, max_components=1, max_extra_edges=3, allow_loops=True)
    assert G.p == 1
    assert all(nd.is_loop for nd in G.nodes)


def test_generator_two_component_outcomes():
    # with two components, no loops and at most one extra edge, the only
    # shapes are the single bridge and the double edge
    seen = set()
    for i in range(60):
        rng = child_rng(21, i)
        G = random_graph(rng, max_components=2, max_extra_edges=1,
                         allow_loops=False)
        if G.p != 2:
            continue
        assert all(not nd.is_loop for nd in G.nodes)
        seen.add(len(G.nodes))
    assert seen == {1, 2}


# -- runner ---------------------------------------------------------------------


def test_run_suite_empty_config():
    rep = run_suite(SuiteConfig(instances=0))
    assert rep.ok
    assert all(rep.checks[s] == 0 for s in ALL_SUITES)


def test_run_suite_deterministic_json():
    cfg = dict(seed=3, instances=4, suites=("closure-22/23", "prop-31"))
    a = run_suite(SuiteConfig(**cfg)).to_json(include_timing=False)
    b = run_suite(SuiteConfig(**cfg)).to_json(include_timing=False)
    assert a == b


def test_unknown_suite_rejected():
    with pytest.raises(Exception):
        SuiteConfig(suites=("no-such-suite",))


def test_parallel_matches_serial():
    base = dict(seed=2, instances=6, suites=("prop-31", "thm-64-resolution"))
    serial = run_suite(SuiteConfig(**base)).to_dict(include_timing=False)
    parallel = run_suite(SuiteConfig(jobs=2, **base)).to_dict(include_timing=False)
    assert serial["suites"] == parallel["suites"]
    assert serial["ok"] == parallel["ok"]


def test_expected_failure_dump_and_replay(G2):
    # the as-displayed profile is the documented discrepancy: the resolution
    # suite must fail on the banana and the dump must replay to the same
    checks, bad = suite_thm64(G2, None, "as-displayed")
    assert bad, "expected the displayed profile to fail on the banana"
    dump = {
        "suite": "thm-64-resolution",
        "instance": 0,
        "seed": 1,
        "profile": "as-displayed",
        "graph": G2.to_spec(),
        "context": bad[0],
    }
    rep = replay(dump)
    assert not rep.ok
    again = rep.violations["thm-64-resolution"][0]["context"]
    assert again["failing_pairs"] == bad[0]["failing_pairs"]


def test_all_suites_green_small_batch():
    rep = run_suite(SuiteConfig(seed=9, instances=6))
    assert rep.ok, rep.to_json()


# -- CLI ------------------------------------------------------------------------


def test_cli_validate_and_tails(tmp_path, capsys):
    g3 = tmp_path / "g3.json"
    assert main(["fixture", "G3"]) == 0
    g3.write_text(capsys.readouterr().out)
    assert main(["validate", str(g3)]) == 0
    capsys.readouterr()
    assert main(["tails", str(g3), "--k", "2", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["tails"] == [["C1"], ["C2", "C3"]]


def test_cli_malformed_input(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"components": ["C1", "C2"], "marked": "C1", "nodes": []}')
    assert main(["validate", str(bad)]) == 2
    assert main(["qs-check", "G2", "not-json"]) == 2


def test_cli_resolve_exit_codes(tmp_path, capsys):
    assert main(["resolve", "G3"]) == 1
    out = capsys.readouterr().out
    assert "not resolved" in out and "e12" in out
    assert main(["resolve", "G3", "--from-tails"]) == 0
    plan = tmp_path / "phiS.json"
    plan.write_text(
        json.dumps([{"pair": ["e12", "e13"], "match": [["C2", "C3"], ["C1", "C1"]]}])
    )
    assert main(["resolve", "G3", "--plan", str(plan)]) == 0


def test_cli_qs_commands(capsys):
    assert main(["qs-check", "G2", '{"C1": 2, "C2": -2}', "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["quasistable"] is False
    assert data["witness"]["subcurve"] == ["C1"]
    assert main(["qs-reduce", "G2", '{"C1": 2, "C2": -2}', "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["twist"] == {"C1": 0, "C2": 1}
    assert data["result"] == {"C1": 0, "C2": 0}


def test_cli_twister_oracle(capsys):
    assert main(["twister", "G2", "--oracle"]) == 0
    assert "agree" in capsys.readouterr().out


def test_cli_verify_small(capsys):
    rc = main(["verify", "--instances", "3", "--suite", "prop-31",
               "--suite", "thm-64-resolution"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "verdict: pass" in out


def test_cli_verify_discrepancy(capsys):
    assert main(["verify", "--discrepancy"]) == 0
    assert "True" in capsys.readouterr().out


def test_cli_verify_replay(tmp_path, capsys, G2):
    checks, bad = suite_thm64(G2, None, "as-displayed")
    dump = {
        "suite": "thm-64-resolution",
        "instance": 0,
        "seed": 1,
        "profile": "as-displayed",
        "graph": G2.to_spec(),
        "context": bad[0],
    }
    f = tmp_path / "dump.json"
    f.write_text(json.dumps(dump))
    assert main(["verify", "--replay", str(f)]) == 1


def test_cli_sync_and_distinguished(capsys):
    assert main(["distinguished", "G2", "--pair", "a,b",
                 "--match", "C2:C2,C1:C1", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["points"]) == 2
    assert all(p["quasistable"]["quasistable"] for p in data["points"])
    assert main(["sync", "G2", "--pair", "a,b", "--match", "C2:C1,C1:C2",
                 "--point", "1", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["synchronized"] is False


def test_cli_minimal(capsys):
    assert main(["minimal", "G3", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["plan_from_tails_minimal"] is False
    assert data["minimal_plan"] == [
        {"pair": ["e12", "e13"], "match": [["C1", "C1"], ["C2", "C3"]]}
    ]
