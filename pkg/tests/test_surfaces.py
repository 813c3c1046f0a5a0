"""Smaller API surfaces: reprs, exports, preconditions, text-mode CLI."""

import json

import pytest

from tailcomb.cli import main
from tailcomb.errors import PreconditionError
from tailcomb.graph import mask_of, members
from tailcomb.lift import build_c2
from tailcomb.tails import nested, tail_family

from conftest import sc


def test_mask_helpers():
    assert mask_of([0, 2]) == 0b101
    assert members(0b101) == (0, 2)
    assert members(0) == ()


def test_graph_repr(G2):
    text = repr(G2)
    assert "CurveGraph" in text and "'a'" in text and "marked='C1'" in text


def test_nested_family_protocol(G3):
    fam = nested(G3, 2, sc(G3, "C2", "C3"))
    assert len(fam) == 1
    assert list(fam) == [sc(G3, "C2", "C3")]


def test_nested_anchor_range(G3):
    with pytest.raises(PreconditionError):
        nested(G3, 2, 1 << 5)


def test_tail_family_index_range(G3):
    with pytest.raises(PreconditionError):
        tail_family(G3, 0, 9)


def test_lifted_dot(G1, G4):
    dot = build_c2(G4).to_dot()
    assert "shape=square" in dot and "doublecircle" in dot
    assert '"E(e,C1)" -- "E(e,C2)" [label="e:mid"]' in dot
    assert "E(loop,1)" in build_c2(G1).to_dot()


def test_lifted_exceptional_lookup(G4):
    LG = build_c2(G4)
    with pytest.raises(PreconditionError):
        LG.exceptional(0, 7)


def test_generator_bounds_validation():
    import random

    from tailcomb.randgen import random_graph

    with pytest.raises(ValueError):
        random_graph(random.Random(0), max_components=0)


def test_multidegree_length_check(G3):
    from tailcomb.degrees import multidegree

    with pytest.raises(PreconditionError):
        multidegree(G3, (1, -1))


# -- CLI text modes ---------------------------------------------------------


def test_cli_tails_full_list(capsys):
    assert main(["tails", "G3"]) == 0
    out = capsys.readouterr().out
    assert "6 tail(s)" in out and "{C2,C3}  k=2" in out


def test_cli_nested_text(capsys):
    assert main(["nested", "G3", "--s", "2", "--anchors", "C2,C3"]) == 0
    out = capsys.readouterr().out
    assert "{C2,C3}" in out
    assert main(["nested", "G3", "--s", "3", "--anchors", "C2"]) == 0
    assert "(empty)" in capsys.readouterr().out


def test_cli_plan_empty(capsys):
    assert main(["plan", "G3", "--empty"]) == 0
    assert json.loads(capsys.readouterr().out) == []


def test_cli_export_dot_modes(capsys):
    assert main(["export-dot", "G2"]) == 0
    assert "doublecircle" in capsys.readouterr().out
    assert main(["export-dot", "G2", "--c2"]) == 0
    assert "shape=square" in capsys.readouterr().out


def test_cli_minimal_text(capsys):
    assert main(["minimal", "G2"]) == 0
    out = capsys.readouterr().out
    assert "pair (a,b): forced" in out
    assert "plan-from-tails minimal: True" in out


def test_cli_sync_text(capsys):
    assert main(["sync", "G2", "--pair", "a,b", "--match", "C2:C2,C1:C1",
                 "--point", "1"]) == 0
    out = capsys.readouterr().out
    assert "synchronized=True" in out and "level 2: ok" in out


def test_cli_distinguished_text(capsys):
    assert main(["distinguished", "G3", "--pair", "e12,e13",
                 "--match", "C2:C1,C1:C3"]) == 0
    out = capsys.readouterr().out
    assert "quasistable=False" in out


def test_cli_verify_dump_and_replay_round_trip(tmp_path, capsys):
    # instance 2 of the default stream fails the resolution suite under the
    # displayed profile; the dump must replay to the same negative verdict
    dump = tmp_path / "counterexample.json"
    rc = main(["verify", "--instances", "3", "--profile", "as-displayed",
               "--suite", "thm-64-resolution", "--dump", str(dump)])
    assert rc == 1
    capsys.readouterr()
    assert dump.exists()
    assert main(["verify", "--replay", str(dump)]) == 1
    rc = main(["verify", "--replay", "/nonexistent.json"])
    assert rc == 2


def test_cli_bad_match_syntax(capsys):
    assert main(["distinguished", "G2", "--pair", "a", "--match", "x"]) == 2
    assert main(["distinguished", "G2", "--pair", "a,b", "--match", "bad"]) == 2
