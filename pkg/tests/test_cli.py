import io
import json

from khdot.cli import (
    RunConfig,
    braid_r1_moves,
    build_parser,
    config_from_args,
    main,
    run,
    verify_moves,
)
from khdot.complex import TheorySpec
from khdot.moves import sample_moves


def records(cfg):
    buf = io.StringIO()
    status, recs = run(cfg, buf)
    lines = [json.loads(x) for x in buf.getvalue().splitlines()]
    assert lines == recs
    return status, recs


def test_bracket_record_for_unknot():
    status, recs = records(RunConfig(["unknot"], commands=("bracket",)))
    assert status == 0
    (r,) = recs
    assert r["schema"] == "khdot.record/1"
    assert r["payload"]["polynomial"] == "1"


def test_normalised_bracket_of_kink():
    _, (r,) = records(RunConfig(["kink-positive"], commands=("bracket",), normalize_bracket=True))
    assert r["payload"]["polynomial"] == "1"
    assert r["payload"]["kauffman"] == "-a^3"


def test_homology_and_report_on_trefoil():
    status, recs = records(RunConfig(["trefoil-right"], ring="Q", commands=("homology", "report")))
    assert status == 0
    hom, rep = recs
    degrees = sorted((g["degree"]["i"], g["degree"]["j"]) for g in hom["payload"]["homology"]["groups"])
    assert degrees == [(0, 1), (0, 3), (2, 5), (3, 9)]
    assert hom["payload"]["euler_matches_state_sum"]
    assert rep["payload"]["bounds"]["thickness"] == 2
    assert rep["payload"]["bounds"]["thickness_ok"]


def test_output_is_deterministic_and_job_independent(tmp_path):
    cfg = dict(inputs=["corpus"], dottings=("bars", "markers"), commands=("homology", "verify-moves"), seed=5)
    _, a = records(RunConfig(**cfg))
    _, b = records(RunConfig(**cfg))
    _, c = records(RunConfig(jobs=3, **cfg))
    assert a == b == c


def test_out_directory(tmp_path):
    status, recs = run(RunConfig(["hopf"], commands=("bracket", "homology"), out=str(tmp_path)))
    assert status == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["hopf.bracket.json", "hopf.homology.json"]
    assert json.loads((tmp_path / "hopf.bracket.json").read_text()) == recs[0]


def test_exit_codes(tmp_path, capsys):
    assert main(["unknot", "--commands", "bracket"]) == 0
    assert main(["nosuch"]) == 2
    assert main(["unknot", "--theory", "lee", "--ring", "Q"]) == 2
    assert main(["unknot", "--commands", "dance"]) == 2
    assert main(["trefoil-right", "--limit", "2"]) == 2
    bad = tmp_path / "bad.kd"
    bad.write_text("X 1 2\n")
    assert main([str(bad)]) == 1
    out = capsys.readouterr().out.splitlines()
    assert json.loads(out[-1])["status"] == "error"


def test_integer_homology_of_virtual_diagram_fails_cleanly(capsys):
    assert main(["virtual-trefoil", "--ring", "Z"]) == 1
    rec = json.loads(capsys.readouterr().out)
    assert rec["status"] == "error"
    assert "1->1" in rec["payload"]["error"]


def test_environment_defaults_and_flag_precedence(monkeypatch):
    monkeypatch.setenv("KHDOT_RING", "Q")
    monkeypatch.setenv("KHDOT_COMMANDS", "bracket,report")
    cfg = config_from_args(build_parser().parse_args(["hopf"]))
    assert cfg.ring == "Q" and cfg.commands == ("bracket", "report")
    cfg = config_from_args(build_parser().parse_args(["hopf", "--ring", "Z"]))
    assert cfg.ring == "Z"


def test_theory_default_ring():
    cfg = config_from_args(build_parser().parse_args(["hopf", "--theory", "lee"]))
    assert cfg.ring == "Q(t=h=1)"


def test_trefoil_r2_gives_equal_tables(corpus):
    import random

    d = corpus["trefoil-right"]
    moves = [m for m in sample_moves(d, random.Random(1), per_kind=3) if m.label.startswith("R2")]
    assert moves
    rep = verify_moves(d, TheorySpec("khovanov", "Z2"), moves)
    assert rep["ok"]
    assert all(r["status"] == "pass" for r in rep["results"])


def test_braid_r1_is_an_expected_exception(corpus):
    d = corpus["braid2-trefoil"]
    moves = braid_r1_moves(d)
    rep = verify_moves(d, TheorySpec("khovanov", "Z2", ("markers",)), moves)
    assert rep["ok"]
    (row,) = rep["results"]
    assert row["status"] == "expected-exception"
    assert row["note"] == "small circle dotted: invariance not expected"


def test_long_knot_moves_away_from_endpoint(corpus):
    import random

    d = corpus["long-trefoil"]
    ends = {e for e, ts in d.tokens if any(t[0] == "E" for t in ts)}
    moves = [
        m
        for m in sample_moves(d, random.Random(4), per_kind=3)
        if m.label[0] == "R" and not (m.kind.startswith("R1") and m.site in ends) and not m.param("loop_tokens")
    ]
    assert moves
    rep = verify_moves(d, TheorySpec("khovanov", "Q", ("endpoint",)), moves)
    assert [r["status"] for r in rep["results"]] == ["pass"] * len(moves), rep
