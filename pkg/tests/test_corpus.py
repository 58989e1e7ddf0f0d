import json
import re

import pytest

from pseudocurve.corpus import (ClaimResult, FixtureReport, _judge,
                                list_fixtures, load_fixture, run_fixture)
from pseudocurve.errors import UnknownFixture

ALL_IDS = ("ex_1_1_nonprimitive", "ex_1_2_puiseux", "ex_2_3_pde",
           "ex_8_6_type", "ex_9_1_tangency", "ex_9_2_regularity",
           "intersection_positivity", "perturbed_immersion",
           "smooth_point_bennequin")

PROVENANCE = re.compile(r"^(paper|trivial|derived\([a-z0-9_\- ]+\))$")


def test_listing_is_complete_and_sorted():
    assert list_fixtures() == ALL_IDS


def test_unknown_fixture_rejected():
    with pytest.raises(UnknownFixture):
        load_fixture("no_such_fixture")
    with pytest.raises(UnknownFixture):
        run_fixture("ex_1_2")  # prefix of a real id is not enough


def test_documents_are_wellformed():
    for fid in ALL_IDS:
        doc = load_fixture(fid)
        assert doc["schema"] == 1
        assert doc["id"] == fid
        assert doc["description"]
        assert doc["claims"], fid
        names = [c["claim"] for c in doc["claims"]]
        assert len(names) == len(set(names)), f"duplicate claim in {fid}"
        for c in doc["claims"]:
            assert PROVENANCE.match(c["provenance"]), (fid, c)


def test_every_fixture_quotes_and_derives():
    # each document mixes quoted values with independently frozen ones,
    # so a regression in either pipeline shows up somewhere
    tags = {fid: {c["provenance"].split("(")[0]
                  for c in load_fixture(fid)["claims"]}
            for fid in ALL_IDS}
    assert all("paper" in t or "derived" in t for t in tags.values())
    assert any("paper" in t for t in tags.values())
    assert any("derived" in t for t in tags.values())


# -- comparison policy -------------------------------------------------------

def entry(expected, compare="eq", tolerance=0.0):
    return {"claim": "c", "expected": expected, "provenance": "trivial",
            "compare": compare, "tolerance": tolerance}


def test_judge_exact_and_banded():
    assert _judge(entry([1, 2]), [1, 2]).passed
    assert not _judge(entry([1, 2]), [1, 3]).passed
    assert _judge(entry(1.0, tolerance=0.1), 1.05).passed
    assert not _judge(entry(1.0, tolerance=0.01), 1.05).passed
    assert _judge(entry(True), True).passed
    assert not _judge(entry(True), 1.0).passed  # no bool/number punning


def test_judge_bounds_and_diffs():
    r = _judge(entry(2.0, compare="le"), 1.5)
    assert r.passed and r.diff == pytest.approx(-0.5)
    assert not _judge(entry(2.0, compare="le"), 2.5).passed
    r = _judge(entry(2.0, compare="ge"), 2.5)
    assert r.passed and r.diff == pytest.approx(-0.5)
    assert not _judge(entry(2.0, compare="ge"), 1.5).passed


def test_bad_documents_rejected(tmp_path, monkeypatch):
    import pseudocurve.corpus as corpus
    bad = tmp_path / "bad_tag.json"
    bad.write_text(json.dumps({
        "schema": 1, "id": "bad_tag", "description": "x", "inputs": {},
        "claims": [{"claim": "c", "expected": 1,
                    "provenance": "guessed"}]}))
    monkeypatch.setattr(corpus, "_FIXTURE_DIR", tmp_path)
    with pytest.raises(ValueError, match="provenance"):
        corpus.load_fixture("bad_tag")
    bad2 = tmp_path / "bad_schema.json"
    bad2.write_text(json.dumps({"schema": 9, "id": "bad_schema",
                                "claims": []}))
    with pytest.raises(ValueError, match="schema"):
        corpus.load_fixture("bad_schema")


# -- full corpus runs --------------------------------------------------------

def test_fast_fixtures_pass():
    for fid in ["ex_1_1_nonprimitive", "ex_1_2_puiseux", "ex_8_6_type",
                "ex_9_1_tangency", "ex_9_2_regularity"]:
        rep = run_fixture(fid)
        assert rep.passed, str(rep)
        assert all(isinstance(c, ClaimResult) for c in rep.claims)


def test_smooth_bennequin_fixture_passes():
    rep = run_fixture("smooth_point_bennequin")
    assert rep.passed, str(rep)
    by_name = {c.claim: c for c in rep.claims}
    assert by_name["bennequin_slice"].measured == -1
    assert by_name["bennequin_explicit_circle"].measured == -1


def test_pde_fixture_passes():
    rep = run_fixture("ex_2_3_pde")
    assert rep.passed, str(rep)


def test_perturbation_fixture_passes():
    rep = run_fixture("perturbed_immersion")
    assert rep.passed, str(rep)


def test_intersection_fixture_passes():
    rep = run_fixture("intersection_positivity")
    assert rep.passed, str(rep)
    by_name = {c.claim: c for c in rep.claims}
    assert by_name["intersection_indices"].measured == [1, 2, 3, 2, 3, 8]


def test_report_round_trip():
    rep = run_fixture("ex_1_2_puiseux")
    doc = rep.to_dict()
    assert doc["schema"] == 1
    assert doc["passed"] is True
    text = json.dumps(doc)
    back = json.loads(text)
    assert back["fixture"] == "ex_1_2_puiseux"
    assert len(back["claims"]) == len(rep.claims)
    shown = str(rep)
    assert "[PASS]" in shown and "multiplicity" in shown


def test_reports_name_every_claim():
    rep = run_fixture("ex_8_6_type")
    claimed = {c["claim"] for c in load_fixture("ex_8_6_type")["claims"]}
    assert {c.claim for c in rep.claims} == claimed
