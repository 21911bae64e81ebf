from __future__ import annotations

import json
import shutil

import pytest

from conftest import CORPUS_DIR
from ecumene.corpus import KINDS, CorpusEntry, default_corpus_dir, load_corpus, run_corpus, run_entry


def test_corpus_loads_sorted_and_unique(corpus):
    ids = [e.id for e in corpus]
    assert ids == sorted(ids) and len(set(ids)) == len(ids)
    assert {e.kind for e in corpus} == set(KINDS)


def test_every_entry_passes(corpus):
    failed = [(r.id, r.outcome, r.detail) for r in run_corpus(corpus) if not r.passed]
    assert failed == []


def test_entries_round_trip(corpus):
    for e in corpus:
        again = CorpusEntry.from_json(json.loads(json.dumps(e.to_json())), e.root)
        assert again == e


def test_filter():
    ids = [e.id for e in load_corpus(CORPUS_DIR, "axiom_k*")]
    assert ids == ["axiom_k", "axiom_k1", "axiom_k2", "axiom_k3", "axiom_k4"]


def test_environment_override(tmp_path, monkeypatch):
    shutil.copytree(CORPUS_DIR, tmp_path / "c")
    for p in (tmp_path / "c" / "entries").glob("*.json"):
        if p.stem != "item06":
            p.unlink()
    monkeypatch.setenv("ECUMENE_CORPUS", str(tmp_path / "c"))
    assert default_corpus_dir() == tmp_path / "c"
    assert [e.id for e in load_corpus()] == ["item06"]


def test_flipped_expectation_fails():
    # a non-theorem filed as a theorem must fail the run
    e = CorpusEntry("flip", "theorem", "leci", "|- a_i \\/i ~a_i", "Proved")
    r = run_entry(e)
    assert not r.passed and r.outcome == "unknown"
    e = CorpusEntry("flip2", "non-theorem", "leci", "|- a_i \\/c ~a_i", "Unknown+countermodel")
    assert not run_entry(e).passed


def test_missing_countermodel_fails():
    # excluded middle has no one-world countermodel
    e = CorpusEntry("small", "non-theorem", "leci", "|- a_i \\/i ~a_i", "Unknown+countermodel", max_worlds=1)
    r = run_entry(e)
    assert not r.passed and "no countermodel" in r.detail


def test_broken_script_fails(tmp_path):
    shutil.copytree(CORPUS_DIR, tmp_path / "c")
    path = tmp_path / "c" / "scripts" / "axiom_k4.proof.json"
    doc = json.loads(path.read_text())
    doc["proof"]["rule"] = "init"
    path.write_text(json.dumps(doc))
    (entry,) = load_corpus(tmp_path / "c", "axiom_k4")
    r = run_entry(entry)
    assert not r.passed and r.outcome == "check-failed"


@pytest.mark.parametrize("doc, msg", [
    ({"kind": "lemma"}, "unknown kind"),
    ({"expectation": "check-ok"}, "does not fit"),
    ({"system": "nk"}, "unknown system"),
])
def test_validation(doc, msg):
    base = {"id": "x", "kind": "theorem", "system": "leci", "payload": "|- bot ->i bot", "expectation": "Proved"}
    with pytest.raises(ValueError, match=msg):
        CorpusEntry.from_json({**base, **doc})


def test_missing_directory(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_corpus(tmp_path)
