"""The regression corpus: data files describing theorems, non-theorems and
proof scripts, and a runner that checks each against its expectation.

Layout of a corpus directory::

    entries/<id>.json        one CorpusEntry per file
    scripts/<name>.proof.json  proof scripts referenced by entries

The directory defaults to the copy shipped with the package and can be
overridden with the ``ECUMENE_CORPUS`` environment variable.
"""
from __future__ import annotations

import fnmatch
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from .formula import Formula, is_propositional
from .labek import EK, LabeledSequent, Theory, check_labek_proof, prove_labek
from .leci import Sequent, check_leci_proof, prove_fo, prove_prop
from .parser import parse_formula, parse_labeled_sequent, parse_sequent
from .proof import ProofCheckError, ProofScript, SearchBudget, SearchOutcome, load_script
from .semantics import FrameProperty, KripkeModel, find_countermodel, find_sequent_countermodel

KINDS = {"theorem": "Proved", "non-theorem": "Unknown+countermodel", "proof-script": "check-ok"}
NON_THEOREM_DEPTH = 20


def default_corpus_dir() -> Path:
    env = os.environ.get("ECUMENE_CORPUS")
    return Path(env) if env else Path(__file__).with_name("corpus")


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    kind: str
    system: str
    payload: str
    expectation: str
    theory: Theory = EK
    countermodel_formula: str | None = None
    max_worlds: int = 4
    props: tuple[FrameProperty, ...] = ()
    root: Path = field(default=Path("."), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "props", tuple(FrameProperty(p) for p in self.props))
        if self.kind not in KINDS:
            raise ValueError(f"{self.id}: unknown kind {self.kind!r}")
        if KINDS[self.kind] != self.expectation:
            raise ValueError(f"{self.id}: expectation {self.expectation!r} does not fit kind {self.kind!r}")
        if self.system not in ("leci", "labek"):
            raise ValueError(f"{self.id}: unknown system {self.system!r}")

    @classmethod
    def from_json(cls, doc: dict, root: Path = Path(".")) -> "CorpusEntry":
        return cls(
            id=doc["id"], kind=doc["kind"], system=doc["system"], payload=doc["payload"],
            expectation=doc["expectation"], theory=Theory.from_json(doc.get("theory", {})),
            countermodel_formula=doc.get("countermodel_formula"),
            max_worlds=int(doc.get("max_worlds", 4)),
            props=tuple(FrameProperty(p) for p in doc.get("props", [])), root=root,
        )

    def to_json(self) -> dict:
        doc = {"id": self.id, "kind": self.kind, "system": self.system}
        if self.system == "labek":
            doc["theory"] = self.theory.to_json()
        doc["payload"] = self.payload
        doc["expectation"] = self.expectation
        if self.countermodel_formula is not None:
            doc["countermodel_formula"] = self.countermodel_formula
        if self.kind == "non-theorem":
            doc["max_worlds"] = self.max_worlds
        if self.props:
            doc["props"] = [p.value for p in self.props]
        return doc

    # -- payload access --------------------------------------------------------

    def sequent(self) -> Sequent | LabeledSequent:
        """The sequent the entry is about (the root of a script)."""
        if self.kind == "proof-script":
            return self.script().proof.conclusion
        return parse_sequent(self.payload) if self.system == "leci" else parse_labeled_sequent(self.payload)

    def script(self) -> ProofScript:
        return load_script((self.root / self.payload).read_text())

    def refutation_target(self) -> Formula | LabeledSequent:
        if self.countermodel_formula is not None:
            return parse_formula(self.countermodel_formula, modal=True)
        s = self.sequent()
        if isinstance(s, Sequent):
            if s.antecedent:
                raise ValueError(f"{self.id}: give a countermodel_formula for sequents with hypotheses")
            return s.succedent
        return s


def load_corpus(root: Path | str | None = None, pattern: str | None = None) -> list[CorpusEntry]:
    root = Path(root) if root is not None else default_corpus_dir()
    folder = root / "entries"
    if not folder.is_dir():
        raise FileNotFoundError(f"no corpus entries under {folder}")
    entries = [CorpusEntry.from_json(json.loads(p.read_text()), root) for p in sorted(folder.glob("*.json"))]
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise ValueError("corpus entry ids must be unique")
    if pattern:
        entries = [e for e in entries if fnmatch.fnmatchcase(e.id, pattern)]
    return sorted(entries, key=lambda e: e.id)


# -- running -----------------------------------------------------------------

def prove(system: str, s, theory: Theory = EK, budget: SearchBudget | None = None,
          allow_cut: bool = False) -> SearchOutcome:
    if system == "leci":
        # propositional sequents get the decision procedure, which saturates
        decide = all(map(is_propositional, (*s.antecedent, s.succedent)))
        return (prove_prop if decide else prove_fo)(s, budget, allow_cut=allow_cut)
    return prove_labek(s, theory, budget, allow_cut=allow_cut)


def check_script(script: ProofScript) -> None:
    if script.system == "leci":
        check_leci_proof(script.proof, allow_cut=script.allow_cut)
    else:
        check_labek_proof(script.proof, script.theory, allow_cut=script.allow_cut)


def refute(entry: CorpusEntry) -> tuple[KripkeModel, object] | None:
    target = entry.refutation_target()
    if isinstance(target, LabeledSequent):
        return find_sequent_countermodel(target, entry.max_worlds, entry.props)
    return find_countermodel(target, entry.max_worlds, entry.props)


@dataclass
class EntryResult:
    id: str
    kind: str
    passed: bool
    outcome: str
    detail: str = ""
    seconds: float = 0.0
    countermodel: dict | None = None

    def to_json(self) -> dict:
        doc = {"id": self.id, "kind": self.kind, "passed": self.passed, "outcome": self.outcome,
               "detail": self.detail}
        if self.countermodel is not None:
            doc["countermodel"] = self.countermodel
        return doc


def run_entry(entry: CorpusEntry, budget: SearchBudget | None = None) -> EntryResult:
    budget = budget or SearchBudget()
    start = time.perf_counter()
    res = _run(entry, budget)
    res.seconds = time.perf_counter() - start
    return res


def _run(entry: CorpusEntry, budget: SearchBudget) -> EntryResult:
    if entry.kind == "proof-script":
        try:
            script = entry.script()
            check_script(script)
        except (ProofCheckError, ValueError, OSError) as exc:
            return EntryResult(entry.id, entry.kind, False, "check-failed", str(exc))
        return EntryResult(entry.id, entry.kind, True, "check-ok")
    s = entry.sequent()
    if entry.kind == "theorem":
        out = prove(entry.system, s, entry.theory, budget)
        return EntryResult(entry.id, entry.kind, out.status == "proved", out.status, f"{out.nodes} nodes")
    shallow = SearchBudget(min(budget.max_depth, NON_THEOREM_DEPTH), budget.max_instantiations_per_universal,
                           budget.max_nodes)
    out = prove(entry.system, s, entry.theory, shallow)
    if out.status == "proved":
        return EntryResult(entry.id, entry.kind, False, "proved", "expected no proof")
    found = refute(entry)
    if found is None:
        return EntryResult(entry.id, entry.kind, False, "unknown",
                           f"no countermodel within {entry.max_worlds} worlds")
    model, where = found
    where = where if isinstance(where, str) else ", ".join(f"{k}={v}" for k, v in where.items())
    return EntryResult(entry.id, entry.kind, True, "unknown+countermodel",
                       f"{len(model.worlds)} worlds, refuted at {where}", countermodel=model.to_json())


def run_corpus(entries: list[CorpusEntry], budget: SearchBudget | None = None) -> list[EntryResult]:
    return [run_entry(e, budget) for e in entries]
