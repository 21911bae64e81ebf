"""Regenerate the shipped corpus under src/ecumene/corpus.

Theorem and non-theorem entries are written from the tables below.  Proof
scripts are produced once by the provers, checked, and frozen; rerunning
this script overwrites them.
"""
from __future__ import annotations

import json
import shutil
import sys
from pathlib import Path

from ecumene.corpus import CorpusEntry, check_script
from ecumene.labek import EK, INTERDEFINABILITY, LabeledFormula, LabeledSequent, Theory, prove_labek
from ecumene.parser import parse_formula, parse_labeled_sequent
from ecumene.proof import ProofScript, ProofTree

ROOT = Path(__file__).resolve().parents[1] / "src" / "ecumene" / "corpus"
EKT = Theory(frozenset({"T"}))
EKT_INTERDEF = Theory(frozenset({"T"}), (INTERDEFINABILITY,))

LECI_THEOREMS = {
    "item01a": "|- (a_i ->c bot) <->i (a_i ->i bot)",
    "item01b": "|- (a_i ->i bot) <->i ~a_i",
    "item02": "|- (a_i \\/c b_i) <->i ~(~a_i /\\ ~b_i)",
    "item03": "|- (a_i ->c b_i) <->i ~(a_i /\\ ~b_i)",
    "item04": "|- (exists_c x. P_i(x)) <->i ~(forall x. ~P_i(x))",
    "item05": "|- (a_i ->i b_i) ->i (a_i ->c b_i)",
    "item06": "|- a_i \\/c ~a_i",
    "item07": "|- ~~a_i ->c a_i",
    "item08": "|- a_i /\\ (a_i ->i b_i) ->i b_i",
    "item09": "|- (forall x. P_i(x)) ->i ~(exists_c x. ~P_i(x))",
    "item10": "|- (a_i ->c b_c) ->i (a_i ->i b_c)",
    "item11": "|- a_i /\\ (a_i ->c b_c) ->i b_c",
    "item12": "|- ~~b_c ->i b_c",
    "item13": "|- ~(exists_c x. ~P_c(x)) ->i (forall x. P_c(x))",
}

# id -> (payload, formula to refute when the payload is first-order)
LECI_NON_THEOREMS = {
    "item05_converse": ("|- (a_i ->c b_i) ->i (a_i ->i b_i)", None),
    "item06_converse": ("|- a_i \\/i ~a_i", None),
    "item07_converse": ("|- ~~a_i ->i a_i", None),
    "item08_converse": ("|- a_i /\\ (a_i ->c b_i) ->i b_i", None),
    # modal reading of the same schema: the quantifier becomes a box
    "item09_converse": ("|- ~(exists_c x. ~P_i(x)) ->i (forall x. P_i(x))", "~dia_c ~a_i ->i box a_i"),
}

LABEK_THEOREMS = {
    "item14": ("|- x: dia_c a_i <->i ~box ~a_i", EK),
    "item15": ("|- x: box a_c <->i ~dia_c ~a_c", EK),
    "ekt_refl_box": ("x R x |- x: box a_i ->i a_i", EK),
    "ekt_refl_dia": ("x R x |- x: a_i ->i dia_i a_i", EK),
    "ekt_box_a": ("|- x: box a_i ->i a_i", EKT),
    "ekt_interdef_lem": ("|- x: a_i \\/i ~a_i", EKT_INTERDEF),
}

LABEK_NON_THEOREMS = {
    "nonint_dia_box": ("|- x: ~dia_i ~a_i ->i box a_i", EK, ()),
    "ekt_lem": ("|- x: a_i \\/i ~a_i", EKT, ("Reflexive",)),
}

AXIOM_SCRIPTS = {
    "axiom_k": "|- x: box (a_i ->i b_i) ->i box a_i ->i box b_i",
    "axiom_k1": "|- x: box (a_i ->i b_i) ->i dia_i a_i ->i dia_i b_i",
    "axiom_k2": "|- x: dia_i (a_i \\/i b_i) ->i dia_i a_i \\/i dia_i b_i",
    "axiom_k3": "|- x: (dia_i a_i ->i box b_i) ->i box (a_i ->i b_i)",
    "axiom_k4": "|- x: dia_i bot ->i bot",
}

# proofs with a single cut on a lemma: (hypotheses, lemma, goal)
CUT_SCRIPTS = {
    "cut_dia_c": ("x: dia_i a_i, x: ~dia_i a_i", ("x", "dia_c a_i"), "x: bot"),
    "cut_box_k": ("x: box (a_i ->i b_i), x: box a_i", ("x", "box b_i"), "x: box (b_i \\/i c_i)"),
    "cut_rel_box": ("x R y, x: box (a_i /\\ b_i)", ("y", "a_i /\\ b_i"), "y: b_i"),
    "cut_dia_neg": ("x: dia_i a_i", ("x", "dia_c a_i"), "x: ~box ~a_i"),
    "cut_or_c": ("x: a_i \\/c b_i, x: ~a_i", ("x", "~~b_i"), "x: b_c"),
}


def _proof(s: LabeledSequent, theory: Theory = EK) -> ProofTree:
    out = prove_labek(s, theory)
    if out.status != "proved":
        sys.exit(f"could not prove {s.render()}")
    return out.proof


def _cut_proof(hyps: str, lemma: tuple[str, str], goal: str) -> ProofTree:
    g = parse_labeled_sequent(f"{hyps} |- {goal}")
    lf = LabeledFormula(lemma[0], parse_formula(lemma[1], modal=True))
    left = _proof(LabeledSequent(g.rels, g.formulas, lf))
    right = _proof(LabeledSequent(g.rels, g.formulas + (lf,), g.succedent))
    return ProofTree("cut", g, (left, right))


def main() -> None:
    if ROOT.exists():
        shutil.rmtree(ROOT)
    (ROOT / "entries").mkdir(parents=True)
    (ROOT / "scripts").mkdir()
    entries: list[CorpusEntry] = []
    for eid, text in LECI_THEOREMS.items():
        entries.append(CorpusEntry(eid, "theorem", "leci", text, "Proved"))
    for eid, (text, cm) in LECI_NON_THEOREMS.items():
        entries.append(CorpusEntry(eid, "non-theorem", "leci", text, "Unknown+countermodel",
                                   countermodel_formula=cm))
    for eid, (text, th) in LABEK_THEOREMS.items():
        entries.append(CorpusEntry(eid, "theorem", "labek", text, "Proved", th))
    for eid, (text, th, props) in LABEK_NON_THEOREMS.items():
        entries.append(CorpusEntry(eid, "non-theorem", "labek", text, "Unknown+countermodel", th,
                                   props=props))

    scripts = {eid: ProofScript("labek", _proof(parse_labeled_sequent(text)), False, EK)
               for eid, text in AXIOM_SCRIPTS.items()}
    collapse = _proof(parse_labeled_sequent("|- x: a_i \\/i ~a_i"), EKT_INTERDEF)
    scripts["ekt_collapse"] = ProofScript("labek", collapse, True, EKT_INTERDEF)
    for eid, (hyps, lemma, goal) in CUT_SCRIPTS.items():
        scripts[eid] = ProofScript("labek", _cut_proof(hyps, lemma, goal), True, EK)
    for eid, script in scripts.items():
        check_script(script)
        path = f"scripts/{eid}.proof.json"
        (ROOT / path).write_text(script.dump())
        entries.append(CorpusEntry(eid, "proof-script", "labek", path, "check-ok", script.theory))

    for e in entries:
        (ROOT / "entries" / f"{e.id}.json").write_text(json.dumps(e.to_json(), indent=2) + "\n")
    print(f"wrote {len(entries)} entries to {ROOT}")


if __name__ == "__main__":
    main()
