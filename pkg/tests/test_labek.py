from __future__ import annotations

import random
import re

import pytest

from conftest import random_formula
from ecumene.formula import BOT, And, Bottom, Box, DiaI, ImpI, IntAtom, Neg, OrI
from ecumene.labek import (EK, INTERDEFINABILITY, AxiomScheme, LabeledFormula, LabeledSequent, Rel, Theory,
                           applicable_rules, check_labek_proof, prove_labek)
from ecumene.parser import parse_formula, parse_labeled_sequent
from ecumene.proof import FragmentError, ProofCheckError, ProofTree, SearchBudget

P = parse_labeled_sequent
EKT = Theory(frozenset({"T"}))


def labek_theorems(corpus):
    return [e for e in corpus if e.system == "labek" and e.kind == "theorem"]


class TestTheory:
    def test_unknown_extension(self):
        with pytest.raises(ValueError):
            Theory(frozenset({"D"}))

    def test_duplicate_axiom_names(self):
        ax = AxiomScheme("k", "box A ->i A")
        with pytest.raises(ValueError):
            Theory(axioms=(ax, ax))

    def test_json_round_trip(self):
        th = Theory(frozenset({"B", "T"}), (INTERDEFINABILITY,))
        doc = th.to_json()
        assert doc["extensions"] == ["T", "B"]
        assert Theory.from_json(doc) == th

    def test_includes(self):
        assert EKT.includes(EK) and not EK.includes(EKT)

    def test_scheme_matching(self):
        assert INTERDEFINABILITY.matches(parse_formula("~dia_i ~(a_i /\\ b_c) ->i box (a_i /\\ b_c)", modal=True))
        assert not INTERDEFINABILITY.matches(parse_formula("~dia_i ~a_i ->i box b_i", modal=True))


class TestChecker:
    def test_axiom_k_script(self, corpus):
        e = next(e for e in corpus if e.id == "axiom_k")
        check_labek_proof(e.script().proof, EK)

    def test_reflexivity_derivation_needs_t(self):
        s = P("|- x: (box a_i ->i a_i) /\\ (a_i ->i dia_i a_i)")
        out = prove_labek(s, EKT)
        assert out.status == "proved" and "T" in out.proof.rules()
        check_labek_proof(out.proof, EKT)
        with pytest.raises(ProofCheckError) as info:
            check_labek_proof(out.proof, EK)
        assert info.value.rule == "T"

    def test_reflexive_hypothesis_suffices(self):
        out = prove_labek(P("x R x |- x: (box a_i ->i a_i) /\\ (a_i ->i dia_i a_i)"), EK)
        assert out.status == "proved"
        check_labek_proof(out.proof, EK)

    def test_eigenlabel_must_be_fresh(self):
        # boxR reusing a label of the conclusion
        bad = ProofTree("boxR", P("x R y, y: a_i |- x: box a_i"),
                        (ProofTree("init", P("x R y, y: a_i |- y: a_i")),), "y")
        with pytest.raises(ProofCheckError):
            check_labek_proof(bad)

    def test_box_left_needs_relation(self):
        bad = ProofTree("boxL", P("x: box a_i |- y: a_i"),
                        (ProofTree("init", P("x: box a_i, y: a_i |- y: a_i")),), "y")
        with pytest.raises(ProofCheckError):
            check_labek_proof(bad)

    def test_cut_needs_permission(self, corpus):
        e = next(e for e in corpus if e.id == "cut_dia_c")
        check_labek_proof(e.script().proof, EK, allow_cut=True)
        with pytest.raises(ProofCheckError):
            check_labek_proof(e.script().proof, EK)

    def test_axiom_leaf_needs_theory(self, corpus):
        e = next(e for e in corpus if e.id == "ekt_collapse")
        with pytest.raises(ProofCheckError):
            check_labek_proof(e.script().proof, EKT, allow_cut=True)

    def test_relational_rule_adds_one_atom(self):
        bad = ProofTree("T", P("|- x: a_i"), (ProofTree("init", P("x R x, y R y |- x: a_i")),))
        with pytest.raises(ProofCheckError):
            check_labek_proof(bad, EKT)


class TestProver:
    def test_item14(self):
        out = prove_labek(P("|- x: dia_c a_i <->i ~box ~a_i"))
        assert out.status == "proved"
        check_labek_proof(out.proof)

    def test_item15(self):
        out = prove_labek(P("|- x: box a_c <->i ~dia_c ~a_c"))
        assert out.status == "proved"
        check_labek_proof(out.proof)

    @pytest.mark.parametrize("depth", [6, 12, 20])
    def test_box_not_definable_from_diamond(self, depth):
        out = prove_labek(P("|- x: ~dia_i ~a_i ->i box a_i"), EK, SearchBudget(max_depth=depth))
        assert out.status == "unknown"

    def test_collapse(self):
        th = Theory(frozenset({"T"}), (INTERDEFINABILITY,))
        out = prove_labek(P("|- x: a_i \\/i ~a_i"), th)
        assert out.status == "proved"
        check_labek_proof(out.proof, th, allow_cut=True)
        assert prove_labek(P("|- x: a_i \\/i ~a_i"), EKT).status == "unknown"

    def test_fresh_labels_are_deterministic(self):
        out = prove_labek(P("|- x: box (a_i ->i b_i) ->i box a_i ->i box b_i"))
        eigen = [n.instantiation for n in out.proof.nodes() if n.rule == "boxR"]
        assert len(eigen) == 1 and re.fullmatch(r"y\d+", eigen[0])
        again = prove_labek(P("|- x: box (a_i ->i b_i) ->i box a_i ->i box b_i"))
        assert again.proof == out.proof

    def test_non_modal_rejected(self):
        s = LabeledSequent((), (), LabeledFormula("x", IntAtom("P", ("x",))))
        with pytest.raises(FragmentError):
            prove_labek(s)

    def test_proofs_are_cut_free(self, corpus):
        for e in labek_theorems(corpus):
            out = prove_labek(e.sequent(), e.theory)
            assert out.status == "proved"
            if not e.theory.axioms:
                check_labek_proof(out.proof, e.theory, allow_cut=False)
                assert "cut" not in out.proof.rules()

    def test_eager_and_lazy_agree(self, corpus):
        for e in corpus:
            if e.system != "labek" or e.kind == "proof-script" or e.theory.axioms:
                continue
            b = SearchBudget(max_depth=16, max_nodes=20_000)
            eager = prove_labek(e.sequent(), e.theory, b)
            lazy = prove_labek(e.sequent(), e.theory, b, eager=False)
            assert eager.status == lazy.status, e.id


EXTRA = [
    ("|- x: box a_i ->i box box a_i", "4"),
    ("|- x: a_i ->i box dia_i a_i", "B"),
    ("|- x: dia_i a_i ->i box dia_i a_i", "5"),
    ("|- x: box a_i ->i dia_i a_i", "T"),
]
CHAIN = [frozenset(), frozenset("T"), frozenset("T4"), frozenset("T45"), frozenset("T45B")]


def test_theory_extension_is_monotone(corpus):
    sequents = [e.sequent() for e in labek_theorems(corpus) if not e.theory.axioms]
    sequents += [P(s) for s, _ in EXTRA]
    for s in sequents:
        proved = False
        for ext in CHAIN:
            status = prove_labek(s, Theory(ext), SearchBudget(max_depth=16)).status
            if proved:
                assert status == "proved", (s.render(), sorted(ext))
            proved = status == "proved"


@pytest.mark.parametrize("text,ext", EXTRA)
def test_extension_rules(text, ext):
    out = prove_labek(P(text), Theory(frozenset(ext)))
    assert out.status == "proved" and ext in out.proof.rules()
    check_labek_proof(out.proof, Theory(frozenset(ext)))
    assert prove_labek(P(text), EK, SearchBudget(max_depth=12)).status == "unknown"


# -- rule table of the intuitionistic labeled calculus --------------------------

def ik_calculus_rules(s: LabeledSequent) -> set[str]:
    """Applicable rules of the intuitionistic labeled system, read off its
    rule table (negation written as implication into bottom)."""
    x, c = s.succedent
    out = set()
    match c:
        case And():
            out.add("andR")
        case OrI():
            out |= {"orIR1", "orIR2"}
        case ImpI():
            out.add("impIR")
        case Box():
            out.add("boxR")
        case DiaI():
            if any(r.src == x for r in s.rels):
                out.add("diaIR")
    if s.succedent in s.formulas:
        out.add("init")
    for lab, f in s.formulas:
        match f:
            case Bottom():
                out.add("botL")
            case And():
                out.add("andL")
            case OrI():
                out.add("orIL")
            case ImpI():
                out.add("impIL")
            case DiaI():
                out.add("diaIL")
            case Box():
                if any(r.src == lab for r in s.rels):
                    out.add("boxL")
    return out


def _no_neg(f):
    if isinstance(f, Neg):
        return ImpI(_no_neg(f.body), BOT)
    if isinstance(f, (Box, DiaI)):
        return type(f)(_no_neg(f.body))
    if isinstance(f, (And, OrI, ImpI)):
        return type(f)(_no_neg(f.left), _no_neg(f.right))
    return f


def test_ik_fragment_rule_table():
    rng = random.Random(2)
    labels = ["x", "y", "z"]
    for _ in range(3000):
        rels = tuple(Rel(rng.choice(labels), rng.choice(labels)) for _ in range(rng.randint(0, 2)))
        fmls = tuple(LabeledFormula(rng.choice(labels), _no_neg(random_formula(rng, 2, ik_only=True)))
                     for _ in range(rng.randint(0, 3)))
        if fmls and rng.random() < 0.2:
            succ = rng.choice(fmls)
        else:
            succ = LabeledFormula(rng.choice(labels), _no_neg(random_formula(rng, 2, ik_only=True)))
        s = LabeledSequent(rels, fmls, succ)
        assert applicable_rules(s) == ik_calculus_rules(s), s.render()
