from __future__ import annotations

import random

import pytest

from conftest import random_formula
from ecumene.cutelim import (CutEliminationError, cut_formula, cut_measure, eliminate_cut_step, eliminate_cuts,
                             expand_inits, reduce_cut, topmost_cut)
from ecumene.formula import Box, DiaC, IntAtom, Neg, ew
from ecumene.labek import EK, LabeledFormula, LabeledSequent, Rel, check_labek_proof, prove_labek
from ecumene.parser import parse_formula, parse_labeled_sequent
from ecumene.proof import ProofTree, SearchBudget

P = parse_labeled_sequent
L = LabeledFormula


def _prove(s: LabeledSequent) -> ProofTree:
    out = prove_labek(s)
    assert out.status == "proved", s.render()
    return out.proof


def _cut(gamma: LabeledSequent, lemma: LabeledFormula) -> ProofTree:
    left = _prove(LabeledSequent(gamma.rels, gamma.formulas, lemma))
    right = _prove(gamma.with_items(formulas=[lemma]))
    return ProofTree("cut", gamma, (left, right))


def classical_diamond_cut(body_text: str = "a_i") -> ProofTree:
    """A cut on x: dia_c A, principal on both sides."""
    body = parse_formula(body_text, modal=True)
    gamma = LabeledSequent((Rel("x", "y"),), (L("y", body), L("x", Box(Neg(body)))), L("x", parse_formula("bot")))
    cf = L("x", DiaC(body))
    lprem = _prove(gamma.with_items(formulas=[L("x", Box(Neg(body)))]))
    left = ProofTree("diaCR", LabeledSequent(gamma.rels, gamma.formulas, cf), (lprem,))
    rgamma = LabeledSequent(gamma.rels + (Rel("x", "z"),), gamma.formulas + (L("z", body),), gamma.succedent)
    right = ProofTree("diaCL", gamma.with_items(formulas=[cf]), (_prove(rgamma),), "z")
    p = ProofTree("cut", gamma, (left, right))
    check_labek_proof(p, EK, allow_cut=True)
    return p


class TestPrincipalCases:
    @pytest.mark.parametrize("body", ["a_i", "a_c", "a_i /\\ b_i", "box a_i"])
    def test_classical_diamond(self, body):
        p = classical_diamond_cut(body)
        a = parse_formula(body, modal=True)
        assert cut_measure(p)[0] == ew(a) + 4
        q = reduce_cut(p)
        check_labek_proof(q, EK, allow_cut=True)
        assert q.rule == "cut"
        assert cut_formula(q) == L("x", Box(Neg(a)))
        assert cut_measure(q)[0] == ew(a) + 2

    def test_init_on_the_left_removes_cut(self):
        gamma = P("x: a_i /\\ b_i, x: a_i |- x: b_i")
        left = ProofTree("init", LabeledSequent(gamma.rels, gamma.formulas, L("x", IntAtom("a"))))
        right = _prove(gamma.with_items(formulas=[L("x", IntAtom("a"))]))
        q = reduce_cut(ProofTree("cut", gamma, (left, right)))
        check_labek_proof(q, EK)
        assert "cut" not in q.rules()

    def test_left_permutation_lowers_height(self):
        gamma = P("x: a_i /\\ b_i |- x: b_i \\/i c_i")
        p = expand_inits(_cut(gamma, L("x", IntAtom("b"))))
        assert p.premises[0].rule == "andL"
        q = reduce_cut(p)
        check_labek_proof(q, EK, allow_cut=True)
        before = cut_measure(p)
        for n in q.nodes():
            if n.rule == "cut":
                assert cut_measure(n) < before

    def test_axiom_leaves_unsupported(self, corpus):
        e = next(e for e in corpus if e.id == "ekt_collapse")
        with pytest.raises(CutEliminationError):
            eliminate_cuts(e.script().proof)

    def test_cut_free_input_rejected(self):
        with pytest.raises(CutEliminationError):
            eliminate_cut_step(_prove(P("|- x: a_i ->i a_i")))


def test_corpus_cut_proofs(corpus):
    scripts = [e for e in corpus if e.id.startswith("cut_")]
    assert len(scripts) >= 3
    for e in scripts:
        p = e.script().proof
        q, steps = eliminate_cuts(p)
        assert steps and all(s.decreasing for s in steps), e.id
        check_labek_proof(q, EK, allow_cut=False)
        assert q.conclusion == p.conclusion


def test_single_steps_stay_valid(corpus):
    e = next(e for e in corpus if e.id == "cut_box_k")
    p = expand_inits(e.script().proof)
    count = 0
    while topmost_cut(p) is not None:
        p = eliminate_cut_step(p)
        check_labek_proof(p, EK, allow_cut=True)
        count += 1
        assert count < 500
    assert count >= 1


def test_random_compositions():
    rng = random.Random(1)
    budget = SearchBudget(max_depth=12, max_nodes=3000)
    done = 0
    while done < 40:
        gamma = tuple(L("x", random_formula(rng, 2)) for _ in range(rng.randint(1, 2)))
        lemma, goal = L("x", random_formula(rng, 2)), L("x", random_formula(rng, 2))
        left = prove_labek(LabeledSequent((), gamma, lemma), EK, budget)
        if left.status != "proved":
            continue
        right = prove_labek(LabeledSequent((), gamma + (lemma,), goal), EK, budget)
        if right.status != "proved":
            continue
        p = ProofTree("cut", LabeledSequent((), gamma, goal), (left.proof, right.proof))
        q, steps = eliminate_cuts(p)
        check_labek_proof(q, EK)
        assert all(s.decreasing for s in steps)
        done += 1
