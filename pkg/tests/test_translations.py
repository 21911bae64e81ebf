from __future__ import annotations

import pytest
from hypothesis import given

from conftest import modal_formulas
from ecumene.formula import (BOT, And, Bottom, Box, ClAtom, DiaC, DiaI, ExistsC, ForAll, ImpI, IntAtom, Neg,
                             OrC, RelAtom, free_vars, is_fo_fragment, subformulas)
from ecumene.cutelim import eliminate_cuts
from ecumene.labek import EK, LabeledFormula, LabeledSequent, Rel, Theory, prove_labek
from ecumene.leci import Sequent, check_leci_proof, prove_fo
from ecumene.parser import parse_formula, parse_labeled_sequent, parse_sequent, render
from ecumene.proof import FragmentError, ProofTree, SearchBudget
from ecumene.translations import (TranslationError, ik_translate, ik_translate_sequent, proof_translate,
                                  proof_translate_traced, seq_translate, std_translate)

F = lambda t: parse_formula(t, modal=True)
P = parse_labeled_sequent
a = IntAtom("a")


def plain_labek_proofs(corpus):
    """Plain-labEK proofs from the corpus: frozen scripts (proofs with cut
    after cut elimination) and fresh search results for theorem entries."""
    out = []
    for e in corpus:
        if e.system != "labek" or e.theory != EK:
            continue
        if e.kind == "proof-script":
            p = e.script().proof
            out.append((e.id, eliminate_cuts(p)[0] if "cut" in p.rules() else p))
        elif e.kind == "theorem":
            out.append((e.id, prove_labek(e.sequent()).proof))
    return out


class TestStandard:
    def test_box(self):
        assert render(std_translate(F("box a_i"), "x")) == "forall y. (R(x,y) ->i a_i(y))"

    def test_bottom(self):
        assert std_translate(BOT, "x") == BOT

    def test_classical_diamond(self):
        assert std_translate(DiaC(a), "x") == ExistsC("y", And(RelAtom("x", "y"), IntAtom("a", ("y",))))

    def test_rejects_first_order(self):
        with pytest.raises(FragmentError):
            std_translate(parse_formula("forall x. P_i(x)"), "x")

    @given(modal_formulas(max_leaves=16))
    def test_closed_except_world_variable(self, f):
        g = std_translate(f, "x")
        assert is_fo_fragment(g)
        assert free_vars(g) <= {"x"}

    def test_nested_modalities_do_not_capture(self):
        g = std_translate(F("box dia_i box a_i"), "x")
        names = [h.var for h in subformulas(g) if hasattr(h, "var")]
        assert len(set(names)) == 3 and "x" not in names


class TestSequents:
    def test_box_hypothesis(self):
        out = seq_translate(P("x R y, x: box a_i |- y: a_i"))
        assert out == parse_sequent("R(x,y), forall z. (R(x,z) ->i a_i(z)) |- a_i(y)")

    def test_bottom(self):
        assert seq_translate(P("|- x: bot")) == Sequent((), BOT)

    def test_identity_shape(self):
        out = seq_translate(P("x: dia_i a_i |- x: dia_i a_i"))
        assert out.antecedent == (out.succedent,)
        assert out == parse_sequent("exists_i y. R(x,y) /\\ a_i(y) |- exists_i y. R(x,y) /\\ a_i(y)")


class TestProofs:
    def test_corpus_proofs_translate(self, corpus):
        proofs = plain_labek_proofs(corpus)
        assert len(proofs) >= 14
        for eid, p in proofs:
            q = proof_translate(p)
            assert q.conclusion == seq_translate(p.conclusion), eid
            check_leci_proof(q)

    def test_init(self):
        p = ProofTree("init", P("x: box a_i |- x: box a_i"))
        q = proof_translate(p)
        assert q.rule == "init" and q.conclusion == seq_translate(p.conclusion)

    def test_box_left_fragment(self):
        p = prove_labek(P("x R y, x: box a_i |- y: a_i")).proof
        q, trace = proof_translate_traced(p)
        check_leci_proof(q)
        rec = next(r for r in trace if r.rule == "boxL")
        assert rec.fragment[:2] == ("forallL", "impIL")

    def test_classical_diamond_right_fragment(self):
        p = prove_labek(P("x R y, y: a_i |- x: dia_c a_i")).proof
        q, trace = proof_translate_traced(p)
        check_leci_proof(q)
        assert q.rule == "existsCR"
        premise = q.premises[0].conclusion
        assert premise == parse_sequent("R(x,y), a_i(y), forall z. ~(R(x,z) /\\ a_i(z)) |- bot")
        assert any(r.rule == "diaCR" for r in trace)

    def test_extension_rules_unsupported(self):
        p = prove_labek(P("|- x: box a_i ->i a_i"), Theory(frozenset({"T"}))).proof
        with pytest.raises(TranslationError):
            proof_translate(p)

    def test_cut_unsupported(self, corpus):
        e = next(e for e in corpus if e.id == "cut_dia_c")
        with pytest.raises(TranslationError):
            proof_translate(e.script().proof)

    @pytest.mark.parametrize("eid", ["axiom_k1", "axiom_k2", "axiom_k3", "axiom_k4", "item14", "item15",
                                     "ekt_refl_box", "ekt_refl_dia", "cut_dia_c", "cut_rel_box"])
    def test_first_order_search_agrees(self, corpus, eid):
        e = next(e for e in corpus if e.id == eid)
        out = prove_fo(seq_translate(e.sequent()), SearchBudget(max_depth=40, max_nodes=100_000))
        assert out.status == "proved"


class TestIK:
    def test_classical_atom(self):
        assert ik_translate(ClAtom("a")) == Neg(Neg(a))

    def test_classical_disjunction(self):
        b = IntAtom("b")
        assert ik_translate(OrC(ClAtom("a"), b)) == Neg(And(Neg(Neg(Neg(a))), Neg(b)))

    def test_box(self):
        assert ik_translate(Box(ClAtom("a"))) == Box(Neg(Neg(a)))

    def test_classical_diamond(self):
        assert ik_translate(DiaC(a)) == Neg(Box(Neg(a)))

    @given(modal_formulas())
    def test_image_is_intuitionistic(self, f):
        g = ik_translate(f)
        allowed = (IntAtom, Bottom, Neg, And, Box, DiaI) + (type(F("a_i \\/i a_i")), ImpI)
        assert all(isinstance(h, allowed) for h in subformulas(g))

    @given(modal_formulas())
    def test_idempotent(self, f):
        g = ik_translate(f)
        assert ik_translate(g) == g

    @given(modal_formulas(ik_only=True))
    def test_fixes_ik_fragment(self, f):
        assert ik_translate(f) == f

    def test_sequent(self):
        assert ik_translate_sequent(P("x R y |- x: a_c")) == P("x R y |- x: ~~a_i")
        assert ik_translate_sequent(P("x: dia_c a_i |- x: bot")) == P("x: ~box ~a_i |- x: bot")
        s = P("x R y, x: box a_i |- y: dia_i a_i \\/i b_i")
        assert ik_translate_sequent(s) == s

    def test_provability_preserved_on_corpus(self, corpus):
        b = SearchBudget(max_depth=20)
        checked = 0
        for e in corpus:
            if e.system != "labek" or e.theory.axioms:
                continue
            s = e.sequent()
            before = prove_labek(s, e.theory, b).status
            after = prove_labek(ik_translate_sequent(s), e.theory, b).status
            assert before == after, e.id
            checked += 1
        assert checked >= 15
