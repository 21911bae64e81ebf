from __future__ import annotations

import itertools
import json
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import modal_formulas, random_formula
from ecumene.formula import BOT, And, Box, ClAtom, DiaC, ImpC, IntAtom, Neg, OrC, depth
from ecumene.parser import parse_formula, parse_labeled_sequent
from ecumene.proof import FragmentError
from ecumene.semantics import (FrameProperty, KripkeModel, ModelError, _strata, agreement_violations,
                               check_frame_property, check_model, count_frames, enumerate_models,
                               find_countermodel, find_sequent_countermodel, forces, forcing_agreement, frames,
                               is_valid, sequent_valid)

F = lambda t: parse_formula(t, modal=True)
a = IntAtom("a")


def model(worlds, leq=(), R=(), val=None):
    """Model with ``leq`` closed reflexively (and given transitively)."""
    leq = set(leq) | {(w, w) for w in worlds}
    return KripkeModel(tuple(worlds), frozenset(leq), frozenset(R), val or {})


def brute_force_frame_count(n: int) -> int:
    """Frames (partial order + accessibility satisfying F1/F2) on n worlds
    up to isomorphism, by plain enumeration over labeled frames."""
    W = range(n)
    pairs = [(i, j) for i in W for j in W]
    classes = set()
    perms = list(itertools.permutations(W))
    for lbits in range(1 << len(pairs)):
        leq = {p for k, p in enumerate(pairs) if lbits >> k & 1}
        if any((i, i) not in leq for i in W):
            continue
        if any((i, j) in leq and (j, k) in leq and (i, k) not in leq for i in W for j in W for k in W):
            continue
        if any(i != j and (i, j) in leq and (j, i) in leq for i in W for j in W):
            continue
        for rbits in range(1 << len(pairs)):
            R = {p for k, p in enumerate(pairs) if rbits >> k & 1}
            f1 = all(any((w, w2) in leq and (w2, v2) in R for w2 in W)
                     for (w, v) in R for v2 in W if (v, v2) in leq)
            f2 = all(any((w2, v2) in R and (v, v2) in leq for v2 in W)
                     for (w, w2) in leq for v in W if (w, v) in R)
            if f1 and f2:
                classes.add(min((tuple(sorted((p[i], p[j]) for i, j in leq)),
                                 tuple(sorted((p[i], p[j]) for i, j in R))) for p in perms))
    return len(classes)


class TestModelChecks:
    def test_single_world_ok(self):
        assert check_model(model(["w"])) == []

    def test_monotonicity_violation(self):
        m = model(["w", "v"], [("w", "v")], val={"w": {"p"}})
        out = check_model(m)
        assert [(v.kind, v.worlds) for v in out] == [("valuation not monotone", ("w", "v"))]

    def test_f1_violation(self):
        m = model(["w", "v", "v2"], [("v", "v2")], R=[("w", "v")])
        kinds = {(v.kind, v.worlds) for v in check_model(m)}
        assert ("F1", ("w", "v", "v2")) in kinds

    def test_f2_violation(self):
        m = model(["w", "w2", "v"], [("w", "w2")], R=[("w", "v")])
        assert ("F2", ("w", "w2", "v")) in {(v.kind, v.worlds) for v in check_model(m)}

    def test_order_violations(self):
        m = KripkeModel(("w", "v"), frozenset({("w", "v"), ("v", "w"), ("w", "w")}), frozenset(), {})
        kinds = {v.kind for v in check_model(m)}
        assert {"leq not reflexive", "leq not antisymmetric"} <= kinds
        assert "leq not antisymmetric" not in {v.kind for v in check_model(m, preorder=True)}

    def test_forcing_refuses_bad_models(self):
        m = model(["w", "v"], [("w", "v")], val={"w": {"a"}})
        with pytest.raises(ModelError):
            forces(m, "w", a)

    def test_forcing_refuses_first_order(self):
        with pytest.raises(FragmentError):
            forces(model(["w"]), "w", parse_formula("forall x. P_i(x)"))


class TestFrameProperties:
    def test_identity(self):
        m = model(["a", "b"], R=[("a", "a"), ("b", "b")])
        assert check_frame_property(m, FrameProperty.REFLEXIVE)
        assert check_frame_property(m, "Symmetric")

    def test_not_transitive(self):
        m = model(["a", "b", "c"], R=[("a", "b"), ("b", "c")])
        assert not check_frame_property(m, FrameProperty.TRANSITIVE)

    def test_not_euclidean(self):
        m = model(["a", "b", "c"], R=[("a", "b"), ("a", "c")])
        assert not check_frame_property(m, FrameProperty.EUCLIDEAN)

    @pytest.mark.parametrize("prop", list(FrameProperty))
    def test_enumeration_respects_properties(self, prop):
        for m in enumerate_models(3, [], [prop]):
            assert check_frame_property(m, prop)
        assert count_frames(3, [prop]) < count_frames(3)


class TestForcing:
    def test_bottom(self):
        for m in enumerate_models(2, ["a"]):
            assert not any(forces(m, w, BOT) for w in m.worlds)

    def test_reflexive_single_world(self):
        m = model(["w"], R=[("w", "w")], val={"w": {"a"}})
        assert forces(m, "w", Box(a))
        assert forces(m, "w", ClAtom("a"))

    def test_box_uses_two_steps(self):
        # w <= w2, w2 R v; a fails at v: box a fails at w although w has no successor
        m = model(["w", "w2", "v"], [("w", "w2")], R=[("w2", "v")], val={"w2": set()})
        assert check_model(m) == []
        assert not forces(m, "w", Box(a))

    def test_agreement_on_classical_atom(self):
        for m in enumerate_models(3, ["a"]):
            for w in m.worlds:
                assert forcing_agreement(m, w, ClAtom("a"))

    def test_classical_diamond_agreement_exhaustive(self):
        f = DiaC(a)
        g = Neg(Box(Neg(a)))
        seen = 0
        for m in enumerate_models(3, ["a"]):
            for w in m.worlds:
                assert forces(m, w, f) == forces(m, w, g)
                seen += 1
        assert seen > 1000
        assert agreement_violations([f], 3) == []

    @given(modal_formulas(max_leaves=8), st.integers(0, 10_000))
    def test_classical_clauses_are_unfoldings(self, f, seed):
        rng = random.Random(seed)
        ms = list(enumerate_models(2, ["a", "b"]))
        m = rng.choice(ms)
        g = random_formula(rng, 2)
        for w in m.worlds:
            assert forces(m, w, OrC(f, g)) == forces(m, w, Neg(And(Neg(f), Neg(g))))
            assert forces(m, w, ImpC(f, g)) == forces(m, w, Neg(And(f, Neg(g))))
            assert forces(m, w, DiaC(f)) == forces(m, w, Neg(Box(Neg(f))))
            assert forcing_agreement(m, w, f)

    def test_heredity(self):
        rng = random.Random(4)
        formulas = [random_formula(rng, 4) for _ in range(60)]
        for L, Rs, vals, batch in _strata(("a", "b"), 3, (), False):
            for f in formulas:
                t = batch.truth(f)
                for w, v in zip(*np.nonzero(L)):
                    assert not (t[:, :, w] & ~t[:, :, v]).any()

    def test_batch_matches_scalar(self):
        rng = random.Random(9)
        formulas = [random_formula(rng, 4) for _ in range(25)]
        from ecumene.semantics import _model
        checked = 0
        for L, Rs, vals, batch in _strata(("a", "b"), 3, (), False):
            for f in formulas:
                t = batch.truth(f)
                for i in range(0, len(Rs), 11):
                    for k in range(0, len(vals), 7):
                        m = _model(L, Rs[i], ("a", "b"), vals[k])
                        for w, name in enumerate(m.worlds):
                            assert forces(m, name, f) == bool(t[i, k, w])
                            checked += 1
        assert checked > 5000


class TestEnumeration:
    def test_order_counts(self):
        # unlabeled posets on 1..4 points
        from ecumene.semantics import _orders
        assert [len(_orders(n, False)) for n in range(1, 5)] == [1, 2, 5, 16]
        assert len(_orders(2, True)) == 3

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_frame_counts_match_brute_force(self, n):
        assert count_frames(n) == brute_force_frame_count(n)

    def test_frame_counts_frozen(self):
        assert [count_frames(n) for n in range(1, 5)] == [2, 19, 568, 67739]

    def test_models_are_well_formed(self):
        for m in enumerate_models(3, ["a"]):
            assert check_model(m) == []

    def test_frames_iterator(self):
        assert sum(1 for _ in frames(3)) == count_frames(3)


class TestCountermodels:
    def test_excluded_middle(self):
        m, w = find_countermodel(F("a_i \\/i ~a_i"), 2)
        assert len(m.worlds) == 2 and check_model(m) == []
        v = next(u for u in m.worlds if u != w)
        assert (w, v) in m.leq and m.V(w) == frozenset() and m.V(v) == {"a"}
        assert not forces(m, w, F("a_i \\/i ~a_i"))

    def test_classical_excluded_middle_valid(self):
        assert find_countermodel(F("a_i \\/c ~a_i"), 4) is None

    def test_box_not_definable(self):
        m, w = find_countermodel(F("~dia_i ~a_i ->i box a_i"), 4)
        assert len(m.worlds) <= 4 and check_model(m) == []
        assert not forces(m, w, F("~dia_i ~a_i ->i box a_i"))

    def test_properties(self):
        f = F("box a_i ->i a_i")
        assert find_countermodel(f, 3) is not None
        assert find_countermodel(f, 3, [FrameProperty.REFLEXIVE]) is None
        m, w = find_countermodel(F("a_i \\/i ~a_i"), 3, [FrameProperty.REFLEXIVE])
        assert check_frame_property(m, FrameProperty.REFLEXIVE)

    def test_is_valid(self):
        assert is_valid(F("box (a_i ->i b_i) ->i box a_i ->i box b_i"), 3)
        assert not is_valid(F("~~a_i ->i a_i"), 2)

    def test_sequents(self):
        assert sequent_valid(parse_labeled_sequent("x R y, x: box a_i |- y: a_i"), 3)
        found = find_sequent_countermodel(parse_labeled_sequent("x R y, x: box a_i |- y: b_i"), 3)
        assert found is not None
        m, assign = found
        assert (assign["x"], assign["y"]) in m.R
        assert forces(m, assign["x"], Box(a)) and not forces(m, assign["y"], IntAtom("b"))


class TestJson:
    def test_round_trip(self):
        m, _ = find_countermodel(F("~dia_i ~a_i ->i box a_i"), 4)
        doc = json.loads(m.dumps())
        assert set(doc) == {"worlds", "leq", "R", "val"}
        assert KripkeModel.from_json(doc) == m

    def test_accepts_subscripted_atoms(self):
        m = KripkeModel.from_json({"worlds": ["w"], "leq": [["w", "w"]], "R": [], "val": {"w": ["a_i"]}})
        assert forces(m, "w", a)

    def test_unknown_world(self):
        with pytest.raises(ValueError):
            KripkeModel.from_json({"worlds": ["w"], "leq": [["w", "v"]], "R": [], "val": {}})

    def test_missing_key(self):
        with pytest.raises(ValueError):
            KripkeModel.from_json({"worlds": ["w"]})


def test_cyclic_relational_hypothesis_needs_frame_condition():
    s = parse_labeled_sequent("x R x |- x: box a_i ->i a_i")
    assert sequent_valid(s, 2)
    assert not sequent_valid(s, 3)
    assert sequent_valid(s, 3, [FrameProperty.REFLEXIVE])
