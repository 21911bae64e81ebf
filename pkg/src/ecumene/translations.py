"""Translations out of the modal language.

* ``std_translate``: the ecumenical standard translation into first-order
  formulas over the accessibility predicate ``R``.
* ``seq_translate`` / ``proof_translate``: labeled sequents and labEK proofs
  into LEci sequents and proofs.
* ``ik_translate``: the double-negation style translation into the
  intuitionistic modal fragment.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .formula import (
    BOT, And, Bottom, Box, ClAtom, DiaC, DiaI, ExistsC, ExistsI, ForAll,
    Formula, ImpC, ImpI, IntAtom, Neg, OrC, OrI, RelAtom, fresh_name,
    is_modal_fragment,
)
from .labek import LabeledFormula, LabeledSequent
from .leci import Sequent
from .parser import render
from .proof import FragmentError, ProofTree

_BASE_NAMES = ("y", "z", "w", "v", "u")


def bound_names(avoid) -> "list[str]":
    """Infinite-enough supply of world-variable names, skipping ``avoid``."""
    out, k = [], 0
    while len(out) < 64:
        for base in _BASE_NAMES:
            name = base if k == 0 else f"{base}{k}"
            if name not in avoid:
                out.append(name)
        k += 1
    return out


def std_translate(f: Formula, x: str, avoid=()) -> Formula:
    """``[[f]]x``.  The world variable bound at modal depth d is the d-th
    name of ``bound_names(avoid | {x})``, so the result never captures
    ``x`` or anything in ``avoid``."""
    if not is_modal_fragment(f):
        raise FragmentError(f"standard translation needs a modal formula: {render(f)}")
    names = bound_names(set(avoid) | {x})
    return _std(f, x, names, 0)


def _std(f: Formula, x: str, names, depth: int) -> Formula:
    if isinstance(f, IntAtom):
        return IntAtom(f.name, (x,))
    if isinstance(f, ClAtom):
        return ClAtom(f.name, (x,))
    if isinstance(f, Bottom):
        return f
    if isinstance(f, Neg):
        return Neg(_std(f.body, x, names, depth))
    if isinstance(f, (And, OrI, OrC, ImpI, ImpC)):
        return type(f)(_std(f.left, x, names, depth), _std(f.right, x, names, depth))
    y = names[depth]
    body = _std(f.body, y, names, depth + 1)
    if isinstance(f, Box):
        return ForAll(y, ImpI(RelAtom(x, y), body))
    if isinstance(f, DiaI):
        return ExistsI(y, And(RelAtom(x, y), body))
    if isinstance(f, DiaC):
        return ExistsC(y, And(RelAtom(x, y), body))
    raise FragmentError(f"cannot translate {type(f).__name__}")


def seq_translate(s: LabeledSequent, avoid=()) -> Sequent:
    """``[Γ] |- [[A]]x``; relational atoms first, then labeled formulas."""
    avoid = set(avoid) | s.labels()
    ante = tuple(RelAtom(r.src, r.dst) for r in s.rels)
    ante += tuple(std_translate(f.formula, f.label, avoid) for f in s.formulas)
    return Sequent(ante, std_translate(s.succedent.formula, s.succedent.label, avoid))


# -- proof translation -------------------------------------------------------

class TranslationError(ValueError):
    """The proof uses a rule with no LEci counterpart (extensions, cut, axioms)."""


@dataclass(frozen=True)
class TraceRecord:
    path: tuple[int, ...]
    rule: str
    fragment: tuple[str, ...]


_SAME = {"init", "botL", "andL", "andR", "orIL", "orIR1", "orIR2", "orCL", "orCR",
         "impIL", "impIR", "impCL", "impCR", "negL", "negR", "Lc", "Rc"}


class _Translator:
    """Marks record formulas living under a classical diamond: the copy of
    ``x:box ~A`` created by diaCR is rendered as ``forall v. ~(R(x,v) /\\ A_v)``
    (the premise shape of the first-order exists_c rule), and each ``y:~A``
    obtained from it by boxL as ``~(R(x,y) /\\ A_y)``."""

    def __init__(self, avoid):
        self.avoid = set(avoid)
        self.trace: list[TraceRecord] = []

    def std(self, lf: LabeledFormula) -> Formula:
        return std_translate(lf.formula, lf.label, self.avoid)

    def marked(self, lf: LabeledFormula, origin: str | None) -> Formula:
        x, f = lf
        if origin is None:  # x: box ~A
            v = bound_names(self.avoid | {x})[0]
            return ForAll(v, Neg(And(RelAtom(x, v), self.std(LabeledFormula(v, f.body.body)))))
        return Neg(And(RelAtom(origin, x), self.std(LabeledFormula(x, f.body))))

    def sequent(self, s: LabeledSequent, marks: Counter, succ: Formula | None = None) -> Sequent:
        left = Counter(marks)
        ante = [RelAtom(r.src, r.dst) for r in s.rels]
        for f in s.formulas:
            key = next((k for k in left if k[0] == f and left[k] > 0), None)
            if key is None:
                ante.append(self.std(f))
            else:
                left[key] -= 1
                ante.append(self.marked(*key))
        return Sequent(tuple(ante), self.std(s.succedent) if succ is None else succ)

    def unmarked(self, s: LabeledSequent, marks: Counter, f: LabeledFormula) -> int:
        marked = sum(n for (g, _), n in marks.items() if g == f)
        return s.formulas.count(f) - marked

    def origin(self, marks: Counter, f: LabeledFormula):
        return min((o for (g, o), n in marks.items() if g == f and n > 0), key=lambda o: (o is not None, o or ""))

    def go(self, node: ProofTree, marks: Counter, path=()) -> ProofTree:
        concl = node.conclusion
        seq = self.sequent(concl, marks)
        r = node.rule
        if r == "init":
            x = concl.succedent
            if self.unmarked(concl, marks, x) > 0:
                return self._rec(path, r, ("init",), ProofTree("init", seq))
            return self._rec(path, r, ("bridge",), self.bridge(seq, x, self.origin(marks, x)))
        if r == "negL":
            principal = LabeledFormula(concl.succedent.label, Neg(node.premises[0].conclusion.succedent.formula))
            if self.unmarked(concl, marks, principal) <= 0:
                origin = self.origin(marks, principal)
                y = principal.label
                inner = self.go(node.premises[0], marks, path + (0,))
                target = And(RelAtom(origin, y), inner.conclusion.succedent)
                rel = ProofTree("init", Sequent(seq.antecedent, RelAtom(origin, y)))
                both = ProofTree("andR", Sequent(seq.antecedent, target), (rel, inner))
                return self._rec(path, r, ("negL", "andR", "init"), ProofTree("negL", seq, (both,)))
        if r in _SAME:
            prem = tuple(self.go(q, marks, path + (i,)) for i, q in enumerate(node.premises))
            return self._rec(path, r, (r,), ProofTree(r, seq, prem))
        if r == "W":
            inner = self.go(node.premises[0], marks, path + (0,))
            if isinstance(seq.succedent, Bottom):
                return self._rec(path, r, (), inner)
            return self._rec(path, r, ("W",), ProofTree("W", seq, (inner,)))
        if r == "boxL":
            return self.box_left(node, seq, marks, path)
        if r == "boxR":
            y = node.instantiation or (node.premises[0].conclusion.labels() - concl.labels()).pop()
            inner = self.go(node.premises[0], marks, path + (0,))
            x = concl.succedent.label
            mid = Sequent(seq.antecedent, ImpI(RelAtom(x, y), inner.conclusion.succedent))
            return self._rec(path, r, ("forallR", "impIR"),
                             ProofTree("forallR", seq, (ProofTree("impIR", mid, (inner,)),), y))
        if r in ("diaIL", "diaCL"):
            q = node.premises[0]
            y = node.instantiation or (q.conclusion.labels() - concl.labels()).pop()
            inner = self.go(q, marks, path + (0,))
            principal = next(iter(Counter(concl.formulas) - Counter(q.conclusion.formulas)))
            x = principal.label
            rest = list(seq.antecedent)
            rest.remove(self.std(principal))
            pair = And(RelAtom(x, y), self.std(LabeledFormula(y, principal.formula.body)))
            mid = Sequent(tuple(rest) + (pair,), seq.succedent)
            rule = "existsIL" if r == "diaIL" else "existsCL"
            return self._rec(path, r, (rule, "andL"),
                             ProofTree(rule, seq, (ProofTree("andL", mid, (inner,)),), y))
        if r == "diaIR":
            q = node.premises[0]
            y = node.instantiation or q.conclusion.succedent.label
            x = concl.succedent.label
            inner = self.go(q, marks, path + (0,))
            rel = ProofTree("init", Sequent(seq.antecedent, RelAtom(x, y)))
            pair = ProofTree("andR", Sequent(seq.antecedent, And(RelAtom(x, y), inner.conclusion.succedent)), (rel, inner))
            return self._rec(path, r, ("existsIR", "andR", "init"), ProofTree("existsIR", seq, (pair,), y))
        if r == "diaCR":
            x, f = concl.succedent
            boxed = LabeledFormula(x, Box(Neg(f.body)))
            inner = self.go(node.premises[0], marks + Counter({(boxed, None): 1}), path + (0,))
            return self._rec(path, r, ("existsCR",), ProofTree("existsCR", seq, (inner,)))
        raise TranslationError(f"node {'.'.join(['root', *map(str, path)])}: rule {r} has no LEci translation")

    def box_left(self, node, seq, marks, path):
        concl, q = node.conclusion, node.premises[0]
        added = next(iter(Counter(q.conclusion.formulas) - Counter(concl.formulas)))
        y = added.label
        candidates = [f for f in concl.formulas if f.formula == Box(added.formula) and (f.label, y) in concl.rels]
        plain = [f for f in candidates if self.unmarked(concl, marks, f) > 0]
        if plain:
            f = plain[0]
            inner = self.go(q, marks, path + (0,))
            x = f.label
            inst = ImpI(RelAtom(x, y), self.std(added))
            mid = Sequent(seq.antecedent + (inst,), seq.succedent)
            rel = ProofTree("init", Sequent(mid.antecedent, RelAtom(x, y)))
            imp = ProofTree("impIL", mid, (rel, inner))
            return self._rec(path, "boxL", ("forallL", "impIL", "init"), ProofTree("forallL", seq, (imp,), y))
        f = candidates[0]
        inner = self.go(q, marks + Counter({(added, f.label): 1}), path + (0,))
        return self._rec(path, "boxL", ("forallL",), ProofTree("forallL", seq, (inner,), y))

    def bridge(self, seq: Sequent, lf: LabeledFormula, origin: str | None) -> ProofTree:
        """``marked(lf) |- std(lf)`` inside context ``seq``."""
        ante = seq.antecedent
        if origin is not None:  # ~(R(o,y) /\ A_y) |- ~A_y
            y, body = lf.label, lf.formula.body
            a = self.std(LabeledFormula(y, body))
            ctx = ante + (a,)
            pair = And(RelAtom(origin, y), a)
            both = ProofTree("andR", Sequent(ctx, pair),
                             (ProofTree("init", Sequent(ctx, RelAtom(origin, y))), ProofTree("init", Sequent(ctx, a))))
            neg = ProofTree("negL", Sequent(ctx, BOT), (both,))
            return ProofTree("negR", seq, (neg,))
        x, f = lf  # forall v. ~(R(x,v) /\ A_v) |- forall v. (R(x,v) ->i ~A_v)
        used = set(self.avoid) | set(seq.free_vars())
        w = fresh_name("w", used | set(bound_names(self.avoid)[:8]))
        a = std_translate(f.body.body, w, self.avoid)
        inst = Neg(And(RelAtom(x, w), a))
        c1 = ante + (RelAtom(x, w),)
        c2 = c1 + (a,)
        c3 = c2 + (inst,)
        both = ProofTree("andR", Sequent(c3, And(RelAtom(x, w), a)),
                         (ProofTree("init", Sequent(c3, RelAtom(x, w))), ProofTree("init", Sequent(c3, a))))
        neg = ProofTree("negL", Sequent(c3, BOT), (both,))
        inst_node = ProofTree("forallL", Sequent(c2, BOT), (neg,), w)
        negr = ProofTree("negR", Sequent(c1, Neg(a)), (inst_node,))
        impr = ProofTree("impIR", Sequent(ante, ImpI(RelAtom(x, w), Neg(a))), (negr,))
        return ProofTree("forallR", seq, (impr,), w)

    def _rec(self, path, rule, fragment, tree):
        self.trace.append(TraceRecord(path, rule, fragment))
        return tree


def _proof_labels(p: ProofTree) -> set[str]:
    out: set[str] = set()
    for n in p.nodes():
        out |= n.conclusion.labels()
    return out


def proof_translate_traced(p: ProofTree) -> tuple[ProofTree, list[TraceRecord]]:
    """LEci proof of ``seq_translate`` of the root, and the per-node record
    of which LEci rules each labEK step became."""
    labels = _proof_labels(p)
    t = _Translator(labels)
    tree = t.go(p, Counter())
    t.trace.sort(key=lambda rec: rec.path)
    return tree, t.trace


def proof_translate(p: ProofTree) -> ProofTree:
    return proof_translate_traced(p)[0]


# -- the IK translation ------------------------------------------------------

def ik_translate(f: Formula) -> Formula:
    if not is_modal_fragment(f):
        raise FragmentError(f"IK translation needs a modal formula: {render(f)}")
    return _ik(f)


def _ik(f: Formula) -> Formula:
    if isinstance(f, (IntAtom, Bottom)):
        return f
    if isinstance(f, ClAtom):
        return Neg(Neg(IntAtom(f.name)))
    if isinstance(f, OrC):
        return Neg(And(Neg(_ik(f.left)), Neg(_ik(f.right))))
    if isinstance(f, ImpC):
        return Neg(And(_ik(f.left), Neg(_ik(f.right))))
    if isinstance(f, DiaC):
        return Neg(Box(Neg(_ik(f.body))))
    if isinstance(f, (Neg, Box, DiaI)):
        return type(f)(_ik(f.body))
    return type(f)(_ik(f.left), _ik(f.right))


def ik_translate_sequent(s: LabeledSequent) -> LabeledSequent:
    return LabeledSequent(s.rels, tuple(LabeledFormula(f.label, ik_translate(f.formula)) for f in s.formulas),
                          LabeledFormula(s.succedent.label, ik_translate(s.succedent.formula)))
