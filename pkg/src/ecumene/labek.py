"""The labeled calculus labEK, its T/4/5/B extensions, checking and search.

Rule names used in proof trees::

    init W botL andL andR orIL orIR1 orIR2 orCL orCR impIL impIR impCL impCR
    negL negR Lc Rc boxL boxR diaIL diaIR diaCL diaCR T 4 5 B cut axiom

``boxL`` and the relational rules keep their principal items; ``diaIL``,
``diaCL`` and the propositional left rules other than ``impIL``/``negL``
consume them.  ``boxR``, ``diaIL`` and ``diaCL`` introduce an eigenlabel,
recorded in the node's ``instantiation``.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, NamedTuple

from .formula import (
    BOT, And, Bottom, Box, ClAtom, DiaC, DiaI, Formula, ImpC, ImpI, IntAtom,
    Neg, OrC, OrI, instantiate, is_modal_fragment, match_scheme, metavars,
    subformulas,
)
from .parser import parse_scheme, render
from .proof import (
    FragmentError, ProofCheckError, ProofTree, Proved, SearchBudget,
    SearchOutcome, Unknown,
)

EXTENSIONS = ("T", "4", "5", "B")


class Rel(NamedTuple):
    src: str
    dst: str

    def render(self) -> str:
        return f"{self.src} R {self.dst}"


class LabeledFormula(NamedTuple):
    label: str
    formula: Formula

    def render(self) -> str:
        return f"{self.label}: {render(self.formula)}"


@dataclass(frozen=True)
class LabeledSequent:
    rels: tuple[Rel, ...]
    formulas: tuple[LabeledFormula, ...]
    succedent: LabeledFormula

    def render(self) -> str:
        items = [r.render() for r in self.rels] + [f.render() for f in self.formulas]
        right = self.succedent.render()
        return f"{', '.join(items)} |- {right}" if items else f"|- {right}"

    __str__ = render

    def labels(self) -> set[str]:
        names = {self.succedent.label}
        names.update(f.label for f in self.formulas)
        for r in self.rels:
            names.update(r)
        return names

    def with_items(self, rels=(), formulas=(), succedent=None) -> "LabeledSequent":
        return LabeledSequent(self.rels + tuple(rels), self.formulas + tuple(formulas),
                              succedent or self.succedent)


def same_items(a: Iterable, b: Iterable) -> bool:
    return Counter(a) == Counter(b)


def drop(items: tuple, item) -> tuple:
    i = items.index(item)
    return items[:i] + items[i + 1:]


# -- theories ----------------------------------------------------------------

@dataclass(frozen=True)
class AxiomScheme:
    name: str
    text: str
    scheme: Formula = field(compare=False, default=None)

    def __post_init__(self):
        if self.scheme is None:
            object.__setattr__(self, "scheme", parse_scheme(self.text))

    def matches(self, f: Formula) -> bool:
        return match_scheme(self.scheme, f) is not None


INTERDEFINABILITY = AxiomScheme("interdef", "~dia_i ~A ->i box A")


@dataclass(frozen=True)
class Theory:
    extensions: frozenset[str] = frozenset()
    axioms: tuple[AxiomScheme, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "extensions", frozenset(self.extensions))
        unknown = self.extensions - set(EXTENSIONS)
        if unknown:
            raise ValueError(f"unknown extension(s): {sorted(unknown)}")
        names = [a.name for a in self.axioms]
        if len(set(names)) != len(names):
            raise ValueError("axiom names must be unique")

    def axiom(self, name: str) -> AxiomScheme | None:
        return next((a for a in self.axioms if a.name == name), None)

    def includes(self, other: "Theory") -> bool:
        return self.extensions >= other.extensions and {a.name for a in self.axioms} >= {a.name for a in other.axioms}

    def to_json(self) -> dict:
        return {"extensions": [e for e in EXTENSIONS if e in self.extensions],
                "axioms": [{"name": a.name, "scheme": a.text} for a in self.axioms]}

    @classmethod
    def from_json(cls, doc: dict) -> "Theory":
        axioms = tuple(AxiomScheme(a["name"], a["scheme"]) for a in doc.get("axioms", []))
        return cls(frozenset(doc.get("extensions", [])), axioms)


EK = Theory()


# ============================================================================
# Checker
# ============================================================================

class _Violation(Exception):
    pass


def _expect(cond: bool, message: str):
    if not cond:
        raise _Violation(message)


def _count(node: ProofTree, n: int):
    _expect(len(node.premises) == n, f"expected {n} premise(s), found {len(node.premises)}")


def _is(seq: LabeledSequent, rels, formulas, succedent) -> bool:
    return (seq.succedent == succedent and same_items(seq.rels, rels)
            and same_items(seq.formulas, formulas))


def _left(node: ProofTree, shape: type, build, *, needs_bot: bool = False):
    """Accept if some principal ``x:A`` of type ``shape`` produces the premises
    ``build(principal, rest_formulas, conclusion)`` as (rels, formulas, succ)."""
    concl = node.conclusion
    candidates = [f for f in concl.formulas if isinstance(f.formula, shape)]
    _expect(bool(candidates), f"no {shape.__name__} formula in the antecedent")
    if needs_bot:
        _expect(isinstance(concl.succedent.formula, Bottom), "conclusion succedent must be bot")
        candidates = [f for f in candidates if f.label == concl.succedent.label]
        _expect(bool(candidates), "principal formula must carry the label of the succedent bot")
    for f in dict.fromkeys(candidates):
        rest = drop(concl.formulas, f)
        for expected in build(f, rest, concl):
            if len(expected) == len(node.premises) and all(
                _is(p.conclusion, *e) for p, e in zip(node.premises, expected)
            ):
                return
    raise _Violation("premises do not match the schema for any principal formula")


def _right(node: ProofTree, shape: type, expected: list):
    concl = node.conclusion
    _expect(isinstance(concl.succedent.formula, shape), f"succedent must be a {shape.__name__} formula")
    _count(node, len(expected))
    for i, (p, e) in enumerate(zip(node.premises, expected)):
        _expect(_is(p.conclusion, *e), f"premise {i} does not match the schema")


def _fresh_label(node: ProofTree, premise_label: str | None) -> str:
    y = node.instantiation or premise_label
    _expect(y is not None, "missing eigenlabel")
    _expect(y not in node.conclusion.labels(), f"eigenlabel {y} is not fresh: it occurs in the conclusion")
    return y


def _relational(node: ProofTree, theory: Theory, name: str):
    _expect(name in theory.extensions, f"rule {name} is not enabled in this theory")
    _count(node, 1)
    concl, prem = node.conclusion, node.premises[0].conclusion
    _expect(prem.succedent == concl.succedent and same_items(prem.formulas, concl.formulas),
            "premise must keep the conclusion's labeled formulas and succedent")
    added = Counter(prem.rels) - Counter(concl.rels)
    _expect(Counter(concl.rels) - Counter(prem.rels) == Counter() and sum(added.values()) == 1,
            "premise must add exactly one relational atom")
    (new,) = added
    rels = set(concl.rels)
    if name == "T":
        ok = new.src == new.dst
    elif name == "4":
        ok = any(Rel(new.src, y) in rels and Rel(y, new.dst) in rels for y in {r.dst for r in rels})
    elif name == "5":
        ok = any(Rel(x, new.src) in rels and Rel(x, new.dst) in rels for x in {r.src for r in rels})
    else:
        ok = Rel(new.dst, new.src) in rels
    _expect(ok, f"added atom {new.render()} is not licensed by rule {name}")


def _check_node(node: ProofTree, theory: Theory, allow_cut: bool):
    concl = node.conclusion
    rels, fmls, succ = concl.rels, concl.formulas, concl.succedent
    x, c = succ.label, succ.formula
    prem_succ = node.premises[0].conclusion.succedent if node.premises else None
    r = node.rule
    L = LabeledFormula
    if r == "init":
        _count(node, 0)
        _expect(succ in fmls, "succedent does not occur in the antecedent")
    elif r == "botL":
        _count(node, 0)
        _expect(any(isinstance(f.formula, Bottom) for f in fmls), "no bot in the antecedent")
    elif r == "W":
        _count(node, 1)
        p = node.premises[0].conclusion
        _expect(isinstance(p.succedent.formula, Bottom), "premise succedent must be bot")
        _expect(same_items(p.rels, rels) and same_items(p.formulas, fmls), "premise must keep the antecedent")
    elif r == "andR":
        _right(node, And, [(rels, fmls, L(x, getattr(c, "left", None))), (rels, fmls, L(x, getattr(c, "right", None)))])
    elif r == "andL":
        _left(node, And, lambda f, rest, s: [[(rels, rest + (L(f.label, f.formula.left), L(f.label, f.formula.right)), s.succedent)]])
    elif r == "orIL":
        _left(node, OrI, lambda f, rest, s: [[(rels, rest + (L(f.label, f.formula.left),), s.succedent),
                                               (rels, rest + (L(f.label, f.formula.right),), s.succedent)]])
    elif r in ("orIR1", "orIR2"):
        _right(node, OrI, [(rels, fmls, L(x, getattr(c, "left" if r == "orIR1" else "right", None)))])
    elif r == "orCL":
        _left(node, OrC, lambda f, rest, s: [[(rels, rest + (L(x, f.formula.left),), L(x, BOT)),
                                               (rels, rest + (L(x, f.formula.right),), L(x, BOT))]], needs_bot=True)
    elif r == "orCR":
        _expect(isinstance(c, OrC), "succedent must be a OrC formula")
        _right(node, OrC, [(rels, fmls + (L(x, Neg(c.left)), L(x, Neg(c.right))), L(x, BOT))])
    elif r == "impIL":
        _left(node, ImpI, lambda f, rest, s: [[(rels, fmls, L(f.label, f.formula.left)),
                                                (rels, rest + (L(f.label, f.formula.right),), s.succedent)]])
    elif r == "impIR":
        _expect(isinstance(c, ImpI), "succedent must be a ImpI formula")
        _right(node, ImpI, [(rels, fmls + (L(x, c.left),), L(x, c.right))])
    elif r == "impCL":
        # the right premise may end in bot at any label
        def build(f, rest, s):
            labels = {p.conclusion.succedent.label for p in node.premises[1:2]}
            for y in labels:
                yield [(rels, fmls, L(x, f.formula.left)), (rels, rest + (L(x, f.formula.right),), L(y, BOT))]
        _left(node, ImpC, build, needs_bot=True)
    elif r == "impCR":
        _expect(isinstance(c, ImpC), "succedent must be a ImpC formula")
        _right(node, ImpC, [(rels, fmls + (L(x, c.left), L(x, Neg(c.right))), L(x, BOT))])
    elif r == "negL":
        _left(node, Neg, lambda f, rest, s: [[(rels, fmls, L(x, f.formula.body))]], needs_bot=True)
    elif r == "negR":
        _expect(isinstance(c, Neg), "succedent must be a Neg formula")
        _right(node, Neg, [(rels, fmls + (L(x, c.body),), L(x, BOT))])
    elif r == "Lc":
        _left(node, ClAtom, lambda f, rest, s: [[(rels, rest + (L(x, IntAtom(f.formula.name)),), L(x, BOT))]],
              needs_bot=True)
    elif r == "Rc":
        _expect(isinstance(c, ClAtom), "succedent must be a classical atom")
        _right(node, ClAtom, [(rels, fmls + (L(x, Neg(IntAtom(c.name))),), L(x, BOT))])
    elif r == "boxL":
        def build(f, rest, s):
            for rel in rels:
                if rel.src == f.label:
                    yield [(rels, fmls + (L(rel.dst, f.formula.body),), s.succedent)]
        _left(node, Box, build)
    elif r == "boxR":
        _count(node, 1)
        _expect(isinstance(c, Box), "succedent must be a Box formula")
        y = _fresh_label(node, prem_succ.label)
        _right(node, Box, [(rels + (Rel(x, y),), fmls, L(y, c.body))])
    elif r == "diaIL":
        _count(node, 1)
        y = _fresh_label(node, None if node.instantiation else _new_label(node))
        _left(node, DiaI, lambda f, rest, s: [[(rels + (Rel(f.label, y),), rest + (L(y, f.formula.body),), s.succedent)]])
    elif r == "diaIR":
        _count(node, 1)
        _expect(isinstance(c, DiaI), "succedent must be a DiaI formula")
        y = node.instantiation or prem_succ.label
        _expect(Rel(x, y) in rels, f"relational atom {x} R {y} missing from the conclusion")
        _right(node, DiaI, [(rels, fmls, L(y, c.body))])
    elif r == "diaCL":
        _count(node, 1)
        y = _fresh_label(node, None if node.instantiation else _new_label(node))
        _left(node, DiaC, lambda f, rest, s: [[(rels + (Rel(x, y),), rest + (L(y, f.formula.body),), L(x, BOT))]],
              needs_bot=True)
    elif r == "diaCR":
        _expect(isinstance(c, DiaC), "succedent must be a DiaC formula")
        _right(node, DiaC, [(rels, fmls + (L(x, Box(Neg(c.body))),), L(x, BOT))])
    elif r in EXTENSIONS:
        _relational(node, theory, r)
    elif r == "cut":
        _expect(allow_cut, "cut is not allowed")
        _count(node, 2)
        left, right = node.premises[0].conclusion, node.premises[1].conclusion
        _expect(_is(left, rels, fmls, left.succedent), "left premise must share the conclusion's antecedent")
        _expect(_is(right, rels, fmls + (left.succedent,), succ),
                "right premise must add the cut formula to the conclusion's antecedent")
    elif r == "axiom":
        _count(node, 0)
        ax = theory.axiom(node.instantiation or "")
        _expect(ax is not None, f"axiom {node.instantiation!r} is not part of the theory")
        _expect(ax.matches(c), f"succedent is not an instance of axiom {ax.name}")
    else:
        raise _Violation(f"unknown rule {r!r}")


def _new_label(node: ProofTree) -> str | None:
    """Label present in the premise but not in the conclusion."""
    new = node.premises[0].conclusion.labels() - node.conclusion.labels()
    return min(new) if len(new) == 1 else None


def check_labek_proof(p: ProofTree, th: Theory = EK, allow_cut: bool = False) -> None:
    """Raise ``ProofCheckError`` at the first offending node."""
    stack = [((), p)]
    while stack:
        path, node = stack.pop()
        if not isinstance(node.conclusion, LabeledSequent):
            raise ProofCheckError(path, node.rule, "conclusion is not a labeled sequent")
        try:
            _check_node(node, th, allow_cut)
        except _Violation as exc:
            raise ProofCheckError(path, node.rule, str(exc)) from None
        for i in reversed(range(len(node.premises))):
            stack.append((path + (i,), node.premises[i]))


# ============================================================================
# Search
# ============================================================================

_NEEDS_BOT = (Neg, ImpC, OrC, ClAtom, DiaC)


@lru_cache(maxsize=None)
def _text(f: Formula) -> str:
    return render(f)


def loop_key(rels, fmls, succ):
    """The sequent as sets, with labels renamed in a deterministic order
    (succedent label first, then breadth-first along relational atoms).
    Equal keys imply the sequents are label renamings of each other."""
    by_label: dict[str, list[str]] = {}
    for f in fmls:
        by_label.setdefault(f.label, []).append(_text(f.formula))
    sig = {lab: tuple(sorted(set(v))) for lab, v in by_label.items()}
    neighbours: dict[str, set[str]] = {}
    for a, b in rels:
        neighbours.setdefault(a, set()).add(b)
        neighbours.setdefault(b, set()).add(a)
    order = {succ.label: 0}
    queue = [succ.label]
    rest = sorted(set(sig) | set(neighbours), key=lambda lab: (sig.get(lab, ()), lab))
    while True:
        while queue:
            cur = queue.pop(0)
            for nb in sorted(neighbours.get(cur, ()), key=lambda lab: (sig.get(lab, ()), lab)):
                if nb not in order:
                    order[nb] = len(order)
                    queue.append(nb)
        remaining = [lab for lab in rest if lab not in order]
        if not remaining:
            break
        order[remaining[0]] = len(order)
        queue.append(remaining[0])
    return (frozenset((order[a], order[b]) for a, b in rels),
            frozenset((order[f.label], f.formula) for f in fmls),
            (0, succ.formula))


class _Search:
    def __init__(self, budget: SearchBudget, theory: Theory, root: LabeledSequent, *,
                 eager: bool, max_cuts: int):
        self.budget = budget
        self.theory = theory
        self.eager = eager
        self.max_cuts = max_cuts
        self.nodes = 0
        self.budget_hit = False
        self.depth_hit = False
        self.limit = budget.max_depth
        self.counter = 0
        self.taken = set(root.labels())
        self.cut_formulas: list[Formula] = []
        if max_cuts:
            seen = set()
            for f in [*root.formulas, root.succedent]:
                for g in subformulas(f.formula):
                    if g not in seen and not isinstance(g, Bottom):
                        seen.add(g)
                        self.cut_formulas.append(g)

    def fresh(self) -> str:
        while True:
            name = f"y{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name

    def exhausted(self) -> bool:
        return self.nodes >= self.budget.max_nodes

    # -- rules --------------------------------------------------------------

    def closure(self, rels, fmls, succ):
        """One relational-rule application that adds a new atom, if any."""
        ext = self.theory.extensions
        if not ext:
            return None
        have = set(rels)
        labels = sorted({succ.label, *(f.label for f in fmls), *itertools.chain.from_iterable(rels)})
        if "T" in ext:
            for x in labels:
                if Rel(x, x) not in have:
                    return "T", Rel(x, x)
        pairs = sorted(have)
        if "B" in ext:
            for a, b in pairs:
                if Rel(b, a) not in have:
                    return "B", Rel(b, a)
        if "4" in ext:
            for (a, b), (c, d) in itertools.product(pairs, pairs):
                if b == c and Rel(a, d) not in have:
                    return "4", Rel(a, d)
        if "5" in ext:
            for (a, b), (c, d) in itertools.product(pairs, pairs):
                if a == c and Rel(b, d) not in have:
                    return "5", Rel(b, d)
        return None

    def invertible(self, rels, fmls, succ, boxed):
        L = LabeledFormula
        x, c = succ
        if isinstance(c, And):
            return "andR", [(rels, fmls, L(x, c.left)), (rels, fmls, L(x, c.right))], None
        if isinstance(c, ImpI):
            return "impIR", [(rels, fmls + (L(x, c.left),), L(x, c.right))], None
        if isinstance(c, Neg):
            return "negR", [(rels, fmls + (L(x, c.body),), L(x, BOT))], None
        if isinstance(c, OrC):
            return "orCR", [(rels, fmls + (L(x, Neg(c.left)), L(x, Neg(c.right))), L(x, BOT))], None
        if isinstance(c, ImpC):
            return "impCR", [(rels, fmls + (L(x, c.left), L(x, Neg(c.right))), L(x, BOT))], None
        if isinstance(c, ClAtom):
            return "Rc", [(rels, fmls + (L(x, Neg(IntAtom(c.name))),), L(x, BOT))], None
        if isinstance(c, DiaC):
            return "diaCR", [(rels, fmls + (L(x, Box(Neg(c.body))),), L(x, BOT))], None
        if isinstance(c, Box):
            y = self.fresh()
            return "boxR", [(rels + (Rel(x, y),), fmls, L(y, c.body))], y
        bot_here = isinstance(c, Bottom)
        for f in fmls:
            g = f.formula
            if isinstance(g, And):
                return "andL", [(rels, drop(fmls, f) + (L(f.label, g.left), L(f.label, g.right)), succ)], None
            if isinstance(g, OrI):
                rest = drop(fmls, f)
                return "orIL", [(rels, rest + (L(f.label, g.left),), succ), (rels, rest + (L(f.label, g.right),), succ)], None
            if isinstance(g, DiaI):
                y = self.fresh()
                return "diaIL", [(rels + (Rel(f.label, y),), drop(fmls, f) + (L(y, g.body),), succ)], y
            if bot_here and f.label == x:
                if isinstance(g, OrC):
                    rest = drop(fmls, f)
                    return "orCL", [(rels, rest + (L(x, g.left),), succ), (rels, rest + (L(x, g.right),), succ)], None
                if isinstance(g, ClAtom):
                    return "Lc", [(rels, drop(fmls, f) + (L(x, IntAtom(g.name)),), succ)], None
                if isinstance(g, DiaC):
                    y = self.fresh()
                    return "diaCL", [(rels + (Rel(x, y),), drop(fmls, f) + (L(y, g.body),), succ)], y
        for f in fmls:
            if isinstance(f.formula, Box):
                for rel in rels:
                    if rel.src == f.label and (f, rel) not in boxed:
                        return "boxL", [(rels, fmls + (L(rel.dst, f.formula.body),), succ)], (f, rel)
        return None

    def choices(self, rels, fmls, succ):
        L = LabeledFormula
        x, c = succ
        distinct = list(dict.fromkeys(fmls))
        if isinstance(c, OrI):
            yield "orIR1", [(rels, fmls, L(x, c.left))], None
            yield "orIR2", [(rels, fmls, L(x, c.right))], None
        if isinstance(c, DiaI):
            for y in dict.fromkeys(r.dst for r in rels if r.src == x):
                yield "diaIR", [(rels, fmls, L(y, c.body))], y
        if isinstance(c, Bottom):
            for f in distinct:
                if f.label == x and isinstance(f.formula, Neg):
                    yield "negL", [(rels, fmls, L(x, f.formula.body))], None
            for f in distinct:
                if f.label == x and isinstance(f.formula, ImpC):
                    yield "impCL", [(rels, fmls, L(x, f.formula.left)),
                                    (rels, drop(fmls, f) + (L(x, f.formula.right),), succ)], None
        for f in distinct:
            if isinstance(f.formula, ImpI):
                yield "impIL", [(rels, fmls, L(f.label, f.formula.left)),
                                (rels, drop(fmls, f) + (L(f.label, f.formula.right),), succ)], None
        targets = dict.fromkeys(f.label for f in fmls if isinstance(f.formula, _NEEDS_BOT))
        for u in targets:
            if succ != L(u, BOT):
                yield "W", [(rels, fmls, L(u, BOT))], None

    # -- driver -------------------------------------------------------------

    def prove(self, rels, fmls, succ, depth, history, closures, cuts, boxed=frozenset()):
        self.nodes += 1
        seq = LabeledSequent(rels, fmls, succ)
        if self.nodes > self.budget.max_nodes:
            self.budget_hit = True
            return None
        if succ in fmls:
            return ProofTree("init", seq)
        if any(isinstance(f.formula, Bottom) for f in fmls):
            return ProofTree("botL", seq)
        if depth >= self.limit:
            self.depth_hit = True
            return None
        key = loop_key(rels, fmls, succ)
        if key in history:
            return None
        history = history | {key}

        if closures < self.budget.max_depth:
            step = self.closure(rels, fmls, succ)
            if step is not None:
                rule, atom = step
                sub = self.prove(rels + (atom,), fmls, succ, depth, history, closures + 1, cuts, boxed)
                return None if sub is None else ProofTree(rule, seq, (sub,))

        inv = self.invertible(rels, fmls, succ, boxed)
        if inv is not None and inv[0] == "boxL":
            # boxL fires once per (principal, atom) pair on a branch
            rule, prems, (f, rel) = inv
            inv = rule, prems, rel.dst
            inner = boxed | {(f, rel)}
        else:
            inner = boxed
        if inv is not None and self.eager:
            rule, prems, inst = inv
            subs = self._all(prems, depth, history, closures, cuts, inner)
            return None if subs is None else ProofTree(rule, seq, subs, inst)

        options = [(*o, boxed) for o in self.choices(rels, fmls, succ)]
        if inv is not None:
            options.insert(0, (*inv, inner))
        for rule, prems, inst, bx in options:
            subs = self._all(prems, depth, history, closures, cuts, bx)
            if subs is not None:
                return ProofTree(rule, seq, subs, inst)
            if self.budget_hit and self.exhausted():
                return None
        if cuts > 0:
            labels = sorted(seq.labels())
            for a in self.cut_formulas:
                for lab in labels:
                    cf = LabeledFormula(lab, a)
                    if cf in fmls or cf == succ:
                        continue
                    subs = self._all([(rels, fmls, cf), (rels, fmls + (cf,), succ)], depth, history, closures,
                                     cuts - 1, boxed)
                    if subs is not None:
                        return ProofTree("cut", seq, subs)
                    if self.budget_hit and self.exhausted():
                        return None
        return None

    def _all(self, prems, depth, history, closures, cuts, boxed):
        subs = []
        for rels, fmls, succ in prems:
            sub = self.prove(tuple(rels), tuple(fmls), succ, depth + 1, history, closures, cuts, boxed)
            if sub is None:
                return None
            subs.append(sub)
        return tuple(subs)


def axiom_instances(theory: Theory, s: LabeledSequent) -> list[tuple[str, LabeledFormula]]:
    """Instances of the theory's axiom schemes over the subformulas of ``s``,
    one per label of ``s``."""
    pool = list(dict.fromkeys(g for f in [*s.formulas, s.succedent] for g in subformulas(f.formula)))
    out = []
    for ax in theory.axioms:
        names = sorted(metavars(ax.scheme))
        for combo in itertools.product(pool, repeat=len(names)):
            inst = instantiate(ax.scheme, dict(zip(names, combo)))
            for lab in sorted(s.labels()):
                out.append((ax.name, LabeledFormula(lab, inst)))
    return list(dict.fromkeys(out))


def prove_labek(s: LabeledSequent, th: Theory = EK, b: SearchBudget | None = None, *,
                eager: bool = True, allow_cut: bool = False) -> SearchOutcome:
    """Bounded backward search.  Proofs are cut-free unless the theory has
    axioms (instances enter via cuts against axiom leaves) or ``allow_cut``
    permits one analytic cut per branch."""
    for f in [*s.formulas, s.succedent]:
        if not is_modal_fragment(f.formula):
            raise FragmentError(f"labEK formulas must be modal: {render(f.formula)}")
    b = b or SearchBudget()
    instances = axiom_instances(th, s)
    start = s.with_items(formulas=[lf for _, lf in instances])
    search = _Search(b, th, start, eager=eager, max_cuts=1 if allow_cut else 0)
    # iterative deepening: shallow proofs are found before deep dead ends
    proof = None
    for limit in range(min(4, b.max_depth), b.max_depth + 1, 2):
        search.limit = limit
        search.depth_hit = False
        proof = search.prove(start.rels, start.formulas, start.succedent, 0, frozenset(), 0, search.max_cuts)
        if proof is not None or search.budget_hit or not search.depth_hit:
            break
    if proof is None:
        return Unknown(search.nodes, search.budget_hit or search.depth_hit, False)
    for i in reversed(range(len(instances))):
        name, lf = instances[i]
        below = s.with_items(formulas=[f for _, f in instances[:i]])
        leaf = ProofTree("axiom", LabeledSequent(below.rels, below.formulas, lf), (), name)
        proof = ProofTree("cut", below, (leaf, proof))
    return Proved(proof, search.nodes)


def applicable_rules(s: LabeledSequent) -> set[str]:
    """Names of the logical rules of plain labEK whose conclusion can match
    ``s`` (structural W and cut excluded)."""
    x, c = s.succedent
    names: set[str] = set()
    right = {And: "andR", ImpI: "impIR", Neg: "negR", OrC: "orCR", ImpC: "impCR",
             ClAtom: "Rc", DiaC: "diaCR", Box: "boxR"}
    if type(c) in right:
        names.add(right[type(c)])
    if isinstance(c, OrI):
        names |= {"orIR1", "orIR2"}
    if isinstance(c, DiaI) and any(r.src == x for r in s.rels):
        names.add("diaIR")
    if s.succedent in s.formulas:
        names.add("init")
    for f in s.formulas:
        g = f.formula
        if isinstance(g, Bottom):
            names.add("botL")
        elif isinstance(g, And):
            names.add("andL")
        elif isinstance(g, OrI):
            names.add("orIL")
        elif isinstance(g, ImpI):
            names.add("impIL")
        elif isinstance(g, DiaI):
            names.add("diaIL")
        elif isinstance(g, Box) and any(r.src == f.label for r in s.rels):
            names.add("boxL")
        elif isinstance(c, Bottom) and f.label == x:
            left = {Neg: "negL", OrC: "orCL", ImpC: "impCL", ClAtom: "Lc", DiaC: "diaCL"}
            if type(g) in left:
                names.add(left[type(g)])
    return names
