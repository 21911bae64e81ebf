"""The single-succedent ecumenical sequent calculus LEci.

Rule names used in proof trees::

    init W botL andL andR orIL orIR1 orIR2 orCL orCR impIL impIR impCL impCR
    negL negR Lc Rc forallL forallR existsIL existsIR existsCL existsCR cut

Left rules ``forallL``, ``impIL``, ``impCL`` (left premise) and ``negL`` keep
their principal formula in the premise, every other left rule consumes it.
Classical left rules, ``negL`` and ``Lc`` conclude a sequent with
succedent ``bot``.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable

from .formula import (
    BOT, And, Bottom, ClAtom, ExistsC, ExistsI, ForAll, Formula, ImpC, ImpI,
    IntAtom, MODALITIES, Neg, OrC, OrI, QUANTIFIERS, RelAtom,
    all_vars, alpha_normal, free_vars, subformulas, subst,
)
from .parser import render
from .proof import (
    FragmentError, ProofCheckError, ProofTree, Proved, SearchBudget,
    SearchOutcome, Unknown,
)


@dataclass(frozen=True)
class Sequent:
    antecedent: tuple[Formula, ...]
    succedent: Formula

    def render(self) -> str:
        left = ", ".join(render(f) for f in self.antecedent)
        return f"{left} |- {render(self.succedent)}" if left else f"|- {render(self.succedent)}"

    __str__ = render

    def free_vars(self) -> frozenset[str]:
        return frozenset().union(free_vars(self.succedent), *map(free_vars, self.antecedent))

    def formulas(self) -> tuple[Formula, ...]:
        return (*self.antecedent, self.succedent)


def _key(f: Formula) -> Formula:
    return alpha_normal(f)


def same_multiset(a: Iterable[Formula], b: Iterable[Formula]) -> bool:
    return Counter(map(_key, a)) == Counter(map(_key, b))


def remove_one(formulas: tuple[Formula, ...], f: Formula) -> tuple[Formula, ...]:
    k = _key(f)
    for i, g in enumerate(formulas):
        if _key(g) == k:
            return formulas[:i] + formulas[i + 1:]
    raise ValueError(f"{render(f)} not present")


def contains(formulas: Iterable[Formula], f: Formula) -> bool:
    k = _key(f)
    return any(_key(g) == k for g in formulas)


def conjunction(formulas: Iterable[Formula]) -> Formula | None:
    result = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return result


# ============================================================================
# Checker
# ============================================================================

class _Violation(Exception):
    pass


def _expect(cond: bool, message: str):
    if not cond:
        raise _Violation(message)


def _premise_count(node: ProofTree, n: int):
    _expect(len(node.premises) == n, f"expected {n} premise(s), found {len(node.premises)}")


def _matches(prem: Sequent, antecedent: Iterable[Formula], succedent: Formula) -> bool:
    return _key(prem.succedent) == _key(succedent) and same_multiset(prem.antecedent, antecedent)


def _left_rule(node: ProofTree, shape: type, build: Callable, *, needs_bot: bool = False,
               what: str = ""):
    """Accept ``node`` if some antecedent formula of type ``shape`` yields the
    premises produced by ``build(principal, rest, succedent)``."""
    concl = node.conclusion
    if needs_bot:
        _expect(isinstance(concl.succedent, Bottom), "conclusion succedent must be bot")
    candidates = [f for f in concl.antecedent if isinstance(f, shape)]
    _expect(bool(candidates), f"no {what or shape.__name__} formula in the antecedent")
    for f in candidates:
        rest = remove_one(concl.antecedent, f)
        expected = build(f, rest, concl.succedent)
        if len(expected) == len(node.premises) and all(
            _matches(p.conclusion, a, s) for p, (a, s) in zip(node.premises, expected)
        ):
            return
    raise _Violation("premises do not match the schema for any principal formula")


def _right_rule(node: ProofTree, shape: type, expected: list):
    concl = node.conclusion
    _expect(isinstance(concl.succedent, shape), f"succedent must be a {shape.__name__} formula")
    _premise_count(node, len(expected))
    for i, (p, (a, s)) in enumerate(zip(node.premises, expected)):
        _expect(_matches(p.conclusion, a, s), f"premise {i} should be {Sequent(tuple(a), s)}")


def _eigen(node: ProofTree) -> str:
    _expect(node.instantiation is not None, "missing instantiation variable")
    return node.instantiation


def _check_node(node: ProofTree, allow_cut: bool):
    concl = node.conclusion
    ante, succ = concl.antecedent, concl.succedent
    gamma = ante
    r = node.rule
    if r == "init":
        _premise_count(node, 0)
        _expect(contains(ante, succ), "succedent does not occur in the antecedent")
    elif r == "botL":
        _premise_count(node, 0)
        _expect(any(isinstance(f, Bottom) for f in ante), "no bot in the antecedent")
    elif r == "W":
        _premise_count(node, 1)
        _expect(_matches(node.premises[0].conclusion, ante, BOT), "premise must be the antecedent with succedent bot")
    elif r == "andR":
        _right_rule(node, And, [(gamma, getattr(succ, "left", None)), (gamma, getattr(succ, "right", None))])
    elif r == "andL":
        _left_rule(node, And, lambda f, rest, c: [(rest + (f.left, f.right), c)])
    elif r == "orIL":
        _left_rule(node, OrI, lambda f, rest, c: [(rest + (f.left,), c), (rest + (f.right,), c)])
    elif r in ("orIR1", "orIR2"):
        side = "left" if r == "orIR1" else "right"
        _right_rule(node, OrI, [(gamma, getattr(succ, side, None))])
    elif r == "orCL":
        _left_rule(node, OrC, lambda f, rest, c: [(rest + (f.left,), BOT), (rest + (f.right,), BOT)], needs_bot=True)
    elif r == "orCR":
        _expect(isinstance(succ, OrC), "succedent must be a OrC formula")
        _right_rule(node, OrC, [(gamma + (Neg(succ.left), Neg(succ.right)), BOT)])
    elif r == "impIL":
        _left_rule(node, ImpI, lambda f, rest, c: [(rest + (f,), f.left), (rest + (f.right,), c)])
    elif r == "impIR":
        _expect(isinstance(succ, ImpI), "succedent must be a ImpI formula")
        _right_rule(node, ImpI, [(gamma + (succ.left,), succ.right)])
    elif r == "impCL":
        _left_rule(node, ImpC, lambda f, rest, c: [(rest + (f,), f.left), (rest + (f.right,), BOT)], needs_bot=True)
    elif r == "impCR":
        _expect(isinstance(succ, ImpC), "succedent must be a ImpC formula")
        _right_rule(node, ImpC, [(gamma + (succ.left, Neg(succ.right)), BOT)])
    elif r == "negL":
        _left_rule(node, Neg, lambda f, rest, c: [(rest + (f,), f.body)], needs_bot=True)
    elif r == "negR":
        _expect(isinstance(succ, Neg), "succedent must be a Neg formula")
        _right_rule(node, Neg, [(gamma + (succ.body,), BOT)])
    elif r == "Lc":
        _left_rule(node, ClAtom, lambda f, rest, c: [(rest + (IntAtom(f.name, f.terms),), BOT)],
                   needs_bot=True, what="classical atom")
    elif r == "Rc":
        _expect(isinstance(succ, ClAtom), "succedent must be a classical atom")
        _right_rule(node, ClAtom, [(gamma + (Neg(IntAtom(succ.name, succ.terms)),), BOT)])
    elif r == "forallL":
        y = _eigen(node)
        _left_rule(node, ForAll, lambda f, rest, c: [(rest + (f, subst(f.body, f.var, y)), c)])
    elif r == "forallR":
        y = _eigen(node)
        _expect(isinstance(succ, ForAll), "succedent must be a ForAll formula")
        _expect(y not in concl.free_vars(), f"eigenvariable {y} is not fresh: it occurs free in the conclusion")
        _right_rule(node, ForAll, [(gamma, subst(succ.body, succ.var, y))])
    elif r in ("existsIL", "existsCL"):
        y = _eigen(node)
        _expect(y not in concl.free_vars(), f"eigenvariable {y} is not fresh: it occurs free in the conclusion")
        if r == "existsIL":
            _left_rule(node, ExistsI, lambda f, rest, c: [(rest + (subst(f.body, f.var, y),), c)])
        else:
            _left_rule(node, ExistsC, lambda f, rest, c: [(rest + (subst(f.body, f.var, y),), BOT)], needs_bot=True)
    elif r == "existsIR":
        y = _eigen(node)
        _expect(isinstance(succ, ExistsI), "succedent must be a ExistsI formula")
        _right_rule(node, ExistsI, [(gamma, subst(succ.body, succ.var, y))])
    elif r == "existsCR":
        _expect(isinstance(succ, ExistsC), "succedent must be a ExistsC formula")
        _right_rule(node, ExistsC, [(gamma + (ForAll(succ.var, Neg(succ.body)),), BOT)])
    elif r == "cut":
        _expect(allow_cut, "cut is not allowed")
        _premise_count(node, 2)
        left, right = node.premises[0].conclusion, node.premises[1].conclusion
        cut_formula = left.succedent
        _expect(_matches(left, ante, cut_formula), "left premise must share the conclusion's antecedent")
        _expect(_matches(right, ante + (cut_formula,), succ),
                "right premise must add the cut formula to the conclusion's antecedent")
    else:
        raise _Violation(f"unknown rule {r!r}")


def check_leci_proof(p: ProofTree, allow_cut: bool = False) -> None:
    """Raise ``ProofCheckError`` at the first node (pre-order) that does not
    instantiate its rule schema."""
    stack = [((), p)]
    while stack:
        path, node = stack.pop()
        if not isinstance(node.conclusion, Sequent):
            raise ProofCheckError(path, node.rule, "conclusion is not an LEci sequent")
        try:
            _check_node(node, allow_cut)
        except _Violation as exc:
            raise ProofCheckError(path, node.rule, str(exc)) from None
        for i in reversed(range(len(node.premises))):
            stack.append((path + (i,), node.premises[i]))


# ============================================================================
# Search
# ============================================================================

# formulas whose left rules only fire against succedent bot
_NEEDS_BOT = (Neg, ImpC, OrC, ClAtom, ExistsC)


class _Search:
    def __init__(self, budget: SearchBudget, *, eager: bool, max_cuts: int,
                 first_order: bool, root: Sequent):
        self.budget = budget
        self.eager = eager
        self.max_cuts = max_cuts
        self.first_order = first_order
        self.nodes = 0
        self.budget_hit = False
        self.counter = 0
        self.taken = set().union(*(all_vars(f) for f in root.formulas()))
        self.cut_formulas: list[Formula] = []
        if max_cuts:
            seen = set()
            for f in root.formulas():
                for g in subformulas(f):
                    if _key(g) not in seen and not isinstance(g, Bottom):
                        seen.add(_key(g))
                        self.cut_formulas.append(g)

    def fresh(self) -> str:
        while True:
            name = f"v{self.counter}"
            self.counter += 1
            if name not in self.taken:
                self.taken.add(name)
                return name

    def exhausted(self) -> bool:
        return self.nodes >= self.budget.max_nodes

    # -- rule generation ----------------------------------------------------

    def invertible(self, ante, succ):
        """First applicable invertible rule as (rule, premises, inst)."""
        if isinstance(succ, And):
            return "andR", [(ante, succ.left), (ante, succ.right)], None
        if isinstance(succ, ImpI):
            return "impIR", [(ante + (succ.left,), succ.right)], None
        if isinstance(succ, Neg):
            return "negR", [(ante + (succ.body,), BOT)], None
        if isinstance(succ, OrC):
            return "orCR", [(ante + (Neg(succ.left), Neg(succ.right)), BOT)], None
        if isinstance(succ, ImpC):
            return "impCR", [(ante + (succ.left, Neg(succ.right)), BOT)], None
        if isinstance(succ, ClAtom):
            return "Rc", [(ante + (Neg(IntAtom(succ.name, succ.terms)),), BOT)], None
        if isinstance(succ, ExistsC):
            return "existsCR", [(ante + (ForAll(succ.var, Neg(succ.body)),), BOT)], None
        if isinstance(succ, ForAll):
            y = self.fresh()
            return "forallR", [(ante, subst(succ.body, succ.var, y))], y
        for f in ante:
            if isinstance(f, And):
                rest = remove_one(ante, f)
                return "andL", [(rest + (f.left, f.right), succ)], None
            if isinstance(f, OrI):
                rest = remove_one(ante, f)
                return "orIL", [(rest + (f.left,), succ), (rest + (f.right,), succ)], None
            if isinstance(f, ExistsI):
                y = self.fresh()
                return "existsIL", [(remove_one(ante, f) + (subst(f.body, f.var, y),), succ)], y
            if isinstance(succ, Bottom):
                if isinstance(f, OrC):
                    rest = remove_one(ante, f)
                    return "orCL", [(rest + (f.left,), BOT), (rest + (f.right,), BOT)], None
                if isinstance(f, ClAtom):
                    return "Lc", [(remove_one(ante, f) + (IntAtom(f.name, f.terms),), BOT)], None
                if isinstance(f, ExistsC):
                    y = self.fresh()
                    return "existsCL", [(remove_one(ante, f) + (subst(f.body, f.var, y),), BOT)], y
        return None

    def terms(self, ante, succ) -> list[str]:
        return sorted(Sequent(ante, succ).free_vars())

    def choices(self, ante, succ, used):
        """Non-invertible alternatives, in the order they are tried."""
        distinct = list({_key(f): f for f in ante}.values())
        if isinstance(succ, OrI):
            yield "orIR1", [(ante, succ.left)], None
            yield "orIR2", [(ante, succ.right)], None
        if isinstance(succ, ExistsI):
            yield from self._witnesses(ante, succ, used, "existsIR",
                                       lambda t: [(ante, subst(succ.body, succ.var, t))])
        if isinstance(succ, Bottom):
            for f in distinct:
                if isinstance(f, Neg):
                    yield "negL", [(ante, f.body)], None
            for f in distinct:
                if isinstance(f, ImpC):
                    yield "impCL", [(ante, f.left), (remove_one(ante, f) + (f.right,), BOT)], None
        for f in distinct:
            if isinstance(f, ImpI):
                yield "impIL", [(ante, f.left), (remove_one(ante, f) + (f.right,), succ)], None
        for f in distinct:
            if isinstance(f, ForAll):
                yield from self._witnesses(ante, f, used, "forallL",
                                           lambda t, f=f: [(ante + (subst(f.body, f.var, t),), succ)])
        if not isinstance(succ, Bottom) and any(isinstance(f, _NEEDS_BOT) for f in ante):
            yield "W", [(ante, BOT)], None

    def _witnesses(self, ante, principal, used, rule, build):
        """Instances over the sequent's free variables plus one fresh one,
        at most ``max_instantiations_per_universal`` per formula and branch."""
        k = _key(principal)
        done = used.get(k, frozenset())
        if len(done) >= self.budget.max_instantiations_per_universal:
            return
        for t in [t for t in self.terms(ante, principal) if t not in done] + [None]:
            t = t or self.fresh()
            prems = build(t)
            if rule == "forallL" and contains(ante, prems[0][0][-1]):
                continue
            yield rule, prems, t, {**used, k: done | {t}}

    # -- driver -------------------------------------------------------------

    def prove(self, ante, succ, depth, history, used, cuts):
        self.nodes += 1
        seq = Sequent(ante, succ)
        if self.nodes > self.budget.max_nodes:
            self.budget_hit = True
            return None
        if contains(ante, succ):
            return ProofTree("init", seq)
        if any(isinstance(f, Bottom) for f in ante):
            return ProofTree("botL", seq)
        if depth >= self.budget.max_depth:
            self.budget_hit = True
            return None
        skey = (frozenset(map(_key, ante)), _key(succ))
        if skey in history:
            return None
        history = history | {skey}

        inv = self.invertible(ante, succ)
        if inv is not None and self.eager:
            rule, prems, inst = inv
            subs = self._all(prems, depth, history, used, cuts)
            return None if subs is None else ProofTree(rule, seq, subs, inst)

        options = list(self.choices(ante, succ, used))
        if inv is not None:
            options.insert(0, inv)
        for option in options:
            rule, prems, inst = option[:3]
            branch_used = option[3] if len(option) > 3 else used
            subs = self._all(prems, depth, history, branch_used, cuts)
            if subs is not None:
                return ProofTree(rule, seq, subs, inst)
            if self.budget_hit and self.exhausted():
                return None
        if cuts > 0:
            for a in self.cut_formulas:
                if contains(ante, a) or _key(a) == _key(succ):
                    continue
                subs = self._all([(ante, a), (ante + (a,), succ)], depth, history, used, cuts - 1)
                if subs is not None:
                    return ProofTree("cut", seq, subs)
                if self.budget_hit and self.exhausted():
                    return None
        return None

    def _all(self, prems, depth, history, used, cuts):
        subs = []
        for ante, succ in prems:
            sub = self.prove(tuple(ante), succ, depth + 1, history, used, cuts)
            if sub is None:
                return None
            subs.append(sub)
        return tuple(subs)


def _search(s: Sequent, b: SearchBudget, *, first_order: bool, eager: bool, allow_cut: bool) -> SearchOutcome:
    search = _Search(b, eager=eager, max_cuts=1 if allow_cut else 0, first_order=first_order, root=s)
    proof = search.prove(tuple(s.antecedent), s.succedent, 0, frozenset(), {}, search.max_cuts)
    if proof is not None:
        return Proved(proof, search.nodes)
    saturated = not search.budget_hit and not first_order
    return Unknown(search.nodes, search.budget_hit, saturated)


def _require(s: Sequent, ok: Callable[[Formula], bool], message: str):
    for f in s.formulas():
        if not ok(f):
            raise FragmentError(f"{message}: {render(f)}")


def _is_prop(f: Formula) -> bool:
    return not any(isinstance(g, QUANTIFIERS + MODALITIES + (RelAtom,)) or
                   (isinstance(g, (IntAtom, ClAtom)) and g.terms) for g in subformulas(f))


def prove_prop(s: Sequent, b: SearchBudget | None = None, *, eager: bool = True,
               allow_cut: bool = False) -> SearchOutcome:
    """Decide a propositional LEci sequent.

    Returns ``Proved`` with a checkable tree, or ``Unknown``; an ``Unknown``
    with ``saturated=True`` means the loop-checked search space was
    exhausted, so the sequent is not provable.
    """
    _require(s, _is_prop, "prove_prop needs a propositional sequent")
    return _search(s, b or SearchBudget(), first_order=False, eager=eager, allow_cut=allow_cut)


def prove_fo(s: Sequent, b: SearchBudget | None = None, *, eager: bool = True,
             allow_cut: bool = False) -> SearchOutcome:
    """Bounded search for first-order LEci sequents.  Never reports a
    refutation: failure is always ``Unknown`` with ``saturated=False``."""
    _require(s, lambda f: not any(isinstance(g, MODALITIES) for g in subformulas(f)),
             "LEci sequents cannot contain modalities")
    return _search(s, b or SearchBudget(), first_order=True, eager=eager, allow_cut=allow_cut)
