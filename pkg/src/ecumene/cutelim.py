"""Cut elimination for labEK proofs, one reduction step at a time.

The reduction works on the topmost cut, whose premises are cut-free, and
replaces it by a derivation whose cuts are all smaller in the lexicographic
measure (ew of the cut formula, sum of the premise heights).  The
structural transforms it relies on are weakening, label substitution,
inversion of the invertible left rules and contraction; they preserve height
as long as ``init`` is only used on intuitionistic atoms, which is what
``expand_inits`` establishes up front.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .formula import (
    BOT, And, Bottom, Box, ClAtom, DiaC, DiaI, ImpC, ImpI, IntAtom, Neg, OrC,
    OrI, ew,
)
from .labek import LabeledFormula as LF
from .labek import LabeledSequent, Rel, drop
from .proof import ProofTree


class CutEliminationError(Exception):
    """The reduction does not cover this configuration."""


EIGEN_RULES = ("boxR", "diaIL", "diaCL")
RIGHT_RULES = ("andR", "orIR1", "orIR2", "impIR", "negR", "orCR", "impCR", "Rc",
               "boxR", "diaIR", "diaCR")
CONSUMING = ("andL", "orIL", "orCL", "Lc", "diaIL", "diaCL", "impIL", "impCL")
RELATIONAL = ("T", "4", "5", "B")
_PRINCIPAL_SHAPE = {"andL": And, "orIL": OrI, "orCL": OrC, "Lc": ClAtom, "diaIL": DiaI,
                    "diaCL": DiaC, "impIL": ImpI, "impCL": ImpC, "negL": Neg, "boxL": Box}


def _seq(rels, fmls, succ) -> LabeledSequent:
    return LabeledSequent(tuple(rels), tuple(fmls), succ)


def _node(rule, concl, premises=(), inst=None) -> ProofTree:
    return ProofTree(rule, concl, tuple(premises), inst)


def _with(node: ProofTree, concl=None, premises=None, inst=...) -> ProofTree:
    return ProofTree(node.rule, concl if concl is not None else node.conclusion,
                     tuple(premises) if premises is not None else node.premises,
                     node.instantiation if inst is ... else inst)


# -- labels ------------------------------------------------------------------

def all_labels(p: ProofTree) -> set[str]:
    out: set[str] = set()
    for n in p.nodes():
        out |= n.conclusion.labels()
    return out


def fresh_label(avoid) -> str:
    i = 0
    while f"z{i}" in avoid:
        i += 1
    return f"z{i}"


def eigen(node: ProofTree) -> str | None:
    if node.rule not in EIGEN_RULES:
        return None
    if node.instantiation:
        return node.instantiation
    new = node.premises[0].conclusion.labels() - node.conclusion.labels()
    return min(new) if new else None


def _rename_seq(s: LabeledSequent, a: str, b: str) -> LabeledSequent:
    f = (lambda lab: b if lab == a else lab)
    return _seq((Rel(f(r.src), f(r.dst)) for r in s.rels),
                (LF(f(x.label), x.formula) for x in s.formulas),
                LF(f(s.succedent.label), s.succedent.formula))


def relabel(p: ProofTree, a: str, b: str) -> ProofTree:
    """Substitute label ``b`` for ``a``; eigenlabels named ``b`` are renamed first."""
    if a == b:
        return p
    y = eigen(p)
    if y == a:
        return p  # ``a`` is bound from here up
    premises, inst = p.premises, p.instantiation
    if y == b:
        z = fresh_label(all_labels(p) | {a, b})
        premises, inst = (relabel(premises[0], y, z),), z
    elif p.rule in ("boxL", "diaIR") and inst == a:
        inst = b
    return _with(p, _rename_seq(p.conclusion, a, b), [relabel(q, a, b) for q in premises], inst)


def freshen_eigen(p: ProofTree, avoid) -> ProofTree:
    """Rename the eigenlabel of ``p`` (if any) away from ``avoid``."""
    y = eigen(p)
    if y is None or y not in avoid:
        return p
    z = fresh_label(set(avoid) | all_labels(p))
    return _with(p, premises=[relabel(p.premises[0], y, z)], inst=z)


# -- weakening and contraction of relational atoms ---------------------------

def weaken(p: ProofTree, rels=(), fmls=()) -> ProofTree:
    rels, fmls = tuple(rels), tuple(fmls)
    if not rels and not fmls:
        return p
    added = {lab for r in rels for lab in r} | {f.label for f in fmls}
    p = freshen_eigen(p, added)
    c = p.conclusion
    return _with(p, _seq(c.rels + rels, c.formulas + fmls, c.succedent),
                 [weaken(q, rels, fmls) for q in p.premises])


def contract_rel(p: ProofTree, r: Rel) -> ProofTree:
    """Drop one copy of a duplicated relational atom.  Atoms are never
    consumed, so the duplicate persists up to every leaf."""
    c = p.conclusion
    return _with(p, _seq(drop(c.rels, r), c.formulas, c.succedent),
                 [contract_rel(q, r) for q in p.premises])


# -- principal formulas ------------------------------------------------------

def principal(node: ProofTree) -> LF | None:
    """Principal antecedent formula of a left rule, None otherwise."""
    r, c = node.rule, node.conclusion
    if r in ("andL", "orIL", "orCL", "Lc", "diaIL", "diaCL", "impIL", "impCL"):
        prem = node.premises[1 if r in ("impIL", "impCL") else 0].conclusion
        diff = Counter(c.formulas) - Counter(prem.formulas)
        return next(iter(diff), None)
    if r == "negL":
        return LF(c.succedent.label, Neg(node.premises[0].conclusion.succedent.formula))
    if r == "boxL":
        added = Counter(node.premises[0].conclusion.formulas) - Counter(c.formulas)
        y = next(iter(added))
        for f in c.formulas:
            if f.formula == Box(y.formula) and Rel(f.label, y.label) in c.rels:
                return f
    return None


def components(d: LF, rule: str, j: int, label: str | None):
    """(relational atoms, formulas) replacing ``d`` in premise ``j`` of ``rule``."""
    x, f = d
    if rule == "andL":
        return (), (LF(x, f.left), LF(x, f.right))
    if rule in ("orIL", "orCL"):
        return (), (LF(x, f.left if j == 0 else f.right),)
    if rule == "Lc":
        return (), (LF(x, IntAtom(f.name)),)
    if rule in ("impIL", "impCL"):
        return (), (LF(x, f.right),)
    if rule in ("diaIL", "diaCL"):
        return (Rel(x, label),), (LF(label, f.body),)
    raise CutEliminationError(f"rule {rule} is not invertible")


# -- identity derivations ----------------------------------------------------

def _init(rels, fmls, succ) -> ProofTree:
    s = _seq(rels, fmls, succ)
    if isinstance(succ.formula, Bottom) or any(isinstance(f.formula, Bottom) for f in fmls):
        if succ not in fmls or isinstance(succ.formula, Bottom):
            return _node("botL", s)
    return _node("init", s)


def identity(rels, fmls, d: LF, rule: str, j: int, label: str | None) -> ProofTree:
    """Proof of ``rels, fmls |- d`` where ``fmls`` holds the components of
    ``d`` for ``rule`` (premise ``j``)."""
    x, f = d
    rels, fmls = tuple(rels), tuple(fmls)
    s = _seq(rels, fmls, d)
    if rule == "andL":
        return _node("andR", s, [_init(rels, fmls, LF(x, f.left)), _init(rels, fmls, LF(x, f.right))])
    if rule == "orIL":
        part = f.left if j == 0 else f.right
        return _node("orIR1" if j == 0 else "orIR2", s, [_init(rels, fmls, LF(x, part))])
    if rule == "orCL":
        part = f.left if j == 0 else f.right
        inner = fmls + (LF(x, Neg(f.left)), LF(x, Neg(f.right)))
        neg = _node("negL", _seq(rels, inner, LF(x, BOT)), [_init(rels, inner, LF(x, part))])
        return _node("orCR", s, [neg])
    if rule == "Lc":
        inner = fmls + (LF(x, Neg(IntAtom(f.name))),)
        neg = _node("negL", _seq(rels, inner, LF(x, BOT)), [_init(rels, inner, LF(x, IntAtom(f.name)))])
        return _node("Rc", s, [neg])
    if rule == "impIL":
        inner = fmls + (LF(x, f.left),)
        return _node("impIR", s, [_init(rels, inner, LF(x, f.right))])
    if rule == "impCL":
        inner = fmls + (LF(x, f.left), LF(x, Neg(f.right)))
        neg = _node("negL", _seq(rels, inner, LF(x, BOT)), [_init(rels, inner, LF(x, f.right))])
        return _node("impCR", s, [neg])
    if rule == "diaIL":
        return _node("diaIR", s, [_init(rels, fmls, LF(label, f.body))], label)
    if rule == "diaCL":
        inner = fmls + (LF(x, Box(Neg(f.body))),)
        boxed = inner + (LF(label, Neg(f.body)),)
        neg = _node("negL", _seq(rels, boxed, LF(label, BOT)), [_init(rels, boxed, LF(label, f.body))])
        w = _node("W", _seq(rels, boxed, LF(x, BOT)), [neg])
        box = _node("boxL", _seq(rels, inner, LF(x, BOT)), [w], label)
        return _node("diaCR", s, [box])
    raise CutEliminationError(f"no identity derivation for {rule}")


# -- inversion and contraction -----------------------------------------------

def invert(p: ProofTree, d: LF, rule: str, j: int = 0, label: str | None = None) -> ProofTree:
    """From a proof of ``d, Γ |- C`` build one of ``components, Γ |- C``."""
    c = p.conclusion
    if d not in c.formulas:
        raise CutEliminationError(f"{d.render()} missing from {c.render()}")
    if label is not None:
        p = freshen_eigen(p, {label})
    comp_rels, comp_fmls = components(d, rule, j, label)
    newc = _seq(c.rels + comp_rels, drop(c.formulas, d) + comp_fmls, c.succedent)
    if p.rule == rule and principal(p) == d:
        if rule in ("diaIL", "diaCL"):
            return _with(relabel(p.premises[0], eigen(p), label), newc)
        if rule in ("impIL", "impCL"):
            right = p.premises[1]
            if right.conclusion.succedent != c.succedent:
                return _node("W", newc, [right])
            return _with(right, newc)
        return _with(p.premises[j], newc)
    if p.rule == "init" and c.succedent == d and d not in newc.formulas:
        return identity(newc.rels, newc.formulas, d, rule, j, label)
    return _with(p, newc, [invert(q, d, rule, j, label) for q in p.premises])


def contract(p: ProofTree, d: LF) -> ProofTree:
    """From a proof of ``d, d, Γ |- C`` build one of ``d, Γ |- C``."""
    c = p.conclusion
    newc = _seq(c.rels, drop(c.formulas, d), c.succedent)
    if p.rule in CONSUMING and principal(p) == d:
        label = eigen(p)
        premises = []
        for j, q in enumerate(p.premises):
            if p.rule in ("impIL", "impCL") and j == 0:
                premises.append(contract(q, d))
                continue
            q = invert(q, d, p.rule, j, label)
            rels, fmls = components(d, p.rule, j, label)
            for r in rels:
                q = contract_rel(q, r)
            for f in fmls:
                q = contract(q, f)
            premises.append(q)
        return _with(p, newc, premises)
    return _with(p, newc, [contract(q, d) for q in p.premises])


# -- atomic axioms -----------------------------------------------------------

def eta(rels, fmls, d: LF) -> ProofTree:
    """Proof of ``rels, fmls |- d`` (with ``d`` in ``fmls``) whose ``init``
    leaves are all on intuitionistic atoms."""
    rels, fmls = tuple(rels), tuple(fmls)
    x, f = d
    s = _seq(rels, fmls, d)
    rest = drop(fmls, d)
    if isinstance(f, IntAtom):
        return _node("init", s)
    if isinstance(f, Bottom):
        return _node("botL", s)
    if isinstance(f, And):
        inner = rest + (LF(x, f.left), LF(x, f.right))
        both = _node("andR", _seq(rels, inner, d), [eta(rels, inner, LF(x, f.left)), eta(rels, inner, LF(x, f.right))])
        return _node("andL", s, [both])
    if isinstance(f, OrI):
        l_ctx, r_ctx = rest + (LF(x, f.left),), rest + (LF(x, f.right),)
        return _node("orIL", s, [_node("orIR1", _seq(rels, l_ctx, d), [eta(rels, l_ctx, LF(x, f.left))]),
                                 _node("orIR2", _seq(rels, r_ctx, d), [eta(rels, r_ctx, LF(x, f.right))])])
    if isinstance(f, ImpI):
        ctx = fmls + (LF(x, f.left),)
        after = rest + (LF(x, f.left), LF(x, f.right))
        body = _node("impIL", _seq(rels, ctx, LF(x, f.right)),
                     [eta(rels, ctx, LF(x, f.left)), eta(rels, after, LF(x, f.right))])
        return _node("impIR", s, [body])
    if isinstance(f, Neg):
        ctx = fmls + (LF(x, f.body),)
        return _node("negR", s, [_node("negL", _seq(rels, ctx, LF(x, BOT)), [eta(rels, ctx, LF(x, f.body))])])
    if isinstance(f, ClAtom):
        ni = LF(x, Neg(IntAtom(f.name)))
        ctx = rest + (ni, LF(x, IntAtom(f.name)))
        neg = _node("negL", _seq(rels, ctx, LF(x, BOT)), [_node("init", _seq(rels, ctx, LF(x, IntAtom(f.name))))])
        return _node("Rc", s, [_node("Lc", _seq(rels, fmls + (ni,), LF(x, BOT)), [neg])])
    if isinstance(f, OrC):
        negs = (LF(x, Neg(f.left)), LF(x, Neg(f.right)))
        branches = []
        for part, n in ((f.left, negs[0]), (f.right, negs[1])):
            ctx = rest + negs + (LF(x, part),)
            branches.append(_node("negL", _seq(rels, ctx, LF(x, BOT)), [eta(rels, ctx, LF(x, part))]))
        return _node("orCR", s, [_node("orCL", _seq(rels, fmls + negs, LF(x, BOT)), branches)])
    if isinstance(f, ImpC):
        ctx = fmls + (LF(x, f.left), LF(x, Neg(f.right)))
        after = rest + (LF(x, f.left), LF(x, Neg(f.right)), LF(x, f.right))
        right = _node("negL", _seq(rels, after, LF(x, BOT)), [eta(rels, after, LF(x, f.right))])
        body = _node("impCL", _seq(rels, ctx, LF(x, BOT)), [eta(rels, ctx, LF(x, f.left)), right])
        return _node("impCR", s, [body])
    labels = {lab for r in rels for lab in r} | {g.label for g in fmls}
    z = fresh_label(labels)
    if isinstance(f, Box):
        ctx = fmls + (LF(z, f.body),)
        inner = _node("boxL", _seq(rels + (Rel(x, z),), fmls, LF(z, f.body)),
                      [eta(rels + (Rel(x, z),), ctx, LF(z, f.body))], z)
        return _node("boxR", s, [inner], z)
    if isinstance(f, DiaI):
        rz = rels + (Rel(x, z),)
        ctx = rest + (LF(z, f.body),)
        return _node("diaIL", s, [_node("diaIR", _seq(rz, ctx, d), [eta(rz, ctx, LF(z, f.body))], z)], z)
    if isinstance(f, DiaC):
        box = LF(x, Box(Neg(f.body)))
        rz = rels + (Rel(x, z),)
        ctx = rest + (box, LF(z, f.body))
        boxed = ctx + (LF(z, Neg(f.body)),)
        neg = _node("negL", _seq(rz, boxed, LF(z, BOT)), [eta(rz, boxed, LF(z, f.body))])
        body = _node("boxL", _seq(rz, ctx, LF(x, BOT)), [_node("W", _seq(rz, boxed, LF(x, BOT)), [neg])], z)
        return _node("diaCR", s, [_node("diaCL", _seq(rels, fmls + (box,), LF(x, BOT)), [body], z)])
    raise CutEliminationError(f"no expansion for {d.render()}")


def expand_inits(p: ProofTree) -> ProofTree:
    """Replace every ``init`` on a compound formula by its expansion."""
    if p.rule == "init" and not isinstance(p.conclusion.succedent.formula, IntAtom):
        c = p.conclusion
        return eta(c.rels, c.formulas, c.succedent)
    if not p.premises:
        return p
    return _with(p, premises=[expand_inits(q) for q in p.premises])


# -- the reduction -----------------------------------------------------------

def _cut(left: ProofTree, right: ProofTree) -> ProofTree:
    lc = left.conclusion
    return _node("cut", _seq(lc.rels, lc.formulas, right.conclusion.succedent), [left, right])


def cut_formula(node: ProofTree) -> LF:
    return node.premises[0].conclusion.succedent


def cut_measure(node: ProofTree) -> tuple[int, int]:
    left, right = node.premises
    return ew(cut_formula(node).formula), left.height + right.height


def _adjust(p: ProofTree, removed: Counter, added_rels, added_fmls, rule: str, j: int, label) -> ProofTree:
    """Turn a proof over Γ into one over the premise context of ``rule``:
    inversion when the rule consumed a formula, weakening otherwise."""
    if not removed:
        return weaken(p, added_rels, added_fmls)
    (d,) = removed
    return invert(p, d, rule, j, label)


def _diff(before: LabeledSequent, after: LabeledSequent):
    removed = Counter(before.formulas) - Counter(after.formulas)
    added_f = tuple((Counter(after.formulas) - Counter(before.formulas)).elements())
    added_r = tuple((Counter(after.rels) - Counter(before.rels)).elements())
    return removed, added_r, added_f


_CONTEXT_PREMISES = {"andL": (0,), "orIL": (0, 1), "impIL": (1,), "boxL": (0,), "diaIL": (0,),
                     "T": (0,), "4": (0,), "5": (0,), "B": (0,)}


def _permute_left(left, right, concl):
    """The cut formula is not principal in ``left``: push the cut into the
    premises of ``left`` that carry it."""
    if left.rule == "W":
        return _node("W", concl, left.premises)
    if left.rule not in _CONTEXT_PREMISES:
        raise CutEliminationError(f"cannot permute cut above {left.rule}")
    left = freshen_eigen(left, all_labels(right))
    label = eigen(left)
    premises = []
    for j, q in enumerate(left.premises):
        if j not in _CONTEXT_PREMISES[left.rule]:
            premises.append(q)
            continue
        removed, added_r, added_f = _diff(left.conclusion, q.conclusion)
        rp = _adjust(right, removed, added_r, added_f, left.rule, j, label)
        premises.append(_cut(q, rp))
    return _node(left.rule, concl, premises, left.instantiation)


def _permute_right(left, right, concl):
    """The cut formula is a side formula of ``right``: push the cut up."""
    right = freshen_eigen(right, all_labels(left))
    label = eigen(right)
    premises = []
    for j, q in enumerate(right.premises):
        removed, added_r, added_f = _diff(right.conclusion, q.conclusion)
        lp = _adjust(left, removed, added_r, added_f, right.rule, j, label)
        premises.append(_cut(lp, q))
    return _node(right.rule, concl, premises, right.instantiation)


def _principal(left, right, concl):
    cf = left.conclusion.succedent
    x, f = cf
    rels, fmls = concl.rels, concl.formulas
    lp, rp = left.premises, right.premises
    if isinstance(f, And):
        t = _cut(weaken(lp[1], fmls=[LF(x, f.left)]), rp[0])
        return _cut(lp[0], t)
    if isinstance(f, OrI):
        return _cut(lp[0], rp[0 if left.rule == "orIR1" else 1])
    if isinstance(f, ImpI):
        return _cut(_cut(_cut(left, rp[0]), lp[0]), rp[1])
    if isinstance(f, Neg):
        return _cut(_cut(left, rp[0]), lp[0])
    if isinstance(f, OrC):
        na = _node("negR", _seq(rels, fmls, LF(x, Neg(f.left))), [rp[0]])
        nb = _node("negR", _seq(rels, fmls, LF(x, Neg(f.right))), [rp[1]])
        return _cut(na, _cut(weaken(nb, fmls=[LF(x, Neg(f.left))]), lp[0]))
    if isinstance(f, ImpC):
        a = _cut(left, rp[0])
        q = rp[1]
        bctx = q.conclusion
        if bctx.succedent != LF(x, BOT):
            q = _node("W", _seq(bctx.rels, bctx.formulas, LF(x, BOT)), [q])
        nb = _node("negR", _seq(rels, fmls, LF(x, Neg(f.right))), [q])
        return _cut(a, _cut(weaken(nb, fmls=[LF(x, f.left)]), lp[0]))
    if isinstance(f, ClAtom):
        ni = _node("negR", _seq(rels, fmls, LF(x, Neg(IntAtom(f.name)))), [rp[0]])
        return _cut(ni, lp[0])
    if isinstance(f, Box):
        y = right.instantiation or next(iter(Counter(rp[0].conclusion.formulas) - Counter(right.conclusion.formulas))).label
        t = _cut(weaken(left, fmls=[LF(y, f.body)]), rp[0])
        s = contract_rel(relabel(lp[0], eigen(left), y), Rel(x, y))
        return _cut(s, t)
    if isinstance(f, DiaI):
        y = left.instantiation or lp[0].conclusion.succedent.label
        s = contract_rel(relabel(rp[0], eigen(right), y), Rel(x, y))
        return _cut(lp[0], s)
    if isinstance(f, DiaC):
        z = eigen(right)
        q = rp[0]
        qc = q.conclusion
        w = _node("W", _seq(qc.rels, qc.formulas, LF(z, BOT)), [q])
        neg = _node("negR", _seq(qc.rels, drop(qc.formulas, LF(z, f.body)), LF(z, Neg(f.body))), [w])
        box = _node("boxR", _seq(rels, fmls, LF(x, Box(Neg(f.body)))), [neg], z)
        return _cut(box, lp[0])
    raise CutEliminationError(f"no principal reduction for {type(f).__name__}")


def reduce_cut(node: ProofTree) -> ProofTree:
    """Reduct of a cut node whose premises are cut-free."""
    left, right = node.premises
    concl = node.conclusion
    cf = left.conclusion.succedent
    if "axiom" in (left.rule, right.rule):
        raise CutEliminationError("cuts against axiom leaves are not reducible")
    if left.rule == "init":
        return contract(right, cf)
    if left.rule == "botL":
        return _node("botL", concl)
    if right.rule == "init":
        return left if concl.succedent == cf else _node("init", concl)
    if isinstance(cf.formula, Bottom):
        return left if concl.succedent == cf else _node("W", concl, [left])
    if right.rule == "botL":
        return _node("botL", concl)
    if left.rule not in RIGHT_RULES:
        return _permute_left(left, right, concl)
    if right.rule in _PRINCIPAL_SHAPE and isinstance(cf.formula, _PRINCIPAL_SHAPE[right.rule]) \
            and principal(right) == cf:
        return _principal(left, right, concl)
    if right.rule in ("cut", "axiom"):
        raise CutEliminationError(f"cannot permute cut above {right.rule}")
    return _permute_right(left, right, concl)


def topmost_cut(p: ProofTree, path: tuple[int, ...] = ()):
    """Path to the leftmost cut with no cut above it, or None."""
    for i, q in enumerate(p.premises):
        found = topmost_cut(q, path + (i,))
        if found is not None:
            return found
    return path if p.rule == "cut" else None


def _replace(p: ProofTree, path, new: ProofTree) -> ProofTree:
    if not path:
        return new
    i = path[0]
    premises = list(p.premises)
    premises[i] = _replace(premises[i], path[1:], new)
    return _with(p, premises=premises)


def _at(p: ProofTree, path) -> ProofTree:
    for i in path:
        p = p.premises[i]
    return p


@dataclass(frozen=True)
class CutStep:
    path: tuple[int, ...]
    before: tuple[int, int]
    after: tuple[tuple[int, int], ...]

    @property
    def decreasing(self) -> bool:
        return all(m < self.before for m in self.after)


def eliminate_cut_step(p: ProofTree) -> ProofTree:
    return _step(p)[0]


def _step(p: ProofTree):
    path = topmost_cut(p)
    if path is None:
        raise CutEliminationError("proof has no cut")
    node = _at(p, path)
    reduct = reduce_cut(node)
    after = tuple(cut_measure(n) for n in reduct.nodes() if n.rule == "cut")
    return _replace(p, path, reduct), CutStep(path, cut_measure(node), after)


def eliminate_cuts(p: ProofTree, max_steps: int = 10_000):
    """Iterate reduction steps until the proof is cut-free.  Returns the
    cut-free proof and the list of steps taken."""
    p = expand_inits(p)
    steps = []
    while topmost_cut(p) is not None:
        if len(steps) >= max_steps:
            raise CutEliminationError(f"no cut-free form after {max_steps} steps")
        p, step = _step(p)
        steps.append(step)
    return p, steps
