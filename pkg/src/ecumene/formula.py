"""Formula language shared by every engine.

One AST covers the ecumenical propositional, modal and first-order
languages.  Atoms carry an ecumenical kind (intuitionistic or classical);
with an empty ``terms`` tuple they are propositional symbols, with terms
they are first-order predicates.  ``RelAtom`` is the accessibility
predicate produced by the standard translation.

All nodes are frozen dataclasses, hence hashable and safe to share.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator


class Formula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class IntAtom(Formula):
    name: str
    terms: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class ClAtom(Formula):
    name: str
    terms: tuple[str, ...] = ()


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, slots=True)
class RelAtom(Formula):
    src: str
    dst: str


@dataclass(frozen=True, slots=True)
class MetaVar(Formula):
    """Placeholder for an arbitrary formula inside an axiom scheme."""

    name: str


@dataclass(frozen=True, slots=True)
class Neg(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class DiaI(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class DiaC(Formula):
    body: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class OrI(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class OrC(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ImpI(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ImpC(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ForAll(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ExistsI(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ExistsC(Formula):
    var: str
    body: Formula


BOT = Bottom()

ATOMS = (IntAtom, ClAtom)
UNARY = (Neg, Box, DiaI, DiaC)
BINARY = (And, OrI, OrC, ImpI, ImpC)
QUANTIFIERS = (ForAll, ExistsI, ExistsC)
MODALITIES = (Box, DiaI, DiaC)


def iff_i(a: Formula, b: Formula) -> Formula:
    """Intuitionistic biconditional, encoded as a conjunction of implications."""
    return And(ImpI(a, b), ImpI(b, a))


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, UNARY):
        return (f.body,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order walk over ``f`` and all its subformulas."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def depth(f: Formula) -> int:
    kids = children(f)
    return 1 + max(map(depth, kids)) if kids else 0


def atom_names(f: Formula) -> frozenset[str]:
    """Names of propositional/predicate symbols, ignoring their kind."""
    return frozenset(g.name for g in subformulas(f) if isinstance(g, ATOMS))


# -- fragments ---------------------------------------------------------------

def is_modal_fragment(f: Formula) -> bool:
    for g in subformulas(f):
        if isinstance(g, QUANTIFIERS + (RelAtom,)):
            return False
        if isinstance(g, ATOMS) and g.terms:
            return False
    return True


def is_fo_fragment(f: Formula) -> bool:
    return not any(isinstance(g, MODALITIES) for g in subformulas(f))


def is_propositional(f: Formula) -> bool:
    return is_modal_fragment(f) and is_fo_fragment(f)


# -- classical formulas ------------------------------------------------------

def is_externally_classical(f: Formula) -> bool:
    return isinstance(f, (Bottom, ClAtom, ImpC, OrC, ExistsC, DiaC))


_CLASSICAL_NODES = (Bottom, ClAtom, ImpC, OrC, ExistsC, Neg, And, ForAll, Box, DiaC)


def is_classical(f: Formula) -> bool:
    return all(isinstance(g, _CLASSICAL_NODES) for g in subformulas(f))


# -- ecumenical weight -------------------------------------------------------

_WEIGHT = {
    And: 1, ImpI: 1, OrI: 1,
    Neg: 1, DiaI: 1, Box: 1,
    ImpC: 4, OrC: 4, DiaC: 4,
    ForAll: 1, ExistsI: 1, ExistsC: 4,
}


def ew(f: Formula) -> int:
    """Ecumenical weight: every classical connective pays for the negations
    needed to define it from the neutral and intuitionistic ones."""
    if isinstance(f, ClAtom):
        return 4
    if isinstance(f, (IntAtom, Bottom, RelAtom, MetaVar)):
        return 0
    return _WEIGHT[type(f)] + sum(ew(g) for g in children(f))


# -- variables and substitution ----------------------------------------------

def _terms_of(f: Formula) -> tuple[str, ...]:
    if isinstance(f, ATOMS):
        return f.terms
    if isinstance(f, RelAtom):
        return (f.src, f.dst)
    return ()


@lru_cache(maxsize=65536)
def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, QUANTIFIERS):
        return free_vars(f.body) - {f.var}
    kids = children(f)
    if kids:
        return frozenset().union(*(free_vars(g) for g in kids))
    return frozenset(_terms_of(f))


def all_vars(f: Formula) -> frozenset[str]:
    names: set[str] = set()
    for g in subformulas(f):
        names.update(_terms_of(g))
        if isinstance(g, QUANTIFIERS):
            names.add(g.var)
    return frozenset(names)


def fresh_name(base: str, avoid) -> str:
    name = base
    while name in avoid:
        name += "'"
    return name


def _rename_terms(f: Formula, mapping: dict[str, str]) -> Formula:
    if isinstance(f, IntAtom):
        return IntAtom(f.name, tuple(mapping.get(t, t) for t in f.terms))
    if isinstance(f, ClAtom):
        return ClAtom(f.name, tuple(mapping.get(t, t) for t in f.terms))
    if isinstance(f, RelAtom):
        return RelAtom(mapping.get(f.src, f.src), mapping.get(f.dst, f.dst))
    return f


def subst(f: Formula, x: str, t: str) -> Formula:
    """Capture-avoiding substitution of variable ``t`` for free ``x``."""
    if x == t or x not in free_vars(f):
        return f
    if isinstance(f, QUANTIFIERS):
        var, body = f.var, f.body
        if var == t:
            var = fresh_name(var, free_vars(body) | {t, x})
            body = subst(body, f.var, var)
        return type(f)(var, subst(body, x, t))
    if isinstance(f, UNARY):
        return type(f)(subst(f.body, x, t))
    if isinstance(f, BINARY):
        return type(f)(subst(f.left, x, t), subst(f.right, x, t))
    return _rename_terms(f, {x: t})


@lru_cache(maxsize=65536)
def alpha_normal(f: Formula) -> Formula:
    """Rename bound variables by binder depth so alpha-equivalent formulas
    become equal.  The generated names (``#0``, ``#1``...) cannot be parsed,
    so they never collide with free variables."""
    if not any(isinstance(g, QUANTIFIERS) for g in subformulas(f)):
        return f
    return _normal(f, {}, 0)


def _normal(f: Formula, env: dict[str, str], level: int) -> Formula:
    if isinstance(f, QUANTIFIERS):
        name = f"#{level}"
        return type(f)(name, _normal(f.body, {**env, f.var: name}, level + 1))
    if isinstance(f, UNARY):
        return type(f)(_normal(f.body, env, level))
    if isinstance(f, BINARY):
        return type(f)(_normal(f.left, env, level), _normal(f.right, env, level))
    return _rename_terms(f, env)


def alpha_eq(f: Formula, g: Formula) -> bool:
    return f == g or alpha_normal(f) == alpha_normal(g)


# -- axiom schemes -----------------------------------------------------------

def metavars(f: Formula) -> frozenset[str]:
    return frozenset(g.name for g in subformulas(f) if isinstance(g, MetaVar))


def instantiate(scheme: Formula, binding: dict[str, Formula]) -> Formula:
    if isinstance(scheme, MetaVar):
        return binding[scheme.name]
    if isinstance(scheme, UNARY):
        return type(scheme)(instantiate(scheme.body, binding))
    if isinstance(scheme, BINARY):
        return type(scheme)(instantiate(scheme.left, binding), instantiate(scheme.right, binding))
    if isinstance(scheme, QUANTIFIERS):
        return type(scheme)(scheme.var, instantiate(scheme.body, binding))
    return scheme


def match_scheme(scheme: Formula, f: Formula, binding: dict[str, Formula] | None = None):
    """Return the metavariable binding making ``scheme`` equal to ``f``, or None."""
    binding = {} if binding is None else binding
    if isinstance(scheme, MetaVar):
        bound = binding.get(scheme.name)
        if bound is None:
            binding[scheme.name] = f
            return binding
        return binding if alpha_eq(bound, f) else None
    if type(scheme) is not type(f):
        return None
    if isinstance(scheme, UNARY + QUANTIFIERS):
        if isinstance(scheme, QUANTIFIERS) and scheme.var != f.var:
            return None
        return match_scheme(scheme.body, f.body, binding)
    if isinstance(scheme, BINARY):
        if match_scheme(scheme.left, f.left, binding) is None:
            return None
        return match_scheme(scheme.right, f.right, binding)
    return binding if scheme == f else None
