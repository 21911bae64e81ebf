"""Proof objects, search budgets and outcomes, and the JSON proof-script format.

A proof script is a JSON document::

    {"system": "leci", "allow_cut": false, "proof": TREE}
    {"system": "labek",
     "theory": {"extensions": ["T"], "axioms": [{"name": ..., "scheme": ...}],
                "allow_cut": true},
     "proof": TREE}

where ``TREE`` is ``{"rule", "conclusion", "instantiation"?, "premises"}`` and
``conclusion`` is the rendered sequent text.  ``dump_script`` output is
stable: loading and dumping again reproduces it byte for byte.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterator


class ProofCheckError(Exception):
    """A proof node does not instantiate the schema it names."""

    def __init__(self, path: tuple[int, ...], rule: str, message: str):
        self.path = path
        self.rule = rule
        self.message = message
        super().__init__(f"node {format_path(path)} [{rule}]: {message}")


class FragmentError(ValueError):
    """Input lies outside the fragment an operation supports."""


def format_path(path: tuple[int, ...]) -> str:
    return ".".join(["root", *map(str, path)])


@dataclass(frozen=True)
class ProofTree:
    """A derivation: ``rule`` applied to ``premises`` yields ``conclusion``.

    ``instantiation`` names the witness/eigenvariable for quantifier rules,
    the eigenlabel or target label for modal rules, and the axiom name for
    axiom leaves.
    """

    rule: str
    conclusion: Any
    premises: tuple["ProofTree", ...] = ()
    instantiation: str | None = None

    def nodes(self) -> Iterator["ProofTree"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.premises))

    @property
    def height(self) -> int:
        return 1 + max((p.height for p in self.premises), default=0)

    @property
    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def count(self, rule: str) -> int:
        return sum(1 for n in self.nodes() if n.rule == rule)

    def rules(self) -> set[str]:
        return {n.rule for n in self.nodes()}


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 30
    max_instantiations_per_universal: int = 2
    max_nodes: int = 50_000

    def __post_init__(self):
        for name in ("max_depth", "max_instantiations_per_universal", "max_nodes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


class SearchOutcome:
    status = "unknown"


@dataclass(frozen=True)
class Proved(SearchOutcome):
    proof: ProofTree
    nodes: int = 0
    status = "proved"


@dataclass(frozen=True)
class Unknown(SearchOutcome):
    """No proof found.  ``saturated`` means the search space was exhausted
    without hitting any budget, which for the propositional LEci prover is
    a proof of unprovability."""

    nodes: int = 0
    budget_exhausted: bool = False
    saturated: bool = False
    status = "unknown"


@dataclass(frozen=True)
class Refuted(SearchOutcome):
    model: Any
    world: str
    status = "refuted"


# -- JSON proof scripts ------------------------------------------------------

def tree_to_json(tree: ProofTree) -> dict:
    doc: dict[str, Any] = {"rule": tree.rule, "conclusion": tree.conclusion.render()}
    if tree.instantiation is not None:
        doc["instantiation"] = tree.instantiation
    doc["premises"] = [tree_to_json(p) for p in tree.premises]
    return doc


def tree_from_json(doc: dict, parse_conclusion) -> ProofTree:
    try:
        rule = doc["rule"]
        conclusion = parse_conclusion(doc["conclusion"])
        premises = doc.get("premises", [])
    except KeyError as exc:
        raise ValueError(f"proof node is missing field {exc.args[0]!r}") from None
    inst = doc.get("instantiation")
    return ProofTree(rule, conclusion, tuple(tree_from_json(p, parse_conclusion) for p in premises), inst)


def dump_script(tree: ProofTree, system: str, *, allow_cut: bool = False, theory=None) -> str:
    doc: dict[str, Any] = {"system": system}
    if system == "labek":
        doc["theory"] = (theory.to_json() if theory is not None else
                         {"extensions": [], "axioms": []}) | {"allow_cut": allow_cut}
    else:
        doc["allow_cut"] = allow_cut
    doc["proof"] = tree_to_json(tree)
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


@dataclass(frozen=True)
class ProofScript:
    system: str
    proof: ProofTree
    allow_cut: bool = False
    theory: Any = None

    def dump(self) -> str:
        return dump_script(self.proof, self.system, allow_cut=self.allow_cut, theory=self.theory)


def load_script(text: str) -> ProofScript:
    from .labek import Theory
    from .parser import parse_labeled_sequent, parse_sequent

    doc = json.loads(text)
    system = doc.get("system")
    if system == "leci":
        tree = tree_from_json(doc["proof"], parse_sequent)
        return ProofScript("leci", tree, bool(doc.get("allow_cut", False)))
    if system == "labek":
        header = doc.get("theory", {})
        theory = Theory.from_json(header)
        tree = tree_from_json(doc["proof"], parse_labeled_sequent)
        return ProofScript("labek", tree, bool(header.get("allow_cut", False)), theory)
    raise ValueError(f"unknown proof system {system!r}")
