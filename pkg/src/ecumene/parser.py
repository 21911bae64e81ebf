"""Concrete syntax: tokenizer, recursive-descent parser and pretty printer.

ASCII tokens::

    ~  /\\  \\/i  \\/c  ->i  ->c  <->i  box  dia_i  dia_c
    forall x.  exists_i x.  exists_c x.  bot  R(x,y)  x R y  x: A  |-

Atoms are identifiers with a ``_i`` or ``_c`` suffix (``a_i``, ``P_c(x)``).
Precedence, tightest first: ``~``/modalities, ``/\\``, ``\\/i``/``\\/c``,
``->i``/``->c`` (right associative), ``<->i``.  Quantifier bodies extend
as far right as possible.  Common Unicode symbols are accepted on input;
output is always ASCII.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    And, Bottom, Box, ClAtom, DiaC, DiaI, ExistsC, ExistsI, ForAll, Formula,
    ImpC, ImpI, IntAtom, MetaVar, Neg, OrC, OrI, RelAtom, QUANTIFIERS,
    free_vars, iff_i,
)


@dataclass(frozen=True)
class SourceSpan:
    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{message} at bytes {span.start}-{span.end}")
        self.message = message
        self.span = span


class UnboundVariableError(ParseError):
    pass


_UNICODE = [
    ("⊢", "|-"), ("¬", "~"), ("∧", "/\\"), ("⊥", "bot"),
    ("□", "box"), ("∀", "forall"),
]
_SUBSCRIPTED = {"∨": "\\/", "→": "->", "↔": "<->", "◊": "dia_", "◇": "dia_",
                "∃": "exists_"}
_SUBSCRIPT = {"ᵢ": "i", "i": "i", "c": "c", "꜀": "c"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<sym><->i|->i|->c|\\/i|\\/c|/\\|\|-|[~(),.:])
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
""", re.VERBOSE)

KEYWORDS = {"box", "dia_i", "dia_c", "forall", "exists_i", "exists_c", "bot", "R"}


@dataclass(frozen=True)
class Token:
    kind: str  # 'sym', 'ident' or 'eof'
    text: str
    span: SourceSpan


def _byte_offsets(text: str) -> list[int]:
    offsets = [0]
    for ch in text:
        offsets.append(offsets[-1] + len(ch.encode("utf-8")))
    return offsets


def tokenize(text: str) -> list[Token]:
    offsets = _byte_offsets(text)
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch in _SUBSCRIPTED:
            nxt = text[pos + 1] if pos + 1 < len(text) else ""
            if nxt not in _SUBSCRIPT:
                raise ParseError(f"connective {ch!r} needs an i/c subscript",
                                 SourceSpan(offsets[pos], offsets[pos + 1]))
            word = _SUBSCRIPTED[ch] + _SUBSCRIPT[nxt]
            kind = "ident" if word[0].isalpha() else "sym"
            tokens.append(Token(kind, word, SourceSpan(offsets[pos], offsets[pos + 2])))
            pos += 2
            continue
        for uni, ascii_ in _UNICODE:
            if text.startswith(uni, pos):
                kind = "ident" if ascii_[0].isalpha() else "sym"
                tokens.append(Token(kind, ascii_, SourceSpan(offsets[pos], offsets[pos + 1])))
                pos += 1
                break
        else:
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {ch!r}", SourceSpan(offsets[pos], offsets[pos + 1]))
            if m.lastgroup != "ws":
                tokens.append(Token(m.lastgroup, m.group(), SourceSpan(offsets[pos], offsets[m.end()])))
            pos = m.end()
    end = offsets[-1]
    tokens.append(Token("eof", "", SourceSpan(end, end)))
    return tokens


class _Parser:
    def __init__(self, text: str, schemes: bool = False):
        self.tokens = tokenize(text)
        self.pos = 0
        self.schemes = schemes

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind != "eof" and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise ParseError(f"expected {text!r}, found {self.tok.text or 'end of input'!r}", self.tok.span)
        return self.advance()

    def error(self, message: str):
        raise ParseError(message, self.tok.span)

    def done(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")

    # -- formulas ------------------------------------------------------------

    def formula(self) -> Formula:
        left = self.implication()
        if self.at("<->i"):
            self.advance()
            return iff_i(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("->i") or self.at("->c"):
            op = ImpI if self.advance().text == "->i" else ImpC
            return op(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at("\\/i") or self.at("\\/c"):
            op = OrI if self.advance().text == "\\/i" else OrC
            left = op(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.at("/\\"):
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.tok
        if self.at("~"):
            self.advance()
            return Neg(self.unary())
        if tok.kind == "ident" and tok.text in ("box", "dia_i", "dia_c"):
            self.advance()
            return {"box": Box, "dia_i": DiaI, "dia_c": DiaC}[tok.text](self.unary())
        if tok.kind == "ident" and tok.text in ("forall", "exists_i", "exists_c"):
            self.advance()
            var = self.variable()
            self.expect(".")
            return {"forall": ForAll, "exists_i": ExistsI, "exists_c": ExistsC}[tok.text](var, self.formula())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.tok
        if self.at("("):
            self.advance()
            f = self.formula()
            self.expect(")")
            return f
        if tok.kind != "ident":
            self.error(f"expected a formula, found {tok.text or 'end of input'!r}")
        if tok.text == "bot":
            self.advance()
            return Bottom()
        if tok.text == "R":
            self.advance()
            self.expect("(")
            src = self.variable()
            self.expect(",")
            dst = self.variable()
            self.expect(")")
            return RelAtom(src, dst)
        if tok.text in KEYWORDS:
            self.error(f"unexpected keyword {tok.text!r}")
        name, _, kind = tok.text.rpartition("_")
        if kind not in ("i", "c") or not name:
            if self.schemes and tok.text[0].isupper():
                self.advance()
                return MetaVar(tok.text)
            self.error(f"atom {tok.text!r} needs an _i or _c suffix")
        self.advance()
        terms: tuple[str, ...] = ()
        if self.at("("):
            self.advance()
            items = [self.variable()]
            while self.at(","):
                self.advance()
                items.append(self.variable())
            self.expect(")")
            terms = tuple(items)
        return (IntAtom if kind == "i" else ClAtom)(name, terms)

    def variable(self) -> str:
        tok = self.tok
        if tok.kind != "ident" or tok.text in KEYWORDS or tok.text.endswith(("_i", "_c")):
            self.error(f"expected a variable, found {tok.text or 'end of input'!r}")
        self.advance()
        return tok.text

    # -- sequents ------------------------------------------------------------

    def sequent(self):
        antecedent = []
        if not self.at("|-"):
            antecedent.append(self.formula())
            while self.at(","):
                self.advance()
                antecedent.append(self.formula())
        self.expect("|-")
        succedent = self.formula()
        if self.at(","):
            self.error("a sequent has exactly one succedent formula")
        self.done()
        return antecedent, succedent

    def labeled_item(self):
        start = self.tok
        label = self.variable()
        if self.at("R"):
            self.advance()
            return ("rel", label, self.variable())
        if self.at(":"):
            self.advance()
            return ("fml", label, self.formula())
        raise ParseError("expected 'R' or ':' after a label", SourceSpan(start.span.start, self.tok.span.end))

    def labeled_sequent(self):
        items = []
        if not self.at("|-"):
            items.append(self.labeled_item())
            while self.at(","):
                self.advance()
                items.append(self.labeled_item())
        self.expect("|-")
        start = self.tok.span.start
        label = self.variable()
        self.expect(":")
        succedent = self.formula()
        if self.at(","):
            self.error("a labeled sequent has exactly one succedent")
        self.done()
        return items, (label, succedent), start


def parse_formula(text: str, modal: bool = False) -> Formula:
    """Parse one formula.  In ``modal`` mode free term variables are rejected."""
    p = _Parser(text)
    f = p.formula()
    p.done()
    if modal and free_vars(f):
        var = sorted(free_vars(f))[0]
        idx = text.find(var)
        offsets = _byte_offsets(text)
        span = SourceSpan(offsets[max(idx, 0)], offsets[max(idx, 0) + len(var)] if idx >= 0 else offsets[-1])
        raise UnboundVariableError(f"free variable {var!r}", span)
    return f


def parse_scheme(text: str) -> Formula:
    """Parse an axiom scheme: bare capitalised identifiers are metavariables."""
    p = _Parser(text, schemes=True)
    f = p.formula()
    p.done()
    return f


def parse_sequent(text: str):
    from .leci import Sequent
    antecedent, succedent = _Parser(text).sequent()
    return Sequent(tuple(antecedent), succedent)


def parse_labeled_sequent(text: str):
    from .labek import LabeledFormula, LabeledSequent, Rel
    items, (label, succedent), _ = _Parser(text).labeled_sequent()
    rels = tuple(Rel(a, b) for kind, a, b in items if kind == "rel")
    fmls = tuple(LabeledFormula(a, b) for kind, a, b in items if kind == "fml")
    return LabeledSequent(rels, fmls, LabeledFormula(label, succedent))


# -- printing ----------------------------------------------------------------

_BINOP = {And: "/\\", OrI: "\\/i", OrC: "\\/c", ImpI: "->i", ImpC: "->c"}
_UNOP = {Neg: "~", Box: "box ", DiaI: "dia_i ", DiaC: "dia_c "}
_QUANT = {ForAll: "forall", ExistsI: "exists_i", ExistsC: "exists_c"}
# (level of the node, minimum level for left operand, for right operand)
_LEVELS = {ImpI: (1, 2, 1), ImpC: (1, 2, 1), OrI: (2, 2, 3), OrC: (2, 2, 3), And: (3, 3, 4)}
_UNARY_LEVEL = 4


def _level(f: Formula) -> int:
    if isinstance(f, tuple(_LEVELS)):
        return _LEVELS[type(f)][0]
    if isinstance(f, QUANTIFIERS):
        return 0
    if isinstance(f, tuple(_UNOP)):
        return _UNARY_LEVEL
    return 5


def _operand(f: Formula, minimum: int) -> str:
    text = render(f)
    return f"({text})" if _level(f) < minimum else text


def render(f: Formula) -> str:
    """ASCII rendering with minimal parentheses (quantifier bodies that are
    binary are always bracketed for readability)."""
    if isinstance(f, IntAtom):
        return f"{f.name}_i" + (f"({','.join(f.terms)})" if f.terms else "")
    if isinstance(f, ClAtom):
        return f"{f.name}_c" + (f"({','.join(f.terms)})" if f.terms else "")
    if isinstance(f, Bottom):
        return "bot"
    if isinstance(f, RelAtom):
        return f"R({f.src},{f.dst})"
    if isinstance(f, MetaVar):
        return f.name
    if isinstance(f, tuple(_UNOP)):
        return _UNOP[type(f)] + _operand(f.body, _UNARY_LEVEL)
    if isinstance(f, QUANTIFIERS):
        body = render(f.body)
        if isinstance(f.body, tuple(_LEVELS)):
            body = f"({body})"
        return f"{_QUANT[type(f)]} {f.var}. {body}"
    _, lmin, rmin = _LEVELS[type(f)]
    return f"{_operand(f.left, lmin)} {_BINOP[type(f)]} {_operand(f.right, rmin)}"
