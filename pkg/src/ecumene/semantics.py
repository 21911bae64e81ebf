"""Finite birelational Kripke models for the ecumenical modal language.

A model has a partial order ``leq`` on worlds, an accessibility relation
``R`` and a monotone valuation of intuitionistic atoms.  Classical
connectives are evaluated through their negative unfoldings.

Two evaluators live here: ``forces`` is a direct recursive reading of the
clauses on a single model, and ``_Batch`` evaluates a formula on every
(frame, valuation, world) triple of a stratum at once with boolean matrix
products.  Countermodel search and validity sweeps use the batch evaluator;
the tests compare the two.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Mapping

import numpy as np

from .formula import (And, Bottom, Box, ClAtom, DiaC, DiaI, Formula, ImpC, ImpI, IntAtom, Neg, OrC, OrI,
                      atom_names, is_modal_fragment)
from .labek import LabeledSequent
from .parser import render
from .proof import FragmentError
from .translations import ik_translate


class FrameProperty(str, Enum):
    REFLEXIVE = "Reflexive"
    TRANSITIVE = "Transitive"
    EUCLIDEAN = "Euclidean"
    SYMMETRIC = "Symmetric"


# frame condition matching each theory extension
EXTENSION_PROPERTY = {
    "T": FrameProperty.REFLEXIVE,
    "4": FrameProperty.TRANSITIVE,
    "5": FrameProperty.EUCLIDEAN,
    "B": FrameProperty.SYMMETRIC,
}


class ModelError(ValueError):
    """Raised when forcing is asked of an ill-formed model or formula."""


@dataclass(frozen=True)
class Violation:
    kind: str
    worlds: tuple[str, ...]

    def __str__(self) -> str:
        return f"{self.kind}: {', '.join(self.worlds)}"


@dataclass(frozen=True)
class KripkeModel:
    worlds: tuple[str, ...]
    leq: frozenset[tuple[str, str]]
    R: frozenset[tuple[str, str]]
    valuation: Mapping[str, frozenset[str]] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "leq", frozenset(map(tuple, self.leq)))
        object.__setattr__(self, "R", frozenset(map(tuple, self.R)))
        object.__setattr__(self, "valuation",
                           {w: frozenset(self.valuation.get(w, ())) for w in self.worlds})

    def V(self, w: str) -> frozenset[str]:
        return self.valuation[w]

    @cached_property
    def _up(self) -> dict[str, tuple[str, ...]]:
        return {w: tuple(v for v in self.worlds if (w, v) in self.leq) for w in self.worlds}

    @cached_property
    def _succ(self) -> dict[str, tuple[str, ...]]:
        return {w: tuple(v for v in self.worlds if (w, v) in self.R) for w in self.worlds}

    @cached_property
    def _box_succ(self) -> dict[str, tuple[str, ...]]:
        # worlds v with w <= w' and w' R v
        return {w: tuple(v for v in self.worlds if any((u, v) in self.R for u in self._up[w]))
                for w in self.worlds}

    def up(self, w: str) -> tuple[str, ...]:
        return self._up[w]

    def successors(self, w: str) -> tuple[str, ...]:
        return self._succ[w]

    @cached_property
    def violations(self) -> tuple[Violation, ...]:
        return tuple(check_model(self))

    def to_json(self) -> dict:
        return {
            "worlds": list(self.worlds),
            "leq": [[w, v] for w in self.worlds for v in self.worlds if (w, v) in self.leq],
            "R": [[w, v] for w in self.worlds for v in self.worlds if (w, v) in self.R],
            "val": {w: sorted(self.valuation[w]) for w in self.worlds},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, doc: dict) -> "KripkeModel":
        try:
            worlds = [str(w) for w in doc["worlds"]]
            leq = [tuple(p) for p in doc["leq"]]
            rel = [tuple(p) for p in doc["R"]]
            val = doc.get("val", {})
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed model document: {exc}") from None
        known = set(worlds)
        for w, v in leq + rel:
            if w not in known or v not in known:
                raise ValueError(f"relation mentions unknown world: {w!r}, {v!r}")
        for w in val:
            if w not in known:
                raise ValueError(f"valuation mentions unknown world {w!r}")
        # accept "a_i" as a spelling of the atom a
        val = {w: frozenset(a[:-2] if a.endswith("_i") else a for a in atoms) for w, atoms in val.items()}
        return cls(tuple(worlds), frozenset(leq), frozenset(rel), val)


# -- well-formedness ---------------------------------------------------------

def check_model(m: KripkeModel, *, preorder: bool = False) -> list[Violation]:
    """All violated model conditions; an empty list means the model is fine."""
    out: list[Violation] = []
    W, leq, R = m.worlds, m.leq, m.R
    for w in W:
        if (w, w) not in leq:
            out.append(Violation("leq not reflexive", (w,)))
    for w, v, u in itertools.product(W, repeat=3):
        if (w, v) in leq and (v, u) in leq and (w, u) not in leq:
            out.append(Violation("leq not transitive", (w, v, u)))
    if not preorder:
        for w, v in itertools.combinations(W, 2):
            if (w, v) in leq and (v, w) in leq:
                out.append(Violation("leq not antisymmetric", (w, v)))
    for w, v in itertools.product(W, repeat=2):
        if (w, v) in leq and not m.V(w) <= m.V(v):
            out.append(Violation("valuation not monotone", (w, v)))
    for w, v in sorted(R):
        for v2 in W:
            if (v, v2) in leq and not any((w, w2) in leq and (w2, v2) in R for w2 in W):
                out.append(Violation("F1", (w, v, v2)))
    for w, w2 in itertools.product(W, repeat=2):
        if (w, w2) not in leq:
            continue
        for v in W:
            if (w, v) in R and not any((w2, v2) in R and (v, v2) in leq for v2 in W):
                out.append(Violation("F2", (w, w2, v)))
    return out


def check_frame_property(m: KripkeModel, p: FrameProperty | str) -> bool:
    p = FrameProperty(p)
    W, R = m.worlds, m.R
    if p is FrameProperty.REFLEXIVE:
        return all((w, w) in R for w in W)
    if p is FrameProperty.SYMMETRIC:
        return all((v, w) in R for w, v in R)
    if p is FrameProperty.TRANSITIVE:
        return all((w, u) in R for w, v in R for v2, u in R if v == v2)
    return all((v, u) in R for w, v in R for w2, u in R if w == w2)


# -- forcing -----------------------------------------------------------------

def _require_modal(f: Formula):
    if not is_modal_fragment(f):
        raise FragmentError(f"forcing is defined on modal formulas with zero-arity atoms: {render(f)}")


def forces(m: KripkeModel, w: str, f: Formula) -> bool:
    _require_modal(f)
    if w not in m.valuation:
        raise ModelError(f"unknown world {w!r}")
    if m.violations:
        raise ModelError(f"ill-formed model: {m.violations[0]}")
    memo: dict[tuple[str, Formula], bool] = {}

    def at(w: str, f: Formula) -> bool:
        key = (w, f)
        if key not in memo:
            memo[key] = clause(w, f)
        return memo[key]

    def neg(w: str, f: Formula) -> bool:
        return not any(at(v, f) for v in m.up(w))

    def clause(w: str, f: Formula) -> bool:
        if isinstance(f, Bottom):
            return False
        if isinstance(f, IntAtom):
            return f.name in m.V(w)
        if isinstance(f, ClAtom):
            return at(w, Neg(Neg(IntAtom(f.name))))
        if isinstance(f, And):
            return at(w, f.left) and at(w, f.right)
        if isinstance(f, OrI):
            return at(w, f.left) or at(w, f.right)
        if isinstance(f, ImpI):
            return all(not at(v, f.left) or at(v, f.right) for v in m.up(w))
        if isinstance(f, Neg):
            return neg(w, f.body)
        if isinstance(f, Box):
            return all(at(v, f.body) for v in m._box_succ[w])
        if isinstance(f, DiaI):
            return any(at(v, f.body) for v in m.successors(w))
        if isinstance(f, OrC):
            return at(w, Neg(And(Neg(f.left), Neg(f.right))))
        if isinstance(f, ImpC):
            return at(w, Neg(And(f.left, Neg(f.right))))
        if isinstance(f, DiaC):
            return at(w, Neg(Box(Neg(f.body))))
        raise FragmentError(f"no forcing clause for {type(f).__name__}")

    return at(w, f)


def forcing_agreement(m: KripkeModel, w: str, f: Formula) -> bool:
    return forces(m, w, f) == forces(m, w, ik_translate(f))


# -- frame enumeration -------------------------------------------------------

def _perm_code(rel: np.ndarray, perm) -> int:
    n = len(perm)
    return sum(1 << (perm[i] * n + perm[j]) for i in range(n) for j in range(n) if rel[i, j])


@lru_cache(maxsize=None)
def _orders(n: int, preorder: bool) -> tuple[np.ndarray, ...]:
    """Reflexive-transitive relations on n worlds (antisymmetric unless
    ``preorder``), one per isomorphism class, ordered by canonical code."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    perms = list(itertools.permutations(range(n)))
    seen: dict[int, np.ndarray] = {}
    for bits in range(1 << len(pairs)):
        L = np.eye(n, dtype=bool)
        for k, (i, j) in enumerate(pairs):
            if bits >> k & 1:
                L[i, j] = True
        if ((L.astype(np.int8) @ L.astype(np.int8)) > 0).sum() != L.sum():
            continue
        if not preorder and (L & L.T & ~np.eye(n, dtype=bool)).any():
            continue
        code = min(_perm_code(L, p) for p in perms)
        if code not in seen:
            # store the canonical representative itself
            best = min(perms, key=lambda p: _perm_code(L, p))
            inv = np.argsort(best)
            seen[code] = L[np.ix_(inv, inv)]
    return tuple(seen[c] for c in sorted(seen))


def _automorphisms(L: np.ndarray) -> list[tuple[int, ...]]:
    n = len(L)
    out = []
    for p in itertools.permutations(range(n)):
        inv = np.argsort(p)
        if (L[np.ix_(inv, inv)] == L).all():
            out.append(p)
    return out


def _all_relations(n: int) -> np.ndarray:
    codes = np.arange(1 << (n * n), dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n * n)) & 1
    return bits.astype(bool).reshape(-1, n, n)


def _bmm(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.matmul(a.astype(np.uint8), b.astype(np.uint8)) > 0


@lru_cache(maxsize=None)
def _frames(n: int, preorder: bool) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """(L, stack of R) per order: every R satisfying F1 and F2, one per
    isomorphism class of the frame."""
    out = []
    weights = (np.int64(1) << np.arange(n * n, dtype=np.int64)).reshape(n, n)
    allR = _all_relations(n)
    for L in _orders(n, preorder):
        Lt = L.T
        f1 = ~(_bmm(allR, L) & ~_bmm(L, allR)).any(axis=(1, 2))
        f2 = ~(_bmm(Lt, allR) & ~_bmm(allR, Lt)).any(axis=(1, 2))
        Rs = allR[f1 & f2]
        codes = (Rs * weights).sum(axis=(1, 2))
        canon = codes.copy()
        for p in _automorphisms(L):
            inv = np.argsort(p)
            permuted = Rs[:, inv][:, :, inv]
            canon = np.minimum(canon, (permuted * weights).sum(axis=(1, 2)))
        keep = codes == canon
        Rs = Rs[keep]
        Rs = Rs[np.argsort(codes[keep], kind="stable")]
        out.append((L, Rs))
    return tuple(out)


def _property_mask(Rs: np.ndarray, props: Iterable[FrameProperty]) -> np.ndarray:
    mask = np.ones(len(Rs), dtype=bool)
    Rt = Rs.transpose(0, 2, 1)
    for p in map(FrameProperty, props):
        if p is FrameProperty.REFLEXIVE:
            mask &= np.diagonal(Rs, axis1=1, axis2=2).all(axis=1)
        elif p is FrameProperty.SYMMETRIC:
            mask &= (Rs == Rt).all(axis=(1, 2))
        elif p is FrameProperty.TRANSITIVE:
            mask &= ~(_bmm(Rs, Rs) & ~Rs).any(axis=(1, 2))
        else:
            mask &= ~(_bmm(Rt, Rs) & ~Rs).any(axis=(1, 2))
    return mask


def _upsets(L: np.ndarray) -> np.ndarray:
    n = len(L)
    sets = np.array([[(c >> i) & 1 for i in range(n)] for c in range(1 << n)], dtype=bool)
    # S is an up-set iff w in S and w <= v imply v in S
    ok = ~((sets[:, :, None] & L[None]) & ~sets[:, None, :]).any(axis=(1, 2))
    return sets[ok]


def frames(n: int, props: Iterable[FrameProperty] = (), *, preorder: bool = False):
    """Frames with exactly n worlds, modulo isomorphism, as (L, R) arrays."""
    for L, Rs in _frames(n, preorder):
        for R in Rs[_property_mask(Rs, props)]:
            yield L, R


def _model(L: np.ndarray, R: np.ndarray, atoms: tuple[str, ...], ext: np.ndarray) -> KripkeModel:
    n = len(L)
    names = tuple(f"w{i}" for i in range(n))
    leq = {(names[i], names[j]) for i in range(n) for j in range(n) if L[i, j]}
    rel = {(names[i], names[j]) for i in range(n) for j in range(n) if R[i, j]}
    val = {names[i]: frozenset(a for k, a in enumerate(atoms) if ext[k, i]) for i in range(n)}
    return KripkeModel(names, frozenset(leq), frozenset(rel), val)


def enumerate_models(max_worlds: int, atoms: Iterable[str], props: Iterable[FrameProperty] = (), *,
                     preorder: bool = False) -> Iterator[KripkeModel]:
    """Every model up to ``max_worlds`` worlds: frames modulo isomorphism,
    each with all monotone valuations of ``atoms``."""
    atoms = tuple(sorted(set(atoms)))
    props = tuple(props)
    for n in range(1, max_worlds + 1):
        for L, Rs in _frames(n, preorder):
            Rs = Rs[_property_mask(Rs, props)]
            vals = _valuations(L, len(atoms))
            for R in Rs:
                for ext in vals:
                    yield _model(L, R, atoms, ext)


def _valuations(L: np.ndarray, k: int) -> np.ndarray:
    ups = _upsets(L)
    combos = list(itertools.product(range(len(ups)), repeat=k))
    idx = np.array(combos, dtype=np.int64).reshape(len(combos), k)
    return ups[idx]                                         # (V, k, n)


# -- batch evaluation --------------------------------------------------------

class _Batch:
    """Truth sets over a stack of frames sharing one order.

    Arrays have shape (frames, valuations, worlds)."""

    def __init__(self, L: np.ndarray, Rs: np.ndarray, atoms: tuple[str, ...], vals: np.ndarray):
        u8 = np.uint8
        self.Lt = L.T.astype(u8)
        self.Rt = Rs.transpose(0, 2, 1).astype(u8)
        self.Mt = _bmm(L, Rs).transpose(0, 2, 1).astype(u8)
        self.index = {a: k for k, a in enumerate(atoms)}
        self.vals = vals[None]                              # (1, V, k, n)
        self.shape = (len(Rs), len(vals), len(L))
        self.memo: dict[Formula, np.ndarray] = {}

    def _some_up(self, x):
        return np.matmul(x.astype(np.uint8), self.Lt) > 0

    def neg(self, x):
        return ~self._some_up(x)

    def truth(self, f: Formula) -> np.ndarray:
        hit = self.memo.get(f)
        if hit is None:
            hit = self.memo[f] = np.broadcast_to(self._eval(f), self.shape)
        return hit

    def _eval(self, f: Formula) -> np.ndarray:
        t = self.truth
        if isinstance(f, Bottom):
            return np.zeros(self.shape, dtype=bool)
        if isinstance(f, IntAtom):
            return self.vals[:, :, self.index[f.name], :]
        if isinstance(f, ClAtom):
            return self.neg(self.neg(t(IntAtom(f.name))))
        if isinstance(f, And):
            return t(f.left) & t(f.right)
        if isinstance(f, OrI):
            return t(f.left) | t(f.right)
        if isinstance(f, ImpI):
            return ~self._some_up(t(f.left) & ~t(f.right))
        if isinstance(f, Neg):
            return self.neg(t(f.body))
        if isinstance(f, Box):
            return ~(np.matmul((~t(f.body)).astype(np.uint8), self.Mt) > 0)
        if isinstance(f, DiaI):
            return np.matmul(t(f.body).astype(np.uint8), self.Rt) > 0
        if isinstance(f, OrC):
            return self.neg(self.neg(t(f.left)) & self.neg(t(f.right)))
        if isinstance(f, ImpC):
            return self.neg(t(f.left) & self.neg(t(f.right)))
        if isinstance(f, DiaC):
            return self.neg(~(np.matmul(t(f.body).astype(np.uint8), self.Mt) > 0))
        raise FragmentError(f"no forcing clause for {type(f).__name__}")


_CELLS = 1 << 20


def _strata(atoms: tuple[str, ...], max_worlds: int, props, preorder: bool):
    """Yield (L, Rs, vals, batch) chunks in enumeration order."""
    for n in range(1, max_worlds + 1):
        for L, Rs in _frames(n, preorder):
            Rs = Rs[_property_mask(Rs, props)]
            if not len(Rs):
                continue
            vals = _valuations(L, len(atoms))
            step = max(1, _CELLS // (len(vals) * n))
            for lo in range(0, len(Rs), step):
                chunk = Rs[lo:lo + step]
                yield L, chunk, vals, _Batch(L, chunk, atoms, vals)


def _atoms(formulas: Iterable[Formula]) -> tuple[str, ...]:
    names: set[str] = set()
    for f in formulas:
        _require_modal(f)
        names |= atom_names(f)
    return tuple(sorted(names))


def find_countermodel(f: Formula, max_worlds: int, props: Iterable[FrameProperty] = (), *,
                      preorder: bool = False) -> tuple[KripkeModel, str] | None:
    """Smallest model (by world count, then enumeration order) with a world
    that does not force ``f``; None when every model up to the bound does."""
    atoms = _atoms([f])
    for L, Rs, vals, batch in _strata(atoms, max_worlds, tuple(props), preorder):
        bad = np.argwhere(~batch.truth(f))
        if len(bad):
            i, a, w = bad[0]
            m = _model(L, Rs[i], atoms, vals[a])
            return m, m.worlds[w]
    return None


def is_valid(f: Formula, max_worlds: int, props: Iterable[FrameProperty] = (), *,
             preorder: bool = False) -> bool:
    return find_countermodel(f, max_worlds, props, preorder=preorder) is None


def find_sequent_countermodel(s: LabeledSequent, max_worlds: int, props: Iterable[FrameProperty] = (), *,
                              preorder: bool = False) -> tuple[KripkeModel, dict[str, str]] | None:
    """A model and an assignment of labels to worlds that respects the
    relational atoms, forces every antecedent formula and refutes the
    succedent.

    This matches derivability when the relational atoms are tree-shaped.  A
    cyclic atom such as ``x R x`` constrains only the assigned world, not
    the worlds above it, so such sequents hold only over frames where the
    cycle is a frame condition (reflexive frames for ``x R x``)."""
    labels = sorted(s.labels())
    pos = {x: k for k, x in enumerate(labels)}
    atoms = _atoms([lf.formula for lf in s.formulas] + [s.succedent.formula])
    for L, Rs, vals, batch in _strata(atoms, max_worlds, tuple(props), preorder):
        n = len(L)
        hyps = [(pos[lf.label], batch.truth(lf.formula)) for lf in s.formulas]
        goal = batch.truth(s.succedent.formula)
        for assign in itertools.product(range(n), repeat=len(labels)):
            ok = np.ones(goal.shape[:2], dtype=bool)
            for r in s.rels:
                ok = ok & Rs[:, assign[pos[r.src]], assign[pos[r.dst]]][:, None]
            for k, truth in hyps:
                ok = ok & truth[:, :, assign[k]]
            ok = ok & ~goal[:, :, assign[pos[s.succedent.label]]]
            hit = np.argwhere(ok)
            if len(hit):
                i, a = hit[0]
                m = _model(L, Rs[i], atoms, vals[a])
                return m, {x: m.worlds[assign[pos[x]]] for x in labels}
    return None


def sequent_valid(s: LabeledSequent, max_worlds: int, props: Iterable[FrameProperty] = (), *,
                  preorder: bool = False) -> bool:
    return find_sequent_countermodel(s, max_worlds, props, preorder=preorder) is None


def agreement_violations(formulas: Iterable[Formula], max_worlds: int, *,
                         preorder: bool = False) -> list[tuple[KripkeModel, str, Formula]]:
    """Triples where a formula and its IK translation are forced differently."""
    formulas = list(formulas)
    atoms = _atoms(formulas)
    out = []
    for L, Rs, vals, batch in _strata(atoms, max_worlds, (), preorder):
        for f in formulas:
            diff = np.argwhere(batch.truth(f) != batch.truth(ik_translate(f)))
            for i, a, w in diff[:1]:
                m = _model(L, Rs[i], atoms, vals[a])
                out.append((m, m.worlds[w], f))
    return out


def count_frames(n: int, props: Iterable[FrameProperty] = (), *, preorder: bool = False) -> int:
    return sum(int(_property_mask(Rs, props).sum()) for _, Rs in _frames(n, preorder))
