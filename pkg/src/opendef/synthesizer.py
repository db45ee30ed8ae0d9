"""Isomorphism-type formulas, defining-formula synthesis and the model-checking sentence."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .decider import Witness, decide
from .formulas import (EXTENSION_BUDGET, FALSE, Eq, ExistSentence, Formula, Not, Rel,
                       conj, disj, extension, neq)
from .model import RelSymbol, Structure, Target


class NotDefinable(Exception):
    def __init__(self, witness: Witness):
        self.witness = witness
        super().__init__(witness.to_text())


def _shift(f: Formula, offset: int) -> Formula:
    """Rename every variable x_i to x_{i+offset}."""
    if offset == 0:
        return f
    if isinstance(f, Eq):
        return Eq(f.left + offset, f.right + offset)
    if isinstance(f, Rel):
        return Rel(f.name, tuple(i + offset for i in f.args))
    if isinstance(f, Not):
        return Not(_shift(f.child, offset))
    if hasattr(f, "children"):
        return type(f)(tuple(_shift(c, offset) for c in f.children))
    return f


def delta_block(s: Structure, a: tuple[int, ...], sym: RelSymbol) -> Formula:
    rel = s.relations[sym]
    m = len(a)
    lits = []
    for idx in itertools.product(range(1, m + 1), repeat=sym.arity):
        atom = Rel(sym.name, idx)
        lits.append(atom if tuple(a[i - 1] for i in idx) in rel else Not(atom))
    return conj(*lits)


def delta_tuple(s: Structure, a: tuple[int, ...]) -> Formula:
    """Relational blocks in vocabulary order, then x_i = x_j / x_i != x_j for i < j.

    The equality literals make the formula hold at ``b`` exactly when
    ``a -> b`` is a well-defined subisomorphism, also for tuples with
    repeated entries.
    """
    for e in a:
        if not 0 <= e < s.size:
            raise ValueError(f"element {e} out of range")
    parts = [delta_block(s, a, sym) for sym in s.vocabulary]
    m = len(a)
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            parts.append(Eq(i, j) if a[i - 1] == a[j - 1] else neq(i, j))
    return conj(*parts)


def delta_target(s: Structure, t: Target) -> Formula:
    return disj(*(delta_tuple(s, a) for a in t.tuples))


def synthesize(s: Structure, t: Target, verify: bool = True,
               budget: int = EXTENSION_BUDGET, threads: int = 1) -> Formula:
    """Return a formula defining ``t`` in ``s`` or raise ``NotDefinable``."""
    v = decide(s, t, threads=threads)
    if not v.definable:
        raise NotDefinable(v.witness)
    f = delta_target(s, t)
    if verify:
        ext = extension(s, f, t.arity, budget)
        if ext != t.tupleset:
            raise AssertionError("synthesized formula does not define the target")
    return f


@dataclass(frozen=True)
class DeltaBundle:
    per_tuple: dict[tuple[int, ...], Formula]
    target: Formula
    sentence: ExistSentence


def phi_instance(s: Structure, t: Target) -> ExistSentence:
    """There are |T|+1 pairwise distinct m-tuples, each with the type of some T-tuple."""
    if not t.tuples:
        raise ValueError("the sentence needs a nonempty target")
    m, blocks = t.arity, len(t) + 1
    dt = delta_target(s, t)
    parts = []
    for i in range(blocks):
        for j in range(i + 1, blocks):
            parts.append(disj(*(neq(i * m + c, j * m + c) for c in range(1, m + 1))))
    for i in range(blocks):
        parts.append(_shift(dt, i * m))
    return ExistSentence(blocks * m, conj(*parts))


def delta_bundle(s: Structure, t: Target) -> DeltaBundle:
    return DeltaBundle({a: delta_tuple(s, a) for a in t.tuples},
                       delta_target(s, t), phi_instance(s, t))


def atom_diff(s: Structure, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[list[Rel], list[Eq]]:
    """Atoms over x1..xm whose truth differs between assignments ``a`` and ``b``."""
    if len(a) != len(b):
        raise ValueError("tuples must have equal length")
    m = len(a)
    rel_diffs: list[Rel] = []
    for sym, rel in s.relations.items():
        for idx in itertools.product(range(m), repeat=sym.arity):
            ta = tuple(a[i] for i in idx)
            tb = tuple(b[i] for i in idx)
            if (ta in rel) != (tb in rel):
                rel_diffs.append(Rel(sym.name, tuple(i + 1 for i in idx)))
    eq_diffs = [Eq(i + 1, j + 1) for i in range(m) for j in range(i + 1, m)
                if (a[i] == a[j]) != (b[i] == b[j])]
    return rel_diffs, eq_diffs
