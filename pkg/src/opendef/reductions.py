"""Gadget reductions into (co-)definability and brute-force reference checkers."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .formulas import ExistSentence
from .model import InstanceError, RelSymbol, Structure, Target, is_graph
from .synthesizer import phi_instance


@dataclass(frozen=True)
class GadgetInstance:
    structure: Structure
    target: Target
    provenance: dict = field(default_factory=dict, compare=False)

    def comment_lines(self) -> list[str]:
        return [f"# {k}: {v}" for k, v in self.provenance.items()]


def _require_graph(g: Structure):
    if not is_graph(g):
        raise InstanceError("input is not a graph (vocabulary {E/2}, symmetric, irreflexive)")


def _union_with(g: Structure, extra: int, edges: list[tuple[int, int]]) -> Structure:
    e = set(g.rel("E"))
    for a, b in edges:
        e.add((a, b))
        e.add((b, a))
    return Structure(g.size + extra, {RelSymbol("E", 2): frozenset(e)})


def path_labels(k: int) -> list[int]:
    """Symmetric labels of a k-vertex path: -l..-1, [0 if k odd], 1..l."""
    l = k // 2
    mid = [0] if k % 2 else []
    return list(range(-l, 0)) + mid + list(range(1, l + 1))


def reduce_induced_path(g: Structure, k: int) -> GadgetInstance:
    """Disjoint union of ``g`` with a fresh k-vertex path; the target holds its two traversals.

    The target is not open-definable iff ``g`` has an induced path on k vertices.
    """
    _require_graph(g)
    if k < 2:
        raise ValueError("k must be at least 2")
    fresh = list(range(g.size, g.size + k))
    s = _union_with(g, k, list(zip(fresh, fresh[1:])))
    t = Target(k, (tuple(fresh), tuple(reversed(fresh))))
    relabel = ", ".join(f"{lab}>{v}" for lab, v in zip(path_labels(k), fresh))
    return GadgetInstance(s, t, {"source": "induced-path", "k": k, "relabel": relabel})


def reduce_clique(g: Structure, k: int) -> GadgetInstance:
    """Disjoint union of ``g`` with K_k; the target holds all k! orderings of K_k.

    ``g`` has a k-clique iff the target is not open-definable.
    """
    _require_graph(g)
    if k < 1:
        raise ValueError("k must be at least 1")
    fresh = list(range(g.size, g.size + k))
    s = _union_with(g, k, list(itertools.combinations(fresh, 2)))
    t = Target(k, tuple(itertools.permutations(fresh)))
    relabel = ", ".join(f"{i}>{v}" for i, v in enumerate(fresh, 1))
    return GadgetInstance(s, t, {"source": "clique", "k": k, "relabel": relabel})


def reduce_to_mc(s: Structure, t: Target) -> tuple[Structure, ExistSentence]:
    if not t.tuples:
        raise ValueError("empty target: trivially definable, no sentence to build")
    return s, phi_instance(s, t)


def brute_induced_path(g: Structure, k: int) -> bool:
    _require_graph(g)
    if k < 1 or k > g.size:
        return False
    e = g.rel("E")
    for sub in itertools.combinations(range(g.size), k):
        induced = {(a, b) for a in sub for b in sub if (a, b) in e}
        for order in itertools.permutations(sub):
            if order[0] > order[-1]:
                continue  # each path is seen in both directions
            path = {(order[i], order[i + 1]) for i in range(k - 1)}
            path |= {(b, a) for a, b in path}
            if induced == path:
                return True
    return False


def brute_clique(g: Structure, k: int) -> bool:
    _require_graph(g)
    if k < 1 or k > g.size:
        return False
    e = g.rel("E")
    return any(all((a, b) in e for a, b in itertools.combinations(sub, 2))
               for sub in itertools.combinations(range(g.size), k))
