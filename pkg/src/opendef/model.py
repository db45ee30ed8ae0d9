"""Relational structures, target relations, the instance file format and size measures."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

Tuple_ = tuple[int, ...]


class InstanceError(ValueError):
    """Malformed or inconsistent instance."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the configured budget."""


@dataclass(frozen=True, order=True)
class RelSymbol:
    name: str
    arity: int

    def __post_init__(self):
        if self.arity < 1:
            raise InstanceError(f"relation {self.name} must have positive arity")


@dataclass(frozen=True, eq=True)
class Structure:
    """A finite relational structure over the domain ``0 .. size-1``.

    ``relations`` maps each symbol to its set of tuples; the mapping's
    insertion order is the vocabulary order.
    """

    size: int
    relations: Mapping[RelSymbol, frozenset[Tuple_]] = field(default_factory=dict)

    def __post_init__(self):
        if self.size < 1:
            raise InstanceError("domain must be nonempty")
        names = set()
        for sym, tuples in self.relations.items():
            if sym.name in names:
                raise InstanceError(f"duplicate relation symbol {sym.name}")
            names.add(sym.name)
            for t in tuples:
                _check_tuple(t, sym.arity, self.size, sym.name)
        object.__setattr__(self, "relations",
                           {s: frozenset(ts) for s, ts in self.relations.items()})

    def __hash__(self):
        return hash((self.size, frozenset(self.relations.items())))

    @property
    def vocabulary(self) -> tuple[RelSymbol, ...]:
        return tuple(self.relations)

    def symbol(self, name: str) -> RelSymbol:
        for sym in self.relations:
            if sym.name == name:
                return sym
        raise KeyError(name)

    def rel(self, name: str) -> frozenset[Tuple_]:
        return self.relations[self.symbol(name)]

    def domain(self) -> range:
        return range(self.size)


@dataclass(frozen=True)
class Target:
    arity: int
    tuples: tuple[Tuple_, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise InstanceError("target arity must be positive")
        # dedupe, keep first-occurrence (input) order
        seen: dict[Tuple_, None] = {}
        for t in self.tuples:
            t = tuple(t)
            if len(t) != self.arity:
                raise InstanceError(f"target tuple {t} has length {len(t)}, expected {self.arity}")
            seen.setdefault(t, None)
        object.__setattr__(self, "tuples", tuple(seen))

    @property
    def tupleset(self) -> frozenset[Tuple_]:
        return frozenset(self.tuples)

    def __len__(self) -> int:
        return len(self.tuples)

    def validate(self, s: Structure) -> None:
        for t in self.tuples:
            _check_tuple(t, self.arity, s.size, "target")


@dataclass(frozen=True)
class SizeReport:
    size_vocab: float
    size_structure: float
    size_instance: float


def _check_tuple(t: Tuple_, arity: int, size: int, what: str, line: int | None = None):
    if len(t) != arity:
        raise InstanceError(f"arity mismatch ({what} expects {arity}, got {len(t)})", line)
    for e in t:
        if not 0 <= e < size:
            raise InstanceError(f"element {e} out of range", line)


def structure(size: int, relations: Mapping[str | RelSymbol, Iterable[Iterable[int]]] | None = None,
              arities: Mapping[str, int] | None = None) -> Structure:
    """Convenience constructor; arities are inferred from the first tuple when not given."""
    rels: dict[RelSymbol, frozenset[Tuple_]] = {}
    for key, tuples in (relations or {}).items():
        tuples = [tuple(t) for t in tuples]
        if isinstance(key, RelSymbol):
            sym = key
        else:
            if arities and key in arities:
                ar = arities[key]
            elif tuples:
                ar = len(tuples[0])
            else:
                raise InstanceError(f"cannot infer arity of empty relation {key}")
            sym = RelSymbol(key, ar)
        rels[sym] = frozenset(tuples)
    return Structure(size, rels)


def graph(size: int, edges: Iterable[tuple[int, int]]) -> Structure:
    """Undirected graph: each edge is added in both directions."""
    e = set()
    for a, b in edges:
        e.add((a, b))
        e.add((b, a))
    return Structure(size, {RelSymbol("E", 2): frozenset(e)})


def is_graph(s: Structure) -> bool:
    if [(sym.name, sym.arity) for sym in s.relations] != [("E", 2)]:
        return False
    e = s.rel("E")
    return all(a != b and (b, a) in e for a, b in e)


def lg(x: float) -> float:
    """Base-2 log under the ``max{log x, 1}`` convention."""
    if x <= 2:
        return 1.0
    return math.log2(x)


def size_measures(s: Structure, t: Target) -> SizeReport:
    voc = s.vocabulary
    size_vocab = (len(voc) + sum(r.arity for r in voc)) * lg(len(voc))
    body = s.size + sum(r.arity * len(ts) for r, ts in s.relations.items())
    size_structure = size_vocab + body * lg(s.size)
    size_instance = (size_structure + t.arity * len(t)) * lg(s.size)
    return SizeReport(size_vocab, size_structure, size_instance)


def size_instance_expanded(s: Structure, t: Target) -> float:
    """Instance size under the expansion used for the hard family,
    ``size(A) + (|A| + sum ar(R)|R| + m|T|) log|A|``.
    """
    voc = s.vocabulary
    size_vocab = (len(voc) + sum(r.arity for r in voc)) * lg(len(voc))
    body = s.size + sum(r.arity * len(ts) for r, ts in s.relations.items()) + t.arity * len(t)
    return size_vocab + body * lg(s.size)


def param_kappa(t: Target) -> int:
    return t.arity * len(t)


# -- instance file format -------------------------------------------------

def parse_instance(text: str) -> tuple[Structure, Target]:
    s, t, _ = _parse(text, require_target=True)
    return s, t


def parse_structure(text: str) -> tuple[Structure, Target | None, str | None]:
    """Parse a file whose target is optional; a trailing ``exists ...`` line
    (as written by ``reduce mc``) is returned verbatim as the third item.
    """
    return _parse(text, require_target=False)


def _parse(text: str, require_target: bool):
    sentence: str | None = None
    vocab: dict[str, RelSymbol] = {}
    rels: dict[str, set[Tuple_]] = {}
    size: int | None = None
    arity: int | None = None
    tups: list[Tuple_] = []

    def ints(parts: list[str], lineno: int) -> list[int]:
        try:
            return [int(p) for p in parts]
        except ValueError:
            raise InstanceError(f"expected integers, got {' '.join(parts)!r}", lineno) from None

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if sentence is not None:
            raise InstanceError("content after the sentence line", lineno)
        kw, *rest = line.split()
        if kw == "exists" and not require_target:
            sentence = line
        elif kw == "vocab":
            if size is not None:
                raise InstanceError("vocab after domain", lineno)
            if len(rest) != 2:
                raise InstanceError("usage: vocab NAME ARITY", lineno)
            name, (ar,) = rest[0], ints(rest[1:], lineno)
            if name in vocab:
                raise InstanceError(f"duplicate relation symbol {name}", lineno)
            if ar < 1:
                raise InstanceError(f"relation {name} must have positive arity", lineno)
            vocab[name] = RelSymbol(name, ar)
            rels[name] = set()
        elif kw == "domain":
            if size is not None:
                raise InstanceError("domain given twice", lineno)
            if len(rest) != 1:
                raise InstanceError("usage: domain N", lineno)
            (size,) = ints(rest, lineno)
            if size < 1:
                raise InstanceError("domain must be nonempty", lineno)
        elif kw == "rel":
            if size is None:
                raise InstanceError("rel before domain", lineno)
            if arity is not None:
                raise InstanceError("rel after target", lineno)
            if not rest or rest[0] not in vocab:
                raise InstanceError(f"unknown relation symbol {rest[0] if rest else ''!r}", lineno)
            sym = vocab[rest[0]]
            tup = tuple(ints(rest[1:], lineno))
            _check_tuple(tup, sym.arity, size, sym.name, lineno)
            rels[sym.name].add(tup)
        elif kw == "target":
            if size is None:
                raise InstanceError("target before structure", lineno)
            if arity is not None:
                raise InstanceError("target given twice", lineno)
            if len(rest) != 1:
                raise InstanceError("usage: target M", lineno)
            (arity,) = ints(rest, lineno)
            if arity < 1:
                raise InstanceError("target arity must be positive", lineno)
        elif kw == "tup":
            if arity is None:
                raise InstanceError("tup before target", lineno)
            tup = tuple(ints(rest, lineno))
            _check_tuple(tup, arity, size, "target", lineno)
            tups.append(tup)
        else:
            raise InstanceError(f"unknown keyword {kw!r}", lineno)

    if size is None:
        raise InstanceError("missing domain line")
    s = Structure(size, {vocab[n]: frozenset(ts) for n, ts in rels.items()})
    if arity is None:
        if require_target:
            raise InstanceError("missing target line")
        return s, None, sentence
    return s, Target(arity, tuple(tups)), sentence


def print_structure(s: Structure) -> str:
    lines = [f"vocab {r.name} {r.arity}" for r in s.vocabulary]
    lines.append(f"domain {s.size}")
    for r, ts in s.relations.items():
        lines.extend(f"rel {r.name} " + " ".join(map(str, t)) for t in sorted(ts))
    return "\n".join(lines) + "\n"


def print_instance(s: Structure, t: Target) -> str:
    lines = [print_structure(s).rstrip("\n"), f"target {t.arity}"]
    # target order is significant (it fixes the decider's search order)
    lines.extend("tup " + " ".join(map(str, tup)) for tup in t.tuples)
    return "\n".join(lines) + "\n"
