"""Open formulas: AST, canonical text form, evaluation, extensions and existential model checking."""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

from .model import BudgetExceeded, RelSymbol, Structure, lg

#: default cap on the number of assignments ``extension`` will enumerate
EXTENSION_BUDGET = 2_000_000


@dataclass(frozen=True)
class Eq:
    left: int
    right: int


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple[int, ...]


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    children: tuple["Formula", ...]

    def __post_init__(self):
        if not self.children:
            raise ValueError("And needs at least one child")


@dataclass(frozen=True)
class Or:
    children: tuple["Formula", ...]

    def __post_init__(self):
        if not self.children:
            raise ValueError("Or needs at least one child")


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)

Formula = Union[Eq, Rel, Not, And, Or, Const]
Atom = Union[Eq, Rel]


@dataclass(frozen=True)
class ExistSentence:
    var_count: int
    matrix: Formula

    def __post_init__(self):
        if self.var_count < 1:
            raise ValueError("an existential sentence binds at least one variable")
        used = variables(self.matrix)
        if used and max(used) > self.var_count:
            raise ValueError(f"matrix mentions x{max(used)} but only {self.var_count} variables are bound")


# -- construction helpers (constant folding only) -------------------------

def neg(f: Formula) -> Formula:
    if isinstance(f, Const):
        return FALSE if f.value else TRUE
    return Not(f)


def conj(*fs: Formula) -> Formula:
    kids = []
    for f in fs:
        if f == FALSE:
            return FALSE
        if f != TRUE:
            kids.append(f)
    if not kids:
        return TRUE
    return kids[0] if len(kids) == 1 else And(tuple(kids))


def disj(*fs: Formula) -> Formula:
    kids = []
    for f in fs:
        if f == TRUE:
            return TRUE
        if f != FALSE:
            kids.append(f)
    if not kids:
        return FALSE
    return kids[0] if len(kids) == 1 else Or(tuple(kids))


def neq(i: int, j: int) -> Formula:
    return Not(Eq(i, j))


# -- syntactic measures ---------------------------------------------------

def atoms(f: Formula) -> Iterator[Atom]:
    """Atom occurrences, left to right."""
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, (Eq, Rel)):
            yield g
        elif isinstance(g, Not):
            stack.append(g.child)
        elif isinstance(g, (And, Or)):
            stack.extend(reversed(g.children))


def variables(f: Formula) -> set[int]:
    out: set[int] = set()
    for a in atoms(f):
        if isinstance(a, Eq):
            out.update((a.left, a.right))
        else:
            out.update(a.args)
    return out


def literal_count(f: Formula) -> int:
    return sum(1 for _ in atoms(f))


def formula_size(f: Formula | ExistSentence, vocab: Sequence[RelSymbol] | Structure) -> float:
    """relcount * log|tau| + varcount * log(var#).

    Equality is not a relation symbol but its variable occurrences count.
    Constants are measured by their printed form (``x1=x1``).
    """
    if isinstance(vocab, Structure):
        vocab = vocab.vocabulary
    if isinstance(f, ExistSentence):
        f = f.matrix
    names = {r.name for r in vocab}
    relcount = varcount = 0
    distinct: set[int] = set()
    for a in atoms(f):
        if isinstance(a, Rel):
            if a.name not in names:
                raise KeyError(f"relation symbol {a.name} not in vocabulary")
            relcount += 1
            varcount += len(a.args)
            distinct.update(a.args)
        else:
            varcount += 2
            distinct.update((a.left, a.right))
    if isinstance(f, Const):
        varcount, distinct = 2, {1}
    return relcount * lg(len(vocab)) + varcount * lg(len(distinct))


# -- canonical text -------------------------------------------------------

def _var(i: int) -> str:
    return f"x{i}"


def to_text(f: Formula) -> str:
    if isinstance(f, Const):
        return "x1=x1" if f.value else "x1!=x1"
    return _fmt(f)


def _fmt(f: Formula) -> str:
    if isinstance(f, Eq):
        return f"{_var(f.left)}={_var(f.right)}"
    if isinstance(f, Rel):
        return f"{f.name}({','.join(map(_var, f.args))})"
    if isinstance(f, Const):
        return "(" + to_text(f) + ")"
    if isinstance(f, Not):
        c = f.child
        if isinstance(c, Eq):
            return f"{_var(c.left)}!={_var(c.right)}"
        if isinstance(c, Rel):
            return "~" + _fmt(c)
        if isinstance(c, Not):
            return "~" + _fmt(c)
        return "~(" + _fmt(c) + ")"
    sep = " & " if isinstance(f, And) else " | "
    parts = []
    for c in f.children:
        s = _fmt(c)
        if isinstance(c, (And, Or)):
            s = "(" + s + ")"
        parts.append(s)
    return sep.join(parts)


def sentence_to_text(phi: ExistSentence) -> str:
    bound = ",".join(_var(i) for i in range(1, phi.var_count + 1))
    return f"exists {bound} . {to_text(phi.matrix)}"


class FormulaSyntaxError(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(!=)|([A-Za-z_][A-Za-z0-9_]*)|(.))")
_VAR = re.compile(r"x([1-9][0-9]*)$")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[str] = []
        for m in _TOKEN.finditer(text):
            tok = m.group(1) or m.group(2) or m.group(3)
            if tok and not tok.isspace():
                self.toks.append(tok)
        self.pos = 0

    def peek(self, k: int = 0) -> str | None:
        i = self.pos + k
        return self.toks[i] if i < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise FormulaSyntaxError(f"unexpected end of input in {self.text!r}")
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, got {tok!r}")
        self.pos += 1
        return tok

    def var(self) -> int:
        tok = self.take()
        m = _VAR.match(tok)
        if not m:
            raise FormulaSyntaxError(f"expected a variable x<N>, got {tok!r}")
        return int(m.group(1))

    def formula(self) -> Formula:
        kids = [self.term()]
        while self.peek() == "|":
            self.take()
            kids.append(self.term())
        return kids[0] if len(kids) == 1 else Or(tuple(kids))

    def term(self) -> Formula:
        kids = [self.factor()]
        while self.peek() == "&":
            self.take()
            kids.append(self.factor())
        return kids[0] if len(kids) == 1 else And(tuple(kids))

    def factor(self) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.factor())
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok is not None and self.peek(1) == "(":
            name = self.take()
            self.take("(")
            args = [self.var()]
            while self.peek() == ",":
                self.take()
                args.append(self.var())
            self.take(")")
            return Rel(name, tuple(args))
        left = self.var()
        op = self.take()
        if op == "=":
            return Eq(left, self.var())
        if op == "!=":
            return Not(Eq(left, self.var()))
        raise FormulaSyntaxError(f"expected '=' or '!=', got {op!r}")

    def done(self):
        if self.peek() is not None:
            raise FormulaSyntaxError(f"trailing input at {self.peek()!r}")


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    p.done()
    return f


def parse_sentence(text: str) -> ExistSentence:
    head, sep, body = text.partition(".")
    words = head.split(None, 1)
    if not sep or len(words) != 2 or words[0] != "exists":
        raise FormulaSyntaxError("expected 'exists x1,...,xl . formula'")
    names = [v.strip() for v in words[1].split(",")]
    for i, name in enumerate(names, 1):
        if name != _var(i):
            raise FormulaSyntaxError(f"bound variables must be x1..xl in order, got {name!r}")
    return ExistSentence(len(names), parse_formula(body))


# -- semantics ------------------------------------------------------------

Evaluator = Callable[[Sequence[int]], bool]


def compile_formula(s: Structure, f: Formula) -> Evaluator:
    """Turn ``f`` into a closure over assignments (index i holds x(i+1))."""
    names = {sym.name: sym for sym in s.relations}
    if isinstance(f, Const):
        v = f.value
        return lambda a: v
    if isinstance(f, Eq):
        i, j = f.left - 1, f.right - 1
        return lambda a: a[i] == a[j]
    if isinstance(f, Rel):
        sym = names.get(f.name)
        if sym is None:
            raise KeyError(f"unknown relation symbol {f.name}")
        if sym.arity != len(f.args):
            raise ValueError(f"{f.name} has arity {sym.arity}, used with {len(f.args)} arguments")
        rel = s.relations[sym]
        idx = tuple(k - 1 for k in f.args)
        if len(idx) == 1:
            (i,) = idx
            return lambda a: (a[i],) in rel
        if len(idx) == 2:
            i, j = idx
            return lambda a: (a[i], a[j]) in rel
        return lambda a: tuple(a[k] for k in idx) in rel
    if isinstance(f, Not):
        g = compile_formula(s, f.child)
        return lambda a: not g(a)
    kids = [compile_formula(s, c) for c in f.children]
    if isinstance(f, And):
        return lambda a: all(k(a) for k in kids)
    return lambda a: any(k(a) for k in kids)


def eval_open(s: Structure, f: Formula, a: Sequence[int]) -> bool:
    used = variables(f)
    if used and max(used) > len(a):
        raise ValueError(f"assignment of length {len(a)} does not cover x{max(used)}")
    for v in a:
        if not 0 <= v < s.size:
            raise ValueError(f"assignment value {v} outside the domain")
    return compile_formula(s, f)(a)


def extension(s: Structure, f: Formula, m: int, budget: int = EXTENSION_BUDGET) -> frozenset[tuple[int, ...]]:
    used = variables(f)
    if used and max(used) > m:
        raise ValueError(f"formula mentions x{max(used)} but m = {m}")
    if s.size ** m > budget:
        raise BudgetExceeded(f"|A|^m = {s.size}^{m} exceeds the enumeration budget {budget}")
    ev = compile_formula(s, f)
    return frozenset(a for a in itertools.product(range(s.size), repeat=m) if ev(a))


def _conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, And):
        out = []
        for c in f.children:
            out.extend(_conjuncts(c))
        return out
    return [f]


def mc_exists(s: Structure, phi: ExistSentence) -> tuple[bool, tuple[int, ...] | None]:
    """Backtracking search for the lexicographically least satisfying assignment.

    Top-level conjuncts are checked as soon as their last variable is bound.
    """
    l = phi.var_count
    checks: list[list[Evaluator]] = [[] for _ in range(l + 1)]
    for c in _conjuncts(phi.matrix):
        used = variables(c)
        checks[max(used) if used else 0].append(compile_formula(s, c))
    if not all(ev(()) for ev in checks[0]):
        return False, None

    a = [0] * l
    n = s.size

    def extend(depth: int) -> bool:
        here = checks[depth + 1]
        for v in range(n):
            a[depth] = v
            if all(ev(a) for ev in here):
                if depth + 1 == l or extend(depth + 1):
                    return True
        return False

    if extend(0):
        return True, tuple(a)
    return False, None
