"""Deciding open definability through subisomorphism preservation.

A target ``T`` is open-definable in ``A`` iff every subisomorphism of ``A``
whose domain has at most ``m`` elements preserves ``T``.  ``decide`` only
searches maps defined on the entry set of some target tuple;
``decide_naive_slice`` enumerates every partial injection of size at most
``m`` and serves as the independent oracle.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .model import BudgetExceeded, Structure, Target

#: default cap on sum_l l! * C(|A|, l)^2 for the naive oracle
NAIVE_BUDGET = 5_000_000


@dataclass(frozen=True)
class PartialInjection:
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple(sorted(dict(self.pairs).items()))
        if len(pairs) != len(self.pairs):
            raise ValueError("a key is mapped twice")
        if len({v for _, v in pairs}) != len(pairs):
            raise ValueError("map is not injective")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_dict(cls, d: Mapping[int, int]) -> "PartialInjection":
        return cls(tuple(d.items()))

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __call__(self, t: tuple[int, ...]) -> tuple[int, ...]:
        d = dict(self.pairs)
        return tuple(d[e] for e in t)


@dataclass(frozen=True)
class Witness:
    source: tuple[int, ...]
    map: PartialInjection
    image: tuple[int, ...]

    def to_text(self) -> str:
        pairs = ", ".join(f"{k}>{v}" for k, v in self.map.pairs)
        return (f"witness: {' '.join(map(str, self.source))} -> "
                f"{' '.join(map(str, self.image))} ; map: {pairs}")


@dataclass(frozen=True)
class Verdict:
    definable: bool
    witness: Witness | None = None
    maps_inspected: int = field(default=0, compare=False)


def is_subiso(s: Structure, g: PartialInjection | Mapping[int, int]) -> bool:
    d = g.as_dict() if isinstance(g, PartialInjection) else dict(g)
    if len(set(d.values())) != len(d):
        return False
    dom = tuple(d)
    for sym, rel in s.relations.items():
        for t in itertools.product(dom, repeat=sym.arity):
            if (t in rel) != (tuple(d[e] for e in t) in rel):
                return False
    return True


def preserves(g: PartialInjection | Mapping[int, int], t: Target) -> bool:
    d = g.as_dict() if isinstance(g, PartialInjection) else dict(g)
    tset = t.tupleset
    for tup in t.tuples:
        if all(e in d for e in tup) and tuple(d[e] for e in tup) not in tset:
            return False
    return True


# -- pruned search --------------------------------------------------------

class _Extender:
    """Incremental subisomorphism test for maps built one element at a time.

    When ``a -> b`` is added to a map with domain ``dom``, only tuples over
    ``dom + [a]`` that mention ``a`` need checking.
    """

    def __init__(self, s: Structure):
        self.n = s.size
        self.rels = [(sym.arity, rel) for sym, rel in s.relations.items()]
        self._patterns: dict[tuple[int, int], list[tuple[int, ...]]] = {}

    def patterns(self, k: int, arity: int) -> list[tuple[int, ...]]:
        # index tuples over positions 0..k whose entries include position k
        key = (k, arity)
        pats = self._patterns.get(key)
        if pats is None:
            pats = [p for p in itertools.product(range(k + 1), repeat=arity) if k in p]
            self._patterns[key] = pats
        return pats

    def consistent(self, dom: list[int], img: list[int]) -> bool:
        k = len(dom) - 1
        for arity, rel in self.rels:
            if not rel:
                continue
            for p in self.patterns(k, arity):
                src = tuple(dom[i] for i in p)
                dst = tuple(img[i] for i in p)
                if (src in rel) != (dst in rel):
                    return False
        return True

    def subisos(self, dom: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        """Images of every subisomorphism defined on ``dom``, lexicographically."""
        l = len(dom)
        d = list(dom)
        img: list[int] = []
        used = [False] * self.n

        def rec(i: int) -> Iterator[tuple[int, ...]]:
            if i == l:
                yield tuple(img)
                return
            for b in range(self.n):
                if used[b]:
                    continue
                img.append(b)
                if self.consistent(d[: i + 1], img):
                    used[b] = True
                    yield from rec(i + 1)
                    used[b] = False
                img.pop()

        return rec(0)


def _entry_set(tup: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sorted(set(tup)))


def _scan_domain(s: Structure, dom: tuple[int, ...], sources: list[tuple[int, ...]],
                 tset: frozenset) -> tuple[int, list[tuple[int, tuple[int, ...]] | None]]:
    """Enumerate all subisos on ``dom``; for each source tuple record the
    1-based position and images of the first map sending it outside ``tset``.
    """
    ext = _Extender(s)
    first: list[tuple[int, tuple[int, ...]] | None] = [None] * len(sources)
    pending = len(sources)
    count = 0
    for img in ext.subisos(dom):
        count += 1
        if not pending:
            continue
        m = dict(zip(dom, img))
        for i, src in enumerate(sources):
            if first[i] is None and tuple(m[e] for e in src) not in tset:
                first[i] = (count, img)
                pending -= 1
    return count, first


def decide(s: Structure, t: Target, threads: int = 1) -> Verdict:
    """Search target tuples in input order; for each, candidate maps on its
    distinct entries in lexicographic order of images.  The first subiso that
    moves a target tuple outside ``T`` is returned as the witness.

    ``maps_inspected`` counts distinct complete subisomorphisms enumerated
    (maps on an entry set already exhausted are not re-counted).  With
    ``threads > 1`` entry sets are scanned in worker processes; the verdict,
    witness and count are identical to the sequential run.
    """
    t.validate(s)
    if not t.tuples:
        return Verdict(True, None, 0)
    if threads > 1:
        return _decide_parallel(s, t, threads)

    tset = t.tupleset
    ext = _Extender(s)
    done: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    inspected = 0
    for src in t.tuples:
        dom = _entry_set(src)
        if dom in done:
            maps: Iterator[tuple[int, ...]] = iter(done[dom])
            fresh = None
        else:
            maps = ext.subisos(dom)
            fresh = done.setdefault(dom, [])
        for img in maps:
            if fresh is not None:
                fresh.append(img)
                inspected += 1
            m = dict(zip(dom, img))
            out = tuple(m[e] for e in src)
            if out not in tset:
                w = Witness(src, PartialInjection(tuple(m.items())), out)
                return Verdict(False, w, inspected)
    return Verdict(True, None, inspected)


def _decide_parallel(s: Structure, t: Target, threads: int) -> Verdict:
    tset = t.tupleset
    groups: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for src in t.tuples:
        groups.setdefault(_entry_set(src), []).append(src)
    doms = list(groups)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_scan_domain, s, d, groups[d], tset) for d in doms]
        results = dict(zip(doms, (f.result() for f in futures)))

    # replay the sequential order to pick the witness and the count
    progress: dict[tuple[int, ...], int] = {}
    for src in t.tuples:
        dom = _entry_set(src)
        total, first = results[dom]
        hit = first[groups[dom].index(src)]
        if hit is None:
            progress[dom] = total
            continue
        pos, img = hit
        progress[dom] = max(progress.get(dom, 0), pos)
        m = dict(zip(dom, img))
        w = Witness(src, PartialInjection(tuple(m.items())), tuple(m[e] for e in src))
        return Verdict(False, w, sum(progress.values()))
    return Verdict(True, None, sum(progress.values()))


# -- naive oracle ---------------------------------------------------------

def naive_count(domain_size: int, m: int) -> int:
    return sum(math.factorial(l) * math.comb(domain_size, l) ** 2
               for l in range(1, min(m, domain_size) + 1))


def partial_injections(n: int, l: int) -> Iterator[dict[int, int]]:
    """Every bijection between two l-subsets of ``range(n)``."""
    for src in itertools.combinations(range(n), l):
        for dst in itertools.combinations(range(n), l):
            for perm in itertools.permutations(dst):
                yield dict(zip(src, perm))


def decide_naive_slice(s: Structure, t: Target, budget: int = NAIVE_BUDGET) -> Verdict:
    t.validate(s)
    m = t.arity
    if naive_count(s.size, m) > budget:
        raise BudgetExceeded(f"{naive_count(s.size, m)} partial injections exceed budget {budget}")
    tset = t.tupleset
    inspected = 0
    witness = None
    for l in range(1, min(m, s.size) + 1):
        for g in partial_injections(s.size, l):
            inspected += 1
            if witness is not None:
                continue
            # preservation is cheap and usually vacuous; test it first
            for src in t.tuples:
                if all(e in g for e in src):
                    out = tuple(g[e] for e in src)
                    if out not in tset and is_subiso(s, g):
                        witness = Witness(src, PartialInjection(tuple(g.items())), out)
                        break
    return Verdict(witness is None, witness, inspected)
