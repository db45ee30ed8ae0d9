"""The exponential-definition family (A_n, T_n) and checks of its claimed properties.

Elements: a_i -> i-1, b_i -> n+i-1, c_i -> 2n+i-1, *_j -> 3n+j-1 (1-based i, j).
An n*n matrix M is flattened row-major, so entry (i, j) is variable
x_{(i-1)n + j}.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .decider import decide
from .formulas import Eq, Formula, Not, Rel, compile_formula, conj
from .model import BudgetExceeded, RelSymbol, Structure, Target
from .synthesizer import atom_diff

#: largest (n-1)^n for which beta is built
BETA_BUDGET = 2_000_000
#: largest number of candidate matrices alpha_satisfiers will enumerate
SATISFIER_BUDGET = 5_000_000

Matrix = tuple[int, ...]


@dataclass(frozen=True)
class HardInstance:
    n: int
    structure: Structure
    target: Target

    def a(self, i: int) -> int:
        return i - 1

    def b(self, i: int) -> int:
        return self.n + i - 1

    def c(self, i: int) -> int:
        return 2 * self.n + i - 1

    def star(self, j: int) -> int:
        return 3 * self.n + j - 1

    @property
    def m1(self) -> Matrix:
        return self.target.tuples[0]


def var(n: int, i: int, j: int) -> int:
    return (i - 1) * n + j


def _check_n(n: int):
    if n < 3:
        raise ValueError("the family is defined for n >= 3")


def matrix_m(n: int, j: int) -> list[list[int]]:
    """M_1 for j == 1, otherwise M_j, as a list of rows (1-based j)."""
    if j == 1:
        return [[i - 1] + [3 * n] * (n - 1) for i in range(1, n + 1)]
    rows = []
    for i in range(1, n + 1):
        row = [3 * n + j - 1] * n
        row[0] = n + i - 1
        row[j - 1] = 2 * n + i - 1
        rows.append(row)
    return rows


def gen_hard(n: int) -> HardInstance:
    _check_n(n)
    rel = {tuple(range(0, n)), tuple(range(n, 2 * n)), tuple(range(2 * n, 3 * n))}
    for j in range(1, n + 1):
        rel.update(tuple(row) for row in matrix_m(n, j))
    s = Structure(4 * n, {RelSymbol("R", n): frozenset(rel)})
    m1 = tuple(e for row in matrix_m(n, 1) for e in row)
    return HardInstance(n, s, Target(n * n, (m1,)))


def m_jbar(n: int, jbar: tuple[int, ...]) -> Matrix:
    """Row i taken from row i of M_{j_i}."""
    return tuple(e for i, j in enumerate(jbar) for e in matrix_m(n, j)[i])


def jbars(n: int):
    return itertools.product(range(2, n + 1), repeat=n)


def alpha(n: int, variant: str = "rows") -> Formula:
    """First column in R, plus every row in R (``rows``) or every column (``columns``)."""
    _check_n(n)
    first = Rel("R", tuple(var(n, i, 1) for i in range(1, n + 1)))
    if variant == "rows":
        rest = [Rel("R", tuple(var(n, i, j) for j in range(1, n + 1))) for i in range(1, n + 1)]
    elif variant == "columns":
        rest = [Rel("R", tuple(var(n, i, j) for i in range(1, n + 1))) for j in range(1, n + 1)]
    else:
        raise ValueError(f"unknown alpha variant {variant!r}")
    return conj(first, *rest)


def lam(n: int, jbar: tuple[int, ...]) -> Rel:
    if len(jbar) != n or not all(2 <= j <= n for j in jbar):
        raise ValueError(f"jbar must lie in {{2..{n}}}^{n}, got {jbar}")
    return Rel("R", tuple(var(n, i, j) for i, j in enumerate(jbar, 1)))


def beta(n: int, skip: tuple[int, ...] | None = None) -> Formula:
    _check_n(n)
    if (n - 1) ** n > BETA_BUDGET:
        raise BudgetExceeded(f"beta({n}) has {(n - 1) ** n} literals")
    return conj(*(Not(lam(n, jb)) for jb in jbars(n) if jb != skip))


def alpha_satisfiers(n: int, variant: str = "rows") -> set[Matrix]:
    """All matrices M with A_n |= alpha(M), by backtracking over R-tuples.

    ``rows``: pick the first column from R, then for each row an R-tuple
    starting with that row's first entry.
    """
    inst = gen_hard(n)
    rel = inst.structure.rel("R")
    if variant == "columns":
        out = set()
        for cols in itertools.product(sorted(rel), repeat=n):
            m = tuple(cols[j][i] for i in range(n) for j in range(n))
            out.add(m)
        return out
    by_first: dict[int, list[tuple[int, ...]]] = {}
    for t in sorted(rel):
        by_first.setdefault(t[0], []).append(t)
    out: set[Matrix] = set()
    for col in sorted(rel):
        choices = [by_first.get(e, []) for e in col]
        total = 1
        for c in choices:
            total *= len(c)
        if total > SATISFIER_BUDGET:
            raise BudgetExceeded(f"{total} candidate matrices for column {col}")
        for rows in itertools.product(*choices):
            out.add(tuple(e for row in rows for e in row))
    return out


def _holds(s: Structure, f: Formula, m: Matrix) -> bool:
    return compile_formula(s, f)(m)


def verify_family(n: int, variant: str = "rows") -> dict[str, object]:
    """Evaluate the family's claims at size n; returns ordered key -> value items."""
    inst = gen_hard(n)
    s, m1 = inst.structure, inst.m1
    a = alpha(n, variant)
    b = beta(n)
    sats = alpha_satisfiers(n, variant)
    ev_a, ev_b = compile_formula(s, a), compile_formula(s, b)
    mj = {jb: m_jbar(n, jb) for jb in jbars(n)}
    expected = {m1} | set(mj.values())
    r: dict[str, object] = {"n": n, "alpha": variant}

    r["literals_alpha"] = len(a.children) if hasattr(a, "children") else 1
    r["literals_beta"] = (n - 1) ** n
    r["alpha_satisfiers"] = len(sats)
    r["alpha_satisfiers_extra"] = len(sats - expected)
    r["alpha_satisfiers_missing"] = len(expected - sats)

    r["i_alpha_beta_M1"] = ev_a(m1) and ev_b(m1)
    survivors = sorted(m for m in sats if m != m1 and ev_b(m))
    r["ii_beta_excludes_others"] = not survivors
    r["ii_survivors"] = len(survivors)
    r["iii_decide_definable"] = decide(s, inst.target).definable

    load_bearing = True
    for jb, m in mj.items():
        if not (ev_a(m) and _holds(s, beta(n, skip=jb), m)):
            load_bearing = False
            break
    r["iv_each_lambda_load_bearing"] = load_bearing

    only_lambda = True
    lambda_present = True
    others = 0
    for jb, m in mj.items():
        rel_d, _ = atom_diff(s, m1, m)
        lam_j = lam(n, jb)
        only_lambda &= rel_d == [lam_j]
        lambda_present &= lam_j in rel_d
        others = max(others, sum(1 for d in rel_d if d != lam_j))
    r["v_reldiff_is_lambda"] = only_lambda
    r["v_lambda_among_reldiffs"] = lambda_present
    r["v_max_other_reldiffs"] = others

    jb2 = tuple([2] * n)
    _, eq_d = atom_diff(s, m1, mj[jb2])
    r["vi_eqdiff_count"] = len(eq_d)
    r["vi_eqdiff_has_x2_eq_x3"] = any(e.left == 2 and e.right == 3 for e in eq_d)

    probe_eqs = [Eq(var(n, i, 2), var(n, i, 3)) for i in range(1, n + 1)]
    ev_p = compile_formula(s, conj(*probe_eqs))
    probe_ext = {m for m in sats if ev_p(m)}
    r["vii_probe_literals"] = (len(a.children) if hasattr(a, "children") else 1) + n
    r["vii_probe_defines_target"] = probe_ext == {m1}
    return r


def report_lines(report: dict[str, object]) -> list[str]:
    def fmt(v):
        if isinstance(v, bool):
            return "true" if v else "false"
        return str(v)
    return [f"{k}: {fmt(v)}" for k, v in report.items()]
