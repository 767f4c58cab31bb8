"""Statistics on finite models: sufficiency, completeness, ancillarity, Basu,
the informativeness preorder, minimal sufficiency and Bahadur.

A model is a FinStoch kernel ``p: Theta -> X``; a statistic is a deterministic
kernel ``s: X -> V``.  Every decision procedure returns a certificate that can be
re-checked by exact kernel arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from . import finprob as fp
from . import linalg
from . import matcat as mc
from .core import FAIL, PASS, VACUOUS, LawReport, is_deterministic
from .errors import NotDeterministic, SizeBoundExceeded, TypeMismatch
from .matcat import FinSet, Kernel

DEFAULT_ENUMERATION_BOUND = 8


@dataclass(frozen=True)
class StatModel:
    p: Kernel

    def __post_init__(self):
        fp.require_prob(self.p)

    @property
    def theta(self) -> FinSet:
        return self.p.dom

    @property
    def X(self) -> FinSet:
        return self.p.cod


@dataclass(frozen=True)
class Statistic:
    s: Kernel

    def __post_init__(self):
        fp.require_prob(self.s)
        if not is_deterministic(self.s):
            raise NotDeterministic("a statistic must be deterministic")

    @property
    def V(self) -> FinSet:
        return self.s.cod

    @property
    def assignment(self) -> tuple[int, ...]:
        """Index of ``s(x)`` in ``V`` for each ``x`` in order."""
        return tuple(int(np.argmax(self.s.numerators[:, j] != 0)) for j in range(self.s.dom.size))

    def __call__(self, x):
        return self.V.elements[self.assignment[self.s.dom.index(x)]]


def as_model(p) -> StatModel:
    return p if isinstance(p, StatModel) else StatModel(p)


def as_statistic(s) -> Statistic:
    return s if isinstance(s, Statistic) else Statistic(s)


def partition_statistic(X: FinSet, assignment: Sequence[int]) -> Statistic:
    """Block-indicator statistic ``x -> assignment[x]`` onto ``{0, ..., k-1}``."""
    k = max(assignment) + 1 if assignment else 1
    V = FinSet.range(k)
    return Statistic(mc.from_function(dict(zip(X.elements, assignment)), X, V))


# -- sufficiency -------------------------------------------------------------
@dataclass(frozen=True)
class SufficiencyWitness:
    """``alpha: V -> X`` with ``alpha.s.p = p``; also the Fisher-Neyman factors."""

    alpha: Kernel
    h: tuple[Fraction, ...]
    g: Kernel

    def factorization_holds(self, p: Kernel, s: Kernel) -> bool:
        """``p(x|theta) = h(x) g_theta(s(x))`` entrywise."""
        st = as_statistic(s)
        asg = st.assignment
        E, G = p.entries, self.g.entries
        return all(E[x, t] == self.h[x] * G[asg[x], t] for x in range(p.cod.size) for t in range(p.dom.size))


def _sufficient_alpha(num: np.ndarray, asg: Sequence[int], nv: int) -> list[list[Fraction]] | None:
    """Columns of ``alpha`` or ``None``.  ``num`` holds integer numerators ``x`` by ``theta``."""
    nx, nt = num.shape
    fibers = [[x for x in range(nx) if asg[x] == v] for v in range(nv)]
    cols = []
    for v, fib in enumerate(fibers):
        totals = [sum(num[x, t] for x in fib) for t in range(nt)]
        charged = [t for t in range(nt) if totals[t] != 0]
        col = [Fraction(0)] * nx
        if not charged:
            support = fib or range(nx)
            for x in support:
                col[x] = Fraction(1, len(support))
            cols.append(col)
            continue
        t0 = charged[0]
        for t in charged[1:]:
            if any(num[x, t] * totals[t0] != num[x, t0] * totals[t] for x in fib):
                return None
        for x in fib:
            col[x] = Fraction(num[x, t0], totals[t0])
        cols.append(col)
    return cols


def is_sufficient(model, s) -> SufficiencyWitness | None:
    """Fiber-normalized columns of ``p`` must not depend on ``theta`` wherever charged."""
    m, st = as_model(model), as_statistic(s)
    p = m.p
    if st.s.dom != p.cod:
        raise TypeMismatch("statistic domain differs from the model's sample space")
    cols = _sufficient_alpha(p.numerators, st.assignment, st.V.size)
    if cols is None:
        return None
    alpha = fp._kernel_from_cols(st.V, p.cod, cols)
    asg = st.assignment
    h = tuple(alpha.entries[x, asg[x]] for x in range(p.cod.size))
    return SufficiencyWitness(alpha, h, mc.compose(st.s, p))


def sufficiency_sides(p: Kernel, s: Kernel, alpha: Kernel) -> tuple[Kernel, Kernel]:
    """``(s (x) id).copy.p`` and ``(id (x) alpha).copy.s.p``, both ``Theta -> V (x) X``."""
    X, V = p.cod, s.cod
    left = mc.compose(mc.tensor(s, mc.identity(X)), mc.compose(mc.copy(X), p))
    sp = mc.compose(s, p)
    right = mc.compose(mc.tensor(mc.identity(V), alpha), mc.compose(mc.copy(V), sp))
    return left, right


# -- completeness ---------------------------------------------------------------
@dataclass(frozen=True)
class Complete:
    rank: int
    support_size: int

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class CompletenessCounterexample:
    """Two tests ``g, h: V -> {0,1}`` with ``g.f = h.f`` that differ on the support."""

    beta: tuple[int, ...]
    epsilon: Fraction
    g: Kernel
    h: Kernel

    def __bool__(self) -> bool:
        return False

    def difference_row(self) -> tuple[Fraction, ...]:
        """Row of ``g - h`` at outcome ``1``; equals ``2 * epsilon * beta``."""
        return tuple(self.g.entries[1] - self.h.entries[1])


def is_complete(f: Kernel) -> Complete | CompletenessCounterexample:
    """Exact rank test of the support rows of ``f``; on failure a certificate from a left null vector."""
    fp.require_prob(f)
    sup = fp.support(f).indices
    R = [list(f.entries[i]) for i in sup]
    r = linalg.rank(R)
    if r == len(sup):
        return Complete(r, len(sup))
    b_sup = linalg.primitive(linalg.left_nullspace(R)[0])
    beta = [0] * f.cod.size
    for i, b in zip(sup, b_sup):
        beta[i] = b
    eps = Fraction(1, 2 * max(abs(b) for b in beta))
    half = Fraction(1, 2)
    two = FinSet.of([0, 1])
    g = Kernel(mc.FINSTOCH, f.cod, two, [[half - eps * b for b in beta], [half + eps * b for b in beta]])
    h = Kernel(mc.FINSTOCH, f.cod, two, [[half + eps * b for b in beta], [half - eps * b for b in beta]])
    return CompletenessCounterexample(tuple(beta), eps, g, h)


# -- ancillarity and Basu ---------------------------------------------------------
def is_ancillary(model, a) -> bool:
    m, st = as_model(model), as_statistic(a)
    if st.s.dom != m.p.cod:
        raise TypeMismatch("statistic domain differs from the model's sample space")
    ap = mc.compose(st.s, m.p)
    N = ap.numerators
    return all(np.array_equal(N[:, 0], N[:, j]) for j in range(1, N.shape[1]))


def check_basu(model, s, a) -> LawReport:
    """Complete sufficient ``s`` and ancillary ``a`` give independent ``s(X)`` and ``a(X)`` for each ``theta``."""
    m, ss, aa = as_model(model), as_statistic(s), as_statistic(a)
    if ss.s.dom != m.p.cod or aa.s.dom != m.p.cod:
        raise TypeMismatch("statistics must share the model's sample space")
    if is_sufficient(m, ss) is None:
        return LawReport("basu", VACUOUS, detail="sufficiency", data={"failed": "sufficiency"})
    sp = mc.compose(ss.s, m.p)
    if not is_complete(sp):
        return LawReport("basu", VACUOUS, detail="completeness", data={"failed": "completeness"})
    if not is_ancillary(m, aa):
        return LawReport("basu", VACUOUS, detail="ancillarity", data={"failed": "ancillarity"})
    X = m.p.cod
    joint = mc.compose(mc.tensor(ss.s, aa.s), mc.compose(mc.copy(X), m.p))
    verdict = fp.ci_proc(joint)
    if verdict:
        return LawReport("basu", PASS, data={"joint": joint, "sp": sp, "ap": mc.compose(aa.s, m.p)})
    product = fp.recompose_proc(sp, mc.compose(aa.s, m.p))
    return LawReport("basu", FAIL, {"joint": joint, "product": product}, "joint does not factor")


# -- preorder, minimality, Bahadur ------------------------------------------------
@dataclass(frozen=True)
class ComparisonWitness:
    """Deterministic ``c: V -> W`` with ``t = c.s`` almost surely."""

    c: Kernel


def statistic_leq(model, s, t) -> ComparisonWitness | None:
    """Decide ``t <= s``: whether ``t`` is a function of ``s`` on the support of ``p``."""
    m, ss, tt = as_model(model), as_statistic(s), as_statistic(t)
    if ss.s.dom != m.p.cod or tt.s.dom != m.p.cod:
        raise TypeMismatch("statistics must share the model's sample space")
    sa, ta = ss.assignment, tt.assignment
    table: dict[int, int] = {}
    for x in fp.support(m.p).indices:
        if table.setdefault(sa[x], ta[x]) != ta[x]:
            return None
    V, W = ss.V, tt.V
    c = mc.from_function({V.elements[v]: W.elements[table.get(v, 0)] for v in range(V.size)}, V, W)
    return ComparisonWitness(c)


def _proportional(num: np.ndarray, x: int, y: int) -> bool:
    nt = num.shape[1]
    return all(num[x, a] * num[y, b] == num[y, a] * num[x, b] for a in range(nt) for b in range(a + 1, nt))


def minimal_sufficient(model) -> Statistic:
    """Partition the support by proportional likelihood vectors; off-support points share one extra block."""
    m = as_model(model)
    num = m.p.numerators
    sup = fp.support(m.p).indices
    reps: list[int] = []
    asg = [-1] * m.p.cod.size
    for x in sup:
        for b, r in enumerate(reps):
            if _proportional(num, x, r):
                asg[x] = b
                break
        else:
            asg[x] = len(reps)
            reps.append(x)
    off = len(reps)
    asg = [off if b < 0 else b for b in asg]
    return partition_statistic(m.p.cod, asg)


def set_partitions(n: int) -> Iterator[tuple[int, ...]]:
    """All set partitions of ``range(n)`` as restricted growth strings."""
    if n == 0:
        yield ()
        return
    a = [0] * n

    def rec(i: int, top: int):
        if i == n:
            yield tuple(a)
            return
        for v in range(top + 2):
            a[i] = v
            yield from rec(i + 1, max(top, v))

    yield from rec(1, 0)


def sufficient_partitions(model, bound: int = DEFAULT_ENUMERATION_BOUND) -> list[Statistic]:
    m = as_model(model)
    n = m.p.cod.size
    if n > bound:
        raise SizeBoundExceeded(f"|X| = {n} exceeds the enumeration bound {bound}")
    out = []
    for asg in set_partitions(n):
        nv = max(asg) + 1
        if _sufficient_alpha(m.p.numerators, asg, nv) is not None:
            out.append(partition_statistic(m.p.cod, asg))
    return out


def check_bahadur(model, s, bound: int = DEFAULT_ENUMERATION_BOUND) -> LawReport:
    """A complete sufficient ``s`` lies below every sufficient partition of ``X``."""
    m, ss = as_model(model), as_statistic(s)
    if m.p.cod.size > bound:
        raise SizeBoundExceeded(f"|X| = {m.p.cod.size} exceeds the enumeration bound {bound}")
    if is_sufficient(m, ss) is None:
        return LawReport("bahadur", VACUOUS, detail="sufficiency", data={"failed": "sufficiency"})
    if not is_complete(mc.compose(ss.s, m.p)):
        return LawReport("bahadur", VACUOUS, detail="completeness", data={"failed": "completeness"})
    candidates = sufficient_partitions(m, bound)
    for t in candidates:
        if statistic_leq(m, t, ss) is None:
            return LawReport("bahadur", FAIL, {"s": ss.s, "t": t.s}, "s is not below a sufficient partition")
    return LawReport("bahadur", PASS, detail=f"{len(candidates)} sufficient partitions checked")
