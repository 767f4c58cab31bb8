"""Finite chains of deterministic connectors and natural transformations between them.

A chain over the index window ``[n0, n1]`` has objects ``X_n`` and connectors
``d_n: X_{n+1} -> X_n``, e.g. projections from longer to shorter histories.
Morphisms are families of kernels ``f_n: A_n -> X_n`` whose naturality squares
``d_n . f_{n+1} = f_n . e_n`` commute exactly.  Copy, delete and tensor act
index by index, which makes chains over one window into a Markov category.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import matcat as mc
from .core import FAIL, PASS, LawReport
from .errors import TypeMismatch
from .matcat import FinSet, Kernel


@dataclass(frozen=True)
class ChainDiagram:
    start: int
    objects: tuple[FinSet, ...]
    connectors: tuple[Kernel, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objects", tuple(self.objects))
        object.__setattr__(self, "connectors", tuple(self.connectors))
        if not self.objects:
            raise ValueError("a chain needs at least one object")

    @property
    def end(self) -> int:
        return self.start + len(self.objects) - 1

    @property
    def window(self) -> tuple[int, int]:
        return (self.start, self.end)

    def obj(self, n: int) -> FinSet:
        return self.objects[n - self.start]

    def connector(self, n: int) -> Kernel:
        """``d_n: X_{n+1} -> X_n``."""
        return self.connectors[n - self.start]


@dataclass(frozen=True)
class DiagramMorphism:
    source: ChainDiagram
    target: ChainDiagram
    components: tuple[Kernel, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.source.window != self.target.window:
            raise TypeMismatch("source and target windows differ")
        if len(self.components) != len(self.source.objects):
            raise TypeMismatch("one component per index is required")

    def component(self, n: int) -> Kernel:
        return self.components[n - self.source.start]

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiagramMorphism):
            return NotImplemented
        return (self.source, self.target, self.components) == (other.source, other.target, other.components)

    def __hash__(self) -> int:
        return hash((self.source, self.target, self.components))


def _pass_or_fail(law: str, failure) -> LawReport:
    if failure is None:
        return LawReport(law, PASS)
    detail, cex = failure
    return LawReport(law, FAIL, cex, detail)


def validate_diagram(d: ChainDiagram) -> LawReport:
    """Connectors have the right types and are deterministic."""
    from .core import is_deterministic

    failure = None
    if len(d.connectors) != len(d.objects) - 1:
        failure = ("wrong number of connectors", {"diagram": d})
    else:
        for n in range(d.start, d.end):
            c = d.connector(n)
            if c.dom != d.obj(n + 1) or c.cod != d.obj(n):
                failure = (f"connector {n} has the wrong type", {"connector": c})
                break
            if not is_deterministic(c):
                failure = (f"connector {n} is not deterministic", {"connector": c})
                break
    return _pass_or_fail("diagram", failure)


def validate_transformation(f: DiagramMorphism) -> LawReport:
    """Every naturality square commutes exactly."""
    src, tgt = f.source, f.target
    for n in range(src.start, src.end + 1):
        c = f.component(n)
        if c.dom != src.obj(n) or c.cod != tgt.obj(n):
            return LawReport("naturality", FAIL, {"component": c}, f"component {n} has the wrong type")
    for n in range(src.start, src.end):
        lhs = mc.compose(tgt.connector(n), f.component(n + 1))
        rhs = mc.compose(f.component(n), src.connector(n))
        if lhs != rhs:
            return LawReport("naturality", FAIL, {"lhs": lhs, "rhs": rhs}, f"square {n} does not commute")
    return LawReport("naturality", PASS)


def statistic_in_time(X: ChainDiagram, T: ChainDiagram, components: Sequence[Kernel]) -> LawReport:
    """``s_n: X_n -> T_n`` deterministic with ``t_n . s_{n+1} = s_n . d_n`` for all ``n``."""
    from .core import is_deterministic

    if X.window != T.window:
        raise TypeMismatch("process and statistic windows differ")
    f = DiagramMorphism(X, T, components)
    for n, s in enumerate(f.components, X.start):
        if not is_deterministic(s):
            return LawReport("statistic in time", FAIL, {"component": s}, f"s_{n} is not deterministic")
    rep = validate_transformation(f)
    return LawReport("statistic in time", rep.verdict, rep.counterexample, rep.detail)


# -- pointwise structure ---------------------------------------------------------
def constant_chain(X: FinSet, start: int, length: int, semiring=mc.FINSTOCH) -> ChainDiagram:
    return ChainDiagram(start, [X] * length, [mc.identity(X, semiring)] * (length - 1))


def chain_wire(chains: Sequence[ChainDiagram], out: Sequence[int], semiring=mc.FINSTOCH) -> DiagramMorphism:
    """Index-wise rewiring from ``chains[0] (x) ...`` to the chains named by ``out``."""
    if not chains:
        raise TypeMismatch("chain_wire needs at least one chain")
    start, length = chains[0].start, len(chains[0].objects)
    if any(c.window != chains[0].window for c in chains):
        raise TypeMismatch("chains over different windows")
    src = chain_tensor(chains, semiring)
    tgt = chain_tensor([chains[i] for i in out], semiring, start=start, length=length)
    comps = [mc.wire([c.objects[i] for c in chains], out, semiring) for i in range(length)]
    return DiagramMorphism(src, tgt, comps)


def chain_tensor(chains: Sequence[ChainDiagram], semiring=mc.FINSTOCH, *, start=None, length=None) -> ChainDiagram:
    if not chains:
        return constant_chain(FinSet.unit(), start, length, semiring)
    start, length = chains[0].start, len(chains[0].objects)
    objs = []
    for i in range(length):
        o = FinSet.unit()
        for c in chains:
            o = o * c.objects[i]
        objs.append(o)
    cons = [mc.tensor_all([c.connectors[i] for c in chains], semiring) for i in range(length - 1)]
    return ChainDiagram(start, objs, cons)


def pointwise(op: str, *args):
    """Apply a matrix operation at every index.

    ``tensor`` takes two chains or two morphisms, ``compose`` takes ``g, f``,
    ``copy``, ``del`` and ``identity`` take a chain, ``swap`` two chains.
    """
    if op == "tensor":
        a, b = args
        if isinstance(a, ChainDiagram):
            _same_window(a, b)
            return chain_tensor([a, b])
        _same_window(a.source, b.source)
        return DiagramMorphism(
            chain_tensor([a.source, b.source]), chain_tensor([a.target, b.target]),
            [mc.tensor(x, y) for x, y in zip(a.components, b.components)],
        )
    if op == "compose":
        g, f = args
        if f.target != g.source:
            raise TypeMismatch("pointwise compose: target of f differs from source of g")
        return DiagramMorphism(f.source, g.target, [mc.compose(x, y) for x, y in zip(g.components, f.components)])
    if op == "copy":
        (c,) = args
        return chain_wire([c], [0, 0])
    if op in ("del", "delete"):
        (c,) = args
        return chain_wire([c], [])
    if op in ("identity", "id"):
        (c,) = args
        return chain_wire([c], [0])
    if op == "swap":
        a, b = args
        return chain_wire([a, b], [1, 0])
    raise ValueError(f"unknown pointwise operation {op!r}")


def _same_window(a: ChainDiagram, b: ChainDiagram) -> None:
    if a.window != b.window:
        raise TypeMismatch("chains over different windows")


# -- random generation -----------------------------------------------------------
def random_chain(rng: np.random.Generator, start: int, length: int, max_size: int = 3) -> ChainDiagram:
    """Random sets with random deterministic connectors."""
    objs = [FinSet.range(int(rng.integers(1, max_size + 1))) for _ in range(length)]
    cons = [mc.random_deterministic(rng, objs[i + 1], objs[i]) for i in range(length - 1)]
    return ChainDiagram(start, objs, cons)


def _assignment(k: Kernel) -> list[int]:
    return [int(np.argmax(k.numerators[:, j] != 0)) for j in range(k.dom.size)]


def random_transformation(rng: np.random.Generator, source: ChainDiagram, target: ChainDiagram) -> DiagramMorphism:
    """Random natural transformation built upward from the lowest index.

    Each ``f_{n+1}(.|a)`` splits the mass of ``f_n(.|e_n(a))`` at ``x`` randomly over
    the part of the fiber ``d_n^{-1}(x)`` that later connectors can still reach.
    """
    _same_window(source, target)
    L = len(target.objects)
    maps = [_assignment(c) for c in target.connectors]
    reach = [set(range(target.objects[-1].size))]
    for i in range(L - 2, -1, -1):
        reach.insert(0, {maps[i][x] for x in reach[0]})
    src_maps = [_assignment(c) for c in source.connectors]

    def split(mass: Fraction, cells: list[int]) -> dict[int, Fraction]:
        w = rng.integers(0, 4, size=len(cells))
        if w.sum() == 0:
            w[int(rng.integers(len(cells)))] = 1
        total = int(w.sum())
        return {c: mass * int(v) / total for c, v in zip(cells, w)}

    comps = []
    X0 = target.objects[0]
    cells0 = sorted(reach[0])
    cols = []
    for _ in range(source.objects[0].size):
        col = [Fraction(0)] * X0.size
        for x, v in split(Fraction(1), cells0).items():
            col[x] = v
        cols.append(col)
    comps.append(cols)
    for i in range(L - 1):
        Xn1 = target.objects[i + 1]
        fibers = {x: [y for y in sorted(reach[i + 1]) if maps[i][y] == x] for x in range(target.objects[i].size)}
        cols = []
        for a in range(source.objects[i + 1].size):
            below = comps[i][src_maps[i][a]]
            col = [Fraction(0)] * Xn1.size
            for x, m in enumerate(below):
                if m:
                    for y, v in split(m, fibers[x]).items():
                        col[y] += v
            cols.append(col)
        comps.append(cols)
    kernels = []
    for i, cols in enumerate(comps):
        A, X = source.objects[i], target.objects[i]
        rows = [[cols[j][r] for j in range(A.size)] for r in range(X.size)]
        kernels.append(Kernel(mc.FINSTOCH, A, X, rows))
    return DiagramMorphism(source, target, kernels)


class DiagramBackend:
    """Chains over one fixed window with index-wise structure; equality is exact."""

    tag = "diagram"

    def __init__(self, start: int = 0, length: int = 3, max_size: int = 3):
        self.start, self.length, self.max_size = start, length, max_size
        self.semiring = mc.FINSTOCH

    def unit(self):
        return constant_chain(FinSet.unit(), self.start, self.length)

    def tensor_obj(self, X, Y):
        return chain_tensor([X, Y])

    def compose(self, g, f):
        return pointwise("compose", g, f)

    def tensor(self, f, g):
        return pointwise("tensor", f, g)

    def identity(self, X):
        return pointwise("identity", X)

    def copy(self, X):
        return pointwise("copy", X)

    def delete(self, X):
        return pointwise("del", X)

    def swap(self, X, Y):
        return pointwise("swap", X, Y)

    def wire(self, objs, out):
        return chain_wire(objs, out)

    def equal(self, a, b) -> bool:
        return a == b

    def dom(self, f):
        return f.source

    def cod(self, f):
        return f.target

    def owns(self, f) -> bool:
        return isinstance(f, DiagramMorphism) and f.source.window == (self.start, self.start + self.length - 1)

    def random_object(self, rng, max_size: int | None = None):
        return random_chain(rng, self.start, self.length, max_size or self.max_size)

    def random_morphism(self, rng, X, Y):
        return random_transformation(rng, X, Y)


def backend_for(f: DiagramMorphism) -> DiagramBackend:
    return DiagramBackend(f.source.start, len(f.source.objects))
