"""Backend-agnostic Markov category interface and executable law checkers.

A backend bundles object and morphism operations for one concrete category.
Every checker takes morphisms plus (where sampling is needed) an explicit seed
and returns a :class:`LawReport`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import gauss as G
from . import matcat as mc
from .errors import TypeMismatch

PASS, FAIL, VACUOUS = "pass", "fail", "vacuous"


@dataclass
class LawReport:
    """Outcome of a law check.  ``counterexample`` maps names to morphisms."""

    law: str
    verdict: str
    counterexample: dict[str, Any] | None = None
    detail: str = ""
    data: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in (PASS, FAIL, VACUOUS):
            raise ValueError(f"bad verdict {self.verdict!r}")
        if self.verdict == FAIL and not self.counterexample:
            raise ValueError("a failing report needs a counterexample")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_dict(self, encode=None) -> dict:
        enc = encode or (lambda x: x)
        out = {"law": self.law, "verdict": self.verdict}
        if self.detail:
            out["detail"] = self.detail
        if self.counterexample:
            out["counterexample"] = {k: enc(v) for k, v in self.counterexample.items()}
        if self.data:
            out["data"] = {k: enc(v) for k, v in self.data.items()}
        return out


# -- backends ---------------------------------------------------------------
class MatrixBackend:
    """Kernels over one scalar semiring; equality is exact."""

    def __init__(self, semiring: mc.Semiring | str = mc.FINSTOCH):
        self.semiring = mc.get_semiring(semiring)
        self.tag = self.semiring.tag

    def unit(self):
        return mc.FinSet.unit()

    def tensor_obj(self, X, Y):
        return X * Y

    def compose(self, g, f):
        return mc.compose(g, f)

    def tensor(self, f, g):
        return mc.tensor(f, g)

    def identity(self, X):
        return mc.identity(X, self.semiring)

    def copy(self, X):
        return mc.copy(X, self.semiring)

    def delete(self, X):
        return mc.delete(X, self.semiring)

    def swap(self, X, Y):
        return mc.swap(X, Y, self.semiring)

    def wire(self, objs, out):
        return mc.wire(objs, out, self.semiring)

    def equal(self, a, b) -> bool:
        return a == b

    def dom(self, f):
        return f.dom

    def cod(self, f):
        return f.cod

    def owns(self, f) -> bool:
        return isinstance(f, mc.Kernel) and f.semiring == self.semiring

    def random_object(self, rng, max_size: int = 3):
        return mc.FinSet.range(int(rng.integers(1, max_size + 1)))

    def random_morphism(self, rng, X, Y):
        return mc.random_kernel(rng, X, Y, self.semiring)


class GaussBackend:
    """Affine-Gaussian morphisms; equality within an absolute tolerance."""

    tag = "gauss"

    def __init__(self, tol: float = G.DEFAULT_TOL):
        self.tol = tol

    def unit(self):
        return 0

    def tensor_obj(self, X, Y):
        return X + Y

    def compose(self, g, f):
        return G.g_compose(g, f)

    def tensor(self, f, g):
        return G.g_tensor(f, g)

    def identity(self, X):
        return G.g_identity(X)

    def copy(self, X):
        return G.g_copy(X)

    def delete(self, X):
        return G.g_delete(X)

    def swap(self, X, Y):
        return G.g_swap(X, Y)

    def wire(self, objs, out):
        return G.g_wire(objs, out)

    def equal(self, a, b) -> bool:
        return G.g_equal(a, b, self.tol)

    def dom(self, f):
        return f.n

    def cod(self, f):
        return f.m

    def owns(self, f) -> bool:
        return isinstance(f, G.GaussMorphism)

    def random_object(self, rng, max_size: int = 3):
        return int(rng.integers(0, max_size + 1))

    def random_morphism(self, rng, X, Y):
        rank = int(rng.integers(0, Y + 1)) if Y else 0
        return G.random_gauss(rng, X, Y, rank)


def backend_of(f, tol: float = G.DEFAULT_TOL):
    if isinstance(f, mc.Kernel):
        return MatrixBackend(f.semiring)
    if isinstance(f, G.GaussMorphism):
        return GaussBackend(tol)
    from .diagram import DiagramMorphism, backend_for

    if isinstance(f, DiagramMorphism):
        return backend_for(f)
    raise TypeMismatch(f"no backend for {type(f).__name__}")


def _backend(backend, *morphisms):
    if backend is None:
        backend = backend_of(morphisms[0])
    for m in morphisms:
        if not backend.owns(m):
            raise TypeMismatch(f"morphism does not belong to backend {backend.tag}")
    return backend


def _chain(B, *fs):
    """``fs[0]`` then ``fs[1]`` then ...: diagrammatic-order composition."""
    out = fs[0]
    for f in fs[1:]:
        out = B.compose(f, out)
    return out


# -- laws ------------------------------------------------------------------
def comonoid_equations(B, X) -> list[tuple[str, Any, Any]]:
    """The comonoid identities on one object as (name, lhs, rhs) triples."""
    cp, idx, dl = B.copy(X), B.identity(X), B.delete(X)
    return [
        ("coassociativity", B.compose(B.tensor(cp, idx), cp), B.compose(B.tensor(idx, cp), cp)),
        ("left counitality", B.compose(B.tensor(dl, idx), cp), idx),
        ("right counitality", B.compose(B.tensor(idx, dl), cp), idx),
        ("cocommutativity", B.compose(B.swap(X, X), cp), cp),
    ]


def multiplicativity_equations(B, X, Y) -> list[tuple[str, Any, Any]]:
    XY = B.tensor_obj(X, Y)
    mid = B.wire([X, X, Y, Y], [0, 2, 1, 3])
    return [
        ("copy multiplicativity", B.copy(XY), B.compose(mid, B.tensor(B.copy(X), B.copy(Y)))),
        ("del multiplicativity", B.delete(XY), B.tensor(B.delete(X), B.delete(Y))),
    ]


def check_comonoid_laws(backend, objects: Sequence, seed: int, n_samples: int = 50) -> LawReport:
    """Comonoid laws per object, multiplicativity over tensors, unit laws and
    del-naturality on ``n_samples`` seeded morphisms between the given objects."""
    B = backend
    objects = list(objects)
    if not objects:
        raise ValueError("need at least one object")
    rng = np.random.default_rng(seed)
    eqs: list[tuple[str, Any, Any]] = []
    unit = B.unit()
    eqs.append(("unit copy", B.copy(unit), B.identity(unit)))
    for X in objects:
        eqs += [(f"{name} on {X}", l, r) for name, l, r in comonoid_equations(B, X)]
    for X in objects:
        for Y in objects:
            eqs += [(f"{name} on {X},{Y}", l, r) for name, l, r in multiplicativity_equations(B, X, Y)]
    for name, lhs, rhs in eqs:
        if not B.equal(lhs, rhs):
            return LawReport("comonoid", FAIL, {"lhs": lhs, "rhs": rhs}, name)
    for _ in range(n_samples):
        X = objects[int(rng.integers(len(objects)))]
        Y = objects[int(rng.integers(len(objects)))]
        f = B.random_morphism(rng, X, Y)
        if not B.equal(B.compose(B.delete(Y), f), B.delete(X)):
            return LawReport("comonoid", FAIL, {"f": f, "lhs": B.compose(B.delete(Y), f), "rhs": B.delete(X)},
                             "del naturality")
    return LawReport("comonoid", PASS, detail=f"{len(eqs)} equations, {n_samples} sampled morphisms")


def is_deterministic(f, backend=None) -> bool:
    """``copy . f == (f (x) f) . copy``.

    For kernels over the four built-in semirings this holds exactly when every
    column is a point mass, which is checked directly; the equation itself is
    :func:`is_deterministic_by_equation`.
    """
    if isinstance(f, mc.Kernel) and (backend is None or isinstance(backend, MatrixBackend)):
        return f.is_point_mass_columns()
    return is_deterministic_by_equation(f, backend)


def is_deterministic_by_equation(f, backend=None) -> bool:
    B = _backend(backend, f)
    lhs = B.compose(B.copy(B.cod(f)), f)
    rhs = B.compose(B.tensor(f, f), B.copy(B.dom(f)))
    return B.equal(lhs, rhs)


def check_positivity_instance(f, g, backend=None) -> LawReport:
    """If ``g.f`` is deterministic, ``(g (x) id).copy.f`` must equal ``(gf (x) f).copy``."""
    B = _backend(backend, f, g)
    if B.cod(f) != B.dom(g):
        raise TypeMismatch("codomain of f differs from domain of g")
    gf = B.compose(g, f)
    if not is_deterministic(gf, B):
        return LawReport("positivity", VACUOUS, detail="g.f is not deterministic")
    Y = B.cod(f)
    lhs = _chain(B, f, B.copy(Y), B.tensor(g, B.identity(Y)))
    rhs = B.compose(B.tensor(gf, f), B.copy(B.dom(f)))
    if B.equal(lhs, rhs):
        return LawReport("positivity", PASS)
    return LawReport("positivity", FAIL, {"f": f, "g": g, "gf": gf, "lhs": lhs, "rhs": rhs})


def _causal_sides(B, f, g, h):
    X, Y = B.cod(f), B.cod(g)
    premise = _chain(B, f, g, B.copy(Y), B.tensor(h, B.identity(Y)))
    conclusion = _chain(
        B, f, B.copy(X), B.tensor(g, B.identity(X)),
        B.tensor(B.copy(Y), B.identity(X)), B.tensor(B.tensor(h, B.identity(Y)), B.identity(X)),
    )
    return premise, conclusion


def check_causality_instance(f, g, h1, h2, backend=None) -> LawReport:
    """``f: A->X, g: X->Y, h1,h2: Y->Z``.  The premise compares ``h_i`` after
    ``g.f`` with the ``Y`` wire kept; the conclusion also keeps the ``X`` wire."""
    B = _backend(backend, f, g, h1, h2)
    if B.cod(f) != B.dom(g) or B.cod(g) != B.dom(h1) or B.dom(h1) != B.dom(h2) or B.cod(h1) != B.cod(h2):
        raise TypeMismatch("causality instance does not type-check")
    p1, c1 = _causal_sides(B, f, g, h1)
    p2, c2 = _causal_sides(B, f, g, h2)
    if not B.equal(p1, p2):
        return LawReport("causality", VACUOUS, detail="premise does not hold")
    if B.equal(c1, c2):
        return LawReport("causality", PASS)
    return LawReport("causality", FAIL, {"f": f, "g": g, "h1": h1, "h2": h2, "lhs": c1, "rhs": c2})


def recompose_conditional(marginal, cond, backend=None):
    """Rebuild ``f: A -> X (x) Y`` from its ``X``-marginal ``A -> X`` and a conditional ``X (x) A -> Y``."""
    B = _backend(backend, marginal, cond)
    A, X = B.dom(marginal), B.cod(marginal)
    return _chain(
        B, B.copy(A), B.tensor(marginal, B.identity(A)),
        B.tensor(B.copy(X), B.identity(A)), B.tensor(B.identity(X), cond),
    )
