"""Probability on finite sets: conditionals, supports, almost-sure relations,
conditional independence, conditional products, couplings, Bayesian inversion,
randomness pushback and disintegration.

Everything here is exact.  Where a conditional is undefined (zero marginal) the
column is filled uniformly unless an explicit ``fill`` is supplied.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import matcat as mc
from .errors import MarginalMismatch, SizeBoundExceeded, TypeMismatch
from .matcat import FinSet, Kernel

DEFAULT_PUSHBACK_BOUND = 10**6


def require_prob(*kernels: Kernel) -> None:
    for k in kernels:
        if not isinstance(k, Kernel) or k.semiring != mc.FINSTOCH:
            raise TypeMismatch("operation requires FinStoch (rational-nonneg) kernels")


def _uniform_col(n: int) -> list[Fraction]:
    return [Fraction(1, n)] * n


def _kernel_from_cols(dom: FinSet, cod: FinSet, cols: Sequence[Sequence]) -> Kernel:
    rows = [[cols[j][i] for j in range(dom.size)] for i in range(cod.size)]
    return Kernel(mc.FINSTOCH, dom, cod, rows)


def _fill_column(fill, j: int, n: int):
    if fill is None:
        return _uniform_col(n)
    if isinstance(fill, Kernel):
        return list(fill.entries[:, j])
    return [mc.as_fraction(v) for v in fill]


def _split(f: Kernel, *counts: int) -> list[FinSet]:
    """Cut the codomain factors into consecutive blocks; the last block takes the rest."""
    k = f.cod.nfactors
    if any(c < 0 for c in counts) or sum(counts) > k:
        raise TypeMismatch(f"invalid factor split {counts} of {k} codomain factors")
    out, start = [], 0
    for c in counts:
        out.append(f.cod.sub(range(start, start + c)))
        start += c
    out.append(f.cod.sub(range(start, k)))
    return out


def _entries(f: Kernel, *blocks: FinSet) -> np.ndarray:
    return f.entries.reshape(tuple(b.size for b in blocks) + (f.dom.size,))


# -- conditionals --------------------------------------------------------
def conditional(f: Kernel, nx: int = 1, fill=None) -> Kernel:
    """Conditional ``X (x) A -> Y`` of ``f: A -> X (x) Y``, ``X`` being the first ``nx`` factors.

    ``f|X(y|x,a) = f(x,y|a) / f(x|a)``.  Columns with ``f(x|a) = 0`` come from
    ``fill``: ``None`` (uniform), a constant column, or a kernel ``X (x) A -> Y``.
    """
    require_prob(f)
    X, Y = _split(f, nx)
    A = f.dom
    E = _entries(f, X, Y)
    marg = E.sum(axis=1)
    cols = []
    for x in range(X.size):
        for a in range(A.size):
            m = marg[x, a]
            if m != 0:
                cols.append([v / m for v in E[x, :, a]])
            else:
                cols.append(_fill_column(fill, x * A.size + a, Y.size))
    return _kernel_from_cols(X * A, Y, cols)


def marginal_first(f: Kernel, nx: int = 1) -> Kernel:
    return mc.marginalize(f, range(nx))


def recompose(marginal: Kernel, cond: Kernel) -> Kernel:
    """``f(x,y|a) = cond(y|x,a) marginal(x|a)``, assembled from copy maps."""
    A, X = marginal.dom, marginal.cod
    sr = marginal.semiring
    out = mc.compose(mc.tensor(marginal, mc.identity(A, sr)), mc.copy(A, sr))
    out = mc.compose(mc.tensor(mc.copy(X, sr), mc.identity(A, sr)), out)
    return mc.compose(mc.tensor(mc.identity(X, sr), cond), out)


# -- supports and almost-sure relations ----------------------------------
@dataclass(frozen=True)
class SupportResult:
    labels: tuple
    obj: FinSet
    inclusion: Kernel
    indices: tuple[int, ...]


def support(p: Kernel) -> SupportResult:
    """Elements of ``cod(p)`` charged by some column of ``p``."""
    require_prob(p)
    idx = tuple(i for i in range(p.cod.size) if any(v > 0 for v in p.numerators[i]))
    labels = tuple(p.cod.elements[i] for i in idx)
    S = FinSet.of(labels)
    inc = mc.from_function(dict(zip(labels, labels)), S, p.cod)
    return SupportResult(labels, S, inc, idx)


def as_equal(p: Kernel, f: Kernel, g: Kernel) -> bool:
    """``f`` and ``g`` agree on every column indexed by the support of ``p``."""
    if p.cod != f.dom or f.dom != g.dom or f.cod != g.cod:
        raise TypeMismatch("as_equal: types do not align")
    sup = support(p).indices
    return all(np.array_equal(f.numerators[:, j] * g.denominator, g.numerators[:, j] * f.denominator)
               for j in sup)


def as_equal_by_equation(p: Kernel, f: Kernel, g: Kernel) -> bool:
    """Categorical form: ``(f (x) id).copy.p == (g (x) id).copy.p``."""
    X = p.cod
    cp = mc.compose(mc.copy(X), p)
    return mc.compose(mc.tensor(f, mc.identity(X)), cp) == mc.compose(mc.tensor(g, mc.identity(X)), cp)


def as_deterministic(p: Kernel, f: Kernel) -> bool:
    if p.cod != f.dom:
        raise TypeMismatch("as_deterministic: types do not align")
    d = f.denominator
    return all(v == 0 or v == d for j in support(p).indices for v in f.numerators[:, j])


# -- conditional independence ------------------------------------------------
@dataclass
class CiVerdict:
    """Verdict plus, when true, kernels whose recomposition gives back the input."""

    kind: str
    verdict: bool
    witness: dict[str, Kernel] | None = None

    def __bool__(self) -> bool:
        return self.verdict

    def recompose(self) -> Kernel:
        if not self.verdict:
            raise ValueError("no witness for a false verdict")
        return _RECOMPOSE[self.kind](**self.witness)


def recompose_state(phi: Kernel, f: Kernel, g: Kernel) -> Kernel:
    """``(f (x) id_W (x) g) . copy3_W . phi``."""
    W = phi.cod
    return mc.compose(mc.tensor_all([f, mc.identity(W), g]), mc.compose(mc.copy(W, n=3), phi))


def recompose_proc(g: Kernel, h: Kernel) -> Kernel:
    return mc.compose(mc.tensor(g, h), mc.copy(g.dom))


def recompose_gen(g: Kernel, h: Kernel, k: Kernel) -> Kernel:
    """``f(x,w,y|a) = g(w|a) h(x|a,w) k(y|w,a)``."""
    A, W = g.dom, g.cod
    out = mc.compose(mc.tensor(g, mc.identity(A)), mc.copy(A))
    out = mc.compose(mc.wire([W, A], [1, 0, 0, 0, 1]), out)
    return mc.compose(mc.tensor_all([h, mc.identity(W), k]), out)


def recompose_markov(g: Kernel, h: Kernel) -> Kernel:
    """``(id_X (x) h) . copy_X . g``."""
    X = g.cod
    return mc.compose(mc.tensor(mc.identity(X), h), mc.compose(mc.copy(X), g))


_RECOMPOSE = {
    "state": recompose_state,
    "proc": recompose_proc,
    "gen": recompose_gen,
    "markov": recompose_markov,
}


def _gen_tables(f: Kernel, nx: int, nw: int):
    X, W, Y = _split(f, nx, nw)
    E = _entries(f, X, W, Y)
    Pxw = E.sum(axis=2)
    Pwy = E.sum(axis=0)
    Pw = Pwy.sum(axis=1)
    holds = np.array_equal(E * Pw[None, :, None, :], Pxw[:, :, None, :] * Pwy[None, :, :, :])
    return X, W, Y, Pxw, Pwy, Pw, holds


def ci_gen(f: Kernel, nx: int = 1, nw: int = 1) -> CiVerdict:
    """``X _|_ Y | W || A`` for ``f: A -> X (x) W (x) Y`` split as ``nx``, ``nw``, rest.

    Witness ``g(w|a)``, ``h(x|a,w)``, ``k(y|w,a)``.
    """
    require_prob(f)
    X, W, Y, Pxw, Pwy, Pw, holds = _gen_tables(f, nx, nw)
    if not holds:
        return CiVerdict("gen", False)
    A = f.dom
    g = _kernel_from_cols(A, W, [list(Pw[:, a]) for a in range(A.size)])
    hcols, kcols = [], []
    for a in range(A.size):
        for w in range(W.size):
            m = Pw[w, a]
            hcols.append([v / m for v in Pxw[:, w, a]] if m else _uniform_col(X.size))
    for w in range(W.size):
        for a in range(A.size):
            m = Pw[w, a]
            kcols.append([v / m for v in Pwy[w, :, a]] if m else _uniform_col(Y.size))
    h = _kernel_from_cols(A * W, X, hcols)
    k = _kernel_from_cols(W * A, Y, kcols)
    return CiVerdict("gen", True, {"g": g, "h": h, "k": k})


def ci_state(psi: Kernel, nx: int = 1, nw: int = 1) -> CiVerdict:
    """``X _|_ Y | W`` for a state ``psi: I -> X (x) W (x) Y``.  Witness ``phi(w)``, ``f(x|w)``, ``g(y|w)``."""
    require_prob(psi)
    if psi.dom != FinSet.unit():
        raise TypeMismatch("ci_state needs a state (domain I)")
    X, W, Y, Pxw, Pwy, Pw, holds = _gen_tables(psi, nx, nw)
    if not holds:
        return CiVerdict("state", False)
    phi = _kernel_from_cols(FinSet.unit(), W, [list(Pw[:, 0])])
    fcols = [[v / Pw[w, 0] for v in Pxw[:, w, 0]] if Pw[w, 0] else _uniform_col(X.size) for w in range(W.size)]
    gcols = [[v / Pw[w, 0] for v in Pwy[w, :, 0]] if Pw[w, 0] else _uniform_col(Y.size) for w in range(W.size)]
    return CiVerdict("state", True, {
        "phi": phi, "f": _kernel_from_cols(W, X, fcols), "g": _kernel_from_cols(W, Y, gcols),
    })


def ci_proc(f: Kernel, nx: int = 1) -> CiVerdict:
    """``X _|_ Y || A``: ``f(x,y|a) = f(x|a) f(y|a)``.  Witness = the two marginals."""
    require_prob(f)
    X, Y = _split(f, nx)
    E = _entries(f, X, Y)
    Px, Py = E.sum(axis=1), E.sum(axis=0)
    if not np.array_equal(E, Px[:, None, :] * Py[None, :, :]):
        return CiVerdict("proc", False)
    A = f.dom
    g = _kernel_from_cols(A, X, [list(Px[:, a]) for a in range(A.size)])
    h = _kernel_from_cols(A, Y, [list(Py[:, a]) for a in range(A.size)])
    return CiVerdict("proc", True, {"g": g, "h": h})


def ci_markov(f: Kernel, nx: int = 1) -> CiVerdict:
    """``A _|_ Y | X``: ``f = (id (x) h) . copy . g`` with ``h: X -> Y`` not seeing ``A``."""
    require_prob(f)
    X, Y = _split(f, nx)
    A = f.dom
    E = _entries(f, X, Y)
    Px = E.sum(axis=1)
    hcols = []
    for x in range(X.size):
        ratio = None
        for a in range(A.size):
            m = Px[x, a]
            if not m:
                continue
            r = [v / m for v in E[x, :, a]]
            if ratio is None:
                ratio = r
            elif r != ratio:
                return CiVerdict("markov", False)
        hcols.append(ratio if ratio is not None else _uniform_col(Y.size))
    g = _kernel_from_cols(A, X, [list(Px[:, a]) for a in range(A.size)])
    return CiVerdict("markov", True, {"g": g, "h": _kernel_from_cols(X, Y, hcols)})


# -- conditional products and couplings --------------------------------------
def conditional_product(psi: Kernel, phi: Kernel, nw: int = 1) -> Kernel:
    """Glue ``psi: I -> X (x) W`` and ``phi: I -> W (x) Y`` along the shared ``W``
    (last ``nw`` factors of ``psi``, first ``nw`` of ``phi``):
    ``psi(x,w) phi(w,y) / psi(w)``."""
    require_prob(psi, phi)
    if psi.dom != FinSet.unit() or phi.dom != FinSet.unit():
        raise TypeMismatch("conditional products are defined for states")
    kx = psi.cod.nfactors - nw
    if kx < 0 or nw > phi.cod.nfactors:
        raise TypeMismatch("shared factor count exceeds a codomain")
    X, W = _split(psi, kx)
    W2, Y = _split(phi, nw)
    if W != W2:
        raise TypeMismatch(f"shared objects differ: {W} vs {W2}")
    left = mc.marginalize(psi, range(kx, kx + nw))
    right = mc.marginalize(phi, range(nw))
    if left != right:
        raise MarginalMismatch(left, right)
    Exw = _entries(psi, X, W)[..., 0]
    Ewy = _entries(phi, W, Y)[..., 0]
    Pw = Ewy.sum(axis=1)
    out = np.empty((X.size, W.size, Y.size), dtype=object)
    for w in range(W.size):
        for x in range(X.size):
            for y in range(Y.size):
                out[x, w, y] = Exw[x, w] * Ewy[w, y] / Pw[w] if Pw[w] else Fraction(0)
    return Kernel(mc.FINSTOCH, FinSet.unit(), X * W * Y, out.reshape(-1, 1))


def conditional_product_via_conditionals(psi: Kernel, phi: Kernel, nw: int = 1, fill_left=None, fill_right=None) -> Kernel:
    """Same gluing assembled from conditionals and copy maps; used to check fill independence."""
    kx = psi.cod.nfactors - nw
    X, W = _split(psi, kx)
    _, Y = _split(phi, nw)
    swapped = mc.compose(mc.wire([X, W], [1, 0]), psi)
    fx = conditional(swapped, nx=nw, fill=fill_left)   # W -> X
    gy = conditional(phi, nx=nw, fill=fill_right)      # W -> Y
    Pw = mc.marginalize(phi, range(nw))
    return recompose_state(Pw, fx, gy)


@dataclass(frozen=True)
class Coupling:
    """A state ``I -> X (x) Y`` read as a morphism ``(X, pi_X) -> (Y, pi_Y)``."""

    joint: Kernel

    @property
    def source(self) -> Kernel:
        return mc.marginalize(self.joint, [0])

    @property
    def target(self) -> Kernel:
        return mc.marginalize(self.joint, [1])


def coupling_compose(psi: Kernel, phi: Kernel) -> Kernel:
    """Glue along the middle object, then forget it."""
    if psi.cod.nfactors != 2 or phi.cod.nfactors != 2:
        raise TypeMismatch("couplings are states on binary products")
    return mc.marginalize(conditional_product(psi, phi, nw=1), [0, 2])


def identity_coupling(pi: Kernel) -> Kernel:
    require_prob(pi)
    return mc.compose(mc.copy(pi.cod), pi)


def coupling_dagger(psi: Kernel) -> Kernel:
    if psi.cod.nfactors != 2:
        raise TypeMismatch("couplings are states on binary products")
    return mc.rewire(psi, [1, 0])


def bayes_invert(psi: Kernel, f: Kernel) -> Kernel:
    """``f^dag(x|y) = f(y|x) psi(x) / (f psi)(y)``, uniform where ``(f psi)(y) = 0``."""
    require_prob(psi, f)
    if psi.dom != FinSet.unit() or psi.cod != f.dom:
        raise TypeMismatch("bayes_invert needs psi: I -> X and f: X -> Y")
    joint = mc.compose(mc.tensor(f, mc.identity(f.dom)), mc.compose(mc.copy(f.dom), psi))
    return conditional(joint, nx=1)


def bayes_joint_sides(psi: Kernel, f: Kernel, fdag: Kernel) -> tuple[Kernel, Kernel]:
    """Both sides of the inversion identity as states on ``X (x) Y``."""
    X = f.dom
    left = mc.compose(mc.tensor(mc.identity(X), f), mc.compose(mc.copy(X), psi))
    fpsi = mc.compose(f, psi)
    Y = f.cod
    right = mc.compose(mc.tensor(fdag, mc.identity(Y)), mc.compose(mc.copy(Y), fpsi))
    return left, right


# -- randomness pushback and disintegration ---------------------------------
@dataclass(frozen=True)
class Pushback:
    """``f = g . (psi (x) id_X)`` with ``g: A (x) X -> Y`` deterministic evaluation."""

    A: FinSet
    psi: Kernel
    g: Kernel

    def recompose(self) -> Kernel:
        X = FinSet(self.g.dom.factors[1:])
        return mc.compose(self.g, mc.tensor(self.psi, mc.identity(X, self.g.semiring)))


def randomness_pushback(f: Kernel, bound: int = DEFAULT_PUSHBACK_BOUND) -> Pushback:
    """Noise over all function tables ``X -> Y`` with product weights, then evaluation."""
    if f.semiring.additive != "sum":
        raise TypeMismatch("randomness pushback needs a sum semiring")
    X, Y = f.dom, f.cod
    n_tables = Y.size ** X.size
    if n_tables > bound:
        raise SizeBoundExceeded(f"|Y|^|X| = {n_tables} exceeds the bound {bound}")
    tables = list(itertools.product(range(Y.size), repeat=X.size))
    A = FinSet.of(tuple(Y.elements[i] for i in t) for t in tables)
    num = f.numerators
    weights = [Fraction(math.prod(num[t[x], x] for x in range(X.size)), f.denominator ** X.size) for t in tables]
    psi = Kernel(f.semiring, FinSet.unit(), A, [[w] for w in weights])
    pos = {x: j for j, x in enumerate(X.elements)}

    def evaluation(e):
        if X.nfactors == 0:
            return e[0]
        a, rest = e[0], e[1:]
        return a[pos[rest[0] if X.nfactors == 1 else tuple(rest)]]

    g = mc.from_function(evaluation, A * X, Y, f.semiring)
    return Pushback(A, psi, g)


def disintegrate(p: Kernel, f: Kernel) -> Kernel:
    """``s: A (x) Y -> X`` with ``f(y|x) p(x|a) = s(x|a,y) (fp)(y|a)``."""
    require_prob(p, f)
    if p.cod != f.dom:
        raise TypeMismatch("disintegrate needs p: A -> X and f: X -> Y")
    joint = mc.compose(mc.tensor(f, mc.identity(p.cod)), mc.compose(mc.copy(p.cod), p))
    s_ya = conditional(joint, nx=f.cod.nfactors)
    A, Y = p.dom, f.cod
    return mc.compose(s_ya, mc.wire([A, Y], [1, 0]))


def disintegration_sides(p: Kernel, f: Kernel, s: Kernel) -> tuple[Kernel, Kernel]:
    """Both sides as kernels ``A -> Y (x) X``."""
    X, A, Y = p.cod, p.dom, f.cod
    left = mc.compose(mc.tensor(f, mc.identity(X)), mc.compose(mc.copy(X), p))
    s_ya = mc.compose(s, mc.wire([Y, A], [1, 0]))
    right = recompose(mc.compose(f, p), s_ya)
    return left, right
