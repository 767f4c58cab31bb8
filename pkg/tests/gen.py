"""Seeded generative constructions for property and acceptance tests.

Kernels are assembled entry by entry from products of random conditional
tables, so the hypotheses of each law hold by construction rather than by
rejection.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

from markovcat import matcat as mc
from markovcat.matcat import FinSet, Kernel


def sizes(rng, k: int, lo: int = 1, hi: int = 3) -> list[int]:
    return [int(v) for v in rng.integers(lo, hi + 1, size=k)]


def cpt(rng, n_out: int, *n_in: int, zero_prob: float = 0.25):
    """Random conditional table ``t[inputs][out]`` of exact probabilities."""
    out = {}
    for key in itertools.product(*(range(n) for n in n_in)):
        out[key] = mc.random_column(rng, n_out, zero_prob=zero_prob)
    return out


def build(dom: FinSet, shape: list[int], fn) -> Kernel:
    """Kernel ``A -> prod range(shape)`` with entry ``fn(outputs, a_index)``."""
    cod = FinSet(tuple(tuple(range(n)) for n in shape))
    rows = []
    for ys in itertools.product(*(range(n) for n in shape)):
        rows.append([fn(ys, a) for a in range(dom.size)])
    return Kernel(mc.FINSTOCH, dom, cod, rows)


def state(shape: list[int], fn) -> Kernel:
    return build(FinSet.unit(), shape, lambda ys, _a: fn(ys))


def ranges(*ns: int) -> FinSet:
    return FinSet(tuple(tuple(range(n)) for n in ns))


# -- conditional independence instances --------------------------------------
def state_xw_yz(rng):
    """``psi(x,w,y,z) = p(w) p(x|w) p(y,z|w)``: X independent of Y (x) Z given W."""
    nx, nw, ny, nz = sizes(rng, 4)
    pw = cpt(rng, nw)[()]
    px = cpt(rng, nx, nw)
    pyz = cpt(rng, ny * nz, nw)
    return state([nx, nw, ny, nz], lambda t: pw[t[1]] * px[(t[1],)][t[0]] * pyz[(t[1],)][t[2] * nz + t[3]])


def state_contraction(rng):
    """``psi(x,w,z,y) = p(w) p(z|w) p(x|w) p(y|w,z)``."""
    nx, nw, nz, ny = sizes(rng, 4)
    pw = cpt(rng, nw)[()]
    pz = cpt(rng, nz, nw)
    px = cpt(rng, nx, nw)
    py = cpt(rng, ny, nw, nz)
    return state([nx, nw, nz, ny],
                 lambda t: pw[t[1]] * pz[(t[1],)][t[2]] * px[(t[1],)][t[0]] * py[(t[1], t[2])][t[3]])


def gen_xw_yz(rng):
    """``f(x,w,y,z|a) = g(w|a) h(x|a,w) k(y,z|w,a)``."""
    na, nx, nw, ny, nz = sizes(rng, 5)
    g = cpt(rng, nw, na)
    h = cpt(rng, nx, na, nw)
    k = cpt(rng, ny * nz, nw, na)
    A = FinSet.range(na)
    return build(A, [nx, nw, ny, nz],
                 lambda t, a: g[(a,)][t[1]] * h[(a, t[1])][t[0]] * k[(t[1], a)][t[2] * nz + t[3]])


def gen_contraction(rng):
    """``f(x,w,z,y|a) = g(w|a) q(z|w,a) h(x|a,w) k(y|w,z,a)``."""
    na, nx, nw, nz, ny = sizes(rng, 5)
    g = cpt(rng, nw, na)
    q = cpt(rng, nz, nw, na)
    h = cpt(rng, nx, na, nw)
    k = cpt(rng, ny, nw, nz, na)
    A = FinSet.range(na)
    return build(A, [nx, nw, nz, ny],
                 lambda t, a: g[(a,)][t[1]] * q[(t[1], a)][t[2]] * h[(a, t[1])][t[0]] * k[(t[1], t[2], a)][t[3]])


def markov_chain(rng):
    """``f(x,w,y|a) = g(x|a) h(w|x) k(y|x,w)``."""
    na, nx, nw, ny = sizes(rng, 4)
    g = cpt(rng, nx, na)
    h = cpt(rng, nw, nx)
    k = cpt(rng, ny, nx, nw)
    return build(FinSet.range(na), [nx, nw, ny],
                 lambda t, a: g[(a,)][t[0]] * h[(t[0],)][t[1]] * k[(t[0], t[1])][t[2]])


def markov_xwy(rng):
    """``f(x,w,y|a) = g(x|a) h(w,y|x)``."""
    na, nx, nw, ny = sizes(rng, 4)
    g = cpt(rng, nx, na)
    h = cpt(rng, nw * ny, nx)
    return build(FinSet.range(na), [nx, nw, ny], lambda t, a: g[(a,)][t[0]] * h[(t[0],)][t[1] * ny + t[2]])


# -- conditional products and couplings ------------------------------------
def compatible_triple(rng):
    """``psi: I -> X (x) W`` and ``phi: I -> W (x) Y (x) Z`` with the same ``W`` marginal."""
    nx, nw, ny, nz = sizes(rng, 4)
    pw = cpt(rng, nw)[()]
    a = cpt(rng, nx, nw)
    b = cpt(rng, ny * nz, nw)
    psi = state([nx, nw], lambda t: pw[t[1]] * a[(t[1],)][t[0]])
    phi = state([nw, ny, nz], lambda t: pw[t[0]] * b[(t[0],)][t[1] * nz + t[2]])
    return psi, phi


def coupling(rng, nx: int | None = None, ny: int | None = None, zero_prob: float = 0.3):
    nx = nx or int(rng.integers(1, 5))
    ny = ny or int(rng.integers(1, 5))
    col = mc.random_column(rng, nx * ny, zero_prob=zero_prob)
    return state([nx, ny], lambda t: col[t[0] * ny + t[1]])


# -- statistical models -------------------------------------------------------
def product_model(rng, n_theta: int, n_u: int, n_v: int):
    """``p(u,v|theta) = r(u) q(v|theta)`` with ``q`` of full row rank on its support."""
    while True:
        q = [mc.random_column(rng, n_v, zero_prob=0.0) for _ in range(n_theta)]
        rows = [[q[t][v] for t in range(n_theta)] for v in range(n_v)]
        if np.linalg.matrix_rank(np.array(rows, dtype=float)) == n_v:
            break
    r = mc.random_column(rng, n_u, zero_prob=0.0)
    p = build(FinSet.range(n_theta), [n_u, n_v], lambda t, th: r[t[0]] * q[th][t[1]])
    UV = p.cod
    s = mc.from_function(lambda e: e[1], UV, FinSet.range(n_v))
    a = mc.from_function(lambda e: e[0], UV, FinSet.range(n_u))
    return p, s, a


def structured_model(rng, n_theta: int, n_x: int):
    """Model whose likelihood vectors are proportional within random blocks; some outcomes may be off-support."""
    n_blocks = int(rng.integers(1, n_x + 1))
    block = [int(rng.integers(n_blocks)) for _ in range(n_x)]
    like = [[int(rng.integers(1, 5)) for _ in range(n_theta)] for _ in range(n_blocks)]
    weight = [int(rng.integers(0, 4)) for _ in range(n_x)]
    if not any(weight):
        weight[0] = 1
    cols = []
    for t in range(n_theta):
        raw = [weight[x] * like[block[x]][t] for x in range(n_x)]
        total = sum(raw)
        cols.append([Fraction(v, total) for v in raw])
    rows = [[cols[t][x] for t in range(n_theta)] for x in range(n_x)]
    return Kernel(mc.FINSTOCH, FinSet.range(n_theta), FinSet.range(n_x), rows)


def relabel(rng, p: Kernel, s: Kernel, a: Kernel):
    """Permute parameter values and sample points; statistics follow the sample permutation."""
    th = list(range(p.dom.size))
    rng.shuffle(th)
    xs = list(range(p.cod.size))
    rng.shuffle(xs)
    Th = FinSet.of(f"t{i}" for i in th)
    Xn = FinSet.of(f"x{i}" for i in xs)
    # new parameter j is old th[j]; new point i is old xs[i]
    E = p.entries
    rows = [[E[xs[i], th[j]] for j in range(len(th))] for i in range(len(xs))]
    p2 = Kernel(mc.FINSTOCH, Th, Xn, rows)

    def move(stat: Kernel) -> Kernel:
        F = stat.entries
        return Kernel(mc.FINSTOCH, Xn, stat.cod, [[F[r, xs[i]] for i in range(len(xs))] for r in range(stat.cod.size)])

    return p2, move(s), move(a)
