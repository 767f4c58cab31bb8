from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from markovcat import core, gauss as G
from markovcat.errors import MatrixError, TypeMismatch
from markovcat.gauss import GaussMorphism


def scalar(M, C, s):
    return GaussMorphism([[M]], [[C]], [s])


def test_compose_scalar_formula():
    out = G.g_compose(scalar(3, 4, 1), scalar(2, 1, 0))
    assert (out.M.tolist(), out.C.tolist(), out.s.tolist()) == ([[6.0]], [[13.0]], [1.0])


def test_tensor_block_assembly():
    out = G.g_tensor(scalar(1, 1, 0), scalar(2, 3, 1))
    assert out.M.tolist() == [[1, 0], [0, 2]] and out.C.tolist() == [[1, 0], [0, 3]] and out.s.tolist() == [0, 1]


def test_structure_maps():
    cp = G.g_copy(1)
    assert cp.M.tolist() == [[1.0], [1.0]] and not cp.C.any() and not cp.s.any()
    dl = G.g_delete(2)
    assert (dl.n, dl.m) == (2, 0)
    sw = G.g_swap(1, 2)
    assert sw.M.tolist() == [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    assert G.g_structure("id", 2) == G.g_identity(2) or G.g_equal(G.g_structure("id", 2), G.g_identity(2))
    with pytest.raises(ValueError):
        G.g_structure("merge", 1)


def test_marginal_block_extraction():
    rho = 0.3
    joint = GaussMorphism(np.zeros((2, 0)), [[1, rho], [rho, 1]], [0, 0])
    first = G.g_marginalize(joint, [0])
    assert first.C.tolist() == [[1.0]]
    assert G.g_equal(G.g_marginalize(joint, [0, 1]), joint, 0.0)
    assert G.g_equal(first, G.g_compose(G.projection(2, [0]), joint), 0.0)
    with pytest.raises(TypeMismatch):
        G.g_marginalize(joint, [2])


def test_pinv_examples():
    assert np.allclose(G.psd_pinv(np.eye(3)).pinv, np.eye(3))
    assert not G.psd_pinv(np.zeros((2, 2))).pinv.any()
    r = G.psd_pinv(np.diag([4.0, 0.0]))
    assert r.pinv.tolist() == [[0.25, 0.0], [0.0, 0.0]] and r.rank == 1
    with pytest.raises(MatrixError):
        G.psd_pinv([[1.0, 2.0], [0.0, 1.0]])


def test_conditioning_examples():
    cond = G.g_conditional(GaussMorphism(np.zeros((2, 0)), [[1, 0.5], [0.5, 1]], [0, 0]), 1)
    assert np.allclose(cond.M, [[0.5]]) and np.allclose(cond.C, [[0.75]]) and np.allclose(cond.s, [0])
    cond = G.g_conditional(GaussMorphism(np.zeros((2, 0)), [[2, 1], [1, 2]], [0, 0]), 1)
    assert np.allclose(cond.M, [[0.5]]) and np.allclose(cond.C, [[1.5]])
    # a degenerate conditioning variable carries no information
    f = GaussMorphism([[1.0], [2.0]], [[0, 0], [0, 3]], [1, -1])
    cond = G.g_conditional(f, 1)
    assert np.allclose(cond.M, [[0.0, 2.0]]) and np.allclose(cond.C, [[3.0]]) and np.allclose(cond.s, [-1])


def test_pushback_examples():
    pb = G.g_pushback(scalar(2, 1, 0))
    assert (pb.noise.n, pb.noise.m) == (0, 1) and pb.noise.C.tolist() == [[1.0]]
    assert G.g_equal(pb.recompose(), scalar(2, 1, 0), 0.0)
    det = G.g_pushback(GaussMorphism([[1.0, 2.0]], [[0.0]], [3.0]))
    assert not det.noise.C.any() and det.noise.s.tolist() == [3.0]


def test_sampling_examples():
    f = GaussMorphism([[1.0], [2.0]], np.zeros((2, 2)), [0.5, -1])
    draws = G.g_sample(f, [2.0], seed=0, count=50)
    assert np.array_equal(draws, np.tile([2.5, 3.0], (50, 1)))
    N = 10**5
    z = G.g_sample(GaussMorphism(np.zeros((1, 0)), [[1.0]], [0.0]), [], seed=1, count=N)
    assert abs(z.mean()) <= 5 / np.sqrt(N)
    t = G.g_tensor(GaussMorphism(np.zeros((1, 0)), [[1.0]]), GaussMorphism(np.zeros((1, 0)), [[2.0]]))
    d = G.g_sample(t, [], seed=2, count=N)
    assert abs(np.cov(d, rowvar=False)[0, 1]) <= 10 * 2 / np.sqrt(N)
    with pytest.raises(ValueError):
        G.g_sample(t, [], seed=0, count=0)


def test_constructor_checks():
    with pytest.raises(MatrixError):
        GaussMorphism([[1.0]], [[-1.0]])
    with pytest.raises(MatrixError):
        GaussMorphism([[1.0], [1.0]], [[1.0, 0.5], [0.0, 1.0]])
    with pytest.raises(TypeMismatch):
        GaussMorphism([1.0, 2.0])
    with pytest.raises(TypeMismatch):
        G.g_compose(G.g_identity(2), G.g_identity(1))


def test_disintegration_scalar():
    # x ~ N(0, 1), y = x + N(0, 1): posterior slope 1/2, variance 1/2
    p = GaussMorphism(np.zeros((1, 0)), [[1.0]], [0.0])
    f = scalar(1, 1, 0)
    s = G.g_disintegrate(p, f)
    assert np.allclose(s.M, [[0.5]]) and np.allclose(s.C, [[0.5]])


dims = st.integers(0, 3)


@given(st.integers(0, 2**32), dims, dims, dims, dims)
def test_category_laws(seed, a, b, c, d):
    rng = np.random.default_rng(seed)
    f, g, h = G.random_gauss(rng, a, b), G.random_gauss(rng, b, c), G.random_gauss(rng, c, d)
    assert G.g_equal(G.g_compose(h, G.g_compose(g, f)), G.g_compose(G.g_compose(h, g), f), 1e-9)
    assert G.g_equal(G.g_compose(G.g_identity(b), f), f, 0.0)
    k = G.random_gauss(rng, c, a)
    lhs = G.g_compose(G.g_tensor(g, k), G.g_tensor(f, G.g_identity(c)))
    rhs = G.g_tensor(G.g_compose(g, f), k)
    assert G.g_equal(lhs, rhs, 1e-9)


@given(st.integers(0, 2**32), st.integers(1, 5), st.integers(0, 5))
def test_pinv_penrose(seed, m, r):
    C = G.random_psd(np.random.default_rng(seed), m, min(r, m))
    res = G.psd_pinv(C)
    assert max(G.penrose_residuals(C, res.pinv)) <= 1e-9 * max(1.0, np.abs(C).max()) ** 2
    assert res.rank == np.linalg.matrix_rank(C)


@given(st.integers(0, 2**32), st.integers(0, 2), st.integers(1, 3), st.integers(1, 3))
def test_conditional_reconstructs(seed, n, nx, ny):
    rng = np.random.default_rng(seed)
    f = G.random_gauss(rng, n, nx + ny, rank=int(rng.integers(0, nx + ny + 1)))
    cond = G.g_conditional(f, nx)
    assert np.linalg.eigvalsh(cond.C).min() >= -1e-9
    rebuilt = core.recompose_conditional(G.g_marginalize(f, range(nx)), cond)
    assert G.g_equal(rebuilt, f, 1e-7)


@given(st.integers(0, 2**32), dims, st.integers(1, 3))
def test_determinism_and_delete(seed, n, m):
    rng = np.random.default_rng(seed)
    f = G.random_gauss(rng, n, m, rank=0)
    assert G.g_is_deterministic(f)
    assert core.is_deterministic(f, core.GaussBackend())
    g = G.random_gauss(rng, n, m, rank=m)
    assert not G.g_is_deterministic(g)
    assert G.g_equal(G.g_compose(G.g_delete(m), g), G.g_delete(n), 0.0)
