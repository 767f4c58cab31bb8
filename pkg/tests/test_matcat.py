from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from markovcat import matcat as mc
from markovcat.errors import EntryError, NormalizationError, TypeMismatch
from markovcat.matcat import FINSETMULTI, FINSTOCH, FINSTOCH_PM, FUZZY, FinSet, Kernel

F = Fraction
AB = FinSet.of("ab")
XY = FinSet.of("xy")


def test_finset_basics():
    X = FinSet.of("ab") * FinSet.range(3)
    assert X.shape == (2, 3) and X.size == 6 and X.nfactors == 2
    assert X.elements[:4] == (("a", 0), ("a", 1), ("a", 2), ("b", 0))
    assert X.index(("b", 1)) == 4 and ("b", 2) in X and ("c", 0) not in X
    assert FinSet.unit().size == 1 and FinSet.unit().elements == ((),)
    assert FinSet.unit() * X == X == X * FinSet.unit()
    assert X.split() == [FinSet.of("ab"), FinSet.range(3)]
    with pytest.raises(ValueError):
        FinSet.of("aa")
    with pytest.raises(KeyError):
        X.index("a")


def test_kernel_construction_and_validation():
    coin = Kernel(FINSTOCH, FinSet.of(["a"]), XY, [["1/2"], ["1/2"]])
    assert coin.prob("x", "a") == F(1, 2) and coin.denominator == 2
    with pytest.raises(NormalizationError) as e:
        Kernel(FINSTOCH, FinSet.of(["a"]), XY, [["1/2"], ["1/4"]])
    assert e.value.column == 0 and e.value.total == F(3, 4)
    with pytest.raises(EntryError):
        Kernel(FINSTOCH, FinSet.of(["a"]), XY, [[2], [-1]])
    with pytest.raises(EntryError):
        Kernel(FINSETMULTI, FinSet.of(["a"]), XY, [["1/2"], [1]])
    with pytest.raises(NormalizationError):
        Kernel(FUZZY, FinSet.of(["a"]), XY, [["1/2"], ["1/3"]])
    with pytest.raises(TypeError):
        Kernel(FINSTOCH, FinSet.of(["a"]), XY, [[0.5], [0.5]])
    Kernel(FINSTOCH_PM, FinSet.of(["a"]), XY, [[2], [-1]])
    multi = Kernel(FINSETMULTI, FinSet.of(["a"]), XY, [[1], [1]])
    assert multi.column(0) == (1, 1)


def test_compose_hand_example():
    # f: x0 -> (1/2, 1/2), x1 -> (0, 1); g: y0 -> (1, 0), y1 -> (1/3, 2/3)
    X, Y, Z = FinSet.of(["x0", "x1"]), FinSet.of(["y0", "y1"]), FinSet.of(["z0", "z1"])
    f = Kernel(FINSTOCH, X, Y, [["1/2", 0], ["1/2", 1]])
    g = Kernel(FINSTOCH, Y, Z, [[1, "1/3"], [0, "2/3"]])
    gf = mc.compose(g, f)
    assert oracles.table(gf) == [[F(2, 3), F(1, 3)], [F(1, 3), F(2, 3)]]
    assert oracles.table(gf) == oracles.compose_sum(oracles.table(g), oracles.table(f))
    assert g @ f == gf


def test_boolean_relation_composition():
    A, XY_, UV = FinSet.of("a"), FinSet.of("xy"), FinSet.of("uv")
    r = Kernel(FINSETMULTI, A, XY_, [[1], [1]])
    s = Kernel(FINSETMULTI, XY_, UV, [[1, 0], [0, 1]])
    assert oracles.table(mc.compose(s, r)) == [[1], [1]]
    pairs = {(a, c) for a in "a" for b in "xy" for c in "uv"
             if r.prob(b, a) and s.prob(c, b)}
    assert pairs == {("a", "u"), ("a", "v")}


def test_tensor_and_structure_maps():
    coin = mc.uniform(XY)
    assert oracles.table(mc.tensor(coin, coin)) == [[F(1, 4)]] * 4
    cp = mc.copy(AB)
    assert cp.cod == AB * AB and oracles.table(cp) == [[1, 0], [0, 0], [0, 0], [0, 1]]
    assert oracles.table(mc.delete(FinSet.of("abc"))) == [[1, 1, 1]]
    sw = mc.swap(FinSet.of("a"), XY)
    assert oracles.table(sw) == [[1, 0], [0, 1]] and sw.cod == XY * FinSet.of("a")
    assert mc.identity(XY) == mc.structure("id", XY)
    assert mc.structure("copy", AB) == cp


def test_from_function_tables():
    X = FinSet.of(["HH", "HT", "TH", "TT"])
    heads = mc.from_function({"HH": 2, "HT": 1, "TH": 1, "TT": 0}, X, FinSet.of([0, 1, 2]))
    assert oracles.table(heads) == [[0, 0, 0, 1], [0, 1, 1, 0], [1, 0, 0, 0]]
    const = mc.from_function(lambda x: "b", FinSet.range(3), FinSet.of("abc"))
    assert oracles.table(const) == [[0, 0, 0], [1, 1, 1], [0, 0, 0]]
    assert mc.from_function(lambda x: x, XY, XY) == mc.identity(XY)
    with pytest.raises(TypeMismatch):
        mc.from_function(lambda x: "q", XY, XY)


def test_marginalize_examples():
    B = FinSet.range(2)
    psi = mc.distribution(B * B, ["1/2", 0, "1/4", "1/4"])
    assert oracles.table(mc.marginalize(psi, [0])) == [[F(1, 2)], [F(1, 2)]]
    assert oracles.table(mc.marginalize(mc.uniform(B * B), [1])) == [[F(1, 2)], [F(1, 2)]]
    assert mc.marginalize(psi, [0, 1]) == psi
    with pytest.raises(TypeMismatch):
        mc.marginalize(psi, [2])


def test_wire_and_rewire():
    X, Y, Z = FinSet.range(2), FinSet.range(3), FinSet.of("ab")
    rng = np.random.default_rng(0)
    f = mc.random_kernel(rng, Z, X * Y)
    back = mc.rewire(mc.rewire(f, [1, 0]), [1, 0])
    assert back == f
    g = mc.random_kernel(rng, X * Y, Z)
    assert mc.rewire_inputs(mc.rewire_inputs(g, [1, 0]), [1, 0]) == g
    assert mc.wire([X, Y], [0, 1]) == mc.identity(X * Y)


def test_equality_uses_exact_values():
    a = Kernel(FINSTOCH, XY, XY, [["2/4", 0], ["1/2", 1]])
    b = Kernel(FINSTOCH, XY, XY, [["1/2", 0], ["1/2", 1]])
    assert a == b and hash(a) == hash(b)
    assert a != mc.identity(XY)
    assert a != Kernel(FUZZY, XY, XY, [[1, 0], [0, 1]])


def test_composition_type_errors():
    with pytest.raises(TypeMismatch):
        mc.compose(mc.identity(AB), mc.identity(XY))
    with pytest.raises(TypeMismatch):
        mc.compose(mc.identity(XY, FUZZY), mc.identity(XY))


def test_large_entries_fall_back_to_exact_objects():
    big = F(1, 2**40)
    k = Kernel(FINSTOCH, XY, XY, [[big, 1 - big], [1 - big, big]])
    k3 = k @ k @ k
    ref = oracles.compose_sum(oracles.table(k), oracles.compose_sum(oracles.table(k), oracles.table(k)))
    assert oracles.table(k3) == ref


# -- properties --------------------------------------------------------------------
semirings = st.sampled_from([FINSTOCH, FINSTOCH_PM, FINSETMULTI, FUZZY])
sizes = st.integers(1, 4)


@given(st.integers(0, 2**32), semirings, sizes, sizes, sizes, sizes)
def test_compose_matches_loop_oracle(seed, sr, a, b, c, d):
    rng = np.random.default_rng(seed)
    A, B, C, D = (FinSet.range(n) for n in (a, b, c, d))
    f, g, h = (mc.random_kernel(rng, *t, sr) for t in ((A, B), (B, C), (C, D)))
    ref = oracles.compose_sum if sr.additive == "sum" else oracles.compose_maxmin
    assert oracles.table(mc.compose(g, f)) == ref(oracles.table(g), oracles.table(f))
    assert mc.compose(h, mc.compose(g, f)) == mc.compose(mc.compose(h, g), f)
    assert mc.compose(mc.identity(B, sr), f) == f == mc.compose(f, mc.identity(A, sr))


@given(st.integers(0, 2**32), semirings, sizes, sizes, sizes, sizes)
def test_tensor_matches_kron_and_interchange(seed, sr, a, b, c, d):
    rng = np.random.default_rng(seed)
    A, B, C, D = (FinSet.range(n) for n in (a, b, c, d))
    f, g = mc.random_kernel(rng, A, B, sr), mc.random_kernel(rng, C, D, sr)
    mul = (lambda u, v: u * v) if sr.additive == "sum" else min
    assert oracles.table(mc.tensor(f, g)) == oracles.kron(oracles.table(f), oracles.table(g), mul)
    f2, g2 = mc.random_kernel(rng, B, A, sr), mc.random_kernel(rng, D, C, sr)
    lhs = mc.compose(mc.tensor(f2, g2), mc.tensor(f, g))
    rhs = mc.tensor(mc.compose(f2, f), mc.compose(g2, g))
    assert lhs == rhs


@given(st.integers(0, 2**32), semirings, sizes, sizes)
def test_swap_naturality(seed, sr, a, b):
    rng = np.random.default_rng(seed)
    A, B = FinSet.range(a), FinSet.of("pqrs"[:b])
    f, g = mc.random_kernel(rng, A, A, sr), mc.random_kernel(rng, B, B, sr)
    lhs = mc.compose(mc.swap(A, B, sr), mc.tensor(f, g))
    rhs = mc.compose(mc.tensor(g, f), mc.swap(A, B, sr))
    assert lhs == rhs


@given(st.integers(0, 2**32), sizes, sizes)
def test_random_kernels_are_valid(seed, a, b):
    rng = np.random.default_rng(seed)
    for sr in (FINSTOCH, FINSTOCH_PM, FINSETMULTI, FUZZY):
        k = mc.random_kernel(rng, FinSet.range(a), FinSet.range(b), sr)
        k.validate()
        d = mc.random_deterministic(rng, FinSet.range(a), FinSet.range(b), sr)
        assert d.is_zero_one() and d.is_point_mass_columns()
