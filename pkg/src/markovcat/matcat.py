"""Matrix Markov categories over exact scalar semirings.

A morphism ``f: X -> Y`` is a column-normalized matrix with ``entries[y][x] =
f(y|x)``.  Composition is left multiplication (Chapman-Kolmogorov), tensor is the
Kronecker product with first-factor-major element order.  Four scalar semirings
are provided:

========================  ===============  ==========================
tag                       addition         category
========================  ===============  ==========================
``rational-nonneg``       ``+``            FinStoch
``rational``              ``+``            FinStoch with signed entries
``boolean``               ``max`` (or)     FinSetMulti
``fuzzy-maxmin``          ``max``          fuzzy information transformers
========================  ===============  ==========================

Kernels are stored as integer numerators over one common denominator, which
keeps equality exact and turns composition into integer matrix products.
"""

from __future__ import annotations

import itertools
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from .errors import EntryError, NormalizationError, TypeMismatch

Label = Hashable

# products of int64 entries below this bound cannot overflow in a matmul
_INT64_BOUND = 2**62


@dataclass(frozen=True)
class FinSet:
    """A finite set presented as an ordered product of labeled factors.

    A single-factor set has its labels as elements; a product has tuples,
    enumerated first-factor-major.  The empty product is the unit ``I`` with
    the single element ``()``.  Tensoring concatenates factor lists, so the
    monoidal structure is strict.
    """

    factors: tuple[tuple[Label, ...], ...] = ()

    def __post_init__(self):
        factors = tuple(tuple(f) for f in self.factors)
        for f in factors:
            if not f:
                raise ValueError("a factor must have at least one label")
            if len(set(f)) != len(f):
                raise ValueError(f"duplicate labels in factor {f!r}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, labels: Iterable[Label]) -> FinSet:
        return cls((tuple(labels),))

    @classmethod
    def range(cls, n: int) -> FinSet:
        return cls.of(range(n))

    @classmethod
    def unit(cls) -> FinSet:
        return cls(())

    def __mul__(self, other: FinSet) -> FinSet:
        return FinSet(self.factors + other.factors)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(f) for f in self.factors)

    @property
    def size(self) -> int:
        return math.prod(self.shape)

    @property
    def nfactors(self) -> int:
        return len(self.factors)

    def __len__(self) -> int:
        return self.size

    def factor(self, i: int) -> FinSet:
        return FinSet((self.factors[i],))

    def split(self) -> list[FinSet]:
        return [self.factor(i) for i in range(self.nfactors)]

    def sub(self, indices: Iterable[int]) -> FinSet:
        return FinSet(tuple(self.factors[i] for i in indices))

    @cached_property
    def elements(self) -> tuple:
        if self.nfactors == 1:
            return self.factors[0]
        return tuple(itertools.product(*self.factors))

    @cached_property
    def _positions(self) -> dict:
        return {e: i for i, e in enumerate(self.elements)}

    def index(self, element: Label) -> int:
        try:
            return self._positions[element]
        except KeyError:
            raise KeyError(f"{element!r} is not an element of {self}") from None

    def __contains__(self, element) -> bool:
        return element in self._positions

    def __repr__(self) -> str:
        if not self.factors:
            return "FinSet(I)"
        return "FinSet(" + " x ".join("{" + ",".join(map(str, f)) + "}" for f in self.factors) + ")"


@dataclass(frozen=True)
class Semiring:
    """Scalar semiring used for kernel entries.

    ``additive`` is ``"sum"`` for ordinary addition and ``"max"`` for the
    idempotent semirings, whose multiplication is then ``min``.
    """

    tag: str
    additive: str
    nonneg: bool
    bounded: bool
    zero_one: bool

    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b if self.additive == "sum" else max(a, b)

    def mul(self, a, b):
        return a * b if self.additive == "sum" else min(a, b)

    def eq(self, a, b) -> bool:
        return Fraction(a) == Fraction(b)

    def contains(self, value: Fraction) -> bool:
        if self.nonneg and value < 0:
            return False
        if self.bounded and value > 1:
            return False
        if self.zero_one and value not in (0, 1):
            return False
        return True


FINSTOCH = Semiring("rational-nonneg", "sum", nonneg=True, bounded=True, zero_one=False)
FINSTOCH_PM = Semiring("rational", "sum", nonneg=False, bounded=False, zero_one=False)
FINSETMULTI = Semiring("boolean", "max", nonneg=True, bounded=True, zero_one=True)
FUZZY = Semiring("fuzzy-maxmin", "max", nonneg=True, bounded=True, zero_one=False)

SEMIRINGS = {s.tag: s for s in (FINSTOCH, FINSTOCH_PM, FINSETMULTI, FUZZY)}


def get_semiring(semiring: Semiring | str) -> Semiring:
    if isinstance(semiring, Semiring):
        return semiring
    try:
        return SEMIRINGS[semiring]
    except KeyError:
        raise ValueError(f"unknown semiring tag {semiring!r}") from None


def as_fraction(value) -> Fraction:
    """Exact conversion of ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, numbers.Rational):
        return Fraction(int(value.numerator), int(value.denominator))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected an exact scalar, got {type(value).__name__} {value!r}")


def _object_ints(a) -> np.ndarray:
    a = np.asarray(a)
    out = np.empty(a.size, dtype=object)
    for i, v in enumerate(a.flat):
        out[i] = int(v)
    return out.reshape(a.shape)


def _maxabs(a: np.ndarray) -> int:
    return max((abs(v) for v in a.flat), default=0)


def _int_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if _maxabs(a) * _maxabs(b) * max(a.shape[1], 1) < _INT64_BOUND:
        return _object_ints(a.astype(np.int64) @ b.astype(np.int64))
    return a @ b


def _int_outer(a: np.ndarray, b: np.ndarray, op: Callable) -> np.ndarray:
    """Block product ``out[(i,k),(j,l)] = op(a[i,j], b[k,l])``."""
    (m, n), (p, q) = a.shape, b.shape
    if _maxabs(a) * _maxabs(b) < _INT64_BOUND:
        a, b = a.astype(np.int64), b.astype(np.int64)
    out = op(a[:, None, :, None], b[None, :, None, :]).reshape(m * p, n * q)
    return _object_ints(out)


class Kernel:
    """A column-normalized matrix over a semiring: the finite morphism type.

    ``entries[y, x]`` is ``f(y|x)``; columns are indexed by ``dom`` elements and
    rows by ``cod`` elements.  Instances are immutable.
    """

    __array_priority__ = 100  # keep numpy from hijacking ``@``

    def __init__(self, semiring, dom: FinSet, cod: FinSet, entries, *, check: bool = True):
        semiring = get_semiring(semiring)
        rows = np.asarray(entries, dtype=object)
        if rows.shape != (cod.size, dom.size):
            raise TypeMismatch(f"entries have shape {rows.shape}, expected {(cod.size, dom.size)}")
        fr = [as_fraction(v) for v in rows.flat]
        den = math.lcm(*(v.denominator for v in fr)) if fr else 1
        num = _object_ints([v.numerator * (den // v.denominator) for v in fr]).reshape(rows.shape)
        self._init(semiring, dom, cod, num, den, check)

    @classmethod
    def _from_ints(cls, semiring, dom, cod, num, den, check=True) -> Kernel:
        self = cls.__new__(cls)
        self._init(semiring, dom, cod, num, den, check)
        return self

    def _init(self, semiring, dom, cod, num, den, check):
        g = math.gcd(den, *num.flat) or 1
        if den < 0:
            g = -g
        if g != 1:
            num = _object_ints([v // g for v in num.flat]).reshape(num.shape)
            den //= g
        num.setflags(write=False)
        self.semiring = semiring
        self.dom = dom
        self.cod = cod
        self._num = num
        self._den = den
        if check:
            self.validate()

    # -- inspection -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self._num.shape

    @property
    def numerators(self) -> np.ndarray:
        return self._num

    @property
    def denominator(self) -> int:
        return self._den

    @cached_property
    def entries(self) -> np.ndarray:
        """Object array of ``Fraction`` entries, rows = codomain."""
        out = np.empty(self._num.shape, dtype=object)
        for idx, v in np.ndenumerate(self._num):
            out[idx] = Fraction(v, self._den)
        out.setflags(write=False)
        return out

    def __getitem__(self, idx) -> Fraction:
        return self.entries[idx]

    def prob(self, y: Label, x: Label = ()) -> Fraction:
        """Entry ``f(y|x)`` addressed by element labels."""
        return self.entries[self.cod.index(y), self.dom.index(x)]

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(self.entries[:, j])

    def to_float(self) -> np.ndarray:
        return self._num.astype(float) / self._den

    def is_zero_one(self) -> bool:
        """Direct scan: every entry is 0 or 1."""
        return all(v == 0 or v == self._den for v in self._num.flat)

    def is_point_mass_columns(self) -> bool:
        """Every column has a single nonzero entry, equal to 1."""
        d = self._den
        for j in range(self.dom.size):
            col = [v for v in self._num[:, j] if v != 0]
            if col != [d]:
                return False
        return True

    def validate(self) -> None:
        sr, d, num = self.semiring, self._den, self._num
        flat = num.flat
        bad = None
        if sr.zero_one:
            bad = next((v for v in flat if v != 0 and v != d), None)
        elif sr.nonneg and sr.bounded:
            bad = next((v for v in flat if v < 0 or v > d), None)
        elif sr.nonneg:
            bad = next((v for v in flat if v < 0), None)
        if bad is not None:
            raise EntryError(f"entry {Fraction(bad, d)} is not a valid {sr.tag} scalar")
        if sr.additive == "sum":
            totals = num.sum(axis=0)
        else:
            totals = num.max(axis=0)
        for j, t in enumerate(totals):
            if t != d:
                raise NormalizationError(j, Fraction(t, d))

    # -- equality and operators ---------------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, Kernel):
            return NotImplemented
        return (
            self.semiring == other.semiring
            and self.dom == other.dom
            and self.cod == other.cod
            and self._den == other._den
            and np.array_equal(self._num, other._num)
        )

    def __hash__(self) -> int:
        return hash((self.semiring.tag, self.dom, self.cod, self._den, tuple(self._num.flat)))

    def __matmul__(self, other: Kernel) -> Kernel:
        return compose(self, other)

    def __repr__(self) -> str:
        rows = ["[" + ", ".join(str(v) for v in row) + "]" for row in self.entries]
        return f"Kernel<{self.semiring.tag}>({self.dom} -> {self.cod}; {', '.join(rows)})"


# -- constructors ---------------------------------------------------------
def _check_same(f: Kernel, g: Kernel) -> Semiring:
    if f.semiring != g.semiring:
        raise TypeMismatch(f"semiring mismatch: {f.semiring.tag} vs {g.semiring.tag}")
    return f.semiring


def compose(g: Kernel, f: Kernel) -> Kernel:
    """``g . f``: first ``f``, then ``g``."""
    sr = _check_same(f, g)
    if f.cod != g.dom:
        raise TypeMismatch(f"cannot compose: cod(f)={f.cod} but dom(g)={g.dom}")
    if sr.additive == "sum":
        num = _int_matmul(g.numerators, f.numerators)
        den = g.denominator * f.denominator
    else:
        den = math.lcm(g.denominator, f.denominator)
        a = (g.numerators * (den // g.denominator)).astype(np.int64)
        b = (f.numerators * (den // f.denominator)).astype(np.int64)
        num = _object_ints(np.minimum(a[:, :, None], b[None, :, :]).max(axis=1))
    return Kernel._from_ints(sr, f.dom, g.cod, num, den)


def tensor(f: Kernel, g: Kernel) -> Kernel:
    """``f (x) g`` with entries ``f(x|a) g(y|b)`` in first-factor-major order."""
    sr = _check_same(f, g)
    if sr.additive == "sum":
        num = _int_outer(f.numerators, g.numerators, np.multiply)
        den = f.denominator * g.denominator
    else:
        den = math.lcm(f.denominator, g.denominator)
        num = _int_outer(
            f.numerators * (den // f.denominator), g.numerators * (den // g.denominator), np.minimum
        )
    return Kernel._from_ints(sr, f.dom * g.dom, f.cod * g.cod, num, den)


def tensor_all(kernels: Sequence[Kernel], semiring=None) -> Kernel:
    if not kernels:
        return identity(FinSet.unit(), semiring or FINSTOCH)
    out = kernels[0]
    for k in kernels[1:]:
        out = tensor(out, k)
    return out


def wire(blocks: Sequence[FinSet], out: Sequence[int], semiring=FINSTOCH) -> Kernel:
    """Deterministic rewiring kernel ``blocks[0] x ... -> blocks[out[0]] x ...``.

    Each output position copies the input block it names; blocks that are not
    named are deleted.  Copy, delete, swap, identities and projections are all
    special cases.
    """
    semiring = get_semiring(semiring)
    sizes = [b.size for b in blocks]
    n = math.prod(sizes)
    dom = FinSet(tuple(fct for b in blocks for fct in b.factors))
    cod = FinSet(tuple(fct for i in out for fct in blocks[i].factors))
    for i in out:
        if not 0 <= i < len(blocks):
            raise TypeMismatch(f"wire index {i} out of range for {len(blocks)} blocks")
    idx = np.unravel_index(np.arange(n), sizes) if sizes else ()
    if out:
        rows = np.ravel_multi_index([idx[i] for i in out], [sizes[i] for i in out])
    else:
        rows = np.zeros(n, dtype=np.int64)
    num = np.zeros((cod.size, n), dtype=np.int64)
    num[rows, np.arange(n)] = 1
    return Kernel._from_ints(semiring, dom, cod, _object_ints(num), 1, check=False)


def identity(X: FinSet, semiring=FINSTOCH) -> Kernel:
    return wire([X], [0], semiring)


def copy(X: FinSet, semiring=FINSTOCH, n: int = 2) -> Kernel:
    return wire([X], [0] * n, semiring)


def delete(X: FinSet, semiring=FINSTOCH) -> Kernel:
    return wire([X], [], semiring)


def swap(X: FinSet, Y: FinSet, semiring=FINSTOCH) -> Kernel:
    return wire([X, Y], [1, 0], semiring)


def structure(kind: str, *objects: FinSet, semiring=FINSTOCH) -> Kernel:
    """One of the structure morphisms ``copy``, ``del``, ``swap``, ``identity``."""
    if kind == "copy":
        (X,) = objects
        return copy(X, semiring)
    if kind in ("del", "delete"):
        (X,) = objects
        return delete(X, semiring)
    if kind == "swap":
        X, Y = objects
        return swap(X, Y, semiring)
    if kind in ("identity", "id"):
        (X,) = objects
        return identity(X, semiring)
    raise ValueError(f"unknown structure kind {kind!r}")


def from_function(
    mapping: Mapping | Callable, dom: FinSet, cod: FinSet, semiring=FINSTOCH
) -> Kernel:
    """Deterministic kernel of a function between finite sets."""
    get = mapping.__getitem__ if isinstance(mapping, Mapping) else mapping
    num = np.zeros((cod.size, dom.size), dtype=np.int64)
    for j, x in enumerate(dom.elements):
        y = get(x)
        if y not in cod:
            raise TypeMismatch(f"value {y!r} for {x!r} is not in the codomain")
        num[cod.index(y), j] = 1
    return Kernel._from_ints(get_semiring(semiring), dom, cod, _object_ints(num), 1)


def distribution(X: FinSet, weights: Sequence, semiring=FINSTOCH) -> Kernel:
    """A state ``I -> X`` from a weight vector."""
    return Kernel(semiring, FinSet.unit(), X, [[w] for w in weights])


def point(X: FinSet, x: Label, semiring=FINSTOCH) -> Kernel:
    return from_function(lambda _: x, FinSet.unit(), X, semiring)


def uniform(X: FinSet) -> Kernel:
    return distribution(X, [Fraction(1, X.size)] * X.size)


def marginalize(f: Kernel, keep: Iterable[int]) -> Kernel:
    """Sum out every codomain factor not listed in ``keep`` (order preserved)."""
    keep = sorted(set(keep))
    k = f.cod.nfactors
    if any(not 0 <= i < k for i in keep):
        raise TypeMismatch(f"factor indices {keep} invalid for {k} factors")
    drop = tuple(i for i in range(k) if i not in keep)
    arr = f.numerators.reshape(f.cod.shape + (f.dom.size,))
    if drop:
        if f.semiring.additive == "sum":
            arr = arr.sum(axis=drop)
        else:
            arr = arr.max(axis=drop)
    cod = f.cod.sub(keep)
    num = _object_ints(np.asarray(arr).reshape(cod.size, f.dom.size))
    return Kernel._from_ints(f.semiring, f.dom, cod, num, f.denominator)


def rewire(f: Kernel, out: Sequence[int]) -> Kernel:
    """Post-compose ``f`` with a rewiring of its codomain factors."""
    return compose(wire(f.cod.split(), out, f.semiring), f)


def rewire_inputs(f: Kernel, order: Sequence[int]) -> Kernel:
    """Permute the domain factors of ``f``: new factor ``i`` is old ``order[i]``."""
    blocks = f.dom.split()
    new_dom = [blocks[i] for i in order]
    inverse = [order.index(i) for i in range(len(order))]
    return compose(f, wire(new_dom, inverse, f.semiring))


def kernel_from_function_table(
    dom: FinSet, cod: FinSet, table: Callable[[Label, Label], object], semiring=FINSTOCH
) -> Kernel:
    """Kernel with ``f(y|x) = table(y, x)``."""
    rows = [[table(y, x) for x in dom.elements] for y in cod.elements]
    return Kernel(semiring, dom, cod, rows)


# -- random generation (seeded, exact) ------------------------------------
def random_column(rng: np.random.Generator, n: int, semiring=FINSTOCH, *, zero_prob=0.25, max_weight=6):
    sr = get_semiring(semiring)
    if sr is FINSTOCH:
        while True:
            w = rng.integers(1, max_weight + 1, size=n)
            w[rng.random(n) < zero_prob] = 0
            if w.sum() > 0:
                break
        total = int(w.sum())
        return [Fraction(int(v), total) for v in w]
    if sr is FINSTOCH_PM:
        d = int(rng.integers(1, max_weight + 1))
        col = [Fraction(int(v), d) for v in rng.integers(-max_weight, max_weight + 1, size=n)]
        col[-1] = 1 - sum(col[:-1], Fraction(0))
        return col
    if sr is FINSETMULTI:
        col = [int(v) for v in rng.random(n) < 0.5]
        col[int(rng.integers(n))] = 1
        return [Fraction(v) for v in col]
    d = int(rng.integers(1, max_weight + 1))
    col = [Fraction(int(v), d) for v in rng.integers(0, d + 1, size=n)]
    col[int(rng.integers(n))] = Fraction(1)
    return col


def random_kernel(rng: np.random.Generator, dom: FinSet, cod: FinSet, semiring=FINSTOCH, **kw) -> Kernel:
    cols = [random_column(rng, cod.size, semiring, **kw) for _ in range(dom.size)]
    rows = [[cols[j][i] for j in range(dom.size)] for i in range(cod.size)]
    return Kernel(semiring, dom, cod, rows)


def random_deterministic(rng: np.random.Generator, dom: FinSet, cod: FinSet, semiring=FINSTOCH) -> Kernel:
    choice = rng.integers(cod.size, size=dom.size)
    table = {x: cod.elements[int(c)] for x, c in zip(dom.elements, choice)}
    return from_function(table, dom, cod, semiring)
