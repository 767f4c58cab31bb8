"""Affine-Gaussian kernels ``x -> N(Mx + s, C)`` as a Markov category.

Objects are dimensions ``n >= 0`` with tensor given by addition.  A morphism
``n -> m`` is a triple ``(M, C, s)``.  All equalities are componentwise within
an absolute tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import MatrixError, TypeMismatch

DEFAULT_TOL = 1e-9
DEFAULT_CUTOFF = 1e-10


def _sym(C: np.ndarray) -> np.ndarray:
    return (C + C.T) / 2


class GaussMorphism:
    """A kernel ``n -> m`` sending ``x`` to the normal law with mean ``Mx + s`` and covariance ``C``."""

    __slots__ = ("M", "C", "s")

    def __init__(self, M, C=None, s=None, *, n: int | None = None, m: int | None = None,
                 tol: float = DEFAULT_TOL, check: bool = True):
        M = np.asarray(M, dtype=float)
        if M.ndim != 2:
            if n is None or m is None:
                raise TypeMismatch("M must be 2-d unless n and m are given")
            M = M.reshape(m, n)
        m_, n_ = M.shape
        if (n is not None and n != n_) or (m is not None and m != m_):
            raise TypeMismatch(f"M has shape {M.shape}, expected {(m, n)}")
        C = np.zeros((m_, m_)) if C is None else np.asarray(C, dtype=float).reshape(m_, m_)
        s = np.zeros(m_) if s is None else np.asarray(s, dtype=float).reshape(m_)
        if check:
            if m_ and np.max(np.abs(C - C.T)) > tol:
                raise MatrixError("covariance is not symmetric")
            C = _sym(C)
            if m_ and np.linalg.eigvalsh(C).min() < -tol * max(1.0, np.abs(C).max()):
                raise MatrixError("covariance is not positive semidefinite")
        for a in (M, C, s):
            a.setflags(write=False)
        self.M, self.C, self.s = M, C, s

    @property
    def n(self) -> int:
        return self.M.shape[1]

    @property
    def m(self) -> int:
        return self.M.shape[0]

    def __matmul__(self, other: GaussMorphism) -> GaussMorphism:
        return g_compose(self, other)

    def close_to(self, other: GaussMorphism, tol: float = DEFAULT_TOL) -> bool:
        return g_equal(self, other, tol)

    def to_dict(self) -> dict:
        return {
            "kind": "gauss",
            "dom": self.n,
            "cod": self.m,
            "M": self.M.tolist(),
            "C": self.C.tolist(),
            "s": self.s.tolist(),
        }

    def __repr__(self) -> str:
        return f"GaussMorphism({self.n} -> {self.m}; M={self.M.tolist()}, C={self.C.tolist()}, s={self.s.tolist()})"


def g_equal(a: GaussMorphism, b: GaussMorphism, tol: float = DEFAULT_TOL) -> bool:
    if (a.n, a.m) != (b.n, b.m):
        return False
    return all(
        x.size == 0 or np.max(np.abs(x - y)) <= tol for x, y in ((a.M, b.M), (a.C, b.C), (a.s, b.s))
    )


def g_compose(b: GaussMorphism, a: GaussMorphism) -> GaussMorphism:
    """``(N, D, t) . (M, C, s) = (NM, NCN^T + D, Ns + t)``."""
    if a.m != b.n:
        raise TypeMismatch(f"cannot compose {a.n}->{a.m} with {b.n}->{b.m}")
    N = b.M
    return GaussMorphism(N @ a.M, _sym(N @ a.C @ N.T + b.C), N @ a.s + b.s, n=a.n, m=b.m, check=False)


def _block_diag(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = np.zeros((A.shape[0] + B.shape[0], A.shape[1] + B.shape[1]))
    out[: A.shape[0], : A.shape[1]] = A
    out[A.shape[0]:, A.shape[1]:] = B
    return out


def g_tensor(a: GaussMorphism, b: GaussMorphism) -> GaussMorphism:
    return GaussMorphism(
        _block_diag(a.M, b.M), _block_diag(a.C, b.C), np.concatenate([a.s, b.s]),
        n=a.n + b.n, m=a.m + b.m, check=False,
    )


def g_wire(dims: Sequence[int], out: Sequence[int]) -> GaussMorphism:
    """Deterministic linear rewiring of coordinate blocks (copy, delete, swap, ...)."""
    offsets = np.cumsum([0, *dims])
    n = int(offsets[-1])
    rows = []
    for i in out:
        if not 0 <= i < len(dims):
            raise TypeMismatch(f"wire index {i} out of range")
        rows.append(np.eye(n)[offsets[i]:offsets[i + 1]])
    M = np.vstack(rows) if rows else np.zeros((0, n))
    return GaussMorphism(M, n=n, m=M.shape[0], check=False)


def g_identity(n: int) -> GaussMorphism:
    return g_wire([n], [0])


def g_copy(n: int) -> GaussMorphism:
    return g_wire([n], [0, 0])


def g_delete(n: int) -> GaussMorphism:
    return g_wire([n], [])


def g_swap(n1: int, n2: int) -> GaussMorphism:
    return g_wire([n1, n2], [1, 0])


def g_structure(kind: str, *dims: int) -> GaussMorphism:
    if kind == "copy":
        return g_copy(*dims)
    if kind in ("del", "delete"):
        return g_delete(*dims)
    if kind == "swap":
        return g_swap(*dims)
    if kind in ("identity", "id"):
        return g_identity(*dims)
    raise ValueError(f"unknown structure kind {kind!r}")


def g_is_deterministic(f: GaussMorphism, tol: float = DEFAULT_TOL) -> bool:
    return f.m == 0 or float(np.max(np.abs(f.C))) <= tol


def g_marginalize(f: GaussMorphism, keep: Sequence[int]) -> GaussMorphism:
    """Keep the listed output coordinates, in the order given."""
    keep = list(keep)
    if any(not 0 <= k < f.m for k in keep):
        raise TypeMismatch(f"coordinates {keep} invalid for dimension {f.m}")
    idx = np.array(keep, dtype=int)
    return GaussMorphism(f.M[idx], f.C[np.ix_(idx, idx)], f.s[idx], n=f.n, m=len(keep), check=False)


def projection(m: int, keep: Sequence[int]) -> GaussMorphism:
    """The deterministic coordinate projection used as the compositional oracle for marginals."""
    M = np.eye(m)[list(keep)].reshape(len(keep), m)
    return GaussMorphism(M, n=m, m=len(keep), check=False)


@dataclass(frozen=True)
class PsdPinvResult:
    pinv: np.ndarray
    rank: int
    cutoff: float


def psd_pinv(C, cutoff: float = DEFAULT_CUTOFF, tol: float = DEFAULT_TOL) -> PsdPinvResult:
    """Moore-Penrose pseudoinverse of a symmetric PSD matrix by eigendecomposition.

    Eigenvalues at or below ``cutoff * max_eigenvalue`` count as zero.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise MatrixError(f"expected a square matrix, got shape {C.shape}")
    if C.size == 0:
        return PsdPinvResult(np.zeros_like(C), 0, 0.0)
    if np.max(np.abs(C - C.T)) > tol * max(1.0, np.abs(C).max()):
        raise MatrixError("pseudoinverse input is not symmetric")
    lam, V = np.linalg.eigh(_sym(C))
    top = max(lam.max(), 0.0)
    thresh = cutoff * top
    keep = lam > thresh
    inv = np.zeros_like(lam)
    inv[keep] = 1.0 / lam[keep]
    P = _sym((V * inv) @ V.T)
    return PsdPinvResult(P, int(keep.sum()), float(thresh))


def penrose_residuals(A: np.ndarray, P: np.ndarray) -> tuple[float, float, float, float]:
    """Max-abs residuals of ``APA=A, PAP=P, (AP)^T=AP, (PA)^T=PA``."""
    if A.size == 0:
        return (0.0, 0.0, 0.0, 0.0)
    AP, PA = A @ P, P @ A
    return (
        float(np.abs(AP @ A - A).max()),
        float(np.abs(PA @ P - P).max()),
        float(np.abs(AP.T - AP).max()),
        float(np.abs(PA.T - PA).max()),
    )


def g_conditional(f: GaussMorphism, nx: int, cutoff: float = DEFAULT_CUTOFF) -> GaussMorphism:
    """Conditional ``X (x) A -> Y`` of ``f: A -> X (x) Y`` where ``X`` is the first ``nx`` outputs."""
    if not 0 <= nx <= f.m:
        raise TypeMismatch(f"cannot split {f.m} outputs at {nx}")
    xi, eta = slice(0, nx), slice(nx, f.m)
    Cxx, Cyx, Cyy = f.C[xi, xi], f.C[eta, xi], f.C[eta, eta]
    K = Cyx @ psd_pinv(Cxx, cutoff).pinv
    Mx, N = f.M[xi], f.M[eta]
    M_out = np.hstack([K, N - K @ Mx])
    C_out = _sym(Cyy - K @ Cyx.T)
    s_out = f.s[eta] - K @ f.s[xi]
    return GaussMorphism(M_out, C_out, s_out, n=nx + f.n, m=f.m - nx, check=False)


@dataclass(frozen=True)
class GaussPushback:
    """``f = add . (linear (x) noise)`` with a deterministic addition map."""

    noise: GaussMorphism
    add: GaussMorphism
    linear: GaussMorphism

    def recompose(self) -> GaussMorphism:
        return g_compose(self.add, g_tensor(self.linear, self.noise))


def g_pushback(f: GaussMorphism) -> GaussPushback:
    m = f.m
    noise = GaussMorphism(np.zeros((m, 0)), f.C, f.s, n=0, m=m, check=False)
    add = GaussMorphism(np.hstack([np.eye(m), np.eye(m)]), n=2 * m, m=m, check=False)
    linear = GaussMorphism(f.M, n=f.n, m=m, check=False)
    return GaussPushback(noise, add, linear)


def g_sample(f: GaussMorphism, x, seed: int, count: int) -> np.ndarray:
    """``count`` i.i.d. draws from ``N(Mx + s, C)``, one per row."""
    if count < 1:
        raise ValueError("count must be at least 1")
    x = np.asarray(x, dtype=float).reshape(f.n)
    mean = f.M @ x + f.s
    rng = np.random.default_rng(seed)
    if f.m == 0:
        return np.zeros((count, 0))
    lam, V = np.linalg.eigh(f.C)
    root = V * np.sqrt(np.clip(lam, 0.0, None))
    z = rng.standard_normal((count, f.m))
    return mean + z @ root.T


# -- random generation ---------------------------------------------------
def random_psd(rng: np.random.Generator, m: int, rank: int | None = None, scale: float = 1.0) -> np.ndarray:
    rank = m if rank is None else rank
    B = rng.standard_normal((m, rank)) * scale
    return _sym(B @ B.T)


def random_gauss(rng: np.random.Generator, n: int, m: int, rank: int | None = None) -> GaussMorphism:
    return GaussMorphism(
        rng.standard_normal((m, n)), random_psd(rng, m, rank), rng.standard_normal(m), n=n, m=m, check=False
    )


def g_disintegrate(p: GaussMorphism, f: GaussMorphism, cutoff: float = DEFAULT_CUTOFF) -> GaussMorphism:
    """``s: A (x) Y -> X`` recovering the joint of ``p: A -> X`` and ``f: X -> Y`` from ``f.p``."""
    if p.m != f.n:
        raise TypeMismatch("disintegrate needs p: A -> X and f: X -> Y")
    joint = g_compose(g_tensor(f, g_identity(p.m)), g_compose(g_copy(p.m), p))
    s_ya = g_conditional(joint, f.m, cutoff)
    return g_compose(s_ya, g_swap(p.n, f.m))
