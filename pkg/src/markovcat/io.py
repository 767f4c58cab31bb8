"""JSON documents for kernels, Gaussian morphisms and reports.

Kernel documents::

    {"semiring": "rational-nonneg", "dom": ["a"], "cod": ["x", "y"],
     "entries": [["1/2"], ["1/2"]]}

``dom``/``cod`` is a label list (one factor), a list of label lists (several
factors), ``[]`` (the unit) or ``{"labels": [...]}`` for one factor whose labels
are themselves lists.  Entries are exact scalar strings, rows indexed by the
codomain.  Gaussian documents carry ``"kind": "gauss"``, integer ``dom``/``cod``
and float arrays ``M``, ``C``, ``s``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import numpy as np

from . import matcat as mc
from .errors import FormatError
from .gauss import GaussMorphism
from .matcat import FinSet, Kernel


def _label_out(x):
    return [_label_out(v) for v in x] if isinstance(x, tuple) else x


def _label_in(x):
    if isinstance(x, list):
        return tuple(_label_in(v) for v in x)
    if isinstance(x, (dict, float)) or x is None:
        raise FormatError(f"unsupported label {x!r}")
    return x


def encode_finset(X: FinSet):
    if X.nfactors == 0:
        return []
    if X.nfactors == 1:
        labels = [_label_out(v) for v in X.factors[0]]
        if any(isinstance(v, list) for v in labels):
            return {"labels": labels}
        return labels
    return [[_label_out(v) for v in f] for f in X.factors]


def decode_finset(doc) -> FinSet:
    try:
        if isinstance(doc, dict):
            if set(doc) != {"labels"} or not isinstance(doc["labels"], list):
                raise FormatError("object form of a set needs exactly a 'labels' list")
            return FinSet.of(_label_in(v) for v in doc["labels"])
        if not isinstance(doc, list):
            raise FormatError("a set must be a list")
        if not doc:
            return FinSet.unit()
        if all(isinstance(f, list) for f in doc):
            return FinSet(tuple(tuple(_label_in(v) for v in f) for f in doc))
        if any(isinstance(f, list) for f in doc):
            raise FormatError("mixing labels and factor lists")
        return FinSet.of(_label_in(v) for v in doc)
    except FormatError:
        raise
    except ValueError as e:
        raise FormatError(str(e)) from None


def _scalar_in(v) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise FormatError(f"entries must be exact strings like \"1/2\", got {v!r}")
    try:
        return mc.as_fraction(v)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"cannot parse scalar {v!r}") from None


def kernel_to_dict(k: Kernel) -> dict:
    return {
        "semiring": k.semiring.tag,
        "dom": encode_finset(k.dom),
        "cod": encode_finset(k.cod),
        "entries": [[str(v) for v in row] for row in k.entries],
    }


def kernel_from_dict(doc: dict) -> Kernel:
    if not isinstance(doc, dict):
        raise FormatError("kernel document must be an object")
    missing = {"semiring", "dom", "cod", "entries"} - set(doc)
    if missing:
        raise FormatError(f"kernel document lacks {sorted(missing)}")
    try:
        semiring = mc.get_semiring(doc["semiring"])
    except (ValueError, TypeError):
        raise FormatError(f"unknown semiring tag {doc['semiring']!r}") from None
    dom, cod = decode_finset(doc["dom"]), decode_finset(doc["cod"])
    rows = doc["entries"]
    if not isinstance(rows, list) or len(rows) != cod.size or any(
        not isinstance(r, list) or len(r) != dom.size for r in rows
    ):
        raise FormatError(f"entries must be a {cod.size} x {dom.size} matrix")
    return Kernel(semiring, dom, cod, [[_scalar_in(v) for v in r] for r in rows])


def gauss_from_dict(doc: dict) -> GaussMorphism:
    try:
        n, m = int(doc["dom"]), int(doc["cod"])
        M = np.array(doc["M"], dtype=float).reshape(m, n)
        C = np.array(doc["C"], dtype=float).reshape(m, m)
        s = np.array(doc["s"], dtype=float).reshape(m)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"bad gauss document: {e}") from None
    return GaussMorphism(M, C, s, n=n, m=m)


def from_dict(doc):
    if isinstance(doc, dict) and doc.get("kind") == "gauss":
        return gauss_from_dict(doc)
    return kernel_from_dict(doc)


def parse(text: str):
    """Parse a kernel or Gaussian document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"invalid JSON: {e}") from None
    return from_dict(doc)


def parse_kernel(text: str) -> Kernel:
    k = parse(text)
    if not isinstance(k, Kernel):
        raise FormatError("expected a kernel document")
    return k


def dumps(doc) -> str:
    """Canonical serialization: two-space indent, trailing newline."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def serialize(obj) -> str:
    return dumps(encode(obj))


def encode(obj) -> Any:
    """Turn library values into JSON-ready structures."""
    if isinstance(obj, Kernel):
        return kernel_to_dict(obj)
    if isinstance(obj, GaussMorphism):
        return obj.to_dict()
    if isinstance(obj, FinSet):
        return encode_finset(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (bool, str, type(None))):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return encode(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return obj.to_dict(encode)
    raise TypeError(f"cannot encode {type(obj).__name__}")
