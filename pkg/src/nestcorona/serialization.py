"""JSON and CSV formats.

Complex arrays are stored as separate ``re``/``im`` lists.  Floats go through
the ``json`` module, which writes the shortest decimal that reads back to the
same double, so every document round-trips bit for bit.

Formats::

    model     {"summands": [{"blocks": [2, 1]}, ...]}
    matrix    {"summands": [{"blocks": [...], "re": [[...]], "im": [[...]]}, ...]}
    instance  {"model": model, "matrices": [matrix, ...]}
    trigpoly  {"K": k, "re": [...], "im": [...]}        # c_{-K} .. c_K
"""

from __future__ import annotations

import csv
import io
import json

import numpy as np

from .algebra import FiniteModel, make_model
from .exceptions import DimensionError
from .fourier_model import TrigPoly
from .interpolation import CoronaInstance

__all__ = [
    "FormatError",
    "require",
    "model_to_json",
    "model_from_json",
    "matrix_to_json",
    "matrix_from_json",
    "instance_to_json",
    "instance_from_json",
    "single_from_json",
    "trigpoly_to_json",
    "trigpoly_from_json",
    "dumps",
    "curve_to_csv",
]


class FormatError(ValueError):
    """Malformed JSON document."""


def require(doc, key):
    """``doc[key]``, raising :class:`FormatError` when absent."""
    if not isinstance(doc, dict) or key not in doc:
        raise FormatError(f"missing key {key!r}")
    return doc[key]


def model_to_json(model: FiniteModel) -> dict:
    return {"summands": [{"blocks": list(s)} for s in model.summands]}


def model_from_json(doc) -> FiniteModel:
    summands = require(doc, "summands")
    if not isinstance(summands, list):
        raise FormatError("'summands' must be a list")
    return make_model([list(require(s, "blocks")) for s in summands])


def _complex_to_json(X) -> dict:
    X = np.asarray(X, dtype=complex)
    return {"re": X.real.tolist(), "im": X.imag.tolist()}


def _complex_from_json(doc) -> np.ndarray:
    try:
        re = np.asarray(require(doc, "re"), dtype=float)
        im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"bad numeric array: {exc}") from exc
    if re.shape != im.shape:
        raise FormatError("'re' and 'im' have different shapes")
    return re + 1j * im


def matrix_to_json(A, model: FiniteModel) -> dict:
    return {
        "summands": [
            {"blocks": list(b), **_complex_to_json(B)}
            for b, B in zip(model.summands, model.split(A))
        ]
    }


def matrix_from_json(doc, model: FiniteModel | None = None) -> np.ndarray:
    """Read a matrix; its ``blocks`` define the model when ``model`` is ``None``."""
    summands = require(doc, "summands")
    if model is None:
        model = make_model([list(require(s, "blocks")) for s in summands])
    for s, b in zip(summands, model.summands):
        if "blocks" in s and tuple(s["blocks"]) != tuple(b):
            raise FormatError(f"matrix blocks {s['blocks']} do not match model blocks {list(b)}")
    blocks = [_complex_from_json(s) for s in summands]
    try:
        return model.assemble(blocks)
    except DimensionError as exc:
        raise FormatError(str(exc)) from exc


def instance_to_json(inst: CoronaInstance) -> dict:
    return {
        "model": model_to_json(inst.model),
        "matrices": [matrix_to_json(A, inst.model) for A in inst.A_list],
    }


def instance_from_json(doc) -> CoronaInstance:
    model = model_from_json(require(doc, "model"))
    mats = [matrix_from_json(x, model) for x in require(doc, "matrices")]
    return CoronaInstance(model, tuple(mats))


def single_from_json(doc):
    """``(model, matrix)`` from a bare matrix document or ``{"model": ..., "matrix": ...}``."""
    if isinstance(doc, dict) and "matrix" in doc:
        model = model_from_json(doc["model"]) if "model" in doc else None
        doc = doc["matrix"]
    else:
        model = None
    if model is None:
        model = make_model([list(require(s, "blocks")) for s in require(doc, "summands")])
    return model, matrix_from_json(doc, model)


def trigpoly_to_json(f: TrigPoly) -> dict:
    return {"K": f.K, **_complex_to_json(f.coeffs)}


def trigpoly_from_json(doc) -> TrigPoly:
    K = require(doc, "K")
    c = _complex_from_json(doc)
    if c.ndim != 1 or c.size != 2 * int(K) + 1:
        raise FormatError(f"trigpoly with K={K} needs {2 * int(K) + 1} coefficients")
    return TrigPoly(c)


def dumps(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def curve_to_csv(curve) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["deg", "residual"])
    for deg, r in curve:
        w.writerow([int(deg), repr(float(r))])
    return buf.getvalue()
