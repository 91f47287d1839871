"""JSON forms for shapes, elements, channels, states, and classical data.

Complex scalars are two-element [re, im] arrays, matrices are row-major, and
every dimension is explicit.  Schema violations raise ValueError with a path
to the offending field; the CLI maps those to exit code 2.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any

import numpy as np

from .algebra import AlgebraShape, AlgElement
from .channel import Channel, kraus_channel
from .finstoch import ProbVector, StochasticMatrix, prob_vector, stochastic
from .state import State, state_from_density
from .tolerances import DEFAULT_TOL, Tolerance

__all__ = [
    "shape_to_json",
    "shape_from_json",
    "element_to_json",
    "element_from_json",
    "channel_to_json",
    "channel_from_json",
    "state_to_json",
    "state_from_json",
    "stochastic_to_json",
    "stochastic_from_json",
    "prob_to_json",
    "prob_from_json",
]


def _fail(path: str, msg: str):
    raise ValueError(f"{path}: {msg}")


def _require(obj: Any, key: str, path: str):
    if not isinstance(obj, dict):
        _fail(path, f"expected an object, got {type(obj).__name__}")
    if key not in obj:
        _fail(path, f"missing field {key!r}")
    return obj[key]


def _complex_from(v: Any, path: str) -> complex:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        _fail(path, "complex scalar must be a [re, im] pair")
    re, im = v
    if not isinstance(re, (int, float)) or not isinstance(im, (int, float)):
        _fail(path, "complex parts must be numbers")
    return complex(re, im)


def _complex_to(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _matrix_from(rows: Any, path: str, want_rows: int | None = None,
                 want_cols: int | None = None) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        _fail(path, "matrix must be a non-empty list of rows")
    width = None
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list):
            _fail(f"{path}[{i}]", "row must be a list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            _fail(f"{path}[{i}]", f"ragged matrix: row has {len(row)} entries, expected {width}")
        out.append([_complex_from(v, f"{path}[{i}][{j}]") for j, v in enumerate(row)])
    mat = np.array(out, dtype=complex)
    if want_rows is not None and mat.shape[0] != want_rows:
        _fail(path, f"expected {want_rows} rows, got {mat.shape[0]}")
    if want_cols is not None and mat.shape[1] != want_cols:
        _fail(path, f"expected {want_cols} columns, got {mat.shape[1]}")
    return mat


def _matrix_to(m: np.ndarray) -> list:
    return [[_complex_to(z) for z in row] for row in np.asarray(m)]


def shape_to_json(s: AlgebraShape) -> dict:
    return {"blocks": list(s.blocks)}


def shape_from_json(obj: Any, path: str = "shape") -> AlgebraShape:
    blocks = _require(obj, "blocks", path)
    if not isinstance(blocks, list) or not blocks:
        _fail(f"{path}.blocks", "must be a non-empty list of positive integers")
    for i, n in enumerate(blocks):
        if not isinstance(n, int) or n < 1:
            _fail(f"{path}.blocks[{i}]", f"invalid block dimension {n!r}")
    return AlgebraShape(tuple(blocks))


def element_to_json(a: AlgElement) -> dict:
    return {"blocks": [_matrix_to(b) for b in a.blocks]}


def element_from_json(obj: Any, shape: AlgebraShape, path: str = "element") -> AlgElement:
    blocks = _require(obj, "blocks", path)
    if not isinstance(blocks, list) or len(blocks) != len(shape.blocks):
        _fail(f"{path}.blocks", f"expected {len(shape.blocks)} blocks")
    mats = [
        _matrix_from(b, f"{path}.blocks[{i}]", n, n)
        for i, (n, b) in enumerate(zip(shape.blocks, blocks))
    ]
    return AlgElement(shape, tuple(mats))


def channel_to_json(f: Channel) -> dict:
    return {
        "domain": shape_to_json(f.domain),
        "codomain": shape_to_json(f.codomain),
        "kind": "matrix",
        "matrix": _matrix_to(f.matrix),
    }


def channel_from_json(obj: Any, path: str = "channel") -> Channel:
    dom = shape_from_json(_require(obj, "domain", path), f"{path}.domain")
    cod = shape_from_json(_require(obj, "codomain", path), f"{path}.codomain")
    kind = obj.get("kind", "matrix")
    if kind == "matrix":
        mat = _matrix_from(_require(obj, "matrix", path), f"{path}.matrix",
                           cod.coord_dim, dom.coord_dim)
        return Channel(dom, cod, mat)
    if kind == "kraus":
        ops_json = _require(obj, "kraus", path)
        if not isinstance(ops_json, list) or not ops_json:
            _fail(f"{path}.kraus", "expected a non-empty list of operators")
        ops = [_matrix_from(k, f"{path}.kraus[{i}]") for i, k in enumerate(ops_json)]
        return kraus_channel(dom, cod, ops)
    _fail(f"{path}.kind", f"unknown channel kind {kind!r}")


def state_to_json(st: State) -> dict:
    return {"shape": shape_to_json(st.shape), "density": element_to_json(st.density)["blocks"]}


def state_from_json(obj: Any, tol: Tolerance = DEFAULT_TOL, path: str = "state") -> State:
    shp = shape_from_json(_require(obj, "shape", path), f"{path}.shape")
    density = element_from_json({"blocks": _require(obj, "density", path)}, shp,
                                f"{path}.density")
    try:
        return state_from_density(density, tol)
    except ValueError as exc:
        _fail(f"{path}.density", str(exc))


def _real_entry_from(v: Any, path: str):
    if isinstance(v, bool):
        _fail(path, "booleans are not probabilities")
    if isinstance(v, (int, str)):
        try:
            return Fraction(v)
        except (ValueError, ZeroDivisionError):
            _fail(path, f"bad rational literal {v!r}")
    if isinstance(v, float):
        return v
    _fail(path, f"expected number or rational string, got {type(v).__name__}")


def stochastic_to_json(f: StochasticMatrix) -> dict:
    entries = [[str(v) if f.exact else float(v) for v in row] for row in f.entries]
    return {"rows": f.n_rows, "cols": f.n_cols, "entries": entries}


def stochastic_from_json(obj: Any, tol: Tolerance = DEFAULT_TOL,
                         path: str = "stochastic") -> StochasticMatrix:
    n_rows = _require(obj, "rows", path)
    n_cols = _require(obj, "cols", path)
    entries = _require(obj, "entries", path)
    if not isinstance(entries, list) or len(entries) != n_rows:
        _fail(f"{path}.entries", f"expected {n_rows} rows")
    parsed = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != n_cols:
            _fail(f"{path}.entries[{i}]", f"expected {n_cols} entries")
        parsed.append([_real_entry_from(v, f"{path}.entries[{i}][{j}]")
                       for j, v in enumerate(row)])
    try:
        return stochastic(parsed, tol)
    except ValueError as exc:
        _fail(f"{path}.entries", str(exc))


def prob_to_json(p: ProbVector) -> dict:
    return {"prob": [str(v) if p.exact else float(v) for v in p.entries]}


def prob_from_json(obj: Any, tol: Tolerance = DEFAULT_TOL, path: str = "prob") -> ProbVector:
    values = _require(obj, "prob", path)
    if not isinstance(values, list) or not values:
        _fail(f"{path}.prob", "expected a non-empty list")
    parsed = [_real_entry_from(v, f"{path}.prob[{i}]") for i, v in enumerate(values)]
    try:
        return prob_vector(parsed, tol)
    except ValueError as exc:
        _fail(f"{path}.prob", str(exc))
