"""JSON state files.

Three layouts are recognised, distinguished by their keys::

    {"dims": [dA, dB], "amplitudes": [[re, im], ...]}          pure state
    {"dims": [dA, dB], "matrix": [[[re, im], ...], ...]}       density matrix
    {"coeffs": [c1, c2, ...]}                                   Schmidt vector

A bare real number is accepted wherever an ``[re, im]`` pair is expected.
Every parse failure raises :class:`InvariantViolation` whose ``invariant``
names the rule that was broken.
"""

from __future__ import annotations

import json
import os
from typing import Union

import numpy as np

from .errors import DimensionMismatch, InvariantViolation
from .schmidt import SchmidtVector, parse_schmidt
from .states import DensityMatrix, PureState

Loaded = Union[PureState, DensityMatrix, SchmidtVector]


class StateFileError(InvariantViolation):
    """The file could not be read or decoded."""


def _complex(entry, where: str) -> complex:
    if isinstance(entry, bool):
        raise InvariantViolation("numeric entry", f"{where}: boolean is not a number")
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2 and all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry
    ):
        return complex(entry[0], entry[1])
    raise InvariantViolation("complex entry is [re, im]", f"{where}: got {entry!r}")


def _dims(data: dict) -> tuple[int, int]:
    dims = data.get("dims")
    if not (isinstance(dims, list) and len(dims) == 2 and all(isinstance(d, int) and not isinstance(d, bool) for d in dims)):
        raise InvariantViolation("dims is [dA, dB] of positive integers", f"got {dims!r}")
    if min(dims) < 1:
        raise InvariantViolation("dims is [dA, dB] of positive integers", f"got {dims!r}")
    return dims[0], dims[1]


def _shape_guard(fn):
    def inner(data):
        try:
            return fn(data)
        except DimensionMismatch as exc:
            raise InvariantViolation("length matches dA*dB", str(exc)) from exc

    return inner


@_shape_guard
def parse_state(data) -> Loaded:
    if not isinstance(data, dict):
        raise InvariantViolation("state file holds a JSON object", f"got {type(data).__name__}")
    if "coeffs" in data:
        raw = data["coeffs"]
        if not isinstance(raw, list) or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in raw
        ):
            raise InvariantViolation("coeffs is a list of real numbers", f"got {raw!r}")
        return parse_schmidt(data)
    dims = _dims(data)
    if "amplitudes" in data:
        raw = data["amplitudes"]
        if not isinstance(raw, list):
            raise InvariantViolation("amplitudes is a list", f"got {type(raw).__name__}")
        amps = np.array([_complex(a, f"amplitudes[{i}]") for i, a in enumerate(raw)], dtype=complex)
        return PureState(amps, dims)
    if "matrix" in data:
        raw = data["matrix"]
        if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
            raise InvariantViolation("matrix is a list of rows", "")
        side = dims[0] * dims[1]
        if len(raw) != side or any(len(row) != side for row in raw):
            raise InvariantViolation("matrix is square of side dA*dB", f"expected side {side}")
        mat = np.array(
            [[_complex(v, f"matrix[{i}][{j}]") for j, v in enumerate(row)] for i, row in enumerate(raw)],
            dtype=complex,
        )
        return DensityMatrix(mat, dims)
    raise InvariantViolation("state has amplitudes, matrix or coeffs", f"keys: {sorted(data)}")


def load_state(path: str | os.PathLike) -> Loaded:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError as exc:
        raise StateFileError("file exists", f"file not found: {path}") from exc
    except IsADirectoryError as exc:
        raise StateFileError("file exists", f"is a directory: {path}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError("valid JSON", f"{path}: {exc}") from exc
    return parse_state(data)


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def state_to_dict(state: Loaded) -> dict:
    if isinstance(state, SchmidtVector):
        return state.to_dict()
    if isinstance(state, PureState):
        return {"dims": list(state.dims), "amplitudes": [_pair(a) for a in state.amplitudes]}
    if isinstance(state, DensityMatrix):
        return {"dims": list(state.dims), "matrix": [[_pair(v) for v in row] for row in state.matrix]}
    raise TypeError(f"cannot serialise {type(state).__name__}")


def dump_state(state: Loaded, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(state_to_dict(state), fh, indent=2)
        fh.write("\n")
