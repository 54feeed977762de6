"""JSON encodings of elements, states, channels and constraint sets.

Matrices are row-major nested lists of ``[re, im]`` pairs. An element is
``{"shape": [d1, ...], "blocks": [matrix, ...]}``; gamma-coordinates add a
``"gamma"`` field. A channel is ``{"in_shape", "out_shape", "kraus"}`` with
full-space Kraus matrices, and a constraint set is
``{"gamma": g, "constraints": [{"a": element, "c": float}, ...]}``.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .algebra import AlgebraShape, HermitianElement, State
from .channels import Channel
from .embeddings import GammaVector
from .projection import ConstraintSet, ProjectionResult

__all__ = [
    "matrix_to_json",
    "matrix_from_json",
    "element_to_json",
    "element_from_json",
    "state_from_json",
    "channel_to_json",
    "channel_from_json",
    "constraints_to_json",
    "constraints_from_json",
    "projection_to_json",
    "format_value",
    "load_json",
    "dump_json",
]


def matrix_to_json(m) -> list:
    m = np.asarray(m, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(obj) -> np.ndarray:
    try:
        a = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise ValueError("matrix must be a nested list of [re, im] pairs") from None
    if a.ndim != 3 or a.shape[2] != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must have layout [rows][cols][re, im], got array shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


def _kraus_from_json(obj) -> np.ndarray:
    a = np.array(obj, dtype=float)
    if a.ndim != 3 or a.shape[2] != 2:
        raise ValueError(f"Kraus matrix must have layout [rows][cols][re, im], got array shape {a.shape}")
    return a[..., 0] + 1j * a[..., 1]


def element_to_json(x: HermitianElement) -> dict:
    out = {"shape": list(x.shape.blocks), "blocks": [matrix_to_json(b) for b in x.blocks]}
    if isinstance(x, GammaVector):
        out["gamma"] = x.gamma
    return out


def _shape_and_blocks(obj):
    if not isinstance(obj, dict) or "shape" not in obj or "blocks" not in obj:
        raise ValueError('element JSON needs "shape" and "blocks" fields')
    shape = AlgebraShape.of(obj["shape"])
    blocks = [matrix_from_json(b) for b in obj["blocks"]]
    return shape, blocks


def element_from_json(obj) -> HermitianElement:
    shape, blocks = _shape_and_blocks(obj)
    if "gamma" in obj:
        return GammaVector(float(obj["gamma"]), shape, blocks)
    return HermitianElement(shape, blocks)


def state_from_json(obj) -> State:
    shape, blocks = _shape_and_blocks(obj)
    return State(shape, blocks)


def channel_to_json(T: Channel) -> dict:
    return {
        "in_shape": list(T.in_shape.blocks),
        "out_shape": list(T.out_shape.blocks),
        "kraus": [matrix_to_json(k) for k in T.kraus],
    }


def channel_from_json(obj) -> Channel:
    try:
        return Channel(AlgebraShape.of(obj["in_shape"]), AlgebraShape.of(obj["out_shape"]),
                       tuple(_kraus_from_json(k) for k in obj["kraus"]))
    except KeyError as e:
        raise ValueError(f"channel JSON is missing field {e}") from None


def constraints_to_json(C: ConstraintSet) -> dict:
    return {"gamma": C.gamma,
            "constraints": [{"a": element_to_json(a), "c": c} for a, c in C.constraints]}


def constraints_from_json(obj, gamma: float | None = None) -> ConstraintSet:
    try:
        g = float(obj["gamma"]) if gamma is None else float(gamma)
        pairs = tuple((element_from_json(item["a"]), float(item["c"])) for item in obj["constraints"])
    except KeyError as e:
        raise ValueError(f"constraint JSON is missing field {e}") from None
    return ConstraintSet(g, pairs)


def format_value(v: float) -> str:
    """Nine significant digits; ``inf`` for an infinite divergence."""
    if math.isinf(v):
        return "inf"
    return f"{v:.9g}"


def _json_float(v: float):
    return "inf" if math.isinf(v) else v


def projection_to_json(result: ProjectionResult) -> dict:
    return {
        "projected": element_to_json(result.projected),
        "divergence": _json_float(result.divergence),
        "kkt_residual": result.kkt_residual,
        "feasibility_residual": result.feasibility_residual,
        "iterations": result.iterations,
        "converged": result.converged,
    }


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")
