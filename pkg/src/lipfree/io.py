"""JSON I/O for metric spaces, norms, maps, free vectors and ball systems.

Any nested object may be given inline or as a path string, resolved relative
to the file that references it.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .balls import BallSystem
from .freespace import FreeVector
from .lipschitz import LipschitzMap
from .metric import FiniteMetricSpace, shortest_path_closure, validate_metric
from .norms import NormedSpace, parse_norm

SCHEMAS = {
    "metric": '{"labels": [...], "dist": [[...]], "base": int}',
    "norm": '"linf:3" | "l1:2" | "l2:2" | {"kind": "polyhedral"|"euclidean", "dim": n, '
            '"functionals": [[...]], "vertices": [[...]]?}',
    "map": '{"space": <metric>, "codomain": <norm>|"scalar", "values": [...]}',
    "free vector": '{"space": <metric>, "coeffs": {"label": value}}',
    "balls": '{"norm": <norm>, "balls": [{"center": [...], "radius": r}]}',
}


def schema_help() -> str:
    return "\n".join(f"  {k}: {v}" for k, v in SCHEMAS.items())


def load_json(path) -> tuple[object, Path]:
    p = Path(path)
    with open(p) as fh:
        return json.load(fh), p.parent


def _resolve(obj, base: Path):
    if isinstance(obj, str) and (base / obj).is_file():
        with open(base / obj) as fh:
            return json.load(fh), (base / obj).parent
    return obj, base


def metric_from_json(obj, base: Path = Path("."), repair: str | None = None) -> FiniteMetricSpace:
    obj, base = _resolve(obj, base)
    dist = np.asarray(obj["dist"], dtype=float)
    if repair == "shortest-path":
        dist = shortest_path_closure(dist)
    elif repair is not None:
        raise ValueError(f"unknown repair mode {repair!r}")
    labels = obj.get("labels") or ()
    return validate_metric(dist, int(obj.get("base", 0)), labels)


def norm_from_json(obj, base: Path = Path(".")) -> NormedSpace:
    if isinstance(obj, str) and (base / obj).is_file():
        obj, base = _resolve(obj, base)
    return parse_norm(obj)


def map_from_json(obj, base: Path = Path(".")) -> LipschitzMap:
    obj, base = _resolve(obj, base)
    space = metric_from_json(obj["space"], base)
    cod = obj.get("codomain", "scalar")
    codomain = None if cod == "scalar" else norm_from_json(cod, base)
    return LipschitzMap(space, codomain, np.asarray(obj["values"], dtype=float))


def free_vector_from_json(obj, base: Path = Path(".")) -> FreeVector:
    obj, base = _resolve(obj, base)
    space = metric_from_json(obj["space"], base)
    coeffs = obj["coeffs"]
    if isinstance(coeffs, dict):
        return FreeVector.from_labels(space, coeffs)
    return FreeVector(space, coeffs)


def balls_from_json(obj, base: Path = Path(".")) -> BallSystem:
    obj, base = _resolve(obj, base)
    norm = norm_from_json(obj["norm"], base)
    return BallSystem(
        norm,
        np.array([b["center"] for b in obj["balls"]], dtype=float),
        np.array([b["radius"] for b in obj["balls"]], dtype=float),
    )


def to_jsonable(x):
    """Recursively convert numpy scalars/arrays and tuples to plain JSON types."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return to_jsonable(x.tolist())
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, float) and not np.isfinite(x):
        return repr(x)
    return x


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def write_text(text: str, out: str | os.PathLike | None, stream) -> None:
    if out is None:
        stream.write(text)
        if not text.endswith("\n"):
            stream.write("\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n")
