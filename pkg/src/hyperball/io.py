"""Instance files and report serialization.

All rationals travel as "p/q" strings; floats are rejected at parse time.
``canonical_dumps`` fixes key order and layout so that identical inputs and
seeds yield byte-identical artifacts (reports exclude their timing field
from that guarantee).

Instance schemas (the ``type`` field selects the shape):

* ``{"type": "matrix", "dist": [["0/1", ...], ...]}``
* ``{"type": "graph", "n": 5, "edges": [[0, 1], ...], "weights": [...]}``
* ``{"polyhedron": {"dim": 2, "rows": [{"a": ["1/1","1/1"], "b": "-1/1"}]}}``
* ``{"ball": {"center": ["0/1","0/1"], "r": "2/1"}}``
* ``{"box": {"lo": [...], "hi": [...]}}``
* ``{"type": "family", "balls": [...], "subset": ... | null}``
* ``{"type": "helly", "dim": n, "halfspaces": [...], "witnesses": [...]}``
* ``{"type": "triple", "sets": [s0, s1, s2], "x0": [...]}``
* ``{"type": "chain", "sets": [sA, sB], "x": [...], "y": [...], "r": ..,
     "eps": .., "delta": ..}``
* ``{"type": "points", "points": [[...], ...]}``
* ``{"type": "ip", "k": 2, "eps": "1/64", "balls": [...]}``
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import HyperballError
from .lab import HellyInstance, LinfBallFamily
from .linf import Ball, Box, Point
from .lp import HPolyhedron
from .metric import GraphInstance, MetricError, graph_metric, validate_metric
from .rational import RationalParseError, format_rational, parse_rational
from .sets import BoxUnion


class ParseError(HyperballError):
    """Structurally invalid instance data."""


class ValidationError(HyperballError):
    """Well-formed data that violates a domain invariant."""


def canonical_dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def to_jsonable(obj: Any) -> Any:
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, Ball):
        return {"ball": {"center": [format_rational(c) for c in obj.center], "r": format_rational(obj.radius)}}
    if isinstance(obj, Box):
        return {"box": {"lo": [format_rational(c) for c in obj.lo], "hi": [format_rational(c) for c in obj.hi]}}
    if isinstance(obj, HPolyhedron):
        return {
            "polyhedron": {
                "dim": obj.dim,
                "rows": [
                    {"a": [format_rational(c) for c in a], "b": format_rational(b)}
                    for a, b in obj.rows
                ],
            }
        }
    if isinstance(obj, BoxUnion):
        return {"union": [to_jsonable(b) for b in obj.boxes]}
    if isinstance(obj, HellyInstance):
        return {
            "type": "helly",
            "dim": obj.dim,
            "halfspaces": [to_jsonable(h) for h in obj.halfspaces],
            "witnesses": [[format_rational(c) for c in w] for w in obj.witnesses],
        }
    if isinstance(obj, LinfBallFamily):
        return {
            "type": "family",
            "balls": [to_jsonable(b) for b in obj.balls],
            "subset": to_jsonable(obj.subset) if obj.subset is not None else None,
        }
    if hasattr(obj, "__dataclass_fields__"):
        return {k: to_jsonable(getattr(obj, k)) for k in obj.__dataclass_fields__}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _rational(value: Any) -> Fraction:
    try:
        return parse_rational(value)
    except RationalParseError as exc:
        raise ParseError(str(exc)) from exc


def _point(values: Any) -> Point:
    if not isinstance(values, list):
        raise ParseError("point must be a list of rationals")
    return tuple(_rational(v) for v in values)


def parse_ball(data: Any) -> Ball:
    try:
        return Ball(_point(data["center"]), _rational(data["r"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad ball: {exc}") from exc
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def parse_box(data: Any) -> Box:
    try:
        return Box(_point(data["lo"]), _point(data["hi"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad box: {exc}") from exc


def parse_polyhedron(data: Any) -> HPolyhedron:
    try:
        rows = tuple(
            (tuple(_rational(c) for c in row["a"]), _rational(row["b"]))
            for row in data["rows"]
        )
        return HPolyhedron(int(data["dim"]), rows)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad polyhedron: {exc}") from exc
    except HyperballError:
        raise
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc


def parse_subset(data: Any):
    if data is None:
        return None
    if "polyhedron" in data:
        return parse_polyhedron(data["polyhedron"])
    if "box" in data:
        return parse_box(data["box"])
    if "union" in data:
        return BoxUnion(tuple(parse_box(item["box"]) for item in data["union"]))
    raise ParseError("subset must be a polyhedron, box, union, or null")


def parse_instance(source: str | Path | dict):
    """Parse an instance file (or already-loaded dict) into domain objects.

    Returns a pair (kind, payload); validation errors carry the offending
    indices from the underlying checks.
    """
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON at line {exc.lineno}") from exc
    else:
        data = source
    if not isinstance(data, dict):
        raise ParseError("instance must be a JSON object")
    if "polyhedron" in data and "type" not in data:
        return "polyhedron", parse_polyhedron(data["polyhedron"])
    if "ball" in data and "type" not in data:
        return "ball", parse_ball(data["ball"])
    if "box" in data and "type" not in data:
        return "box", parse_box(data["box"])
    kind = data.get("type")
    if kind == "matrix":
        try:
            matrix = [[_rational(v) for v in row] for row in data["dist"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad matrix: {exc}") from exc
        try:
            return "metric", validate_metric(matrix)
        except MetricError as exc:
            raise ValidationError(str(exc)) from exc
    if kind == "graph":
        try:
            weights = (
                tuple(_rational(w) for w in data["weights"]) if "weights" in data else None
            )
            graph = GraphInstance(
                int(data["n"]),
                tuple((int(u), int(v)) for u, v in data["edges"]),
                weights,
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad graph: {exc}") from exc
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        return "graph", graph
    if kind == "family":
        balls = tuple(parse_ball(item["ball"]) for item in data["balls"])
        subset = parse_subset(data.get("subset"))
        try:
            return "family", LinfBallFamily(balls, subset)
        except (ValueError, HyperballError) as exc:
            raise ValidationError(str(exc)) from exc
    if kind == "helly":
        halfspaces = tuple(parse_polyhedron(h["polyhedron"]) for h in data["halfspaces"])
        witnesses = tuple(_point(w) for w in data["witnesses"])
        try:
            return "helly", HellyInstance(int(data["dim"]), halfspaces, witnesses)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
    if kind == "triple":
        sets = tuple(parse_subset(s) for s in data["sets"])
        if len(sets) != 3:
            raise ParseError("triple instance needs exactly 3 sets")
        return "triple", (sets, _point(data["x0"]))
    if kind == "chain":
        sets = tuple(parse_subset(s) for s in data["sets"])
        if len(sets) != 2:
            raise ParseError("chain instance needs exactly 2 sets")
        return "chain", {
            "sets": sets,
            "x": _point(data["x"]),
            "y": _point(data["y"]),
            "r": _rational(data["r"]),
            "eps": _rational(data["eps"]),
            "delta": _rational(data["delta"]),
        }
    if kind == "points":
        return "points", tuple(_point(p) for p in data["points"])
    if kind == "ip":
        return "ip", {
            "k": int(data["k"]),
            "eps": _rational(data["eps"]) if "eps" in data else None,
            "balls": tuple(parse_ball(item["ball"]) for item in data["balls"]),
        }
    raise ParseError(f"unknown instance type {kind!r}")


def metric_from_instance(kind: str, payload):
    if kind == "metric":
        return payload
    if kind == "graph":
        return graph_metric(payload)
    raise ValidationError(f"instance kind {kind!r} has no metric backend")
