"""JSON input documents: a map tree, an orbit and tolerance options."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .dynmap import (Bump, Composition, MapSpec, PeriodicOrbit, PinnedPerturbation, Rotation,
                     Translation, rotation_orbit, validate_orbit)
from .errors import LinkfixError, OrbitError

__all__ = ["InputError", "Problem", "parse_map", "load_problem", "read_problem", "DEFAULT_OPTIONS"]

DEFAULT_OPTIONS = {
    "tol": 1e-8,
    "eps_orbit": None,
    "eps_clear": None,
    "segment_samples": 100,
}


class InputError(LinkfixError, ValueError):
    """The input document cannot be turned into a map and an orbit."""


@dataclass
class Problem:
    map: MapSpec
    orbit: PeriodicOrbit
    options: dict = field(default_factory=dict)
    name: str = ""
    document: dict = field(default_factory=dict)


def _pair(value, what) -> tuple[float, float]:
    try:
        x, y = value
        x, y = float(x), float(y)
    except (TypeError, ValueError):
        raise InputError(f"{what} must be a pair of numbers, got {value!r}") from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise InputError(f"{what} must be finite")
    return x, y


def _angle(doc: dict) -> float:
    if "angle_turns" in doc:
        k, n = doc["angle_turns"]
        return 2.0 * math.pi * float(k) / float(n)
    if "angle" not in doc:
        raise InputError("rotation needs 'angle' (radians) or 'angle_turns' [k, n]")
    return float(doc["angle"])


def parse_map(doc: Any, orbit_points=None) -> MapSpec:
    """Build a map from its JSON tree; ``"pins": "orbit"`` refers to ``orbit_points``."""
    if not isinstance(doc, dict) or "type" not in doc:
        raise InputError("every map node must be an object with a 'type'")
    kind = doc["type"]
    if kind == "rotation":
        return Rotation(_pair(doc.get("center", (0.0, 0.0)), "rotation center"), _angle(doc))
    if kind == "translation":
        return Translation(_pair(doc.get("v"), "translation vector"))
    if kind in ("pinned", "pinned_perturbation"):
        base = parse_map(doc.get("base"), orbit_points)
        bumps = []
        for b in doc.get("bumps", []):
            pins = b.get("pins", "orbit")
            if pins == "orbit":
                if orbit_points is None:
                    raise InputError("'pins': 'orbit' needs orbit points")
                pins = orbit_points
            try:
                bumps.append(Bump(_pair(b["center"], "bump center"), float(b["radius"]),
                                  _pair(b["displacement"], "bump displacement"),
                                  tuple(_pair(p, "pin") for p in pins), float(b.get("pin_radius", 1.0))))
            except KeyError as exc:
                raise InputError(f"bump is missing {exc}") from None
            except LinkfixError as exc:
                raise InputError(str(exc)) from None
        return PinnedPerturbation(base, tuple(bumps))
    if kind == "composition":
        maps = doc.get("maps")
        if not maps:
            raise InputError("composition needs a non-empty 'maps' list")
        return Composition(tuple(parse_map(m, orbit_points) for m in maps))
    raise InputError(f"unknown map type {kind!r}")


def _orbit_points(doc: Any) -> list:
    if not isinstance(doc, dict):
        raise InputError("'orbit' must be an object")
    if "points" in doc:
        return [_pair(p, "orbit point") for p in doc["points"]]
    gen = doc.get("generate", {}).get("rotation_orbit")
    if gen is None:
        raise InputError("'orbit' needs 'points' or 'generate': {'rotation_orbit': ...}")
    try:
        _, pts = rotation_orbit(int(gen["k"]), int(gen["n"]), float(gen.get("radius", 1.0)),
                                _pair(gen.get("center", (0.0, 0.0)), "orbit center"),
                                float(gen.get("phase", 0.0)))
    except KeyError as exc:
        raise InputError(f"rotation_orbit is missing {exc}") from None
    return [tuple(p) for p in pts]


def load_problem(doc: Any, name: str = "") -> Problem:
    if not isinstance(doc, dict):
        raise InputError("input must be a JSON object")
    if "map" not in doc or "orbit" not in doc:
        raise InputError("input needs 'map' and 'orbit'")
    options = dict(DEFAULT_OPTIONS)
    options.update(doc.get("options", {}) or {})
    pts = _orbit_points(doc["orbit"])
    m = parse_map(doc["map"], pts)
    try:
        orbit = validate_orbit(m, pts, options.get("eps_orbit"))
    except OrbitError as exc:
        raise InputError(f"invalid orbit: {exc}") from None
    return Problem(m, orbit, options, name or doc.get("name", ""), doc)


def read_problem(path) -> Problem:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    return load_problem(doc, doc.get("name", path.stem) if isinstance(doc, dict) else path.stem)
