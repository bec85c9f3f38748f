"""Displacement winding along loops and fixed-point isolation by degree bisection.

The winding of ``d = f - Id`` along a loop is sampled with a certified step:
from a point ``y`` the walk advances at most ``|d(y)| / (2k)``, so ``d`` moves by
at most half its length before the next sample and cannot turn by more than
``pi/6`` in between.  No turn of ``d`` is ever missed.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .arrangement import Arrangement, Face
from .dynmap import LipschitzCertificate, MapSpec, lip_bound, require_certified
from .errors import ClearanceError, ConsistencyError, DomainError
from .geom import ClosedChain, Point2, signed_area

__all__ = [
    "DisplacementTrace", "FixedPointResult", "SubdivisionStep",
    "trace_displacement", "displacement_winding", "locate_fixed_point",
    "residual", "clip_to_box",
]

MIN_SAMPLES_PER_EDGE = 16
ZERO_REL_CLEARANCE = 1e-9
ROUNDING_TOLERANCE = 1e-3
JITTER_RETRIES = 8
NOISE_FLOOR = 256 * 2.0**-52


@dataclass
class DisplacementTrace:
    winding: int
    turns: float
    min_norm: float
    samples: int


def trace_displacement(m: MapSpec, loop, cert: Optional[LipschitzCertificate] = None,
                       clearance: Optional[float] = None, step_scale: float = 1.0,
                       min_samples: int = MIN_SAMPLES_PER_EDGE) -> DisplacementTrace:
    """Continuous angle variation of ``f(y) - y`` as ``y`` runs once around ``loop``."""
    cert = cert if cert is not None else lip_bound(m)
    k = cert.k
    if not math.isfinite(k):
        raise DomainError("sampling needs a finite Lipschitz bound")
    v = loop.vertices if isinstance(loop, ClosedChain) else np.asarray(loop, dtype=float)
    if clearance is None:
        span = v.max(axis=0) - v.min(axis=0)
        clearance = ZERO_REL_CLEARANCE * math.hypot(*span)
    # below this |d| is dominated by rounding in f(y) - y
    clearance = max(clearance, NOISE_FLOOR * float(np.abs(v).max()))
    ev = m._eval
    total = 0.0
    samples = 0
    min_norm = math.inf
    pts = v.tolist()
    nv = len(pts)
    px, py = pts[0]
    fx, fy = ev(px, py)
    prev = (fx - px, fy - py)
    for i in range(nv):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % nv]
        length = math.hypot(bx - ax, by - ay)
        if length == 0.0:
            continue
        cap = length / min_samples
        t = 0.0
        cx, cy = prev
        while True:
            norm = math.hypot(cx, cy)
            if norm < min_norm:
                min_norm = norm
            if norm < clearance:
                raise ClearanceError("zero of the displacement on or near the contour")
            h = cap if k == 0.0 else min(cap, step_scale * norm / (2.0 * k))
            t = min(length, t + h)
            s = t / length
            qx = ax + s * (bx - ax)
            qy = ay + s * (by - ay)
            if t >= length:
                qx, qy = bx, by
            fx, fy = ev(qx, qy)
            nx, ny = fx - qx, fy - qy
            total += math.atan2(cx * ny - cy * nx, cx * nx + cy * ny)
            samples += 1
            cx, cy = nx, ny
            if t >= length:
                break
        prev = (cx, cy)
    turns = total / (2.0 * math.pi)
    w = round(turns)
    if abs(turns - w) >= ROUNDING_TOLERANCE:
        raise ConsistencyError(f"displacement winding {turns!r} is not an integer")
    return DisplacementTrace(int(w), turns, min_norm, samples)


def displacement_winding(m: MapSpec, loop, cert: Optional[LipschitzCertificate] = None, **kw) -> int:
    """Topological degree of ``f - Id`` on the region bounded by ``loop``."""
    return trace_displacement(m, loop, cert, **kw).winding


def residual(m: MapSpec, p) -> float:
    fx, fy = m._eval(float(p[0]), float(p[1]))
    return math.hypot(fx - p[0], fy - p[1])


def clip_to_box(poly: np.ndarray, box: tuple[float, float, float, float]) -> np.ndarray:
    """Sutherland-Hodgman clip of a closed polygon against ``(x0, y0, x1, y1)``.

    For a non-convex polygon the result may contain zero-width bridges along the
    box edges; they are traversed both ways and cancel in any winding count.
    """
    x0, y0, x1, y1 = box
    out = np.asarray(poly, dtype=float)
    for axis, bound, keep_above in ((0, x0, True), (0, x1, False), (1, y0, True), (1, y1, False)):
        if len(out) == 0:
            break
        inside = out[:, axis] >= bound if keep_above else out[:, axis] <= bound
        res = []
        m = len(out)
        for i in range(m):
            cur, nxt = out[i], out[(i + 1) % m]
            cin, nin = inside[i], inside[(i + 1) % m]
            if cin:
                res.append(cur)
            if cin != nin:
                t = (bound - cur[axis]) / (nxt[axis] - cur[axis])
                p = cur + t * (nxt - cur)
                p[axis] = bound
                res.append(p)
        out = np.array(res).reshape(-1, 2)
    if len(out):
        keep = np.any(out != np.roll(out, -1, axis=0), axis=1)
        out = out[keep]
    return out


@dataclass
class SubdivisionStep:
    box: tuple
    parent_degree: int
    child_degrees: tuple
    chosen: int
    jitter_attempt: int


@dataclass
class FixedPointResult:
    location: Point2
    residual: float
    box_radius: float
    degree: int
    multiple: bool = False
    steps: list = field(default_factory=list)

    def degree_additive(self) -> bool:
        return all(s.parent_degree == sum(s.child_degrees) for s in self.steps)


def _jitter(box, attempt: int) -> tuple[float, float]:
    if attempt == 0:
        return 0.0, 0.0
    h = hashlib.blake2b(np.asarray(box, dtype=float).tobytes(), digest_size=16)
    h.update(attempt.to_bytes(2, "little"))
    raw = np.frombuffer(h.digest(), dtype=np.uint64)
    u = raw / float(2**64)
    return tuple(0.3 * (2.0 * u - 1.0))


def _region_degree(m, region, cert):
    if len(region) < 3 or abs(signed_area(region)) == 0.0:
        return 0
    return displacement_winding(m, region, cert)


def locate_fixed_point(m: MapSpec, face_or_loop, arr: Optional[Arrangement] = None, tol: float = 1e-8,
                       cert: Optional[LipschitzCertificate] = None, enforce: bool = True) -> FixedPointResult:
    """Isolate a fixed point inside a face (or any counterclockwise loop) of nonzero degree.

    The region is split into four boxes through a (possibly jittered) centre and
    the search descends into the child of largest ``|degree|``; child degrees
    must add up to the parent degree.  Stops when the box diagonal drops below
    ``tol`` and returns the box centre.
    """
    if not tol > 0:
        raise DomainError("tol must be positive")
    if cert is None:
        cert = lip_bound(m)
    if enforce:
        require_certified(m, cert)
    if isinstance(face_or_loop, Face):
        if arr is None:
            raise DomainError("a face needs its arrangement")
        region = np.array(arr.face_polygon(face_or_loop))
    elif isinstance(face_or_loop, ClosedChain):
        region = np.array(face_or_loop.vertices)
    else:
        region = np.asarray(face_or_loop, dtype=float)
    degree = displacement_winding(m, region, cert)
    if degree == 0:
        raise DomainError("region has zero displacement degree; no fixed point is certified")
    x0, y0 = region.min(axis=0)
    x1, y1 = region.max(axis=0)
    box = (float(x0), float(y0), float(x1), float(y1))
    is_box = False
    steps: list[SubdivisionStep] = []
    multiple = False

    while math.hypot(box[2] - box[0], box[3] - box[1]) >= tol:
        w, hgt = box[2] - box[0], box[3] - box[1]
        for attempt in range(JITTER_RETRIES + 1):
            jx, jy = _jitter(box, attempt)
            sx = box[0] + w * (0.5 + jx)
            sy = box[1] + hgt * (0.5 + jy)
            sx, sy = float(sx), float(sy)
            quads = [(box[0], box[1], sx, sy), (sx, box[1], box[2], sy),
                     (sx, sy, box[2], box[3]), (box[0], sy, sx, box[3])]
            try:
                children, degrees = [], []
                for q in quads:
                    if is_box:
                        child = _box_polygon(q)
                    else:
                        child = clip_to_box(region, q)
                    children.append(child)
                    degrees.append(_region_degree(m, child, cert))
                break
            except ClearanceError:
                if attempt == JITTER_RETRIES:
                    raise
        if sum(degrees) != degree:
            raise ConsistencyError(f"degree not additive: {degree} != sum{tuple(degrees)}")
        nonzero = [i for i, d in enumerate(degrees) if d != 0]
        if len(nonzero) > 1:
            multiple = True
        best = max(range(4), key=lambda i: (abs(degrees[i]), -i))
        steps.append(SubdivisionStep(box, degree, tuple(degrees), best, attempt))
        degree = degrees[best]
        box = quads[best]
        region = children[best]
        if not is_box:
            area = (box[2] - box[0]) * (box[3] - box[1])
            if abs(abs(signed_area(region)) - area) <= 1e-12 * area:
                is_box = True
                region = _box_polygon(box)

    cx, cy = float(0.5 * (box[0] + box[2])), float(0.5 * (box[1] + box[3]))
    radius = 0.5 * math.hypot(box[2] - box[0], box[3] - box[1])
    return FixedPointResult(Point2(cx, cy), residual(m, (cx, cy)), radius, degree, multiple, steps)


def _box_polygon(box) -> np.ndarray:
    x0, y0, x1, y1 = box
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)
