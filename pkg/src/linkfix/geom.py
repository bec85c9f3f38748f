"""Planar primitives: points, segments, closed chains and winding numbers.

Sign decisions (``orient``) are exact: a floating-point filter answers the
easy cases and rational arithmetic settles the rest.  Winding numbers come in
two independent flavours, a generic-ray crossing count and an angle sum, so
each can serve as an oracle for the other.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DomainError, GenericityError, ClearanceError

__all__ = [
    "Point2", "Vec2", "Segment", "ClosedChain", "Intersection",
    "orient", "seg_intersect", "angle_between",
    "winding_ray", "winding_anglesum", "point_segment_distance",
    "chain_distance", "signed_area",
]

# Shewchuk's ccwerrboundA for double precision
_CCW_ERRBOUND = (3.0 + 16.0 * 2.0**-53) * 2.0**-53

RAY_REL_EPS = 1e-9
RAY_SIN_EPS = 1e-9
RAY_RETRIES = 64
CLEAR_REL_EPS = 1e-9
ANGLESUM_RESIDUE = 1e-6


class Point2(NamedTuple):
    x: float
    y: float


class Vec2(NamedTuple):
    dx: float
    dy: float


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class Segment:
    """Oriented straight segment from ``a`` to ``b``."""

    a: Point2
    b: Point2

    def __post_init__(self):
        if not _finite(*self.a, *self.b):
            raise DomainError("segment endpoints must be finite")
        if self.a == self.b:
            raise DomainError("segment has zero length")

    @property
    def direction(self) -> Vec2:
        return Vec2(self.b[0] - self.a[0], self.b[1] - self.a[1])

    def length(self) -> float:
        return math.hypot(*self.direction)

    def at(self, t: float) -> Point2:
        return Point2(self.a[0] + t * (self.b[0] - self.a[0]),
                      self.a[1] + t * (self.b[1] - self.a[1]))


class ClosedChain:
    """Implicitly closed polygonal chain; the last vertex connects back to the first.

    Vertices are stored as a read-only ``(N, 2)`` float array.
    """

    __slots__ = ("_v",)

    def __init__(self, vertices: Iterable[Sequence[float]] | np.ndarray):
        v = np.array(vertices, dtype=float).reshape(-1, 2)
        if len(v) < 2:
            raise DomainError("a closed chain needs at least two vertices")
        if not np.all(np.isfinite(v)):
            raise DomainError("chain vertices must be finite")
        if np.any(np.all(v == np.roll(v, -1, axis=0), axis=1)):
            raise DomainError("consecutive chain vertices coincide")
        v.setflags(write=False)
        self._v = v

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    def __len__(self) -> int:
        return len(self._v)

    def __repr__(self) -> str:
        return f"ClosedChain(n={len(self._v)})"

    def segments(self) -> list[Segment]:
        v = self._v
        w = np.roll(v, -1, axis=0)
        return [Segment(Point2(*a), Point2(*b)) for a, b in zip(v.tolist(), w.tolist())]

    def reversed(self) -> "ClosedChain":
        return ClosedChain(self._v[::-1])

    def translated(self, v: Sequence[float]) -> "ClosedChain":
        return ClosedChain(self._v + np.asarray(v, dtype=float))

    def diameter(self) -> float:
        """Bounding-box diagonal, used as the scale for relative tolerances."""
        span = self._v.max(axis=0) - self._v.min(axis=0)
        return float(math.hypot(*span))

    def digest(self) -> bytes:
        return hashlib.blake2b(self._v.tobytes(), digest_size=16).digest()


def orient(a: Sequence[float], b: Sequence[float], c: Sequence[float]) -> int:
    """Sign of twice the signed area of triangle ``abc``; exact."""
    ax, ay = a
    bx, by = b
    cx, cy = c
    left = (bx - ax) * (cy - ay)
    right = (by - ay) * (cx - ax)
    det = left - right
    bound = _CCW_ERRBOUND * (abs(left) + abs(right))
    if det > bound:
        return 1
    if det < -bound:
        return -1
    fa = (Fraction(ax), Fraction(ay))
    exact = (Fraction(bx) - fa[0]) * (Fraction(cy) - fa[1]) - (Fraction(by) - fa[1]) * (Fraction(cx) - fa[0])
    return (exact > 0) - (exact < 0)


@dataclass(frozen=True)
class Intersection:
    """Result of :func:`seg_intersect`.

    ``kind`` is ``"none"``, ``"point"`` or ``"overlap"``.  Point results carry the
    parameters ``t1``/``t2`` along each segment; overlaps carry the shared piece.
    """

    kind: str
    point: Optional[Point2] = None
    t1: Optional[float] = None
    t2: Optional[float] = None
    overlap: Optional[Segment] = None


_NONE = Intersection("none")


def _param_on(seg: Segment, p: Sequence[float]) -> float:
    dx, dy = seg.direction
    return ((p[0] - seg.a[0]) * dx + (p[1] - seg.a[1]) * dy) / (dx * dx + dy * dy)


def seg_intersect(s1: Segment, s2: Segment) -> Intersection:
    """Classify how two closed segments meet."""
    o1 = orient(s1.a, s1.b, s2.a)
    o2 = orient(s1.a, s1.b, s2.b)
    o3 = orient(s2.a, s2.b, s1.a)
    o4 = orient(s2.a, s2.b, s1.b)

    if o1 == 0 and o2 == 0:
        # collinear: compare parameter intervals along s1
        ta = _param_on(s1, s2.a)
        tb = _param_on(s1, s2.b)
        lo, hi = max(0.0, min(ta, tb)), min(1.0, max(ta, tb))
        if lo > hi:
            return _NONE
        if lo == hi:
            p = s1.at(lo)
            exact = s2.a if ta == lo else s2.b
            return Intersection("point", Point2(*exact), lo, _param_on(s2, p))
        return Intersection("overlap", overlap=Segment(s1.at(lo), s1.at(hi)))

    if o1 * o2 > 0 or o3 * o4 > 0:
        return _NONE

    # exact endpoint contacts first, so shared vertices come back bit-identical
    if o1 == 0:
        return Intersection("point", s2.a, _param_on(s1, s2.a), 0.0)
    if o2 == 0:
        return Intersection("point", s2.b, _param_on(s1, s2.b), 1.0)
    if o3 == 0:
        return Intersection("point", s1.a, 0.0, _param_on(s2, s1.a))
    if o4 == 0:
        return Intersection("point", s1.b, 1.0, _param_on(s2, s1.b))

    d1 = s1.direction
    d2 = s2.direction
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    wx, wy = s2.a[0] - s1.a[0], s2.a[1] - s1.a[1]
    t1 = (wx * d2[1] - wy * d2[0]) / denom
    t2 = (wx * d1[1] - wy * d1[0]) / denom
    t1 = min(1.0, max(0.0, t1))
    t2 = min(1.0, max(0.0, t2))
    return Intersection("point", s1.at(t1), t1, t2)


def angle_between(u: Sequence[float], v: Sequence[float]) -> float:
    """Unoriented angle of two nonzero vectors, in ``[0, pi]``."""
    nu = math.hypot(u[0], u[1])
    nv = math.hypot(v[0], v[1])
    if nu == 0.0 or nv == 0.0:
        raise DomainError("angle undefined for a zero vector")
    c = (u[0] * v[0] + u[1] * v[1]) / (nu * nv)
    return math.acos(min(1.0, max(-1.0, c)))


def point_segment_distance(p: Sequence[float], a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distances from ``p`` to each segment ``[a[i], b[i]]`` (vectorised)."""
    p = np.asarray(p, dtype=float)
    ab = b - a
    ap = p - a
    ll = np.einsum("ij,ij->i", ab, ab)
    t = np.clip(np.einsum("ij,ij->i", ap, ab) / np.where(ll > 0, ll, 1.0), 0.0, 1.0)
    closest = a + t[:, None] * ab
    return np.hypot(*(p - closest).T)


def chain_distance(chain: ClosedChain, p: Sequence[float]) -> float:
    v = chain.vertices
    return float(point_segment_distance(p, v, np.roll(v, -1, axis=0)).min())


def signed_area(vertices: np.ndarray) -> float:
    """Shoelace area of a closed chain (positive when counterclockwise)."""
    v = np.asarray(vertices, dtype=float)
    x, y = (v - v[0]).T
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _ray_seed(chain: ClosedChain, p: Sequence[float]) -> int:
    h = hashlib.blake2b(chain.digest(), digest_size=8)
    h.update(np.asarray(p, dtype=float).tobytes())
    return int.from_bytes(h.digest(), "little")


def _ray_crossings(a: np.ndarray, b: np.ndarray, r: np.ndarray, eps: float) -> int:
    """Signed crossings of the ray ``t*r`` (t > 0) with segments ``a->b`` (p at origin)."""
    cra = r[0] * a[:, 1] - r[1] * a[:, 0]
    along = a @ r
    if np.any((np.abs(cra) < eps) & (along > -eps)):
        raise GenericityError("ray passes through a chain vertex")
    crb = np.roll(cra, -1)
    straddle = (cra > 0) != (crb > 0)
    if not np.any(straddle):
        return 0
    e = (b - a)[straddle]
    ce = r[0] * e[:, 1] - r[1] * e[:, 0]
    if np.any(np.abs(ce) < RAY_SIN_EPS * np.hypot(e[:, 0], e[:, 1])):
        raise GenericityError("ray nearly parallel to a crossed segment")
    s = -cra[straddle] / ce
    hit = a[straddle] + s[:, None] * e
    ahead = hit @ r > 0
    return int(np.sum(np.sign(ce[ahead])))


def winding_ray(chain: ClosedChain, p: Sequence[float], ray: Optional[Sequence[float]] = None) -> int:
    """Winding number of ``chain`` around ``p`` as a signed count of ray crossings.

    If ``ray`` is given it is tried first; otherwise (or if it turns out not to be
    generic) directions are drawn from a generator seeded by ``(p, chain)``.
    """
    v = chain.vertices
    diam = chain.diameter()
    if chain_distance(chain, p) <= 1e-15 * max(diam, 1e-300):
        raise DomainError("point lies on the chain")
    a = v - np.asarray(p, dtype=float)
    b = np.roll(a, -1, axis=0)
    eps = RAY_REL_EPS * diam

    if ray is not None:
        r = np.asarray(ray, dtype=float)
        r = r / np.hypot(*r)
        try:
            return _ray_crossings(a, b, r, eps)
        except GenericityError:
            pass
    rng = np.random.default_rng(_ray_seed(chain, p))
    for _ in range(RAY_RETRIES):
        theta = rng.uniform(0.0, 2.0 * math.pi)
        try:
            return _ray_crossings(a, b, np.array([math.cos(theta), math.sin(theta)]), eps)
        except GenericityError:
            continue
    raise GenericityError(f"no generic ray found after {RAY_RETRIES} attempts")


def winding_anglesum(chain: ClosedChain, p: Sequence[float], clearance: Optional[float] = None) -> int:
    """Winding number of ``chain`` around ``p`` from the total subtended angle."""
    v = chain.vertices
    if clearance is None:
        clearance = CLEAR_REL_EPS * chain.diameter()
    if chain_distance(chain, p) < clearance:
        raise ClearanceError("point is closer to the chain than the required clearance")
    a = v - np.asarray(p, dtype=float)
    b = np.roll(a, -1, axis=0)
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = np.einsum("ij,ij->i", a, b)
    turns = math.fsum(np.arctan2(cross, dot).tolist()) / (2.0 * math.pi)
    w = round(turns)
    if abs(turns - w) >= ANGLESUM_RESIDUE:
        raise ClearanceError(f"angle sum {turns!r} is not close to an integer")
    return int(w)
