"""Orbit polygon and the planar subdivision it induces.

The arrangement is a half-edge structure.  Faces lie to the left of their
half-edges, so bounded faces are traversed counterclockwise and the unbounded
face clockwise.  Every half-edge remembers the segment of the orbit polygon it
came from and whether it runs along or against that segment.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .dynmap import PeriodicOrbit
from .errors import ConsistencyError, DegeneracyError, DomainError
from .geom import (ClosedChain, Point2, Segment, orient, seg_intersect,
                   point_segment_distance, signed_area, winding_ray)

__all__ = [
    "OrbitPolygon", "HalfEdge", "Face", "Arrangement",
    "build_gamma", "build_arrangement", "face_windings", "sample_interior",
]

SNAP_REL_EPS = 1e-9
INTERIOR_REL_CLEARANCE = 1e-6


@dataclass(frozen=True)
class OrbitPolygon:
    points: tuple
    segments: tuple

    @property
    def n(self) -> int:
        return len(self.segments)

    def chain(self) -> ClosedChain:
        return ClosedChain(self.points)

    def diameter(self) -> float:
        arr = np.array(self.points)
        span = arr.max(axis=0) - arr.min(axis=0)
        return float(math.hypot(*span))


def build_gamma(orbit: PeriodicOrbit) -> OrbitPolygon:
    pts = tuple(Point2(*p) for p in orbit.points)
    n = len(pts)
    if n < 2:
        raise DomainError("orbit polygon needs at least two points")
    segs = tuple(Segment(pts[i], pts[(i + 1) % n]) for i in range(n))
    return OrbitPolygon(pts, segs)


@dataclass(frozen=True)
class HalfEdge:
    id: int
    origin: int
    target: int
    segment: int
    along_gamma: bool
    twin: int
    next: int
    face: int


@dataclass(frozen=True)
class Face:
    """Connected component of the plane minus the orbit polygon.

    ``boundary`` is the half-edge cycle of the face (counterclockwise for bounded
    faces).  Face 0 is the unbounded face.
    """

    id: int
    bounded: bool
    boundary: tuple
    omega: Optional[int] = None
    sample_point: Optional[Point2] = None
    area: float = 0.0


@dataclass(frozen=True)
class Arrangement:
    vertices: np.ndarray
    halfedges: tuple
    faces: tuple
    gamma: OrbitPolygon
    orbit_vertex: tuple  # vertex id of each orbit point

    @property
    def bounded_faces(self) -> list[Face]:
        return [f for f in self.faces if f.bounded]

    @property
    def unbounded_face(self) -> Face:
        return self.faces[0]

    def face_polygon(self, face: Face) -> np.ndarray:
        return self.vertices[[self.halfedges[h].origin for h in face.boundary]]

    def face_chain(self, face: Face) -> ClosedChain:
        return ClosedChain(self.face_polygon(face))

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.halfedges) // 2 + len(self.faces)

    def neighbours(self, face: Face) -> list[int]:
        return [self.halfedges[self.halfedges[h].twin].face for h in face.boundary]


class _VertexSnapper:
    """Merges points closer than ``eps`` using a hash grid."""

    def __init__(self, eps: float):
        self.eps = eps
        self.points: list[tuple[float, float]] = []
        self.grid: dict[tuple[int, int], list[int]] = {}

    def add(self, p) -> int:
        cell = (math.floor(p[0] / self.eps), math.floor(p[1] / self.eps))
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for vid in self.grid.get((cell[0] + dx, cell[1] + dy), ()):
                    q = self.points[vid]
                    if math.hypot(q[0] - p[0], q[1] - p[1]) <= self.eps:
                        return vid
        vid = len(self.points)
        self.points.append((float(p[0]), float(p[1])))
        self.grid.setdefault(cell, []).append(vid)
        return vid


def build_arrangement(gamma: OrbitPolygon, snap_eps: Optional[float] = None) -> Arrangement:
    """Split the orbit polygon at all crossings and extract the faces."""
    n = gamma.n
    if n < 3:
        raise DegeneracyError("orbit polygon with fewer than 3 segments retraces itself")
    pts = gamma.points
    if all(orient(pts[0], pts[1], p) == 0 for p in pts[2:]):
        raise DegeneracyError("all orbit points are collinear")
    diam = gamma.diameter()
    snapper = _VertexSnapper(SNAP_REL_EPS * diam if snap_eps is None else snap_eps)
    orbit_vertex = tuple(snapper.add(p) for p in pts)
    if len(set(orbit_vertex)) != n:
        raise DegeneracyError("orbit points closer than the snapping tolerance")

    on_segment: list[list[tuple[float, int]]] = [[(0.0, orbit_vertex[i]), (1.0, orbit_vertex[(i + 1) % n])]
                                                 for i in range(n)]
    segs = gamma.segments
    for i in range(n):
        for j in range(i + 1, n):
            hit = seg_intersect(segs[i], segs[j])
            if hit.kind == "none":
                continue
            if hit.kind == "overlap":
                raise DegeneracyError(f"segments {i} and {j} overlap; perturb the orbit")
            if j == i + 1 or (i == 0 and j == n - 1):
                # non-overlapping neighbours only meet at their shared orbit point
                continue
            vid = snapper.add(hit.point)
            on_segment[i].append((hit.t1, vid))
            on_segment[j].append((hit.t2, vid))

    vertices = np.array(snapper.points)
    # undirected edges: (u, v) in gamma direction
    edges: list[tuple[int, int, int]] = []
    seen: set[frozenset] = set()
    for s, items in enumerate(on_segment):
        items.sort()
        chain = [items[0][1]]
        for _, vid in items[1:]:
            if vid != chain[-1]:
                chain.append(vid)
        if chain[0] != orbit_vertex[s] or chain[-1] != orbit_vertex[(s + 1) % n]:
            raise DegeneracyError(f"snapping reordered the endpoints of segment {s}")
        if len(set(chain)) != len(chain):
            raise DegeneracyError(f"snapping folded segment {s} onto itself")
        for u, v in zip(chain, chain[1:]):
            key = frozenset((u, v))
            if key in seen:
                raise DegeneracyError("two orbit segments share an edge after snapping")
            seen.add(key)
            edges.append((u, v, s))

    # half-edges 2e (along gamma) and 2e+1 (against)
    origin, target, segment, along = [], [], [], []
    for u, v, s in edges:
        origin += [u, v]
        target += [v, u]
        segment += [s, s]
        along += [True, False]
    nh = len(origin)
    twin = [h ^ 1 for h in range(nh)]

    outgoing: dict[int, list[tuple[float, int]]] = {}
    for h in range(nh):
        d = segs[segment[h]].direction
        if not along[h]:
            d = (-d[0], -d[1])
        outgoing.setdefault(origin[h], []).append((math.atan2(d[1], d[0]), h))
    position = {}
    for vid, lst in outgoing.items():
        lst.sort()
        for k, (_, h) in enumerate(lst):
            position[h] = (vid, k)
    nxt = [0] * nh
    for h in range(nh):
        vid, k = position[twin[h]]
        ring = outgoing[vid]
        # next edge clockwise from the twin keeps the face on the left
        nxt[h] = ring[(k - 1) % len(ring)][1]

    face_of = [-1] * nh
    cycles: list[list[int]] = []
    for h0 in range(nh):
        if face_of[h0] != -1:
            continue
        cyc = []
        h = h0
        while face_of[h] == -1:
            face_of[h] = len(cycles)
            cyc.append(h)
            h = nxt[h]
        if h != h0:
            raise ConsistencyError("half-edge cycle did not close")
        cycles.append(cyc)

    areas = [signed_area(vertices[[origin[h] for h in c]]) for c in cycles]
    outer = [i for i, a in enumerate(areas) if a < 0]
    if len(outer) != 1:
        raise DegeneracyError(f"expected exactly one unbounded face, found {len(outer)}")
    if len(cycles) < 2:
        raise DegeneracyError("orbit polygon bounds no face")
    order = outer + [i for i in range(len(cycles)) if i != outer[0]]
    renum = {old: new for new, old in enumerate(order)}

    # rotate each cycle to start at its smallest half-edge for determinism
    faces = []
    for new, old in enumerate(order):
        cyc = cycles[old]
        k = cyc.index(min(cyc))
        faces.append(Face(new, new != 0, tuple(cyc[k:] + cyc[:k]), area=abs(areas[old])))
    halfedges = tuple(HalfEdge(h, origin[h], target[h], segment[h], along[h], twin[h], nxt[h],
                               renum[face_of[h]]) for h in range(nh))
    arr = Arrangement(vertices, halfedges, tuple(faces), gamma, orbit_vertex)
    if arr.euler_characteristic() != 2:
        raise ConsistencyError(f"Euler characteristic is {arr.euler_characteristic()}, expected 2")
    for h in halfedges:
        if h.face == halfedges[h.twin].face:
            raise ConsistencyError(f"half-edge {h.id} has the same face on both sides")
    vertices.setflags(write=False)
    return arr


def _boundary_clearance(poly: np.ndarray, p) -> float:
    return float(point_segment_distance(p, poly, np.roll(poly, -1, axis=0)).min())


def sample_interior(face: Face, arr: Arrangement) -> Point2:
    """Deterministic point strictly inside a bounded face, well away from its boundary."""
    if not face.bounded:
        raise DomainError("sample_interior needs a bounded face")
    poly = arr.face_polygon(face)
    if len(poly) < 3 or face.area <= 0:
        raise DegeneracyError(f"face {face.id} has zero area")
    span = poly.max(axis=0) - poly.min(axis=0)
    diam = float(math.hypot(*span))
    chain = ClosedChain(poly)
    a = poly
    b = np.roll(poly, -1, axis=0)
    lengths = np.hypot(*(b - a).T)
    best, best_clear = None, -1.0
    for i in np.argsort(-lengths, kind="stable"):
        mid = 0.5 * (a[i] + b[i])
        e = (b[i] - a[i]) / lengths[i]
        normal = np.array([-e[1], e[0]])
        reach = _ray_exit(poly, mid, normal, i)
        if not reach > 0:
            continue
        cand = mid + 0.5 * reach * normal
        clear = _boundary_clearance(poly, cand)
        if clear > best_clear:
            best, best_clear = cand, clear
    required = INTERIOR_REL_CLEARANCE * diam
    for _ in range(4):
        if best is not None and best_clear >= required and winding_ray(chain, best) == 1:
            return Point2(float(best[0]), float(best[1]))
        required /= 10.0
    raise DegeneracyError(f"face {face.id} is a sliver; no interior point with enough clearance")


def _ray_exit(poly: np.ndarray, origin: np.ndarray, direction: np.ndarray, skip: int) -> float:
    """Distance along the ray until it first meets another boundary edge."""
    a = poly - origin
    b = np.roll(poly, -1, axis=0) - origin
    e = b - a
    denom = direction[0] * e[:, 1] - direction[1] * e[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (direction[0] * a[:, 1] - direction[1] * a[:, 0]) / -denom
        t = (a[:, 0] * e[:, 1] - a[:, 1] * e[:, 0]) / denom
    ok = (np.abs(denom) > 0) & (s >= 0) & (s <= 1) & (t > 0)
    ok[skip] = False
    return float(t[ok].min()) if ok.any() else 0.0


def face_windings(arr: Arrangement, gamma: Optional[OrbitPolygon] = None) -> Arrangement:
    """Attach winding numbers to all faces, computed two ways and cross-checked.

    Propagation starts at the unbounded face with winding 0 and crosses one edge at
    a time; each face is also checked with a generic ray from an interior point.
    """
    gamma = gamma or arr.gamma
    chain = gamma.chain()
    he = arr.halfedges
    prop: dict[int, int] = {0: 0}
    queue = deque([0])
    while queue:
        f = queue.popleft()
        for h in arr.faces[f].boundary:
            tw = he[he[h].twin]
            # leaving the left side of gamma to its right lowers the winding
            w = prop[f] - 1 if he[h].along_gamma else prop[f] + 1
            if tw.face in prop:
                if prop[tw.face] != w:
                    raise ConsistencyError(f"winding propagation disagrees at face {tw.face}")
            else:
                prop[tw.face] = w
                queue.append(tw.face)

    faces = []
    lo = arr.vertices.min(axis=0)
    hi = arr.vertices.max(axis=0)
    for face in arr.faces:
        if face.bounded:
            p = sample_interior(face, arr)
        else:
            p = Point2(float(hi[0] + (hi[0] - lo[0]) + 1.0), float(hi[1] + 0.5 * (hi[1] - lo[1]) + 1.0))
        w = winding_ray(chain, p)
        if w != prop[face.id]:
            raise ConsistencyError(f"face {face.id}: ray winding {w} but propagated {prop[face.id]}")
        faces.append(replace(face, omega=w, sample_point=p))
    return replace(arr, faces=tuple(faces))
