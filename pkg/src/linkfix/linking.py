"""Linking number of a fixed point with a periodic orbit.

The loop through the orbit is either the orbit polygon itself or the
concatenation of an arc ``c`` from ``x`` to ``f(x)`` with its images
``f(c), ..., f^(n-1)(c)``.  Images are sampled densely enough that each chord
provably stays in a ball that misses the fixed point, so the sampled loop has
the same winding number as the true one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dynmap import LipschitzCertificate, MapSpec, PeriodicOrbit, apply_map, lip_bound
from .errors import ClearanceError, ConsistencyError, DomainError
from .fixpoint import residual
from .geom import ClosedChain, Point2, point_segment_distance, winding_anglesum, winding_ray

__all__ = [
    "ArcChain", "LoopChain", "LinkingResult", "ArcReport",
    "straight_arc", "detour_arc", "random_arc", "build_loop", "decimate",
    "linking_number", "arc_independence_check", "arc_loop",
]

LOOP_REL_CLEARANCE = 1e-6
MAX_LOOP_POINTS = 4_000_000


@dataclass(frozen=True)
class ArcChain:
    """Polyline from ``x`` to ``f(x)``; endpoints are kept bit-exact."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float).reshape(-1, 2)
        if len(pts) < 2:
            raise DomainError("an arc needs two endpoints")
        if not np.all(np.isfinite(pts)):
            raise DomainError("arc points must be finite")
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
        pts = pts[keep]
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def start(self) -> Point2:
        return Point2(*map(float, self.points[0]))

    @property
    def end(self) -> Point2:
        return Point2(*map(float, self.points[-1]))

    def clearance(self, p) -> float:
        a, b = self.points[:-1], self.points[1:]
        return float(point_segment_distance(p, a, b).min())


def straight_arc(x, fx) -> ArcChain:
    return ArcChain(np.array([x, fx], dtype=float))


def detour_arc(x, fx, center, turns: int, radius: Optional[float] = None, samples_per_turn: int = 24) -> ArcChain:
    """Arc from ``x`` to ``f(x)`` that winds ``turns`` extra times around ``center``.

    The arc runs radially from ``x`` to a circle about ``center``, sweeps the
    principal angle from ``x`` to ``f(x)`` plus ``turns`` full turns, and runs
    radially out to ``f(x)``.
    """
    x, fx, c = (np.asarray(p, dtype=float) for p in (x, fx, center))
    ax = math.atan2(x[1] - c[1], x[0] - c[0])
    af = math.atan2(fx[1] - c[1], fx[0] - c[0])
    delta = math.remainder(af - ax, 2.0 * math.pi)
    if radius is None:
        radius = 0.5 * min(np.hypot(*(x - c)), np.hypot(*(fx - c)))
    sweep = delta + 2.0 * math.pi * turns
    m = max(2, int(math.ceil(abs(sweep) / (2.0 * math.pi) * samples_per_turn)) + 1)
    ang = ax + sweep * np.linspace(0.0, 1.0, m)
    circle = c + radius * np.column_stack((np.cos(ang), np.sin(ang)))
    return ArcChain(np.vstack([x, circle, fx]))


def random_arc(rng: np.random.Generator, x, fx, center, max_turns: int = 2) -> tuple[ArcChain, int]:
    """Random detour arc; returns it with its number of extra turns."""
    turns = int(rng.integers(-max_turns, max_turns + 1))
    x, fx, c = (np.asarray(p, dtype=float) for p in (x, fx, center))
    base = min(np.hypot(*(x - c)), np.hypot(*(fx - c)))
    radius = float(rng.uniform(0.3, 1.2)) * base
    arc = detour_arc(x, fx, c, turns, radius, samples_per_turn=int(rng.integers(6, 20)))
    pts = np.array(arc.points)
    if len(pts) > 2:
        # wiggle the circular part radially; it stays in an annulus around the centre
        inner = pts[1:-1] - c
        scale = rng.uniform(0.7, 1.3, size=len(inner))
        pts[1:-1] = c + inner * scale[:, None]
    return ArcChain(pts), turns


@dataclass(frozen=True)
class LoopChain:
    chain: ClosedChain
    max_gap: float
    min_clearance: float
    pieces: int


def _lip_map(cert: LipschitzCertificate) -> float:
    return min(cert.lip_map, 1.0 + cert.k)


def build_loop(m: MapSpec, orbit: PeriodicOrbit, c: ArcChain, x0, cert: Optional[LipschitzCertificate] = None,
               eps_clear: Optional[float] = None) -> LoopChain:
    """Closed loop ``c . f(c) . ... . f^(n-1)(c)`` sampled with certified density.

    A piece of ``c`` of length ``l`` has an image under ``f^j`` inside the ball of
    radius ``L^j l`` around the image of its first endpoint, ``L`` bounding
    ``Lip(f)``.  Pieces are split until that radius is at most a quarter of the
    image point's distance to ``x0``.
    """
    cert = cert if cert is not None else lip_bound(m)
    lip = _lip_map(cert)
    if not math.isfinite(lip):
        raise DomainError("loop construction needs a finite bound on Lip(f)")
    n = orbit.n
    pts = orbit.array()
    if not (np.array_equal(c.points[0], pts[0]) and np.array_equal(c.points[-1], pts[1])):
        raise DomainError("arc must run from orbit.points[0] to orbit.points[1]")
    x0 = np.asarray(x0, dtype=float)
    if eps_clear is None:
        eps_clear = LOOP_REL_CLEARANCE * orbit.diameter()
    if c.clearance(x0) < eps_clear:
        raise ClearanceError("arc passes through or near the fixed point")

    growth = lip ** np.arange(n)
    nodes = np.array(c.points)
    for _ in range(60):
        images = [nodes]
        for _j in range(1, n):
            images.append(apply_map(m, images[-1]))
        piece = np.hypot(*np.diff(nodes, axis=0).T)
        # allowed piece length: min over j of dist(f^j(start), x0) / (4 L^j)
        allowed = np.full(len(piece), np.inf)
        for j, img in enumerate(images):
            dist = np.hypot(*(img - x0).T)
            allowed = np.minimum(allowed, np.minimum(dist[:-1], dist[1:]) / (4.0 * growth[j]))
        if allowed.min() < eps_clear / (4.0 * growth[-1]):
            raise ClearanceError("arc images pass through or near the fixed point")
        split = np.ceil(piece / allowed).astype(int)
        if np.all(split <= 1):
            break
        if split.sum() * n > MAX_LOOP_POINTS:
            raise ClearanceError("certified loop sampling would exceed the point budget")
        split = np.maximum(split, 1)
        piece_id = np.repeat(np.arange(len(split)), split)
        # step number within each piece, 1..split
        step = np.arange(len(piece_id)) - np.repeat(np.cumsum(split) - split, split) + 1
        t = (step / split[piece_id])[:, None]
        seg = nodes[piece_id] + t * (nodes[piece_id + 1] - nodes[piece_id])
        last = step == split[piece_id]
        seg[last] = nodes[piece_id[last] + 1]
        nodes = np.vstack((nodes[:1], seg))
    else:
        raise ConsistencyError("loop refinement did not converge")

    parts = []
    for j, img in enumerate(images):
        img = np.array(img)
        img[0] = pts[j]
        img[-1] = pts[(j + 1) % n]
        parts.append(img[:-1])
    loop = np.vstack(parts)
    gaps = np.hypot(*(np.roll(loop, -1, axis=0) - loop).T)
    clear = float(np.hypot(*(loop - x0).T).min())
    return LoopChain(ClosedChain(loop), float(gaps.max()), clear, len(loop))


def decimate(chain: ClosedChain, p) -> ClosedChain:
    """Fewer-vertex chain with the same winding around ``p``.

    Consecutive kept vertices ``a, b`` are chosen so that every dropped vertex in
    between lies within half of ``|a - p|`` of ``a``; the dropped stretch and the
    chord ``[a, b]`` then share a convex ball that misses ``p``.
    """
    v = chain.vertices
    p = np.asarray(p, dtype=float)
    n = len(v)
    keep = [0]
    a = 0
    window = 64
    while True:
        r = 0.5 * float(np.hypot(*(v[a] - p)))
        b = a + 1
        while b < n:
            stop = min(n, b + window)
            d = np.hypot(*(v[b:stop] - v[a]).T)
            far = np.nonzero(d > r)[0]
            if far.size:
                b = b + int(far[0])
                break
            b = stop
        nxt = max(a + 1, b - 1)
        if nxt >= n:
            break
        keep.append(nxt)
        a = nxt
    if len(keep) < 3:
        return chain
    return ClosedChain(v[keep])


@dataclass(frozen=True)
class LinkingResult:
    omega: int
    n: int
    lk: int
    source: str


def _winding_checked(chain: ClosedChain, x0, clearance: float, decimated: bool) -> int:
    w = winding_anglesum(chain, x0, clearance)
    check = winding_ray(decimate(chain, x0) if decimated else chain, x0)
    if w != check:
        raise ConsistencyError(f"angle-sum winding {w} disagrees with ray winding {check}")
    return w


def linking_number(x0, orbit: PeriodicOrbit, m: MapSpec, via: str = "straight-arc",
                   cert: Optional[LipschitzCertificate] = None, fixed_tol: Optional[float] = None,
                   eps_clear: Optional[float] = None) -> LinkingResult:
    """``Lk(x0, orbit)``: winding of the orbit loop around ``x0`` reduced mod ``n``.

    ``via`` is ``"straight-arc"``, ``"gamma"`` or ``"both"`` (both loops, which must
    give the same winding).  ``fixed_tol`` is the residual accepted for ``x0``;
    it defaults to the orbit tolerance.
    """
    cert = cert if cert is not None else lip_bound(m)
    tol = orbit.eps if fixed_tol is None else fixed_tol
    if residual(m, x0) > tol:
        raise DomainError(f"x0 is not a fixed point (residual {residual(m, x0):.3g} > {tol:.3g})")
    if eps_clear is None:
        eps_clear = LOOP_REL_CLEARANCE * orbit.diameter()
    n = orbit.n
    results = {}
    if via in ("gamma", "both"):
        chain = ClosedChain(orbit.points)
        results["gamma"] = _winding_checked(chain, x0, eps_clear, decimated=False)
    if via in ("straight-arc", "both"):
        c = straight_arc(orbit.points[0], orbit.points[1])
        loop = build_loop(m, orbit, c, x0, cert, eps_clear)
        results["straight-arc"] = _winding_checked(loop.chain, x0, eps_clear, decimated=True)
    if not results:
        raise DomainError(f"unknown loop kind {via!r}")
    if via == "both":
        if results["gamma"] != results["straight-arc"]:
            raise ConsistencyError(f"winding via the orbit polygon ({results['gamma']}) differs from "
                                   f"winding via the straight arc ({results['straight-arc']})")
        via = "gamma"
    omega = results[via]
    return LinkingResult(omega, n, omega % n, via)


def arc_loop(c: ArcChain, c2: ArcChain) -> ClosedChain:
    """The closed curve ``c^-1 c2``: along ``c2`` from ``x`` to ``f(x)``, back along ``c``."""
    back = c.points[-2:0:-1]
    return ClosedChain(np.vstack([c2.points, back]))


@dataclass
class ArcReport:
    omega1: int
    omega2: int
    arc_omega: int
    n: int

    @property
    def mod_ok(self) -> bool:
        return (self.omega1 - self.omega2) % self.n == 0

    @property
    def ok(self) -> bool:
        return self.mod_ok and self.omega2 - self.omega1 == self.n * self.arc_omega

    def as_dict(self) -> dict:
        return {"omega1": self.omega1, "omega2": self.omega2, "arc_omega": self.arc_omega,
                "n": self.n, "ok": self.ok}


def arc_independence_check(m: MapSpec, orbit: PeriodicOrbit, c: ArcChain, c2: ArcChain, x0,
                           cert: Optional[LipschitzCertificate] = None,
                           eps_clear: Optional[float] = None) -> ArcReport:
    """Windings of the loops built on two arcs differ by ``n`` times the winding of ``c^-1 c2``."""
    cert = cert if cert is not None else lip_bound(m)
    if eps_clear is None:
        eps_clear = LOOP_REL_CLEARANCE * orbit.diameter()
    w1 = winding_anglesum(build_loop(m, orbit, c, x0, cert, eps_clear).chain, x0, eps_clear)
    w2 = winding_anglesum(build_loop(m, orbit, c2, x0, cert, eps_clear).chain, x0, eps_clear)
    wa = winding_anglesum(arc_loop(c, c2), x0, eps_clear)
    return ArcReport(w1, w2, wa, orbit.n)
