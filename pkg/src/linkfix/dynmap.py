"""Certified plane maps, their displacement fields and periodic orbits.

Every map family knows an analytic upper bound ``k`` on ``Lip(f - Id)`` and a
bound on ``Lip(f)`` itself.  Theorem-dependent code only accepts maps whose
bound satisfies ``k <= 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import CertificateError, DomainError, OrbitError
from .geom import Point2, Vec2, angle_between

__all__ = [
    "MapSpec", "Rotation", "Translation", "Bump", "PinnedPerturbation",
    "Composition", "BlackBox", "LipschitzCertificate", "PeriodicOrbit",
    "SegmentReport", "AngleReport",
    "evaluate", "apply_map", "iterate", "displacement", "lip_bound",
    "require_certified", "validate_orbit", "check_segment_no_fixed_point", "check_segment_angle",
    "rotation_orbit", "identity",
]

ORBIT_REL_EPS = 1e-9


class MapSpec:
    """Base class of the map families.

    Subclasses implement a scalar ``_eval(x, y)`` and a vectorised
    ``_apply(pts)``; both must agree.
    """

    def _eval(self, x: float, y: float) -> tuple[float, float]:
        raise NotImplementedError

    def _apply(self, pts: np.ndarray) -> np.ndarray:
        return np.array([self._eval(px, py) for px, py in pts], dtype=float).reshape(-1, 2)

    def __call__(self, p: Sequence[float]) -> Point2:
        return Point2(*self._eval(float(p[0]), float(p[1])))

    def summary(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Rotation(MapSpec):
    center: Point2
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "center", Point2(*map(float, self.center)))
        a = math.remainder(float(self.angle), 2.0 * math.pi)
        if a == -math.pi:
            a = math.pi
        object.__setattr__(self, "angle", a)
        object.__setattr__(self, "_cs", (math.cos(a), math.sin(a)))

    def _eval(self, x, y):
        c, s = self._cs
        cx, cy = self.center
        dx, dy = x - cx, y - cy
        return (cx + c * dx - s * dy, cy + s * dx + c * dy)

    def _apply(self, pts):
        c, s = self._cs
        ctr = np.asarray(self.center)
        q = pts - ctr
        return np.column_stack((c * q[:, 0] - s * q[:, 1], s * q[:, 0] + c * q[:, 1])) + ctr

    def inverse(self) -> "Rotation":
        return Rotation(self.center, -self.angle)

    def summary(self):
        return {"type": "rotation", "center": list(self.center), "angle": self.angle}


@dataclass(frozen=True)
class Translation(MapSpec):
    v: Vec2

    def __post_init__(self):
        object.__setattr__(self, "v", Vec2(*map(float, self.v)))

    def _eval(self, x, y):
        return (x + self.v[0], y + self.v[1])

    def _apply(self, pts):
        return pts + np.asarray(self.v)

    def inverse(self) -> "Translation":
        return Translation(Vec2(-self.v[0], -self.v[1]))

    def summary(self):
        return {"type": "translation", "v": list(self.v)}


def identity() -> Translation:
    return Translation(Vec2(0.0, 0.0))


@dataclass(frozen=True)
class Bump:
    """Compactly supported displacement that also vanishes at pinned points.

    The profile is ``displacement * max(0, 1 - |p - center| / radius)``, damped
    by ``min(1, |p - pin| / pin_radius)`` for every pin.
    """

    center: Point2
    radius: float
    displacement: Vec2
    pins: tuple = ()
    pin_radius: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", Point2(*map(float, self.center)))
        object.__setattr__(self, "displacement", Vec2(*map(float, self.displacement)))
        object.__setattr__(self, "pins", tuple(Point2(*map(float, p)) for p in self.pins))
        if not self.radius > 0 or not self.pin_radius > 0:
            raise DomainError("bump radius and pin radius must be positive")

    def _active_pins(self):
        # a pin farther than radius + pin_radius from the centre is at least
        # pin_radius from every support point, so its damping factor is exactly 1
        reach = self.radius + self.pin_radius
        cx, cy = self.center
        return [p for p in self.pins if math.hypot(p[0] - cx, p[1] - cy) < reach]

    @cached_property
    def _active(self) -> np.ndarray:
        return np.asarray(self._active_pins(), dtype=float).reshape(-1, 2)

    def lipschitz(self) -> float:
        mag = math.hypot(*self.displacement)
        return mag * (1.0 / self.radius + len(self._active) / self.pin_radius)

    def value(self, x: float, y: float) -> tuple[float, float]:
        w = 1.0 - math.hypot(x - self.center[0], y - self.center[1]) / self.radius
        if w <= 0.0:
            return (0.0, 0.0)
        for px, py in self._active.tolist():
            w *= min(1.0, math.hypot(x - px, y - py) / self.pin_radius)
        return (w * self.displacement[0], w * self.displacement[1])

    def values(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros((len(pts), 2))
        w = 1.0 - np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1]) / self.radius
        inside = np.flatnonzero(w > 0.0)
        if inside.size == 0:
            return out
        q = pts[inside]
        wi = w[inside]
        for px, py in self._active:
            wi = wi * np.minimum(1.0, np.hypot(q[:, 0] - px, q[:, 1] - py) / self.pin_radius)
        out[inside] = wi[:, None] * np.asarray(self.displacement)
        return out

    def summary(self):
        return {"center": list(self.center), "radius": self.radius,
                "displacement": list(self.displacement),
                "pins": [list(p) for p in self.pins], "pin_radius": self.pin_radius}


@dataclass(frozen=True)
class PinnedPerturbation(MapSpec):
    """``base(p) + sum(bump(p))``."""

    base: MapSpec
    bumps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bumps", tuple(self.bumps))

    def _eval(self, x, y):
        fx, fy = self.base._eval(x, y)
        for b in self.bumps:
            bx, by = b.value(x, y)
            fx += bx
            fy += by
        return (fx, fy)

    @cached_property
    def _packed(self):
        # bumps stacked for broadcasting; missing pins are padded at infinity (factor 1)
        B = len(self.bumps)
        P = max((len(b._active) for b in self.bumps), default=0)
        centers = np.array([b.center for b in self.bumps], dtype=float).reshape(B, 2)
        radii = np.array([b.radius for b in self.bumps], dtype=float)
        disp = np.array([b.displacement for b in self.bumps], dtype=float).reshape(B, 2)
        pins = np.full((B, P, 2), np.inf)
        pin_r = np.array([b.pin_radius for b in self.bumps], dtype=float)
        for i, b in enumerate(self.bumps):
            pins[i, :len(b._active)] = b._active
        return centers, radii, disp, pins, pin_r

    def _apply(self, pts):
        out = self.base._apply(pts)
        if not self.bumps:
            return out
        centers, radii, disp, pins, pin_r = self._packed
        diff = pts[:, None, :] - centers[None, :, :]
        w = np.maximum(0.0, 1.0 - np.hypot(diff[..., 0], diff[..., 1]) / radii)
        rows, cols = np.nonzero(w)
        if rows.size:
            q = pts[rows]
            wi = w[rows, cols]
            for k in range(pins.shape[1]):
                pk = pins[cols, k]
                wi = wi * np.minimum(1.0, np.hypot(q[:, 0] - pk[:, 0], q[:, 1] - pk[:, 1]) / pin_r[cols])
            np.add.at(out, rows, wi[:, None] * disp[cols])
        return out

    def summary(self):
        return {"type": "pinned", "base": self.base.summary(),
                "bumps": [b.summary() for b in self.bumps]}


@dataclass(frozen=True)
class Composition(MapSpec):
    """Apply ``maps`` left to right: ``maps[0]`` first."""

    maps: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if not self.maps:
            raise DomainError("empty composition")

    def _eval(self, x, y):
        for m in self.maps:
            x, y = m._eval(x, y)
        return (x, y)

    def _apply(self, pts):
        for m in self.maps:
            pts = m._apply(pts)
        return pts

    def summary(self):
        return {"type": "composition", "maps": [m.summary() for m in self.maps]}


@dataclass(frozen=True)
class BlackBox(MapSpec):
    """Uncertified map given by a callable; can be evaluated but never certified."""

    func: Callable = field(compare=False)
    name: str = "blackbox"

    def _eval(self, x, y):
        fx, fy = self.func(x, y)
        return (float(fx), float(fy))

    def summary(self):
        return {"type": "blackbox", "name": self.name}


def evaluate(m: MapSpec, p: Sequence[float]) -> Point2:
    return m(p)


def apply_map(m: MapSpec, pts) -> np.ndarray:
    """Vectorised evaluation on an ``(N, 2)`` array."""
    return m._apply(np.asarray(pts, dtype=float).reshape(-1, 2))


def iterate(m: MapSpec, p: Sequence[float], times: int) -> Point2:
    x, y = float(p[0]), float(p[1])
    for _ in range(times):
        x, y = m._eval(x, y)
    return Point2(x, y)


def displacement(m: MapSpec, p: Sequence[float]) -> Vec2:
    fx, fy = m._eval(float(p[0]), float(p[1]))
    return Vec2(fx - p[0], fy - p[1])


@dataclass(frozen=True)
class LipschitzCertificate:
    """Upper bounds ``k >= Lip(f - Id)`` and ``lip_map >= Lip(f)``."""

    k: float
    lip_map: float
    breakdown: tuple = ()

    @property
    def certified(self) -> bool:
        return self.k <= 1.0

    def as_dict(self) -> dict:
        return {"k": self.k, "lip_map": self.lip_map,
                "breakdown": [{"component": c, "k": v} for c, v in self.breakdown]}


def lip_bound(m: MapSpec) -> LipschitzCertificate:
    if isinstance(m, Rotation):
        k = 2.0 * abs(math.sin(m.angle / 2.0))
        return LipschitzCertificate(k, 1.0, (("rotation", k),))
    if isinstance(m, Translation):
        return LipschitzCertificate(0.0, 1.0, (("translation", 0.0),))
    if isinstance(m, PinnedPerturbation):
        base = lip_bound(m.base)
        kb = [b.lipschitz() for b in m.bumps]
        parts = base.breakdown + tuple((f"bump[{i}]", v) for i, v in enumerate(kb))
        extra = math.fsum(kb)
        return LipschitzCertificate(base.k + extra, base.lip_map + extra, parts)
    if isinstance(m, Composition):
        k, lip = 0.0, 1.0
        parts = []
        for i, sub in enumerate(m.maps):
            c = lip_bound(sub)
            # (g o h) - Id = (g - Id) o h + (h - Id)
            k = c.k * (1.0 + k) + k
            lip = c.lip_map * lip
            parts.extend((f"maps[{i}].{name}", v) for name, v in c.breakdown)
        return LipschitzCertificate(k, min(lip, 1.0 + k), tuple(parts))
    return LipschitzCertificate(math.inf, math.inf, (("uncertified", math.inf),))


def require_certified(m: MapSpec, cert: Optional[LipschitzCertificate] = None) -> LipschitzCertificate:
    cert = cert if cert is not None else lip_bound(m)
    if not cert.certified:
        raise CertificateError(f"Lipschitz bound k = {cert.k:.6g} exceeds 1", cert)
    return cert


@dataclass(frozen=True)
class PeriodicOrbit:
    points: tuple
    residual: float
    eps: float

    @property
    def n(self) -> int:
        return len(self.points)

    def array(self) -> np.ndarray:
        return np.array(self.points, dtype=float)

    def diameter(self) -> float:
        return _diameter(self.array())

    def shifted(self, start: int) -> "PeriodicOrbit":
        """The same orbit listed from ``points[start]``."""
        pts = self.points[start:] + self.points[:start]
        return PeriodicOrbit(pts, self.residual, self.eps)


def _diameter(arr: np.ndarray) -> float:
    diff = arr[:, None, :] - arr[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def validate_orbit(m: MapSpec, points, eps: Optional[float] = None) -> PeriodicOrbit:
    """Check that ``points`` is a periodic orbit of minimal period ``len(points)``."""
    arr = np.array(points, dtype=float).reshape(-1, 2)
    n = len(arr)
    if n < 2:
        raise OrbitError("an orbit needs at least two points")
    if not np.all(np.isfinite(arr)):
        raise OrbitError("orbit points must be finite")
    diam = _diameter(arr)
    if eps is None:
        eps = ORBIT_REL_EPS * diam
    dist = np.hypot(*(arr[:, None, :] - arr[None, :, :]).transpose(2, 0, 1))
    np.fill_diagonal(dist, np.inf)
    if dist.min() <= 10.0 * eps:
        raise OrbitError("orbit contains duplicate points")
    images = apply_map(m, arr)
    residual = float(np.hypot(*(images - np.roll(arr, -1, axis=0)).T).max())
    if residual > eps:
        raise OrbitError(f"orbit residual {residual:.3g} exceeds tolerance {eps:.3g}")
    x = arr[0]
    for d in range(1, n):
        if n % d == 0 and math.dist(iterate(m, x, d), x) <= eps:
            raise OrbitError(f"period is not minimal: f^{d}(x) = x")
    pts = tuple(Point2(float(a), float(b)) for a, b in arr)
    return PeriodicOrbit(pts, residual, float(eps))


def rotation_orbit(k: int, n: int, radius: float = 1.0, center=(0.0, 0.0), phase: float = 0.0):
    """Orbit of the rotation by ``2*pi*k/n`` through the point at angle ``phase``.

    Returns ``(Rotation, points)``.
    """
    angle = 2.0 * math.pi * k / n
    cx, cy = center
    pts = [Point2(cx + radius * math.cos(phase + i * angle), cy + radius * math.sin(phase + i * angle))
           for i in range(n)]
    return Rotation(Point2(cx, cy), angle), pts


@dataclass
class SegmentReport:
    ok: bool
    min_norm: float
    min_lower_bound: float
    samples: int
    counterexample: Optional[dict] = None


@dataclass
class AngleReport:
    ok: bool
    max_angle: float
    samples: int
    counterexample: Optional[dict] = None


def _segment_checks(m, x, samples, cert, enforce):
    cert = cert if cert is not None else lip_bound(m)
    if enforce:
        require_certified(m, cert)
    if samples < 1:
        raise DomainError("need at least one sample")
    x = Point2(float(x[0]), float(x[1]))
    dx = displacement(m, x)
    if math.hypot(*dx) == 0.0:
        raise DomainError("x is a fixed point")
    return cert, x, dx


def check_segment_no_fixed_point(m: MapSpec, x, samples: int = 100, cert=None, enforce: bool = True) -> SegmentReport:
    """Check that ``[x, f(x)]`` carries no fixed point.

    Points ``y = x + t (f(x) - x)`` with ``t = i / samples`` (``i < samples``) must
    satisfy ``|d(y)| >= |d(x)| - k |x - y| > 0``; the endpoint ``f(x)`` is checked
    for ``d != 0`` directly (injectivity).
    """
    cert, x, dx = _segment_checks(m, x, samples, cert, enforce)
    ndx = math.hypot(*dx)
    t = np.arange(samples) / samples
    ys = np.asarray(x) + t[:, None] * np.asarray(dx)
    d = apply_map(m, ys) - ys
    norms = np.hypot(*d.T)
    lower = ndx - cert.k * t * ndx
    bad = (norms < lower * (1 - 1e-12) - 1e-300) | (lower <= 0) | (norms <= 0)
    fx = (x[0] + dx[0], x[1] + dx[1])
    end_norm = math.hypot(*displacement(m, fx))
    report = SegmentReport(not bad.any() and end_norm > 0, float(min(norms.min(), end_norm)),
                          float(lower.min()), samples + 1)
    if bad.any():
        i = int(np.argmax(bad))
        report.counterexample = {"x": list(x), "y": ys[i].tolist(), "t": float(t[i]),
                                 "norm_d_y": float(norms[i]), "lower_bound": float(lower[i])}
    elif end_norm == 0:
        report.counterexample = {"x": list(x), "y": list(fx), "t": 1.0, "norm_d_y": 0.0}
    return report


def check_segment_angle(m: MapSpec, x, samples: int = 100, cert=None, enforce: bool = True) -> AngleReport:
    """Check that ``d(y)`` makes an angle below pi/2 with ``d(x)`` on ``[x, f(x)]``."""
    cert, x, dx = _segment_checks(m, x, samples, cert, enforce)
    t = np.linspace(0.0, 1.0, samples + 1)
    ys = np.asarray(x) + t[:, None] * np.asarray(dx)
    d = apply_map(m, ys) - ys
    dots = d @ np.asarray(dx)
    bad = dots <= 0
    angles = [angle_between(dx, v) if np.any(v) else math.pi / 2 for v in d]
    report = AngleReport(not bad.any(), float(max(angles)), samples + 1)
    if bad.any():
        i = int(np.argmax(bad))
        report.counterexample = {"x": list(x), "y": ys[i].tolist(), "t": float(t[i]),
                                 "dot": float(dots[i])}
    return report
