"""Deterministic corpus of certified maps with known periodic orbits.

Every entry is an input document.  The families are rotations with
``2|sin(theta/2)| <= 1``, the same rotations conjugated by translations,
rotations plus a bump that moves the fixed point, and rotations plus bumps
that reshape the orbit polygon while keeping it periodic.  Bump budgets keep
the certified ``k`` at most 1.
"""
from __future__ import annotations

import math

import numpy as np

__all__ = ["ROTATION_PAIRS", "corpus_documents", "rotation_document"]

ROTATION_PAIRS = [(1, 6), (1, 7), (1, 8), (1, 9), (1, 10), (1, 11), (1, 12), (1, 13), (2, 13)]


def _k_rotation(k, n):
    return 2.0 * abs(math.sin(math.pi * k / n))


def rotation_document(k: int, n: int, radius=1.0, center=(0.0, 0.0), phase=0.0, name=None) -> dict:
    return {
        "name": name or f"rotation-{k}-{n}",
        "map": {"type": "rotation", "center": list(center), "angle_turns": [k, n]},
        "orbit": {"generate": {"rotation_orbit": {"k": k, "n": n, "radius": radius,
                                                   "center": list(center), "phase": phase}}},
    }


def _orbit(k, n, radius, center, phase):
    ang = 2.0 * math.pi * k / n
    i = np.arange(n)
    return np.column_stack((center[0] + radius * np.cos(phase + i * ang),
                            center[1] + radius * np.sin(phase + i * ang)))


def _rotate(p, center, ang):
    c, s = math.cos(ang), math.sin(ang)
    q = np.asarray(p) - center
    return center + np.array([c * q[0] - s * q[1], s * q[0] + c * q[1]])


def _mover(rng, k, n, radius, center, phase, budget):
    """Rotation plus one off-centre bump that shifts the fixed point."""
    offset = rng.uniform(-0.25, 0.25, size=2) * radius
    rho = 0.4 * radius
    pin_radius = 0.1 * radius
    direction = rng.normal(size=2)
    direction /= np.hypot(*direction)
    disp = direction * budget * rho
    return {
        "map": {"type": "pinned",
                "base": {"type": "rotation", "center": list(center), "angle_turns": [k, n]},
                "bumps": [{"center": (np.asarray(center) + offset).tolist(), "radius": rho,
                           "displacement": disp.tolist(), "pins": "orbit", "pin_radius": pin_radius}]},
        "orbit": {"generate": {"rotation_orbit": {"k": k, "n": n, "radius": radius,
                                                   "center": list(center), "phase": phase}}},
    }


def _shaper(rng, k, n, radius, center, phase, budget):
    """Rotation plus one bump per orbit point; the bumps carry a perturbed orbit."""
    ang = 2.0 * math.pi * k / n
    center = np.asarray(center, dtype=float)
    base = _orbit(k, n, radius, center, phase)
    step = np.hypot(*(base[1] - base[0]))
    r = 0.4 * step
    pin_radius = 0.1 * step
    delta = budget * r / (2.5 * n)
    q = base + rng.uniform(-1.0, 1.0, size=base.shape) * delta / math.sqrt(2.0)
    bumps = []
    for i in range(n):
        target = q[(i + 1) % n]
        disp = target - _rotate(q[i], center, ang)
        others = [q[j].tolist() for j in range(n) if j != i]
        bumps.append({"center": q[i].tolist(), "radius": r, "displacement": disp.tolist(),
                      "pins": others, "pin_radius": pin_radius})
    return {
        "map": {"type": "pinned",
                "base": {"type": "rotation", "center": center.tolist(), "angle_turns": [k, n]},
                "bumps": bumps},
        "orbit": {"points": q.tolist()},
    }


def _conjugate(k, n, radius, center, phase):
    t = list(center)
    return {
        "map": {"type": "composition", "maps": [
            {"type": "translation", "v": [-t[0], -t[1]]},
            {"type": "rotation", "center": [0.0, 0.0], "angle_turns": [k, n]},
            {"type": "translation", "v": t},
        ]},
        "orbit": {"generate": {"rotation_orbit": {"k": k, "n": n, "radius": radius,
                                                   "center": t, "phase": phase}}},
    }


def corpus_documents(seed: int = 1991) -> list[dict]:
    """The certified corpus: 56 input documents, identical for a given seed."""
    rng = np.random.default_rng(seed)
    pairs = [(s * k, n) for k, n in ROTATION_PAIRS for s in (1, -1)]
    docs = []

    def params():
        return (float(rng.uniform(0.5, 3.0)), rng.uniform(-2.0, 2.0, size=2).round(6).tolist(),
                float(rng.uniform(0.0, 2.0 * math.pi)))

    for k, n in pairs:
        radius, center, phase = params()
        docs.append(rotation_document(k, n, radius, center, phase, name=f"rotation{k:+d}/{n}"))
    for k, n in pairs:
        budget = 0.9 * (1.0 - _k_rotation(k, n))
        if budget <= 1e-6:
            continue
        radius, center, phase = params()
        doc = _mover(rng, k, n, radius, center, phase, budget)
        doc["name"] = f"moved{k:+d}/{n}"
        docs.append(doc)
    for k, n in pairs:
        budget = 0.9 * (1.0 - _k_rotation(k, n))
        if budget <= 1e-6:
            continue
        radius, center, phase = params()
        doc = _shaper(rng, k, n, radius, center, phase, budget)
        doc["name"] = f"reshaped{k:+d}/{n}"
        docs.append(doc)
    for k, n in [(1, 6), (-1, 7), (1, 9), (-1, 11), (2, 13), (-2, 13)]:
        radius, center, phase = params()
        doc = _conjugate(k, n, radius, center, phase)
        doc["name"] = f"conjugated{k:+d}/{n}"
        docs.append(doc)
    return docs
