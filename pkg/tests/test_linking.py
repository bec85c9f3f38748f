import math

import numpy as np
import pytest

from linkfix.dynmap import Bump, PinnedPerturbation, Rotation, displacement, rotation_orbit, validate_orbit
from linkfix.errors import ClearanceError, DomainError
from linkfix.geom import ClosedChain, point_segment_distance, winding_anglesum, winding_ray
from linkfix.linking import (ArcChain, arc_independence_check, arc_loop, build_loop, decimate, detour_arc,
                             linking_number, random_arc, straight_arc)

from conftest import rotation_case


def hausdorff_to_polygon(points, poly):
    a = np.asarray(poly)
    b = np.roll(a, -1, axis=0)
    return max(float(point_segment_distance(p, a, b).min()) for p in points)


def test_straight_loop_follows_the_hexagon(hexagon):
    m, orbit, _arr = hexagon
    loop = build_loop(m, orbit, straight_arc(orbit.points[0], orbit.points[1]), (0, 0))
    assert hausdorff_to_polygon(loop.chain.vertices, orbit.array()) <= 1e-12
    assert winding_anglesum(loop.chain, (0, 0)) == 1


def test_detour_changes_winding_by_n(hexagon):
    m, orbit, _arr = hexagon
    x, fx = orbit.points[0], orbit.points[1]
    straight = build_loop(m, orbit, straight_arc(x, fx), (0, 0))
    c2 = detour_arc(x, fx, (0, 0), 1)
    detour = build_loop(m, orbit, c2, (0, 0))
    w1 = winding_anglesum(straight.chain, (0, 0))
    w2 = winding_anglesum(detour.chain, (0, 0))
    assert w2 - w1 == orbit.n * winding_anglesum(arc_loop(straight_arc(x, fx), c2), (0, 0)) == orbit.n


def test_two_point_orbit_loop_is_closed():
    m = Rotation((0, 0), math.pi)
    orbit = validate_orbit(m, [(1, 0), (-1, 0)])
    c = ArcChain([(1, 0), (0.3, 0.8), (-1, 0)])
    loop = build_loop(m, orbit, c, (0, 0))
    v = loop.chain.vertices
    assert np.array_equal(v[0], [1.0, 0.0])
    assert winding_anglesum(loop.chain, (0, 0)) == 1
    assert winding_ray(loop.chain, (0, 0)) == 1


@pytest.mark.parametrize("k, n", [(1, 6), (2, 13)])
def test_rotation_linking_number(k, n):
    m, orbit, _arr = rotation_case(k, n)
    for via in ("straight-arc", "gamma", "both"):
        res = linking_number((0, 0), orbit, m, via)
        assert res.lk == k and res.omega == k


def test_negative_winding_normalises():
    m, orbit, _arr = rotation_case(-1, 6)
    res = linking_number((0, 0), orbit, m, "both")
    assert res.omega == -1 and res.lk == 5


def test_outside_fixed_point_has_zero_linking():
    base, pts = rotation_orbit(1, 6)
    far = (5.0, 0.0)
    d = displacement(base, far)
    # a bump that cancels the displacement at (5, 0) creates a second fixed point there
    m = PinnedPerturbation(base, (Bump(far, 1.0, (-d[0], -d[1])),))
    orbit = validate_orbit(m, pts)
    res = linking_number(far, orbit, m, "gamma")
    assert res.omega == 0 and res.lk == 0


def test_x0_must_be_fixed(hexagon):
    m, orbit, _arr = hexagon
    with pytest.raises(DomainError):
        linking_number((0.1, 0), orbit, m)


def test_arc_through_x0_is_rejected(hexagon):
    m, orbit, _arr = hexagon
    c = ArcChain([orbit.points[0], (0, 0), orbit.points[1]])
    with pytest.raises(ClearanceError):
        build_loop(m, orbit, c, (0, 0))


def test_arc_independence_examples(star):
    m, orbit, _arr = star
    x, fx = orbit.points[0], orbit.points[1]
    c = straight_arc(x, fx)
    once = arc_independence_check(m, orbit, c, detour_arc(x, fx, (0, 0), 1), (0, 0))
    assert once.ok and once.omega2 - once.omega1 == orbit.n
    same = arc_independence_check(m, orbit, c, c, (0, 0))
    assert same.ok and same.omega2 == same.omega1
    twice = arc_independence_check(m, orbit, c, detour_arc(x, fx, (0, 0), 2), (0, 0))
    assert twice.ok and twice.omega2 - twice.omega1 == 2 * orbit.n
    # oracle for the arc winding: ray crossing on the concatenated arcs
    assert winding_ray(arc_loop(c, detour_arc(x, fx, (0, 0), 2)), (0, 0)) == 2


def test_random_arc_pairs(hexagon):
    m, orbit, _arr = hexagon
    rng = np.random.default_rng(9)
    x, fx = orbit.points[0], orbit.points[1]
    for _ in range(30):
        c, t1 = random_arc(rng, x, fx, (0, 0))
        c2, t2 = random_arc(rng, x, fx, (0, 0))
        rep = arc_independence_check(m, orbit, c, c2, (0, 0))
        assert rep.ok
        assert rep.arc_omega == winding_ray(arc_loop(c, c2), (0, 0))


def test_base_point_independence(corpus):
    from linkfix.pipeline import run_pipeline
    for prob in corpus[::7]:
        out = run_pipeline(prob)
        x0 = out.fixed_point.location
        tol = 2 * (1 + out.certificate.k) * 1e-8
        lks = {linking_number(x0, prob.orbit.shifted(s), prob.map, "both", fixed_tol=tol).lk
               for s in range(prob.orbit.n)}
        assert lks == {out.linking.lk}


def test_decimation_keeps_winding():
    rng = np.random.default_rng(1)
    t = np.linspace(0, 6 * math.pi, 5000, endpoint=False)
    r = 1 + 0.3 * np.sin(7 * t) + 0.01 * rng.normal(size=t.size)
    chain = ClosedChain(np.column_stack((r * np.cos(t), r * np.sin(t))))
    for p in [(0, 0), (0.05, -0.02), (2, 2)]:
        small = decimate(chain, p)
        assert len(small) < len(chain)
        assert winding_ray(small, p) == winding_anglesum(chain, p)
