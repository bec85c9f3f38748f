import math

import numpy as np
import pytest

from linkfix.arrangement import build_arrangement, build_gamma, face_windings
from linkfix.dynmap import PeriodicOrbit, Translation, apply_map
from linkfix.errors import CertificateError, TheoremViolation
from linkfix.index import (FaceIndex, change_vertices, comb_index, face_indices, num_index,
                           orientation_changes, positive_index_face)

from conftest import rotation_case


def dense_winding(m, poly, per_edge=10_000):
    """Displacement winding from uniform sampling, with no step control at all."""
    a = np.asarray(poly, dtype=float)
    b = np.roll(a, -1, axis=0)
    t = np.arange(per_edge)[None, :, None] / per_edge
    pts = (a[:, None, :] + t * (b - a)[:, None, :]).reshape(-1, 2)
    d = apply_map(m, pts) - pts
    ang = np.unwrap(np.arctan2(d[:, 1], d[:, 0]))
    total = ang[-1] - ang[0] + math.remainder(math.atan2(d[0, 1], d[0, 0]) - ang[-1], 2 * math.pi)
    return round(total / (2 * math.pi))


def arrangement_of(points):
    return face_windings(build_arrangement(build_gamma(PeriodicOrbit(tuple(map(tuple, points)), 0.0, 0.0))))


def test_hexagon_face(hexagon):
    m, _o, arr = hexagon
    f = arr.bounded_faces[0]
    assert orientation_changes(f, arr) == 0
    assert comb_index(f, arr) == 1
    assert num_index(m, f, arr) == 1 == dense_winding(m, arr.face_polygon(f))


def test_star_faces(star):
    m, _o, arr = star
    central = max(arr.bounded_faces, key=lambda f: abs(f.omega))
    assert central.omega == 2
    assert orientation_changes(central, arr) == 0
    assert num_index(m, central, arr) == 1 == dense_winding(m, arr.face_polygon(central))
    for f in arr.bounded_faces:
        if f is central:
            continue
        two_p = orientation_changes(f, arr)
        assert two_p in (0, 2)
        assert comb_index(f, arr) == num_index(m, f, arr)


def test_comb_index_formula():
    rng = np.random.default_rng(4)
    seen = set()
    for _ in range(300):
        pts = rng.uniform(-1, 1, size=(int(rng.integers(4, 10)), 2))
        try:
            arr = arrangement_of(pts)
        except Exception:
            continue
        for f in arr.bounded_faces:
            two_p = orientation_changes(f, arr)
            assert two_p % 2 == 0
            assert two_p == len(change_vertices(f, arr))
            assert comb_index(f, arr) == 1 - two_p // 2
            seen.add(two_p)
    assert {0, 2, 4} <= seen


def test_translation_has_zero_index(hexagon):
    _m, _o, arr = hexagon
    t = Translation((0.3, -0.1))
    for f in arr.bounded_faces:
        assert num_index(t, f, arr) == 0


def test_num_index_refinement_invariant(star):
    m, _o, arr = star
    for f in arr.bounded_faces:
        base = num_index(m, f, arr)
        assert num_index(m, f, arr, step_scale=0.5) == base
        assert num_index(m, f, arr, step_scale=0.25) == base


def test_positive_index_face_examples(hexagon, star):
    m, _o, arr = hexagon
    rows = face_indices(m, arr)
    assert positive_index_face(arr, rows) == arr.bounded_faces[0].id
    m, _o, arr = star
    rows = face_indices(m, arr)
    chosen = positive_index_face(arr, rows)
    assert arr.faces[chosen].omega == 2
    assert next(r for r in rows if r.face == chosen).num_index == 1


def test_tie_goes_to_smallest_id():
    # figure eight: two lobes with omega +1 and -1
    arr = arrangement_of([(0, 0), (1, 1), (1, -1), (-1, 1), (-1, -1)][::1])
    lobes = arr.bounded_faces
    assert sorted(abs(f.omega) for f in lobes) == [1, 1]
    rows = [FaceIndex(f.id, 0, 1, 1) for f in lobes]
    assert positive_index_face(arr, rows) == min(f.id for f in lobes)


def test_positive_index_assertion_fires():
    arr = arrangement_of([(0, 0), (1, 0), (1, 1), (0, 1)])
    rows = [FaceIndex(f.id, 2, 0, 0) for f in arr.bounded_faces]
    with pytest.raises(TheoremViolation):
        positive_index_face(arr, rows)
    assert positive_index_face(arr, rows, enforce=False) == 1


def test_indices_refuse_uncertified_map(hexagon):
    _m, _o, arr = hexagon
    m, _, _ = rotation_case(1, 3)
    with pytest.raises(CertificateError):
        face_indices(m, arr)


def test_index_agreement_on_corpus(corpus):
    for prob in corpus:
        arr = face_windings(build_arrangement(build_gamma(prob.orbit)))
        rows = face_indices(prob.map, arr)
        assert all(r.agreement for r in rows), prob.name
        assert positive_index_face(arr, rows) is not None
