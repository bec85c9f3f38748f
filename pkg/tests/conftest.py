import math

import numpy as np
import pytest

from linkfix.arrangement import build_arrangement, build_gamma, face_windings
from linkfix.corpus import corpus_documents, rotation_document
from linkfix.dynmap import Rotation, rotation_orbit, validate_orbit
from linkfix.problem import load_problem


def star_points(n=13, k=2):
    return [(math.cos(2 * math.pi * k * i / n), math.sin(2 * math.pi * k * i / n)) for i in range(n)]


def rotation_case(k, n):
    """Rotation about the origin by 2 pi k / n with its orbit on the unit circle."""
    m, pts = rotation_orbit(k, n)
    orbit = validate_orbit(m, pts)
    arr = face_windings(build_arrangement(build_gamma(orbit)))
    return m, orbit, arr


@pytest.fixture(scope="session")
def hexagon():
    return rotation_case(1, 6)


@pytest.fixture(scope="session")
def star():
    return rotation_case(2, 13)


@pytest.fixture(scope="session")
def corpus():
    return [load_problem(d) for d in corpus_documents()]


@pytest.fixture(scope="session")
def hexagon_doc():
    return rotation_document(1, 6)


@pytest.fixture(scope="session")
def star_doc():
    return rotation_document(2, 13)
