"""Index of the displacement field on each bounded face.

Two independent routes: the orientation-change count along the face boundary
(``1 - p`` where ``2p`` changes are seen) and the sampled winding of
``f(y) - y`` along the same boundary.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .arrangement import Arrangement, Face
from .dynmap import LipschitzCertificate, MapSpec, lip_bound, require_certified
from .errors import ConsistencyError, TheoremViolation
from .fixpoint import trace_displacement

__all__ = ["FaceIndex", "orientation_changes", "comb_index", "num_index",
           "face_indices", "positive_index_face", "change_vertices"]


@dataclass(frozen=True)
class FaceIndex:
    face: int
    orientation_changes: int
    comb_index: int
    num_index: int

    @property
    def agreement(self) -> bool:
        return self.comb_index == self.num_index


def change_vertices(face: Face, arr: Arrangement) -> list[int]:
    """Boundary vertices where the two adjacent edges carry opposite orientations."""
    he = arr.halfedges
    cyc = face.boundary
    out = []
    for i, h in enumerate(cyc):
        prev = he[cyc[i - 1]]
        if prev.along_gamma != he[h].along_gamma:
            out.append(he[h].origin)
    return out


def orientation_changes(face: Face, arr: Arrangement) -> int:
    count = len(change_vertices(face, arr))
    if count % 2:
        raise ConsistencyError(f"face {face.id}: odd number of orientation changes ({count})")
    return count


def comb_index(face: Face, arr: Arrangement) -> int:
    return 1 - orientation_changes(face, arr) // 2


def num_index(m: MapSpec, face: Face, arr: Arrangement, cert: Optional[LipschitzCertificate] = None,
              enforce: bool = True, **kw) -> int:
    """Winding of ``f - Id`` along the counterclockwise boundary of ``face``."""
    cert = cert if cert is not None else lip_bound(m)
    if enforce:
        require_certified(m, cert)
    return trace_displacement(m, arr.face_polygon(face), cert, **kw).winding


def face_indices(m: MapSpec, arr: Arrangement, cert: Optional[LipschitzCertificate] = None,
                 enforce: bool = True) -> list[FaceIndex]:
    """Both index values for every bounded face; disagreement aborts when ``enforce``."""
    cert = cert if cert is not None else lip_bound(m)
    if enforce:
        require_certified(m, cert)
    rows = []
    for face in arr.bounded_faces:
        two_p = orientation_changes(face, arr)
        row = FaceIndex(face.id, two_p, 1 - two_p // 2, num_index(m, face, arr, cert, enforce=False))
        if enforce and not row.agreement:
            raise TheoremViolation(
                f"face {face.id}: combinatorial index {row.comb_index} != numerical index {row.num_index}",
                {"face": face.id, "polygon": arr.face_polygon(face).tolist(),
                 "orientation_changes": two_p, "num_index": row.num_index})
        rows.append(row)
    return rows


def positive_index_face(arr: Arrangement, indices: list[FaceIndex], enforce: bool = True) -> int:
    """Bounded face of largest ``|omega|`` (smallest id on ties); its index must be positive."""
    by_id = {row.face: row for row in indices}
    bounded = arr.bounded_faces
    if any(f.omega is None for f in bounded):
        raise ConsistencyError("face windings have not been computed")
    best = min(bounded, key=lambda f: (-abs(f.omega), f.id))
    if enforce and by_id[best.id].comb_index <= 0:
        raise TheoremViolation(f"face {best.id} maximises |omega| = {abs(best.omega)} "
                               f"but has index {by_id[best.id].comb_index}",
                               {"face": best.id, "omega": best.omega,
                                "polygon": arr.face_polygon(best).tolist()})
    return best.id
