"""Fixed points of plane maps with Lip(f - Id) <= 1, linked to a periodic orbit.

Pipeline: orbit polygon -> planar faces -> winding numbers and indices ->
fixed point in a face of positive index -> linking number with the orbit.
"""
from .arrangement import (Arrangement, Face, HalfEdge, OrbitPolygon, build_arrangement, build_gamma,
                          face_windings, sample_interior)
from .dynmap import (BlackBox, Bump, Composition, LipschitzCertificate, MapSpec, PeriodicOrbit,
                     PinnedPerturbation, Rotation, Translation, apply_map, check_segment_no_fixed_point, check_segment_angle,
                     displacement, evaluate, identity, iterate, lip_bound, require_certified,
                     rotation_orbit, validate_orbit)
from .errors import (CertificateError, ClearanceError, ConsistencyError, DegeneracyError, DomainError,
                     GenericityError, LinkfixError, OrbitError, TheoremViolation)
from .fixpoint import FixedPointResult, displacement_winding, locate_fixed_point, trace_displacement
from .geom import ClosedChain, Point2, Segment, orient, seg_intersect, winding_anglesum, winding_ray
from .index import FaceIndex, comb_index, face_indices, num_index, orientation_changes, positive_index_face
from .linking import (ArcChain, arc_independence_check, build_loop, detour_arc, linking_number,
                      random_arc, straight_arc)
from .pipeline import analyze, run_pipeline, verify, verify_corpus
from .problem import InputError, Problem, load_problem, read_problem

__version__ = "0.1.0"
