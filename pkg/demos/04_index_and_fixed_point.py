"""Face indices counted from the polygon and measured from f, then a fixed point by bisection."""
from linkfix.arrangement import build_arrangement, build_gamma, face_windings
from linkfix.dynmap import Bump, PinnedPerturbation, lip_bound, rotation_orbit, validate_orbit
from linkfix.fixpoint import locate_fixed_point
from linkfix.index import face_indices, positive_index_face

base, pts = rotation_orbit(2, 13)
# move the fixed point away from the centre without touching the orbit
m = PinnedPerturbation(base, (Bump((0.1, 0.05), 0.3, (0.01, -0.005), pins=pts, pin_radius=0.1),))
cert = lip_bound(m)
arr = face_windings(build_arrangement(build_gamma(validate_orbit(m, pts))))

rows = face_indices(m, arr, cert)
for r in rows:
    print(f"face {r.face:2d}: 2p = {r.orientation_changes}  from polygon {r.comb_index:2d}  "
          f"from f {r.num_index:2d}")

face = positive_index_face(arr, rows)
res = locate_fixed_point(m, arr.faces[face], arr, tol=1e-10, cert=cert)
print(f"face {face}: fixed point {res.location}, residual {res.residual:.2e}, "
      f"{len(res.steps)} subdivisions, degrees additive: {res.degree_additive()}")
