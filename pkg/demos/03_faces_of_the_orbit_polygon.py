"""Faces cut out by a self-crossing orbit polygon and their winding numbers."""
from linkfix.arrangement import build_arrangement, build_gamma, face_windings
from linkfix.dynmap import rotation_orbit, validate_orbit

m, pts = rotation_orbit(2, 13)
arr = face_windings(build_arrangement(build_gamma(validate_orbit(m, pts))))
print(f"V = {len(arr.vertices)}, E = {len(arr.halfedges) // 2}, F = {len(arr.faces)}, "
      f"V - E + F = {arr.euler_characteristic()}")
for f in arr.faces:
    where = "unbounded" if not f.bounded else f"area {f.area:.4f}"
    print(f"face {f.id:2d}: omega = {f.omega:2d}  {where}")
