"""Map families, Lipschitz certificates for f - Id, and periodic orbits."""
import math

from linkfix.dynmap import (Bump, Composition, PinnedPerturbation, Rotation, check_segment_no_fixed_point, check_segment_angle,
                            lip_bound, rotation_orbit, validate_orbit)

for turns in [(1, 6), (1, 7), (2, 13), (1, 3)]:
    m = Rotation((0, 0), 2 * math.pi * turns[0] / turns[1])
    cert = lip_bound(m)
    print(f"rotation by 2pi*{turns[0]}/{turns[1]}: k = {cert.k:.4f}  certified = {cert.certified}")

# a bump that vanishes at the orbit keeps the orbit periodic
base, pts = rotation_orbit(1, 7)
bump = Bump((0.15, -0.1), 0.45, (0.02, 0.015), pins=pts, pin_radius=0.2)
m = PinnedPerturbation(base, (bump,))
orbit = validate_orbit(m, pts)
print("perturbed heptagon: n =", orbit.n, " residual =", orbit.residual, " k =", round(lip_bound(m).k, 4))

# compositions can lose the certificate
twice = Composition((Rotation((0, 0), math.pi / 3), Rotation((0, 0), math.pi / 3)))
print("rotation(pi/3) twice:", lip_bound(twice).as_dict())

# along [x, f(x)] the displacement never vanishes and turns by less than a right angle
r2 = check_segment_no_fixed_point(m, pts[0])
r4 = check_segment_angle(m, pts[0])
print(f"segment check: min |d| = {r2.min_norm:.4f}, max angle = {math.degrees(r4.max_angle):.1f} deg")

# rotation by pi breaks the hypothesis, and the segment check shows where
bad = check_segment_no_fixed_point(Rotation((0, 0), math.pi), (1, 0), enforce=False)
print("rotation by pi:", bad.ok, bad.counterexample)
