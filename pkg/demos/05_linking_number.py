"""Linking number of a fixed point with a periodic orbit, and independence of the arc."""
import numpy as np

from linkfix.dynmap import rotation_orbit, validate_orbit
from linkfix.linking import arc_independence_check, detour_arc, linking_number, random_arc, straight_arc

for k, n in [(1, 6), (2, 13), (-1, 6)]:
    m, pts = rotation_orbit(k, n)
    orbit = validate_orbit(m, pts)
    res = linking_number((0, 0), orbit, m, via="both")
    print(f"rotation 2pi*{k}/{n}: omega = {res.omega}, Lk = {res.lk} (mod {res.n})")

m, pts = rotation_orbit(2, 13)
orbit = validate_orbit(m, pts)
x, fx = pts[0], pts[1]
rep = arc_independence_check(m, orbit, straight_arc(x, fx), detour_arc(x, fx, (0, 0), 1), (0, 0))
print("straight arc vs one extra turn:", rep.as_dict())

rng = np.random.default_rng(0)
reports = [arc_independence_check(m, orbit, random_arc(rng, x, fx, (0, 0))[0],
                                  random_arc(rng, x, fx, (0, 0))[0], (0, 0)) for _ in range(20)]
print("20 random arc pairs, all consistent:", all(r.ok for r in reports))
