"""Winding numbers two ways: generic-ray crossings and summed turning angles."""
import math

from linkfix.geom import ClosedChain, winding_anglesum, winding_ray

square = ClosedChain([(0, 0), (1, 0), (1, 1), (0, 1)])
print("square, centre:", winding_ray(square, (0.5, 0.5)), winding_anglesum(square, (0.5, 0.5)))
print("square reversed:", winding_anglesum(square.reversed(), (0.5, 0.5)))
print("square, far away:", winding_ray(square, (5, 5)))

# the {13/2} star goes around its centre twice
star = ClosedChain([(math.cos(4 * math.pi * i / 13), math.sin(4 * math.pi * i / 13)) for i in range(13)])
print("star {13/2} at the origin:", winding_ray(star, (0, 0)), winding_anglesum(star, (0, 0)))
