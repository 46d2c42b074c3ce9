"""Quintic: both phases, the Box of the Landau-Ginzburg point, and the
chamber series against the contour integral in the geometric phase.

    python3 demos/quintic_phases.py
"""
import numpy as np

from glsmcharge import toriccomb as tc
from glsmcharge.cli import parse_spec
from glsmcharge.coulomb import mb_integral_1d
from glsmcharge.higgs import chamber_partition, convergence_check, theta_from

ALPHA = (0.21, 0.23, 0.27, 0.29, 0.31, 1.17)

spec = parse_spec("quintic")
for zeta in ([1], [-1]):
    cones = tc.minimal_anticones(spec, zeta)
    box = tc.box_elements(spec, zeta)
    print(f"zeta={zeta[0]:+d}: {len(cones)} minimal anticones, Box ages {[str(b.age) for b in box]}")

# the geometric series only converges past the Horn threshold 5 log 5
a0 = tc.make_anticone(spec, (0,))
for z in (7.0, 8.5, 10.0):
    print(f"zeta={z}: inside convergence domain? {convergence_check(spec, a0, [z]).contains}")

th = theta_from([10])
higgs = chamber_partition(spec, [10], th, None, ALPHA)
coul = mb_integral_1d(spec, None, th, None, ALPHA)
print(f"chamber series  {higgs.value:.14g}  ({higgs.shells_used} shells)")
print(f"contour integral {coul.value:.14g}  (|s| <= {coul.truncation_radius:.1f})")
print(f"relative gap {abs(higgs.value - coul.value) / abs(higgs.value):.2e}")

lg = chamber_partition(spec, [-3], theta_from([-3]), None, ALPHA)
print(f"LG phase zeta=-3: {lg.value:.14g}")
print(f"same point by the contour integral: {mb_integral_1d(spec, None, theta_from([-3]), None, ALPHA).value:.14g}")
