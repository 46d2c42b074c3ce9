"""Conifold flop: crossing the single wall with a brane inside the window,
and what happens to a brane outside it.

    python3 demos/conifold_flop.py
"""
from glsmcharge.cli import parse_spec
from glsmcharge.errors import GradeRestrictionViolated
from glsmcharge.higgs import theta_from
from glsmcharge.wallcross import (circuit_of_wall, classify_anticones, grade_restriction,
                                  wall_crossing_check, wall_partition)

ALPHA = (0.11, 0.13, 0.17, 0.19)

spec = parse_spec("conifold")
c = circuit_of_wall(spec, [3], [-3])
print(f"circuit h={c.h}, weights {c.h_i}, window {c.window}")

rep = wall_crossing_check(spec, [3], [-3], [0], {(0,): 1}, ALPHA)
for label, v in rep.values.items():
    print(f"  {label:10s} {v:.14g}")
print(f"max discrepancy {rep.max_discrepancy:.1e}")

# <t,h> = 1 sits on the edge of the window
print("grade restriction for t=1:", grade_restriction(c, [0], (1,)))
wd = classify_anticones(spec, c, [3], [-3])
try:
    wall_partition(spec, wd, theta_from([0.0]), {(1,): 1}, ALPHA)
except GradeRestrictionViolated as exc:
    print("refused:", exc)
