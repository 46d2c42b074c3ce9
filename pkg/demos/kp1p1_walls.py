"""Local P1 x P1 (rank two): chambers, walls and both wall crossings out of
the geometric chamber.

    python3 demos/kp1p1_walls.py
"""
from glsmcharge import toriccomb as tc
from glsmcharge.cli import parse_spec
from glsmcharge.wallcross import wall_crossing_check

ALPHA = (0.11, 0.13, 0.17, 0.19, 0.23)

spec = parse_spec("kp1p1")
geo = tc.chamber_of(spec, [4, 8])
print("geometric chamber anticones:", geo.index_sets)
for w in tc.walls_of_chamber(spec, geo):
    print(f"  wall normal {w.normal}, neighbour point {[str(x) for x in w.other_side]}")

for zp, zm in (([4, 8], [-4, 8]), ([8, 4], [8, -4])):
    rep = wall_crossing_check(spec, zp, zm, [0, 0], None, ALPHA)
    print(f"{zp} -> {zm}: circuit {rep.circuit.h}, window {rep.circuit.window}, "
          f"max discrepancy {rep.max_discrepancy:.1e}")
