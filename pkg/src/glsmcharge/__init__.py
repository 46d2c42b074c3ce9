"""Phases, hemisphere partition functions and wall crossing for abelian GLSMs."""
from .errors import *  # noqa: F401,F403
from .qlinalg import det, dual_basis, det_index, sign_wedge, smith_diagonal
from .toriccomb import (Anticone, BoxElement, Chamber, GlsmSpec, box_elements, chamber_of,
                        fixed_point_weights, make_anticone, minimal_anticones, validate_spec,
                        walls_of_chamber)
from .higgs import (SeriesResult, central_charge_equivariant, chamber_partition, convergence_check,
                    convergence_contains, effective_classes, i_function_fixed_point,
                    k_i_function_fixed_point, theta_from)
from .coulomb import (QuadratureResult, line_integral_after_residues, mb_integral_1d,
                      residue_value, small_circle_residue)
from .wallcross import (Circuit, WallData, WallResult, circuit_of_wall, classify_anticones,
                        grade_restriction, p_of_m, ray_corrections, wall_crossing_check,
                        wall_partition)
from .cli import emit_spec, parse_spec

__version__ = "0.1.0"
