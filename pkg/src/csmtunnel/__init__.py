"""Charge-simulation conformal maps for deep and shallow tunnel cavities, with the shallow
gravitational excavation solution built on them."""

from .deep_map import DeepMap, solve_deep, solve_deep_backward, solve_deep_forward
from .diagnostics import deep_error_report, grid_pullback, i_ratio_defect, shallow_error_report
from .elasticity import (MaterialParams, build_canonical_X, eval_fields, ground_split, residual_report,
                         solve_series, total_fields)
from .geometry import Arc, EllipticArc, Line, build_boundary, discretize, round_corners
from .shallow_map import MobiusMap, ShallowCompositeMap, solve_shallow

__version__ = "0.1.0"

__all__ = ["Arc", "DeepMap", "EllipticArc", "Line", "MaterialParams", "MobiusMap", "ShallowCompositeMap",
           "build_boundary", "build_canonical_X", "deep_error_report", "discretize", "eval_fields",
           "grid_pullback", "ground_split", "i_ratio_defect", "residual_report", "round_corners",
           "shallow_error_report", "solve_deep", "solve_deep_backward", "solve_deep_forward", "solve_series",
           "solve_shallow", "total_fields"]
