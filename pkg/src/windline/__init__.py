"""Generalized winding numbers and a residue theorem for cycles through singular points."""

__version__ = "0.1.0"

from .curves import arc, circle, cycle, line, model_sector, polygon, semicircle, sinc_sinh_contour, zeppelin
from .errors import WindlineError
from .geometry import ClosedCurve, Cycle, Segment, corner_angle, find_hits, signed_curvature
from .grt import Verdict, evaluate, improper_integral_demo
from .integrate import PVResult, PVStatus, QuadratureConfig, line_integral, pv_integral
from .laurent import AnalyticFunction, Singularity, SingularityKind, classify, laurent_coeffs, residue
from .winding import winding_bounded, winding_geometric, winding_off_curve, winding_pv

__all__ = [
    "AnalyticFunction",
    "ClosedCurve",
    "Cycle",
    "PVResult",
    "PVStatus",
    "QuadratureConfig",
    "Segment",
    "Singularity",
    "SingularityKind",
    "Verdict",
    "WindlineError",
    "arc",
    "circle",
    "classify",
    "corner_angle",
    "cycle",
    "evaluate",
    "find_hits",
    "improper_integral_demo",
    "laurent_coeffs",
    "line",
    "line_integral",
    "model_sector",
    "polygon",
    "pv_integral",
    "residue",
    "semicircle",
    "signed_curvature",
    "sinc_sinh_contour",
    "winding_bounded",
    "winding_geometric",
    "winding_off_curve",
    "winding_pv",
    "zeppelin",
]
