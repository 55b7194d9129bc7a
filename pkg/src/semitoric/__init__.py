"""Exact invariants of 4-dimensional semitoric integrable systems."""

from .affine import PiecewiseAffineMap, VerticalLine, apply_cut, apply_map, apply_map_polygon, apply_Tk
from .equivalence import (
    Comparison,
    InvariantList,
    OrbitWitness,
    canonical_form,
    canonical_pondered,
    invariant_lists_equal,
    orbits_equal,
    pondered_orbits_equal,
    solve_shear,
)
from .geometry import (
    ConvexityError,
    ConvexPolygon,
    GeometryError,
    MatGL2Z,
    Point2,
    Rational,
    format_rational,
    parse_rational,
    polygons_equal,
)
from .taylor import FormalSeries2, PeriodSample, SigmaField, check_closed, recover_series, regularize, series_equal
from .weighted import (
    ActionError,
    Cut,
    GroupElement,
    MarkedWeightedPolygon,
    PonderedWeightedPolygon,
    WeightedPolygon,
    act,
    act_marked,
    act_pondered,
    height,
    heights,
)

__version__ = "0.1.0"
