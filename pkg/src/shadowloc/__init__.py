"""Sensor network localization with shadow edges.

Two localized neighbors leave a node with two mirror hypotheses; a localized
node it cannot hear, lying within range of only one hypothesis, rules that
hypothesis out.  This package implements that inference next to the classic
trilateration closure (TNC) and a Monte-Carlo harness comparing the two.
"""
from .engine import (
    CheckResult,
    ConstructionResult,
    Mode,
    all_shadow_anchors,
    apply_shadow_edge,
    bilaterate,
    check_localizable,
    construct_incremental,
    find_shadow_anchor,
    propagate,
    trilaterate,
)
from .experiment import SweepConfig, generate_instance, run_sweep, shadow_edge_fraction
from .geometry import Circle, Point2, circle_intersection, distance, in_disk, is_collinear
from .graph import (
    EdgeKind,
    LocalizationState,
    NetworkGraph,
    NodeRecord,
    Status,
    admissible_sensing_region,
    build_unit_disk_graph,
    neighbors,
)

__version__ = "0.1.0"
