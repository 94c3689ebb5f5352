"""Downscale weighted complex networks while preserving performance.

The toolkit builds smaller replicas of a weighted network (links carry a
capacity in Mb/s and a propagation delay in ms) such that the joint
degree/capacity/delay correlations survive the shrinking, and ships a
deterministic packet-level simulator to check that normalized flow
completion times and packet delays are preserved across scales.
"""

__version__ = "0.1.0"

from .topology import Link, Topology, load_edge_list, save_edge_list, giant_component
from .distfit import EmpiricalCCDF, SmoothedDist, empirical_ccdf, fit_smoothing_spline
from .rescaler import RescaleSpec, rescale

__all__ = [
    "__version__",
    "Link",
    "Topology",
    "load_edge_list",
    "save_edge_list",
    "giant_component",
    "EmpiricalCCDF",
    "SmoothedDist",
    "empirical_ccdf",
    "fit_smoothing_spline",
    "RescaleSpec",
    "rescale",
]
