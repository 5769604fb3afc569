"""Root counts, exceptional strata and solution orbits of algebraic Kuramoto systems."""

__version__ = "0.1.0"

from .algsys import LaurentSystem, build_system, kuramoto_system
from .census import (
    CountReport,
    balanced_subnetworks,
    count,
    exceptional_faces,
    generic_root_count,
    leaf_reduce,
    shared_edge_strata,
    unicycle_root_count,
)
from .errors import KcensusError
from .homotopy import (
    real_orbit,
    real_orbits,
    screen_real,
    shared_edge_orbit,
    solve,
    unicycle_orbit,
    unicycle_orbits,
    verify_orbit,
)
from .network import GENERIC, Network, load_network, network_from_dict, parse_network
from .polytope import adjacency_polytope, facets, normalized_volume, triangulate

__all__ = [
    "GENERIC",
    "CountReport",
    "KcensusError",
    "LaurentSystem",
    "Network",
    "adjacency_polytope",
    "balanced_subnetworks",
    "build_system",
    "count",
    "exceptional_faces",
    "facets",
    "generic_root_count",
    "kuramoto_system",
    "leaf_reduce",
    "load_network",
    "network_from_dict",
    "normalized_volume",
    "parse_network",
    "real_orbit",
    "real_orbits",
    "screen_real",
    "shared_edge_orbit",
    "shared_edge_strata",
    "solve",
    "triangulate",
    "unicycle_orbit",
    "unicycle_orbits",
    "unicycle_root_count",
    "verify_orbit",
]
