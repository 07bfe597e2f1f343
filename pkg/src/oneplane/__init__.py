"""Straight-line drawability of 1-plane embeddings.

The package decides, for an embedded graph with pairwise edge crossings,
whether the rotation system and outer face can be rearranged (keeping the
set of crossing edge pairs fixed) so that every edge can be drawn as a
straight segment.  It either produces such an embedding or a certificate
consisting of two interleaved crossing cycles that no rearrangement can
untangle.
"""

from .errors import OpeError
from .ope import OnePlaneEmbedding, parse_ope, serialize_ope, validate
from .planar import (
    PlaneGraph,
    planarize,
    region_sets,
    blocks,
    induced_subembedding,
    embedding_components,
)
from .laminar import interval_forest, cycle_forest
from .spindle import Spindle, flip_spindles, parity_table
from .circular import circularize, restrict
from .cycles import (
    build_catalog,
    detect_candidates,
    classify,
    admissible_faces,
    in_factor_cycle,
)
from .oracle import scan_configurations, enumerate_cross_preserving, oracle_decision
from .reembed import (
    ReembedOutcome,
    reroot,
    eliminate_soft,
    reembed_biconnected,
    z_exposed_reembed,
    reembed,
)
from .gen import GeneratorSpec, gen
from . import metrics

__version__ = "0.1.0"

__all__ = [
    "OpeError",
    "OnePlaneEmbedding",
    "parse_ope",
    "serialize_ope",
    "validate",
    "PlaneGraph",
    "planarize",
    "region_sets",
    "blocks",
    "induced_subembedding",
    "embedding_components",
    "interval_forest",
    "cycle_forest",
    "Spindle",
    "flip_spindles",
    "parity_table",
    "circularize",
    "restrict",
    "build_catalog",
    "detect_candidates",
    "classify",
    "admissible_faces",
    "in_factor_cycle",
    "scan_configurations",
    "enumerate_cross_preserving",
    "oracle_decision",
    "ReembedOutcome",
    "reroot",
    "eliminate_soft",
    "reembed_biconnected",
    "z_exposed_reembed",
    "reembed",
    "GeneratorSpec",
    "gen",
    "metrics",
    "__version__",
]
