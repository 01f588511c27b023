"""Dense and almost-regular subgraphs of graphs with large spectral radius.

Typical use::

    from specreg import complete, Params, decompose
    G = complete(3000)
    dense, trace = decompose(G, Params(c=0.9, eps=0.5))
"""

from .decompose import DecomposeTrace, Params, decompose, theorem_part_count
from .errors import *  # noqa: F401,F403
from .generators import GenSpec, complete, complete_bipartite, cycle, gnm, gnp, path, star, subdivided_star
from .graph import Graph, bipartite_between, build_graph, degree_stats, edge_counts, induced_subgraph
from .io import emit_report, format_edge_list, parse_edge_list
from .pipeline import audit, run_pipeline
from .regularize import RegularizeParams, almost_regularize, verify_almost_regular
from .spectral import EigenPair, SolverConfig, dominant_eigenpair, exact_spectral_radius_small, rayleigh
from .sweep import SweepSpec, sweep

__version__ = "0.1.0"
