"""Multi-view contrastive graph clustering.

Typical use::

    from mcgc import SolverConfig, generate_sbm, SbmConfig, run_pipeline
    report, state, result = run_pipeline(generate_sbm(SbmConfig(seed=1)), SolverConfig(alpha=1.0))
"""
from .errors import (ConfigError, DataError, DivergenceError, EigenError, LengthMismatch,
                     ManifestError, MCGCError, NumericalError, ParseError, ShapeError)
from .graph import (FilterParams, NeighborIndex, SmoothedViews, build_neighbors, graph_filter,
                    normalize, smooth_views)
from .io import SbmConfig, generate_sbm, load_dataset, save_dataset
from .metrics import accuracy, ari, evaluate, f1, nmi
from .model import MultiViewDataset, NormalizedView, View, Violation, make_view, validate_dataset
from .pipeline import run_pipeline
from .solver import (ConsensusState, SolverConfig, contrastive_loss, gradient_S, init_closed_form,
                     solve, update_lambda, update_S)
from .spectral import ClusterResult, cluster_graph, spectral_cluster, symmetrize

__version__ = "0.1.0"
