"""Structure learning for discrete Markov networks via marginal
pseudo-likelihood: per-node blanket discovery, restricted-space hill climbing,
exact pseudo-Boolean optimization, baseline scores, and a synthetic-model
experiment harness.
"""

from .blanket_search import find_all_blankets, find_markov_blanket
from .chordal import bdeu_score, is_chordal, mcs_order, orient
from .dataset import (
    CountTable,
    DataFormatError,
    Dataset,
    count_configurations,
    load_dataset,
    write_dataset,
)
from .graph import (
    BlanketFamily,
    ConfusionCounts,
    UGraph,
    combine,
    confusion,
    is_symmetric,
    read_graph,
    restricted_neighbors,
    write_graph,
)
from .graph_search import brute_force_optimum, hill_climb
from .pbo import (
    CapacityError,
    PboProblem,
    decode,
    encode,
    read_assignment,
    solve_internal,
    write_opb,
)
from .scores import (
    SPARSITY,
    UNIFORM,
    LocalScoreCache,
    ScoreParams,
    graph_log_prior,
    log_gamma,
    log_pseudo_bayes_factor,
    mpl_global,
    mpl_local,
    pic_local,
)
from .synthetic import (
    DagModel,
    FactorModel,
    draw_factors,
    gen_component,
    maximal_cliques,
    moralize,
    read_dag,
    read_model,
    replicate,
    sample,
    sample_dag,
    write_dag,
    write_model,
)

__version__ = "0.1.0"

__all__ = [
    "BlanketFamily",
    "CapacityError",
    "ConfusionCounts",
    "CountTable",
    "DagModel",
    "DataFormatError",
    "Dataset",
    "FactorModel",
    "LocalScoreCache",
    "PboProblem",
    "SPARSITY",
    "ScoreParams",
    "UGraph",
    "UNIFORM",
    "bdeu_score",
    "brute_force_optimum",
    "combine",
    "confusion",
    "count_configurations",
    "decode",
    "draw_factors",
    "encode",
    "find_all_blankets",
    "find_markov_blanket",
    "gen_component",
    "graph_log_prior",
    "hill_climb",
    "is_chordal",
    "is_symmetric",
    "load_dataset",
    "log_gamma",
    "log_pseudo_bayes_factor",
    "maximal_cliques",
    "mcs_order",
    "moralize",
    "mpl_global",
    "mpl_local",
    "orient",
    "pic_local",
    "read_assignment",
    "read_dag",
    "read_graph",
    "read_model",
    "replicate",
    "restricted_neighbors",
    "sample",
    "sample_dag",
    "solve_internal",
    "write_dag",
    "write_dataset",
    "write_graph",
    "write_model",
    "write_opb",
]
