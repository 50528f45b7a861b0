"""Budget-constrained chunk-combination search.

Given a query, a pool of candidate chunks, and a token budget, the package
searches for the ordered chunk combination with the highest utility under
a pluggable batch scorer, using a policy-tree Monte-Carlo search with
parallel child expansion. Greedy and exhaustive baselines, deterministic
corpus tooling, a benchmark harness, and a learned configuration agent
round out the toolkit.
"""

from .agent import (
    AgentPrediction,
    AgentWeights,
    forward,
    load_weights,
    predict,
    predict_config,
    save_weights,
)
from .baselines import exhaustive_oracle, greedy_topk
from .bench import BenchOptions, BenchReport, run_bench
from .corpus import (
    Chunk,
    Query,
    chunk_corpus,
    embed,
    estimate_cost,
    fnv1a64,
    load_documents,
    load_queries,
    make_chunk,
    make_query,
    tokenize,
)
from .errors import (
    CoragError,
    IngestError,
    OracleSizeError,
    ScoringError,
    StoreError,
    StoreFormatError,
    WeightsError,
)
from .instances import FAMILIES, Instance, generate_instances, read_instances, write_instances
from .mcts import (
    PolicyTreeNode,
    PolicyTreeSearch,
    SearchConfig,
    SearchResult,
    node_utility,
    search,
)
from .scorers import (
    AdditiveScorer,
    Combination,
    CoverageScorer,
    CountingScorer,
    OrderScorer,
    UtilityScorer,
    make_scorer,
)
from .store import VectorStore

__version__ = "0.1.0"

__all__ = [
    "AdditiveScorer",
    "AgentPrediction",
    "AgentWeights",
    "BenchOptions",
    "BenchReport",
    "Chunk",
    "Combination",
    "CoragError",
    "CountingScorer",
    "CoverageScorer",
    "FAMILIES",
    "IngestError",
    "Instance",
    "OracleSizeError",
    "OrderScorer",
    "PolicyTreeNode",
    "PolicyTreeSearch",
    "Query",
    "ScoringError",
    "SearchConfig",
    "SearchResult",
    "StoreError",
    "StoreFormatError",
    "UtilityScorer",
    "VectorStore",
    "WeightsError",
    "chunk_corpus",
    "embed",
    "estimate_cost",
    "exhaustive_oracle",
    "fnv1a64",
    "forward",
    "generate_instances",
    "greedy_topk",
    "load_documents",
    "load_queries",
    "load_weights",
    "make_chunk",
    "make_query",
    "make_scorer",
    "node_utility",
    "predict",
    "predict_config",
    "read_instances",
    "run_bench",
    "save_weights",
    "search",
    "tokenize",
    "write_instances",
]
