from .datasets import (
    MovieData,
    SnapGraph,
    gnp_adjacency,
    ingest_movielens,
    ingest_snap,
    preferential_adjacency,
)
from .suite import (
    ExperimentConfig,
    ResultRow,
    csv_hash,
    run_cells,
    run_suite,
    write_csv,
)

__all__ = [
    "ExperimentConfig",
    "MovieData",
    "ResultRow",
    "SnapGraph",
    "csv_hash",
    "gnp_adjacency",
    "ingest_movielens",
    "ingest_snap",
    "preferential_adjacency",
    "run_cells",
    "run_suite",
    "write_csv",
]
