"""Persistent Weisfeiler-Lehman random-walk graph embeddings."""

from ._pwlr import (
    CvReport,
    DatasetEmbedding,
    Error,
    Graph,
    GraphDataset,
    IoError,
    ParseError,
    PwlrConfig,
    ValidationError,
    __version__,
    build_degree_vocab,
    cross_validate,
    edge_heights,
    embed_dataset,
    embed_graph,
    encode_features,
    parse_tu_dataset,
    persistence,
    rw_limit,
    rw_propagate,
    second_eigenvalue,
    stationary_distribution,
    transition_matrix,
    wl_propagate,
)

MODES = ("h0", "h1", "h0h1", "opt-h0", "opt-h1", "opt-h0h1")

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
