"""Geographic diversity analysis over image embeddings."""

from geodiv._core import (
    ConfigError,
    DegenerateError,
    DomainError,
    GeodivError,
    IngestError,
    InsufficientDataError,
    MissingGroupError,
    SimilarityEngine,
    Store,
    UndefinedCorrelationError,
    __version__,
    centroid,
    cosine,
    geo_visual_correlation,
    pca2d,
    pearson,
    run_experiment,
    vincenty_distance,
)

__all__ = [
    "ConfigError",
    "DegenerateError",
    "DomainError",
    "GeodivError",
    "IngestError",
    "InsufficientDataError",
    "MissingGroupError",
    "SimilarityEngine",
    "Store",
    "UndefinedCorrelationError",
    "__version__",
    "centroid",
    "cosine",
    "geo_visual_correlation",
    "pca2d",
    "pearson",
    "run_experiment",
    "vincenty_distance",
]
