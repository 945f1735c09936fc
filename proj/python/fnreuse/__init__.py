"""Python bindings for the fnreuse core library."""

from ._fnreuse import (
    AttributeKind,
    CandidateSet,
    ConfigError,
    DimensionMismatchError,
    Error,
    IntegrityError,
    LevelAudit,
    MalformedResponseError,
    ObjectiveVector,
    ParseError,
    Provenance,
    QueryCase,
    RankedEntry,
    Ranking,
    RawExtraction,
    Recommendation,
    SemanticRepresentation,
    ValidationError,
    build_prompt,
    cosine_similarity,
    dominates,
    embed,
    jaccard_distance,
    keyword_preprocess,
    load_repr_store,
    make_ranking,
    mrr_at_k,
    multi_level_prune,
    parse_extraction,
    pareto_front,
    porter_stem,
    recall_at_k,
    recommend,
    run_cli,
    scored,
    subset_coverage,
)

__all__ = [name for name in dir() if not name.startswith("_")]
