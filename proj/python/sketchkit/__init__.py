"""Sketch-based repository generation toolkit."""

from ._core import (
    DomainError,
    EmptyRepository,
    Error,
    SketchParseError,
    SlotNotFound,
    SourceSyntaxError,
    brevity_penalty,
    canonical_format,
    classify_difficulty,
    dataflow_edges,
    dataset_counts,
    extract_file_sketch,
    extract_repo_sketch,
    kind_counts,
    kind_sequence,
    max_weight_matching,
    normalize_repo_sketch,
    parse_readme,
    parses,
    sketch_code_paths,
    sketchbleu,
    splice_function_body,
    tokenize,
    topo_sort,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
