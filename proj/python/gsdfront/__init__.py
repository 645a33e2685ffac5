"""Generalized stochastic dominance front tests for text-generation benchmarks."""

from ._core import (
    DataError,
    EvaluationTable,
    agreement,
    calibration,
    coherence,
    contamination,
    d_statistic,
    diversity,
    front_test,
    generate_table,
    gsd_front,
    load_table,
    parse_table,
    perplexity,
    qtext,
    spearman_rho,
    weighted_kappa,
)

__all__ = [
    "DataError",
    "EvaluationTable",
    "agreement",
    "calibration",
    "coherence",
    "contamination",
    "d_statistic",
    "diversity",
    "front_test",
    "generate_table",
    "gsd_front",
    "load_table",
    "parse_table",
    "perplexity",
    "qtext",
    "spearman_rho",
    "weighted_kappa",
]
