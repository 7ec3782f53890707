"""xlconsist: cross-lingual consistency scoring for LLM answers.

Measures how consistently a model answers the same knowledge question
across languages: semantic consistency (xSC, embedding cosines), accuracy
consistency (xAC, rank correlation of per-item chrF accuracy), timeliness
consistency (xTC, rank correlation of recency-weighted scores), and their
harmonic mean (xC).
"""

__version__ = "0.1.0"

from .answers import AnswerSet, ground_truth_answers, load_answers
from .consistency import (
    ConsistencyReport,
    PairMatrix,
    build_report,
    correlate_matrices,
    domain_breakdown,
    timeliness_score,
    xac,
    xc,
    xsc,
    xtc,
)
from .dataset import (
    Dataset,
    QAItem,
    TimelinessItem,
    dataset_hash,
    load_dataset,
    validate_alignment,
    validate_file,
    write_dataset,
)
from .embedding import Embedder, EmbeddingProviderConfig, VectorCache, cache_key
from .textmetrics import ChrfConfig, chrf, cosine, spearman

__all__ = [
    "__version__",
    "AnswerSet",
    "ground_truth_answers",
    "load_answers",
    "ConsistencyReport",
    "PairMatrix",
    "build_report",
    "correlate_matrices",
    "domain_breakdown",
    "timeliness_score",
    "xac",
    "xc",
    "xsc",
    "xtc",
    "Dataset",
    "QAItem",
    "TimelinessItem",
    "dataset_hash",
    "load_dataset",
    "validate_alignment",
    "validate_file",
    "write_dataset",
    "Embedder",
    "EmbeddingProviderConfig",
    "VectorCache",
    "cache_key",
    "ChrfConfig",
    "chrf",
    "cosine",
    "spearman",
]
