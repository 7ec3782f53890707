"""Pure-math primitives: chrF score, Spearman correlation, cosine similarity."""

from .chrf import DEFAULT_CHRF, ChrfConfig, backend_name, chrf
from .stats import SpearmanResult, average_ranks, cosine, pearson, spearman, spearman_detailed

__all__ = [
    "ChrfConfig",
    "DEFAULT_CHRF",
    "chrf",
    "backend_name",
    "average_ranks",
    "cosine",
    "pearson",
    "spearman",
    "spearman_detailed",
    "SpearmanResult",
]
