"""Character/word n-gram F-score (chrF / chrF++ conventions), scaled to [0,1].

Defaults follow chrF++: character orders 1-6, word orders 1-2, beta=2.
Setting word_ngram_max=0 gives plain chrF. Whitespace is removed before
character n-gram extraction; word n-grams split on whitespace, so scripts
written without spaces contribute through character n-grams only.

The per-order counting runs on a compiled kernel when the extension built,
with a pure-Python twin as fallback. Set XLCONSIST_PURE_PYTHON=1 to force
the fallback (used by the benchmark).
"""

from __future__ import annotations

import math
import os
import re
import unicodedata
from dataclasses import dataclass

from . import _ngram_py

if os.environ.get("XLCONSIST_PURE_PYTHON"):
    _ngram = _ngram_py
else:
    try:
        from . import _ngram_cy as _ngram  # type: ignore[no-redef]
    except ImportError:
        _ngram = _ngram_py

_WHITESPACE = re.compile(r"\s+")


def backend_name() -> str:
    """Which n-gram kernel is active: 'cython' or 'python'."""
    return _ngram.BACKEND_NAME


@dataclass(frozen=True)
class ChrfConfig:
    char_ngram_max: int = 6
    word_ngram_max: int = 2
    beta: float = 2.0
    strip_whitespace_for_char_ngrams: bool = True
    case_fold: bool = False

    def __post_init__(self):
        if self.char_ngram_max < 1:
            raise ValueError("char_ngram_max must be >= 1")
        if self.word_ngram_max < 0:
            raise ValueError("word_ngram_max must be >= 0")
        if self.beta <= 0:
            raise ValueError("beta must be > 0")


DEFAULT_CHRF = ChrfConfig()


def _fscore(hyp_total: int, ref_total: int, overlap: int, beta_sq: float) -> float:
    precision = overlap / hyp_total if hyp_total else 0.0
    recall = overlap / ref_total if ref_total else 0.0
    if precision + recall == 0.0:
        return 0.0
    return (1 + beta_sq) * precision * recall / (beta_sq * precision + recall)


def chrf(hypothesis: str, reference: str, cfg: ChrfConfig = DEFAULT_CHRF) -> float:
    """F-beta score averaged over n-gram orders, in [0,1].

    Orders where neither side has any n-grams (e.g. order 6 on two
    3-character strings) are skipped from the average; an order where only
    one side has n-grams counts as 0. Both inputs empty scores 0.
    """
    hypothesis = unicodedata.normalize("NFC", hypothesis)
    reference = unicodedata.normalize("NFC", reference)
    if cfg.case_fold:
        hypothesis = hypothesis.casefold()
        reference = reference.casefold()

    if cfg.strip_whitespace_for_char_ngrams:
        hyp_chars = _WHITESPACE.sub("", hypothesis)
        ref_chars = _WHITESPACE.sub("", reference)
    else:
        hyp_chars, ref_chars = hypothesis, reference

    stats = _ngram.char_ngram_stats(hyp_chars, ref_chars, cfg.char_ngram_max)
    if cfg.word_ngram_max > 0:
        stats += _ngram.word_ngram_stats(
            hypothesis.split(), reference.split(), cfg.word_ngram_max
        )

    beta_sq = cfg.beta * cfg.beta
    scores = [
        _fscore(h, r, o, beta_sq) for h, r, o in stats if h > 0 or r > 0
    ]
    if not scores:
        return 0.0
    return math.fsum(scores) / len(scores)
