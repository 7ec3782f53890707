"""Pure-Python n-gram statistics backend.

Twin of the compiled `_ngram_cy` extension; whichever imports cleanly is
used by `chrf`. Both return, per n-gram order 1..max_n, the triple
(total hypothesis n-grams, total reference n-grams, multiset overlap).
"""

from __future__ import annotations

from collections import Counter

BACKEND_NAME = "python"


def char_ngram_stats(hyp: str, ref: str, max_n: int) -> list[tuple[int, int, int]]:
    stats = []
    for n in range(1, max_n + 1):
        hyp_counts = Counter(hyp[i : i + n] for i in range(len(hyp) - n + 1))
        ref_counts = Counter(ref[i : i + n] for i in range(len(ref) - n + 1))
        overlap = 0
        # iterate the smaller counter; overlap is sum of per-gram minima
        if len(ref_counts) < len(hyp_counts):
            hyp_counts, ref_counts = ref_counts, hyp_counts
        for gram, count in hyp_counts.items():
            other = ref_counts.get(gram)
            if other is not None:
                overlap += count if count < other else other
        stats.append(
            (max(len(hyp) - n + 1, 0), max(len(ref) - n + 1, 0), overlap)
        )
    return stats


def word_ngram_stats(
    hyp_tokens: list[str], ref_tokens: list[str], max_n: int
) -> list[tuple[int, int, int]]:
    stats = []
    for n in range(1, max_n + 1):
        hyp_counts = Counter(
            tuple(hyp_tokens[i : i + n]) for i in range(len(hyp_tokens) - n + 1)
        )
        ref_counts = Counter(
            tuple(ref_tokens[i : i + n]) for i in range(len(ref_tokens) - n + 1)
        )
        overlap = sum((hyp_counts & ref_counts).values())
        stats.append(
            (
                max(len(hyp_tokens) - n + 1, 0),
                max(len(ref_tokens) - n + 1, 0),
                overlap,
            )
        )
    return stats
