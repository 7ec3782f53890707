# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled n-gram statistics backend; contract documented in _ngram_py."""

BACKEND_NAME = "cython"


def char_ngram_stats(str hyp, str ref, int max_n):
    cdef Py_ssize_t hyp_len = len(hyp)
    cdef Py_ssize_t ref_len = len(ref)
    cdef Py_ssize_t i, n, hyp_total, ref_total
    cdef long long overlap, prev_count
    cdef dict counts
    cdef object gram, prev
    stats = []
    for n in range(1, max_n + 1):
        hyp_total = hyp_len - n + 1
        if hyp_total < 0:
            hyp_total = 0
        ref_total = ref_len - n + 1
        if ref_total < 0:
            ref_total = 0
        counts = {}
        for i in range(hyp_total):
            gram = hyp[i:i + n]
            prev = counts.get(gram)
            if prev is None:
                counts[gram] = 1
            else:
                counts[gram] = <long long>prev + 1
        # consume hyp counts while walking ref: overlap = sum of per-gram minima
        overlap = 0
        for i in range(ref_total):
            gram = ref[i:i + n]
            prev = counts.get(gram)
            if prev is not None:
                prev_count = <long long>prev
                if prev_count > 0:
                    counts[gram] = prev_count - 1
                    overlap += 1
        stats.append((hyp_total, ref_total, overlap))
    return stats


def word_ngram_stats(list hyp_tokens, list ref_tokens, int max_n):
    cdef Py_ssize_t hyp_len = len(hyp_tokens)
    cdef Py_ssize_t ref_len = len(ref_tokens)
    cdef Py_ssize_t i, n, hyp_total, ref_total
    cdef long long overlap, prev_count
    cdef dict counts
    cdef object gram, prev
    stats = []
    for n in range(1, max_n + 1):
        hyp_total = hyp_len - n + 1
        if hyp_total < 0:
            hyp_total = 0
        ref_total = ref_len - n + 1
        if ref_total < 0:
            ref_total = 0
        counts = {}
        for i in range(hyp_total):
            gram = tuple(hyp_tokens[i:i + n])
            prev = counts.get(gram)
            if prev is None:
                counts[gram] = 1
            else:
                counts[gram] = <long long>prev + 1
        overlap = 0
        for i in range(ref_total):
            gram = tuple(ref_tokens[i:i + n])
            prev = counts.get(gram)
            if prev is not None:
                prev_count = <long long>prev
                if prev_count > 0:
                    counts[gram] = prev_count - 1
                    overlap += 1
        stats.append((hyp_total, ref_total, overlap))
    return stats
