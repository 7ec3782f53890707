#!/usr/bin/env python3
"""Score the full-size synthetic corpus end-to-end and report phase timings.

Uses the ground-truth answers and the mock embedding provider, so the run
is self-contained; it exercises the same code paths as a real scoring run
at realistic scale (12 languages, ~2000 QA items, 136 timeliness items).

    python benchmarks/bench_pipeline.py
    python benchmarks/bench_pipeline.py --languages 4 --dims 256
"""

import argparse
import hashlib
import tempfile
import time
from pathlib import Path

from xlconsist.answers import ground_truth_answers
from xlconsist.consistency import build_report
from xlconsist.dataset import STANDARD_LANGUAGES
from xlconsist.embedding import Embedder, EmbeddingProviderConfig, VectorCache
from xlconsist.fixtures import synthetic_corpus
from xlconsist.textmetrics.chrf import backend_name


def mangle(answers):
    """Degrade answers deterministically so accuracy/timeliness vectors vary."""
    for (lang, item_id), text in answers.answers.items():
        level = hashlib.sha256(f"{lang}|{item_id}".encode()).digest()[0] % 4
        if level == 1:
            text = text[: max(3, len(text) * 2 // 3)]
        elif level == 2:
            text = text[: max(2, len(text) // 3)]
        elif level == 3:
            text = "no idea"
        answers.set_answer(lang, item_id, text, text, "ok")
    return answers


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--languages", type=int, default=12, choices=range(2, 13))
    parser.add_argument("--dims", type=int, default=128)
    args = parser.parse_args()

    languages = STANDARD_LANGUAGES[: args.languages]
    print(f"chrF kernel: {backend_name()}")

    start = time.perf_counter()
    dataset = synthetic_corpus(languages=languages)
    answers = mangle(ground_truth_answers(dataset))
    built = time.perf_counter() - start
    print(
        f"corpus: {len(languages)} languages, {dataset.n_qa} QA items, "
        f"{len(dataset.timeliness_items)} timeliness items  ({built:.2f}s to build)"
    )

    with tempfile.TemporaryDirectory() as tmp:
        cache = VectorCache(Path(tmp) / "vectors.bin")
        embedder = Embedder(
            EmbeddingProviderConfig(kind="mock", expected_dims=args.dims), cache
        )
        start = time.perf_counter()
        report = build_report(answers, dataset, embedder)
        scored = time.perf_counter() - start
        cells = len(languages) * (dataset.n_qa + len(dataset.timeliness_items))
        print(f"full report: {scored:.2f}s  ({cells} answer cells, dims {args.dims})")
        print(f"  embeddings fetched: {embedder.fetched_texts}")

        # warm pass: same answers, cache already populated
        warm_embedder = Embedder(
            EmbeddingProviderConfig(kind="cache-only", expected_dims=args.dims), cache
        )
        start = time.perf_counter()
        warm = build_report(answers, dataset, warm_embedder)
        warm_time = time.perf_counter() - start
        print(f"warm rerun:  {warm_time:.2f}s  (0 fetches, cache-only provider)")
        cache.close()

    assert warm.xsc == report.xsc and warm.xac == report.xac and warm.xtc == report.xtc
    print(
        f"\nscores: xSC {report.xsc:.4f}  xAC {report.xac:.4f}  "
        f"xTC {report.xtc:.4f}  xC {report.xc:.4f} "
        f"(degenerate pairs: xac={report.degenerate_pairs['xac']}, "
        f"xtc={report.degenerate_pairs['xtc']})"
    )


if __name__ == "__main__":
    main()
