#!/usr/bin/env python3
"""Benchmark the chrF kernels: compiled extension vs pure-Python fallback.

Spawns one subprocess per backend (the backend is chosen at import time)
over an identical synthetic workload and prints the comparison.

    python benchmarks/bench_chrf.py
    python benchmarks/bench_chrf.py --pairs 5000
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time

LATIN_WORDS = (
    "capital country element planet river mountain ocean treaty president "
    "club city year inventor symbol formula answer republic kingdom empire"
).split()
CJK = "阿根廷布宜诺斯艾利斯东京莫斯科巴黎柏林罗马雅典首尔北京上海广州"
CYRILLIC = "москвасанктпетербургновгородказаньсибирь"


def make_pairs(n, seed=12345):
    rng = random.Random(seed)
    pairs = []
    for _ in range(n):
        kind = rng.random()
        if kind < 0.5:
            words = rng.choices(LATIN_WORDS, k=rng.randint(1, 8))
            ref = " ".join(words)
        elif kind < 0.8:
            ref = "".join(rng.choices(CJK, k=rng.randint(2, 12)))
        else:
            ref = "".join(rng.choices(CYRILLIC, k=rng.randint(3, 15)))
        mutation = rng.random()
        if mutation < 0.3:
            hyp = ref
        elif mutation < 0.7:
            hyp = ref[: max(1, int(len(ref) * rng.uniform(0.3, 0.9)))]
        else:
            hyp = ref[::-1]
        pairs.append((hyp, ref))
    return pairs


def run_workload(n_pairs, repeats):
    from xlconsist.textmetrics import chrf
    from xlconsist.textmetrics.chrf import backend_name

    pairs = make_pairs(n_pairs)
    checksum = 0.0
    start = time.perf_counter()
    for _ in range(repeats):
        for hyp, ref in pairs:
            checksum += chrf(hyp, ref)
    elapsed = time.perf_counter() - start
    scored = n_pairs * repeats
    return {
        "backend": backend_name(),
        "pairs": scored,
        "seconds": elapsed,
        "pairs_per_second": scored / elapsed,
        "checksum": checksum,
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=2000)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--single", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.single:
        print(json.dumps(run_workload(args.pairs, args.repeats)))
        return

    results = {}
    for label, env_value in (("extension", None), ("pure-python", "1")):
        env = dict(os.environ)
        env.pop("XLCONSIST_PURE_PYTHON", None)
        if env_value:
            env["XLCONSIST_PURE_PYTHON"] = env_value
        out = subprocess.run(
            [sys.executable, __file__, "--single",
             "--pairs", str(args.pairs), "--repeats", str(args.repeats)],
            env=env, capture_output=True, text=True, check=True,
        )
        results[label] = json.loads(out.stdout)

    ext = results["extension"]
    pure = results["pure-python"]
    if ext["checksum"] != pure["checksum"]:
        raise SystemExit("backends disagree on scores; refusing to report timings")

    print(f"{'backend':<14} {'kernel':<8} {'pairs':>8} {'seconds':>9} {'pairs/s':>10}")
    for label, result in results.items():
        print(
            f"{label:<14} {result['backend']:<8} {result['pairs']:>8} "
            f"{result['seconds']:>9.3f} {result['pairs_per_second']:>10.0f}"
        )
    if ext["backend"] == "cython":
        print(f"\nspeedup: {pure['seconds'] / ext['seconds']:.2f}x "
              f"(identical scores on {ext['pairs']} pairs)")
    else:
        print("\nextension not built; both rows ran the pure-Python kernel")


if __name__ == "__main__":
    main()
