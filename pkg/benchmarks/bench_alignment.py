#!/usr/bin/env python3
"""Benchmark the decode hot path with the compiled kernel vs the pure
fallback.

Decoding spends its time aligning every span and inter-group segment of a
generated target against the source tokens (leftmost unused occurrence),
so the corpus decode below is dominated by the kernel under test.

Usage: python3 benchmarks/bench_alignment.py [--docs 400] [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

from anlforge import _alignment
from anlforge.codec import AnlVariant, decode, encode
from anlforge.core import AAE_SCHEMA
from anlforge.synth import synth_corpus


def build_workload(n_docs: int):
    docs = synth_corpus(n_docs, schema=AAE_SCHEMA, seed=2024,
                        relation_mode="tree", with_markers=True,
                        min_sentences=3, max_sentences=6)
    work = []
    for text, graph in docs:
        seq = encode(graph, text, AnlVariant.ME_ACRE, AAE_SCHEMA)
        work.append((seq.target, text))
    return work


def run_once(work) -> float:
    started = time.perf_counter()
    for target, text in work:
        outcome = decode(target, text, AnlVariant.ME_ACRE, AAE_SCHEMA)
        assert outcome.ok
    return time.perf_counter() - started


def kernel_microbench(repeats: int) -> dict[str, float]:
    """Isolated kernel timing: worst-case scans over a long document."""
    import numpy as np

    rng = np.random.default_rng(7)
    hay = rng.integers(0, 50, size=4000).astype(np.int32)
    needles = [hay[start:start + 8].copy() for start in range(3000, 3400, 8)]
    used = np.zeros(len(hay), dtype=np.uint8)
    results = {}
    for backend in _alignment.available_backends():
        _alignment.set_backend(backend)
        best = float("inf")
        for _ in range(repeats):
            started = time.perf_counter()
            for needle in needles:
                _alignment.find_match(hay, needle, used)
            best = min(best, time.perf_counter() - started)
        results[backend] = best
    return results


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=400)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    work = build_workload(args.docs)
    n_tokens = sum(text.n_tokens for _, text in work)
    print(f"corpus decode: {args.docs} documents, {n_tokens} source tokens")
    results: dict[str, float] = {}
    for backend in _alignment.available_backends():
        _alignment.set_backend(backend)
        best = min(run_once(work) for _ in range(args.repeats))
        results[backend] = best
        print(f"{backend:>8}: {best:.3f}s  ({args.docs / best:,.0f} docs/s)")
    if {"python", "cython"} <= results.keys():
        print(f"speedup: {results['python'] / results['cython']:.2f}x "
              f"end to end (parsing overhead included)")

    print("\nkernel only: 50 subsequence scans over a 4000-token document")
    micro = kernel_microbench(args.repeats)
    for backend, best in micro.items():
        print(f"{backend:>8}: {best * 1e3:.2f}ms")
    if {"python", "cython"} <= micro.keys():
        print(f"speedup: {micro['python'] / micro['cython']:.1f}x "
              f"(isolated kernel)")


if __name__ == "__main__":
    main()
