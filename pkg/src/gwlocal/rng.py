"""Seeded, thread-count independent Monte Carlo plumbing.

A run of M replicas is cut into fixed blocks of ``block_size`` draws and
block b always uses the Philox stream keyed by (seed, b).  Workers only
change which thread evaluates a block; results are merged in block order,
so outputs are bit-identical for any thread count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK_SIZE = 10_000
THREADS_ENV = "GWLOCAL_THREADS"


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def make_rng(seed: int) -> np.random.Generator:
    """Generator for single draws (block 0 of ``seed``)."""
    return block_rng(seed, 0)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def block_sizes(m: int, block_size: int = BLOCK_SIZE) -> list:
    if m < 0:
        raise ValueError("sample size must be >= 0")
    full, rest = divmod(m, block_size)
    return [block_size] * full + ([rest] if rest else [])


def run_blocks(fn, m: int, seed: int, threads: int | None = None,
               block_size: int = BLOCK_SIZE) -> list:
    """Evaluate ``fn(rng, size, block)`` over the fixed block partition of m.

    Returns the per-block results in block order.
    """
    sizes = block_sizes(m, block_size)
    threads = default_threads() if threads is None else max(1, int(threads))
    jobs = [(b, s) for b, s in enumerate(sizes)]

    def work(job):
        b, s = job
        return fn(block_rng(seed, b), s, b)

    if threads == 1 or len(jobs) <= 1:
        return [work(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(work, jobs))


def merge_counts(parts) -> dict:
    """Sum count dictionaries in the given order."""
    out = {}
    for part in parts:
        for k, v in part.items():
            out[k] = out.get(k, 0) + v
    return out
