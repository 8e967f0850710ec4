"""Deterministic replicate execution.

Replicate ``i`` of a run always receives the seed
``derive_replicate_seed(stream, i)``, and results are collected in replicate
order, so the output never depends on the number of worker processes.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import numpy as np

from .pointprocess import derive_replicate_seed, stream_seed


def replicate_seeds(master_seed: int, n: int, *stream: int) -> list[int]:
    base = stream_seed(master_seed, *stream)
    return [derive_replicate_seed(base, i) for i in range(n)]


def run_replicates(task: Callable, seeds: Sequence[int], workers: int = 1) -> list:
    """``[task(s) for s in seeds]``, optionally spread over processes.

    ``task`` must be picklable (a module-level function or a
    :func:`functools.partial` of one) when ``workers > 1``.
    """
    seeds = list(seeds)
    if workers is None or workers <= 1 or len(seeds) < 2:
        return [task(s) for s in seeds]
    chunk = max(1, len(seeds) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task, seeds, chunksize=chunk))


def run_array(task: Callable, seeds: Sequence[int], workers: int = 1) -> np.ndarray:
    return np.asarray(run_replicates(task, seeds, workers), dtype=float)
