"""
Seeded random streams.

Every stochastic routine takes an explicit ``numpy.random.Generator``. Monte
Carlo estimators split their work into fixed-size chunks and give each chunk
its own child stream, so the numbers drawn depend on the seed and chunk size
only, never on how many worker threads consume the chunks.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional

import numpy as np

from ..core.config import settings

logger = logging.getLogger(__name__)


def make_rng(seed: int | np.random.SeedSequence | None) -> np.random.Generator:
    return np.random.default_rng(seed)


def child_sequences(
    rng: np.random.Generator, n_children: int
) -> List[np.random.SeedSequence]:
    # one draw from the parent, so sibling estimators stay independent
    root_entropy = int(rng.integers(2**63))
    return np.random.SeedSequence(root_entropy).spawn(n_children)


def chunk_sizes(n_samples: int, chunk: Optional[int] = None) -> List[int]:
    chunk = chunk or settings.MC_CHUNK
    full, rest = divmod(n_samples, chunk)
    sizes = [chunk] * full
    if rest:
        sizes.append(rest)
    return sizes


def map_chunks(
    worker: Callable[[np.random.Generator, int], np.ndarray],
    n_samples: int,
    rng: np.random.Generator,
    threads: Optional[int] = None,
    chunk: Optional[int] = None,
) -> np.ndarray:
    """
    Run ``worker(child_rng, size)`` over partitioned streams and concatenate.

    Args:
        worker: draws ``size`` samples from the given generator
        n_samples: total number of samples
        rng: parent generator (consumes exactly one draw)
        threads: worker threads, defaults to settings.THREADS
        chunk: samples per stream partition, defaults to settings.MC_CHUNK

    Returns:
        1-D array of ``n_samples`` values in chunk order
    """
    sizes = chunk_sizes(n_samples, chunk)
    seqs = child_sequences(rng, len(sizes))
    threads = threads or settings.THREADS

    def run(index: int) -> np.ndarray:
        return np.asarray(
            worker(np.random.default_rng(seqs[index]), sizes[index]),
            dtype=float,
        )

    if threads <= 1 or len(sizes) == 1:
        parts = [run(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, range(len(sizes))))

    logger.debug(
        f"mc chunks={len(sizes)} samples={n_samples} threads={threads}"
    )
    if not parts:
        return np.empty(0)
    return np.concatenate(parts)


def mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return float("nan"), float("nan")
    mean = float(np.mean(values))
    if values.size < 2:
        return mean, 0.0
    return mean, float(np.std(values, ddof=1) / np.sqrt(values.size))
