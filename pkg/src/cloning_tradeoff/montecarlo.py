"""Seeded Monte Carlo bookkeeping shared by the estimators."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

MIN_SAMPLES = 100


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int

    def agrees_with(self, value: float, n_sigma: float = 3.0, floor: float = 1e-12) -> bool:
        """Whether ``value`` lies within ``n_sigma`` standard errors of the mean.

        ``floor`` covers zero-variance estimators whose scores are exact.
        """
        return abs(self.mean - value) <= n_sigma * self.stderr + floor

    def to_dict(self) -> dict:
        return asdict(self)


def worker_rngs(seed: int, workers: int) -> list[np.random.Generator]:
    """Independent streams derived from the master seed by spawn counter."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(workers)]


def _run(score, n: int, seed: int, workers: int) -> np.ndarray:
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {n}")
    if workers < 1:
        raise ValueError("workers must be positive")
    sizes = [n // workers + (1 if i < n % workers else 0) for i in range(workers)]
    rngs = worker_rngs(seed, workers)
    if workers == 1:
        chunks = [score(sizes[0], rngs[0])]
    else:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(score, sizes, rngs))
    return np.concatenate([np.asarray(c, dtype=float) for c in chunks])


def _summarize(scores: np.ndarray, seed: int) -> McEstimate:
    n = len(scores)
    return McEstimate(float(scores.mean()), float(scores.std(ddof=1) / np.sqrt(n)), n, seed)


def estimate(score: Callable[[int, np.random.Generator], np.ndarray], n: int, seed: int,
             workers: int = 1) -> McEstimate:
    """Run ``score(k, rng)`` (returning ``k`` per-trial scores) over ``n`` trials.

    Trials are split into ``workers`` chunks with their own streams; the result
    depends on ``(n, seed, workers)`` only, never on scheduling.
    """
    return _summarize(_run(score, n, seed, workers), seed)


def estimate_columns(score: Callable[[int, np.random.Generator], np.ndarray], n: int, seed: int,
                     workers: int = 1) -> tuple[McEstimate, ...]:
    """Like ``estimate`` for scores of shape (k, m): one estimate per column."""
    scores = _run(score, n, seed, workers)
    return tuple(_summarize(scores[:, j], seed) for j in range(scores.shape[1]))


def derive_seed(master: int, counter: int) -> int:
    """Deterministic 63-bit child seed for sub-experiment ``counter``."""
    state = np.random.SeedSequence([master, counter]).generate_state(2, dtype=np.uint32)
    return int(state[0]) << 31 | int(state[1]) >> 1
