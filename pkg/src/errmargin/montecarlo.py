"""Seeded sampling of measurement records.

Random numbers come from numpy's Philox4x64-10 counter-based generator.
Shots are cut into fixed blocks of ``BLOCK_SIZE``; block ``b`` draws from its
own stream keyed by ``SeedSequence([seed, b])``. Counts therefore depend only
on ``(seed, shots)``, not on how blocks are spread over workers.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bloch import BlochOperator, pair_trace
from .measurement import Povm
from .states import Ensemble

GENERATOR = "philox4x64-10/numpy; block stream SeedSequence([seed, block]); block=65536"
BLOCK_SIZE = 65536
NEGATIVE_TOL = 1e-12
SUM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SimulationStats:
    shots: int
    counts: np.ndarray  # (3, 4): state index x outcome label
    p_success_hat: float
    p_error_hat: float
    p_inconclusive_hat: float
    stderr_success: float
    seed: int
    generator: str = GENERATOR


def outcome_distribution(state: BlochOperator, povm: Povm) -> np.ndarray:
    """``tr(E_mu rho)`` for mu = 0..3, clamped and renormalized."""
    probs = np.array([pair_trace(e, state) for e in povm.elements])
    if probs.min() < -NEGATIVE_TOL:
        raise ValueError(f"negative outcome probability {probs.min():.3e}; invalid POVM")
    if abs(probs.sum() - 1.0) > SUM_TOL:
        raise ValueError(f"outcome probabilities sum to {probs.sum():.12f}; invalid POVM")
    probs = np.maximum(probs, 0.0)
    return probs / probs.sum()


def _cdf(probs: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs, axis=-1)
    cdf[..., -1] = 1.0
    return cdf


def _block_counts(seed: int, block: int, size: int, prior_cdf, outcome_cdf) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))
    u = rng.random((2, size))
    state = np.searchsorted(prior_cdf, u[0], side="right")
    outcome = np.sum(outcome_cdf[state] <= u[1][:, None], axis=1)
    counts = np.zeros((3, 4), dtype=np.int64)
    np.add.at(counts, (state, outcome), 1)
    return counts


def simulate(
    ensemble: Ensemble, povm: Povm, shots: int, seed: int = 0, workers: int = 1
) -> SimulationStats:
    if shots < 1:
        raise ValueError(f"shots={shots} must be positive")
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed={seed} is not a 64-bit unsigned integer")
    prior_cdf = _cdf(np.array(ensemble.priors))
    outcome_cdf = _cdf(np.array([outcome_distribution(s, povm) for s in ensemble.states]))
    sizes = [min(BLOCK_SIZE, shots - start) for start in range(0, shots, BLOCK_SIZE)]
    jobs = [(seed, b, size, prior_cdf, outcome_cdf) for b, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda job: _block_counts(*job), jobs))
    else:
        parts = [_block_counts(*job) for job in jobs]
    counts = np.sum(parts, axis=0)

    correct = int(counts[0, 1] + counts[1, 2] + counts[2, 3])
    conclusive = int(counts[:, 1:].sum())
    # one estimate is taken as the complement so that p_s + p_e + p_i == 1.0
    p_s = correct / shots
    if conclusive == shots:
        p_e, p_i = 1.0 - p_s, 0.0
    else:
        p_e = (conclusive - correct) / shots
        p_i = 1.0 - (p_s + p_e)
    return SimulationStats(
        shots=shots,
        counts=counts,
        p_success_hat=p_s,
        p_error_hat=p_e,
        p_inconclusive_hat=p_i,
        stderr_success=float(np.sqrt(p_s * (1.0 - p_s) / shots)),
        seed=seed,
    )
