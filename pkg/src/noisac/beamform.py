"""Active beamforming and cross-entropy search over discrete IRS phases.

The transmit beamformer has a closed matched-filter form, so the only hard
part is the combinatorial phase-index search.  That is done with a
cross-entropy loop: sample candidate index vectors from per-element
categorical distributions, keep the lowest-objective elite fraction, and
reset each element's distribution to the elite frequencies.  The loop stops
once a whole candidate batch scores within a spread threshold.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .arrays import ula_response
from .channel import PhaseConfig


@dataclass(frozen=True)
class CeConfig:
    """Cross-entropy hyperparameters.  The seed fully determines the run."""

    candidates_per_iter: int
    elite_count: int
    threshold: float
    max_iterations: int = 200
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.elite_count <= self.candidates_per_iter:
            raise ValueError("elite count must lie in [1, candidates_per_iter]")
        if self.threshold <= 0.0:
            raise ValueError("stopping threshold must be positive")
        if self.max_iterations < 1:
            raise ValueError("iteration cap must be at least 1")


@dataclass
class BeamformResult:
    """Outcome of one phase search.

    ``best_phase`` is the lowest-objective candidate ever evaluated;
    ``final_phase`` is the best of the last batch (what a bare sort-and-stop
    loop would return).  ``objective_trace`` records the tracked best after
    each iteration and is non-increasing by construction.
    """

    best_phase: PhaseConfig
    best_objective: float
    w: np.ndarray | None
    iterations: int
    objective_trace: list[float] = field(default_factory=list)
    final_phase: PhaseConfig | None = None
    final_objective: float | None = None
    evaluations: int = 0


def active_beam(elevation: float, n_t: int, p_t: float) -> np.ndarray:
    """Matched transmit beamformer sqrt(p_t/n_t) * a(elevation).

    Meets the power budget with equality and achieves |a^H w|^2 = p_t*n_t
    regardless of the steering phase convention.
    """
    if p_t <= 0.0:
        raise ValueError("transmit power must be positive")
    return math.sqrt(p_t / n_t) * ula_response(elevation, n_t)


def aligned_phase(cs, w: np.ndarray, bits: int) -> PhaseConfig:
    """Matched phase profile quantized to the 2^bits grid.

    Rotates every element so the cascade summands add in phase (maximizing
    the received power), then rounds to the nearest available level.  Useful
    as a deterministic near-optimal reference free of search noise.
    """
    summands = cs.h_i2u[0, :] * (cs.h_b2i @ np.asarray(w))
    levels = 2**bits
    step = 2.0 * math.pi / levels
    indices = np.round(-np.angle(summands) / step).astype(np.int64) % levels
    return PhaseConfig(indices=indices, bits=bits)


def uniform_probabilities(l_elements: int, bits: int) -> np.ndarray:
    """Initial probability matrix: every level equally likely at every element."""
    levels = 2**bits
    return np.full((levels, l_elements), 1.0 / levels)


def sample_candidates(probabilities: np.ndarray, count: int, rng: np.random.Generator) -> list[PhaseConfig]:
    """Draw ``count`` index vectors, each element from its own categorical column."""
    levels, l_elements = probabilities.shape
    bits = levels.bit_length() - 1
    if 2**bits != levels:
        raise ValueError(f"probability rows must be a power of two, got {levels}")
    cum = np.cumsum(probabilities, axis=0)
    draws = rng.random((count, l_elements))
    indices = np.empty((count, l_elements), dtype=np.int64)
    for l in range(l_elements):
        indices[:, l] = np.searchsorted(cum[:, l], draws[:, l], side="right")
    np.clip(indices, 0, levels - 1, out=indices)
    return [PhaseConfig(indices=row, bits=bits) for row in indices]


def elite_update(elites: list[PhaseConfig]) -> np.ndarray:
    """Probability matrix of per-element level frequencies among the elites."""
    if not elites:
        raise ValueError("elite set must be non-empty")
    bits = elites[0].bits
    l_elements = elites[0].size
    if any(e.bits != bits or e.size != l_elements for e in elites):
        raise ValueError("elites disagree on element count or bit depth")
    levels = 2**bits
    counts = np.zeros((levels, l_elements))
    for e in elites:
        counts[e.indices, np.arange(l_elements)] += 1.0
    return counts / len(elites)


def ce_optimize(objective, l_elements: int, bits: int, cfg: CeConfig, w: np.ndarray | None = None) -> BeamformResult:
    """Minimize ``objective`` over discrete phase configurations.

    Parameters
    ----------
    objective
        Callable mapping a PhaseConfig to a finite float.  A non-finite value
        aborts the search naming the offending candidate.
    l_elements, bits
        Search space dimensions (element count and quantization depth).
    cfg
        Hyperparameters; the run is a pure function of (cfg, objective).
    w
        Optional transmit beamformer to carry in the result.

    Returns the best configuration ever evaluated, not just the final batch's
    winner, so a lucky early candidate is never lost.
    """
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed) & (2**63 - 1), 1]))
    probabilities = uniform_probabilities(l_elements, bits)

    best_phase: PhaseConfig | None = None
    best_value = math.inf
    trace: list[float] = []
    evaluations = 0
    iterations = 0
    final_phase = None
    final_value = math.inf

    for iterations in range(1, cfg.max_iterations + 1):
        candidates = sample_candidates(probabilities, cfg.candidates_per_iter, rng)
        values = np.empty(cfg.candidates_per_iter)
        for c, cand in enumerate(candidates):
            v = float(objective(cand))
            if not math.isfinite(v):
                raise RuntimeError(
                    f"objective returned non-finite value {v} for candidate {cand.indices.tolist()}"
                )
            values[c] = v
        evaluations += cfg.candidates_per_iter

        order = np.argsort(values, kind="stable")
        batch_best = int(order[0])
        if values[batch_best] < best_value:
            best_value = float(values[batch_best])
            best_phase = candidates[batch_best]
        final_phase = candidates[batch_best]
        final_value = float(values[batch_best])
        trace.append(best_value)

        if float(values[order[-1]] - values[order[0]]) < cfg.threshold:
            break
        elites = [candidates[i] for i in order[: cfg.elite_count]]
        probabilities = elite_update(elites)

    assert best_phase is not None
    return BeamformResult(
        best_phase=best_phase,
        best_objective=best_value,
        w=None if w is None else np.asarray(w),
        iterations=iterations,
        objective_trace=trace,
        final_phase=final_phase,
        final_objective=final_value,
        evaluations=evaluations,
    )


def exhaustive_search(objective, l_elements: int, bits: int) -> tuple[PhaseConfig, float]:
    """Global minimizer by full enumeration, for validating the search.

    Ties resolve to the lexicographically smallest index vector.  Refuses
    search spaces beyond 2^20 configurations.
    """
    total_bits = bits * l_elements
    if total_bits > 20:
        raise ValueError(
            f"search space 2^{total_bits} exceeds the 2^20 enumeration guard"
        )
    best_cfg = None
    best_value = math.inf
    for combo in itertools.product(range(2**bits), repeat=l_elements):
        cand = PhaseConfig(indices=np.array(combo, dtype=np.int64), bits=bits)
        v = float(objective(cand))
        if v < best_value:
            best_value = v
            best_cfg = cand
    assert best_cfg is not None
    return best_cfg, best_value
