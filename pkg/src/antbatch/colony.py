"""Batched tour construction: transition-matrix preprocessing and the
lockstep driver that advances all m ants together.

One iteration's randomness is addressed per construction step: step s draws
one (m, n) deviate block covering every ant (rng module), so results are
bit-identical no matter how the ants are scheduled: full width, chunked, or
one at a time. The argmax mechanisms consume the full block through a single
fused kernel; the roulette wheel consumes one threshold per ant (the uniform
view of the block's first column) and runs all spins in lockstep through a
row-wise prefix-sum kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .model import (
    AcoParams,
    PheromoneState,
    ProbabilityMatrix,
    Selection,
    TourBatch,
    TspInstance,
    batch_costs,
)
from .selection import argmax_select_block, gamma_at, rw_spin_block, scaled_log_weights


class NumericalUnderflow(ValueError):
    """A transition-matrix row normalizer vanished or became non-finite."""


@dataclass
class ConstructionState:
    """Mid-construction snapshot: where every ant is and what it has seen.

    ``step`` counts completed placements minus one, so visited[a] always has
    exactly step+1 true entries and visited[a][current_city[a]] is true.
    Probe callbacks receive live read-only views; they must not be kept
    across steps.
    """

    current_city: np.ndarray
    visited: np.ndarray
    step: int


def compute_probability_matrix(tau: PheromoneState, inst: TspInstance,
                               params: AcoParams) -> ProbabilityMatrix:
    """Row-normalized transition matrix: tau^alpha * eta^beta, rows to 1.

    The diagonal is forced to zero before normalization. Raises
    NumericalUnderflow when a row's normalizer is zero or non-finite.
    """
    # overflow/underflow surfaces as a structured error below, not a warning
    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        unnorm = np.power(tau.tau, params.alpha) * np.power(inst.eta, params.beta)
    np.fill_diagonal(unnorm, 0.0)
    sums = unnorm.sum(axis=1, keepdims=True)
    if not np.all(np.isfinite(sums)) or np.any(sums <= 0.0):
        bad = int(np.argmin(np.where(np.isfinite(sums), sums, -np.inf)))
        raise NumericalUnderflow(
            f"row {bad} normalizer is {sums[bad, 0]!r}; "
            "pheromone or heuristic values out of representable range"
        )
    return ProbabilityMatrix(p=unnorm / sums)


def init_starts(m: int, n: int, rng_stream: np.random.Generator) -> np.ndarray:
    """Uniform random start city for each of m ants, values in [0, n)."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return rng_stream.integers(0, n, size=m, dtype=np.int64)


def _readonly_view(a: np.ndarray) -> np.ndarray:
    v = a.view()
    v.flags.writeable = False
    return v


def construct_tours(p: ProbabilityMatrix, inst: TspInstance, params: AcoParams,
                    iteration: int, chunk_size: int | None = None,
                    probe=None) -> TourBatch:
    """Build m complete tours in n-1 lockstep selection rounds.

    At every round each ant picks its next city from its current row of the
    transition matrix restricted to unvisited cities (masked and
    renormalized; for the argmax mechanisms the renormalizer is a per-row
    constant and drops out of the argmax, the wheel materializes the masked
    row's CDF). ``chunk_size`` optionally processes ants in row blocks;
    output is bit-identical at any chunking because each ant's deviates are
    addressed by key, not by draw order. ``probe``, when given, is called
    with a read-only ConstructionState before every selection round.
    """
    n, m = inst.n, params.m
    mech = params.selection
    gamma = gamma_at(iteration, params.gamma_schedule) if mech is Selection.ADAIR else 1.0

    current = init_starts(m, n, rng.stream(params.seed, rng.DOMAIN_START, iteration))
    rows = np.arange(m)
    visited = np.zeros((m, n), dtype=bool)
    visited[rows, current] = True
    tours = np.empty((m, n), dtype=np.int64)
    tours[:, 0] = current

    if mech is Selection.RW:
        unvisited_f = np.ones((m, n))
        unvisited_f[rows, current] = 0.0
    else:
        logw = scaled_log_weights(p.p, gamma)
    scores = np.empty((m, n))

    if chunk_size is None or chunk_size >= m:
        bounds = [(0, m)]
    else:
        if chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")
        bounds = [(lo, min(lo + chunk_size, m)) for lo in range(0, m, chunk_size)]

    for step in range(1, n):
        if probe is not None:
            probe(ConstructionState(
                current_city=_readonly_view(current),
                visited=_readonly_view(visited),
                step=step - 1,
            ))
        nxt = np.empty(m, dtype=np.int64)
        if mech is Selection.RW:
            u = rng.step_uniforms(params.seed, iteration, step, m, n)
            for lo, hi in bounds:
                nxt[lo:hi] = rw_spin_block(
                    p.p, current[lo:hi], unvisited_f[lo:hi],
                    u[lo:hi], scores[lo:hi],
                )
            unvisited_f[rows, nxt] = 0.0
        else:
            e_block = rng.step_exponentials(params.seed, iteration, step, m, n)
            for lo, hi in bounds:
                nxt[lo:hi] = argmax_select_block(
                    logw, current[lo:hi], e_block[lo:hi],
                    visited[lo:hi], scores[lo:hi],
                )
        assert not visited[rows, nxt].any(), "selector chose a visited city"
        current = nxt
        visited[rows, current] = True
        tours[:, step] = current

    return TourBatch(tours=tours, costs=batch_costs(tours, inst))
