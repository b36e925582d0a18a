"""Next-city selection: roulette wheel, independent roulette, and the
adaptive variant with an annealed deviate exponent.

The roulette wheel (RW) materializes the candidates' cumulative distribution
and inverts it at one uniform threshold: fitness-proportionate, but built on
a cumulative scan and normalization of every candidate (the block form runs
one cumsum and one divide per ant row). Independent roulette (IR) instead
perturbs every candidate weight independently and takes an argmax:

    choice = argmax(r ** gamma * p),   r[i] i.i.d. uniform on (0, 1)

with gamma = 1 for plain IR. The argmax form batches over ants as pure
elementwise work plus a row reduction, which is the whole point.

Evaluation is in the log domain, which is both safe for extreme gamma and
cheap: with E = -log(r) ~ Exp(1),

    argmax(r**gamma * p) = argmax(log p - gamma * E) = argmax(log p / gamma - E)

(dividing by gamma > 0 preserves the argmax). The third form is used
everywhere: gamma is folded into the log-weight table once per iteration, so
the per-step kernel of the adaptive mechanism is byte-for-byte the IR kernel
reading a different table, and at gamma = 1 the division is an IEEE-exact
identity, making the gamma=1 mechanism literally the same computation as IR.
Exponential deviates keep r in the open interval (0, 1) by construction.

Larger gamma pushes the deviates r**gamma toward 0 and makes selection MORE
uniform (exploratory), not less: on p = [p1, p2] with p1 >= p2 > 0 the
probability of picking index 0 is 1 - (p2/p1)**(1/gamma) / 2, which
decreases from 1 - p2/(2 p1) at gamma = 1 toward 1/2 as gamma grows.
Annealing gamma from above 1 down to 1 therefore starts runs exploratory
and finishes them as plain IR.
"""

from __future__ import annotations

import math

import numpy as np

from .model import GammaSchedule


class AllZeroWeights(ValueError):
    """No positive entry to select from."""


def gamma_at(iteration: int, schedule: GammaSchedule) -> float:
    """Cosine-annealed gamma at a 0-based iteration.

    gamma(t) = gamma_min + (gamma_max - gamma_min)/2 * (1 + cos(pi * (t mod
    period) / period)); each cycle starts at gamma_max and approaches
    gamma_min as t nears the cycle end, then restarts.
    """
    if iteration < 0:
        raise ValueError(f"iteration must be non-negative, got {iteration}")
    t = iteration % schedule.period
    lo, hi = schedule.gamma_min, schedule.gamma_max
    return lo + 0.5 * (hi - lo) * (1.0 + math.cos(math.pi * t / schedule.period))


def scaled_log_weights(p: np.ndarray, gamma: float) -> np.ndarray:
    """log(p) / gamma with zero entries mapped to -inf.

    Works elementwise on vectors and matrices alike; the batched pipeline
    applies it to the whole transition matrix once per iteration and the
    per-ant reference applies it the same way, so both read identical bits.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    p = np.asarray(p, dtype=np.float64)
    logw = np.full(p.shape, -np.inf)
    np.log(p, out=logw, where=p > 0)
    np.divide(logw, gamma, out=logw)
    return logw


# ---------------------------------------------------------------------------
# Deterministic cores. These take their randomness as arguments so that the
# lockstep pipeline, the sequential reference, and the public single-draw
# operations all run the identical instruction sequence on identical inputs.
# ---------------------------------------------------------------------------

def rw_spin(weights: np.ndarray, u: float) -> int:
    """One roulette spin: build the weights' CDF and invert it at u.

    The prefix sums are normalized by the total, giving the cumulative
    distribution of the (renormalized) weights; the spin returns the first
    index whose CDF value strictly exceeds u. Zero-weight entries can never
    be returned (their CDF step is empty). At u = 1 exactly, nothing
    exceeds (the CDF tops out at exactly 1.0), and the last positive-weight
    index wins.
    """
    cdf = np.cumsum(weights)
    np.divide(cdf, cdf[-1], out=cdf)
    j = int(np.searchsorted(cdf, u, side="right"))
    if j >= weights.size:
        j = int(np.flatnonzero(weights)[-1])
    return j


def rw_spin_block(p: np.ndarray, current: np.ndarray, unvisited_f: np.ndarray,
                  u: np.ndarray, scratch: np.ndarray) -> np.ndarray:
    """Lockstep roulette spins for all m ants at one construction step.

    Gathers each ant's row of the transition matrix, zeroes visited cities,
    materializes the masked row's cumulative distribution (prefix sums over
    total), and picks the first index whose CDF value strictly exceeds that
    ant's threshold. cumsum accumulates left to right and the quotients are
    taken prefix by prefix exactly like rw_spin's, so each row's pick is
    bit-identical to a scalar spin on the same masked row. ``scratch`` is a
    caller-owned (m, n) buffer.
    """
    np.take(p, current, axis=0, out=scratch)
    np.multiply(scratch, unvisited_f, out=scratch)
    np.cumsum(scratch, axis=1, out=scratch)
    total = scratch[:, -1].copy()
    np.divide(scratch, total[:, None], out=scratch)
    nxt = (scratch > u[:, None]).argmax(axis=1)
    # u can reach 1.0 exactly (the threshold view of an underflowing
    # deviate); those rows take the last positive-weight index, same as
    # rw_spin's fallback
    short = np.flatnonzero(scratch[:, -1] <= u)
    for a in short:
        row = p[current[a]] * unvisited_f[a]
        nxt[a] = np.flatnonzero(row)[-1]
    return nxt


def argmax_select_row(logw_row: np.ndarray, e_row: np.ndarray,
                      visited_row: np.ndarray | None = None) -> int:
    """Perturbed-argmax choice for one ant: argmax(logw - e), visited barred.

    Ties (probability zero in exact arithmetic, possible in floats) resolve
    to the lowest index, matching numpy's argmax.
    """
    s = np.subtract(logw_row, e_row)
    if visited_row is not None:
        np.copyto(s, -np.inf, where=visited_row)
    return int(np.argmax(s))


def argmax_select_block(logw: np.ndarray, current: np.ndarray, e_block: np.ndarray,
                        visited: np.ndarray, scores: np.ndarray) -> np.ndarray:
    """Lockstep perturbed-argmax for all m ants at one construction step.

    Gathers each ant's row of the log-weight table, subtracts that ant's
    deviate row, bars visited cities, and reduces with a row argmax.
    ``scores`` is a caller-owned (m, n) scratch buffer; the op sequence per
    row is exactly argmax_select_row's.
    """
    np.take(logw, current, axis=0, out=scores)
    np.subtract(scores, e_block, out=scores)
    np.copyto(scores, -np.inf, where=visited)
    return scores.argmax(axis=1)


# ---------------------------------------------------------------------------
# Public single-draw operations.
# ---------------------------------------------------------------------------

def _check_weights(w: np.ndarray) -> None:
    if w.ndim != 1 or w.size == 0:
        raise ValueError(f"expected a non-empty vector, got shape {w.shape}")
    if np.any(w < 0):
        raise ValueError("weights must be non-negative")
    if not np.any(w > 0):
        raise AllZeroWeights("no positive weight to select from")


def select_rw(weights, rng_stream: np.random.Generator) -> int:
    """Fitness-proportionate selection: index i with probability w[i]/sum(w)."""
    w = np.asarray(weights, dtype=np.float64)
    _check_weights(w)
    return rw_spin(w, rng_stream.random())


def select_ir(p, rng_stream: np.random.Generator) -> int:
    """Independent roulette: argmax of elementwise r * p, r uniform on (0,1).

    Zero-probability entries can never win (log-weight -inf).
    """
    return select_adair(p, 1.0, rng_stream)


def select_adair(p, gamma: float, rng_stream: np.random.Generator) -> int:
    """Adaptive independent roulette: argmax of r**gamma * p.

    gamma = 1 is definitionally select_ir: same stream, same draws, same
    arithmetic, bit-identical result.
    """
    w = np.asarray(p, dtype=np.float64)
    _check_weights(w)
    logw = scaled_log_weights(w, gamma)
    e = rng_stream.standard_exponential(w.size)
    return argmax_select_row(logw, e)


def transformed_deviate_pdf(y: float, gamma: float) -> float:
    """Density of Y = X**gamma for X uniform on (0,1): (1/gamma) y^((1-gamma)/gamma).

    Zero outside the open interval (0, 1). For gamma > 1 the density
    diverges at 0 and the mass shifts toward small values (median
    (1/2)**gamma < 1/2), which is what makes large gamma exploratory.
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if not 0.0 < y < 1.0:
        return 0.0
    return (1.0 / gamma) * y ** ((1.0 - gamma) / gamma)


def sample_transformed_deviates(gamma: float, size: int,
                                rng_stream: np.random.Generator) -> np.ndarray:
    """Draw Y = X**gamma (X uniform on (0,1)) as exp(-gamma * E), E ~ Exp(1)."""
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    return np.exp(-gamma * rng_stream.standard_exponential(size))
