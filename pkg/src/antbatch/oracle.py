"""Reference implementations for tests and acceptance: exhaustive TSP
search, a sequential scalar colony step, and Monte-Carlo selection
estimation.

Everything here favors auditability over speed: explicit loops, one ant,
one city, one edge at a time, plain Python floats in the inner loops. The
sequential step consumes the same keyed random blocks as the batched
pipeline (an ant's deviates are addressed by key, so both implementations
read identical values) and must reproduce the pipeline's tours bit for bit:
Python floats are IEEE doubles, so a scalar running sum retraces cumsum's
partial sums and a scalar strict-greater scan retraces argmax's
first-of-ties choice, which is pinned by the numerics-assumption tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .model import (
    TAU_MIN,
    AcoParams,
    PheromoneState,
    Selection,
    TourBatch,
    TspInstance,
)
from .selection import _check_weights, gamma_at, scaled_log_weights


class InstanceTooLarge(ValueError):
    """Exhaustive enumeration refused: (n-1)!/2 grows too fast past n=11."""


@dataclass(frozen=True)
class BruteForceResult:
    best_tour: tuple[int, ...]
    best_cost: float
    tours_enumerated: int


def brute_force_tsp(inst: TspInstance) -> BruteForceResult:
    """Globally optimal closed tour by enumerating (n-1)!/2 permutations.

    City 0 is fixed first and only one direction of each cycle is visited
    (second city < last city), which halves the work without losing any
    cost. Ties resolve to the lexicographically smallest tour starting at
    city 0, which is the first one lexicographic enumeration encounters.
    """
    n = inst.n
    if n > 11:
        raise InstanceTooLarge(f"n={n} exceeds the enumeration cap of 11")
    d = inst.dist.tolist()
    d0 = d[0]
    best_cost = math.inf
    best: tuple[int, ...] | None = None
    count = 0
    for perm in itertools.permutations(range(1, n)):
        if perm[0] > perm[-1]:
            continue
        count += 1
        prev = perm[0]
        c = d0[prev]
        for city in perm[1:]:
            c += d[prev][city]
            prev = city
        c += d[prev][0]
        if c < best_cost:
            best_cost = c
            best = perm
    assert best is not None
    return BruteForceResult(best_tour=(0, *best), best_cost=best_cost,
                            tours_enumerated=count)


def scalar_probability_reference(tau: PheromoneState, inst: TspInstance,
                                 params: AcoParams) -> np.ndarray:
    """Transition matrix by scalar double loop: tau^alpha * eta^beta, row
    normalized, zero diagonal. Independent of the vectorized version."""
    n = inst.n
    t = tau.tau
    eta = inst.eta
    a, b = params.alpha, params.beta
    p = np.zeros((n, n))
    for i in range(n):
        row_sum = 0.0
        for j in range(n):
            if i == j:
                continue
            v = t[i, j] ** a * eta[i, j] ** b
            p[i, j] = v
            row_sum += v
        for j in range(n):
            p[i, j] = p[i, j] / row_sum
    return p


def sequential_increment_sum(elites: list[tuple[np.ndarray, float]], n: int) -> np.ndarray:
    """Textbook deposit loop: for each elite tour, for each edge, add 1/cost
    at both orientations. The reference accumulate_increments must equal."""
    delta = np.zeros((n, n))
    for tour, cost in elites:
        inc = 1.0 / cost
        t = list(tour)
        for s in range(len(t)):
            i, j = t[s], t[s - 1]
            delta[i, j] += inc
            delta[j, i] += inc
    return delta


def sequential_aco_step(tau: PheromoneState, inst: TspInstance, params: AcoParams,
                        iteration: int) -> tuple[TourBatch, PheromoneState]:
    """One full colony iteration with plain nested loops and no batching.

    Same keyed random blocks as the pipeline, one ant and one city at a
    time: builds the transition matrix by scalar double loop, walks each ant
    through its n-1 selections with per-city Python arithmetic, sorts for
    the elite, deposits edge by edge, and evaporates cell by cell. Tours
    must match the batched pipeline bit for bit (a scalar running sum
    retraces the wheel kernel's cumsum, a strict-greater scan retraces the
    argmax kernel's first-of-ties choice); pheromone within 1e-12 relative
    (the scalar matrix arithmetic differs from the vectorized one by ulps).
    """
    n, m = inst.n, params.m
    mech = params.selection
    gamma = gamma_at(iteration, params.gamma_schedule) if mech is Selection.ADAIR else 1.0

    p = scalar_probability_reference(tau, inst, params)
    if mech is Selection.RW:
        rows = p.tolist()
    else:
        rows = scaled_log_weights(p, gamma).tolist()

    starts = rng.start_cities(params.seed, iteration, m, n)
    tours = [[int(starts[a])] for a in range(m)]
    visited = [[False] * n for _ in range(m)]
    for a in range(m):
        visited[a][tours[a][0]] = True

    for step in range(1, n):
        if mech is Selection.RW:
            u = rng.step_uniforms(params.seed, iteration, step, m, n)
            for a in range(m):
                row = rows[tours[a][-1]]
                vis = visited[a]
                ua = u[a]
                total = 0.0
                for j in range(n):
                    if not vis[j]:
                        total += row[j]
                choice = -1
                run = 0.0
                for j in range(n):
                    if not vis[j]:
                        run += row[j]
                        if run / total > ua:
                            choice = j
                            break
                if choice < 0:
                    # threshold at or past the total: last positive weight
                    for j in range(n - 1, -1, -1):
                        if not vis[j] and row[j] > 0.0:
                            choice = j
                            break
                tours[a].append(choice)
                vis[choice] = True
        else:
            e_block = rng.step_exponentials(params.seed, iteration, step, m, n).tolist()
            for a in range(m):
                row = rows[tours[a][-1]]
                e = e_block[a]
                vis = visited[a]
                best = -math.inf
                choice = 0
                for j in range(n):
                    if vis[j]:
                        continue
                    s = row[j] - e[j]
                    if s > best:
                        best = s
                        choice = j
                tours[a].append(choice)
                vis[choice] = True

    d = inst.dist.tolist()
    costs = np.empty(m)
    for a in range(m):
        t = tours[a]
        c = 0.0
        for s in range(n):
            c += d[t[s]][t[(s + 1) % n]]
        costs[a] = c
    tours = np.array(tours, dtype=np.int64)

    elite_order = sorted(range(m), key=lambda a: (costs[a], a))[:params.k]
    elites = [(tours[a], float(costs[a])) for a in elite_order]
    delta = sequential_increment_sum(elites, n)

    new_tau = np.empty((n, n))
    keep = 1.0 - params.rho
    for i in range(n):
        for j in range(n):
            v = keep * tau.tau[i, j] + delta[i, j]
            new_tau[i, j] = v if v > TAU_MIN else TAU_MIN

    return (TourBatch(tours=tours, costs=costs),
            PheromoneState(tau=new_tau, iteration=tau.iteration + 1))


_BLOCK = 1 << 16


def empirical_selection_distribution(mechanism, p, gamma: float | None = None,
                                     trials: int = 10**6, seed: int = 0) -> np.ndarray:
    """Monte-Carlo selection frequencies over keyed trial blocks.

    Returns counts/trials (a frequency vector summing to one). Trials are
    drawn in blocks keyed by block index, so the estimate for a given
    (seed, trials) is deterministic and independent of block size.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    mech = Selection(mechanism)
    w = np.asarray(p, dtype=np.float64)
    _check_weights(w)
    counts = np.zeros(w.size, dtype=np.int64)

    if mech is Selection.RW:
        csum = np.cumsum(w)
        total = csum[-1]
        last_pos = int(np.flatnonzero(w)[-1])
        done = 0
        block = 0
        while done < trials:
            b = min(_BLOCK, trials - done)
            u = rng.mc_stream(seed, block).random(b)
            idx = np.searchsorted(csum, u * total, side="right")
            idx[idx >= w.size] = last_pos
            counts += np.bincount(idx, minlength=w.size)
            done += b
            block += 1
    else:
        if mech is Selection.ADAIR:
            if gamma is None:
                raise ValueError("gamma is required for the adaptive mechanism")
            g = float(gamma)
        else:
            g = 1.0
        logw = scaled_log_weights(w, g)
        done = 0
        block = 0
        while done < trials:
            b = min(_BLOCK, trials - done)
            e = rng.mc_stream(seed, block).standard_exponential((b, w.size))
            idx = np.argmax(logw[None, :] - e, axis=1)
            counts += np.bincount(idx, minlength=w.size)
            done += b
            block += 1

    return counts / trials
