"""Core domain types: instances, parameters, pheromone/probability state, tours.

All types are immutable value objects: arrays are copied in and marked
read-only, and state transitions produce new objects. That makes every type
safe to share across threads and keeps the batched pipeline and the
sequential reference operating on literally identical inputs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .tsplib import RawTspFile, distance

TAU_MIN = 1e-12
ETA_CLAMP = 1e-10


class DegenerateInstance(ValueError):
    """Two cities coincide: an off-diagonal distance is zero."""


class InvalidPermutation(ValueError):
    """A tour is not a permutation of 0..n-1."""


class Selection(str, enum.Enum):
    """Next-city selection mechanism.

    RW is the classic fitness-proportionate roulette wheel (cumulative
    probabilities, one sequential spin per draw). IR replaces the spin with
    an argmax over independently perturbed weights, which batches across
    ants. ADAIR is IR with a deviate exponent gamma that follows a cosine
    annealing schedule.
    """

    RW = "rw"
    IR = "ir"
    ADAIR = "adair"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class TspInstance:
    """A symmetric TSP instance.

    Attributes
    ----------
    n : int
        City count, at least 3.
    dist : ndarray, shape (n, n)
        Symmetric non-negative distances with zero diagonal.
    eta : ndarray, shape (n, n)
        Heuristic desirability, 1/dist off the diagonal, 0 on it.
    best_known : float or None
        Reference tour length for solution-error percentages.
    name : str
        Instance name, "" when anonymous.
    """

    n: int
    dist: np.ndarray
    eta: np.ndarray
    best_known: float | None = None
    name: str = ""

    def __post_init__(self):
        if self.n < 3:
            raise DegenerateInstance(f"need at least 3 cities, got {self.n}")
        object.__setattr__(self, "dist", _frozen(np.asarray(self.dist, dtype=np.float64)))
        object.__setattr__(self, "eta", _frozen(np.asarray(self.eta, dtype=np.float64)))


def _instance_from_dist(dist: np.ndarray, best_known: float | None, name: str,
                        lenient: bool) -> TspInstance:
    n = dist.shape[0]
    off = ~np.eye(n, dtype=bool)
    if np.any(dist[off] == 0.0):
        if not lenient:
            i, j = np.argwhere((dist == 0.0) & off)[0]
            raise DegenerateInstance(
                f"cities {i} and {j} are at distance 0 (duplicate coordinates)"
            )
        safe = np.where((dist == 0.0) & off, ETA_CLAMP, dist)
    else:
        safe = dist
    eta = np.zeros_like(dist)
    np.divide(1.0, safe, out=eta, where=off)
    return TspInstance(n=n, dist=dist, eta=eta, best_known=best_known, name=name)


def build_instance(raw: RawTspFile, best_known: float | None = None,
                   lenient: bool = False) -> TspInstance:
    """Build a TspInstance from a parsed .tsp file.

    Distances follow the file's edge-weight convention (integer-valued,
    exact in float64). When two cities coincide, raises DegenerateInstance
    unless ``lenient``, in which case eta uses a clamped distance of 1e-10.
    If ``best_known`` is None the bundled optima table is consulted by name.
    """
    from .tsplib import BEST_KNOWN

    n = raw.dimension
    pts = [(x, y) for _, x, y in raw.node_coords]
    dist = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            d = float(distance(pts[i], pts[j], raw.edge_weight_type))
            dist[i, j] = d
            dist[j, i] = d
    if best_known is None:
        best_known = BEST_KNOWN.get(raw.name)
    return _instance_from_dist(dist, best_known, raw.name, lenient)


def euclidean_instance(coords, best_known: float | None = None, name: str = "",
                       lenient: bool = False) -> TspInstance:
    """Instance with exact (unrounded) Euclidean distances.

    For synthetic geometry where integer rounding would collapse distinct
    edge lengths; TSPLIB files go through build_instance instead.
    """
    pts = np.asarray(coords, dtype=np.float64)
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt((diff * diff).sum(axis=2))
    return _instance_from_dist(dist, best_known, name, lenient)


@dataclass(frozen=True)
class GammaSchedule:
    """Cosine annealing endpoints for the deviate exponent gamma.

    gamma(t) starts each cycle at gamma_max and descends to gamma_min as
    t approaches the cycle length ``period``. gamma_max of 1.5 with
    gamma_min 1.0 makes the adaptive mechanism start exploratory and finish
    as plain independent roulette; values below 1 are permitted for
    gamma_min (greedier than plain IR).
    """

    gamma_max: float = 1.5
    gamma_min: float = 1.0
    period: int = 1000

    def __post_init__(self):
        if not self.gamma_max >= 1.0:
            raise ValueError(f"gamma_max must be >= 1, got {self.gamma_max}")
        if not self.gamma_min > 0.0:
            raise ValueError(f"gamma_min must be > 0, got {self.gamma_min}")
        if self.gamma_min > self.gamma_max:
            raise ValueError(
                f"gamma_min {self.gamma_min} exceeds gamma_max {self.gamma_max}"
            )
        if self.period < 1:
            raise ValueError(f"period must be positive, got {self.period}")


@dataclass(frozen=True)
class AcoParams:
    """Colony parameters.

    alpha and beta weight pheromone and heuristic in the transition matrix;
    rho is the evaporation rate; m the ant count; k the elite count whose
    tours deposit pheromone; q0_tau the uniform initial pheromone level.
    ``seed`` keys every random stream of a run.
    """

    m: int
    k: int
    alpha: float = 1.0
    beta: float = 2.0
    rho: float = 0.1
    q0_tau: float = 1.0
    selection: Selection = Selection.ADAIR
    gamma_schedule: GammaSchedule = field(default_factory=GammaSchedule)
    max_iters: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 1 <= self.k <= self.m:
            raise ValueError(f"k must be in [1, m={self.m}], got {self.k}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.beta >= 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if not 0 <= self.rho < 1:
            raise ValueError(f"rho must be in [0, 1), got {self.rho}")
        if not self.q0_tau > 0:
            raise ValueError(f"q0_tau must be > 0, got {self.q0_tau}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be positive, got {self.max_iters}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "selection", Selection(self.selection))

    @classmethod
    def for_instance(cls, n: int, **overrides) -> "AcoParams":
        """Conventional sizing: m = n ants, k = one-tenth of the colony.

        k tracks the effective colony size, so overriding m alone never
        produces an elite set larger than the colony.
        """
        m = overrides.pop("m", n)
        sized = {"m": m, "k": max(1, m // 10)}
        sized.update(overrides)
        return cls(**sized)


@dataclass(frozen=True, eq=False)
class PheromoneState:
    """Pheromone matrix tau plus the iteration counter it belongs to."""

    tau: np.ndarray
    iteration: int = 0

    def __post_init__(self):
        object.__setattr__(self, "tau", _frozen(np.asarray(self.tau, dtype=np.float64)))

    @classmethod
    def initial(cls, n: int, q0_tau: float) -> "PheromoneState":
        tau = np.full((n, n), float(q0_tau))
        np.fill_diagonal(tau, 0.0)
        return cls(tau=tau, iteration=0)


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    """Row-normalized transition matrix: rows sum to 1, zero diagonal."""

    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", _frozen(np.asarray(self.p, dtype=np.float64)))


@dataclass(frozen=True, eq=False)
class TourBatch:
    """m complete tours (rows are permutations of 0..n-1) with their costs."""

    tours: np.ndarray
    costs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tours", _frozen(np.asarray(self.tours, dtype=np.int64)))
        object.__setattr__(self, "costs", _frozen(np.asarray(self.costs, dtype=np.float64)))

    @property
    def m(self) -> int:
        return self.tours.shape[0]

    @property
    def n(self) -> int:
        return self.tours.shape[1]

    def validate(self, inst: TspInstance) -> None:
        """Check the batch invariants; raises on violation."""
        m, n = self.tours.shape
        if n != inst.n:
            raise InvalidPermutation(f"tours have {n} cities, instance has {inst.n}")
        expect = np.arange(n)
        for a in range(m):
            if not np.array_equal(np.sort(self.tours[a]), expect):
                raise InvalidPermutation(f"ant {a}'s tour is not a permutation")
            c = tour_cost(self.tours[a], inst)
            if c != self.costs[a]:
                raise InvalidPermutation(
                    f"ant {a}'s recorded cost {self.costs[a]} != recomputed {c}"
                )


def _check_permutation(tour: np.ndarray, n: int) -> None:
    if tour.shape != (n,) or not np.array_equal(np.sort(tour), np.arange(n)):
        raise InvalidPermutation(f"not a permutation of 0..{n - 1}: {tour!r}")


def tour_cost(tour, inst: TspInstance) -> float:
    """Closed-tour length: consecutive edges plus the edge back to the start."""
    t = np.asarray(tour, dtype=np.int64)
    _check_permutation(t, inst.n)
    return float(inst.dist[t, np.roll(t, -1)].sum())


def batch_costs(tours: np.ndarray, inst: TspInstance) -> np.ndarray:
    """Vectorized tour_cost over the rows of an (m, n) tour array."""
    closed = np.roll(tours, -1, axis=1)
    return inst.dist[tours, closed].sum(axis=1)
