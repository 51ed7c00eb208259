"""Shared domain types: search box, individuals, budgets, RNG streams, state."""
from __future__ import annotations

import enum
import zlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


class ContractError(ValueError):
    """An operation was called with arguments violating its preconditions."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


class InitializationError(RuntimeError):
    """The budget cannot pay for an initial population."""


class BudgetExhausted(Exception):
    """Raised by a step that the remaining budget cannot pay for.

    The state is left untouched; callers treat this as normal run completion.
    """


class Phase(str, enum.Enum):
    PSO = "PSO"
    GA = "GA"


@dataclass(frozen=True)
class SearchSpace:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size < 1:
            raise ContractError("lower and upper must be 1-D vectors of equal length >= 1")
        if not np.all(lower < upper):
            raise ContractError("every lower bound must be strictly below its upper bound")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def box(cls, dim: int, low: float, high: float) -> "SearchSpace":
        if dim < 1:
            raise ContractError(f"dim must be >= 1, got {dim}")
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def sample(self, rng, size: int) -> np.ndarray:
        """Uniform positions, shape ``(size, dim)``."""
        return self.lower + rng.random((size, self.dim)) * self.width

    def contains(self, x) -> bool:
        x = np.asarray(x)
        return bool(np.all((x >= self.lower) & (x <= self.upper)))


def clamp_to_bounds(position, space: SearchSpace) -> np.ndarray:
    """Project ``position`` (a vector or a stack of row vectors) onto the box."""
    position = np.asarray(position, dtype=float)
    if position.shape[-1:] != (space.dim,):
        raise ContractError(f"position has length {position.shape[-1:]} but space has dim {space.dim}")
    return np.minimum(space.upper, np.maximum(space.lower, position))


@dataclass
class EvaluationBudget:
    max_evaluations: int
    consumed: int = 0

    def __post_init__(self):
        if self.max_evaluations < 1:
            raise ContractError("max_evaluations must be positive")
        if not 0 <= self.consumed <= self.max_evaluations:
            raise ContractError("consumed must lie in [0, max_evaluations]")

    @property
    def remaining(self) -> int:
        return self.max_evaluations - self.consumed

    def try_consume(self, k: int) -> bool:
        """Reserve ``k`` evaluations; refuse (and change nothing) if they do not fit."""
        if k < 1:
            raise ContractError(f"k must be >= 1, got {k}")
        if self.consumed + k > self.max_evaluations:
            return False
        self.consumed += k
        return True


def try_consume(budget: EvaluationBudget, k: int) -> bool:
    return budget.try_consume(k)


# -- random streams -------------------------------------------------------

def _key_to_int(key) -> int:
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    return int(key)


def derive_seed(master_seed: int, *keys) -> int:
    """64-bit seed for the stream identified by ``keys`` under ``master_seed``.

    Keys may be ints or strings; distinct key tuples give unrelated streams.
    """
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(_key_to_int(k) for k in keys))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


# -- individuals and populations --------------------------------------------

@dataclass
class Individual:
    """One candidate solution; velocity and personal best make it a particle."""

    position: np.ndarray
    fitness: float | None = None
    velocity: np.ndarray | None = None
    pbest_position: np.ndarray | None = None
    pbest_fitness: float | None = None

    @property
    def is_particle(self) -> bool:
        return self.velocity is not None and self.pbest_position is not None

    def copy(self) -> "Individual":
        def cp(a):
            return None if a is None else np.array(a, dtype=float)

        return Individual(cp(self.position), self.fitness, cp(self.velocity),
                          cp(self.pbest_position), self.pbest_fitness)


@dataclass
class Population:
    """Struct-of-arrays population; row ``i`` is individual ``i``.

    ``fitness`` uses NaN for unevaluated rows. The three memory arrays are
    either all present (particles) or all ``None``.
    """

    positions: np.ndarray
    fitness: np.ndarray
    velocities: np.ndarray | None = None
    pbest_positions: np.ndarray | None = None
    pbest_fitness: np.ndarray | None = None

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def has_memory(self) -> bool:
        return self.velocities is not None

    def __getitem__(self, i: int) -> Individual:
        f = float(self.fitness[i])
        ind = Individual(self.positions[i].copy(), None if np.isnan(f) else f)
        if self.has_memory:
            ind.velocity = self.velocities[i].copy()
            ind.pbest_position = self.pbest_positions[i].copy()
            ind.pbest_fitness = float(self.pbest_fitness[i])
        return ind

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def take(self, idx) -> "Population":
        """Copy of the rows at ``idx`` (fancy indexing, so always a copy)."""
        idx = np.asarray(idx, dtype=np.intp)
        if not self.has_memory:
            return Population(self.positions[idx], self.fitness[idx])
        return Population(self.positions[idx], self.fitness[idx], self.velocities[idx],
                          self.pbest_positions[idx], self.pbest_fitness[idx])

    def copy(self) -> "Population":
        return self.take(np.arange(len(self)))

    def without_memory(self) -> "Population":
        return Population(self.positions.copy(), self.fitness.copy())

    @classmethod
    def concat(cls, *pops: "Population") -> "Population":
        memory = [p.has_memory for p in pops]
        if any(memory) and not all(memory):
            raise ContractError("cannot concatenate particles with plain individuals")
        out = cls(np.concatenate([p.positions for p in pops]),
                  np.concatenate([p.fitness for p in pops]))
        if all(memory):
            out.velocities = np.concatenate([p.velocities for p in pops])
            out.pbest_positions = np.concatenate([p.pbest_positions for p in pops])
            out.pbest_fitness = np.concatenate([p.pbest_fitness for p in pops])
        return out

    @classmethod
    def from_individuals(cls, individuals: Sequence[Individual]) -> "Population":
        if not individuals:
            raise ContractError("empty population")
        pos = np.array([ind.position for ind in individuals], dtype=float)
        fit = np.array([np.nan if ind.fitness is None else ind.fitness for ind in individuals])
        if all(ind.is_particle for ind in individuals):
            return cls(pos, fit,
                       np.array([ind.velocity for ind in individuals], dtype=float),
                       np.array([ind.pbest_position for ind in individuals], dtype=float),
                       np.array([ind.pbest_fitness for ind in individuals], dtype=float))
        return cls(pos, fit)

    def to_individuals(self) -> list[Individual]:
        return list(self)


# -- objectives ---------------------------------------------------------------

class ObjectiveFunction:
    """Named batch evaluator with an evaluation counter.

    ``func`` maps an ``(m, dim)`` array to ``m`` fitness values (minimised).
    Calling with a single vector returns a float.
    """

    def __init__(self, name: str, func: Callable[[np.ndarray], np.ndarray], space: SearchSpace):
        self.name = name
        self.func = func
        self.space = space
        self.evaluations = 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        batch = np.atleast_2d(x)
        values = np.asarray(self.func(batch), dtype=float).reshape(batch.shape[0])
        self.evaluations += batch.shape[0]
        return float(values[0]) if single else values

    def __repr__(self):
        return f"ObjectiveFunction({self.name!r}, dim={self.space.dim})"


# -- optimizer state ----------------------------------------------------------

@dataclass
class OptimizerState:
    population: Population
    global_best_position: np.ndarray
    global_best_fitness: float
    budget: EvaluationBudget
    phase: Phase | None = None
    steps: int = 0
    phase_steps: int = 0
    extras: dict = field(default_factory=dict)


def update_global_best(state, candidate_position, candidate_fitness: float):
    """Replace the incumbent only on strict improvement."""
    if candidate_fitness < state.global_best_fitness:
        state.global_best_position = np.array(candidate_position, dtype=float)
        state.global_best_fitness = float(candidate_fitness)
    return state


def offer_population(state, positions: np.ndarray, fitness: np.ndarray):
    """Offer the best row of a freshly evaluated batch to the global best."""
    i = int(np.argmin(fitness))
    return update_global_best(state, positions[i], fitness[i])
