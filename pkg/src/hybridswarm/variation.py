"""Selection, crossover, mutation and replacement for real-coded GAs.

The array kernels (``tournament_indices``, ``sbx_pairs``, ``mutate_positions``,
``truncate``) do the work; the Individual-level functions wrap them so both
paths consume random numbers in the same order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import ContractError, Individual, Population, SearchSpace, clamp_to_bounds


@dataclass(frozen=True)
class VariationParams:
    crossover_rate: float
    mutation_rate: float
    sbx_index: float = 15.0
    mutation_index: float = 20.0

    def __post_init__(self):
        if not (0.0 <= self.crossover_rate <= 1.0 and 0.0 <= self.mutation_rate <= 1.0):
            raise ContractError("crossover and mutation rates must be probabilities")
        if self.sbx_index <= 0 or self.mutation_index <= 0:
            raise ContractError("distribution indices must be positive")


# -- selection ----------------------------------------------------------------

def tournament_indices(fitness: np.ndarray, size: int, rng) -> np.ndarray:
    """Winners of ``size`` binary tournaments drawn with replacement.

    The first-drawn contestant wins ties.
    """
    n = len(fitness)
    if n == 0:
        raise ContractError("tournament on an empty population")
    draws = rng.integers(0, n, size=(size, 2))
    a, b = draws[:, 0], draws[:, 1]
    return np.where(fitness[b] < fitness[a], b, a)


def tournament_select(population: Sequence[Individual], rng) -> Individual:
    if len(population) == 0:
        raise ContractError("tournament on an empty population")
    fitness = np.array([ind.fitness for ind in population], dtype=float)
    if np.any(np.isnan(fitness)):
        raise ContractError("tournament requires evaluated individuals")
    return population[int(tournament_indices(fitness, 1, rng)[0])]


# -- simulated binary crossover -------------------------------------------------

def sbx_spread(u: np.ndarray, eta: float) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        low = (2.0 * u) ** (1.0 / (eta + 1.0))
        high = (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0))
    return np.where(u <= 0.5, low, high)


def sbx_children(x1, x2, u, eta: float):
    """Unclamped SBX children for spread draws ``u``."""
    beta = sbx_spread(u, eta)
    c1 = 0.5 * ((1.0 + beta) * x1 + (1.0 - beta) * x2)
    c2 = 0.5 * ((1.0 - beta) * x1 + (1.0 + beta) * x2)
    return c1, c2


def sbx_pairs(x1: np.ndarray, x2: np.ndarray, params: VariationParams, space: SearchSpace, rng):
    """SBX over stacked parent pairs, shape ``(pairs, dim)``.

    One crossover gate per pair, one spread draw per gene. Pairs failing the
    gate come back as copies of their parents. Returns ``(c1, c2, crossed)``.
    """
    if x1.shape != x2.shape or x1.shape[-1] != space.dim:
        raise ContractError("parent dimensions do not match the search space")
    crossed = rng.random(x1.shape[0]) < params.crossover_rate
    u = rng.random(x1.shape)
    # u == 1 would give an infinite spread; it is never drawn by Generator.random
    c1, c2 = sbx_children(x1, x2, u, params.sbx_index)
    gate = crossed[:, None]
    c1 = np.where(gate, clamp_to_bounds(c1, space), x1)
    c2 = np.where(gate, clamp_to_bounds(c2, space), x2)
    return c1, c2, crossed


def _pair_to_arrays(p1: Individual, p2: Individual, space: SearchSpace):
    x1 = np.asarray(p1.position, dtype=float)
    x2 = np.asarray(p2.position, dtype=float)
    if x1.shape != (space.dim,) or x2.shape != (space.dim,):
        raise ContractError("parent dimensions do not match the search space")
    return x1[None, :], x2[None, :]


def _child(position, parent: Individual, changed: bool) -> Individual:
    return Individual(position, None if changed else parent.fitness)


def sbx_crossover(p1: Individual, p2: Individual, params: VariationParams, space: SearchSpace, rng):
    """Two plain children; unevaluated unless the crossover gate failed."""
    x1, x2 = _pair_to_arrays(p1, p2, space)
    c1, c2, crossed = sbx_pairs(x1, x2, params, space, rng)
    changed = bool(crossed[0])
    return _child(c1[0], p1, changed), _child(c2[0], p2, changed)


def sbx_crossover_inheriting(p1: Individual, p2: Individual, params: VariationParams,
                             space: SearchSpace, rng):
    """SBX whose child k also carries parent k's velocity and personal best."""
    if not (p1.is_particle and p2.is_particle):
        raise ContractError("inheriting crossover needs parents with velocity and personal best")
    c1, c2 = sbx_crossover(p1, p2, params, space, rng)
    for child, parent in ((c1, p1), (c2, p2)):
        child.velocity = parent.velocity.copy()
        child.pbest_position = parent.pbest_position.copy()
        child.pbest_fitness = parent.pbest_fitness
    return c1, c2


# -- polynomial mutation --------------------------------------------------------

def mutation_delta(u: np.ndarray, eta: float) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    low = (2.0 * u) ** (1.0 / (eta + 1.0)) - 1.0
    high = 1.0 - (2.0 * (1.0 - u)) ** (1.0 / (eta + 1.0))
    return np.where(u < 0.5, low, high)


def mutate_positions(x: np.ndarray, params: VariationParams, space: SearchSpace, rng) -> np.ndarray:
    """Per-gene polynomial mutation of stacked positions."""
    mask = rng.random(x.shape) < params.mutation_rate
    u = rng.random(x.shape)
    out = x.copy()
    rows, cols = np.nonzero(mask)
    delta = mutation_delta(u[rows, cols], params.mutation_index)
    moved = x[rows, cols] + delta * space.width[cols]
    out[rows, cols] = np.minimum(space.upper[cols], np.maximum(space.lower[cols], moved))
    return out


def polynomial_mutation(ind: Individual, params: VariationParams, space: SearchSpace, rng) -> Individual:
    """Mutated copy; velocity and personal best pass through untouched."""
    x = np.asarray(ind.position, dtype=float)
    new = mutate_positions(x[None, :], params, space, rng)[0]
    out = ind.copy()
    out.position = new
    if np.any(new != x):
        out.fitness = None
    return out


# -- replacement -----------------------------------------------------------------

def truncate(parents: Population, offspring: Population, size: int) -> Population:
    union = Population.concat(parents, offspring)
    if len(union) < size:
        raise ContractError("union of parents and offspring is smaller than the population size")
    if np.any(np.isnan(union.fitness)):
        raise ContractError("replacement requires evaluated individuals")
    # stable sort: parents come first in the union, so they win exact ties
    order = np.argsort(union.fitness, kind="stable")[:size]
    return union.take(order)


def replace_truncation(parents: Sequence[Individual], offspring: Sequence[Individual], size: int):
    """Keep the ``size`` best of parents plus offspring."""
    survivors = truncate(Population.from_individuals(list(parents)),
                         Population.from_individuals(list(offspring)), size)
    return survivors.to_individuals()


# -- one generation ----------------------------------------------------------------

def make_offspring(pop: Population, params: VariationParams, space: SearchSpace, rng,
                   inherit: bool = False) -> Population:
    """Tournament mating pool -> SBX on consecutive pairs -> mutation.

    With ``inherit`` the offspring keep the velocity and personal best of the
    pool member in the same slot (child k of a pair <- parent k). Offspring
    fitness is left as NaN.
    """
    n = len(pop)
    pool = pop.take(tournament_indices(pop.fitness, n, rng))
    x = pool.positions
    half = n // 2
    positions = x.copy()
    if half:
        c1, c2, _ = sbx_pairs(x[0:2 * half:2], x[1:2 * half:2], params, space, rng)
        positions[0:2 * half:2] = c1
        positions[1:2 * half:2] = c2
    # odd pool: the last member skips crossover
    positions = mutate_positions(positions, params, space, rng)
    offspring = Population(positions, np.full(n, np.nan))
    if inherit:
        if not pool.has_memory:
            raise ContractError("inheriting variation needs particles")
        offspring.velocities = pool.velocities
        offspring.pbest_positions = pool.pbest_positions
        offspring.pbest_fitness = pool.pbest_fitness
    return offspring


def ga_generation(pop: Population, params: VariationParams, objective, space: SearchSpace, rng,
                  inherit: bool = False) -> Population:
    """One full generation: variation, evaluation, truncation replacement."""
    offspring = make_offspring(pop, params, space, rng, inherit=inherit)
    offspring.fitness = objective(offspring.positions)
    if not inherit and pop.has_memory:
        pop = pop.without_memory()
    return truncate(pop, offspring, len(pop))
