"""Global-best particle swarm with inertia weight and velocity clamping."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (BudgetExhausted, ContractError, EvaluationBudget, Individual, InitializationError,
                   OptimizerState, Population, SearchSpace, clamp_to_bounds, offer_population)


@dataclass(frozen=True)
class PsoConfig:
    population_size: int = 100
    c1: float = 1.97
    c2: float = 0.94
    w: float = 0.56
    vmax_fraction: float = 0.5

    def __post_init__(self):
        if self.population_size < 1:
            raise ContractError("swarm size must be >= 1")
        if min(self.c1, self.c2, self.w) < 0 or self.vmax_fraction <= 0:
            raise ContractError("c1, c2, w must be non-negative and vmax_fraction positive")

    def vmax(self, space: SearchSpace) -> np.ndarray:
        return self.vmax_fraction * space.width


def random_velocities(size: int, config: PsoConfig, space: SearchSpace, rng) -> np.ndarray:
    vmax = config.vmax(space)
    return rng.uniform(-vmax, vmax, (size, space.dim))


def attach_memory(pop: Population, config: PsoConfig, space: SearchSpace, rng) -> Population:
    """Turn plain individuals into particles: fresh velocities, pbest = here."""
    return Population(pop.positions, pop.fitness, random_velocities(len(pop), config, space, rng),
                      pop.positions.copy(), pop.fitness.copy())


def init_swarm(size: int, config: PsoConfig, objective, space: SearchSpace, rng) -> Population:
    positions = space.sample(rng, size)
    velocities = random_velocities(size, config, space, rng)
    fitness = objective(positions)
    return Population(positions, fitness, velocities, positions.copy(), fitness.copy())


def velocity_kernel(x, v, pbest, gbest, config: PsoConfig, vmax, rng) -> np.ndarray:
    r1 = rng.random(x.shape)
    r2 = rng.random(x.shape)
    new = config.w * v + config.c1 * r1 * (pbest - x) + config.c2 * r2 * (gbest - x)
    return np.clip(new, -vmax, vmax)


def pso_velocity_update(particle: Individual, gbest_position, config: PsoConfig,
                        space: SearchSpace, rng) -> np.ndarray:
    """New velocity for one particle; r1 and r2 are drawn per dimension."""
    if not particle.is_particle:
        raise ContractError("velocity update needs a particle with velocity and personal best")
    x = np.asarray(particle.position, dtype=float)[None, :]
    v = np.asarray(particle.velocity, dtype=float)[None, :]
    p = np.asarray(particle.pbest_position, dtype=float)[None, :]
    return velocity_kernel(x, v, p, np.asarray(gbest_position, dtype=float), config,
                           config.vmax(space), rng)[0]


def swarm_move(pop: Population, gbest_position, config: PsoConfig, objective,
               space: SearchSpace, rng) -> Population:
    """Move every particle, evaluate, and refresh personal bests (in place)."""
    pop.velocities = velocity_kernel(pop.positions, pop.velocities, pop.pbest_positions,
                                     gbest_position, config, config.vmax(space), rng)
    pop.positions = clamp_to_bounds(pop.positions + pop.velocities, space)
    pop.fitness = objective(pop.positions)
    better = pop.fitness < pop.pbest_fitness
    pop.pbest_positions[better] = pop.positions[better]
    pop.pbest_fitness[better] = pop.fitness[better]
    return pop


def pso_init(config: PsoConfig, objective, space: SearchSpace, rng,
             budget: EvaluationBudget) -> OptimizerState:
    n = config.population_size
    if not budget.try_consume(n):
        raise InitializationError(f"budget of {budget.max_evaluations} cannot pay for {n} initial evaluations")
    pop = init_swarm(n, config, objective, space, rng)
    best = int(np.argmin(pop.fitness))
    return OptimizerState(pop, pop.positions[best].copy(), float(pop.fitness[best]), budget)


def pso_step(state: OptimizerState, config: PsoConfig, objective, space: SearchSpace, rng) -> OptimizerState:
    if not state.budget.try_consume(len(state.population)):
        raise BudgetExhausted
    # synchronous: the gbest of the previous step guides every particle
    pop = swarm_move(state.population, state.global_best_position, config, objective, space, rng)
    offer_population(state, pop.positions, pop.fitness)
    state.steps += 1
    return state


class PSO:
    name = "PSO"

    def __init__(self, config: PsoConfig):
        self.config = config

    def init(self, objective, space, rng, budget):
        return pso_init(self.config, objective, space, rng, budget)

    def step(self, state, objective, space, rng):
        return pso_step(state, self.config, objective, space, rng)
