"""Generational real-coded GA with elitist truncation replacement."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (BudgetExhausted, ContractError, EvaluationBudget, InitializationError,
                   OptimizerState, Population, SearchSpace, offer_population)
from .variation import VariationParams, ga_generation


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 100
    variation: VariationParams = VariationParams(0.9, 0.1)

    def __post_init__(self):
        if self.population_size < 2:
            raise ContractError("GA population size must be >= 2")


def init_plain_population(size: int, objective, space: SearchSpace, rng) -> Population:
    positions = space.sample(rng, size)
    return Population(positions, objective(positions))


def ga_init(config: GaConfig, objective, space: SearchSpace, rng,
            budget: EvaluationBudget) -> OptimizerState:
    n = config.population_size
    if not budget.try_consume(n):
        raise InitializationError(f"budget of {budget.max_evaluations} cannot pay for {n} initial evaluations")
    pop = init_plain_population(n, objective, space, rng)
    best = int(np.argmin(pop.fitness))
    return OptimizerState(pop, pop.positions[best].copy(), float(pop.fitness[best]), budget)


def ga_step(state: OptimizerState, config: GaConfig, objective, space: SearchSpace, rng) -> OptimizerState:
    if not state.budget.try_consume(len(state.population)):
        raise BudgetExhausted
    state.population = ga_generation(state.population, config.variation, objective, space, rng)
    offer_population(state, state.population.positions, state.population.fitness)
    state.steps += 1
    return state


class GA:
    name = "GA"

    def __init__(self, config: GaConfig):
        self.config = config

    def init(self, objective, space, rng, budget):
        return ga_init(self.config, objective, space, rng, budget)

    def step(self, state, objective, space, rng):
        return ga_step(state, self.config, objective, space, rng)
