"""PSO-GA hybrids: sequential (PGSHEA), parallel (PGPHEA), consecutive (PGCHEA)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (BudgetExhausted, ConfigError, EvaluationBudget, InitializationError, OptimizerState,
                   Phase, Population, SearchSpace, offer_population)
from .ga import init_plain_population
from .pso import PsoConfig, attach_memory, init_swarm, random_velocities, swarm_move
from .variation import VariationParams, ga_generation


@dataclass(frozen=True)
class HybridConfig:
    """Parameters shared by the three hybrids; each reads the fields it needs.

    ``swap_interval`` / ``exchange_interval`` count algorithm steps; ``None``
    means never switch / never exchange.
    """

    population_size: int = 100
    pso: PsoConfig = PsoConfig()
    variation: VariationParams = VariationParams(1.0, 0.1)
    swap_interval: int | None = 13
    exchange_interval: int | None = 13
    exchange_number: int = 7
    starting_algorithm: Phase = Phase.PSO

    def __post_init__(self):
        if self.population_size < 2:
            raise ConfigError("hybrid population size must be >= 2")
        for name in ("swap_interval", "exchange_interval"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError(f"{name} must be a positive integer or None")
        if self.exchange_number < 0:
            raise ConfigError("exchange_number must be non-negative")
        object.__setattr__(self, "starting_algorithm", Phase(self.starting_algorithm))

    def pso_config(self, size: int) -> PsoConfig:
        return replace(self.pso, population_size=size)


def _interval_reached(count: int, interval: int | None) -> bool:
    return interval is not None and count % interval == 0


def _budget_for_init(budget: EvaluationBudget, n: int):
    if not budget.try_consume(n):
        raise InitializationError(f"budget of {budget.max_evaluations} cannot pay for {n} initial evaluations")


def _state_from(pop: Population, budget: EvaluationBudget, phase: Phase | None) -> OptimizerState:
    best = int(np.argmin(pop.fitness))
    return OptimizerState(pop, pop.positions[best].copy(), float(pop.fitness[best]), budget, phase)


# -- sequential -------------------------------------------------------------------

def pgshea_init(config: HybridConfig, objective, space: SearchSpace, rng,
                budget: EvaluationBudget) -> OptimizerState:
    n = config.population_size
    _budget_for_init(budget, n)
    if config.starting_algorithm is Phase.PSO:
        pop = init_swarm(n, config.pso_config(n), objective, space, rng)
    else:
        pop = init_plain_population(n, objective, space, rng)
    return _state_from(pop, budget, config.starting_algorithm)


def pgshea_step(state: OptimizerState, config: HybridConfig, objective,
                space: SearchSpace, rng) -> OptimizerState:
    """One step of the active algorithm; switch after ``swap_interval`` of them."""
    n = len(state.population)
    if not state.budget.try_consume(n):
        raise BudgetExhausted
    pso = config.pso_config(n)
    if state.phase is Phase.PSO:
        # the preserved global best acts as p_g even if no particle holds it
        swarm_move(state.population, state.global_best_position, pso, objective, space, rng)
    else:
        state.population = ga_generation(state.population, config.variation, objective, space, rng)
    offer_population(state, state.population.positions, state.population.fitness)
    state.steps += 1
    state.phase_steps += 1
    if _interval_reached(state.phase_steps, config.swap_interval):
        state.phase_steps = 0
        if state.phase is Phase.PSO:
            state.population = state.population.without_memory()
            state.phase = Phase.GA
        else:
            state.population = attach_memory(state.population, pso, space, rng)
            state.phase = Phase.PSO
    return state


# -- parallel ---------------------------------------------------------------------

@dataclass
class ParallelState:
    """Two cooperating subpopulations with their own random streams."""

    ga: Population
    pso: Population
    global_best_position: np.ndarray
    global_best_fitness: float
    budget: EvaluationBudget
    ga_rng: object
    pso_rng: object
    steps: int = 0
    phase: Phase | None = None
    extras: dict = field(default_factory=dict)

    @property
    def population(self) -> Population:
        return Population.concat(self.ga.without_memory(), self.pso.without_memory())


def split_sizes(n: int) -> tuple[int, int]:
    """(GA size, PSO size); GA gets the extra individual for odd ``n``."""
    ga = math.ceil(n / 2)
    return ga, n - ga


def pgphea_init(config: HybridConfig, objective, space: SearchSpace, rng,
                budget: EvaluationBudget) -> ParallelState:
    n = config.population_size
    n_ga, n_pso = split_sizes(n)
    if config.exchange_number > n // 2:
        raise ConfigError("exchange_number cannot exceed floor(N/2)")
    _budget_for_init(budget, n)
    ga_rng, pso_rng = rng.spawn(2)
    ga = init_plain_population(n_ga, objective, space, ga_rng)
    pso = init_swarm(n_pso, config.pso_config(n_pso), objective, space, pso_rng)
    both = Population.concat(ga, pso.without_memory())
    best = int(np.argmin(both.fitness))
    return ParallelState(ga, pso, both.positions[best].copy(), float(both.fitness[best]),
                         budget, ga_rng, pso_rng)


def exchange_top(state: ParallelState, number: int, pso: PsoConfig, space: SearchSpace):
    """Swap the positions of the best ``number`` members of each subpopulation."""
    if number == 0:
        return state
    gi = np.argsort(state.ga.fitness, kind="stable")[:number]
    pi = np.argsort(state.pso.fitness, kind="stable")[:number]
    to_pso_x, to_pso_f = state.ga.positions[gi].copy(), state.ga.fitness[gi].copy()
    to_ga_x, to_ga_f = state.pso.positions[pi].copy(), state.pso.fitness[pi].copy()
    state.ga.positions[gi] = to_ga_x
    state.ga.fitness[gi] = to_ga_f
    state.pso.positions[pi] = to_pso_x
    state.pso.fitness[pi] = to_pso_f
    state.pso.velocities[pi] = random_velocities(number, pso, space, state.pso_rng)
    state.pso.pbest_positions[pi] = to_pso_x
    state.pso.pbest_fitness[pi] = to_pso_f
    return state


def pgphea_step(state: ParallelState, config: HybridConfig, objective,
                space: SearchSpace, rng=None) -> ParallelState:
    """Joint step: PSO on its half, GA on its half, sync best, maybe exchange.

    The subpopulations draw from the streams created at init; ``rng`` is unused.
    """
    n = len(state.ga) + len(state.pso)
    if not state.budget.try_consume(n):
        raise BudgetExhausted
    pso = config.pso_config(len(state.pso))
    swarm_move(state.pso, state.global_best_position, pso, objective, space, state.pso_rng)
    state.ga = ga_generation(state.ga, config.variation, objective, space, state.ga_rng)
    offer_population(state, state.pso.positions, state.pso.fitness)
    offer_population(state, state.ga.positions, state.ga.fitness)
    state.steps += 1
    if _interval_reached(state.steps, config.exchange_interval):
        exchange_top(state, config.exchange_number, pso, space)
    return state


# -- consecutive ------------------------------------------------------------------

def pgchea_init(config: HybridConfig, objective, space: SearchSpace, rng,
                budget: EvaluationBudget) -> OptimizerState:
    n = config.population_size
    _budget_for_init(budget, n)
    pop = init_swarm(n, config.pso_config(n), objective, space, rng)
    return _state_from(pop, budget, config.starting_algorithm)


def refresh_personal_best(pop: Population) -> Population:
    better = pop.fitness < pop.pbest_fitness
    pop.pbest_positions[better] = pop.positions[better]
    pop.pbest_fitness[better] = pop.fitness[better]
    return pop


def pgchea_step(state: OptimizerState, config: HybridConfig, objective,
                space: SearchSpace, rng) -> OptimizerState:
    """Alternate PSO and GA steps; GA offspring keep velocity and personal best."""
    n = len(state.population)
    if not state.budget.try_consume(n):
        raise BudgetExhausted
    if state.phase is Phase.PSO:
        swarm_move(state.population, state.global_best_position, config.pso_config(n),
                   objective, space, rng)
        state.phase = Phase.GA
    else:
        pop = ga_generation(state.population, config.variation, objective, space, rng, inherit=True)
        state.population = refresh_personal_best(pop)
        state.phase = Phase.PSO
    offer_population(state, state.population.positions, state.population.fitness)
    state.steps += 1
    return state


class _Hybrid:
    name = ""
    _init = None
    _step = None

    def __init__(self, config: HybridConfig):
        self.config = config

    def init(self, objective, space, rng, budget):
        return type(self)._init(self.config, objective, space, rng, budget)

    def step(self, state, objective, space, rng):
        return type(self)._step(state, self.config, objective, space, rng)


class PGSHEA(_Hybrid):
    name = "PGSHEA"
    _init = staticmethod(pgshea_init)
    _step = staticmethod(pgshea_step)


class PGPHEA(_Hybrid):
    name = "PGPHEA"
    _init = staticmethod(pgphea_init)
    _step = staticmethod(pgphea_step)


class PGCHEA(_Hybrid):
    name = "PGCHEA"
    _init = staticmethod(pgchea_init)
    _step = staticmethod(pgchea_step)
