import numpy as np
import pytest

from hybridswarm.core import (ContractError, EvaluationBudget, Individual, ObjectiveFunction, OptimizerState,
                              Population, SearchSpace, clamp_to_bounds, derive_seed, make_rng, try_consume,
                              update_global_best)


@pytest.mark.parametrize("x, low, high, expected", [
    ([0.3], -0.5, 0.5, [0.3]),
    ([7.0], -5.12, 5.12, [5.12]),
    ([-600.5, 601.0], -600, 600, [-600, 600]),
])
def test_clamp_to_bounds(x, low, high, expected):
    space = SearchSpace.box(len(x), low, high)
    np.testing.assert_array_equal(clamp_to_bounds(x, space), expected)


def test_clamp_dimension_mismatch():
    with pytest.raises(ContractError):
        clamp_to_bounds([1.0, 2.0], SearchSpace.box(3, -1, 1))


def test_search_space_invariants():
    with pytest.raises(ContractError):
        SearchSpace([0.0, 1.0], [1.0, 1.0])
    with pytest.raises(ContractError):
        SearchSpace.box(0, -1, 1)
    space = SearchSpace.box(4, -2, 3)
    pts = space.sample(make_rng(0), 500)
    assert pts.shape == (500, 4) and space.contains(pts)


def test_try_consume_exact_fit_and_exhaustion():
    b = EvaluationBudget(25000, 24900)
    assert try_consume(b, 100) and b.consumed == 25000
    assert not try_consume(b, 1) and b.consumed == 25000


def test_try_consume_hundred_steps():
    b = EvaluationBudget(10000)
    assert all(b.try_consume(100) for _ in range(100))
    assert not b.try_consume(100)
    assert b.consumed == 10000


def test_try_consume_rejects_nonpositive():
    with pytest.raises(ContractError):
        EvaluationBudget(10).try_consume(0)


def _state(best):
    pop = Population(np.zeros((1, 2)), np.array([best]))
    return OptimizerState(pop, np.zeros(2), best, EvaluationBudget(10))


@pytest.mark.parametrize("candidate, expected, replaced", [(3.0, 3.0, True), (5.0, 5.0, False), (7.0, 5.0, False)])
def test_update_global_best(candidate, expected, replaced):
    state = update_global_best(_state(5.0), np.ones(2), candidate)
    assert state.global_best_fitness == expected
    assert bool(np.all(state.global_best_position == 1.0)) is replaced


def test_seeds_are_reproducible_and_distinct():
    assert derive_seed(7, "run", 3) == derive_seed(7, "run", 3)
    seeds = {derive_seed(7, "run", i) for i in range(100)}
    assert len(seeds) == 100
    assert derive_seed(7, "a") != derive_seed(8, "a")
    a = make_rng(derive_seed(1, 0)).random(50)
    b = make_rng(derive_seed(1, 0)).random(50)
    np.testing.assert_array_equal(a, b)


def test_population_roundtrip_and_concat():
    inds = [Individual(np.array([1.0, 2.0]), 3.0, np.zeros(2), np.array([1.0, 2.0]), 3.0),
            Individual(np.array([0.0, 0.0]), None, np.ones(2), np.zeros(2), 1.0)]
    pop = Population.from_individuals(inds)
    assert pop.has_memory and np.isnan(pop.fitness[1])
    back = pop.to_individuals()
    assert back[1].fitness is None and back[0].pbest_fitness == 3.0
    assert len(Population.concat(pop, pop)) == 4
    with pytest.raises(ContractError):
        Population.concat(pop, pop.without_memory())


def test_objective_counts_rows():
    f = ObjectiveFunction("sum", lambda x: x.sum(axis=1), SearchSpace.box(3, -1, 1))
    assert f(np.ones(3)) == 3.0
    f(np.ones((5, 3)))
    assert f.evaluations == 6
