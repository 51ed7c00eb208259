import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hybridswarm.core import ContractError, Individual, Population, SearchSpace, make_rng
from hybridswarm.variation import (VariationParams, make_offspring, mutation_delta, polynomial_mutation,
                                   replace_truncation, sbx_children, sbx_crossover, sbx_crossover_inheriting,
                                   sbx_pairs, tournament_select, truncate)

SPACE = SearchSpace.box(3, -5, 5)


def ind(fitness, x=0.0, dim=3, **kw):
    return Individual(np.full(dim, x), fitness, **kw)


def particle(x, v, pbest_fitness, fitness=None, dim=2):
    return Individual(np.full(dim, x), fitness if fitness is not None else pbest_fitness + 1,
                      np.array(v, dtype=float), np.full(dim, x), pbest_fitness)


class TestTournament:
    def test_fitter_wins(self, const_rng):
        a, b = ind(1.0), ind(5.0)
        assert tournament_select([a, b], const_rng(integers=[0, 1])) is a
        assert tournament_select([a, b], const_rng(integers=[1, 0])) is a

    def test_degenerate_draw(self, const_rng):
        a, b = ind(1.0), ind(5.0)
        assert tournament_select([a, b], const_rng(integers=[1, 1])) is b

    def test_tie_first_drawn(self, const_rng):
        a, a2 = ind(2.0), ind(2.0)
        assert tournament_select([a, a2], const_rng(integers=[0, 1])) is a
        assert tournament_select([a, a2], const_rng(integers=[1, 0])) is a2

    def test_empty(self, const_rng):
        with pytest.raises(ContractError):
            tournament_select([], const_rng())


class TestSbx:
    def test_u_half_is_identity(self, const_rng):
        params = VariationParams(1.0, 0.0)
        p1, p2 = ind(1.0, -1.0), ind(2.0, 3.0)
        c1, c2 = sbx_crossover(p1, p2, params, SPACE, const_rng(0.5))
        np.testing.assert_array_equal(c1.position, p1.position)
        np.testing.assert_array_equal(c2.position, p2.position)
        assert c1.fitness is None

    def test_gate_closed_copies_parents(self, const_rng):
        params = VariationParams(0.0, 0.0)
        p1, p2 = ind(1.0, -1.0), ind(2.0, 3.0)
        c1, c2 = sbx_crossover(p1, p2, params, SPACE, const_rng(0.8))
        assert c1.fitness == 1.0 and c2.fitness == 2.0
        np.testing.assert_array_equal(c2.position, p2.position)

    def test_hand_example(self, const_rng):
        beta = (1 / 0.4) ** (1 / 3)
        space = SearchSpace.box(1, -5, 5)
        c1, c2 = sbx_crossover(Individual(np.array([0.0]), 0.0), Individual(np.array([2.0]), 0.0),
                               VariationParams(1.0, 0.0, sbx_index=2.0), space, const_rng(0.8))
        assert c1.position[0] == pytest.approx(-0.3572088082974534, rel=1e-12)
        assert c2.position[0] == pytest.approx(2.3572088082974534, rel=1e-12)
        assert c1.position[0] == pytest.approx(1 - beta, rel=1e-12)

    def test_mean_preservation_before_clamp(self):
        rng = make_rng(0)
        x1 = rng.uniform(-5, 5, (10_000, 3))
        x2 = rng.uniform(-5, 5, (10_000, 3))
        u = rng.random((10_000, 3))
        c1, c2 = sbx_children(x1, x2, u, 15.0)
        assert np.max(np.abs((c1 + c2) / 2 - (x1 + x2) / 2)) <= 1e-12

    @given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0))
    @settings(max_examples=50, deadline=None)
    def test_children_in_bounds(self, seed, pc):
        rng = make_rng(seed)
        x1, x2 = SPACE.sample(rng, 20), SPACE.sample(rng, 20)
        c1, c2, _ = sbx_pairs(x1, x2, VariationParams(pc, 0.0, sbx_index=0.5), SPACE, rng)
        assert SPACE.contains(c1) and SPACE.contains(c2)

    def test_dimension_mismatch(self, const_rng):
        with pytest.raises(ContractError):
            sbx_crossover(ind(0.0, dim=2), ind(0.0, dim=3), VariationParams(1, 0), SPACE, const_rng())


class TestInheritingSbx:
    def test_u_half_full_clone(self, const_rng):
        p1, p2 = particle(1.0, [1, -1], 0.5), particle(-2.0, [0, 0], 0.25)
        space = SearchSpace.box(2, -5, 5)
        c1, c2 = sbx_crossover_inheriting(p1, p2, VariationParams(1.0, 0.0), space, const_rng(0.5))
        for c, p in ((c1, p1), (c2, p2)):
            np.testing.assert_array_equal(c.position, p.position)
            np.testing.assert_array_equal(c.velocity, p.velocity)
            np.testing.assert_array_equal(c.pbest_position, p.pbest_position)
            assert c.pbest_fitness == p.pbest_fitness

    def test_index_aligned_inheritance(self):
        p1, p2 = particle(1.0, [1, -1], 0.5), particle(-2.0, [0, 0], 0.25)
        space = SearchSpace.box(2, -5, 5)
        for seed in range(20):
            c1, c2 = sbx_crossover_inheriting(p1, p2, VariationParams(1.0, 0.0), space, make_rng(seed))
            np.testing.assert_array_equal(c1.velocity, [1, -1])
            np.testing.assert_array_equal(c2.velocity, [0, 0])
            assert (c1.pbest_fitness, c2.pbest_fitness) == (0.5, 0.25)

    def test_positions_match_standard_sbx(self):
        space = SearchSpace.box(2, -5, 5)
        params = VariationParams(0.9, 0.0)
        gen = make_rng(0)
        for seed in range(1000):
            p1 = Individual(gen.uniform(-5, 5, 2), 1.0, gen.normal(size=2), gen.uniform(-5, 5, 2), 0.0)
            p2 = Individual(gen.uniform(-5, 5, 2), 2.0, gen.normal(size=2), gen.uniform(-5, 5, 2), 0.0)
            a = sbx_crossover(p1, p2, params, space, make_rng(seed))
            b = sbx_crossover_inheriting(p1, p2, params, space, make_rng(seed))
            np.testing.assert_array_equal(a[0].position, b[0].position)
            np.testing.assert_array_equal(a[1].position, b[1].position)

    def test_requires_particles(self, const_rng):
        with pytest.raises(ContractError):
            sbx_crossover_inheriting(ind(0.0), ind(1.0), VariationParams(1, 0), SPACE, const_rng())


class TestPolynomialMutation:
    def test_u_half_identity(self, const_rng):
        x = ind(3.0, 1.5)
        out = polynomial_mutation(x, VariationParams(1.0, 1.0), SPACE, const_rng(0.5))
        np.testing.assert_array_equal(out.position, x.position)
        assert out.fitness == 3.0

    def test_zero_rate_identity(self):
        x = Individual(np.array([0.1, -2.0, 4.0]), 1.0)
        out = polynomial_mutation(x, VariationParams(1.0, 0.0), SPACE, make_rng(3))
        np.testing.assert_array_equal(out.position, x.position)
        assert out.fitness == 1.0

    def test_hand_example(self, const_rng):
        space = SearchSpace.box(1, -1, 1)
        out = polynomial_mutation(Individual(np.array([0.0]), 0.0), VariationParams(1.0, 1.0, mutation_index=20),
                                  space, const_rng(0.9))
        assert out.position[0] == pytest.approx(0.14755334793486452, rel=1e-12)
        assert out.position[0] == pytest.approx(2 * (1 - 0.2 ** (1 / 21)), rel=1e-12)
        assert out.fitness is None

    def test_memory_passes_through(self):
        p = particle(0.5, [0.3, -0.2], 0.1)
        out = polynomial_mutation(p, VariationParams(1.0, 1.0), SearchSpace.box(2, -1, 1), make_rng(0))
        np.testing.assert_array_equal(out.velocity, p.velocity)
        assert out.pbest_fitness == p.pbest_fitness

    def test_delta_range(self):
        d = mutation_delta(make_rng(0).random(10_000), 20.0)
        assert np.all((d >= -1) & (d <= 1))


class TestReplacement:
    def test_examples(self):
        parents = [ind(1.0), ind(3.0)]
        offspring = [ind(2.0), ind(4.0)]
        assert [i.fitness for i in replace_truncation(parents, offspring, 2)] == [1.0, 2.0]
        worse = [ind(9.0), ind(8.0)]
        assert [i.fitness for i in replace_truncation(parents, worse, 2)] == [1.0, 3.0]

    def test_tie_prefers_parent(self):
        parent, child = ind(2.0, 1.0), ind(2.0, -1.0)
        (survivor,) = replace_truncation([parent], [child], 1)
        np.testing.assert_array_equal(survivor.position, parent.position)

    def test_union_too_small(self):
        with pytest.raises(ContractError):
            replace_truncation([ind(1.0)], [ind(2.0)], 3)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=20),
           st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=20))
    def test_best_never_lost(self, fp, fo):
        parents = Population(np.zeros((len(fp), 1)), np.array(fp))
        offspring = Population(np.zeros((len(fo), 1)), np.array(fo))
        out = truncate(parents, offspring, len(fp))
        assert out.fitness.min() <= min(fp)
        assert len(out) == len(fp)


def test_offspring_in_bounds_and_count():
    rng = make_rng(4)
    pos = SPACE.sample(rng, 11)
    pop = Population(pos, np.arange(11.0))
    off = make_offspring(pop, VariationParams(1.0, 0.5, 2.0, 2.0), SPACE, rng)
    assert len(off) == 11 and SPACE.contains(off.positions) and np.all(np.isnan(off.fitness))
