"""End-to-end acceptance checks, one marked test (or group) per criterion.

The grid-level checks run the bundled ``paper.json`` experiment twice through the
command line, so this module takes a long time (tens of minutes on one core).
"""
import json
from pathlib import Path

import numpy as np
import pytest

from hybridswarm import cli
from hybridswarm.benchmarks import BENCHMARK_NAMES, BenchmarkSpec, make_benchmark
from hybridswarm.core import EvaluationBudget, Phase, make_rng
from hybridswarm.harness import (ALGORITHM_NAMES, DEFAULT_PARAMETERS, build_algorithm, read_finals,
                                 run_algorithm)
from hybridswarm.hybrids import (PGSHEA, HybridConfig, exchange_top, pgchea_init, pgchea_step, pgphea_init,
                                 pgphea_step)
from hybridswarm.pso import PSO, PsoConfig
from hybridswarm.stats import compare_cell, dunn_test, kruskal_wallis, shapiro_wilk
from hybridswarm.variation import VariationParams, mutation_delta, sbx_children, sbx_spread

DATA = Path(__file__).parent / "data"
FIXTURES = json.loads((DATA / "stats_fixtures.json").read_text())
TABLE3 = json.loads((DATA / "table3_means.json").read_text())
ALPHA = 0.05
GRID_FILES = ("convergence.csv", "summary.csv", "finals.csv", "stats_report.csv")


# -- 1: benchmark optima -------------------------------------------------------------

@pytest.mark.criterion("1", "benchmark optima at n in {1,10,100,1000}")
@pytest.mark.parametrize("n", [1, 10, 100, 1000])
def test_benchmark_optima(n):
    for name, point in [("ackley", 0.0), ("griewank", 0.0), ("rastrigin", 0.0), ("levy", 1.0)]:
        spec = make_benchmark(name, n)
        assert abs(spec(np.full(n, point))) <= 1e-9, name
    assert abs(make_benchmark("schwefel", n)(np.full(n, 420.9687))) <= 1e-3 * n
    shift = make_rng(n).uniform(-0.4, 0.4, n)
    spec = BenchmarkSpec("weierstrass", n, shift, np.eye(n))
    assert abs(spec(shift)) <= 1e-9


# -- 2: budget exactness -------------------------------------------------------------

@pytest.mark.criterion("2", "evaluation count equals ledger and budget; GA runs 99 generations")
@pytest.mark.parametrize("algorithm", ALGORITHM_NAMES)
def test_budget_exactness(algorithm):
    for seed, problem in enumerate(BENCHMARK_NAMES):
        spec = make_benchmark(problem, 10, seed)
        res = run_algorithm(build_algorithm(algorithm, {}, 10), spec, spec.space, 10000, seed)
        assert res.evaluations == res.state.budget.consumed <= 10000
        assert res.trace[-1][0] == res.evaluations
        if algorithm == "GA":
            assert res.state.steps == (10000 - 100) // 100 == 99


# -- 3: desk-scale reproduction on the bundled grid ------------------------------------

def run_grid(out: Path, workers: int, config="paper"):
    assert cli.main(["run", "--config", str(config), "--workers", str(workers), "--out", str(out)]) == 0
    assert cli.main(["stats", str(out)]) == 0
    return out


@pytest.fixture(scope="session")
def paper_grids(tmp_path_factory):
    root = tmp_path_factory.mktemp("paper_grid")
    return run_grid(root / "workers1", 1), run_grid(root / "workers2", 2)


@pytest.fixture(scope="session")
def paper_finals(paper_grids):
    return read_finals(paper_grids[0] / "finals.csv")


def cell_means(finals, problem, dim):
    return {alg: float(np.mean(v)) for alg, v in finals[(problem, dim)].items()}


@pytest.mark.slow
@pytest.mark.criterion("3a", "Rastrigin n=500: PGPHEA beats GA and PSO; Kruskal-Wallis significant")
def test_rastrigin_500(paper_finals):
    means = cell_means(paper_finals, "rastrigin", 500)
    assert means["PGPHEA"] < means["GA"] and means["PGPHEA"] < means["PSO"]
    report = compare_cell(paper_finals[("rastrigin", 500)], ALPHA, "rastrigin", 500)
    assert report.omnibus.p_value < ALPHA


@pytest.mark.slow
@pytest.mark.criterion("3b", "Ackley n=1000: PGPHEA beats both baselines")
def test_ackley_1000(paper_finals):
    means = cell_means(paper_finals, "ackley", 1000)
    assert means["PGPHEA"] < means["PSO"] and means["PGPHEA"] < means["GA"]


@pytest.mark.slow
@pytest.mark.criterion("3c", "Weierstrass n=1000: Dunn PGSHEA vs PGCHEA non-significant")
def test_weierstrass_1000(paper_finals):
    report = compare_cell(paper_finals[("weierstrass", 1000)], ALPHA, "weierstrass", 1000)
    (pair,) = [p for p in report.pairs if {p.first, p.second} == {"PGSHEA", "PGCHEA"}]
    assert pair.p_unadjusted >= ALPHA, f"p = {pair.p_unadjusted:.4g}"


@pytest.mark.slow
@pytest.mark.criterion("3d", "means within a factor of 10 of the published table")
@pytest.mark.parametrize("problem,dim", [("rastrigin", 500), ("ackley", 1000), ("weierstrass", 1000)])
def test_order_of_magnitude(paper_finals, problem, dim):
    means = cell_means(paper_finals, problem, dim)
    for alg, published in TABLE3[problem][str(dim)].items():
        ratio = means[alg] / published
        assert 0.1 <= ratio <= 10, f"{alg}: {means[alg]:.4g} vs {published:.4g}"


# -- 4: statistics oracles -----------------------------------------------------------

@pytest.mark.criterion("4", "H = 7.2 exactly; Shapiro-Wilk and Dunn match reference within 1e-6")
def test_statistics_oracles():
    assert kruskal_wallis([[1, 2, 3], [4, 5, 6], [7, 8, 9]]).statistic == 7.2
    assert len(FIXTURES["shapiro"]) == 20 and len(FIXTURES["groups"]) == 20
    for fx in FIXTURES["shapiro"]:
        rep = shapiro_wilk(fx["sample"])
        assert abs(rep.statistic - fx["W"]) <= 1e-6 and abs(rep.p_value - fx["p"]) <= 1e-6
    for fx in FIXTURES["groups"]:
        ref = np.array(fx["dunn_p"])
        for p in dunn_test(fx["groups"]):
            assert abs(p.p_unadjusted - ref[int(p.first), int(p.second)]) <= 1e-6


# -- 5: property suites --------------------------------------------------------------

@pytest.mark.criterion("5", "operator, trace and hybrid property suites")
def test_sbx_mean_preservation():
    rng = make_rng(11)
    x1, x2 = rng.uniform(-5, 5, (2, 10_000, 4))
    c1, c2 = sbx_children(x1, x2, rng.random((10_000, 4)), 15.0)
    assert np.max(np.abs((c1 + c2) / 2 - (x1 + x2) / 2)) <= 1e-12


@pytest.mark.criterion("5", "operator, trace and hybrid property suites")
def test_forced_u_identities():
    x1, x2 = np.array([0.2, -1.0]), np.array([0.7, 3.0])
    assert sbx_spread(np.array(0.5), 15.0) == 1.0
    c1, c2 = sbx_children(x1, x2, np.full(2, 0.5), 15.0)
    np.testing.assert_array_equal(c1, x1)
    np.testing.assert_array_equal(c2, x2)
    assert mutation_delta(np.array(0.5), 20.0) == 0.0


@pytest.mark.criterion("5", "operator, trace and hybrid property suites")
@pytest.mark.parametrize("algorithm", ALGORITHM_NAMES)
def test_monotone_best_so_far(algorithm):
    rng = make_rng(2024)
    for _ in range(100):
        seed = int(rng.integers(2**31))
        problem = BENCHMARK_NAMES[int(rng.integers(len(BENCHMARK_NAMES)))]
        dim = int(rng.integers(2, 9))
        spec = make_benchmark(problem, dim, seed)
        res = run_algorithm(build_algorithm(algorithm, {}, dim, 20), spec, spec.space, 600, seed, 20)
        fits = [f for _, f in res.trace]
        assert all(b <= a for a, b in zip(fits, fits[1:])), (seed, problem)
        assert fits[-1] == res.state.global_best_fitness


@pytest.mark.criterion("5", "operator, trace and hybrid property suites")
def test_pgchea_memory_after_ga_phase():
    spec = make_benchmark("griewank", 12)
    p = DEFAULT_PARAMETERS["PGCHEA"]
    cfg = HybridConfig(50, PsoConfig(50, p["c1"], p["c2"], p["w"]),
                       VariationParams(p["crossover_rate"], p["mutation_numerator"] / 12))
    rng = make_rng(3)
    state = pgchea_init(cfg, spec, spec.space, rng, EvaluationBudget(10**5))
    for _ in range(20):
        was_ga = state.phase is Phase.GA
        pgchea_step(state, cfg, spec, spec.space, rng)
        if was_ga:
            pop = state.population
            assert pop.has_memory
            assert np.isfinite(pop.velocities).all() and np.isfinite(pop.pbest_positions).all()
            assert np.all(pop.pbest_fitness <= pop.fitness)
            for k in range(len(pop)):
                assert pop[k].is_particle


@pytest.mark.criterion("5", "operator, trace and hybrid property suites")
def test_pgphea_swap_conservation():
    spec = make_benchmark("rastrigin", 6)
    cfg = build_algorithm("PGPHEA", {"exchange_interval": None}, 6).config
    state = pgphea_init(cfg, spec, spec.space, make_rng(8), EvaluationBudget(10**5))
    for _ in range(4):
        pgphea_step(state, cfg, spec, spec.space)
    ne = cfg.exchange_number
    gi = np.argsort(state.ga.fitness, kind="stable")[:ne]
    pi = np.argsort(state.pso.fitness, kind="stable")[:ne]
    before = sorted(map(tuple, np.vstack([state.ga.positions[gi], state.pso.positions[pi]])))
    top_ga = sorted(map(tuple, state.ga.positions[gi]))
    exchange_top(state, ne, cfg.pso_config(len(state.pso)), spec.space)
    after = sorted(map(tuple, np.vstack([state.ga.positions[gi], state.pso.positions[pi]])))
    assert before == after
    assert sorted(map(tuple, state.pso.positions[pi])) == top_ga


@pytest.mark.criterion("5", "operator, trace and hybrid property suites")
def test_pgshea_without_swaps_is_pso():
    p = DEFAULT_PARAMETERS["PGSHEA"]
    pso = PsoConfig(100, p["c1"], p["c2"], p["w"])
    cfg = HybridConfig(100, pso, VariationParams(1.0, 0.1), swap_interval=None, starting_algorithm=Phase.PSO)
    spec = make_benchmark("ackley", 10)
    for seed in range(5):
        a = run_algorithm(PGSHEA(cfg), spec, spec.space, 10000, seed)
        b = run_algorithm(PSO(pso), spec, spec.space, 10000, seed)
        assert a.trace == b.trace


# -- 6: determinism across worker counts ---------------------------------------------

@pytest.mark.slow
@pytest.mark.criterion("6", "bundled grid byte-identical across worker counts")
def test_grid_determinism(paper_grids):
    first, second = paper_grids
    for name in GRID_FILES:
        assert (first / name).read_bytes() == (second / name).read_bytes(), name
