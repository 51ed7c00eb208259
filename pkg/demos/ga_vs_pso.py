"""
GA and PSO on Rastrigin
=======================

One run of each baseline with the published parameters, printing the
best-so-far curve every 1000 evaluations.
"""
from hybridswarm import minimize

for algorithm in ("GA", "PSO"):
    result = minimize("rastrigin", 10, algorithm, max_evaluations=10000, seed=3)
    curve = [f for e, f in result.trace if e % 1000 == 0]
    print(f"{algorithm:<4}", " ".join(f"{f:8.3f}" for f in curve))
    print(f"     final best {result.state.global_best_fitness:.4f} after {result.evaluations} evaluations")
