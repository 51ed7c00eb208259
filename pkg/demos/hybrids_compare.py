"""
Three ways to combine PSO and GA
================================

Run the sequential, parallel and consecutive hybrids side by side on a
50-dimensional Ackley problem with the same seeds.
"""
import numpy as np

from hybridswarm import minimize

seeds = range(3)
for algorithm in ("PGSHEA", "PGPHEA", "PGCHEA"):
    finals = [minimize("ackley", 50, algorithm, max_evaluations=25000, seed=s).state.global_best_fitness
              for s in seeds]
    print(f"{algorithm:<7} mean {np.mean(finals):8.4f}  runs {np.round(finals, 3)}")

# the sequential hybrid starts in PSO and switches every swap_interval steps
res = minimize("ackley", 50, "PGSHEA", max_evaluations=2600, seed=0, params={"swap_interval": 5})
print("PGSHEA phase after", res.state.steps, "steps:", res.state.phase.value)
