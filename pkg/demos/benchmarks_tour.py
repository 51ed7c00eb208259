"""
Benchmark functions at a glance
===============================

Evaluate each benchmark at its known optimum and at a random point, then
check the fast Weierstrass series against the direct form.
"""
import numpy as np

from hybridswarm.benchmarks import (BENCHMARK_NAMES, DOMAINS, known_optimum, make_benchmark, weierstrass_core,
                                    weierstrass_direct)
from hybridswarm.core import make_rng

dim = 10
rng = make_rng(0)

for name in BENCHMARK_NAMES:
    spec = make_benchmark(name, dim, seed=1)
    display, low, high = DOMAINS[name]
    x = spec.space.sample(rng, 1)[0]
    opt = known_optimum(name, dim)
    at_opt = f"{spec(opt):.3g}" if opt is not None else "no closed form"
    print(f"{display:<28} {f'[{low:g}, {high:g}]':<20} f(random) = {spec(x):10.4f}  f(optimum) = {at_opt}")

# Weierstrass is evaluated through rotated, shifted coordinates z = R(x - s)
spec = make_benchmark("weierstrass", dim, seed=1)
print("weierstrass at its shift:", spec(spec.shift))

z = rng.uniform(-0.5, 0.5, (5, 200))
print("fast vs direct series, max abs difference:",
      np.max(np.abs(weierstrass_core(z) - weierstrass_direct(z))))
