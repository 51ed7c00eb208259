"""Benchmark objectives (minimisation) and their search domains.

All evaluators accept a single vector or an ``(m, n)`` stack of row vectors
and raise :class:`DomainError` for points outside the function's box.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConfigError, ObjectiveFunction, SearchSpace, make_rng


class DomainError(ValueError):
    """Point outside the benchmark's search domain."""


MICHALEWICZ_M = 10
WEIERSTRASS_KMAX = 20

# name -> (display name, lower, upper); all domains are hypercubes
DOMAINS = {
    "ackley": ("Ackley", -32.768, 32.768),
    "griewank": ("Griewank", -600.0, 600.0),
    "levy": ("Levy", -10.0, 10.0),
    "michalewicz": ("Michalewicz", 0.0, np.pi),
    "rastrigin": ("Rastrigin", -5.12, 5.12),
    "schwefel": ("Schwefel", -500.0, 500.0),
    "weierstrass": ("Shifted Rotated Weierstrass", -0.5, 0.5),
}
BENCHMARK_NAMES = tuple(DOMAINS)


def _prepare(x, name):
    x = np.asarray(x, dtype=float)
    _, low, high = DOMAINS[name]
    if np.any(x < low) or np.any(x > high) or np.any(np.isnan(x)):
        raise DomainError(f"{name}: input outside [{low}, {high}]^n")
    return x


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def eval_ackley(x):
    x = _prepare(x, "ackley")
    n = x.shape[-1]
    a = -20.0 * np.exp(-0.2 * np.sqrt(np.sum(x * x, axis=-1) / n))
    b = -np.exp(np.sum(np.cos(2.0 * np.pi * x), axis=-1) / n)
    return _out(a + b + 20.0 + np.e)


def eval_griewank(x):
    x = _prepare(x, "griewank")
    i = np.arange(1, x.shape[-1] + 1)
    return _out(1.0 + np.sum(x * x, axis=-1) / 4000.0 - np.prod(np.cos(x / np.sqrt(i)), axis=-1))


def eval_levy(x):
    x = _prepare(x, "levy")
    w = 1.0 + (x - 1.0) / 4.0
    first = np.sin(np.pi * w[..., 0]) ** 2
    wi = w[..., :-1]
    middle = np.sum((wi - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * wi + 1.0) ** 2), axis=-1)
    wn = w[..., -1]
    last = (wn - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * wn) ** 2)
    return _out(first + middle + last)


def eval_michalewicz(x):
    x = _prepare(x, "michalewicz")
    i = np.arange(1, x.shape[-1] + 1)
    terms = np.sin(x) * np.sin(i * x * x / np.pi) ** (2 * MICHALEWICZ_M)
    return _out(-np.sum(terms, axis=-1))


def eval_rastrigin(x):
    x = _prepare(x, "rastrigin")
    n = x.shape[-1]
    return _out(10.0 * n + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x), axis=-1))


def eval_schwefel(x):
    x = _prepare(x, "schwefel")
    n = x.shape[-1]
    return _out(418.9829 * n - np.sum(x * np.sin(np.sqrt(np.abs(x))), axis=-1))


_K = np.arange(WEIERSTRASS_KMAX + 1)
_AK = 0.5 ** _K
_BK = 3.0 ** _K


def _weierstrass_terms(y):
    """Sum over k of 0.5^k cos(2 pi 3^k y) along the last axis.

    cos/sin of the k-th frequency come from cubing the (k-1)-th phasor; the
    phase error grows 3x per step, exactly like forming 3^k * y directly.
    """
    theta = 2.0 * np.pi * y
    c, s = np.cos(theta), np.sin(theta)
    total = np.sum(c, axis=-1)
    for a in _AK[1:]:
        c, s = c * (c * c - 3.0 * s * s), s * (3.0 * c * c - s * s)
        total = total + a * np.sum(c, axis=-1)
    return total


# value of the inner sum at the optimum; subtracted once per coordinate
_W_OFFSET = float(_weierstrass_terms(np.array([0.5])))


def weierstrass_core(z):
    """Unshifted, unrotated Weierstrass sum; no domain check on ``z``."""
    z = np.asarray(z, dtype=float)
    return _weierstrass_terms(z + 0.5) - z.shape[-1] * _W_OFFSET


def weierstrass_direct(z):
    """Term-by-term reference evaluation of :func:`weierstrass_core`."""
    z = np.asarray(z, dtype=float)
    total = np.zeros(z.shape[:-1])
    for a, b in zip(_AK, _BK):
        total = total + a * np.sum(np.cos(2.0 * np.pi * b * (z + 0.5)), axis=-1)
    offset = float(np.sum(_AK * np.cos(2.0 * np.pi * _BK * 0.5)))
    return total - z.shape[-1] * offset


@dataclass(frozen=True, eq=False)
class BenchmarkSpec:
    """One benchmark instance; only Weierstrass carries a shift and rotation."""

    name: str
    dim: int
    shift: np.ndarray | None = None
    rotation: np.ndarray | None = None

    def __post_init__(self):
        if self.name not in DOMAINS:
            raise ConfigError(f"unknown benchmark {self.name!r}")
        if self.dim < 1:
            raise ConfigError("dim must be positive")
        transformed = self.shift is not None or self.rotation is not None
        if transformed and self.name != "weierstrass":
            raise ConfigError("only the Weierstrass benchmark takes a shift/rotation")
        if transformed:
            if self.shift is None or self.rotation is None:
                raise ConfigError("Weierstrass needs both a shift and a rotation")
            shift = np.asarray(self.shift, dtype=float)
            rot = np.asarray(self.rotation, dtype=float)
            if shift.shape != (self.dim,) or rot.shape != (self.dim, self.dim):
                raise ConfigError("shift/rotation shape does not match dim")
            if np.any(np.abs(shift) > 0.5):
                raise ConfigError("shift components must lie in [-0.5, 0.5]")
            if not np.allclose(rot.T @ rot, np.eye(self.dim), rtol=0.0, atol=1e-10):
                raise ConfigError("rotation is not orthogonal")
            object.__setattr__(self, "shift", shift)
            object.__setattr__(self, "rotation", rot)

    @property
    def display_name(self) -> str:
        return DOMAINS[self.name][0]

    @property
    def space(self) -> SearchSpace:
        _, low, high = DOMAINS[self.name]
        return SearchSpace.box(self.dim, low, high)

    def __call__(self, x):
        if self.name == "weierstrass":
            return eval_weierstrass_sr(x, self)
        return _EVALUATORS[self.name](x)

    def objective(self) -> ObjectiveFunction:
        return ObjectiveFunction(self.name, self, self.space)


def eval_weierstrass_sr(x, spec: BenchmarkSpec):
    if spec.shift is None or spec.rotation is None:
        raise ConfigError("Weierstrass spec is missing its shift/rotation")
    x = _prepare(x, "weierstrass")
    z = (x - spec.shift) @ spec.rotation.T
    return _out(weierstrass_core(z))


_EVALUATORS = {
    "ackley": eval_ackley,
    "griewank": eval_griewank,
    "levy": eval_levy,
    "michalewicz": eval_michalewicz,
    "rastrigin": eval_rastrigin,
    "schwefel": eval_schwefel,
}


def make_random_rotation(dim: int, rng) -> np.ndarray:
    """Haar-distributed orthogonal matrix: QR of a Gaussian matrix, signs fixed."""
    if dim < 1:
        raise ConfigError("dim must be positive")
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def make_benchmark(name: str, dim: int, seed: int | None = None) -> BenchmarkSpec:
    """Build a benchmark instance; Weierstrass draws its shift and rotation from ``seed``."""
    if name != "weierstrass":
        return BenchmarkSpec(name, dim)
    if seed is None:
        raise ConfigError("the Weierstrass instance needs a seed")
    rng = make_rng(seed)
    shift = rng.uniform(-0.5, 0.5, dim)
    return BenchmarkSpec(name, dim, shift, make_random_rotation(dim, rng))


def known_optimum(name: str, dim: int) -> np.ndarray | None:
    """Location of the global minimum where it is known in closed form."""
    if name in ("ackley", "griewank", "rastrigin"):
        return np.zeros(dim)
    if name == "levy":
        return np.ones(dim)
    if name == "schwefel":
        return np.full(dim, 420.9687)
    return None
