"""Normality screening, Kruskal-Wallis and Dunn's post-hoc test.

Distribution tails come from ``scipy.stats``; the test statistics are
computed here.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import chi2, norm, rankdata

ALPHA = 0.05


class DegenerateSampleError(ValueError):
    """Sample has zero variance."""


class UnsupportedSizeError(ValueError):
    """Sample size outside the supported range."""


@dataclass(frozen=True)
class TestReport:
    test: str
    statistic: float
    p_value: float
    alpha: float = ALPHA
    groups: tuple = ()

    @property
    def significant(self) -> bool:
        return self.p_value < self.alpha


# -- Shapiro-Wilk (Royston's approximation) ------------------------------------------

_C1 = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056]
_C2 = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633]
_C3 = [0.5440, -0.39978, 0.025054, -6.714e-4]
_C4 = [1.3822, -0.77857, 0.062767, -0.0020322]
_C5 = [-1.5861, -0.31082, -0.083751, 0.0038915]
_C6 = [-0.4803, -0.082676, 0.0030302]
_G = [-2.273, 0.459]


def _poly(coef, x):
    return sum(c * x**i for i, c in enumerate(coef))


def shapiro_coefficients(n: int) -> np.ndarray:
    """Weights ``a_1 >= ... >= a_{n//2} > 0`` applied to ``x_(n+1-i) - x_(i)``."""
    if n == 3:
        return np.array([math.sqrt(0.5)])
    m = norm.ppf((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    summ2 = float(np.sum(m * m))
    rsn = 1.0 / math.sqrt(n)
    mn = m[-1]  # largest expected order statistic
    a = np.empty(n // 2)
    a[0] = _poly(_C1, rsn) + mn / math.sqrt(summ2)
    if n > 5:
        a[1] = _poly(_C2, rsn) + m[-2] / math.sqrt(summ2)
        fac = math.sqrt((summ2 - 2 * mn**2 - 2 * m[-2] ** 2) / (1 - 2 * a[0] ** 2 - 2 * a[1] ** 2))
        start = 2
    else:
        fac = math.sqrt((summ2 - 2 * mn**2) / (1 - 2 * a[0] ** 2))
        start = 1
    a[start:] = m[::-1][start:n // 2] / fac
    return a


def shapiro_wilk(sample: Sequence[float], alpha: float = ALPHA) -> TestReport:
    """W statistic and p-value for 3 <= n <= 50; rejecting means non-normal."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if not 3 <= n <= 50:
        raise UnsupportedSizeError(f"Shapiro-Wilk supports 3..50 observations, got {n}")
    if x[-1] == x[0]:
        raise DegenerateSampleError("all observations are equal")
    a = shapiro_coefficients(n)
    diff = x[::-1][: n // 2] - x[: n // 2]
    ss = float(np.sum((x - x.mean()) ** 2))
    w = min(1.0, float(np.dot(a, diff)) ** 2 / ss)
    if n == 3:
        p = max(0.0, 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.asin(math.sqrt(0.75))))
        return TestReport("shapiro-wilk", w, min(1.0, p), alpha)
    w1 = math.log1p(-w) if w < 1 else -math.inf
    if n <= 11:
        gamma = _poly(_G, n)
        if w1 >= gamma:
            return TestReport("shapiro-wilk", w, 0.0, alpha)
        y = -math.log(gamma - w1)
        mu, sigma = _poly(_C3, n), math.exp(_poly(_C4, n))
    else:
        xx = math.log(n)
        y, mu, sigma = w1, _poly(_C5, xx), math.exp(_poly(_C6, xx))
    p = float(norm.sf((y - mu) / sigma)) if np.isfinite(y) else 1.0
    return TestReport("shapiro-wilk", w, p, alpha)


# -- rank tests --------------------------------------------------------------------

def _pooled_ranks(groups):
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    arrays = [np.asarray(g, dtype=float) for g in groups]
    if any(a.size == 0 for a in arrays):
        raise ValueError("every group needs at least one observation")
    pooled = np.concatenate(arrays)
    ranks = rankdata(pooled)
    sizes = np.array([a.size for a in arrays])
    splits = np.split(ranks, np.cumsum(sizes)[:-1])
    mean_ranks = np.array([s.mean() for s in splits])
    _, counts = np.unique(pooled, return_counts=True)
    tie_sum = float(np.sum(counts.astype(float) ** 3 - counts))
    return mean_ranks, sizes, pooled.size, tie_sum


def kruskal_wallis(groups: Sequence[Sequence[float]], alpha: float = ALPHA) -> TestReport:
    """Tie-corrected H; chi-square tail with k - 1 degrees of freedom.

    A pooled sample with every value equal carries no evidence: H = 0, p = 1.
    """
    mean_ranks, sizes, n, tie_sum = _pooled_ranks(groups)
    if n < 2:
        raise ValueError("need at least two observations")
    rank_sums = mean_ranks * sizes
    # one division at the end keeps integer rank sums exact
    h = (12.0 * float(np.sum(rank_sums**2 / sizes)) - 3.0 * n * (n + 1) ** 2) / (n * (n + 1))
    correction = 1.0 - tie_sum / (n**3 - n)
    if correction <= 0:
        return TestReport("kruskal-wallis", 0.0, 1.0, alpha)
    h = max(0.0, h / correction)
    return TestReport("kruskal-wallis", h, float(chi2.sf(h, len(sizes) - 1)), alpha)


@dataclass(frozen=True)
class PairwiseReport:
    first: str
    second: str
    z: float
    p_unadjusted: float
    p_bonferroni: float
    alpha: float = ALPHA

    @property
    def pair(self) -> str:
        return f"{self.first} vs {self.second}"

    @property
    def significant(self) -> bool:
        return self.p_unadjusted < self.alpha


def dunn_test(groups: Sequence[Sequence[float]], labels: Sequence[str] | None = None,
              alpha: float = ALPHA) -> list[PairwiseReport]:
    """All pairwise Dunn z statistics with two-sided normal p-values.

    ``z(i, j)`` is positive when group ``i`` has the larger mean rank.
    Bonferroni multiplies by the number of pairs, capped at 1.
    """
    mean_ranks, sizes, n, tie_sum = _pooled_ranks(groups)
    k = len(sizes)
    labels = list(labels) if labels is not None else [str(i) for i in range(k)]
    if len(labels) != k:
        raise ValueError("one label per group")
    m = k * (k - 1) // 2
    scale = n * (n + 1) / 12.0 - (tie_sum / (12.0 * (n - 1)) if n > 1 else 0.0)
    out = []
    for i, j in itertools.combinations(range(k), 2):
        se = math.sqrt(max(scale, 0.0) * (1.0 / sizes[i] + 1.0 / sizes[j]))
        diff = float(mean_ranks[i] - mean_ranks[j])
        z = diff / se if se > 0 else 0.0
        p = min(1.0, float(2.0 * norm.sf(abs(z))))
        out.append(PairwiseReport(labels[i], labels[j], z, p, min(1.0, p * m), alpha))
    return out


# -- cell pipeline -----------------------------------------------------------------

@dataclass
class CellReport:
    problem: str
    dim: int
    best: str
    normality: dict
    omnibus: TestReport
    pairs: list = field(default_factory=list)

    def non_significant_vs_best(self) -> list[PairwiseReport]:
        return [p for p in self.pairs if self.best in (p.first, p.second) and not p.significant]


def compare_cell(finals: Mapping[str, Sequence[float]], alpha: float = ALPHA,
                 problem: str = "", dim: int = 0) -> CellReport:
    """Normality screen, omnibus test and pairwise comparisons for one cell.

    ``finals`` maps algorithm label to its final fitness values; the best
    algorithm is the one with the lowest mean.
    """
    labels = list(finals)
    groups = [np.asarray(finals[a], dtype=float) for a in labels]
    normality = {}
    for label, g in zip(labels, groups):
        try:
            normality[label] = shapiro_wilk(g, alpha)
        except (DegenerateSampleError, UnsupportedSizeError):
            normality[label] = None
    omnibus = kruskal_wallis(groups, alpha)
    pairs = dunn_test(groups, labels, alpha)
    best = labels[int(np.argmin([g.mean() for g in groups]))]
    return CellReport(problem, dim, best, normality, omnibus, pairs)


def compare_all(grouped: Mapping, alpha: float = ALPHA) -> list[CellReport]:
    """Run :func:`compare_cell` on ``{(problem, dim): {alg: finals}}``."""
    return [compare_cell(by_alg, alpha, problem, dim) for (problem, dim), by_alg in grouped.items()]


def _fmt(x: float) -> str:
    return repr(float(x))


def write_stats_report(reports: Sequence[CellReport], path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["problem", "dim", "pair", "z", "p_unadjusted", "p_bonferroni", "significant"])
        for rep in reports:
            for p in rep.pairs:
                writer.writerow([rep.problem, rep.dim, p.pair, _fmt(p.z), _fmt(p.p_unadjusted),
                                 _fmt(p.p_bonferroni), str(p.significant).lower()])
    return path


def format_non_significant(reports: Sequence[CellReport]) -> str:
    """Table of pairs not significantly different from each cell's best."""
    lines = [f"{'Problem':<14} {'Dim':>5}  {'Algorithm Pair':<22} {'p-value':>8}"]
    for rep in reports:
        for p in rep.non_significant_vs_best():
            lines.append(f"{rep.problem:<14} {rep.dim:>5}  {p.pair:<22} {p.p_unadjusted:>8.4f}")
    return "\n".join(lines)
