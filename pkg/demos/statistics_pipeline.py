"""
Normality, omnibus and pairwise tests
=====================================

The comparison pipeline on synthetic final-fitness samples: one group is
shifted, the rest are drawn from the same distribution.
"""
from hybridswarm.core import make_rng
from hybridswarm.stats import compare_cell, kruskal_wallis, shapiro_wilk

rng = make_rng(5)
finals = {name: rng.normal(10.0, 1.0, 10) for name in ("GA", "PSO", "PGSHEA", "PGCHEA")}
finals["PGPHEA"] = rng.normal(7.0, 1.0, 10)

for name, sample in finals.items():
    rep = shapiro_wilk(sample)
    print(f"{name:<7} W = {rep.statistic:.4f}  p = {rep.p_value:.4f}")

print("rank formula check:", kruskal_wallis([[1, 2, 3], [4, 5, 6], [7, 8, 9]]).statistic)

report = compare_cell(finals, problem="synthetic", dim=10)
print(f"Kruskal-Wallis H = {report.omnibus.statistic:.3f}, p = {report.omnibus.p_value:.2e}, best {report.best}")
for pair in report.pairs:
    flag = "*" if pair.significant else " "
    print(f"  {flag} {pair.pair:<18} z = {pair.z:7.3f}  p = {pair.p_unadjusted:.4f}  bonferroni {pair.p_bonferroni:.4f}")
