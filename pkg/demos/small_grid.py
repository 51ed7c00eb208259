"""
A small experiment grid
=======================

Build a reduced configuration, run it with two workers, write the CSV
outputs and compare the algorithms per cell.
"""
import tempfile
from pathlib import Path

from hybridswarm import ExperimentConfig, run_experiment, summarize
from hybridswarm.harness import ALGORITHM_NAMES, group_finals, write_outputs
from hybridswarm.stats import compare_all, format_non_significant

config = ExperimentConfig.from_dict({
    "master_seed": 11,
    "runs_per_cell": 5,
    "problems": ["griewank", "weierstrass"],
    "dimensions": [10],
    "budget_rule": {"10": 5000},
    "algorithms": [{"name": name, "params": {}} for name in ALGORITHM_NAMES],
})

records = run_experiment(config, workers=2)
for row in summarize(records):
    print(f"{row.problem:<12} {row.algorithm:<7} mean {row.mean:9.4f}  sd {row.sd:8.4f}")

out = write_outputs(config, records, Path(tempfile.mkdtemp()) / "grid")
print("outputs:", sorted(p.name for p in out.iterdir()))

print(format_non_significant(compare_all(group_finals(records))))
