"""Full 20-repetition pre-run of the ordering and bracket cells.

Uses the CLI's seed derivation so the later test run sees identical numbers.
"""
import sys
import time

import numpy as np

sys.path.insert(0, "/root/pkg/src")

from evoops.cli import derive_seed
from evoops.engine import Algorithm, EngineConfig, run
from evoops.stats import PairedSample, wilcoxon_signed_rank

REPS = 20


def cell(function_id, algorithm, population):
    t0 = time.time()
    finals = []
    for rep in range(REPS):
        cfg = EngineConfig(
            problem_id=function_id,
            algorithm=algorithm,
            population_size=population,
            generations=500,
            seed=derive_seed(0, function_id, population, rep),
            snapshot_every=0,
        )
        finals.append(run(cfg).best.fitness)
    arr = np.array(finals)
    print(
        f"f{function_id:02d} {algorithm.value:4s} lam={population}: "
        f"median={np.median(arr):.4e}  min={arr.min():.3e} max={arr.max():.3e} "
        f"({time.time() - t0:.0f}s)",
        flush=True,
    )
    return arr


print("=== ordering cells (lam=50) ===", flush=True)
by_func = {}
for f in range(10, 16):
    res = {}
    for algo in (Algorithm.AOEA, Algorithm.HAEA, Algorithm.GA):
        res[algo.value] = cell(f, algo, 50)
    by_func[f] = res

print("\n=== bracket cells (lam=100) ===", flush=True)
ack_aoea = cell(8, Algorithm.AOEA, 100)
ack_ga = cell(8, Algorithm.GA, 100)
grw_aoea = cell(10, Algorithm.AOEA, 100)

print("\n=== verdicts ===", flush=True)
for f, res in by_func.items():
    m = {k: float(np.median(v)) for k, v in res.items()}
    order_ok = m["aoea"] < m["haea"] < m["ga"]
    wl = wilcoxon_signed_rank(PairedSample(res["aoea"], res["ga"]))
    print(
        f"f{f:02d}: aoea={m['aoea']:.4e} haea={m['haea']:.4e} ga={m['ga']:.4e} "
        f"order={'OK ' if order_ok else 'BAD'} wilcoxon_p={wl.p_value:.2e} "
        f"reject={wl.reject}",
        flush=True,
    )

print(f"ackley aoea lam100 median={np.median(ack_aoea):.4f}  in [0.04, 4.0]: "
      f"{0.04 <= np.median(ack_aoea) <= 4.0}", flush=True)
print(f"ackley ga   lam100 median={np.median(ack_ga):.4f}  in [1, 10]: "
      f"{1.0 <= np.median(ack_ga) <= 10.0}", flush=True)
print(f"griewangk aoea lam100 median={np.median(grw_aoea):.4f}  in [0.8, 80]: "
      f"{0.8 <= np.median(grw_aoea) <= 80.0}", flush=True)
