"""Where does f10 lam=100 progress stall? Run 1500 gens, watch best fitness."""
import sys

sys.path.insert(0, "/root/pkg/src")

from evoops.engine import Algorithm, EngineConfig, aoea_run

marks = [0, 100, 200, 300, 400, 500, 750, 1000, 1250, 1500]

for seed in (1000, 1001, 1002):
    cfg = EngineConfig(
        problem_id=10,
        algorithm=Algorithm.AOEA,
        population_size=100,
        generations=1500,
        seed=seed,
        snapshot_every=0,
    )
    result = aoea_run(cfg)
    recs = {r.generation: r for r in result.records}
    line = [f"seed={seed}"]
    for m in marks:
        if m in recs:
            line.append(f"g{m}:{recs[m].best_fitness:.3g}")
    print("  ".join(line), flush=True)
