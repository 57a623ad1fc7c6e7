"""Anatomy of the Griewangk lam=100 run: spread vs offset vs acceptance rate."""
import sys

import numpy as np

sys.path.insert(0, "/root/pkg/src")

from evoops.benchmarks import make_problem
from evoops.core import RandomStream, init_population
from evoops.engine import (
    EngineConfig,
    Algorithm,
    Evaluator,
    best_index,
    crossover_operators,
    crossover_population,
    init_operator_pool,
    mutate_operators,
    update_rates,
)

cfg = EngineConfig(
    problem_id=10,
    algorithm=Algorithm.AOEA,
    population_size=100,
    generations=500,
    seed=1001,
    snapshot_every=0,
)

evaluator = Evaluator(make_problem(10, 1000))
problem = evaluator.problem
init_rng = RandomStream(cfg.seed, "init")
rng = RandomStream(cfg.seed, "engine")

population = init_population(problem, cfg.population_size, init_rng)
pool = init_operator_pool(cfg.kappa, rng, cfg.max_tree_depth)

marks = {1, 25, 50, 100, 200, 300, 400, 500}
accept_window = []

for t in range(1, cfg.generations + 1):
    population, events = crossover_population(population, pool, problem, rng)
    accept_window.append(float((events[:, 1] > 0).mean()))
    pool = update_rates(pool, events, rng)
    pool = crossover_operators(pool, rng, cfg.operator_selection, cfg.max_tree_nodes)
    pool = mutate_operators(pool, rng)
    if t in marks:
        genomes = np.array([ind.genome for ind in population])
        centroid = genomes.mean(axis=0)
        spread = float(np.sqrt(((genomes - centroid) ** 2).mean()))
        offset = float(np.sqrt((centroid**2).mean()))
        best = population[best_index(population, problem.direction)]
        acc = float(np.mean(accept_window[-10:]))
        print(
            f"g{t:4d}  best={best.fitness:9.3g}  spread={spread:8.3g}  "
            f"offset={offset:8.3g}  ratio={spread / offset:6.3f}  accept={acc:.3f}",
            flush=True,
        )
