"""Per-gene linear-crossover weights at several margins vs the scalar baseline.

Cell: Griewangk lam=100 dim=1000 g500 AOEA, seeds 1000-1002.
"""
import sys

import numpy as np

sys.path.insert(0, "/root/pkg/src")

import evoops.atomic_ops as ao
import evoops.optree as ot
from evoops.engine import Algorithm, EngineConfig, aoea_run

BASE_KERNELS = ao.KERNELS


def make_pergene_linear(margin):
    lo, width = -margin, 1.0 + 2.0 * margin

    def _pergene(a, b, problem, rng):
        w = rng.uniforms(a.shape[0]) * width + lo
        blended = w * a + (1.0 - w) * b
        return np.clip(blended, problem.lower_bound, problem.upper_bound)

    return _pergene


def run_cell(label):
    vals = []
    for seed in (1000, 1001, 1002):
        cfg = EngineConfig(
            problem_id=10,
            algorithm=Algorithm.AOEA,
            population_size=100,
            generations=500,
            seed=seed,
            snapshot_every=0,
        )
        res = aoea_run(cfg)
        vals.append(res.best.fitness)
    vals.sort()
    print(f"{label}: {vals[0]:.3g} / {vals[1]:.3g} / {vals[2]:.3g}  (median {vals[1]:.3g})", flush=True)


run_cell("scalar m=1.0 (baseline)")

for margin in (0.0, 0.25, 0.5, 1.0):
    kern = list(BASE_KERNELS)
    kern[7] = make_pergene_linear(margin)
    ao.KERNELS = tuple(kern)
    ot.KERNELS = tuple(kern)
    run_cell(f"per-gene m={margin}")

ao.KERNELS = BASE_KERNELS
ot.KERNELS = BASE_KERNELS
