"""The fixed pool of atomic genetic operators.

Eight atomics with stable ids 0..7: two null operators (leaf-only, exact
identities on one of their two arguments), two unary gene-level mutations,
and four binary crossovers. Operator trees compose these; the GA and the
per-individual-rates baseline use them directly.

All operators are pure given an owned random stream, never mutate their
inputs, and always return a feasible genome (closure under the problem box).
Stochastic draws happen in a fixed documented order so runs replay exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .core import Problem, RandomStream, RealGenome

# Fraction of the per-dimension range used as the gene-noise std deviation.
GAUSSIAN_SIGMA_FRACTION = 0.1


class OpKind(IntEnum):
    """Atomic operator kinds; the integer value is the stable op_id."""

    NULL_FIRST = 0
    NULL_SECOND = 1
    SWAP_GENES = 2
    GAUSSIAN_NOISE = 3
    SINGLE_POINT_CROSSOVER = 4
    UNIFORM_CROSSOVER = 5
    AVERAGE_CROSSOVER = 6
    LINEAR_CROSSOVER = 7


@dataclass(frozen=True)
class AtomicOpDescriptor:
    op_id: int
    name: str
    arity: int
    kind: OpKind

    @property
    def is_null(self) -> bool:
        return self.kind in (OpKind.NULL_FIRST, OpKind.NULL_SECOND)


ATOMIC_OPS: tuple[AtomicOpDescriptor, ...] = (
    AtomicOpDescriptor(0, "null-first", 2, OpKind.NULL_FIRST),
    AtomicOpDescriptor(1, "null-second", 2, OpKind.NULL_SECOND),
    AtomicOpDescriptor(2, "swap-genes", 1, OpKind.SWAP_GENES),
    AtomicOpDescriptor(3, "gaussian-noise", 1, OpKind.GAUSSIAN_NOISE),
    AtomicOpDescriptor(4, "single-point-crossover", 2, OpKind.SINGLE_POINT_CROSSOVER),
    AtomicOpDescriptor(5, "uniform-crossover", 2, OpKind.UNIFORM_CROSSOVER),
    AtomicOpDescriptor(6, "average-crossover", 2, OpKind.AVERAGE_CROSSOVER),
    AtomicOpDescriptor(7, "linear-crossover", 2, OpKind.LINEAR_CROSSOVER),
)

# Leaf-only identities.
NULL_OPS: tuple[AtomicOpDescriptor, ...] = ATOMIC_OPS[0:2]
# Unary internal nodes.
UNARY_OPS: tuple[AtomicOpDescriptor, ...] = ATOMIC_OPS[2:4]
# Binary internal nodes (the crossovers).
BINARY_OPS: tuple[AtomicOpDescriptor, ...] = ATOMIC_OPS[4:8]
# The six non-null atomics, used directly by the per-individual-rates baseline.
NON_NULL_OPS: tuple[AtomicOpDescriptor, ...] = ATOMIC_OPS[2:8]

_BY_ID = {op.op_id: op for op in ATOMIC_OPS}


def atomic_by_id(op_id: int) -> AtomicOpDescriptor:
    try:
        return _BY_ID[op_id]
    except KeyError:
        raise ValueError(f"unknown atomic op id {op_id}") from None


def noise_sigma(problem: Problem) -> float:
    """Gene-noise standard deviation for a problem (range-proportional)."""
    return GAUSSIAN_SIGMA_FRACTION * problem.span


def _null_first(a, b, problem, rng):
    return a


def _null_second(a, b, problem, rng):
    return b


def _swap_genes(a, b, problem, rng):
    dim = a.shape[0]
    if dim == 1:
        return a
    out = a.copy()
    i = rng.integers(0, dim)
    j = rng.integers(0, dim)
    while j == i:
        j = rng.integers(0, dim)
    out[i], out[j] = out[j], out[i]
    return out


def _gaussian_noise(a, b, problem, rng):
    out = a.copy()
    pos = rng.integers(0, a.shape[0])
    value = out[pos] + rng.normal() * noise_sigma(problem)
    out[pos] = min(problem.upper_bound, max(problem.lower_bound, value))
    return out


def _single_point_crossover(a, b, problem, rng):
    dim = a.shape[0]
    if dim == 1:
        return a.copy()
    k = rng.integers(1, dim)
    out = np.empty(dim, dtype=np.float64)
    out[:k] = a[:k]
    out[k:] = b[k:]
    return out


def _uniform_crossover(a, b, problem, rng):
    take_a = rng.integer_array(0, 2, a.shape[0]) == 1
    return np.where(take_a, a, b)


def _average_crossover(a, b, problem, rng):
    return 0.5 * (a + b)


def _linear_crossover(a, b, problem, rng):
    # One scalar weight in [-0.5, 1.5): interpolation plus a half-width
    # margin of extrapolation on either side, so blend steps scale with the
    # pair's own distance. The clip keeps closure over the box.
    w = rng.uniform() * 2.0 - 0.5
    blended = w * a + (1.0 - w) * b
    return np.clip(blended, problem.lower_bound, problem.upper_bound)


# Kernel table indexed by op_id; kernels assume validated inputs. Tree
# evaluation calls them directly, so per-node overhead stays flat.
KERNELS = (
    _null_first,
    _null_second,
    _swap_genes,
    _gaussian_noise,
    _single_point_crossover,
    _uniform_crossover,
    _average_crossover,
    _linear_crossover,
)


def apply_atomic(
    op: AtomicOpDescriptor,
    a: RealGenome,
    b: RealGenome | None,
    problem: Problem,
    rng: RandomStream,
) -> RealGenome:
    """Apply one atomic operator to feasible genome(s), returning a feasible genome.

    ``b`` must be given exactly when ``op.arity == 2`` (the null operators
    take both arguments and return one of them unchanged). Inputs are never
    mutated; null operators return their designated argument bit-identically.

    Draw order per kind (one stream, deterministic replay):
      swap-genes: position i, then j (redrawn until distinct); none when dim is 1.
      gaussian-noise: position, then one standard normal.
      single-point: cut point in 1..dim-1; none when dim is 1 (returns a copy of ``a``).
      uniform: dim coin flips (1 takes the gene from ``a``).
      linear: one scalar weight w in [-0.5, 1.5); result w*a + (1-w)*b, clamped.
    """
    if op.arity == 2:
        if b is None:
            raise ValueError(f"{op.name} takes two genomes")
        if a.shape != b.shape:
            raise ValueError(f"genome shapes differ: {a.shape} vs {b.shape}")
    elif b is not None:
        raise ValueError(f"{op.name} takes a single genome")
    return KERNELS[op.op_id](a, b, problem, rng)
