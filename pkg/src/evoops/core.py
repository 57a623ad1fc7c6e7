"""Foundational domain types: genomes, problems, populations, random streams.

Everything downstream (benchmark suite, operator trees, engines, analysis)
builds on the types here. All types are immutable after construction except
:class:`RandomStream`, which is owned by exactly one run.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

# A genome is a fixed-length 1-D float64 array; length equals the owning
# problem's dimensionality and never changes.
RealGenome = np.ndarray


class Direction(Enum):
    """Optimization direction of an objective."""

    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


@dataclass(frozen=True)
class Problem:
    """An optimization problem: objective, box bounds, direction.

    The objective must be pure (same genome, same value) and is expected to
    raise on genomes outside the box; fitness caching relies on purity.
    """

    id: int
    name: str
    dimensionality: int
    lower_bound: float
    upper_bound: float
    direction: Direction
    objective: Callable[[RealGenome], float]

    def __post_init__(self):
        if self.dimensionality < 1:
            raise ValueError(f"dimensionality must be >= 1, got {self.dimensionality}")
        if not self.lower_bound < self.upper_bound:
            raise ValueError(
                f"bounds must satisfy lower < upper, got [{self.lower_bound}, {self.upper_bound}]"
            )

    @property
    def span(self) -> float:
        return self.upper_bound - self.lower_bound


@dataclass(frozen=True, eq=False)
class Individual:
    """A candidate solution with its cached objective value."""

    genome: RealGenome
    fitness: float


def make_individual(problem: Problem, genome) -> Individual:
    """Evaluate ``genome`` on ``problem`` and wrap it with its cached fitness.

    The genome is copied, coerced to float64, and frozen (read-only) so the
    cache can never go stale. NaN fitness aborts with a diagnostic instead of
    silently corrupting selection; NaN or infinite genes are rejected too.
    """
    g = np.array(genome, dtype=np.float64)
    if g.ndim != 1 or g.shape[0] != problem.dimensionality:
        raise ValueError(
            f"genome shape {g.shape} does not match dimensionality {problem.dimensionality}"
        )
    if not np.all(np.isfinite(g)):
        raise ValueError("genome contains non-finite genes")
    g.setflags(write=False)
    fitness = float(problem.objective(g))
    if math.isnan(fitness):
        raise ValueError(f"objective returned NaN on problem {problem.name!r}")
    return Individual(genome=g, fitness=fitness)


# A population is an immutable sequence of individuals; its size is fixed at
# construction and constant across generations.
Population = tuple[Individual, ...]


def better(a: float, b: float, direction: Direction) -> bool:
    """True iff fitness ``a`` is strictly better than ``b`` under ``direction``.

    Infinite values always lose against finite ones regardless of direction
    (an infinite objective signals an encoding problem, not a good solution);
    two infinite values fall back to the numeric ordering.
    """
    if math.isnan(a) or math.isnan(b):
        raise ValueError("cannot compare NaN fitness")
    a_fin, b_fin = math.isfinite(a), math.isfinite(b)
    if a_fin != b_fin:
        return a_fin
    if direction is Direction.MINIMIZE:
        return a < b
    return a > b


def better_or_equal(a: float, b: float, direction: Direction) -> bool:
    """Like :func:`better` but true on exact ties."""
    return a == b or better(a, b, direction)


def clamp(genome: RealGenome, problem: Problem) -> RealGenome:
    """Clip every gene into the problem's closed box."""
    return np.clip(genome, problem.lower_bound, problem.upper_bound)


def init_population(problem: Problem, size: int, rng: "RandomStream") -> Population:
    """Draw ``size`` individuals with genes uniform over the problem box.

    Requires size >= 2 (mate selection needs at least two individuals).
    """
    if size < 2:
        raise ValueError(f"population size must be >= 2, got {size}")
    lo, hi = problem.lower_bound, problem.upper_bound
    return tuple(
        make_individual(problem, lo + (hi - lo) * rng.uniforms(problem.dimensionality))
        for _ in range(size)
    )


def _entropy(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError(f"stream key integers must be non-negative, got {part}")
        return int(part)
    if isinstance(part, str):
        return int.from_bytes(hashlib.sha256(part.encode("utf-8")).digest()[:16], "big")
    raise TypeError(f"stream key parts must be int or str, got {type(part).__name__}")


class RandomStream:
    """Deterministic random source keyed by a tuple of ints and strings.

    Backed by numpy's PCG64 through ``np.random.Generator``; the generator
    algorithm is fixed library-wide, so a given key reproduces the same
    deviate sequence on any platform running the same numpy generation.
    Strings in the key are hashed (SHA-256) into seed material, which makes
    keys like ``(seed, "evolve", "aoea")`` stable across sessions. Derived
    streams (:meth:`spawn`) extend the key, so every repetition of an
    experiment is independent and individually reconstructible.
    """

    __slots__ = ("key", "_gen")

    def __init__(self, *key):
        if not key:
            raise ValueError("stream key must not be empty")
        self.key = key
        seq = np.random.SeedSequence([_entropy(p) for p in key])
        self._gen = np.random.Generator(np.random.PCG64(seq))

    def spawn(self, *subkey) -> "RandomStream":
        """A new independent stream keyed by this key extended with ``subkey``."""
        return RandomStream(*self.key, *subkey)

    def uniform(self) -> float:
        """One uniform deviate in [0, 1)."""
        return float(self._gen.random())

    def uniforms(self, n: int) -> np.ndarray:
        """``n`` uniform deviates in [0, 1)."""
        return self._gen.random(n)

    def integers(self, low: int, high: int) -> int:
        """One uniform integer in [low, high)."""
        return int(self._gen.integers(low, high))

    def integer_array(self, low: int, high: int, n: int) -> np.ndarray:
        """``n`` uniform integers in [low, high)."""
        return self._gen.integers(low, high, size=n)

    def normal(self) -> float:
        """One standard normal deviate."""
        return float(self._gen.standard_normal())

    def permutation(self, n: int) -> np.ndarray:
        """A uniform random permutation of range(n)."""
        return self._gen.permutation(n)

    def __repr__(self):
        return f"RandomStream(key={self.key!r})"
