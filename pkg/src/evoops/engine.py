"""The three evolutionary algorithms and their selection/rate primitives.

`aoea_run` evolves candidate solutions with a population of operator trees
whose selection rates are rewarded or punished per application, and whose
trees are themselves recombined (shuffle-and-pair subtree swap) and mutated
(per-tree probability 1/kappa) every generation.

`haea_run` is the per-individual-rates baseline over the six fixed non-null
atomics (no trees, no operator evolution), and `ga_run` is a classic
generational GA (linear crossover + gaussian gene noise) with the same
per-slot acceptance rule so traces are directly comparable.

All three share one acceptance rule per slot: the child enters the next
generation iff its fitness is better-or-equal to the slot's current
individual, which makes every best-fitness trace monotone.
"""
from __future__ import annotations

import bisect
import dataclasses
import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .atomic_ops import NON_NULL_OPS, OpKind, apply_atomic, atomic_by_id
from .benchmarks import Variant, make_problem
from .core import (
    Direction,
    Individual,
    Population,
    Problem,
    RandomStream,
    better,
    better_or_equal,
    init_population,
    make_individual,
)
from .optree import (
    DEFAULT_MAX_DEPTH,
    DEFAULT_MAX_NODES,
    OperatorTree,
    evaluate_tree,
    mutate_tree,
    random_tree,
    recombine_trees,
    serialize_tree,
)

logger = logging.getLogger(__name__)

RATE_SUM_TOLERANCE = 1e-9


class Algorithm(Enum):
    AOEA = "aoea"
    HAEA = "haea"
    GA = "ga"


class OperatorSelection(Enum):
    """How parents are paired for operator-tree recombination."""

    SHUFFLE_PAIR = "shuffle_pair"
    RATE_ROULETTE = "rate_roulette"


@dataclass(frozen=True, eq=False)
class OperatorPool:
    """kappa operator trees with their normalized selection rates."""

    trees: tuple[OperatorTree, ...]
    rates: np.ndarray

    def __post_init__(self):
        rates = np.array(self.rates, dtype=np.float64)  # own copy, frozen below
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)
        if len(self.trees) != rates.shape[0]:
            raise ValueError(
                f"{len(self.trees)} trees but {rates.shape[0]} rates"
            )
        if np.any(rates < 0) or not np.all(np.isfinite(rates)):
            raise ValueError("rates must be finite and nonnegative")
        if abs(float(rates.sum()) - 1.0) > RATE_SUM_TOLERANCE:
            raise ValueError(f"rates must sum to 1, got {float(rates.sum())!r}")

    @property
    def size(self) -> int:
        return len(self.trees)


@dataclass(frozen=True)
class EngineConfig:
    """Everything one run needs; (config, seed) determines the trace bit-for-bit."""

    problem_id: int
    algorithm: Algorithm
    population_size: int
    generations: int
    seed: int
    kappa: int = 16
    dimensionality: int | None = None
    variant: Variant = Variant.REPAIRED
    max_tree_depth: int = DEFAULT_MAX_DEPTH
    max_tree_nodes: int = DEFAULT_MAX_NODES
    ga_mutation_probability: float = 0.1
    operator_selection: OperatorSelection = OperatorSelection.SHUFFLE_PAIR
    snapshot_every: int = 1

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError(f"population_size must be >= 2, got {self.population_size}")
        if self.kappa < 2 or self.kappa % 2 != 0:
            raise ValueError(f"kappa must be even and >= 2, got {self.kappa}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit non-negative integer")
        if not 0.0 <= self.ga_mutation_probability <= 1.0:
            raise ValueError("ga_mutation_probability must be in [0, 1]")
        if self.max_tree_depth < 1:
            raise ValueError("max_tree_depth must be >= 1")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    median_fitness: float
    evaluations: int
    max_rate: float | None = None
    rates: tuple[float, ...] | None = None
    trees: tuple[str, ...] | None = None


@dataclass(frozen=True, eq=False)
class RunTrace:
    config: EngineConfig
    records: tuple[GenerationRecord, ...]
    best: Individual


class Evaluator:
    """Wraps a problem so every fitness evaluation is counted."""

    def __init__(self, problem: Problem):
        self.count = 0
        inner = problem.objective

        def counted(genome):
            self.count += 1
            return inner(genome)

        self.problem = dataclasses.replace(problem, objective=counted)


def _fresh_individual(problem: Problem, genome) -> Individual:
    # Engine-internal child constructor. Genomes here come from atomic
    # operators, which preserve shape and feasibility, so the re-validation
    # done by make_individual for foreign input is skipped. Freezing in
    # place is safe: atomics return either owned arrays or a parent genome
    # that is already read-only.
    genome.setflags(write=False)
    return Individual(genome=genome, fitness=float(problem.objective(genome)))


def roulette_select(weights, rng: RandomStream) -> int:
    """Index i with probability weights[i] / sum(weights)."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise ValueError("weights must be finite and nonnegative")
    cum = np.cumsum(w)
    if cum[-1] <= 0:
        raise ValueError("weights must not all be zero")
    return _pick(cum, rng)


def _pick(cum, rng: RandomStream) -> int:
    # cum may be an ndarray or a plain list (the hot loops pass lists;
    # bisect on a list is several times faster than np.searchsorted here).
    last = len(cum) - 1
    r = rng.uniform() * cum[last]
    i = bisect.bisect_right(cum, r)
    return min(i, last)


def fitness_selection_weights(population: Population, direction: Direction) -> np.ndarray:
    """Windowed fitness-proportional weights, valid for both directions.

    The worst individual's window is epsilon (never exactly zero), so ties
    degrade gracefully to uniform selection and minimization is as
    well-posed as maximization.
    """
    f = np.fromiter((ind.fitness for ind in population), np.float64, len(population))
    if np.any(np.isnan(f)):
        raise ValueError("population contains NaN fitness")
    if direction is Direction.MAXIMIZE:
        worst = float(f.min())
        w = f - worst
    else:
        worst = float(f.max())
        w = worst - f
    eps = 1e-12 * max(1.0, abs(worst))
    return w + eps


def best_index(population: Population, direction: Direction) -> int:
    bi = 0
    for i in range(1, len(population)):
        if better(population[i].fitness, population[bi].fitness, direction):
            bi = i
    return bi


def _worst_index(population: Population, direction: Direction) -> int:
    wi = 0
    for i in range(1, len(population)):
        if better(population[wi].fitness, population[i].fitness, direction):
            wi = i
    return wi


def crossover_population(
    population: Population,
    pool: OperatorPool,
    problem: Problem,
    rng: RandomStream,
) -> tuple[Population, np.ndarray]:
    """One generation sweep over candidate solutions.

    Per slot: pick an operator by roulette over pool rates, a mate by
    roulette over windowed fitness weights (both from the generation-start
    population), apply the operator in both argument orders and keep the
    better child (ties keep the (ind, mate) order). The operator is voted
    +1 if that child strictly improves on the slot, -1 otherwise; the child
    replaces the slot iff better-or-equal.

    Returns the new population and the per-slot vote events as an array of
    (operator index, vote) rows in slot order.
    """
    direction = problem.direction
    # Benchmark objectives are finite on their boxes, so plain comparisons
    # are equivalent to better()/better_or_equal() here and much cheaper.
    minimize = direction is Direction.MINIMIZE
    events = np.empty((len(population), 2), dtype=np.int64)
    rate_cum = np.cumsum(pool.rates).tolist()
    weight_cum = np.cumsum(fitness_selection_weights(population, direction)).tolist()
    trees = pool.trees
    new_members = []
    for slot, ind in enumerate(population):
        op_idx = _pick(rate_cum, rng)
        mate = population[_pick(weight_cum, rng)]
        tree = trees[op_idx]
        c1 = _fresh_individual(problem, evaluate_tree(tree, ind.genome, mate.genome, problem, rng))
        c2 = _fresh_individual(problem, evaluate_tree(tree, mate.genome, ind.genome, problem, rng))
        if minimize:
            child = c1 if c1.fitness <= c2.fitness else c2
            improved = child.fitness < ind.fitness
            accepted = child.fitness <= ind.fitness
        else:
            child = c1 if c1.fitness >= c2.fitness else c2
            improved = child.fitness > ind.fitness
            accepted = child.fitness >= ind.fitness
        events[slot, 0] = op_idx
        events[slot, 1] = 1 if improved else -1
        new_members.append(child if accepted else ind)
    return tuple(new_members), events


def update_rates(pool: OperatorPool, vote_events, rng: RandomStream) -> OperatorPool:
    """Reward/punish rates one application at a time, then normalize once.

    Each (operator index, vote) event multiplies that operator's rate by
    (1 + delta) on a positive vote or (1 - delta) on a negative one, with a
    fresh delta per event. Updating per application rather than per summed
    tally keeps the rates self-limiting: a heavily used operator whose wins
    only slightly outnumber its losses shrinks on balance, so no operator
    can starve the rest of the roulette for good. Operators with no events
    keep their rate (up to the shared normalization).
    """
    vote_events = np.asarray(vote_events)
    if vote_events.ndim != 2 or vote_events.shape[1] != 2:
        raise ValueError(f"expected (n, 2) vote events, got shape {vote_events.shape}")
    rates = pool.rates.copy()
    for op_idx, vote in vote_events:
        if not 0 <= op_idx < pool.size:
            raise ValueError(f"operator index {op_idx} out of range for pool of {pool.size}")
        delta = rng.uniform()
        if vote > 0:
            rates[op_idx] *= 1.0 + delta
        elif vote < 0:
            rates[op_idx] *= 1.0 - delta
    total = float(rates.sum())
    if total <= 0:
        raise ValueError("rates collapsed to zero; cannot normalize")
    return OperatorPool(pool.trees, rates / total)


def crossover_operators(
    pool: OperatorPool,
    rng: RandomStream,
    selection: OperatorSelection = OperatorSelection.SHUFFLE_PAIR,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> OperatorPool:
    """Recombine the operator trees pairwise; rates stay with their slots.

    Default pairing shuffles the pool uniformly (trees and rates move
    together) and recombines adjacent pairs. The alternative draws each
    parent pair by roulette over the rates, leaving the rate vector as is.
    """
    kappa = pool.size
    if kappa % 2 != 0:
        raise ValueError(f"operator crossover needs an even pool, got {kappa}")
    if selection is OperatorSelection.SHUFFLE_PAIR:
        perm = rng.permutation(kappa)
        parents = [pool.trees[p] for p in perm]
        rates = pool.rates[perm]
    else:
        rate_cum = np.cumsum(pool.rates)
        parents = [pool.trees[_pick(rate_cum, rng)] for _ in range(kappa)]
        rates = pool.rates
    children: list[OperatorTree] = []
    for i in range(0, kappa, 2):
        c1, c2 = recombine_trees(parents[i], parents[i + 1], rng, max_nodes=max_nodes)
        children.append(c1)
        children.append(c2)
    return OperatorPool(tuple(children), rates)


def mutate_operators(
    pool: OperatorPool,
    rng: RandomStream,
    probability: float | None = None,
) -> OperatorPool:
    """Mutate each tree independently with probability 1/kappa (or an override).

    Probability 0 consumes no randomness and returns the pool unchanged.
    """
    prob = 1.0 / pool.size if probability is None else probability
    if prob <= 0:
        return pool
    trees = tuple(
        mutate_tree(tree, rng) if rng.uniform() <= prob else tree for tree in pool.trees
    )
    return OperatorPool(trees, pool.rates)


def init_operator_pool(kappa: int, rng: RandomStream, max_depth: int = DEFAULT_MAX_DEPTH) -> OperatorPool:
    """kappa random depth-bounded trees with uniform-random normalized rates."""
    trees = tuple(random_tree(rng, max_depth) for _ in range(kappa))
    raw = rng.uniforms(kappa)
    return OperatorPool(trees, raw / raw.sum())


def _population_stats(population: Population, direction: Direction) -> tuple[int, float, float]:
    f = np.fromiter((ind.fitness for ind in population), np.float64, len(population))
    bi = best_index(population, direction)
    return bi, float(population[bi].fitness), float(np.median(f))


def _make_record(
    generation: int,
    population: Population,
    direction: Direction,
    evaluations: int,
    max_rate: float | None = None,
    rates: tuple[float, ...] | None = None,
    trees: tuple[str, ...] | None = None,
) -> GenerationRecord:
    _, best_f, median_f = _population_stats(population, direction)
    return GenerationRecord(
        generation=generation,
        best_fitness=best_f,
        median_fitness=median_f,
        evaluations=evaluations,
        max_rate=max_rate,
        rates=rates,
        trees=trees,
    )


def _resolve_problem(config: EngineConfig) -> Problem:
    return make_problem(config.problem_id, config.dimensionality, config.variant)


def _streams(config: EngineConfig) -> tuple[RandomStream, RandomStream]:
    # The init stream is algorithm-agnostic on purpose: all three algorithms
    # started from the same seed see bit-identical initial populations.
    init_rng = RandomStream(config.seed, "init")
    evolve_rng = RandomStream(config.seed, "evolve", config.algorithm.value)
    return init_rng, evolve_rng


def _wants_snapshot(config: EngineConfig, generation: int) -> bool:
    return config.snapshot_every > 0 and generation % config.snapshot_every == 0


def aoea_run(config: EngineConfig) -> RunTrace:
    """Run the operator-evolving algorithm; see the module docstring."""
    if config.algorithm is not Algorithm.AOEA:
        raise ValueError(f"config.algorithm is {config.algorithm}, expected AOEA")
    init_rng, rng = _streams(config)
    evaluator = Evaluator(_resolve_problem(config))
    problem = evaluator.problem
    direction = problem.direction

    population = init_population(problem, config.population_size, init_rng)
    pool = init_operator_pool(config.kappa, rng, config.max_tree_depth)

    def snapshot(gen: int) -> tuple[str, ...] | None:
        if not _wants_snapshot(config, gen):
            return None
        return tuple(serialize_tree(t) for t in pool.trees)

    records = [
        _make_record(
            0, population, direction, evaluator.count,
            max_rate=float(pool.rates.max()),
            rates=tuple(float(r) for r in pool.rates),
            trees=snapshot(0),
        )
    ]
    for t in range(1, config.generations + 1):
        population, vote_events = crossover_population(population, pool, problem, rng)
        pool = update_rates(pool, vote_events, rng)
        pool = crossover_operators(pool, rng, config.operator_selection, config.max_tree_nodes)
        pool = mutate_operators(pool, rng)
        records.append(
            _make_record(
                t, population, direction, evaluator.count,
                max_rate=float(pool.rates.max()),
                rates=tuple(float(r) for r in pool.rates),
                trees=snapshot(t),
            )
        )
    best = population[best_index(population, direction)]
    return RunTrace(config=config, records=tuple(records), best=best)


def _haea_update_row(row: np.ndarray, op_idx: int, reward: bool, delta: float) -> np.ndarray:
    out = row.copy()
    out[op_idx] *= (1.0 + delta) if reward else (1.0 - delta)
    total = float(out.sum())
    if total <= 0:
        raise ValueError("rates collapsed to zero; cannot normalize")
    return out / total


def haea_run(config: EngineConfig, _rate_probe=None) -> RunTrace:
    """Per-individual-rates baseline over the six fixed atomics.

    Each individual owns a normalized rate vector over the atomic pool.
    Per generation it picks one atomic by roulette over its own rates,
    applies it (unary: to itself, one evaluation; binary: with a
    fitness-roulette mate in both argument orders, keeping the better
    child), replaces itself iff the child is better-or-equal, and rewards
    (strict improvement) or punishes its chosen operator before
    renormalizing its own rates.

    ``_rate_probe(generation, matrix)`` is a testing hook observing the
    per-individual rate matrix each generation.
    """
    if config.algorithm is not Algorithm.HAEA:
        raise ValueError(f"config.algorithm is {config.algorithm}, expected HAEA")
    init_rng, rng = _streams(config)
    evaluator = Evaluator(_resolve_problem(config))
    problem = evaluator.problem
    direction = problem.direction
    minimize = direction is Direction.MINIMIZE
    ops = NON_NULL_OPS
    lam = config.population_size

    population = init_population(problem, lam, init_rng)
    rate_rows = np.empty((lam, len(ops)), dtype=np.float64)
    for i in range(lam):
        raw = rng.uniforms(len(ops))
        rate_rows[i] = raw / raw.sum()

    def mean_rates() -> tuple[float, ...]:
        return tuple(float(x) for x in rate_rows.mean(axis=0))

    records = [
        _make_record(
            0, population, direction, evaluator.count,
            max_rate=float(rate_rows.max()),
            rates=mean_rates(),
        )
    ]
    if _rate_probe is not None:
        _rate_probe(0, rate_rows.copy())
    for t in range(1, config.generations + 1):
        weight_cum = np.cumsum(fitness_selection_weights(population, direction)).tolist()
        new_members = []
        for i, ind in enumerate(population):
            op_idx = _pick(np.cumsum(rate_rows[i]).tolist(), rng)
            op = ops[op_idx]
            if op.arity == 1:
                child = _fresh_individual(
                    problem, apply_atomic(op, ind.genome, None, problem, rng)
                )
            else:
                mate = population[_pick(weight_cum, rng)]
                c1 = _fresh_individual(
                    problem, apply_atomic(op, ind.genome, mate.genome, problem, rng)
                )
                c2 = _fresh_individual(
                    problem, apply_atomic(op, mate.genome, ind.genome, problem, rng)
                )
                if minimize:
                    child = c1 if c1.fitness <= c2.fitness else c2
                else:
                    child = c1 if c1.fitness >= c2.fitness else c2
            delta = rng.uniform()
            if minimize:
                improved = child.fitness < ind.fitness
                accepted = child.fitness <= ind.fitness
            else:
                improved = child.fitness > ind.fitness
                accepted = child.fitness >= ind.fitness
            rate_rows[i] = _haea_update_row(rate_rows[i], op_idx, improved, delta)
            new_members.append(child if accepted else ind)
        population = tuple(new_members)
        records.append(
            _make_record(
                t, population, direction, evaluator.count,
                max_rate=float(rate_rows.max()),
                rates=mean_rates(),
            )
        )
        if _rate_probe is not None:
            _rate_probe(t, rate_rows.copy())
    best = population[best_index(population, direction)]
    return RunTrace(config=config, records=tuple(records), best=best)


def ga_run(config: EngineConfig) -> RunTrace:
    """Classic generational GA baseline.

    Each child comes from two fitness-roulette parents via linear crossover,
    then gaussian gene noise with the configured per-child probability. The
    children replace the whole generation except that the incumbent best
    individual, if no child matches it, takes the worst child's slot, which
    keeps the best-fitness trace monotone.
    """
    if config.algorithm is not Algorithm.GA:
        raise ValueError(f"config.algorithm is {config.algorithm}, expected GA")
    init_rng, rng = _streams(config)
    evaluator = Evaluator(_resolve_problem(config))
    problem = evaluator.problem
    direction = problem.direction
    linear = atomic_by_id(OpKind.LINEAR_CROSSOVER.value)
    gauss = atomic_by_id(OpKind.GAUSSIAN_NOISE.value)

    population = init_population(problem, config.population_size, init_rng)
    records = [_make_record(0, population, direction, evaluator.count)]
    for t in range(1, config.generations + 1):
        weight_cum = np.cumsum(fitness_selection_weights(population, direction)).tolist()
        elite = population[best_index(population, direction)]
        children = []
        for _ in population:
            parent = population[_pick(weight_cum, rng)]
            mate = population[_pick(weight_cum, rng)]
            genome = apply_atomic(linear, parent.genome, mate.genome, problem, rng)
            if rng.uniform() < config.ga_mutation_probability:
                genome = apply_atomic(gauss, genome, None, problem, rng)
            children.append(_fresh_individual(problem, genome))
        best_child = children[best_index(children, direction)]
        if better(elite.fitness, best_child.fitness, direction):
            children[_worst_index(children, direction)] = elite
        population = tuple(children)
        records.append(_make_record(t, population, direction, evaluator.count))
    best = population[best_index(population, direction)]
    return RunTrace(config=config, records=tuple(records), best=best)


_RUNNERS = {
    Algorithm.AOEA: aoea_run,
    Algorithm.HAEA: haea_run,
    Algorithm.GA: ga_run,
}


def run(config: EngineConfig) -> RunTrace:
    """Dispatch to the configured algorithm's runner."""
    logger.debug(
        "run %s problem=%d lambda=%d gens=%d seed=%d",
        config.algorithm.value, config.problem_id, config.population_size,
        config.generations, config.seed,
    )
    return _RUNNERS[config.algorithm](config)
