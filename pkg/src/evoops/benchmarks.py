"""The 15-function real-parameter benchmark suite.

Functions are identified by stable ids 1..15 and by name. Three of them
(ids 3, 13, 15) ship in two variants because their conventional printed
formulas are internally inconsistent; the ``Repaired`` variant (the default)
applies the standard textbook form, ``AsPrinted`` keeps the literal formula.
For every other id the two variants are identical.

All evaluations are pure: same input, bit-identical output.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Direction, Problem, RealGenome


class Variant(Enum):
    AS_PRINTED = "as_printed"
    REPAIRED = "repaired"


@dataclass(frozen=True)
class KnownOptimum:
    """Location and value of a benchmark's optimum under the default variant.

    ``fill`` describes the optimum point as a constant vector (any
    dimensionality); ``coords`` pins exact coordinates for fixed-dimension
    functions. Exactly one of the two is set.
    """

    value: float
    tolerance: float = 1e-9
    fill: float | None = None
    coords: tuple[float, ...] | None = None

    def point(self, dimensionality: int) -> np.ndarray:
        if self.coords is not None:
            if len(self.coords) != dimensionality:
                raise ValueError(
                    f"optimum is {len(self.coords)}-dimensional, requested {dimensionality}"
                )
            return np.array(self.coords, dtype=np.float64)
        return np.full(dimensionality, self.fill, dtype=np.float64)


@dataclass(frozen=True)
class BenchmarkSpec:
    id: int
    name: str
    default_dimensionality: int
    lower_bound: float
    upper_bound: float
    direction: Direction = Direction.MINIMIZE
    fixed_dimensionality: bool = False
    repairable: bool = False
    optimum: KnownOptimum | None = None


def _jong1(x: np.ndarray) -> float:
    return float(x @ x)


def _jong2(x: np.ndarray) -> float:
    weights = np.arange(2.0, x.size + 2.0)
    return float(np.sum(weights * x * x))


def _jong3(x: np.ndarray, repaired: bool) -> float:
    base = np.abs(x) if repaired else x
    exponents = np.arange(1.0, x.size + 1.0)
    return float(np.sum(base**exponents))


def _himmelblau(x: np.ndarray) -> float:
    a, b = float(x[0]), float(x[1])
    return (a * a + b - 11.0) ** 2 + (a + b * b - 7.0) ** 2


def _two_peak_trap(x: np.ndarray) -> float:
    mid = (x >= 10.0) & (x < 15.0)
    terms = np.where(mid, (160.0 / 15.0) * (15.0 - x), 40.0 * (x - 15.0))
    return float(np.sum(terms))


def _central_two_peak_trap(x: np.ndarray) -> float:
    low = x < 10.0
    mid = (x >= 10.0) & (x < 15.0)
    terms = np.where(
        low,
        (160.0 / 15.0) * x,
        np.where(mid, (160.0 / 15.0) * (15.0 - x), 40.0 * (x - 15.0)),
    )
    return float(np.sum(terms))


def _h1(x: np.ndarray) -> float:
    a, b = float(x[0]), float(x[1])
    numerator = math.sin(a - b / 8.0) ** 2 + math.sin(b + a / 8.0) ** 2
    denominator = math.sqrt((a - 8.6998) ** 2 + (b - 6.7665) ** 2 + 1.0)
    return numerator / denominator


def _ackley(x: np.ndarray) -> float:
    n = x.size
    rms = math.sqrt(float(x @ x) / n)
    cos_mean = float(np.sum(np.cos(2.0 * math.pi * x))) / n
    return 20.0 - 20.0 * math.exp(-0.2 * rms) + math.e - math.exp(cos_mean)


def _shubert_factor(t: float) -> float:
    i = np.arange(1.0, 6.0)
    return float(np.sum(np.cos((i + 1.0) * t + i)))


def _shubert2d(x: np.ndarray) -> float:
    return _shubert_factor(float(x[0])) * _shubert_factor(float(x[1]))


def _griewangk(x: np.ndarray) -> float:
    idx = np.arange(1.0, x.size + 1.0)
    return float(np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(idx))) + 1.0)


def _rastrigin(x: np.ndarray) -> float:
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * math.pi * x)))


def _schaffer(x: np.ndarray) -> float:
    s = x[:-1] ** 2 + x[1:] ** 2
    return float(np.sum(s**0.25 * (np.sin(50.0 * s**0.1) + 1.0)))


def _rosenbrock(x: np.ndarray, repaired: bool) -> float:
    d = x[1:] - x[:-1] ** 2
    first = 100.0 * d * d if repaired else 100.0 * d
    return float(np.sum(first + (1.0 - x[:-1]) ** 2))


def _bohachevsky(x: np.ndarray) -> float:
    a, b = x[:-1], x[1:]
    terms = (
        a * a
        + 2.0 * b * b
        - 0.3 * np.cos(3.0 * math.pi * a)
        - 0.4 * np.cos(4.0 * math.pi * b)
        + 0.7
    )
    return float(np.sum(terms))


def _schwefel(x: np.ndarray, repaired: bool) -> float:
    s = float(np.sum(x * np.sin(np.sqrt(np.abs(x)))))
    n = x.size
    # The literal formula multiplies the two factors; the repaired form is
    # the standard subtraction with optimum ~0 at 420.9687 per gene.
    return 418.9829 * n - s if repaired else 418.9829 * n * s


_SPECS: tuple[BenchmarkSpec, ...] = (
    BenchmarkSpec(1, "Jong 1", 1000, -5.12, 5.12, optimum=KnownOptimum(0.0, fill=0.0)),
    BenchmarkSpec(2, "Jong 2", 1000, -5.12, 5.12, optimum=KnownOptimum(0.0, fill=0.0)),
    BenchmarkSpec(3, "Jong 3", 1000, -1.0, 1.0, repairable=True, optimum=KnownOptimum(0.0, fill=0.0)),
    BenchmarkSpec(
        4, "Himmelblau", 2, -6.0, 6.0, fixed_dimensionality=True,
        optimum=KnownOptimum(0.0, coords=(3.0, 2.0)),
    ),
    # The two trap functions are kept exactly as conventionally printed
    # (piecewise-linear sums); note the "otherwise" branch 40*(x-15) is
    # negative left of 15, so 0.0 is not their minimum over [-15, 15].
    # No optimum is asserted for them.
    BenchmarkSpec(5, "Two peak trap", 1, -15.0, 15.0),
    BenchmarkSpec(6, "Central two peak trap", 1, -15.0, 15.0),
    BenchmarkSpec(
        7, "H1", 2, -100.0, 100.0, direction=Direction.MAXIMIZE, fixed_dimensionality=True,
        optimum=KnownOptimum(2.0, tolerance=1e-4, coords=(8.6998, 6.7665)),
    ),
    BenchmarkSpec(8, "Ackley", 1000, -5.0, 5.0, optimum=KnownOptimum(0.0, fill=0.0)),
    # Shubert 2D: as printed (no leading i factor inside the cosine sums),
    # the global minimum over the box is about -18.0956; reporting tools
    # compare its magnitudes, see stats module.
    BenchmarkSpec(9, "Shubert 2D", 2, -5.12, 5.12, fixed_dimensionality=True),
    BenchmarkSpec(10, "Griewangk", 1000, -600.0, 600.0, optimum=KnownOptimum(0.0, fill=0.0)),
    BenchmarkSpec(11, "Rastrigin", 1000, -5.12, 5.12, optimum=KnownOptimum(0.0, fill=0.0)),
    BenchmarkSpec(12, "Schaffer", 1000, -100.0, 100.0, optimum=KnownOptimum(0.0, fill=0.0)),
    BenchmarkSpec(
        13, "Rosenbrock", 1000, -2.048, 2.048, repairable=True,
        optimum=KnownOptimum(0.0, fill=1.0),
    ),
    BenchmarkSpec(14, "Bohachevsky", 1000, -100.0, 100.0, optimum=KnownOptimum(0.0, fill=0.0)),
    BenchmarkSpec(
        15, "Schwefel", 1000, -500.0, 500.0, repairable=True,
        optimum=KnownOptimum(0.0, tolerance=1e-3, fill=420.9687),
    ),
)

_BY_ID = {s.id: s for s in _SPECS}


def list_benchmarks() -> tuple[BenchmarkSpec, ...]:
    """All 15 benchmark specs in id order."""
    return _SPECS


def benchmark_spec(benchmark_id: int) -> BenchmarkSpec:
    try:
        return _BY_ID[benchmark_id]
    except KeyError:
        raise ValueError(f"unknown benchmark id {benchmark_id}; valid ids are 1..15") from None


def _normalize_name(name: str) -> str:
    return re.sub(r"[^a-z0-9]", "", name.lower())


_BY_NAME = {_normalize_name(s.name): s for s in _SPECS}


def find_benchmark(ident: "int | str") -> BenchmarkSpec:
    """Look up a benchmark by id or by (case/punctuation-insensitive) name."""
    if isinstance(ident, int):
        return benchmark_spec(ident)
    text = ident.strip()
    if text.isdigit():
        return benchmark_spec(int(text))
    key = _normalize_name(text)
    if key in _BY_NAME:
        return _BY_NAME[key]
    raise ValueError(f"unknown benchmark {ident!r}")


_FIXED_FUNCS = {
    1: _jong1,
    2: _jong2,
    4: _himmelblau,
    5: _two_peak_trap,
    6: _central_two_peak_trap,
    7: _h1,
    8: _ackley,
    9: _shubert2d,
    10: _griewangk,
    11: _rastrigin,
    12: _schaffer,
    14: _bohachevsky,
}
_VARIANT_FUNCS = {3: _jong3, 13: _rosenbrock, 15: _schwefel}


def _raw_objective(benchmark_id: int, variant: Variant):
    """Bare evaluation callable; input validation is the caller's job."""
    fn = _FIXED_FUNCS.get(benchmark_id)
    if fn is not None:
        return fn
    vfn = _VARIANT_FUNCS[benchmark_id]
    repaired = variant is Variant.REPAIRED
    return lambda x: vfn(x, repaired)


def evaluate(benchmark_id: int, x, variant: Variant = Variant.REPAIRED) -> float:
    """Evaluate benchmark ``benchmark_id`` at point ``x``.

    Raises if ``x`` has the wrong dimensionality for a fixed-dimension
    function or falls outside the box; callers must clamp first.
    """
    spec = benchmark_spec(benchmark_id)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"input must be a non-empty 1-D vector, got shape {x.shape}")
    if spec.fixed_dimensionality and x.size != spec.default_dimensionality:
        raise ValueError(
            f"{spec.name} is {spec.default_dimensionality}-dimensional, got {x.size} genes"
        )
    if np.any(x < spec.lower_bound) or np.any(x > spec.upper_bound):
        raise ValueError(
            f"input outside [{spec.lower_bound}, {spec.upper_bound}] for {spec.name}"
        )
    return float(_raw_objective(benchmark_id, variant)(x))


@dataclass(frozen=True)
class OptimumCheck:
    """One benchmark evaluated at its known optimum point."""

    benchmark_id: int
    name: str
    dimensionality: int
    expected: float
    observed: float
    tolerance: float

    @property
    def residual(self) -> float:
        return abs(self.observed - self.expected)

    @property
    def ok(self) -> bool:
        return self.residual <= self.tolerance


def verify_known_optima(scalable_dimensionality: int = 10) -> tuple[OptimumCheck, ...]:
    """Evaluate every benchmark that has a known optimum at that optimum.

    Scalable functions are checked at ``scalable_dimensionality`` genes,
    fixed-dimension ones at their own dimensionality. Checks use the default
    (repaired) variant, which is the one the optima describe. The repaired
    Schwefel residual grows linearly with dimensionality because the
    conventional constant 418.9829 is a 4-decimal rounding of the exact
    per-gene offset 418.98288727...; its stated tolerance absorbs that at
    small dimensionalities (about 1.27e-5 per gene).
    """
    checks = []
    for spec in _SPECS:
        if spec.optimum is None:
            continue
        dim = spec.default_dimensionality if spec.fixed_dimensionality else scalable_dimensionality
        point = spec.optimum.point(dim)
        observed = evaluate(spec.id, point)
        checks.append(
            OptimumCheck(
                benchmark_id=spec.id,
                name=spec.name,
                dimensionality=dim,
                expected=spec.optimum.value,
                observed=observed,
                tolerance=spec.optimum.tolerance,
            )
        )
    return tuple(checks)


def make_problem(
    benchmark_id: int,
    dimensionality: int | None = None,
    variant: Variant = Variant.REPAIRED,
) -> Problem:
    """Build a :class:`Problem` for a benchmark id.

    ``dimensionality`` defaults to the benchmark's own (1000 for the scalable
    functions, 2 for the fixed two-dimensional ones, 1 for the traps); it
    cannot be overridden on fixed-dimension functions.
    """
    spec = benchmark_spec(benchmark_id)
    dim = spec.default_dimensionality if dimensionality is None else dimensionality
    if dim < 1:
        raise ValueError(f"dimensionality must be >= 1, got {dim}")
    if spec.fixed_dimensionality and dim != spec.default_dimensionality:
        raise ValueError(
            f"{spec.name} has fixed dimensionality {spec.default_dimensionality}"
        )

    # The engine clamps every genome into the box before evaluation, so the
    # objective skips the validation that the public evaluate() performs.
    fn = _raw_objective(spec.id, variant)

    def objective(genome: RealGenome) -> float:
        return float(fn(genome))

    return Problem(
        id=spec.id,
        name=spec.name,
        dimensionality=dim,
        lower_bound=spec.lower_bound,
        upper_bound=spec.upper_bound,
        direction=spec.direction,
        objective=objective,
    )
