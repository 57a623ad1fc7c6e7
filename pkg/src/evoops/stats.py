"""Paired nonparametric comparison of algorithm results.

`wilcoxon_signed_rank` implements the two-sided signed-rank test with
average ranks for tied absolute differences, the exact null distribution
for small effective sample sizes (dynamic program over 2x-scaled ranks),
and the tie-corrected normal approximation (no continuity correction)
above that. `compare_tables` aggregates per-(function, algorithm,
population) result vectors into median +- std summary rows with per-row
winners and all pairwise tests, and renders them as CSV or aligned text.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .benchmarks import benchmark_spec
from .core import Direction, better

# Largest effective n for which the exact null distribution is computed.
EXACT_LIMIT = 25
DEFAULT_ALPHA = 0.05


@dataclass(frozen=True, eq=False)
class PairedSample:
    """Two equal-length result vectors paired by repetition index."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
            raise ValueError(f"paired samples must be equal-length vectors, got {a.shape} and {b.shape}")
        if a.shape[0] < 5:
            raise ValueError(f"need at least 5 pairs, got {a.shape[0]}")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("paired samples must be finite")


@dataclass(frozen=True)
class WilcoxonResult:
    positive_sum: float
    negative_sum: float
    w_statistic: float
    n_effective: int
    p_value: float
    reject: bool
    degenerate: bool
    method: str  # "exact", "normal", or "degenerate"


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with ties sharing their average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.shape[0], dtype=np.float64)
    i = 0
    n = values.shape[0]
    while i < n:
        j = i
        v = values[order[i]]
        while j + 1 < n and values[order[j + 1]] == v:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _exact_p_value(ranks: np.ndarray, w: float) -> float:
    """P(min(S+, S-) <= w) under the random-signs null, exact.

    Average ranks are half-integers, so doubling makes them exact integers;
    the DP counts sign assignments by doubled positive-rank sum. Counts fit
    float64 exactly for n <= EXACT_LIMIT (2^25 << 2^53).
    """
    doubled = np.rint(2.0 * ranks).astype(np.int64)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=np.float64)
    counts[0] = 1.0
    for r in doubled:
        r = int(r)
        counts[r:] = counts[r:] + counts[:-r]
    w2 = int(round(2.0 * w))
    sums = np.arange(total + 1)
    extreme = np.minimum(sums, total - sums) <= w2
    return float(counts[extreme].sum() / 2.0 ** len(ranks))


def _normal_p_value(w: float, n: int, tie_counts: np.ndarray) -> float:
    """Two-sided p from the tie-corrected normal approximation of min-sum W."""
    mean = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - float(np.sum(tie_counts**3 - tie_counts)) / 48.0
    z = (w - mean) / math.sqrt(variance)
    return math.erfc(abs(z) / math.sqrt(2.0))


def wilcoxon_signed_rank(sample: PairedSample, alpha: float = DEFAULT_ALPHA) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on a paired sample.

    Zero differences are discarded. All-zero differences give a degenerate
    result (p = NaN, no rejection) rather than an error; an effective
    sample of fewer than 5 nonzero pairs is an error. The exact null
    distribution is used for n_effective <= 25, the tie-corrected normal
    approximation above that.
    """
    d = sample.a - sample.b
    nonzero = d != 0.0
    n_eff = int(np.count_nonzero(nonzero))
    if n_eff == 0:
        return WilcoxonResult(
            positive_sum=0.0, negative_sum=0.0, w_statistic=0.0, n_effective=0,
            p_value=float("nan"), reject=False, degenerate=True, method="degenerate",
        )
    if n_eff < 5:
        raise ValueError(f"need at least 5 nonzero differences, got {n_eff}")
    d = d[nonzero]
    magnitudes = np.abs(d)
    ranks = _average_ranks(magnitudes)
    positive_sum = float(ranks[d > 0].sum())
    negative_sum = float(ranks[d < 0].sum())
    w = min(positive_sum, negative_sum)
    if n_eff <= EXACT_LIMIT:
        p = _exact_p_value(ranks, w)
        method = "exact"
    else:
        _, tie_counts = np.unique(magnitudes, return_counts=True)
        p = _normal_p_value(w, n_eff, tie_counts.astype(np.float64))
        method = "normal"
    return WilcoxonResult(
        positive_sum=positive_sum,
        negative_sum=negative_sum,
        w_statistic=w,
        n_effective=n_eff,
        p_value=p,
        reject=bool(p < alpha),
        degenerate=False,
        method=method,
    )


@dataclass(frozen=True)
class CellSummary:
    function_id: int
    function_name: str
    population: int
    algorithm: str
    median: float
    std: float
    count: int


@dataclass(frozen=True)
class PairwiseTest:
    function_id: int
    function_name: str
    population: int
    algorithm_a: str
    algorithm_b: str
    positive_sum: float
    negative_sum: float
    w_statistic: float
    n_effective: int
    p_value: float
    reject: bool
    degenerate: bool


@dataclass(frozen=True)
class ComparisonRow:
    function_id: int
    function_name: str
    population: int
    cells: tuple[CellSummary, ...]
    best_algorithms: tuple[str, ...]
    tests: tuple[PairwiseTest, ...]


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple[ComparisonRow, ...]
    alpha: float


def _normalize_algorithm(algo) -> str:
    value = getattr(algo, "value", algo)
    if not isinstance(value, str):
        raise ValueError(f"algorithm key must be a string or enum, got {algo!r}")
    return value


def compare_tables(results: dict, alpha: float = DEFAULT_ALPHA) -> ComparisonReport:
    """Aggregate final-best vectors keyed by (function id, algorithm, population).

    Every (function, population) group needs at least two algorithms with
    identical repetition counts; each group yields one row with per-
    algorithm median and sample standard deviation, the set of algorithms
    achieving the best median under the function's direction (empty when
    all algorithms tie), and a signed-rank test per algorithm pair.
    """
    groups: dict = {}
    for (function_id, algo, population), values in results.items():
        v = np.asarray(values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise ValueError(f"result vector for {(function_id, algo, population)} must be 1-D and non-empty")
        groups.setdefault((int(function_id), int(population)), {})[_normalize_algorithm(algo)] = v

    rows = []
    for (function_id, population) in sorted(groups):
        by_algo = groups[(function_id, population)]
        if len(by_algo) < 2:
            raise ValueError(
                f"function {function_id} population {population} has only "
                f"{len(by_algo)} algorithm(s); need at least 2 to compare"
            )
        counts = {len(v) for v in by_algo.values()}
        if len(counts) != 1:
            raise ValueError(
                f"function {function_id} population {population} has mismatched "
                f"repetition counts {sorted(counts)}"
            )
        spec = benchmark_spec(function_id)
        algos = sorted(by_algo)
        cells = tuple(
            CellSummary(
                function_id=function_id,
                function_name=spec.name,
                population=population,
                algorithm=algo,
                median=float(np.median(by_algo[algo])),
                std=float(np.std(by_algo[algo], ddof=1)) if len(by_algo[algo]) > 1 else 0.0,
                count=len(by_algo[algo]),
            )
            for algo in algos
        )
        medians = {c.algorithm: c.median for c in cells}
        best_median = None
        for m in medians.values():
            if best_median is None or better(m, best_median, spec.direction):
                best_median = m
        winners = tuple(a for a in algos if medians[a] == best_median)
        if len(winners) == len(algos):
            winners = ()  # a full tie bolds nobody
        tests = []
        for i, algo_a in enumerate(algos):
            for algo_b in algos[i + 1 :]:
                res = wilcoxon_signed_rank(
                    PairedSample(by_algo[algo_a], by_algo[algo_b]), alpha=alpha
                )
                tests.append(
                    PairwiseTest(
                        function_id=function_id,
                        function_name=spec.name,
                        population=population,
                        algorithm_a=algo_a,
                        algorithm_b=algo_b,
                        positive_sum=res.positive_sum,
                        negative_sum=res.negative_sum,
                        w_statistic=res.w_statistic,
                        n_effective=res.n_effective,
                        p_value=res.p_value,
                        reject=res.reject,
                        degenerate=res.degenerate,
                    )
                )
        rows.append(
            ComparisonRow(
                function_id=function_id,
                function_name=spec.name,
                population=population,
                cells=cells,
                best_algorithms=winners,
                tests=tuple(tests),
            )
        )
    return ComparisonReport(rows=tuple(rows), alpha=alpha)


def _display_median(cell: CellSummary) -> float:
    # Shubert 2D results are conventionally reported as magnitudes (its
    # optimum is negative); winners are still decided on raw medians.
    return abs(cell.median) if cell.function_id == 9 else cell.median


def summary_csv(report: ComparisonReport) -> str:
    """Long-format summary table: one line per (function, population, algorithm)."""
    lines = ["function_id,function_name,population,algorithm,median,std,count,best"]
    for row in report.rows:
        for cell in row.cells:
            best = "yes" if cell.algorithm in row.best_algorithms else "no"
            lines.append(
                f"{cell.function_id},{cell.function_name},{cell.population},"
                f"{cell.algorithm},{_display_median(cell)!r},{cell.std!r},{cell.count},{best}"
            )
    return "\n".join(lines) + "\n"


def pairwise_csv(report: ComparisonReport) -> str:
    """Pairwise signed-rank table: one line per algorithm pair."""
    lines = [
        "function_id,function_name,population,algorithm_a,algorithm_b,"
        "positive_sum,negative_sum,w,n_effective,p_value,reject,degenerate"
    ]
    for row in report.rows:
        for t in row.tests:
            lines.append(
                f"{t.function_id},{t.function_name},{t.population},{t.algorithm_a},"
                f"{t.algorithm_b},{t.positive_sum!r},{t.negative_sum!r},{t.w_statistic!r},"
                f"{t.n_effective},{t.p_value!r},{'yes' if t.reject else 'no'},"
                f"{'yes' if t.degenerate else 'no'}"
            )
    return "\n".join(lines) + "\n"


def format_text(report: ComparisonReport) -> str:
    """Aligned, human-readable rendering of a comparison report."""
    out = []
    for row in report.rows:
        out.append(f"{row.function_name} (id {row.function_id}), population {row.population}")
        for cell in row.cells:
            marker = " *" if cell.algorithm in row.best_algorithms else "  "
            out.append(
                f"  {cell.algorithm:<6}{marker} median {_display_median(cell):.6g} "
                f"+- {cell.std:.3g} (n={cell.count})"
            )
        for t in row.tests:
            if t.degenerate:
                verdict = "degenerate (all differences zero)"
            elif t.reject:
                verdict = f"p={t.p_value:.4g} REJECT"
            else:
                verdict = f"p={t.p_value:.4g} not rejected"
            out.append(
                f"    {t.algorithm_a} vs {t.algorithm_b}: T+={t.positive_sum:g} "
                f"T-={t.negative_sum:g} W={t.w_statistic:g} {verdict}"
            )
        out.append("")
    return "\n".join(out)
