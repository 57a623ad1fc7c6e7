"""Benchmark definitions versus independent scalar reimplementations.

The reference implementations below are deliberately written as plain
per-gene loops with math.* calls, no numpy, so a vectorization slip in the
package cannot hide itself.
"""
import math

import numpy as np
import pytest

from evoops.benchmarks import (
    Variant,
    benchmark_spec,
    evaluate,
    find_benchmark,
    list_benchmarks,
    make_problem,
    verify_known_optima,
)
from evoops.core import Direction, RandomStream


def _ref_jong1(x):
    return sum(v * v for v in x)


def _ref_jong2(x):
    return sum((i + 2) * x[i] * x[i] for i in range(len(x)))


def _ref_jong3(x, repaired):
    total = 0.0
    for i, v in enumerate(x, start=1):
        base = abs(v) if repaired else v
        total += base**i
    return total


def _ref_himmelblau(x):
    a, b = x
    return (a * a + b - 11.0) ** 2 + (a + b * b - 7.0) ** 2


def _ref_two_peak(x):
    total = 0.0
    for v in x:
        if 10.0 <= v < 15.0:
            total += (160.0 / 15.0) * (15.0 - v)
        else:
            total += 40.0 * (v - 15.0)
    return total


def _ref_central_two_peak(x):
    total = 0.0
    for v in x:
        if v < 10.0:
            total += (160.0 / 15.0) * v
        elif v < 15.0:
            total += (160.0 / 15.0) * (15.0 - v)
        else:
            total += 40.0 * (v - 15.0)
    return total


def _ref_h1(x):
    a, b = x
    num = math.sin(a - b / 8.0) ** 2 + math.sin(b + a / 8.0) ** 2
    den = math.sqrt((a - 8.6998) ** 2 + (b - 6.7665) ** 2 + 1.0)
    return num / den


def _ref_ackley(x):
    n = len(x)
    rms = math.sqrt(sum(v * v for v in x) / n)
    cos_mean = sum(math.cos(2.0 * math.pi * v) for v in x) / n
    return 20.0 - 20.0 * math.exp(-0.2 * rms) + math.e - math.exp(cos_mean)


def _ref_shubert_factor(t):
    return sum(math.cos((i + 1) * t + i) for i in range(1, 6))


def _ref_shubert2d(x):
    return _ref_shubert_factor(x[0]) * _ref_shubert_factor(x[1])


def _ref_griewangk(x):
    square = sum(v * v for v in x) / 4000.0
    product = 1.0
    for i, v in enumerate(x, start=1):
        product *= math.cos(v / math.sqrt(i))
    return square - product + 1.0


def _ref_rastrigin(x):
    return 10.0 * len(x) + sum(v * v - 10.0 * math.cos(2.0 * math.pi * v) for v in x)


def _ref_schaffer(x):
    total = 0.0
    for i in range(len(x) - 1):
        s = x[i] ** 2 + x[i + 1] ** 2
        total += s**0.25 * (math.sin(50.0 * s**0.1) + 1.0)
    return total


def _ref_rosenbrock(x, repaired):
    total = 0.0
    for i in range(len(x) - 1):
        d = x[i + 1] - x[i] ** 2
        total += (100.0 * d * d if repaired else 100.0 * d) + (1.0 - x[i]) ** 2
    return total


def _ref_bohachevsky(x):
    total = 0.0
    for i in range(len(x) - 1):
        a, b = x[i], x[i + 1]
        total += (
            a * a + 2.0 * b * b
            - 0.3 * math.cos(3.0 * math.pi * a)
            - 0.4 * math.cos(4.0 * math.pi * b)
            + 0.7
        )
    return total


def _ref_schwefel(x, repaired):
    s = sum(v * math.sin(math.sqrt(abs(v))) for v in x)
    n = len(x)
    return 418.9829 * n - s if repaired else 418.9829 * n * s


_REFERENCES = {
    1: lambda x, rep: _ref_jong1(x),
    2: lambda x, rep: _ref_jong2(x),
    3: _ref_jong3,
    4: lambda x, rep: _ref_himmelblau(x),
    5: lambda x, rep: _ref_two_peak(x),
    6: lambda x, rep: _ref_central_two_peak(x),
    7: lambda x, rep: _ref_h1(x),
    8: lambda x, rep: _ref_ackley(x),
    9: lambda x, rep: _ref_shubert2d(x),
    10: lambda x, rep: _ref_griewangk(x),
    11: lambda x, rep: _ref_rastrigin(x),
    12: lambda x, rep: _ref_schaffer(x),
    13: _ref_rosenbrock,
    14: lambda x, rep: _ref_bohachevsky(x),
    15: _ref_schwefel,
}


@pytest.mark.parametrize("benchmark_id", range(1, 16))
def test_matches_reference_implementation(benchmark_id):
    spec = benchmark_spec(benchmark_id)
    ref = _REFERENCES[benchmark_id]
    rng = RandomStream(77, "bench-ref", benchmark_id)
    dim = spec.default_dimensionality if spec.fixed_dimensionality else 8
    span = spec.upper_bound - spec.lower_bound
    for _ in range(40):
        x = spec.lower_bound + span * rng.uniforms(dim)
        for variant in (Variant.REPAIRED, Variant.AS_PRINTED):
            got = evaluate(benchmark_id, x, variant)
            want = ref([float(v) for v in x], variant is Variant.REPAIRED)
            scale = max(1.0, abs(want))
            assert abs(got - want) <= 1e-9 * scale, (
                f"id {benchmark_id} {variant}: {got} vs reference {want}"
            )


def test_variants_differ_only_for_repairable_functions():
    rng = RandomStream(78, "variants")
    for spec in list_benchmarks():
        dim = spec.default_dimensionality if spec.fixed_dimensionality else 6
        span = spec.upper_bound - spec.lower_bound
        # a point with a negative gene so the |x| repairs actually bite
        x = spec.lower_bound + span * (0.05 + 0.9 * rng.uniforms(dim))
        x[0] = spec.lower_bound + 0.07 * span
        printed = evaluate(spec.id, x, Variant.AS_PRINTED)
        repaired = evaluate(spec.id, x, Variant.REPAIRED)
        if spec.repairable:
            assert printed != repaired, f"{spec.name} variants agree at {x}"
        else:
            assert printed == repaired, f"{spec.name} variants must be identical"


def test_known_optima_all_hold_at_dimension_10():
    checks = verify_known_optima(10)
    assert len(checks) == 12  # three functions assert no optimum
    for check in checks:
        assert check.ok, (
            f"{check.name}: |{check.observed} - {check.expected}|"
            f" > {check.tolerance}"
        )


def test_known_optima_exact_values():
    by_id = {c.benchmark_id: c for c in verify_known_optima(10)}
    assert by_id[1].observed == 0.0
    assert by_id[4].observed == 0.0  # (3, 2) is an exact root pair
    assert abs(by_id[7].observed - 2.0) <= 1e-4
    assert by_id[7].dimensionality == 2
    # the 4-decimal constant in the subtraction form leaves a small residue
    assert 0.0 < by_id[15].residual <= 1e-3
    assert {5, 6, 9}.isdisjoint(by_id)


def test_hand_values():
    # Rastrigin at all-0.5: each gene contributes 0.25 + 10 + 10
    assert abs(evaluate(11, np.full(8, 0.5)) - 20.25 * 8) <= 1e-9
    # Ackley at all-ones: cosine term cancels e exactly
    want = 20.0 - 20.0 * math.exp(-0.2)
    assert abs(evaluate(8, np.ones(10)) - want) <= 1e-12
    assert evaluate(14, np.zeros(5)) == 0.0
    assert evaluate(1, np.zeros(3)) == 0.0


def test_shubert_global_minimum_oracle():
    # 1-D factor extrema found by dense scan + golden refinement offline:
    # min -3.8279696055 near t=4.811816, max 4.7271966431 near t=-0.778212.
    # The product's box minimum pairs them.
    argmin = np.array([4.8118164388, -0.7782120187])
    value = evaluate(9, argmin)
    assert abs(value - (-18.0955650861)) <= 1e-6
    # no grid point beats it
    grid = np.linspace(-5.12, 5.12, 257)
    factor = np.array([_ref_shubert_factor(t) for t in grid])
    assert float(np.min(np.outer(factor, factor))) >= value - 1e-6


def test_h1_is_maximized():
    assert benchmark_spec(7).direction is Direction.MAXIMIZE
    assert all(
        s.direction is Direction.MINIMIZE for s in list_benchmarks() if s.id != 7
    )


class TestEvaluateValidation:
    def test_rejects_wrong_dimension_for_fixed(self):
        with pytest.raises(ValueError):
            evaluate(4, [1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            evaluate(9, [0.0])

    def test_rejects_out_of_box(self):
        with pytest.raises(ValueError):
            evaluate(1, [0.0, 6.0])
        with pytest.raises(ValueError):
            evaluate(1, [-5.2, 0.0])

    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            evaluate(1, [[0.0, 1.0]])
        with pytest.raises(ValueError):
            evaluate(1, [])

    def test_unknown_id(self):
        with pytest.raises(ValueError):
            evaluate(16, [0.0])
        with pytest.raises(ValueError):
            benchmark_spec(0)


class TestMakeProblem:
    def test_defaults_and_override(self):
        assert make_problem(1).dimensionality == 1000
        assert make_problem(1, 10).dimensionality == 10
        assert make_problem(4).dimensionality == 2
        assert make_problem(5).dimensionality == 1

    def test_fixed_dimension_cannot_be_overridden(self):
        with pytest.raises(ValueError):
            make_problem(4, 3)

    def test_objective_skips_box_validation(self):
        # engine clamps genomes itself; the problem objective stays cheap
        p = make_problem(1, 2)
        assert p.objective(np.array([7.0, 0.0])) == 49.0

    def test_variant_flows_through(self):
        p_rep = make_problem(13, 4, Variant.REPAIRED)
        p_prn = make_problem(13, 4, Variant.AS_PRINTED)
        x = np.array([0.5, -0.25, 0.125, 0.0])
        assert p_rep.objective(x) != p_prn.objective(x)


class TestFindBenchmark:
    def test_by_id_and_digit_string(self):
        assert find_benchmark(10).name == "Griewangk"
        assert find_benchmark("10").id == 10

    def test_by_name_normalized(self):
        assert find_benchmark("griewangk").id == 10
        assert find_benchmark("Jong 1").id == 1
        assert find_benchmark("jong-1").id == 1
        assert find_benchmark("SHUBERT 2d").id == 9

    def test_unknown_raises(self):
        with pytest.raises(ValueError):
            find_benchmark("nonesuch")
        with pytest.raises(ValueError):
            find_benchmark(99)
