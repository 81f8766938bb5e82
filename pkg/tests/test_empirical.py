import math
import random

import numpy as np
import pytest

from arith_ae.empirical import (
    checkpoint_moments,
    concentration,
    envelope_density,
    evaluate_range,
    markov_tail,
    moments,
)
from arith_ae.errors import ArgumentError, EvaluationError, RangeError
from arith_ae.functions import (
    FunctionSpec,
    Kernel,
    Mode,
    big_omega,
    evaluate,
    log_phi,
    log_ratio_phi,
    omega_plus_log,
    ratio_phi,
    scaled_totient,
    small_omega,
    log_p_minus_1,
)

ALL_BUILTINS = [
    big_omega(), small_omega(), log_phi(), log_ratio_phi(),
    ratio_phi(), log_p_minus_1(), omega_plus_log(), scaled_totient(1.0),
]


def brute_summary(spec, table, n):
    vals = [evaluate(spec, table.factor(m)) for m in range(1, n + 1)]
    mean = math.fsum(vals) / n
    var = math.fsum((v - mean) ** 2 for v in vals) / n
    return mean, var, min(vals), max(vals)


def random_bounded_kernel(rng: random.Random, lo: float, hi: float) -> Kernel:
    cache: dict[tuple[int, int], float] = {}

    def fn(p: int, a: int) -> float:
        key = (p, a)
        if key not in cache:
            local = random.Random((hash(key) * 1_000_003) ^ rng.randrange(1 << 30))
            cache[key] = lo + (hi - lo) * local.random()
        return cache[key]

    return Kernel(fn, "random")


class TestEvaluateRange:
    def test_matches_per_point_evaluation(self, table4):
        for spec in ALL_BUILTINS:
            vals = evaluate_range(spec, table4, 800)
            for m in range(1, 801):
                want = evaluate(spec, table4.factor(m))
                assert vals[m] == pytest.approx(want, rel=1e-12, abs=1e-12), (spec.name, m)

    def test_multiplicative_zero_denominator_fallback(self, table4):
        # squarefree indicator kernel zeroes out every higher power
        mob = FunctionSpec(
            Kernel(lambda p, a: -1.0 if a == 1 else 0.0, "mu"),
            Mode.MULTIPLICATIVE,
            name="mu",
        )
        vals = evaluate_range(mob, table4, 1000)
        for m in range(1, 1001):
            want = evaluate(mob, table4.factor(m))
            assert vals[m] == want, m

    def test_range_error(self, table4):
        with pytest.raises(RangeError):
            evaluate_range(big_omega(), table4, 10**4 + 1)
        with pytest.raises(RangeError):
            evaluate_range(big_omega(), table4, 0)

    def test_kernel_error_names_prime_power(self, table4):
        bad = FunctionSpec(
            Kernel(lambda p, a: math.inf if p == 7 else 1.0, "inf"),
            Mode.ADDITIVE,
            name="inf7",
        )
        with pytest.raises(EvaluationError, match=r"p=7"):
            evaluate_range(bad, table4, 100)


class TestMoments:
    def test_brute_force_all_builtins(self, table4):
        n = 10**4
        for spec in ALL_BUILTINS:
            want_mean, want_var, want_min, want_max = brute_summary(spec, table4, n)
            s = moments(spec, n, table4)
            assert s.mean == pytest.approx(want_mean, rel=1e-9, abs=1e-12), spec.name
            assert s.variance == pytest.approx(want_var, rel=1e-9, abs=1e-9), spec.name
            assert s.min == pytest.approx(want_min, rel=1e-12, abs=1e-12)
            assert s.max == pytest.approx(want_max, rel=1e-12, abs=1e-12)

    def test_big_omega_at_ten(self, table4):
        s = moments(big_omega(), 10, table4)
        assert s.mean == 1.5
        assert s.variance == pytest.approx(0.65, abs=1e-12)
        assert (s.min, s.max) == (0.0, 3.0)

    def test_small_omega_at_ten(self, table4):
        assert moments(small_omega(), 10, table4).mean == pytest.approx(1.1, abs=1e-15)

    def test_log_ratio_phi_at_ten(self, table4):
        s = moments(log_ratio_phi(), 10, table4)
        assert s.mean == pytest.approx(0.5282569009579897, abs=1e-12)

    def test_single_point(self, table4):
        s = moments(big_omega(), 1, table4)
        assert (s.mean, s.variance) == (0.0, 0.0)
        s = moments(ratio_phi(), 1, table4)
        assert (s.mean, s.variance) == (1.0, 0.0)

    def test_mean_within_bounds(self, table4):
        for spec in ALL_BUILTINS:
            s = moments(spec, 3000, table4)
            assert s.min <= s.mean <= s.max
            assert s.variance >= 0.0

    def test_partition_invariance(self, table4):
        n = 10**4
        vals = evaluate_range(log_phi(), table4, n)
        base = moments(log_phi(), n, table4, values=vals)
        for chunk in (1000, 4096, 1 << 16, n, 3 * n):
            s = moments(log_phi(), n, table4, chunk=chunk, values=vals)
            assert s.mean == pytest.approx(base.mean, rel=1e-12)
            assert s.variance == pytest.approx(base.variance, rel=1e-12)
            assert (s.min, s.max) == (base.min, base.max)

    def test_worker_invariance_bitwise(self, table5):
        for spec in (log_phi(), small_omega()):
            one = moments(spec, 10**5, table5, workers=1)
            for workers in (2, 4):
                assert moments(spec, 10**5, table5, workers=workers) == one

    def test_bad_chunk(self, table4):
        with pytest.raises(ArgumentError):
            moments(big_omega(), 100, table4, chunk=0)


class TestCheckpointMoments:
    def test_prefix_equals_fresh_run_exactly(self, table5):
        grid = [10, 100, 1000, 33333, 10**5]
        rows = checkpoint_moments(small_omega(), grid, table5)
        for g, row in zip(grid, rows):
            assert row == moments(small_omega(), g, table5)

    def test_prefix_identity_random_grids(self, table4):
        rng = random.Random(7)
        vals = evaluate_range(log_phi(), table4, 10**4)
        for _ in range(5):
            grid = sorted(rng.sample(range(1, 10**4 + 1), 6))
            rows = checkpoint_moments(log_phi(), grid, table4, values=vals)
            for g, row in zip(grid, rows):
                assert row == moments(log_phi(), g, table4, values=vals)

    def test_singleton(self, table4):
        rows = checkpoint_moments(big_omega(), [777], table4)
        assert rows == [moments(big_omega(), 777, table4)]

    def test_means_increase_for_small_omega(self, table6):
        rows = checkpoint_moments(small_omega(), [10**4, 10**5, 10**6], table6)
        means = [r.mean for r in rows]
        assert means[0] < means[1] < means[2]

    def test_non_ascending_rejected(self, table4):
        with pytest.raises(ArgumentError):
            checkpoint_moments(big_omega(), [100, 100], table4)
        with pytest.raises(ArgumentError):
            checkpoint_moments(big_omega(), [], table4)


class TestConcentration:
    def test_big_omega_example(self, table4):
        r = concentration(big_omega(), 10, 2.0, table4)
        assert r.inside_fraction == 1.0
        assert r.chebyshev_bound == 0.75
        assert r.radius == pytest.approx(2 * math.sqrt(0.65), rel=1e-12)

    def test_b_one_bound_zero(self, table4):
        r = concentration(small_omega(), 100, 1.0, table4)
        assert r.chebyshev_bound == 0.0
        assert r.inside_fraction >= 0.0

    def test_constant_function(self, table4):
        const = FunctionSpec(Kernel(lambda p, a: 0.0, "0"), Mode.ADDITIVE, name="zero")
        r = concentration(const, 500, 2.0, table4)
        assert r.radius == 0.0
        assert r.inside_fraction == 1.0

    def test_exact_chebyshev_builtins(self, table4):
        for spec in ALL_BUILTINS:
            for b in (1.0, 1.5, 2.0, 3.0):
                r = concentration(spec, 10**4, b, table4)
                assert r.inside_fraction >= r.chebyshev_bound, (spec.name, b)

    def test_exact_chebyshev_random_kernels(self, table4):
        rng = random.Random(123)
        for i in range(10):
            spec = FunctionSpec(
                random_bounded_kernel(rng, -3.0, 3.0),
                Mode.ADDITIVE,
                strong=bool(i % 2),
                name=f"rand{i}",
            )
            for b in (1.0, 1.5, 2.0, 3.0):
                r = concentration(spec, 2000, b, table4)
                assert r.inside_fraction >= r.chebyshev_bound

    def test_bad_b(self, table4):
        with pytest.raises(ArgumentError):
            concentration(big_omega(), 100, 0.0, table4)


class TestMarkovTail:
    def test_log_ratio_phi_example(self, table4):
        r = markov_tail(log_ratio_phi(), 10, 1.0, table4)
        assert r.below_fraction == 0.9
        assert r.markov_bound == pytest.approx(1 - 0.5282569009579897, abs=1e-12)

    def test_b_above_max(self, table4):
        s = moments(big_omega(), 1000, table4)
        r = markov_tail(big_omega(), 1000, s.max + 1, table4)
        assert r.below_fraction == 1.0

    def test_b_equal_mean(self, table4):
        s = moments(small_omega(), 1000, table4)
        r = markov_tail(small_omega(), 1000, s.mean, table4)
        assert r.markov_bound == pytest.approx(0.0, abs=1e-15)
        assert r.below_fraction >= 0.0

    def test_exact_markov_builtin_nonnegative(self, table4):
        for spec in (big_omega(), small_omega(), log_ratio_phi(), ratio_phi(), omega_plus_log()):
            s = moments(spec, 10**4, table4)
            for b in (s.mean * 0.5 + 0.1, s.mean + 0.1, 3 * s.mean + 0.1):
                r = markov_tail(spec, 10**4, b, table4)
                assert r.below_fraction >= r.markov_bound, (spec.name, b)

    def test_negative_function_rejected(self, table4):
        neg = FunctionSpec(Kernel(lambda p, a: -1.0, "-1"), Mode.ADDITIVE, name="neg")
        with pytest.raises(ArgumentError, match=r"m=2"):
            markov_tail(neg, 100, 1.0, table4)


class TestEnvelopeDensity:
    def test_wide_envelope(self, table4):
        s = moments(big_omega(), 1000, table4)
        r = envelope_density(
            big_omega(), 1000, s.mean, (s.max - s.min) + 1.0, table4
        )
        assert r.violating_fraction == 0.0

    def test_small_omega_direct_count(self, table4):
        n = 10**4
        center = math.log(math.log(n))
        envelope = center
        vals = evaluate_range(small_omega(), table4, n)
        want = sum(1 for m in range(1, n + 1) if abs(vals[m] - center) > envelope) / n
        r = envelope_density(small_omega(), n, center, envelope, table4)
        assert r.violating_fraction == want
        # with this envelope the violators are exactly the m with omega >= 5;
        # m = 1 sits exactly on the boundary and strict > excludes it
        direct = sum(1 for m in range(2, n + 1) if vals[m] >= 5) / n
        assert r.violating_fraction == direct

    def test_bad_envelope(self, table4):
        with pytest.raises(ArgumentError):
            envelope_density(big_omega(), 100, 0.0, 0.0, table4)
