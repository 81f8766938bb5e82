import math

import pytest

from arith_ae.errors import ArgumentError, EvaluationError, KernelDomainError, ModeError
from arith_ae.functions import (
    BUILTIN_FACTORIES,
    FunctionSpec,
    Kernel,
    Mode,
    big_omega,
    builtin_ids,
    evaluate,
    exp_transform,
    get_builtin,
    log_p_minus_1,
    log_phi,
    log_ratio_phi,
    log_transform,
    omega_plus_log,
    ratio_phi,
    scaled_totient,
    small_omega,
    strong_companion,
)


def phi(m: int) -> int:
    out = m
    mm = m
    p = 2
    while p * p <= mm:
        if mm % p == 0:
            out -= out // p
            while mm % p == 0:
                mm //= p
        p += 1
    if mm > 1:
        out -= out // mm
    return out


def distinct_primes(m: int) -> list[int]:
    ps = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            ps.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        ps.append(m)
    return ps


ALL_BUILTINS = [
    big_omega(), small_omega(), log_phi(), log_ratio_phi(),
    ratio_phi(), log_p_minus_1(), omega_plus_log(), scaled_totient(1.0),
]


class TestBuiltinValues:
    def test_big_omega(self, table4):
        for m in range(1, 501):
            want = sum(a for _, a in table4.factor(m).parts)
            assert evaluate(big_omega(), table4.factor(m)) == want

    def test_small_omega(self, table4):
        for m in range(1, 501):
            assert evaluate(small_omega(), table4.factor(m)) == len(distinct_primes(m))

    def test_log_phi(self, table4):
        for m in range(2, 501):
            got = evaluate(log_phi(), table4.factor(m))
            assert got == pytest.approx(math.log(phi(m)), abs=1e-12)

    def test_log_ratio_phi(self, table4):
        for m in range(2, 501):
            got = evaluate(log_ratio_phi(), table4.factor(m))
            assert got == pytest.approx(math.log(m / phi(m)), rel=1e-12, abs=1e-12)

    def test_ratio_phi(self, table4):
        for m in range(1, 501):
            got = evaluate(ratio_phi(), table4.factor(m))
            assert got == pytest.approx(m / phi(m), rel=1e-12)

    def test_log_p_minus_1(self, table4):
        for m in range(1, 501):
            want = math.fsum(math.log(p - 1) for p in distinct_primes(m))
            got = evaluate(log_p_minus_1(), table4.factor(m))
            assert got == pytest.approx(want, abs=1e-12)

    def test_omega_plus_log(self, table4):
        for m in range(1, 501):
            want = math.fsum(1 + math.log(1 - 1 / p) for p in distinct_primes(m))
            got = evaluate(omega_plus_log(), table4.factor(m))
            assert got == pytest.approx(want, abs=1e-12)

    def test_scaled_totient_is_phi_at_one(self, table4):
        for m in range(1, 501):
            got = evaluate(scaled_totient(1.0), table4.factor(m))
            assert got == pytest.approx(phi(m), rel=1e-12)

    def test_scaled_totient_general_u(self, table4):
        spec = scaled_totient(0.5)
        for m in (12, 90, 343, 500):
            want = 1.0
            for p, a in table4.factor(m).parts:
                want *= p ** (0.5 * a) * (1 - 1 / p)
            assert evaluate(spec, table4.factor(m)) == pytest.approx(want, rel=1e-12)

    def test_empty_factorization(self, table4):
        one = table4.factor(1)
        assert evaluate(big_omega(), one) == 0.0
        assert evaluate(ratio_phi(), one) == 1.0


class TestKernelAt:
    def test_strong_ignores_alpha(self):
        spec = log_ratio_phi()
        assert spec.kernel_at(3, 7) == spec.kernel_at(3, 1)

    def test_non_strong_sees_alpha(self):
        spec = big_omega()
        assert spec.kernel_at(3, 7) == 7.0

    def test_non_finite_rejected(self):
        spec = FunctionSpec(Kernel(lambda p, a: math.nan, "nan"), Mode.ADDITIVE, name="bad")
        with pytest.raises(EvaluationError, match=r"p=5"):
            spec.kernel_at(5, 2)


class TestStrongCompanion:
    def test_idempotent_on_all_builtins(self):
        for spec in ALL_BUILTINS:
            once = strong_companion(spec)
            assert once.strong
            assert strong_companion(once) is once

    def test_already_strong_returns_self(self):
        spec = small_omega()
        assert strong_companion(spec) is spec

    def test_companion_of_log_phi(self, table4):
        # strong view of ln phi keeps only the ln(p-1) layer
        got = evaluate(strong_companion(log_phi()), table4.factor(12))
        assert got == pytest.approx(math.log(2), abs=1e-12)


class TestTransforms:
    def test_log_requires_multiplicative(self):
        with pytest.raises(ModeError):
            log_transform(big_omega())

    def test_exp_requires_additive(self):
        with pytest.raises(ModeError):
            exp_transform(ratio_phi())

    def test_log_of_ratio_phi_matches_log_ratio_phi(self, table4):
        lt = log_transform(ratio_phi())
        ref = log_ratio_phi()
        for m in (2, 6, 30, 360, 9973):
            f = table4.factor(m)
            assert evaluate(lt, f) == pytest.approx(evaluate(ref, f), rel=1e-12, abs=1e-12)

    def test_roundtrip(self, table4):
        back = exp_transform(log_transform(scaled_totient(1.0)))
        for m in (2, 6, 30, 360, 5040):
            f = table4.factor(m)
            assert evaluate(back, f) == pytest.approx(evaluate(scaled_totient(1.0), f), rel=1e-12)

    def test_log_rejects_nonpositive(self):
        spec = FunctionSpec(Kernel(lambda p, a: -1.0, "neg"), Mode.MULTIPLICATIVE, name="neg")
        lt = log_transform(spec)
        with pytest.raises(KernelDomainError, match=r"p=2"):
            lt.kernel_at(2, 1)

    def test_exp_overflow(self):
        spec = FunctionSpec(Kernel(lambda p, a: 1e6 * a, "big"), Mode.ADDITIVE, name="big")
        et = exp_transform(spec)
        with pytest.raises(EvaluationError):
            et.kernel_at(2, 1)

    def test_transforms_preserve_strong(self):
        assert log_transform(ratio_phi()).strong
        assert exp_transform(log_ratio_phi()).strong


class TestCatalog:
    def test_all_ids_resolve(self):
        for fn_id in BUILTIN_FACTORIES:
            spec = get_builtin(fn_id)
            assert spec.name == fn_id

    def test_scaled_totient_parsing(self):
        assert get_builtin("scaled_totient:u=1").name == "scaled_totient:u=1"
        assert get_builtin("scaled_totient:u=0.5").kernel_at(2, 1) == pytest.approx(
            2**0.5 * 0.5
        )
        assert get_builtin("scaled_totient:u=-1").kernel_at(2, 1) == pytest.approx(0.25)
        assert get_builtin("scaled_totient").kernel_at(3, 1) == pytest.approx(2.0)

    def test_unknown_id(self):
        with pytest.raises(ArgumentError, match="unknown function id"):
            get_builtin("nope")
        with pytest.raises(ArgumentError):
            get_builtin("scaled_totient:u=abc")

    def test_builtin_ids_listing(self):
        ids = builtin_ids()
        assert "big_omega" in ids
        assert "scaled_totient:u=<real>" in ids

    def test_modes(self):
        assert big_omega().mode is Mode.ADDITIVE and not big_omega().strong
        assert small_omega().strong
        assert ratio_phi().mode is Mode.MULTIPLICATIVE and ratio_phi().strong
        assert scaled_totient(1.0).mode is Mode.MULTIPLICATIVE
        assert not scaled_totient(1.0).strong
