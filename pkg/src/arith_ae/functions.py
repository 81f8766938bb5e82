"""Arithmetic functions defined by prime-power kernels.

A function is described by a kernel k(p, alpha) together with a composition
mode: additive functions sum the kernel over the canonical factorization,
multiplicative ones multiply it.  "Strong" variants ignore alpha, i.e. they
see only the distinct primes dividing m.  The log/exp transforms move between
the two modes, and ``strong_companion`` produces the strong variant.

All functions here are real-valued.  f(1) = 0 for additive and g(1) = 1 for
multiplicative specs (empty sum / empty product).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

from .errors import ArgumentError, EvaluationError, KernelDomainError, ModeError
from .sieve import Factorization


class Mode(str, Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


@dataclass(frozen=True)
class Kernel:
    """Pure map (prime p, exponent alpha >= 1) -> real value."""

    fn: Callable[[int, int], float]
    label: str = ""


@dataclass(frozen=True)
class FunctionSpec:
    kernel: Kernel
    mode: Mode
    strong: bool = False
    name: str = ""

    def kernel_at(self, p: int, alpha: int) -> float:
        """Kernel value used for p^alpha; strong specs are alpha-blind."""
        a = 1 if self.strong else alpha
        v = float(self.kernel.fn(p, a))
        if not math.isfinite(v):
            raise EvaluationError(
                f"kernel {self.kernel.label or self.name!r} returned {v} at (p={p}, alpha={a})"
            )
        return v


def evaluate(spec: FunctionSpec, fac: Factorization) -> float:
    """Evaluate one factorization: kernel sum (additive) or product."""
    if spec.mode is Mode.ADDITIVE:
        return math.fsum(spec.kernel_at(p, a) for p, a in fac.parts)
    out = 1.0
    for p, a in fac.parts:
        out *= spec.kernel_at(p, a)
    if not math.isfinite(out):
        raise EvaluationError(f"product overflowed evaluating {spec.name!r} at m={fac.m}")
    return out


def strong_companion(spec: FunctionSpec) -> FunctionSpec:
    """Same kernel restricted to alpha = 1; idempotent."""
    if spec.strong:
        return spec
    name = spec.name + "*" if spec.name else ""
    return replace(spec, strong=True, name=name)


def log_transform(spec: FunctionSpec) -> FunctionSpec:
    """Additive spec with kernel ln(g(p^alpha)); requires g > 0 where used."""
    if spec.mode is not Mode.MULTIPLICATIVE:
        raise ModeError(f"log_transform needs a multiplicative spec, got {spec.mode.value}")
    inner = spec.kernel.fn

    def fn(p: int, a: int) -> float:
        v = inner(p, a)
        if not v > 0:
            raise KernelDomainError(
                f"log transform needs a positive kernel, got {v} at (p={p}, alpha={a})"
            )
        return math.log(v)

    return FunctionSpec(
        kernel=Kernel(fn, f"ln({spec.kernel.label})" if spec.kernel.label else "ln"),
        mode=Mode.ADDITIVE,
        strong=spec.strong,
        name=f"log({spec.name})" if spec.name else "",
    )


def exp_transform(spec: FunctionSpec) -> FunctionSpec:
    """Multiplicative spec with kernel e^(f(p^alpha))."""
    if spec.mode is not Mode.ADDITIVE:
        raise ModeError(f"exp_transform needs an additive spec, got {spec.mode.value}")
    inner = spec.kernel.fn

    def fn(p: int, a: int) -> float:
        try:
            return math.exp(inner(p, a))
        except OverflowError as exc:
            raise EvaluationError(f"exp overflow at (p={p}, alpha={a})") from exc

    return FunctionSpec(
        kernel=Kernel(fn, f"exp({spec.kernel.label})" if spec.kernel.label else "exp"),
        mode=Mode.MULTIPLICATIVE,
        strong=spec.strong,
        name=f"exp({spec.name})" if spec.name else "",
    )


# ---------------------------------------------------------------------------
# Builtin catalog
# ---------------------------------------------------------------------------

def _log_phi_kernel(p: int, a: int) -> float:
    # phi(p^a) = p^(a-1) * (p-1); evaluated in log space so large m never
    # needs the integer value of phi(m)
    return (a - 1) * math.log(p) + math.log(p - 1)


def big_omega() -> FunctionSpec:
    """Number of prime factors counted with multiplicity."""
    return FunctionSpec(Kernel(lambda p, a: float(a), "alpha"), Mode.ADDITIVE, name="big_omega")


def small_omega() -> FunctionSpec:
    """Number of distinct prime factors."""
    return FunctionSpec(Kernel(lambda p, a: 1.0, "1"), Mode.ADDITIVE, strong=True, name="small_omega")


def log_phi() -> FunctionSpec:
    """ln of the Euler totient."""
    return FunctionSpec(Kernel(_log_phi_kernel, "ln(phi(p^alpha))"), Mode.ADDITIVE, name="log_phi")


def log_ratio_phi() -> FunctionSpec:
    """ln(m / phi(m)); strongly additive with kernel ln(p/(p-1)) >= 0."""
    return FunctionSpec(
        Kernel(lambda p, a: math.log(p / (p - 1)), "ln(p/(p-1))"),
        Mode.ADDITIVE,
        strong=True,
        name="log_ratio_phi",
    )


def ratio_phi() -> FunctionSpec:
    """m / phi(m); strongly multiplicative with kernel p/(p-1) >= 1."""
    return FunctionSpec(
        Kernel(lambda p, a: p / (p - 1), "p/(p-1)"),
        Mode.MULTIPLICATIVE,
        strong=True,
        name="ratio_phi",
    )


def log_p_minus_1() -> FunctionSpec:
    """Strongly additive kernel ln(p - 1); the strong companion of log_phi."""
    return FunctionSpec(
        Kernel(lambda p, a: math.log(p - 1), "ln(p-1)"),
        Mode.ADDITIVE,
        strong=True,
        name="log_p_minus_1",
    )


def omega_plus_log() -> FunctionSpec:
    """Strongly additive kernel 1 + ln(1 - 1/p)."""
    return FunctionSpec(
        Kernel(lambda p, a: 1.0 + math.log(1.0 - 1.0 / p), "1+ln(1-1/p)"),
        Mode.ADDITIVE,
        strong=True,
        name="omega_plus_log",
    )


def scaled_totient(u: float = 1.0) -> FunctionSpec:
    """Multiplicative kernel p^(u*alpha) * (1 - 1/p); u = 1 gives the totient."""
    return FunctionSpec(
        Kernel(lambda p, a: math.pow(p, u * a) * (1.0 - 1.0 / p), f"p^({u}a)(1-1/p)"),
        Mode.MULTIPLICATIVE,
        name=f"scaled_totient:u={u:g}",
    )


#: Stable CLI/service identifiers for the parameter-free builtins.
BUILTIN_FACTORIES: dict[str, Callable[[], FunctionSpec]] = {
    "big_omega": big_omega,
    "small_omega": small_omega,
    "log_phi": log_phi,
    "log_ratio_phi": log_ratio_phi,
    "ratio_phi": ratio_phi,
    "log_p_minus_1": log_p_minus_1,
    "omega_plus_log": omega_plus_log,
}

_SCALED_TOTIENT_RE = re.compile(r"^scaled_totient(?::u=([-+0-9.eE]+))?$")


def builtin_ids() -> list[str]:
    return sorted(BUILTIN_FACTORIES) + ["scaled_totient:u=<real>"]


def get_builtin(identifier: str) -> FunctionSpec:
    """Resolve a CLI identifier like ``small_omega`` or ``scaled_totient:u=1``."""
    if identifier in BUILTIN_FACTORIES:
        return BUILTIN_FACTORIES[identifier]()
    m = _SCALED_TOTIENT_RE.match(identifier)
    if m:
        u = float(m.group(1)) if m.group(1) is not None else 1.0
        return scaled_totient(u)
    raise ArgumentError(
        f"unknown function id {identifier!r}; known: {', '.join(builtin_ids())}"
    )
