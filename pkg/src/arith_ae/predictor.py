"""Theoretical quantities: predicted means, heuristic variances, prime sums.

The predicted mean of an additive function sums f(p^alpha)/p^alpha over
prime powers up to n; the strong variant sums f(p)/p over primes only.
The matching variance predictions square the kernel.  The variance
formulas are heuristic: callers surface them next to empirical variance
rather than trusting them (they fail for kernels like ln(p-1), where the
empirical dispersion stays bounded while the heuristic grows like ln^2 n).

Reference laws give the classical leading terms for Mertens-type sums,
with the O(1) remainder reported concretely as a drift column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .errors import ArgumentError, EvaluationError, ModeError
from .functions import FunctionSpec, Mode, strong_companion
from .sieve import SpfTable


class Weighting(str, Enum):
    PLAIN_RECIPROCAL = "plain"
    EXACT_DIVISIBILITY = "exactdiv"


class Law(str, Enum):
    LNP_OVER_P = "lnp"
    LN2P_OVER_P = "ln2p"
    RECIPROCAL_P = "recip"


class ProbeVerdict(str, Enum):
    CONVERGENT_LIKELY = "ConvergentLikely"
    DIVERGENT_LIKELY = "DivergentLikely"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class PredictionTable:
    n: int
    a_n: float
    a_n_star: float
    d_n_heuristic: float
    d_n_star_heuristic: float
    weighting: Weighting


@dataclass(frozen=True)
class DriftRow:
    x: int
    sum: float
    reference: float
    drift: float


@dataclass(frozen=True)
class ProbeResult:
    checkpoints: tuple[int, ...]
    partial_sums: tuple[float, ...]
    rho: float
    verdict: ProbeVerdict


# ---------------------------------------------------------------------------
# Prime and prime-power sums
# ---------------------------------------------------------------------------

def prime_sum(g: Callable[[int], float], x: int, table: SpfTable) -> float:
    """Sum of g(p) over primes p <= x, compensated, ascending in p."""
    terms = []
    for p in table.primes_up_to(x):
        v = float(g(int(p)))
        if not math.isfinite(v):
            raise EvaluationError(f"prime sum term is {v} at p={int(p)}")
        terms.append(v)
    return math.fsum(terms)


def prime_power_sum(h: Callable[[int, int], float], x: int, table: SpfTable) -> float:
    """Sum of h(p, alpha) over all prime powers p^alpha <= x, ascending in value."""
    terms = []
    for pp in table.prime_powers_up_to(x):
        v = float(h(pp.p, pp.alpha))
        if not math.isfinite(v):
            raise EvaluationError(f"prime power sum term is {v} at {pp.p}^{pp.alpha}")
        terms.append(v)
    return math.fsum(terms)


def _weight(p: int, alpha: int, weighting: Weighting) -> float:
    w = 1.0 / p**alpha
    if weighting is Weighting.EXACT_DIVISIBILITY:
        w *= 1.0 - 1.0 / p
    return w


def mean_prediction(
    spec: FunctionSpec,
    n: int,
    table: SpfTable,
    weighting: Weighting = Weighting.PLAIN_RECIPROCAL,
) -> float:
    """Predicted mean: sum f(p^a)/p^a over prime powers, or f(p)/p for strong specs."""
    if spec.mode is not Mode.ADDITIVE:
        raise ModeError(f"mean prediction needs an additive spec, got {spec.mode.value}")
    if spec.strong:
        return prime_sum(lambda p: spec.kernel_at(p, 1) * _weight(p, 1, weighting), n, table)
    return prime_power_sum(
        lambda p, a: spec.kernel_at(p, a) * _weight(p, a, weighting), n, table
    )


def variance_heuristic(
    spec: FunctionSpec,
    n: int,
    table: SpfTable,
    weighting: Weighting = Weighting.PLAIN_RECIPROCAL,
) -> float:
    """Same weighting applied to the squared kernel; heuristic, not a theorem."""
    if spec.mode is not Mode.ADDITIVE:
        raise ModeError(f"variance heuristic needs an additive spec, got {spec.mode.value}")
    if spec.strong:
        return prime_sum(
            lambda p: spec.kernel_at(p, 1) ** 2 * _weight(p, 1, weighting), n, table
        )
    return prime_power_sum(
        lambda p, a: spec.kernel_at(p, a) ** 2 * _weight(p, a, weighting), n, table
    )


def prediction_table(
    spec: FunctionSpec,
    n: int,
    table: SpfTable,
    weighting: Weighting = Weighting.PLAIN_RECIPROCAL,
) -> PredictionTable:
    """All four predictions; for strong specs the starred pair repeats the plain one."""
    star = strong_companion(spec)
    return PredictionTable(
        n=n,
        a_n=mean_prediction(spec, n, table, weighting),
        a_n_star=mean_prediction(star, n, table, weighting),
        d_n_heuristic=variance_heuristic(spec, n, table, weighting),
        d_n_star_heuristic=variance_heuristic(star, n, table, weighting),
        weighting=weighting,
    )


# ---------------------------------------------------------------------------
# Reference asymptotic laws
# ---------------------------------------------------------------------------

def reference_law(
    law: Law, x: int, include_prime_powers: bool, table: SpfTable
) -> DriftRow:
    """Mertens-type sum against its leading term; drift is the O(1) remainder.

    lnp:   sum ln p / p          -> ln x      (powers form: ln(p^a)/p^a)
    ln2p:  sum ln^2 p / p        -> ln^2 x / 2
    recip: sum 1/p               -> ln ln x   (powers form: 1/p^a)
    """
    if x < 3:
        raise ArgumentError(f"reference laws need x >= 3, got {x}")
    if law is Law.LNP_OVER_P:
        reference = math.log(x)
        if include_prime_powers:
            total = prime_power_sum(lambda p, a: a * math.log(p) / p**a, x, table)
        else:
            total = prime_sum(lambda p: math.log(p) / p, x, table)
    elif law is Law.LN2P_OVER_P:
        reference = 0.5 * math.log(x) ** 2
        if include_prime_powers:
            total = prime_power_sum(lambda p, a: (a * math.log(p)) ** 2 / p**a, x, table)
        else:
            total = prime_sum(lambda p: math.log(p) ** 2 / p, x, table)
    elif law is Law.RECIPROCAL_P:
        reference = math.log(math.log(x))
        if include_prime_powers:
            total = prime_power_sum(lambda p, a: 1.0 / p**a, x, table)
        else:
            total = prime_sum(lambda p: 1.0 / p, x, table)
    else:
        raise ArgumentError(f"unknown law {law!r}")
    return DriftRow(x=x, sum=total, reference=reference, drift=total - reference)


# ---------------------------------------------------------------------------
# Convergence probing
# ---------------------------------------------------------------------------

def series_convergence_probe(
    g: Callable[[int], float],
    checkpoints: list[int],
    table: SpfTable,
    rho: float = 0.5,
) -> ProbeResult:
    """Numeric convergence heuristic for sum over primes of g(p).

    Partial sums are taken at each checkpoint; with increments
    d_k = S(x_{k+1}) - S(x_k), the verdict is ConvergentLikely when every
    |d_{k+1}| < rho * |d_k| (geometric-like decay), DivergentLikely when
    every ratio is >= rho (the ln ln growth of Mertens-type series shrinks
    its increments far slower than geometrically), and Inconclusive for
    mixed behavior.  Vanishing increments count as convergent.
    """
    if len(checkpoints) < 3:
        raise ArgumentError(f"need >= 3 checkpoints, got {len(checkpoints)}")
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ArgumentError(f"checkpoints must be strictly ascending, got {checkpoints}")
    sums = [prime_sum(g, x, table) for x in checkpoints]
    scale = max(1.0, max(abs(s) for s in sums))
    incs = [abs(b - a) for a, b in zip(sums, sums[1:])]
    tiny = 1e-15 * scale
    if all(d <= tiny for d in incs):
        verdict = ProbeVerdict.CONVERGENT_LIKELY
    else:
        decaying = all(
            b < rho * a for a, b in zip(incs, incs[1:]) if a > tiny or b > tiny
        )
        growing = all(
            b >= rho * a for a, b in zip(incs, incs[1:]) if a > tiny or b > tiny
        )
        if decaying:
            verdict = ProbeVerdict.CONVERGENT_LIKELY
        elif growing:
            verdict = ProbeVerdict.DIVERGENT_LIKELY
        else:
            verdict = ProbeVerdict.INCONCLUSIVE
    return ProbeResult(
        checkpoints=tuple(checkpoints),
        partial_sums=tuple(sums),
        rho=rho,
        verdict=verdict,
    )
