"""Smallest-prime-factor sieve, prime/prime-power enumeration, factorization.

The SPF table is the one shared, expensive resource in this package: it is
built once (single logical phase) and is immutable afterwards, so any number
of workers may read it concurrently.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CapacityError, RangeError

#: Hard default on the SPF array size (entries). Overridable via the
#: environment so small machines can lower it and big ones raise it.
DEFAULT_CAPACITY = 1 << 31
CAPACITY_ENV_VAR = "ARITH_AE_SIEVE_LIMIT"


def sieve_capacity() -> int:
    """Largest sieve limit this process will agree to allocate."""
    raw = os.environ.get(CAPACITY_ENV_VAR)
    if raw is None:
        return DEFAULT_CAPACITY
    try:
        cap = int(raw)
    except ValueError as exc:
        raise CapacityError(f"{CAPACITY_ENV_VAR} must be an integer, got {raw!r}") from exc
    if cap < 2:
        raise CapacityError(f"{CAPACITY_ENV_VAR} must be >= 2, got {cap}")
    return cap


@dataclass(frozen=True)
class Factorization:
    """Canonical decomposition m = p1^a1 * ... * pt^at, primes ascending.

    m == 1 is represented by an empty ``parts`` tuple.
    """

    m: int
    parts: tuple[tuple[int, int], ...]

    def reassemble(self) -> int:
        """Multiply the parts back together (exact integer arithmetic)."""
        out = 1
        for p, a in self.parts:
            out *= p**a
        return out


class PrimePower(NamedTuple):
    p: int
    alpha: int
    value: int


class SpfTable:
    """Smallest prime factor of every m in [2, limit].

    ``spf[m]`` divides m, is prime, and no smaller prime divides m.
    Prime and prime-power enumerations are cached on first use; the cache
    is filled during construction of the derived arrays, after which the
    object is effectively immutable.
    """

    def __init__(self, limit: int, spf: np.ndarray):
        self.limit = limit
        self.spf = spf
        self._primes: np.ndarray | None = None
        self._pp_values: np.ndarray | None = None
        self._pp_p: np.ndarray | None = None
        self._pp_alpha: np.ndarray | None = None

    # -- enumeration -------------------------------------------------------

    def _ensure_primes(self) -> np.ndarray:
        if self._primes is None:
            idx = np.arange(self.limit + 1, dtype=np.int64)
            self._primes = idx[2:][self.spf[2:] == idx[2:]]
        return self._primes

    def _ensure_prime_powers(self) -> None:
        if self._pp_values is not None:
            return
        primes = self._ensure_primes()
        values = [primes]
        ps = [primes]
        alphas = [np.ones(len(primes), dtype=np.int64)]
        alpha = 2
        base = primes[primes <= math.isqrt(self.limit)]
        current = base * base
        while len(current):
            values.append(current)
            ps.append(base)
            alphas.append(np.full(len(current), alpha, dtype=np.int64))
            alpha += 1
            keep = current <= self.limit // base
            base = base[keep]
            current = current[keep] * base
        vals = np.concatenate(values)
        order = np.argsort(vals, kind="stable")
        self._pp_values = vals[order]
        self._pp_p = np.concatenate(ps)[order]
        self._pp_alpha = np.concatenate(alphas)[order]

    def primes_up_to(self, x: int) -> np.ndarray:
        """All primes <= x, ascending."""
        if x > self.limit:
            raise RangeError(f"x={x} exceeds sieve limit {self.limit}")
        primes = self._ensure_primes()
        return primes[: np.searchsorted(primes, x, side="right")]

    def prime_powers_up_to(self, x: int) -> list[PrimePower]:
        """All p^alpha <= x, each exactly once, sorted by numeric value."""
        if x > self.limit:
            raise RangeError(f"x={x} exceeds sieve limit {self.limit}")
        self._ensure_prime_powers()
        k = int(np.searchsorted(self._pp_values, x, side="right"))
        return [
            PrimePower(int(p), int(a), int(v))
            for p, a, v in zip(self._pp_p[:k], self._pp_alpha[:k], self._pp_values[:k])
        ]

    # -- factorization -----------------------------------------------------

    def factor(self, m: int) -> Factorization:
        """Canonical factorization of m via repeated SPF division."""
        if not 1 <= m <= self.limit:
            raise RangeError(f"m={m} outside [1, {self.limit}]")
        parts = []
        n = m
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            a = 0
            while n % p == 0:
                n //= p
                a += 1
            parts.append((p, a))
        return Factorization(m, tuple(parts))


def build_spf(limit: int) -> SpfTable:
    """Build the full SPF array for [2, limit].

    Refuses (rather than degrading) when the limit falls outside
    [2, sieve_capacity()]; a segmented fallback is deliberately out of scope.
    """
    cap = sieve_capacity()
    if limit < 2 or limit > cap:
        raise CapacityError(f"sieve limit must be in [2, {cap}], got {limit}")
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    # untouched entries >= 2 have no prime factor <= sqrt(limit): they are prime
    idx = np.nonzero(spf[2:] == 0)[0] + 2
    spf[idx] = idx
    return SpfTable(limit, spf)
