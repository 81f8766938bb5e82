"""Exact empirical moments and concentration statistics over m = 1..n.

The probability space is uniform on {1, ..., n}.  Values f(m) are produced
for the whole range at once by sieving prime-power layers into a numpy
array, then reduced in fixed-size chunks.  Each chunk is summed exactly
with math.fsum and chunks are merged in ascending order with Kahan
compensation, so results are bit-reproducible for a fixed chunk size
regardless of worker count, and a checkpoint summary equals a fresh run
stopped at that n.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, EvaluationError, InternalInvariantError, RangeError
from .functions import FunctionSpec, Mode
from .sieve import SpfTable

#: Fixed reduction chunk so sums are reproducible run-to-run.
DEFAULT_CHUNK = 1 << 16


@dataclass(frozen=True)
class MomentSummary:
    n: int
    mean: float
    variance: float
    min: float
    max: float


@dataclass(frozen=True)
class ConcentrationReport:
    n: int
    b: float
    radius: float
    inside_fraction: float
    chebyshev_bound: float


@dataclass(frozen=True)
class TailReport:
    n: int
    b: float
    below_fraction: float
    markov_bound: float


@dataclass(frozen=True)
class EnvelopeDensity:
    n: int
    center: float
    envelope: float
    violating_fraction: float


# ---------------------------------------------------------------------------
# Whole-range evaluation
# ---------------------------------------------------------------------------

def evaluate_range(spec: FunctionSpec, table: SpfTable, n: int) -> np.ndarray:
    """Array v with v[m] = f(m) for 1 <= m <= n; v[0] is unused.

    Additive specs accumulate kernel deltas over prime-power layers so the
    telescoping sum leaves exactly f(p^a) per maximal prime power.  The
    multiplicative analogue multiplies ratios; primes whose kernel hits zero
    at some layer would poison a later ratio's denominator, so those primes
    fall back to an explicit per-exponent assignment.
    """
    if n < 1 or n > table.limit:
        raise RangeError(f"n must be in [1, {table.limit}], got {n}")
    powers = table.prime_powers_up_to(n)
    if spec.mode is Mode.ADDITIVE:
        vals = np.zeros(n + 1, dtype=np.float64)
        for pp in powers:
            if spec.strong and pp.alpha > 1:
                continue
            delta = spec.kernel_at(pp.p, pp.alpha)
            if pp.alpha > 1:
                delta -= spec.kernel_at(pp.p, pp.alpha - 1)
            if delta != 0.0:
                vals[pp.value :: pp.value] += delta
        return vals

    vals = np.ones(n + 1, dtype=np.float64)
    vals[0] = 0.0
    # a prime needs the fallback when some k(p, alpha) with alpha < a_max is 0
    bad: set[int] = set()
    if not spec.strong:
        by_prime: dict[int, int] = {}
        for pp in powers:
            by_prime[pp.p] = max(by_prime.get(pp.p, 1), pp.alpha)
        for p, a_max in by_prime.items():
            for a in range(1, a_max):
                if spec.kernel_at(p, a) == 0.0:
                    bad.add(p)
                    break
    for pp in powers:
        if pp.p in bad:
            continue
        if spec.strong and pp.alpha > 1:
            continue
        ratio = spec.kernel_at(pp.p, pp.alpha)
        if pp.alpha > 1:
            ratio /= spec.kernel_at(pp.p, pp.alpha - 1)
        if ratio != 1.0:
            vals[pp.value :: pp.value] *= ratio
    for p in sorted(bad):
        idx = np.arange(p, n + 1, p, dtype=np.int64)
        mult = np.full(len(idx), spec.kernel_at(p, 1))
        q = p * p
        alpha = 2
        while q <= n:
            mult[idx % q == 0] = spec.kernel_at(p, alpha)
            q *= p
            alpha += 1
        vals[idx] *= mult
    finite = np.isfinite(vals[1:])
    if not finite.all():
        m = int(np.nonzero(~finite)[0][0]) + 1
        raise EvaluationError(f"non-finite value evaluating {spec.name!r} at m={m}")
    return vals


# ---------------------------------------------------------------------------
# Deterministic chunked reduction
# ---------------------------------------------------------------------------

def _kahan_add(total: float, comp: float, x: float) -> tuple[float, float]:
    y = x - comp
    t = total + y
    return t, (t - total) - y


def _chunk_sums(block: np.ndarray) -> tuple[float, float, float, float]:
    data = block.tolist()
    return (
        math.fsum(data),
        math.fsum((block * block).tolist()),
        float(block.min()),
        float(block.max()),
    )


class _Reducer:
    """Kahan-compensated merge of per-chunk exact sums, in chunk order."""

    def __init__(self) -> None:
        self.total = 0.0
        self._tc = 0.0
        self.total_sq = 0.0
        self._sc = 0.0
        self.vmin = math.inf
        self.vmax = -math.inf

    def absorb(self, piece: tuple[float, float, float, float]) -> None:
        s, sq, lo, hi = piece
        self.total, self._tc = _kahan_add(self.total, self._tc, s)
        self.total_sq, self._sc = _kahan_add(self.total_sq, self._sc, sq)
        self.vmin = min(self.vmin, lo)
        self.vmax = max(self.vmax, hi)

    def summary(self, n: int) -> MomentSummary:
        mean = self.total / n
        mean = min(max(mean, self.vmin), self.vmax)
        variance = self.total_sq / n - mean * mean
        if variance < 0.0:
            if variance < -1e-9 * max(1.0, abs(self.total_sq) / n):
                raise InternalInvariantError(
                    f"variance {variance} below rounding tolerance at n={n}"
                )
            variance = 0.0
        return MomentSummary(n=n, mean=mean, variance=variance, min=self.vmin, max=self.vmax)


def _stream_summaries(
    values: np.ndarray,
    stops: list[int],
    chunk: int,
    workers: int,
) -> list[MomentSummary]:
    """Summaries at each stop, reducing over the fixed absolute chunk grid.

    Chunks are [1..c], [c+1..2c], ...; a stop inside a chunk is served by a
    side reduction of the partial block, leaving the running state on whole
    chunks only.  That makes the summary at stop g identical to a fresh run
    over [1..g], which truncates its final chunk at g the same way.
    """
    reducer = _Reducer()
    out: list[MomentSummary] = []
    starts = list(range(1, stops[-1] + 1, chunk))

    def pieces():
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [
                    pool.submit(_chunk_sums, values[lo : min(lo + chunk - 1, stops[-1]) + 1])
                    for lo in starts
                ]
                for lo, fut in zip(starts, futures):
                    yield lo, fut.result()
        else:
            for lo in starts:
                yield lo, _chunk_sums(values[lo : min(lo + chunk - 1, stops[-1]) + 1])

    stop_iter = iter(stops)
    stop = next(stop_iter)
    done = False
    for lo, piece in pieces():
        hi = min(lo + chunk - 1, stops[-1])
        while not done and stop <= hi:
            if stop == hi:
                reducer.absorb(piece)
                out.append(reducer.summary(stop))
                piece = None
            else:
                side = _Reducer()
                side.total, side._tc = reducer.total, reducer._tc
                side.total_sq, side._sc = reducer.total_sq, reducer._sc
                side.vmin, side.vmax = reducer.vmin, reducer.vmax
                side.absorb(_chunk_sums(values[lo : stop + 1]))
                out.append(side.summary(stop))
            nxt = next(stop_iter, None)
            if nxt is None:
                done = True
            else:
                stop = nxt
        if piece is not None:
            reducer.absorb(piece)
    return out


def _resolve_values(
    spec: FunctionSpec, table: SpfTable, n: int, values: np.ndarray | None
) -> np.ndarray:
    if values is None:
        return evaluate_range(spec, table, n)
    if len(values) < n + 1:
        raise ArgumentError(f"precomputed values cover m < {len(values)}, need {n}")
    return values


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def moments(
    spec: FunctionSpec,
    n: int,
    table: SpfTable,
    *,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
    values: np.ndarray | None = None,
) -> MomentSummary:
    if n < 1:
        raise RangeError(f"n must be >= 1, got {n}")
    if chunk < 1:
        raise ArgumentError(f"chunk must be >= 1, got {chunk}")
    vals = _resolve_values(spec, table, n, values)
    return _stream_summaries(vals, [n], chunk, workers)[0]


def checkpoint_moments(
    spec: FunctionSpec,
    grid: list[int],
    table: SpfTable,
    *,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
    values: np.ndarray | None = None,
) -> list[MomentSummary]:
    if not grid:
        raise ArgumentError("grid must be non-empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ArgumentError(f"grid must be strictly ascending, got {grid}")
    if grid[0] < 1:
        raise RangeError(f"grid entries must be >= 1, got {grid[0]}")
    if chunk < 1:
        raise ArgumentError(f"chunk must be >= 1, got {chunk}")
    vals = _resolve_values(spec, table, grid[-1], values)
    return _stream_summaries(vals, list(grid), chunk, workers)


def concentration(
    spec: FunctionSpec,
    n: int,
    b: float,
    table: SpfTable,
    *,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
    values: np.ndarray | None = None,
) -> ConcentrationReport:
    if not b > 0:
        raise ArgumentError(f"b must be > 0, got {b}")
    vals = _resolve_values(spec, table, n, values)
    summary = moments(spec, n, table, chunk=chunk, workers=workers, values=vals)
    radius = b * math.sqrt(summary.variance)
    inside = int(np.count_nonzero(np.abs(vals[1 : n + 1] - summary.mean) <= radius))
    return ConcentrationReport(
        n=n,
        b=b,
        radius=radius,
        inside_fraction=inside / n,
        chebyshev_bound=1.0 - 1.0 / (b * b),
    )


def markov_tail(
    spec: FunctionSpec,
    n: int,
    b: float,
    table: SpfTable,
    *,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
    values: np.ndarray | None = None,
) -> TailReport:
    if not b > 0:
        raise ArgumentError(f"b must be > 0, got {b}")
    vals = _resolve_values(spec, table, n, values)
    summary = moments(spec, n, table, chunk=chunk, workers=workers, values=vals)
    if summary.min < 0.0:
        m = int(np.nonzero(vals[1 : n + 1] < 0.0)[0][0]) + 1
        raise ArgumentError(
            f"markov_tail needs a nonnegative function; {spec.name!r} is {vals[m]} at m={m}"
        )
    below = int(np.count_nonzero(vals[1 : n + 1] <= b))
    return TailReport(n=n, b=b, below_fraction=below / n, markov_bound=1.0 - summary.mean / b)


def envelope_density(
    spec: FunctionSpec,
    n: int,
    center: float,
    envelope: float,
    table: SpfTable,
    *,
    values: np.ndarray | None = None,
) -> EnvelopeDensity:
    if not envelope > 0:
        raise ArgumentError(f"envelope must be > 0, got {envelope}")
    vals = _resolve_values(spec, table, n, values)
    violating = int(np.count_nonzero(np.abs(vals[1 : n + 1] - center) > envelope))
    return EnvelopeDensity(
        n=n, center=center, envelope=envelope, violating_fraction=violating / n
    )
