"""Handlers wiring sieve, functions, empirical, predictor, and classifier.

Every handler takes a request model and returns a response model; the HTTP
routes and the CLI both call these, so output is identical either way.
The sieve table is the one expensive shared artifact, so a process-wide
cache keeps the largest table built so far and serves prefixes of it.

Multiplicative functions are reported through their logarithmic reduction:
rows describe ln g(m) against the additive-side predictions (the response
carries log_reduced = true).
"""

from __future__ import annotations

import math
import threading

from . import empirical, functions, predictor
from .classifier import ClassifyOptions, asymptotic_statement, classify, default_checkpoints
from .errors import ArgumentError, InternalInvariantError
from .functions import FunctionSpec, Mode, get_builtin, log_transform
from .schemas import (
    CertificateOut,
    ClassifyRequest,
    ClassifyResponse,
    CompareRow,
    ConcentrationRequest,
    ConcentrationResponse,
    ConcentrationRow,
    DriftRowOut,
    FunctionEntry,
    FunctionsResponse,
    HealthResponse,
    PredictionsOut,
    PrimesumsRequest,
    PrimesumsResponse,
    ProbeOut,
    StatementOut,
    StatsRequest,
    StatsResponse,
)
from .sieve import SpfTable, build_spf, sieve_capacity


class SieveCache:
    """Largest table built so far, shared across requests behind a lock."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._table: SpfTable | None = None

    def get(self, limit: int) -> SpfTable:
        want = max(limit, 2)
        with self._lock:
            if self._table is None or self._table.limit < want:
                self._table = build_spf(want)
            return self._table

    @property
    def cached_limit(self) -> int | None:
        with self._lock:
            return self._table.limit if self._table is not None else None


CACHE = SieveCache()


def parse_grid(grid: str, n: int) -> list[int]:
    """'geometric' decades up to n, or explicit 'list:<csv>' within [100, n]."""
    if grid == "geometric":
        points = [c for c in default_checkpoints(n) if c <= n]
        return points or [n]
    if grid.startswith("list:"):
        try:
            points = [int(tok) for tok in grid[5:].split(",") if tok.strip()]
        except ValueError as exc:
            raise ArgumentError(f"bad grid list {grid!r}") from exc
        if not points:
            raise ArgumentError("grid list is empty")
        if any(b <= a for a, b in zip(points, points[1:])):
            raise ArgumentError(f"grid must be strictly ascending, got {points}")
        if points[0] < 100 or points[-1] > n:
            raise ArgumentError(f"grid entries must lie in [100, {n}], got {points}")
        return points
    raise ArgumentError(f"grid must be 'geometric' or 'list:<csv>', got {grid!r}")


def _additive_view(spec: FunctionSpec) -> tuple[FunctionSpec, bool]:
    if spec.mode is Mode.MULTIPLICATIVE:
        return log_transform(spec), True
    return spec, False


def _closed_form_reference(fn_id: str, x: int) -> float:
    """Leading term the empirical mean is compared against in mean_drift.

    ln ln for the prime-counting family, ln for the totient-logarithm
    family (scaled by u for the scaled totient); functions with bounded
    mean, and unknown ids, compare against 0 so the column stays finite.
    """
    if fn_id in ("big_omega", "small_omega", "omega_plus_log"):
        return math.log(math.log(x)) if x > 2 else 0.0
    if fn_id in ("log_phi", "log_p_minus_1"):
        return math.log(x)
    if fn_id.startswith("scaled_totient"):
        # recover u from the kernel itself: k(2,2)/k(2,1) = 2^u
        spec = functions.get_builtin(fn_id)
        u = math.log2(spec.kernel_at(2, 2) / spec.kernel_at(2, 1))
        return u * math.log(x)
    return 0.0


def run_stats(req: StatsRequest) -> StatsResponse:
    spec = get_builtin(req.fn)
    additive, log_reduced = _additive_view(spec)
    grid = parse_grid(req.grid, req.n)
    table = CACHE.get(req.n)
    kw: dict = {"workers": req.workers}
    if req.chunk:
        kw["chunk"] = req.chunk
    values = empirical.evaluate_range(additive, table, req.n)
    summaries = empirical.checkpoint_moments(additive, grid, table, values=values, **kw)
    rows = []
    for c, s in zip(grid, summaries):
        pt = predictor.prediction_table(additive, c, table, req.weighting)
        conc = empirical.concentration(additive, c, req.b, table, values=values, **kw)
        if conc.inside_fraction < conc.chebyshev_bound:
            raise InternalInvariantError(
                f"Chebyshev violated at n={c}: {conc.inside_fraction} < {conc.chebyshev_bound}"
            )
        envelope = (math.log(math.log(c)) ** req.xi if c > 2 else 1.0) * math.sqrt(
            s.variance
        )
        env = empirical.envelope_density(
            additive, c, s.mean, max(envelope, 1e-300), table, values=values
        )
        rows.append(
            CompareRow(
                n=c,
                mean=s.mean,
                variance=s.variance,
                a_n=pt.a_n,
                a_n_star=pt.a_n_star,
                d_n=pt.d_n_heuristic,
                d_n_star=pt.d_n_star_heuristic,
                mean_drift=s.mean - _closed_form_reference(req.fn, c),
                cheb_fraction=conc.inside_fraction,
                env_violation=env.violating_fraction,
            )
        )
    return StatsResponse(
        fn=req.fn,
        log_reduced=log_reduced,
        weighting=req.weighting,
        b=req.b,
        xi=req.xi,
        rows=rows,
    )


def run_primesums(req: PrimesumsRequest) -> PrimesumsResponse:
    grid = parse_grid(req.grid, req.n)
    grid = [x for x in grid if x >= 3]
    if not grid:
        raise ArgumentError(f"no grid points >= 3 below {req.n}")
    table = CACHE.get(req.n)
    rows = []
    prev_drift: float | None = None
    for x in grid:
        dr = predictor.reference_law(req.law, x, req.powers, table)
        stab = 0.0 if prev_drift is None else dr.drift - prev_drift
        prev_drift = dr.drift
        rows.append(
            DriftRowOut(
                x=x, sum=dr.sum, reference=dr.reference, drift=dr.drift, stabilization=stab
            )
        )
    return PrimesumsResponse(law=req.law, powers=req.powers, rows=rows)


def run_classify(req: ClassifyRequest) -> ClassifyResponse:
    spec = get_builtin(req.fn)
    grid = parse_grid(req.grid, req.n)
    table = CACHE.get(req.n)
    opts = ClassifyOptions(
        weighting=req.weighting,
        xi=req.xi,
        checkpoints=tuple(grid),
        chunk=req.chunk,
        workers=req.workers,
    )
    verdict = classify(spec, req.n, table, opts)
    statement = asymptotic_statement(verdict)
    cert = verdict.certificate
    return ClassifyResponse(
        fn=req.fn,
        mode=verdict.mode.value,
        strong=verdict.strong,
        n=verdict.n,
        xi=verdict.xi,
        class_t=verdict.class_t.value,
        class_m=verdict.class_m.value,
        assertions=sorted(a.value for a in verdict.applicable_assertions),
        regime=verdict.regime.value,
        narrative=verdict.narrative,
        certificate=CertificateOut(
            bound_kind=cert.bound_kind.value,
            constant=None if math.isnan(cert.constant) else cert.constant,
            checked_up_to=cert.checked_up_to,
        ),
        checkpoints=list(verdict.checkpoints),
        predictions=(
            PredictionsOut(
                n=verdict.predictions.n,
                a_n=verdict.predictions.a_n,
                a_n_star=verdict.predictions.a_n_star,
                d_n=verdict.predictions.d_n_heuristic,
                d_n_star=verdict.predictions.d_n_star_heuristic,
                weighting=verdict.predictions.weighting,
            )
            if verdict.predictions is not None
            else None
        ),
        empirical_mean=verdict.empirical_mean,
        empirical_variance=verdict.empirical_variance,
        kernel_tail=verdict.kernel_tail,
        kernel_all_zero=verdict.kernel_all_zero,
        probe=(
            ProbeOut(
                checkpoints=list(verdict.probe.checkpoints),
                partial_sums=list(verdict.probe.partial_sums),
                rho=verdict.probe.rho,
                verdict=verdict.probe.verdict.value,
            )
            if verdict.probe is not None
            else None
        ),
        ratio_track=list(verdict.ratio_track),
        statement=StatementOut(
            form_id=statement.form_id,
            n=statement.n,
            xi=statement.xi,
            leading_term=statement.leading_term,
            error_envelope=statement.error_envelope,
            exponentiated=statement.exponentiated,
            text=statement.text,
        ),
    )


def run_concentration(req: ConcentrationRequest) -> ConcentrationResponse:
    spec = get_builtin(req.fn)
    additive, log_reduced = _additive_view(spec)
    grid = parse_grid(req.grid, req.n)
    table = CACHE.get(req.n)
    kw: dict = {"workers": req.workers}
    if req.chunk:
        kw["chunk"] = req.chunk
    values = empirical.evaluate_range(additive, table, req.n)
    rows = []
    for c in grid:
        for b in req.b:
            conc = empirical.concentration(additive, c, b, table, values=values, **kw)
            if b >= 1.0 and conc.inside_fraction < conc.chebyshev_bound:
                raise InternalInvariantError(
                    f"Chebyshev violated at n={c}, b={b}: "
                    f"{conc.inside_fraction} < {conc.chebyshev_bound}"
                )
            rows.append(
                ConcentrationRow(
                    n=c,
                    b=b,
                    radius=conc.radius,
                    inside_fraction=conc.inside_fraction,
                    chebyshev_bound=conc.chebyshev_bound,
                )
            )
    return ConcentrationResponse(fn=req.fn, log_reduced=log_reduced, rows=rows)


def run_functions() -> FunctionsResponse:
    entries = []
    for fn_id, factory in sorted(functions.BUILTIN_FACTORIES.items()):
        spec = factory()
        entries.append(
            FunctionEntry(
                id=fn_id,
                mode=spec.mode.value,
                strong=spec.strong,
                kernel=spec.kernel.label,
                summary=(factory.__doc__ or "").strip(),
            )
        )
    spec = functions.scaled_totient(1.0)
    entries.append(
        FunctionEntry(
            id="scaled_totient:u=<real>",
            mode=spec.mode.value,
            strong=spec.strong,
            kernel=spec.kernel.label,
            summary=(functions.scaled_totient.__doc__ or "").strip(),
        )
    )
    return FunctionsResponse(functions=entries)


def run_health() -> HealthResponse:
    return HealthResponse(
        status="ok", capacity=sieve_capacity(), cached_limit=CACHE.cached_limit
    )


# ---------------------------------------------------------------------------
# Text rendering (shared by CLI local and client modes)
# ---------------------------------------------------------------------------

STATS_HEADER = "n,mean,variance,a_n,a_n_star,d_n,d_n_star,mean_drift,cheb_fraction,env_violation"


def _g(x: float) -> str:
    return f"{x:.12g}"


def stats_csv(resp: StatsResponse) -> str:
    lines = [STATS_HEADER]
    for r in resp.rows:
        lines.append(
            ",".join(
                [
                    str(r.n),
                    _g(r.mean),
                    _g(r.variance),
                    _g(r.a_n),
                    _g(r.a_n_star),
                    _g(r.d_n),
                    _g(r.d_n_star),
                    _g(r.mean_drift),
                    _g(r.cheb_fraction),
                    _g(r.env_violation),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def primesums_csv(resp: PrimesumsResponse) -> str:
    lines = ["x,sum,reference,drift,stabilization"]
    for r in resp.rows:
        lines.append(
            ",".join(
                [str(r.x), _g(r.sum), _g(r.reference), _g(r.drift), _g(r.stabilization)]
            )
        )
    return "\n".join(lines) + "\n"


def concentration_csv(resp: ConcentrationResponse) -> str:
    lines = ["n,b,radius,inside_fraction,chebyshev_bound"]
    for r in resp.rows:
        lines.append(
            ",".join(
                [str(r.n), _g(r.b), _g(r.radius), _g(r.inside_fraction), _g(r.chebyshev_bound)]
            )
        )
    return "\n".join(lines) + "\n"
