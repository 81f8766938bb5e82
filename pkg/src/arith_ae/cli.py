"""Command-line front end: a thin client over the pipeline handlers.

By default commands run in-process; with --server they POST the same
request to a running service and render the response identically, so the
bytes written do not depend on which path served them.

Exit codes: 0 success, 2 usage or argument problems, 3 capacity exceeded,
4 internal invariant violation.
"""

from __future__ import annotations

import sys
from typing import Callable, TypeVar

import click
from pydantic import BaseModel, ValidationError

from . import pipelines
from .errors import ArithAEError, CapacityError, InternalInvariantError
from .schemas import (
    ClassifyRequest,
    ClassifyResponse,
    ConcentrationRequest,
    ConcentrationResponse,
    PrimesumsRequest,
    PrimesumsResponse,
    StatsRequest,
    StatsResponse,
)

M = TypeVar("M", bound=BaseModel)

EXIT_USAGE = 2
EXIT_CAPACITY = 3
EXIT_INTERNAL = 4


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _post(server: str, path: str, req: BaseModel, model: type[M]) -> M:
    import httpx

    try:
        resp = httpx.post(
            server.rstrip("/") + path, json=req.model_dump(mode="json"), timeout=600.0
        )
    except httpx.HTTPError as exc:
        _fail(f"cannot reach server {server}: {exc}", EXIT_USAGE)
    if resp.status_code == 200:
        return model.model_validate(resp.json())
    try:
        body = resp.json()
        message = f"{body.get('error', 'error')}: {body.get('message', resp.text)}"
    except ValueError:
        message = resp.text
    if resp.status_code == 413:
        _fail(message, EXIT_CAPACITY)
    if resp.status_code == 500:
        _fail(message, EXIT_INTERNAL)
    _fail(message, EXIT_USAGE)
    raise AssertionError("unreachable")


def _execute(
    req: BaseModel,
    local: Callable[[BaseModel], M],
    server: str | None,
    path: str,
    model: type[M],
) -> M:
    if server:
        return _post(server, path, req, model)
    try:
        return local(req)
    except CapacityError as exc:
        _fail(str(exc), EXIT_CAPACITY)
    except InternalInvariantError as exc:
        _fail(str(exc), EXIT_INTERNAL)
    except ArithAEError as exc:
        _fail(str(exc), EXIT_USAGE)
    raise AssertionError("unreachable")


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _render(resp: BaseModel, fmt: str, csv_fn: Callable[[M], str]) -> str:
    if fmt == "json":
        return resp.model_dump_json(indent=2) + "\n"
    return csv_fn(resp)


def _build(model: type[M], **kwargs) -> M:
    try:
        return model(**kwargs)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        _fail(f"invalid {loc}: {first['msg']}", EXIT_USAGE)
    raise AssertionError("unreachable")


def _parse_b_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        _fail(f"bad --b list {text!r}", EXIT_USAGE)
    if not values:
        _fail("--b list is empty", EXIT_USAGE)
    return values


server_option = click.option(
    "--server", default=None, help="Base URL of a running service; compute there instead."
)
format_option = click.option(
    "--format", "fmt", type=click.Choice(["csv", "json"]), default="csv", show_default=True
)
out_option = click.option("--out", default=None, help="Write output to this path.")


@click.group()
@click.version_option(package_name="arith-ae")
def main() -> None:
    """Empirical vs predicted behavior of additive and multiplicative arithmetic functions."""


@main.command()
@click.option("--fn", required=True, help="Function id, e.g. small_omega or scaled_totient:u=1.")
@click.option("--n", default=1_000_000, show_default=True, type=int)
@click.option("--grid", default="geometric", show_default=True, help="geometric or list:<csv>.")
@click.option("--b", default=2.0, show_default=True, type=float, help="Chebyshev radius multiplier.")
@click.option("--xi", default=0.25, show_default=True, type=float, help="Envelope exponent.")
@click.option(
    "--weighting",
    type=click.Choice(["plain", "exactdiv"]),
    default="plain",
    show_default=True,
)
@click.option("--workers", default=1, show_default=True, type=int)
@click.option("--chunk", default=None, type=int, help="Reduction chunk size.")
@format_option
@out_option
@server_option
def stats(fn, n, grid, b, xi, weighting, workers, chunk, fmt, out, server) -> None:
    """Per-checkpoint empirical moments beside the predicted means and variances."""
    req = _build(
        StatsRequest,
        fn=fn, n=n, grid=grid, b=b, xi=xi, weighting=weighting,
        workers=workers, chunk=chunk,
    )
    resp = _execute(req, pipelines.run_stats, server, "/stats", StatsResponse)
    _emit(_render(resp, fmt, pipelines.stats_csv), out)


@main.command()
@click.option("--law", type=click.Choice(["lnp", "ln2p", "recip"]), required=True)
@click.option("--n", default=1_000_000, show_default=True, type=int)
@click.option("--grid", default="geometric", show_default=True)
@click.option("--powers", is_flag=True, help="Sum over prime powers instead of primes.")
@format_option
@out_option
@server_option
def primesums(law, n, grid, powers, fmt, out, server) -> None:
    """Mertens-type sums against their leading terms, with drift and stabilization."""
    req = _build(PrimesumsRequest, law=law, n=n, grid=grid, powers=powers)
    resp = _execute(req, pipelines.run_primesums, server, "/primesums", PrimesumsResponse)
    _emit(_render(resp, fmt, pipelines.primesums_csv), out)


@main.command()
@click.option("--fn", required=True)
@click.option("--n", default=1_000_000, show_default=True, type=int)
@click.option("--grid", default="geometric", show_default=True)
@click.option("--xi", default=0.25, show_default=True, type=float)
@click.option(
    "--weighting",
    type=click.Choice(["plain", "exactdiv"]),
    default="plain",
    show_default=True,
)
@click.option("--workers", default=1, show_default=True, type=int)
@click.option("--chunk", default=None, type=int)
@out_option
@server_option
def classify(fn, n, grid, xi, weighting, workers, chunk, out, server) -> None:
    """Class T / class M verdict with the almost-everywhere asymptotic statement (JSON)."""
    req = _build(
        ClassifyRequest,
        fn=fn, n=n, grid=grid, xi=xi, weighting=weighting, workers=workers, chunk=chunk,
    )
    resp = _execute(req, pipelines.run_classify, server, "/classify", ClassifyResponse)
    _emit(resp.model_dump_json(indent=2) + "\n", out)


@main.command()
@click.option("--fn", required=True)
@click.option("--n", default=1_000_000, show_default=True, type=int)
@click.option("--grid", default="geometric", show_default=True)
@click.option("--b", default="1,2,3", show_default=True, help="Comma-separated multipliers.")
@click.option("--workers", default=1, show_default=True, type=int)
@click.option("--chunk", default=None, type=int)
@format_option
@out_option
@server_option
def concentration(fn, n, grid, b, workers, chunk, fmt, out, server) -> None:
    """Observed concentration fractions per (n, b) beside the Chebyshev bounds."""
    req = _build(
        ConcentrationRequest,
        fn=fn, n=n, grid=grid, b=_parse_b_list(b), workers=workers, chunk=chunk,
    )
    resp = _execute(
        req, pipelines.run_concentration, server, "/concentration", ConcentrationResponse
    )
    _emit(_render(resp, fmt, pipelines.concentration_csv), out)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .webapp import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
