"""Exact combinatorial oracle commands."""

import logging
from typing import Any, Dict, Optional

import click
from rich.console import Console

from ..core.config import Config
from ..core.exceptions import ValidationError
from ..core.manifest import RunRecorder
from ..core.utils import get_detailed_timestamp, parse_int_list, print_output
from ..engine.exact import (
    DEFAULT_C0,
    DEFAULT_MAX_TABLE_BYTES,
    TableCache,
    WeightFamily,
    anticonc_sup,
    clt_calibration,
    clt_covariance,
    double_root_prob_exact,
    separation_check,
    smallball_prob,
)
from ..models.reports import SeparationVariant

logger = logging.getLogger(__name__)
console = Console()

max_bytes_option = click.option(
    "--max-table-bytes",
    type=int,
    default=DEFAULT_MAX_TABLE_BYTES,
    show_default=True,
    help="Memory guard for exact tables",
)
out_option = click.option("--out", help="Output directory (default: ./exact_<name>_<timestamp>)")


def _emit(ctx: click.Context, name: str, out: Optional[str], data: Any, title: str) -> None:
    """Write ``<name>.json`` plus a manifest and print the result."""
    config: Config = ctx.obj["config"]
    out = out or f"./exact_{name}_{get_detailed_timestamp()}"
    recorder = RunRecorder(f"exact {name}", out, ctx.obj["argv"], ctx.params)
    recorder.write_json(f"{name}.json", data)
    recorder.finish()
    print_output(data, output_format=config.output_format, title=title)
    console.print(f"\n[green]Results saved to:[/green] {recorder.out_dir}")


@click.group(name="exact")
def exact_group():
    """Exact oracles: double roots at +-1, anti-concentration, small balls, separation."""
    pass


@exact_group.command(name="double-root")
@click.option("--n", "n", type=int, required=True, help="Degree")
@click.option("--N", "N", type=int, default=1, show_default=True, help="Type I parameter")
@max_bytes_option
@out_option
@click.pass_context
def double_root(ctx: click.Context, n: int, N: int, max_table_bytes: int, out: Optional[str]) -> None:
    """Exact probabilities of a double root at 1, at -1 and at either."""
    result = double_root_prob_exact(n, N, max_table_bytes)
    _emit(ctx, "double_root", out, result, f"Double roots at +-1 (n={n}, N={N})")


@exact_group.command(name="anticonc")
@click.option("--n", "n", type=int, required=True, help="Degree")
@click.option("--N", "N", type=int, default=1, show_default=True, help="Type I parameter")
@click.option(
    "--weights",
    type=click.Choice([w.value for w in WeightFamily]),
    default=WeightFamily.U.value,
    show_default=True,
    help="Weight family paired with the coefficients",
)
@click.option("--cache/--no-cache", default=True, help="Reuse tables from the data directory")
@max_bytes_option
@out_option
@click.pass_context
def anticonc(
    ctx: click.Context,
    n: int,
    N: int,
    weights: str,
    cache: bool,
    max_table_bytes: int,
    out: Optional[str],
) -> None:
    """Largest point mass of the pair of weighted coefficient sums."""
    config: Config = ctx.obj["config"]
    table_cache = TableCache(config.get_data_dir()) if cache else None
    sup = anticonc_sup(n, N, weights, table_cache, max_table_bytes)
    data: Dict[str, Any] = {
        "n": n,
        "N": N,
        "weights": weights,
        "sup": sup,
        "n_squared_sup": sup * n * n,
    }
    _emit(ctx, "anticonc", out, data, f"Anti-concentration (n={n}, N={N}, {weights})")


@exact_group.command(name="small-ball")
@click.option("--n", "n", type=int, required=True, help="Degree")
@click.option("--N", "N", type=int, default=1, show_default=True, help="Type I parameter")
@click.option("--x", "x", required=True, help="Evaluation point as p/q")
@click.option("--delta", required=True, help="Window half-width as p/q")
@out_option
@click.pass_context
def small_ball(ctx: click.Context, n: int, N: int, x: str, delta: str, out: Optional[str]) -> None:
    """Exact P(|P_n(x)| <= delta) by meet-in-the-middle counting."""
    prob = smallball_prob(n, N, x, delta)
    data = {"n": n, "N": N, "x": x, "delta": delta, "probability": prob}
    _emit(ctx, "small_ball", out, data, f"Small-ball probability (n={n}, x={x})")


@exact_group.command(name="separation")
@click.option(
    "--variant",
    type=click.Choice([v.value for v in SeparationVariant]),
    required=True,
    help="Value set to check",
)
@click.option("--x", "x", required=True, help="Base point as p/q")
@click.option("--N", "N", type=int, default=1, show_default=True, help="Type I parameter")
@click.option("--k", "k", type=int, required=True, help="Number of lacunary terms")
@click.option("--ell", type=int, help="Gap exponent (default: the smallest admissible)")
@click.option("--c0", default=str(DEFAULT_C0), show_default=True, help="Width of the claim2 window")
@out_option
@click.pass_context
def separation(
    ctx: click.Context,
    variant: str,
    x: str,
    N: int,
    k: int,
    ell: Optional[int],
    c0: str,
    out: Optional[str],
) -> None:
    """Exhaustive minimum gap of a lacunary value set against its claimed radius."""
    result = separation_check(variant, x, N, k, ell, c0)
    _emit(ctx, "separation", out, result, f"Separation check ({variant}, x={x}, k={k})")
    if not result.passed:
        console.print(f"[yellow]Not separated:[/yellow] {result.reason}")


@exact_group.command(name="clt-calibrate")
@click.option("--n", "ns", required=True, help="Degrees, e.g. 3,7,11 or 39..199")
@click.option("--N", "N", type=int, default=1, show_default=True, help="Type I parameter")
@click.option(
    "--admissible-only",
    is_flag=True,
    help="For N=1 keep only degrees with 4 | (n+1)",
)
@click.option("--workers", "--threads", "workers", type=int, help="Worker threads")
@max_bytes_option
@out_option
@click.pass_context
def clt_calibrate(
    ctx: click.Context,
    ns: str,
    N: int,
    admissible_only: bool,
    workers: Optional[int],
    max_table_bytes: int,
    out: Optional[str],
) -> None:
    """Exact p1 against the local-limit approximation, with ratios."""
    config: Config = ctx.obj["config"]
    degrees = parse_int_list(ns)
    if admissible_only and N == 1:
        degrees = [n for n in degrees if (n + 1) % 4 == 0]
    if not degrees:
        raise ValidationError("no admissible degrees left", "n")
    # an infeasible degree raises InfeasibleError with its certificate
    rows = clt_calibration(degrees, N, max_table_bytes, workers or config.workers)
    data = [
        {
            **row.model_dump(),
            "covariance": clt_covariance(row.n)[:3],
            "determinant": clt_covariance(row.n)[3],
        }
        for row in rows
    ]
    _emit(ctx, "clt_calibration", out, data, f"Local-limit calibration (N={N})")
