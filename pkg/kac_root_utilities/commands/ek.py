"""Gaussian expected root count command."""

import logging
from typing import Optional

import click
from rich.console import Console

from ..core.config import Config
from ..core.exceptions import ValidationError
from ..core.manifest import RunRecorder
from ..core.utils import get_detailed_timestamp, parse_int_list, parse_interval, print_output
from ..engine.ekq import DEFAULT_TOLERANCE, ek_limit_tail, ek_sweep

logger = logging.getLogger(__name__)
console = Console()

EK_COLUMNS = ["n", "expected", "residual", "quad_error"]


@click.command(name="ek")
@click.option("--n", "n", type=int, help="Single degree")
@click.option("--n-sweep", help="Comma list of degrees, e.g. 100,1000,1e4 or 2^4..2^10")
@click.option("--interval", help="Integrate over 'a,b' instead of the whole line (inf allowed)")
@click.option(
    "--tolerance",
    type=float,
    default=DEFAULT_TOLERANCE,
    show_default=True,
    help="Absolute quadrature tolerance",
)
@click.option(
    "--c0",
    type=float,
    help="Also report the near-one tail split at 1 - 1/C0 of the limiting constant",
)
@click.option("--workers", "--threads", "workers", type=int, help="Worker threads")
@click.option("--out", help="Output directory (default: ./ek_<timestamp>)")
@click.pass_context
def ek(
    ctx: click.Context,
    n: Optional[int],
    n_sweep: Optional[str],
    interval: Optional[str],
    tolerance: float,
    c0: Optional[float],
    workers: Optional[int],
    out: Optional[str],
) -> None:
    """Expected number of real zeros for Gaussian coefficients.

    Writes ek.csv with columns n, expected, residual, quad_error.
    """
    config: Config = ctx.obj["config"]
    if (n is None) == (n_sweep is None):
        raise click.UsageError("give exactly one of --n and --n-sweep")
    degrees = [n] if n is not None else parse_int_list(n_sweep)
    if any(d < 1 for d in degrees):
        raise ValidationError("degrees must be at least 1", "n")
    bounds = parse_interval(interval) if interval else None

    out = out or f"./ek_{get_detailed_timestamp()}"
    recorder = RunRecorder("ek", out, ctx.obj["argv"], ctx.params)
    rows = ek_sweep(degrees, bounds, tolerance, workers or config.workers)
    data = [row.model_dump() for row in rows]
    recorder.write_csv("ek.csv", data, EK_COLUMNS)
    if c0 is not None:
        integral, tail = ek_limit_tail(c0)
        recorder.write_json("tail.json", {"C0": c0, "integral": integral, "tail": tail})
    recorder.finish()

    print_output(data, output_format=config.output_format, title="Gaussian expected roots")
    if c0 is not None:
        console.print(f"Tail at C0={c0}: integral {integral:.10f}, remainder {tail:.10f}")
    console.print(f"\n[green]Results saved to:[/green] {recorder.out_dir}")
