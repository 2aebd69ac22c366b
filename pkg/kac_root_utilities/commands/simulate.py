"""Monte Carlo root statistics command."""

import logging
import math
from typing import Optional, Tuple

import click
from pydantic import ValidationError as PydanticValidationError
from rich.console import Console

from ..core.config import Config
from ..core.exceptions import ValidationError
from ..core.manifest import RunRecorder
from ..core.utils import (
    get_detailed_timestamp,
    parse_int_list,
    parse_interval,
    parse_rational,
    print_output,
)
from ..engine.mc import residual_curve, run_simulation
from ..engine.polycore import parse_atom
from ..models.reports import COUNT_METHODS, STATISTICS, SimConfig

logger = logging.getLogger(__name__)
console = Console()

SUMMARY_COLUMNS = [
    "n",
    "trials",
    "mean",
    "variance",
    "residual",
    "ci_half_width",
    "near_double_freq",
    "min_gap_p01",
    "min_gap_p50",
]
VARIANCE_COLUMNS = ["n", "trials", "variance", "ratio", "jackknife_error", "target"]
CURVE_COLUMNS = ["n", "mean", "residual", "ci_half_width"]


def _float_interval(bounds) -> Tuple[float, float]:
    lo, hi = bounds
    return (-math.inf if lo is None else float(lo), math.inf if hi is None else float(hi))


@click.command(name="simulate")
@click.option(
    "--atom",
    default="bernoulli",
    show_default=True,
    help="Coefficient law: bernoulli, typeI:N, gaussian, uniform or custom:v:p,...",
)
@click.option(
    "--degrees",
    required=True,
    help="Degrees as a comma list (4,8,1e3) or a power range (2^4..2^12)",
)
@click.option("--trials", type=int, default=1000, show_default=True, help="Trials per degree")
@click.option("--seed", type=int, help="Master seed (default: from config)")
@click.option(
    "--stat",
    "stats",
    type=click.Choice(STATISTICS),
    multiple=True,
    help="Statistic to collect (repeatable; default: mean and residual)",
)
@click.option("--epsilon", default="1/8", show_default=True, help="Exponent slack in I0")
@click.option("--B", "B", type=float, default=16.0, show_default=True, help="Near-double exponent")
@click.option("--interval", help="Count roots only in the open interval 'a,b'")
@click.option(
    "--root-method",
    type=click.Choice(COUNT_METHODS),
    default="auto",
    show_default=True,
    help="Integer coefficients: Sturm (auto, sturm) or a certified scan with Sturm fallback",
)
@click.option(
    "--workers",
    "--threads",
    "workers",
    type=int,
    help="Worker threads (default: from config)",
)
@click.option(
    "--out",
    help="Output directory (default: ./simulate_<timestamp>)",
)
@click.pass_context
def simulate(
    ctx: click.Context,
    atom: str,
    degrees: str,
    trials: int,
    seed: Optional[int],
    stats: Tuple[str, ...],
    epsilon: str,
    B: float,
    interval: Optional[str],
    root_method: str,
    workers: Optional[int],
    out: Optional[str],
) -> None:
    """Estimate E N_n, its residual and optional gap and near-double rates.

    Writes summary.csv (and variance.csv or residual_curve.csv for the
    variance and residual statistics) plus manifest.json.
    """
    config: Config = ctx.obj["config"]
    seed = config.default_seed if seed is None else seed
    bounds = parse_interval(interval) if interval else None
    try:
        cfg = SimConfig(
            atom=parse_atom(atom),
            degrees=parse_int_list(degrees),
            trials=trials,
            seed=seed,
            interval=_float_interval(bounds) if bounds else None,
            B=B,
            epsilon=parse_rational(epsilon),
            stats=set(stats) or {"mean", "residual"},
            workers=workers or config.workers,
            root_method=root_method,
        )
    except PydanticValidationError as e:
        raise ValidationError(str(e), "simulate")

    out = out or f"./simulate_{get_detailed_timestamp()}"
    recorder = RunRecorder("simulate", out, ctx.obj["argv"], ctx.params, seed=seed)

    summary, ratios = run_simulation(cfg, show_progress=config.verbose)
    rows = [row.model_dump() for row in summary.rows]
    recorder.write_csv("summary.csv", rows, SUMMARY_COLUMNS)
    if ratios is not None:
        recorder.write_csv("variance.csv", [r.model_dump() for r in ratios], VARIANCE_COLUMNS)
    if "residual" in cfg.stats:
        curve = residual_curve(summary)
        recorder.write_csv("residual_curve.csv", curve.to_dict("records"), CURVE_COLUMNS)
    recorder.finish()

    print_output(
        [{k: row[k] for k in SUMMARY_COLUMNS} for row in rows],
        output_format=config.output_format,
        title=f"Root statistics for {summary.atom} (seed {seed})",
    )
    console.print(f"\n[green]Results saved to:[/green] {recorder.out_dir}")
