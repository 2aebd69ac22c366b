"""Monte Carlo experiments built on the root counter."""

import logging
from typing import Optional

import click
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
from ..engine.mc import (
    double_root_mc,
    edge_moment_growth,
    exact_expected_roots,
    near_one_universality,
    truncation_compare,
)
from ..engine.polycore import parse_atom

logger = logging.getLogger(__name__)
console = Console()

EDGE_COLUMNS = [
    "n",
    "k",
    "trials",
    "median",
    "scaled_median",
    "second_moment",
    "second_moment_se",
    "exact_second_moment",
]

trials_option = click.option("--trials", type=int, default=1000, show_default=True, help="Trials")
seed_option = click.option("--seed", type=int, help="Master seed (default: from config)")
workers_option = click.option("--workers", "--threads", "workers", type=int, help="Worker threads")
out_option = click.option("--out", help="Output directory (default: ./experiment_<name>_<timestamp>)")


def _recorder(ctx: click.Context, name: str, out: Optional[str], seed: Optional[int]) -> RunRecorder:
    out = out or f"./experiment_{name}_{get_detailed_timestamp()}"
    return RunRecorder(f"experiment {name}", out, ctx.obj["argv"], ctx.params, seed=seed)


@click.group(name="experiment")
def experiment_group():
    """Truncation, universality, edge-moment and double-root experiments."""
    pass


@experiment_group.command(name="truncation")
@click.option("--atom", default="bernoulli", show_default=True, help="Coefficient law")
@click.option("--n", "n", type=int, required=True, help="Degree")
@click.option("--m", "m", type=int, required=True, help="Truncation degree")
@click.option("--r", "r", required=True, help="Distance of J from 1, as p/q in (1/n, 1)")
@click.option("--J", "J", required=True, help="Finite interval 'a,b' inside [0, 1-r]")
@click.option("--B", "B", type=float, default=16.0, show_default=True, help="Constant in m >= 4B log(n)/r")
@trials_option
@seed_option
@workers_option
@out_option
@click.pass_context
def truncation(
    ctx: click.Context,
    atom: str,
    n: int,
    m: int,
    r: str,
    J: str,
    B: float,
    trials: int,
    seed: Optional[int],
    workers: Optional[int],
    out: Optional[str],
) -> None:
    """Compare root counts on J of P_n and its truncation P_m."""
    config: Config = ctx.obj["config"]
    seed = config.default_seed if seed is None else seed
    bounds = parse_interval(J)
    if None in bounds:
        raise ValidationError("J must be a finite interval", "J")
    report = truncation_compare(
        parse_atom(atom), n, m, parse_rational(r), bounds, trials, seed, B, workers or config.workers
    )
    recorder = _recorder(ctx, "truncation", out, seed)
    recorder.write_json("truncation.json", report)
    recorder.finish()
    print_output(report, output_format=config.output_format, title=f"Truncation n={n} m={m}")
    if not report.precondition_satisfied:
        console.print(
            f"[yellow]m={m} is below 4B log(n)/r = {report.required_m:.1f}; "
            "the comparison bound does not apply[/yellow]"
        )
    console.print(f"\n[green]Results saved to:[/green] {recorder.out_dir}")


@experiment_group.command(name="universality")
@click.option("--atom-a", default="bernoulli", show_default=True, help="First coefficient law")
@click.option("--atom-b", default="gaussian", show_default=True, help="Second coefficient law")
@click.option("--n", "n", type=int, required=True, help="Degree")
@click.option("--r", "r", type=float, required=True, help="Window (1-r, 1)")
@click.option("--eps-prime", type=float, default=0.1, show_default=True, help="Exponent in r < n^-eps'")
@trials_option
@seed_option
@workers_option
@out_option
@click.pass_context
def universality(
    ctx: click.Context,
    atom_a: str,
    atom_b: str,
    n: int,
    r: float,
    eps_prime: float,
    trials: int,
    seed: Optional[int],
    workers: Optional[int],
    out: Optional[str],
) -> None:
    """Mean root counts near 1 for two coefficient laws."""
    config: Config = ctx.obj["config"]
    seed = config.default_seed if seed is None else seed
    report = near_one_universality(
        parse_atom(atom_a),
        parse_atom(atom_b),
        n,
        r,
        trials,
        seed,
        eps_prime,
        workers or config.workers,
    )
    recorder = _recorder(ctx, "universality", out, seed)
    recorder.write_json("universality.json", report)
    recorder.finish()
    print_output(report, output_format=config.output_format, title=f"Universality near 1 (n={n})")
    console.print(f"\n[green]Results saved to:[/green] {recorder.out_dir}")


@experiment_group.command(name="edge-moments")
@click.option("--degrees", required=True, help="Degrees, e.g. 2^6..2^12")
@click.option("--k", "k", type=int, required=True, help="Binomial weight order")
@click.option("--atom", default="bernoulli", show_default=True, help="Discrete coefficient law")
@trials_option
@seed_option
@workers_option
@out_option
@click.pass_context
def edge_moments(
    ctx: click.Context,
    degrees: str,
    k: int,
    atom: str,
    trials: int,
    seed: Optional[int],
    workers: Optional[int],
    out: Optional[str],
) -> None:
    """Growth of sum_i C(i,k) xi_i against n^(k+1/2)."""
    config: Config = ctx.obj["config"]
    seed = config.default_seed if seed is None else seed
    report = edge_moment_growth(
        parse_int_list(degrees), k, trials, seed, parse_atom(atom), workers or config.workers
    )
    rows = [row.model_dump() for row in report.rows]
    recorder = _recorder(ctx, "edge_moments", out, seed)
    recorder.write_csv("edge_moments.csv", rows, EDGE_COLUMNS)
    recorder.write_json("edge_moments.json", report)
    recorder.finish()
    print_output(rows, output_format=config.output_format, title=f"Edge moments (k={k})")
    if report.slope is not None:
        console.print(f"log-log slope {report.slope:.4f} (reference {k + 0.5})")
    console.print(f"\n[green]Results saved to:[/green] {recorder.out_dir}")


@experiment_group.command(name="double-root-mc")
@click.option("--n", "n", type=int, required=True, help="Degree")
@click.option("--N", "N", type=int, default=1, show_default=True, help="Type I parameter")
@click.option("--B", "B", type=float, default=16.0, show_default=True, help="Near-double exponent")
@click.option("--epsilon", default="1/8", show_default=True, help="Exponent slack in I0")
@click.option("--no-exact", is_flag=True, help="Skip the exact cross-check")
@trials_option
@seed_option
@workers_option
@out_option
@click.pass_context
def double_root_mc_command(
    ctx: click.Context,
    n: int,
    N: int,
    B: float,
    epsilon: str,
    no_exact: bool,
    trials: int,
    seed: Optional[int],
    workers: Optional[int],
    out: Optional[str],
) -> None:
    """Empirical double roots at +-1 and near-double events in the bulk."""
    config: Config = ctx.obj["config"]
    seed = config.default_seed if seed is None else seed
    report = double_root_mc(
        n,
        N,
        trials,
        seed,
        B,
        parse_rational(epsilon),
        workers or config.workers,
        with_exact=not no_exact,
    )
    recorder = _recorder(ctx, "double_root_mc", out, seed)
    recorder.write_json("double_root_mc.json", report)
    recorder.finish()
    print_output(report, output_format=config.output_format, title=f"Double roots (n={n}, N={N})")
    console.print(f"\n[green]Results saved to:[/green] {recorder.out_dir}")


@experiment_group.command(name="exact-mean")
@click.option("--n", "n", type=int, required=True, help="Degree")
@click.option("--N", "N", type=int, default=1, show_default=True, help="Type I parameter")
@click.option("--interval", help="Count roots only in the open interval 'a,b'")
@out_option
@click.pass_context
def exact_mean(
    ctx: click.Context, n: int, N: int, interval: Optional[str], out: Optional[str]
) -> None:
    """E N_n by full enumeration, for small degrees."""
    config: Config = ctx.obj["config"]
    bounds = parse_interval(interval) if interval else None
    mean = exact_expected_roots(n, N, bounds)
    data = {"n": n, "N": N, "interval": interval, "expected": mean, "expected_float": float(mean)}
    recorder = _recorder(ctx, "exact_mean", out, None)
    recorder.write_json("exact_mean.json", data)
    recorder.finish()
    print_output(data, output_format=config.output_format, title=f"Exact E N_n (n={n}, N={N})")
    console.print(f"\n[green]Results saved to:[/green] {recorder.out_dir}")
