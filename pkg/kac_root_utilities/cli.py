"""Main CLI entry point for Kac Root Utilities."""

import logging
import sys
import tempfile
from pathlib import Path
from typing import Any, List, Optional, Sequence

import click
from rich.console import Console
from rich.traceback import install

from . import __version__
from .commands import ek, exact, experiment, simulate
from .core.config import Config
from .core.exceptions import (
    EXIT_OK,
    EXIT_USAGE,
    ConfigurationError,
    DataError,
    KacRootUtilitiesError,
)
from .core.manifest import digest_mismatches, load_manifest, replay_argv
from .core.utils import print_output

# Install rich traceback handler
install(show_locals=True)

console = Console()
logger = logging.getLogger(__name__)


class KacGroup(click.Group):
    """Root group that records argv and maps errors to exit codes.

    0 success, 1 usage or generic failure, 2 infeasible by certificate,
    3 resource guard.
    """

    def main(
        self,
        args: Optional[Sequence[str]] = None,
        prog_name: Optional[str] = None,
        complete_var: Optional[str] = None,
        standalone_mode: bool = True,
        **extra: Any,
    ) -> Any:
        args = list(sys.argv[1:] if args is None else args)
        obj = extra.pop("obj", None) or {}
        obj["argv"] = args
        if not standalone_mode:
            return super().main(args, prog_name, complete_var, False, obj=obj, **extra)

        try:
            rv = super().main(args, prog_name, complete_var, False, obj=obj, **extra)
        except click.ClickException as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.Abort:
            console.print("\n[yellow]Aborted[/yellow]")
            sys.exit(EXIT_USAGE)
        except KacRootUtilitiesError as e:
            console.print(f"[red]Error:[/red] {e}")
            sys.exit(e.exit_code)
        except Exception:
            if "--debug" in args:
                console.print_exception()
            else:
                console.print(f"[red]Unexpected error:[/red] {sys.exc_info()[1]}")
            sys.exit(EXIT_USAGE)
        sys.exit(rv if isinstance(rv, int) else EXIT_OK)


@click.group(cls=KacGroup)
@click.option(
    "--output",
    type=click.Choice(["table", "json", "yaml", "csv"]),
    help="Console output format (default: table)",
)
@click.option("--verbose", is_flag=True, default=None, help="Enable verbose output")
@click.option("--debug", is_flag=True, default=None, help="Enable debug mode")
@click.option("--config", help="Configuration file path (key=value lines)")
@click.option(
    "--workers",
    "--threads",
    "workers",
    type=int,
    help="Default worker threads (env: KAC_WORKERS)",
)
@click.option("--data-dir", help="Directory for cached exact tables")
@click.version_option(version=__version__, prog_name="kac-root-utilities")
@click.pass_context
def main(
    ctx: click.Context,
    output: Optional[str],
    verbose: Optional[bool],
    debug: Optional[bool],
    config: Optional[str],
    workers: Optional[int],
    data_dir: Optional[str],
) -> None:
    """Kac Root Utilities - real roots of random polynomials.

    Exact oracles, Gaussian quadrature and reproducible Monte Carlo for
    the number of real zeros of P(x) = sum xi_i x^i.

    Examples:
        kac-root-utilities simulate --atom bernoulli --degrees 2^4..2^12 --trials 10000
        kac-root-utilities ek --n-sweep 1e2,1e3,1e4,1e5
        kac-root-utilities exact double-root --n 3 --N 1
        kac-root-utilities replay ./simulate_20240229_120000/manifest.json
    """
    ctx.ensure_object(dict)
    ctx.obj.setdefault("argv", sys.argv[1:])
    try:
        cfg = Config.load_config(
            config_file=config,
            output_format=output,
            verbose=verbose,
            debug=debug,
            workers=workers,
            data_dir=data_dir,
        )
    except ConfigurationError as e:
        raise click.UsageError(f"Configuration Error: {e.message}")

    cfg.setup_logging()
    if cfg.no_color:
        console.no_color = True
    if cfg.verbose or cfg.debug:
        console.print(f"[dim]Configuration: {cfg}[/dim]")
    ctx.obj["config"] = cfg


# Add commands
main.add_command(simulate.simulate)
main.add_command(ek.ek)
main.add_command(exact.exact_group)
main.add_command(experiment.experiment_group)


@main.command()
@click.pass_context
def info(ctx: click.Context) -> None:
    """Show Kac Root Utilities information."""
    import mpmath
    import numpy as np

    from .engine.ekq import C_GAU
    from .engine.mc import MASLOVA

    config: Config = ctx.obj["config"]
    settings = {
        name.replace("_", " ").title(): value
        for name, value in config.to_dict().items()
        if name != "data_dir"
    }
    info_data = {
        "Version": __version__,
        **settings,
        "Data Directory": str(config.get_data_dir()),
        "numpy": np.__version__,
        "mpmath": mpmath.__version__,
        "Gaussian constant C_Gau": C_GAU,
        "Variance constant (4/pi)(1-2/pi)": round(MASLOVA, 10),
    }
    print_output(info_data, output_format=config.output_format, title="Kac Root Utilities Information")


@main.command()
@click.argument("manifest_path", type=click.Path(exists=True))
@click.option("--into", help="Directory for the rerun (default: a fresh temporary directory)")
@click.pass_context
def replay(ctx: click.Context, manifest_path: str, into: Optional[str]) -> None:
    """Re-run a recorded command and verify every output digest."""
    config: Config = ctx.obj["config"]
    recorded = load_manifest(manifest_path)
    out_dir = Path(into) if into else Path(tempfile.mkdtemp(prefix="kac_replay_"))
    args: List[str] = replay_argv(recorded, out_dir)
    if recorded.seed is not None and not any(a == "--seed" or a.startswith("--seed=") for a in args):
        args += ["--seed", str(recorded.seed)]

    console.print(f"[dim]Replaying: {' '.join(args)}[/dim]")
    main.main(args=args, prog_name=ctx.find_root().info_name, standalone_mode=False)

    rerun = load_manifest(out_dir)
    mismatches = digest_mismatches(recorded, rerun)
    rows = [
        {
            "file": name,
            "recorded": recorded.outputs.get(name, "-")[:16],
            "replayed": rerun.outputs.get(name, "-")[:16],
            "match": name not in mismatches,
        }
        for name in sorted(set(recorded.outputs) | set(rerun.outputs))
    ]
    print_output(rows, output_format=config.output_format, title="Replay digests")
    if recorded.version != rerun.version:
        console.print(
            f"[yellow]Recorded with version {recorded.version}, replayed with {rerun.version}[/yellow]"
        )
    if mismatches:
        raise DataError(f"{len(mismatches)} output(s) differ: {', '.join(mismatches)}", "replay")
    console.print(f"\n[green]All {len(rows)} outputs reproduced in:[/green] {out_dir}")


def handle_exception(exc_type, exc_value, exc_traceback):
    """Global exception handler."""
    if issubclass(exc_type, KeyboardInterrupt):
        console.print("\n[yellow]Operation cancelled by user[/yellow]")
        sys.exit(EXIT_USAGE)
    elif issubclass(exc_type, KacRootUtilitiesError):
        console.print(f"[red]Error:[/red] {exc_value}")
        sys.exit(exc_value.exit_code)
    else:
        # Use rich traceback for unexpected errors
        console.print_exception()
        sys.exit(EXIT_USAGE)


# Set global exception handler
sys.excepthook = handle_exception


if __name__ == "__main__":
    main()
