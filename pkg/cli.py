"""
Experiment Runner CLI
Runs a JSON-configured study; flags override the config file
"""
import sys
from typing import Dict, Optional, Tuple

import click
from pydantic import ValidationError

from app.config import settings
from app.exceptions import ConfigurationError
from app.log_config import configure_logging
from app.models.run import ExperimentKind, RunConfig
from app.models.solver import LinearSystem
from app.services.experiments import EXIT_CONFIG, EXIT_OK, apply_overrides, parse_config, run as run_experiment


def _parse_modes(ctx, param, values: Tuple[str, ...]) -> Dict[str, float]:
    modes = {}
    for item in values:
        mode, sep, amplitude = item.partition("=")
        if not sep:
            raise click.BadParameter(f"expected MODE=AMPLITUDE, got '{item}'")
        try:
            modes[str(int(mode))] = float(amplitude)
        except ValueError:
            raise click.BadParameter(f"expected MODE=AMPLITUDE, got '{item}'")
    return modes


@click.group()
@click.version_option(settings.APP_VERSION, prog_name="selfsimilar")
def cli():
    """Self-similar Hele-Shaw interface shapes"""


@cli.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="JSON run config")
@click.option("--kind", type=click.Choice([k.value for k in ExperimentKind]), help="experiment.kind")
@click.option("--tau", type=float)
@click.option("--k-eff", type=float)
@click.option("--atwood", type=float)
@click.option("--n1", type=int)
@click.option("--n2", type=int)
@click.option("--c0", type=float)
@click.option("--mode", "modes", multiple=True, callback=_parse_modes, help="initial amplitude, e.g. --mode 3=0.2")
@click.option("--newton-tol", type=float)
@click.option("--floor-tol", type=float, help="newton.floor_tol")
@click.option("--max-iters", type=int)
@click.option("--fd-step", type=float)
@click.option("--refresh", type=int)
@click.option("--shrink", type=float)
@click.option("--max-backtracks", type=int)
@click.option("--system", type=click.Choice([s.value for s in LinearSystem]))
@click.option("--output-dir", type=click.Path(file_okay=False))
@click.option("--workers", type=int)
@click.option("--log-level", default=None, help="overrides LOG_LEVEL")
@click.option("--quiet", is_flag=True, help="hide progress bars")
def run(config_path: Optional[str], kind: Optional[str], modes: Dict[str, float], log_level: Optional[str], quiet: bool, **flags):
    """Run a solve, sweep, resolution, fold-curve, linear-table or validate study"""
    configure_logging(log_level)

    if kind == ExperimentKind.SWEEP.value and not config_path:
        click.echo("❌ --config PATH is required for sweeps", err=True)
        sys.exit(EXIT_CONFIG)

    try:
        config = parse_config(config_path) if config_path else RunConfig()
        overrides = {
            "tau": flags["tau"],
            "k_eff": flags["k_eff"],
            "atwood": flags["atwood"],
            "n1": flags["n1"],
            "n2": flags["n2"],
            "c0": flags["c0"],
            "newton.tol": flags["newton_tol"],
            "newton.floor_tol": flags["floor_tol"],
            "newton.max_iters": flags["max_iters"],
            "newton.fd_step": flags["fd_step"],
            "newton.refresh": flags["refresh"],
            "line_search.shrink": flags["shrink"],
            "line_search.max_backtracks": flags["max_backtracks"],
            "system": flags["system"],
            "experiment.kind": kind,
            "output_dir": flags["output_dir"],
            "workers": flags["workers"],
        }
        if modes:
            overrides["initial_modes"] = {**{str(k): v for k, v in config.initial_modes.items()}, **modes}
        config = apply_overrides(config, overrides)
    except (ConfigurationError, ValidationError) as e:
        click.echo(f"❌ Invalid configuration:\n{e}", err=True)
        sys.exit(EXIT_CONFIG)

    click.echo(f"🚀 Running {config.experiment.kind.value} study -> {config.output_dir}")
    try:
        code = run_experiment(config, show_progress=not quiet)
    except OSError as e:
        click.echo(f"❌ Could not write results: {e}", err=True)
        sys.exit(1)

    if code == EXIT_OK:
        click.echo("✅ Done")
    else:
        click.echo(f"⚠️ Finished with exit status {code}", err=True)
    sys.exit(code)


if __name__ == "__main__":
    cli()
