from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, Optional

import click

from filtered_lrd.errors import LrfError
from filtered_lrd.limit.params import ValidityMode


def run_options(command: Callable[..., Any]) -> Callable[..., Any]:
    """
    Options shared by every subcommand.
    """
    options = [
        click.option(
            "--config",
            "-c",
            "config_path",
            help="TOML run configuration.",
            type=click.Path(exists=True, dir_okay=False, file_okay=True, path_type=Path),
        ),
        click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Base seed (u64)."),
        click.option(
            "--out",
            "out_dir",
            help="Output directory.",
            type=click.Path(dir_okay=True, file_okay=False, path_type=Path),
        ),
        click.option("--threads", type=click.IntRange(min=1), help="Worker process cap."),
        click.option(
            "--validity-mode",
            type=click.Choice([m.value for m in ValidityMode]),
            help="Admissibility gate for the scaling parameters.",
        ),
        click.option(
            "--set",
            "overrides",
            multiple=True,
            metavar="KEY=VALUE",
            help="Override a config key, e.g. --set params.alpha=0.3 (repeatable).",
        ),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _execute(
    body: Callable[..., list[Path]],
    config_path: Optional[Path],
    seed: Optional[int],
    out_dir: Optional[Path],
    threads: Optional[int],
    validity_mode: Optional[str],
    overrides: Sequence[str],
) -> None:
    from filtered_lrd.config import load_config

    try:
        cfg = load_config(
            config_path,
            overrides,
            run_overrides={
                "seed": seed,
                "out": str(out_dir) if out_dir is not None else None,
                "threads": threads,
                "validity_mode": validity_mode,
            },
        )
        for path in body(cfg):
            click.echo(str(path))
    except LrfError as e:
        click.echo(f"Error: {e}", err=True)
        click.get_current_context().exit(e.exit_code)
    except OSError as e:
        click.echo(f"Error: {e}", err=True)
        click.get_current_context().exit(4)


@click.group("filtered-lrd")
def main():
    """
    Simulation and limit-law checks for functionals of filtered long-range dependent
    Gaussian random fields.
    """
    pass


@main.command("synth")
@run_options
def synth_cmd(**kwargs: Any):
    """
    Synthesize one field and write it as a binary dump with a TOML header.
    """
    from filtered_lrd.commands import run_synth

    _execute(run_synth, **kwargs)


@main.command("scaling")
@run_options
def scaling_cmd(**kwargs: Any):
    """
    Run the scaling experiment and write report.json, cells.csv and plot data.
    """
    from filtered_lrd.commands import run_scaling_command

    _execute(run_scaling_command, **kwargs)


@main.command("limit-sample")
@run_options
def limit_sample_cmd(**kwargs: Any):
    """
    Draw samples of the limit process and cross-check their variance.
    """
    from filtered_lrd.commands import run_limit_sample

    _execute(run_limit_sample, **kwargs)


@main.command("integrability")
@run_options
def integrability_cmd(**kwargs: Any):
    """
    Classify the limit-variance integral over a sweep of exponents per window.
    """
    from filtered_lrd.commands import run_integrability

    _execute(run_integrability, **kwargs)


if __name__ == "__main__":
    main()
