"""CLI application for rough-resonance."""

import json
import time
from pathlib import Path
from typing import Annotated, Any, NoReturn

import typer

from rough_resonance import __version__
from rough_resonance.config import (
    ConfigError,
    RunConfig,
    emit_config,
    get_config,
    load_run_config,
)
from rough_resonance.fem import FemError
from rough_resonance.geometry import GeometryError, boundary_hausdorff, pixelate
from rough_resonance.logging import init_logging
from rough_resonance.mesh import MeshError
from rough_resonance.ntd import ModelError
from rough_resonance.pipeline import Pipeline, StageError, with_overrides
from rough_resonance.specfun import SpecialFunctionError, hankel_zero
from rough_resonance.utils.writers import to_jsonable
from rough_resonance.zerofind import ZeroFindError

# Main application
app = typer.Typer(
    name="rough-resonance",
    help="Scattering resonances of rough and fractal obstacles.",
    no_args_is_help=True,
)

# Config subcommand group
config_app = typer.Typer(
    name="config",
    help="Inspect run configurations.",
    no_args_is_help=True,
)
app.add_typer(config_app, name="config")

EXIT_OTHER = 1
EXIT_CONFIG = 2
EXIT_GEOMETRY = 3
EXIT_NUMERICAL = 4
EXIT_ZEROFIND = 5

ConfigOption = Annotated[
    Path, typer.Option("--config", "-c", help="Run configuration (.toml or .yaml)")
]
ThreadsOption = Annotated[
    int | None, typer.Option("--threads", "-t", help="Worker threads (default from config)")
]
OutOption = Annotated[
    Path | None, typer.Option("--out", "-o", help="Output directory (default from config)")
]
NoCacheOption = Annotated[
    bool, typer.Option("--no-cache", help="Do not read or write the model cache")
]
JsonOption = Annotated[bool, typer.Option("--json", "-j", help="Output results as JSON")]
VerboseOption = Annotated[bool, typer.Option("--verbose", "-v", help="Log progress to stderr")]


def exit_code(error: BaseException) -> int:
    """Map an exception class to the process exit status."""
    if isinstance(error, ConfigError):
        return EXIT_CONFIG
    if isinstance(error, (GeometryError, MeshError)):
        return EXIT_GEOMETRY
    if isinstance(error, (SpecialFunctionError, FemError, ModelError)):
        return EXIT_NUMERICAL
    if isinstance(error, ZeroFindError):
        return EXIT_ZEROFIND
    return EXIT_OTHER


def _fail(stage: str, error: BaseException, json_output: bool) -> NoReturn:
    code = exit_code(error)
    if json_output:
        typer.echo(json.dumps({"success": False, "stage": stage, "error": str(error)}))
    else:
        typer.echo(f"Error in {stage}: {error}", err=True)
    raise typer.Exit(code)


def _load(config_path: Path, json_output: bool, **overrides: Any) -> RunConfig:
    try:
        config = load_run_config(config_path, get_config().runtime)
        return with_overrides(config, **overrides)
    except ConfigError as e:
        _fail("config", e, json_output)


def _execute(
    command: str,
    config_path: Path,
    threads: int | None,
    out: Path | None,
    no_cache: bool,
    json_output: bool,
    verbose: bool,
) -> None:
    start_time = time.time()
    config = _load(config_path, json_output, threads=threads, cache=False if no_cache else None)
    init_logging(
        level="DEBUG" if verbose else config.runtime.log_level,
        log_to_file=config.runtime.log_to_file,
        log_to_console=verbose,
    )
    pipeline = Pipeline.create(config, out)
    try:
        summary = pipeline.run(command)
    except StageError as e:
        _fail(e.stage, e.cause, json_output)

    elapsed = time.time() - start_time
    if json_output:
        typer.echo(
            json.dumps(
                {
                    "success": True,
                    "command": command,
                    "elapsed_seconds": round(elapsed, 3),
                    **to_jsonable(summary),
                }
            )
        )
    else:
        typer.echo(f"{command} completed in {elapsed:.1f}s")
        for key, value in to_jsonable(summary).items():
            typer.echo(f"  {key}: {value}")


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        typer.echo(f"rough-resonance {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: Annotated[
        bool,
        typer.Option("--version", callback=version_callback, is_eager=True),
    ] = False,
) -> None:
    """rough-resonance - resonances of obstacles with rough boundaries."""
    pass


# =============================================================================
# Pipeline commands
# =============================================================================


@app.command("mesh")
def mesh_cmd(
    config: ConfigOption,
    threads: ThreadsOption = None,
    out: OutOption = None,
    no_cache: NoCacheOption = False,
    json_output: JsonOption = False,
    verbose: VerboseOption = False,
) -> None:
    """Triangulate the inner domain and write the mesh with a quality report."""
    _execute("mesh", config, threads, out, no_cache, json_output, verbose)


@app.command("model")
def model_cmd(
    config: ConfigOption,
    threads: ThreadsOption = None,
    out: OutOption = None,
    no_cache: NoCacheOption = False,
    json_output: JsonOption = False,
    verbose: VerboseOption = False,
) -> None:
    """Build and serialize the spectral model at k0."""
    _execute("model", config, threads, out, no_cache, json_output, verbose)


@app.command("contour")
def contour_cmd(
    config: ConfigOption,
    threads: ThreadsOption = None,
    out: OutOption = None,
    no_cache: NoCacheOption = False,
    json_output: JsonOption = False,
    verbose: VerboseOption = False,
) -> None:
    """Write log|det T_n(k)| over the search rectangle as CSV."""
    _execute("contour", config, threads, out, no_cache, json_output, verbose)


@app.command("find")
def find_cmd(
    config: ConfigOption,
    threads: ThreadsOption = None,
    out: OutOption = None,
    no_cache: NoCacheOption = False,
    json_output: JsonOption = False,
    verbose: VerboseOption = False,
) -> None:
    """Locate resonances from the configured seeds or from contour minima.

    Examples:
        rough-resonance find --config disk.toml --threads 4 --out results/
    """
    _execute("find", config, threads, out, no_cache, json_output, verbose)


@app.command("certify")
def certify_cmd(
    config: ConfigOption,
    threads: ThreadsOption = None,
    out: OutOption = None,
    no_cache: NoCacheOption = False,
    json_output: JsonOption = False,
    verbose: VerboseOption = False,
) -> None:
    """Cover the zeros in the search rectangle by certified boxes."""
    _execute("certify", config, threads, out, no_cache, json_output, verbose)


@app.command("converge")
def converge_cmd(
    config: ConfigOption,
    threads: ThreadsOption = None,
    out: OutOption = None,
    no_cache: NoCacheOption = False,
    json_output: JsonOption = False,
    verbose: VerboseOption = False,
) -> None:
    """Follow one resonance through the configured mesh sizes (k0 re-anchoring)."""
    _execute("converge", config, threads, out, no_cache, json_output, verbose)


@app.command("sweep")
def sweep_cmd(
    config: ConfigOption,
    threads: ThreadsOption = None,
    out: OutOption = None,
    no_cache: NoCacheOption = False,
    json_output: JsonOption = False,
    verbose: VerboseOption = False,
) -> None:
    """Resonances per Julia parameter q or per Koch level."""
    _execute("sweep", config, threads, out, no_cache, json_output, verbose)


# =============================================================================
# Utility commands
# =============================================================================


@app.command("pixelate")
def pixelate_cmd(
    config: ConfigOption,
    n: Annotated[int | None, typer.Option("--n", "-n", help="Pixels per unit length")] = None,
    out: OutOption = None,
    json_output: JsonOption = False,
) -> None:
    """Pixelate the obstacle, write a PGM and report the boundary Hausdorff distance."""
    run_config = _load(config, json_output)
    resolution = n if n is not None else run_config.geometry.pixel_n
    directory = out if out is not None else Path(run_config.output.directory)
    try:
        spec = run_config.obstacle.to_spec()
        pixels = pixelate(spec, resolution, X=run_config.geometry.X)
        path = pixels.save_pgm(directory / f"pixels_n{resolution}.pgm")
        distance = boundary_hausdorff(spec, resolution) if spec.kind in ("disk", "koch") else None
    except GeometryError as e:
        _fail("pixelate", e, json_output)

    result = {
        "pgm": str(path),
        "cells": len(pixels.indices),
        "components": pixels.components(),
        "area": pixels.area,
        "boundary_hausdorff": distance,
    }
    if json_output:
        typer.echo(json.dumps({"success": True, **to_jsonable(result)}))
    else:
        for key, value in result.items():
            typer.echo(f"{key}: {value}")


@app.command("hankel-zero")
def hankel_zero_cmd(
    order: Annotated[int, typer.Option("--order", "-m", help="Hankel order")] = 1,
    guess: Annotated[str, typer.Option("--guess", "-g", help="Starting point, e.g. -0.4-0.6j")] = (
        "-0.4-0.6j"
    ),
    json_output: JsonOption = False,
) -> None:
    """Newton iteration for a zero of H^(1)_m.

    Examples:
        rough-resonance hankel-zero --order 1 --guess=-0.4-0.6j
    """
    try:
        start = complex(guess.replace(" ", "").replace("i", "j"))
    except ValueError:
        error = ConfigError(f"cannot parse complex number {guess!r}", "guess")
        _fail("hankel-zero", error, json_output)
    try:
        zero = hankel_zero(order, start)
    except SpecialFunctionError as e:
        _fail("hankel-zero", e, json_output)
    if json_output:
        typer.echo(json.dumps({"success": True, "order": order, "zero": [zero.real, zero.imag]}))
    else:
        typer.echo(f"{zero.real:.16g}{zero.imag:+.16g}j")


@config_app.command("show")
def config_show(config: ConfigOption) -> None:
    """Print the configuration with every default filled in (canonical YAML)."""
    run_config = _load(config, json_output=False)
    typer.echo(emit_config(run_config), nl=False)


@config_app.command("validate")
def config_validate(config: ConfigOption, json_output: JsonOption = False) -> None:
    """Validate a configuration file and list warnings."""
    run_config = _load(config, json_output)
    warnings = run_config.validate()
    if json_output:
        typer.echo(json.dumps({"success": True, "warnings": warnings}))
    else:
        typer.echo(f"Valid: {config}")
        for warning in warnings:
            typer.echo(f"  warning: {warning}")


if __name__ == "__main__":
    app()
