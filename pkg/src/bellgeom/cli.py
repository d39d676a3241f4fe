"""Command line interface: ``bellgeom <subcommand> [options]``.

Every subcommand also takes ``--config FILE``, a flat JSON object keyed
by option name with dashes replaced by underscores. Explicit flags win
over the file, the file wins over built-in defaults.

Exit codes: 0 success, 1 runtime or validation failure, 2 usage error.
"""

from __future__ import annotations

import functools
import json
import math
import sys

import click
import numpy as np

from ._format import dumps, sig12
from .bell_game import reconstruct_correlation, simulate, sweep_csv
from .chsh_bound import generalized_bound, optimize_chsh, verify_bound
from .correlation_family import CorrelationFamily, evaluate, make_family, validate
from .errors import BellGeomError, FamilySpecError
from .hidden_model import ModelContext


class FamilyType(click.ParamType):
    name = "family"

    def convert(self, value, param, ctx):
        if isinstance(value, CorrelationFamily):
            return value
        try:
            return make_family(str(value))
        except FamilySpecError as exc:
            self.fail(str(exc), param, ctx)


class FiniteFloat(click.ParamType):
    name = "float"

    def __init__(self, positive: bool = False):
        self.positive = positive

    def convert(self, value, param, ctx):
        try:
            x = float(value)
        except (TypeError, ValueError):
            self.fail(f"{value!r} is not a number", param, ctx)
        if not math.isfinite(x):
            self.fail(f"{value!r} is not finite", param, ctx)
        if self.positive and x <= 0.0:
            self.fail(f"{value!r} must be positive", param, ctx)
        return x


FAMILY = FamilyType()
SEED = click.IntRange(min=0, max=(1 << 64) - 1)
POSITIVE = click.IntRange(min=1)


def _load_config(ctx, param, path):
    if path is None:
        return None
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise click.BadParameter(f"cannot read config: {exc}", ctx=ctx, param=param)
    if not isinstance(data, dict):
        raise click.BadParameter("config must be a JSON object", ctx=ctx, param=param)
    ctx.default_map = {**(ctx.default_map or {}), **data}
    return path


config_option = click.option(
    "--config",
    type=click.Path(dir_okay=False),
    callback=_load_config,
    is_eager=True,
    expose_value=False,
    help="JSON file of option defaults.",
)
family_option = click.option("--family", type=FAMILY, default="cosine", show_default=True,
                             help="cosine | power:<p>")
output_option = click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
                             help="Write to this file instead of stdout.")


def theta_options(fn):
    fn = click.option("--degrees", is_flag=True, help="Read --theta in degrees.")(fn)
    fn = click.option("--theta", type=FiniteFloat(), default=0.0, show_default=True,
                      help="Relative detector angle (radians).")(fn)
    return fn


def _theta(theta: float, degrees: bool) -> float:
    return math.radians(theta) if degrees else theta


def _emit(text: str, output: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if output is None:
        click.echo(text, nl=False)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def runtime_errors(fn):
    """Report package and I/O errors as a JSON object with exit code 1."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (BellGeomError, OSError, ValueError) as exc:
            click.echo(dumps({"error": str(exc), "type": type(exc).__name__}))
            sys.exit(1)

    return wrapper


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Local hidden-variable models and the generalised CHSH bound."""


@main.command("validate")
@config_option
@family_option
@click.option("--grid-n", type=click.IntRange(min=3), default=10001, show_default=True)
@output_option
@runtime_errors
def cmd_validate(family, grid_n, output):
    """Check membership of a family in the admissible class."""
    report = validate(family, grid_n)
    out = {"family": family.spec, **report.to_dict()}
    for v in out["violations"]:
        v["witness"] = sig12(v["witness"])
        v["magnitude"] = sig12(v["magnitude"])
    _emit(dumps(out), output)
    sys.exit(0 if report.passed else 1)


@main.command("sweep")
@config_option
@family_option
@click.option("--points", type=POSITIVE, default=629, show_default=True)
@click.option("--rounds", type=POSITIVE, default=None,
              help="Add a Monte Carlo column with this many rounds per angle.")
@click.option("--seed", type=SEED, default=0, show_default=True)
@click.option("--workers", type=POSITIVE, default=1, show_default=True)
@output_option
@runtime_errors
def cmd_sweep(family, points, rounds, seed, workers, output):
    """Tabulate E(theta) on a uniform grid from -pi to pi."""
    thetas = np.linspace(-math.pi, math.pi, points)
    if rounds is None:
        rows = [(float(t), None, evaluate(family, t)) for t in thetas]
    else:
        rows = reconstruct_correlation(family, thetas, rounds, seed, workers)
    _emit(sweep_csv(rows), output)


@main.command("simulate")
@config_option
@family_option
@theta_options
@click.option("--rounds", type=POSITIVE, default=100_000, show_default=True)
@click.option("--seed", type=SEED, default=0, show_default=True)
@click.option("--workers", type=POSITIVE, default=1, show_default=True)
@output_option
@runtime_errors
def cmd_simulate(family, theta, degrees, rounds, seed, workers, output):
    """Monte Carlo run of the game at one detector angle."""
    ctx = ModelContext(family, _theta(theta, degrees))
    summary = simulate(ctx, rounds, seed, workers)
    _emit(dumps(summary.to_dict()), output)


@main.command("chsh")
@config_option
@family_option
@click.option("--grid-n", type=click.IntRange(min=16), default=64, show_default=True)
@click.option("--refine-tol", type=FiniteFloat(positive=True), default=1e-10, show_default=True)
@output_option
@runtime_errors
def cmd_chsh(family, grid_n, refine_tol, output):
    """Maximise |F| over all detector settings."""
    if not family.is_valid:
        ModelContext(family, 0.0)  # raises with the violated constraints
    result = optimize_chsh(family, grid_n, refine_tol)
    _emit(dumps(result.to_dict(family, grid_n, refine_tol)), output)


@main.command("bound")
@config_option
@family_option
@click.option("--verify-samples", type=POSITIVE, default=None,
              help="Also test this many random settings against the bound.")
@click.option("--seed", type=SEED, default=0, show_default=True)
@output_option
@runtime_errors
def cmd_bound(family, verify_samples, seed, output):
    """Print 4|E(pi/4)|."""
    out = {"bound": sig12(generalized_bound(family))}
    if verify_samples is not None:
        check = verify_bound(family, verify_samples, seed)
        out["verified"] = check.ok
        out["worst_value"] = sig12(check.worst_value)
        out["worst"] = {k: sig12(v) for k, v in zip(("theta1", "theta2", "delta"), check.worst.as_tuple())}
    _emit(dumps(out), output)
    if verify_samples is not None and not out["verified"]:
        sys.exit(1)


@main.command("harness")
@config_option
@click.option("--role", type=click.Choice(["referee", "detector-a", "detector-b"]), required=True)
@click.option("--listen", default="127.0.0.1:7400", show_default=True, help="Referee bind address.")
@click.option("--connect", default="127.0.0.1:7400", show_default=True, help="Detector target address.")
@family_option
@theta_options
@click.option("--rounds", type=POSITIVE, default=10_000, show_default=True)
@click.option("--seed", type=SEED, default=0, show_default=True)
@click.option("--timeout", type=FiniteFloat(positive=True), default=10.0, show_default=True)
@output_option
@runtime_errors
def cmd_harness(role, listen, connect, family, theta, degrees, rounds, seed, timeout, output):
    """Run one party of the distributed game over TCP."""
    from .harness import Referee, SessionAborted, SessionConfig, detector_run, parse_address

    cfg = SessionConfig(
        family=family.spec,
        theta=_theta(theta, degrees),
        rounds=rounds,
        seed=seed,
        listen=parse_address(listen),
        connect=parse_address(connect),
        timeout=timeout,
    )
    if role != "referee":
        sys.exit(detector_run(cfg, role))
    try:
        summary = Referee(cfg).run()
    except SessionAborted as exc:
        out = {"error": str(exc), "type": "SessionAborted"}
        if exc.summary is not None:
            out["partial"] = exc.summary.to_dict()
        click.echo(dumps(out))
        sys.exit(1)
    _emit(dumps(summary.to_dict()), output)


if __name__ == "__main__":
    main()
