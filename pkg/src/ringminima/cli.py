"""Command-line front end for the scenario runners.

Every experiment subcommand shares the same flag set, accepts the same
TOML config file (flags override file values), writes an optional CSV
report, prints a one-line machine summary, and exits with:

    0   run completed and met its acceptance threshold
    2   run completed but missed the threshold
    3   resource budget exceeded
    4   precision or factorization budget exhausted
"""
from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import click

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from . import experiments, forms, geometry, minima, rings
from .errors import (InvalidPoint, PrecisionExhausted, FactorizationTimeout,
                     ResourceBudgetExceeded, RingMinimaError)

EXIT_THRESHOLD = 2
EXIT_BUDGET = 3
EXIT_PRECISION = 4


def _load_config(path):
    if not path:
        return {}
    data = tomllib.loads(Path(path).read_text())
    flat = {}
    for key, val in data.items():
        if isinstance(val, dict):
            for k2, v2 in val.items():
                flat[k2.replace("-", "_")] = v2
        else:
            flat[key.replace("-", "_")] = val
    return flat


def _parse_point(text):
    if text is None:
        return ()
    if isinstance(text, (list, tuple)):
        return tuple(str(v) for v in text)
    return tuple(p.strip() for p in str(text).split(",") if p.strip())


_SHARED = (
    click.option("--config", type=click.Path(exists=True), default=None,
                 help="TOML file supplying defaults for any flag."),
    click.option("--degree", type=int, default=None),
    click.option("--p", "point", default=None,
                 help="Exact rational coordinates, e.g. 1/4,1/4."),
    click.option("--eps", type=float, default=None),
    click.option("--x-start", type=int, default=None),
    click.option("--x-stop", type=int, default=None),
    click.option("--x-factor", type=int, default=None),
    click.option("--dedup",
                 type=click.Choice(experiments.DEDUP_MODES), default=None),
    click.option("--seed", type=int, default=None),
    click.option("--out", type=click.Path(), default=None),
    click.option("--cache-dir", type=click.Path(), default=None),
    click.option("--threads", type=int, default=None),
    click.option("--budget-points", type=int, default=None),
    click.option("--sample", type=int, default=None),
)


def _shared(fn):
    for deco in reversed(_SHARED):
        fn = deco(fn)
    return fn


def _build_config(scenario, config, **flags):
    file_vals = _load_config(config)
    merged = {}
    for key, val in {**file_vals, **{k: v for k, v in flags.items()
                                     if v is not None}}.items():
        merged[key] = val
    if "p" in merged and "point" not in merged:
        merged["point"] = merged.pop("p")
    merged.pop("p", None)
    merged["point"] = _parse_point(merged.get("point"))
    if "primes" in merged:
        merged["primes"] = tuple(int(v) for v in
                                 (merged["primes"].split(",")
                                  if isinstance(merged["primes"], str)
                                  else merged["primes"]))
    allowed = set(experiments.ScenarioConfig.__dataclass_fields__)
    unknown = set(merged) - allowed
    if unknown:
        raise click.ClickException(f"unknown config keys: {sorted(unknown)}")
    try:
        return experiments.ScenarioConfig(scenario, **merged)
    except RingMinimaError as e:
        raise click.ClickException(str(e))


def _run(cfg):
    try:
        rep = experiments.run_scenario(cfg)
    except ResourceBudgetExceeded as e:
        click.echo(f"resource budget exceeded: {e}", err=True)
        sys.exit(EXIT_BUDGET)
    except (PrecisionExhausted, FactorizationTimeout) as e:
        click.echo(f"precision exhausted: {e}", err=True)
        sys.exit(EXIT_PRECISION)
    click.echo(rep.summary_text())
    if cfg.out:
        click.echo(f"report written to {cfg.out}")
    sys.exit(0 if rep.passed else EXIT_THRESHOLD)


@click.group()
def main():
    """Counting experiments over ring parametrizations by binary forms."""


@main.command()
@click.argument("form")
@click.option("--dps", type=int, default=30, help="Working precision digits.")
def profile(form, dps):
    """Minima profile of the ring of a binary form.

    FORM is a comma-separated coefficient literal like "1,0,-1,1".
    """
    try:
        f = forms.parse_form(form)
        ring = rings.ring_from_form(f)
        prof = minima.profile(ring, dps=dps)
    except PrecisionExhausted as e:
        click.echo(f"precision exhausted: {e}", err=True)
        sys.exit(EXIT_PRECISION)
    except RingMinimaError as e:
        raise click.ClickException(str(e))
    click.echo(f"disc: {rings.ring_disc(ring)}")
    click.echo("lambdas: " + ",".join(format(v, ".12g") for v in prof.lams))
    click.echo("profile: " + ",".join(format(v, ".12g") for v in prof.p))


@main.command("enumerate")
@_shared
def enumerate_cmd(config, **flags):
    """Window count of one coefficient box at X = x-stop."""
    cfg = _build_config("density_slope", config, **flags)
    x = cfg.x_stop
    try:
        box = geometry.make_box(experiments._box_kind(cfg.degree), cfg.point, x)
        scan = experiments._BoxScan(box, experiments._scan_kind(cfg.degree))
        cache = experiments.CountCache(cfg.cache_dir)
        count = experiments.window_count(box, x, scan, cfg.budget_points,
                                         cfg.threads, cache)
        line = f"x={x} count={count}"
        if cfg.dedup_mode() == "canonical" and cfg.degree == 3:
            S = experiments.collect_survivors(box, x, scan, cfg.budget_points)
            import numpy as np
            labels = experiments.cubic_class_labels(S)
            line += f" classes={np.unique(labels, axis=0).shape[0]}"
    except ResourceBudgetExceeded as e:
        click.echo(f"resource budget exceeded: {e}", err=True)
        sys.exit(EXIT_BUDGET)
    except RingMinimaError as e:
        raise click.ClickException(str(e))
    click.echo(line)


@main.command()
@_shared
def density(config, **flags):
    """Fit the class-count slope against the density value at p."""
    _run(_build_config("density_slope", config, **flags))


@main.command()
@_shared
@click.option("--galois", "galois_filter", default=None,
              type=click.Choice(["C3", "S3", "red"]))
@click.option("--maximal-only", is_flag=True, default=None)
def scatter(config, **flags):
    """Profile scatter of a cubic population against the support segment."""
    _run(_build_config("scatter", config, **flags))


@main.command()
@_shared
@click.option("--primes", default=None, help="Comma-separated primes.")
def sieve(config, **flags):
    """Square-divisor constants and maximality statistics."""
    _run(_build_config("sieve", config, **flags))


@main.command()
@_shared
@click.option("--family", type=click.Choice(experiments.FAMILY_NAMES),
              required=True)
@click.option("--height", "-T", type=int, default=None)
def family(config, **flags):
    """Closeness fraction of a special family to its vertex point."""
    _run(_build_config("family", config, **flags))


@main.command()
@_shared
def binthm(config, **flags):
    """Class-count slope of a binary n-ic box along the segment."""
    _run(_build_config("binthm", config, **flags))


@main.command()
@_shared
def davenport(config, **flags):
    """Plain lattice count of a cubic box against its volume."""
    _run(_build_config("davenport", config, **flags))


@main.command()
@click.option("--name", required=True)
@click.option("--point", required=True,
              help="Exact rational coordinates, e.g. 1/6,1/6,1/6,1/4,1/4.")
def polytope(name, point):
    """Exact polytope membership or density value at a point."""
    pt = tuple(Fraction(v) for v in _parse_point(point))
    try:
        if name in geometry.polytope_names():
            click.echo(str(geometry.polytope_contains(name, pt)).lower())
        else:
            click.echo(str(geometry.density_value(name, pt)))
    except RingMinimaError as e:
        raise click.ClickException(str(e))


@main.command()
@click.option("--suite", type=click.Choice(experiments.CHECK_SUITES),
              default=None, help="Default runs every suite.")
@click.option("--trials", type=int, default=None)
@click.option("--seed", type=int, default=0)
@click.option("--out", type=click.Path(), default=None)
def check(suite, trials, seed, out):
    """Exact identity suites (discriminants, bounds, cross-checks)."""
    cfg = experiments.ScenarioConfig("identity_suite", suite=suite,
                                     sample=trials, seed=seed, out=out)
    _run(cfg)


@main.command()
@_shared
def audit(config, **flags):
    """Vertex membership and density spot-check table."""
    _run(_build_config("polytope_audit", config, **flags))


if __name__ == "__main__":
    main()
