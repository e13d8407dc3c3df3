"""Command-line entry point for the chiplet carbon estimator.

Subcommands: `estimate` a single configuration, `sweep` the node/chiplet-count/
packaging design space, print or save a `floorplan`, and `validate` input files.
"""

from __future__ import annotations

import json
import logging
import sys
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

import click

from app_constants import Architectures, DesignTypes, ExitCodes, OutputFormats, PackageFlags
from config import AppConfig, FabSources, SweepConfig
from data.errors import CarbonModelError, InfeasibleConfigurationError
from data.loader import load_database, load_system
from data.system import (
    SweepSpec,
    SystemSpec,
    as_monolithic,
    best_entry,
    compare_to_monolithic,
    evaluate,
    sweep,
    system_floorplan,
    with_architecture,
)
from data.techdb import TechDatabase, with_fab_source
from data.validators import validate_fab
from ui.reports import (
    breakdown_frame,
    floorplan_document,
    reports_frame,
    summary_line,
    write_document,
    write_frame,
    write_report,
)

logger = logging.getLogger(__name__)

PROG_NAME = "chiplet-carbon"


class Settings:
    """Options shared by every subcommand."""

    def __init__(
        self,
        db_path: Optional[str],
        allow_out_of_range: bool,
        fab_source: Optional[str],
    ) -> None:
        self.db_path = db_path
        self.allow_out_of_range = allow_out_of_range
        self.fab_source = fab_source

    def database(self) -> TechDatabase:
        db = load_database(self.db_path, allow_out_of_range=self.allow_out_of_range)
        if self.fab_source:
            db = with_fab_source(db, _fab_intensity(self.fab_source))
            validate_fab(db.fab, strict=not self.allow_out_of_range)
        return db

    def system(self, path: str, db: TechDatabase) -> SystemSpec:
        return load_system(path, db, allow_out_of_range=self.allow_out_of_range)


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=AppConfig.LOG_FORMAT, stream=sys.stderr, force=True)


def _fab_intensity(value: str) -> Union[str, float]:
    if value in FabSources.INTENSITY:
        return value
    try:
        return float(value)
    except ValueError:
        known = ", ".join(FabSources.INTENSITY)
        raise click.BadParameter(f"expected a number or one of: {known}", param_hint="--fab-source")


def _node_name(token: str) -> str:
    """'7' -> '7nm'; full names pass through."""
    token = token.strip()
    return f"{token}nm" if token.replace(".", "", 1).isdigit() else token


def _architecture(flag: str) -> str:
    flag = flag.strip()
    if flag in PackageFlags.TO_ARCHITECTURE:
        return PackageFlags.TO_ARCHITECTURE[flag]
    if flag in Architectures.ALL:
        return flag
    choices = ", ".join(list(PackageFlags.TO_ARCHITECTURE) + list(Architectures.ALL))
    raise click.BadParameter(
        f"unknown package '{flag}' (choose from {choices})", param_hint="--package"
    )


def parse_packages(value: str) -> Tuple[str, ...]:
    architectures = tuple(_architecture(flag) for flag in value.split(",") if flag.strip())
    if not architectures:
        raise click.BadParameter("at least one package is required", param_hint="--package")
    return architectures


def parse_nc(value: str) -> Tuple[int, ...]:
    """'1..8' -> (1, ..., 8); '2,4,6' -> (2, 4, 6)."""
    try:
        if ".." in value:
            low, high = (int(part) for part in value.split("..", 1))
            counts = tuple(range(low, high + 1))
        else:
            counts = tuple(int(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise click.BadParameter(
            f"expected 'a..b' or a comma list, got '{value}'", param_hint="--nc"
        )
    if not counts or min(counts) < 1:
        raise click.BadParameter(f"chiplet counts must be >= 1, got '{value}'", param_hint="--nc")
    return counts


def parse_node_choices(tokens: Sequence[str]) -> Dict[str, Tuple[str, ...]]:
    """['logic=7,10', 'memory=10'] -> {'logic': ('7nm', '10nm'), 'memory': ('10nm',)}."""
    choices: Dict[str, Tuple[str, ...]] = {}
    for token in tokens:
        design_type, sep, nodes = token.partition("=")
        design_type = design_type.strip()
        if not sep or design_type not in DesignTypes.ALL:
            raise click.BadParameter(
                f"expected <{'|'.join(DesignTypes.ALL)}>=<node,...>, got '{token}'",
                param_hint="--nodes",
            )
        parsed = tuple(_node_name(node) for node in nodes.split(",") if node.strip())
        if not parsed:
            raise click.BadParameter(f"no nodes given for {design_type}", param_hint="--nodes")
        choices[design_type] = parsed
    return choices


def _apply_overrides(
    spec: SystemSpec,
    n_parts: Optional[int],
    n_des: Optional[int],
    reuse: Optional[str],
    spacing: Optional[float],
) -> SystemSpec:
    design = spec.design
    if n_parts is not None:
        design = replace(design, n_parts=n_parts)
    if n_des is not None:
        design = replace(design, n_des=n_des)
    if reuse is not None:
        names = frozenset(name.strip() for name in reuse.split(",") if name.strip())
        for name in names:
            spec.chiplet(name)
        design = replace(design, reuse=names)
    package = spec.package
    if spacing is not None:
        package = replace(package, spacing=spacing)
    return replace(spec, design=design, package=package)


def _emit(df, out: Optional[str], fmt: Optional[str]) -> None:
    if out:
        write_frame(df, out, fmt)
        click.echo(f"Wrote {len(df)} row(s) to {out}", err=True)
    else:
        click.echo(df.to_csv(index=False), nl=False)


def _decorate(func, options):
    for option in reversed(options):
        func = option(func)
    return func


def input_options(func):
    """Database selection shared by every subcommand."""
    return _decorate(
        func,
        [
            click.option(
                "--db",
                "db_path",
                type=click.Path(dir_okay=False),
                help=f"Technology database (default: ${AppConfig.DB_ENV_VAR} or the bundled one).",
            ),
            click.option(
                "--allow-out-of-range",
                is_flag=True,
                help="Accept parameters outside their admissible range with a warning.",
            ),
            click.option(
                "--fab-source",
                help="Energy source for fab and design compute: "
                f"one of {', '.join(FabSources.INTENSITY)} or g CO2/kWh.",
            ),
        ],
    )


def model_options(func):
    """Options that adjust the loaded system before evaluation."""
    return _decorate(
        func,
        [
            click.option(
                "--n-parts", type=click.IntRange(min=1), help="Parts the design is amortized over."
            ),
            click.option("--n-des", type=click.IntRange(min=1), help="SP&R iterations per design."),
            click.option("--reuse", help="Comma list of chiplets whose design is reused."),
            click.option("--spacing", type=click.FloatRange(min=0.0), help="Chiplet spacing, mm."),
        ],
    )


@click.group()
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for intermediate values.")
def cli(verbose: int) -> None:
    """Estimate the embodied carbon of chiplet and monolithic systems."""
    _configure_logging(verbose)


@cli.command()
@click.option("--system", "system_path", required=True, type=click.Path(dir_okay=False))
@click.option("--package", "package", help="rdl, emib, passive, active or mono.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the report to this file.")
@click.option("--format", "fmt", type=click.Choice(OutputFormats.ALL), help="Report format.")
@click.option(
    "--compare-monolithic",
    is_flag=True,
    help="Also evaluate the same blocks on one monolithic die.",
)
@input_options
@model_options
def estimate(
    system_path: str,
    package: Optional[str],
    out: Optional[str],
    fmt: Optional[str],
    compare_monolithic: bool,
    db_path: Optional[str],
    allow_out_of_range: bool,
    fab_source: Optional[str],
    n_parts: Optional[int],
    n_des: Optional[int],
    reuse: Optional[str],
    spacing: Optional[float],
) -> None:
    """Total embodied carbon of one configuration."""
    settings = Settings(db_path, allow_out_of_range, fab_source)
    db = settings.database()
    spec = _apply_overrides(settings.system(system_path, db), n_parts, n_des, reuse, spacing)
    if package:
        architectures = parse_packages(package)
        if len(architectures) != 1:
            raise click.BadParameter("estimate takes a single package", param_hint="--package")
        spec = with_architecture(spec, architectures[0])
    if spec.package.architecture == Architectures.MONOLITHIC:
        spec = as_monolithic(spec, db)

    comparison = None
    if compare_monolithic and spec.package.architecture != Architectures.MONOLITHIC:
        comparison = compare_to_monolithic(spec, db)
        reports = [comparison.chiplet, comparison.monolithic]
    else:
        reports = [evaluate(spec, db)]

    for report in reports:
        click.echo(f"{report.system} [{report.architecture}] {report.config_label}")
        for row in breakdown_frame(report).itertuples(index=False):
            click.echo(f"  {row.term:<24} {row.carbon_g:>14,.2f} g  {row.share:6.1%}")
        click.echo(f"  {'total':<24} {report.c_total:>14,.2f} g")
    if comparison is not None:
        click.echo(
            f"chiplet/monolithic = {comparison.ratio:.3f} "
            f"({comparison.reduction_pct:.1f}% lower)"
        )

    if out:
        write_report(reports, out, fmt)
        click.echo(f"Wrote report to {out}", err=True)


@cli.command("sweep")
@click.option("--system", "system_path", required=True, type=click.Path(dir_okay=False))
@click.option(
    "--nodes",
    "nodes",
    multiple=True,
    help="Node choices per design type, e.g. logic=7,10. Repeatable; "
    "further type=nodes tokens may follow as arguments.",
)
@click.argument("node_tokens", nargs=-1)
@click.option("--nc", "nc", default="1", show_default=True, help="Chiplet counts: a..b or a,b,c.")
@click.option("--package", "package", default=PackageFlags.RDL, show_default=True)
@click.option("--workers", type=click.IntRange(min=1), default=SweepConfig.MAX_WORKERS)
@click.option("--out", type=click.Path(dir_okay=False), help="Write the grid to this file.")
@click.option("--format", "fmt", type=click.Choice(OutputFormats.ALL), help="Report format.")
@input_options
@model_options
def sweep_command(
    system_path: str,
    nodes: Tuple[str, ...],
    node_tokens: Tuple[str, ...],
    nc: str,
    package: str,
    workers: int,
    out: Optional[str],
    fmt: Optional[str],
    db_path: Optional[str],
    allow_out_of_range: bool,
    fab_source: Optional[str],
    n_parts: Optional[int],
    n_des: Optional[int],
    reuse: Optional[str],
    spacing: Optional[float],
) -> None:
    """Evaluate every node assignment, chiplet count and package."""
    node_choices = parse_node_choices(list(nodes) + list(node_tokens))
    nc_range = parse_nc(nc)
    architectures = parse_packages(package)

    settings = Settings(db_path, allow_out_of_range, fab_source)
    db = settings.database()
    spec = _apply_overrides(settings.system(system_path, db), n_parts, n_des, reuse, spacing)
    if not node_choices:
        node_choices = {c.design_type: (c.node,) for c in spec.chiplets}

    sweep_spec = SweepSpec(
        node_choices=node_choices,
        nc_range=nc_range,
        architectures=architectures,
    )
    entries = sweep(spec, sweep_spec, db, max_workers=workers)
    _emit(reports_frame(entries), out, fmt)
    try:
        click.echo(f"best: {summary_line(best_entry(entries))}", err=True)
    except InfeasibleConfigurationError:
        click.echo("best: no feasible configuration", err=True)


@cli.command()
@click.option("--system", "system_path", required=True, type=click.Path(dir_okay=False))
@click.option("--package", "package", help="rdl, emib, passive or active.")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the JSON document here.")
@click.option("--spacing", type=click.FloatRange(min=0.0), help="Chiplet spacing, mm.")
@input_options
def floorplan(
    system_path: str,
    package: Optional[str],
    out: Optional[str],
    spacing: Optional[float],
    db_path: Optional[str],
    allow_out_of_range: bool,
    fab_source: Optional[str],
) -> None:
    """Placed chiplet boxes and adjacencies as JSON."""
    settings = Settings(db_path, allow_out_of_range, fab_source)
    db = settings.database()
    spec = _apply_overrides(settings.system(system_path, db), None, None, None, spacing)
    if package:
        spec = with_architecture(spec, _architecture(package))
    document = floorplan_document(system_floorplan(spec, db))
    if out:
        write_document(document, out)
        click.echo(f"Wrote floorplan to {out}", err=True)
    else:
        click.echo(json.dumps(document, indent=2))


@cli.command()
@click.option("--system", "system_path", type=click.Path(dir_okay=False))
@input_options
def validate(
    system_path: Optional[str],
    db_path: Optional[str],
    allow_out_of_range: bool,
    fab_source: Optional[str],
) -> None:
    """Check the database and, optionally, a system file."""
    settings = Settings(db_path, allow_out_of_range, fab_source)
    db = settings.database()
    click.echo(f"database ok: {len(db.nodes)} nodes ({', '.join(db.node_names)})")
    if system_path:
        spec = settings.system(system_path, db)
        click.echo(f"system ok: {spec.name} with {len(spec.chiplets)} chiplets")


def main(argv: Optional[List[str]] = None) -> int:
    """Run the CLI and return the process exit code."""
    try:
        result = cli.main(args=argv, prog_name=PROG_NAME, standalone_mode=False)
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return ExitCodes.USAGE
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except InfeasibleConfigurationError as exc:
        click.echo(f"infeasible: {exc}", err=True)
        return ExitCodes.INFEASIBLE
    except CarbonModelError as exc:
        click.echo(f"error: {exc}", err=True)
        return ExitCodes.VALIDATION
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return result if isinstance(result, int) else ExitCodes.OK


if __name__ == "__main__":
    sys.exit(main())
