"""Command-line interface for ctx-sim."""

import functools
import logging
import sys
import traceback
from pathlib import Path
from typing import Any, Callable, List, Optional

import click
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from .catalog import CATALOG
from .config import BUDGET_RANGE, ConfigManager
from .contextuality import classify
from .errors import BudgetExceeded, ValidationError
from .formatter import ReportFormatter
from .games import canonical_model_of_predicate, classical_value, ks_predicate, model_value
from .hom import NotRealizable, hom_scenario, realizable
from .models import FORMATS, MODES, Config, InputFile, RunReport
from .procedure import find_simulation, is_simulation, pushforward
from .serialization import (
    canonical_result_to_json,
    game_from_json,
    hierarchy_to_json,
    hom_to_json,
    load_json,
    model_from_json,
    model_to_json,
    predicate_from_json,
    predicate_to_json,
    procedure_from_json,
    procedure_to_json,
    query_from_json,
    scenario_from_json,
    to_json,
)
from .utils import canonical_json, file_sha256, format_rational

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INVALID = 2
EXIT_BUDGET = 3

console = Console(stderr=True)
logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False, log_file: Optional[str] = None) -> None:
    """Setup logging configuration."""
    level = logging.DEBUG if verbose else logging.WARNING
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def handle_errors(func: Callable) -> Callable:
    """Map library errors onto exit codes: invalid input 2, budget 3, anything else 1."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except BudgetExceeded as e:
            console.print(f"[red]Budget exceeded:[/red] {escape(str(e))}")
            console.print("[yellow]Raise the ceiling with --budget or CTX_SIM_BUDGET.[/yellow]")
            sys.exit(EXIT_BUDGET)
        except ValidationError as e:
            console.print(f"[red]Error:[/red] {escape(str(e))}")
            sys.exit(EXIT_INVALID)
        except KeyboardInterrupt:
            console.print("\n[yellow]Operation cancelled by user[/yellow]")
            sys.exit(EXIT_FALSE)
        except Exception as e:
            console.print(f"[red]Error:[/red] {escape(str(e))}")
            if ctx.obj.get('verbose'):
                console.print(traceback.format_exc())
            sys.exit(EXIT_FALSE)
    return wrapper


def report_options(func: Callable) -> Callable:
    """--output, --format and --budget, shared by every analysis command."""
    func = click.option('--budget', type=BUDGET_RANGE, help='Enumeration ceiling for this run')(func)
    func = click.option('--format', 'output_format', type=click.Choice(FORMATS), help='Report format')(func)
    func = click.option('--output', '-o', type=click.Path(dir_okay=False), help='Output file path')(func)
    return func


class Run:
    """Bookkeeping for one command: the effective configuration and the input files read."""

    def __init__(self, ctx: click.Context, command: str, budget: Optional[int]):
        self.command = command
        self.config: Config = ctx.obj['config']
        if budget is not None:
            self.config = self.config.with_budget(budget)
        self.inputs: List[InputFile] = []

    def read(self, path: str, decoder: Callable[..., Any]) -> Any:
        """Decode a JSON input file, recording its content hash."""
        data = load_json(path)
        self.inputs.append(InputFile(path=path, sha256=file_sha256(Path(path))))
        return decoder(data, Path(path).parent)

    def finish(self, result: Any, exit_code: int, output: Optional[str], output_format: Optional[str]) -> None:
        report = RunReport(command=self.command, inputs=self.inputs, result=result, exit_code=exit_code)
        text = ReportFormatter().format_report(report, output_format or self.config.default_format)
        if output:
            Path(output).write_text(text, encoding='utf-8')
            console.print(f"[green]Report written to {output}[/green]")
        else:
            click.echo(text, nl=False)
        sys.exit(exit_code)


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.option('--log-file', type=click.Path(dir_okay=False), help='Also write logs to this file')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), help='Configuration file path')
@click.pass_context
def cli(ctx, verbose, log_file, config_path):
    """ctx - contextuality, simulations and games for measurement scenarios."""
    ctx.ensure_object(dict)
    ctx.obj['verbose'] = verbose
    setup_logging(verbose, log_file)
    ctx.obj['config'] = ConfigManager.load_config(Path(config_path) if config_path else None)


@cli.command()
@click.argument('model_file')
@report_options
@click.pass_context
@handle_errors
def check(ctx, model_file, output, output_format, budget):
    """Place a model in the contextuality hierarchy."""
    run = Run(ctx, "check", budget)
    model = run.read(model_file, model_from_json)
    report = classify(model, run.config.assignment_budget, run.config.pivot_limit)
    run.finish(hierarchy_to_json(report, model.scenario), EXIT_OK, output, output_format)


@cli.command()
@click.argument('procedure_file')
@click.argument('model_file')
@report_options
@click.pass_context
@handle_errors
def push(ctx, procedure_file, model_file, output, output_format, budget):
    """Push a model forward along a procedure."""
    run = Run(ctx, "push", budget)
    procedure = run.read(procedure_file, procedure_from_json)
    model = run.read(model_file, model_from_json)
    run.finish(model_to_json(pushforward(procedure, model)), EXIT_OK, output, output_format)


@cli.command(name='verify-sim')
@click.argument('procedure_file')
@click.argument('from_file')
@click.argument('to_file')
@click.option('--mode', type=click.Choice(MODES), help='Kind of simulation to check')
@report_options
@click.pass_context
@handle_errors
def verify_sim(ctx, procedure_file, from_file, to_file, mode, output, output_format, budget):
    """Check that a procedure simulates one model by another."""
    run = Run(ctx, "verify-sim", budget)
    mode = mode or run.config.default_mode
    procedure = run.read(procedure_file, procedure_from_json)
    source = run.read(from_file, model_from_json)
    target = run.read(to_file, model_from_json)
    holds = is_simulation(procedure, source, target, mode)
    run.finish({"mode": mode, "simulation": holds}, EXIT_OK if holds else EXIT_FALSE, output, output_format)


@cli.command(name='game-value')
@click.argument('game_file')
@click.argument('model_file', required=False)
@report_options
@click.pass_context
@handle_errors
def game_value(ctx, game_file, model_file, output, output_format, budget):
    """Classical value of a game, or its value on a model."""
    run = Run(ctx, "game-value", budget)
    game = run.read(game_file, game_from_json)
    if model_file:
        value = model_value(game, run.read(model_file, model_from_json))
    else:
        value, maximizer = classical_value(game, run.config.assignment_budget)
        console.print(f"[blue]Attained by {escape(str(maximizer))}[/blue]")
    run.finish(format_rational(value), EXIT_OK, output, output_format)


@cli.command(name='realizable')
@click.argument('query_file')
@report_options
@click.pass_context
@handle_errors
def realizable_cmd(ctx, query_file, output, output_format, budget):
    """Decide whether some procedure induces a tabulated function."""
    run = Run(ctx, "realizable", budget)
    query = run.read(query_file, query_from_json)
    verdict = realizable(
        query,
        budget=run.config.procedure_budget,
        pivot_limit=run.config.pivot_limit,
        assignment_budget=run.config.assignment_budget,
    )
    if isinstance(verdict, NotRealizable):
        if verdict.assignment is not None:
            console.print(f"[yellow]F is contextual at {escape(str(verdict.assignment))}[/yellow]")
        run.finish({"verdict": "not_realizable"}, EXIT_FALSE, output, output_format)
    run.finish({"verdict": "realizable", "witness": procedure_to_json(verdict.witness)}, EXIT_OK, output, output_format)


@cli.command()
@click.argument('source_file')
@click.argument('target_file')
@report_options
@click.pass_context
@handle_errors
def hom(ctx, source_file, target_file, output, output_format, budget):
    """Build the hom scenario [S, T] with its predicate."""
    run = Run(ctx, "hom", budget)
    source = run.read(source_file, scenario_from_json)
    target = run.read(target_file, scenario_from_json)
    built = hom_scenario(source, target, run.config.hom_outcome_budget)
    run.finish(hom_to_json(built, built.predicate(run.config.assignment_budget)), EXIT_OK, output, output_format)


@cli.command()
@click.argument('scenario_file')
@report_options
@click.pass_context
@handle_errors
def ks(ctx, scenario_file, output, output_format, budget):
    """Kochen-Specker predicate of a dichotomic scenario."""
    run = Run(ctx, "ks", budget)
    scenario = run.read(scenario_file, scenario_from_json)
    run.finish(predicate_to_json(ks_predicate(scenario)), EXIT_OK, output, output_format)


@cli.command(name='canonical-predicate')
@click.argument('predicate_file')
@report_options
@click.pass_context
@handle_errors
def canonical_predicate(ctx, predicate_file, output, output_format, budget):
    """Largest possibilistic model satisfying a predicate."""
    run = Run(ctx, "canonical-predicate", budget)
    predicate = run.read(predicate_file, predicate_from_json)
    result = canonical_model_of_predicate(predicate, run.config.assignment_budget)
    run.finish(canonical_result_to_json(result), EXIT_OK, output, output_format)


@cli.command(name='find-sim')
@click.argument('from_file')
@click.argument('to_file')
@report_options
@click.pass_context
@handle_errors
def find_sim(ctx, from_file, to_file, output, output_format, budget):
    """Search for a probabilistic simulation between two models."""
    run = Run(ctx, "find-sim", budget)
    source = run.read(from_file, model_from_json)
    target = run.read(to_file, model_from_json)
    witness = find_simulation(source, target, run.config.procedure_budget, run.config.pivot_limit)
    if witness is None:
        run.finish({"simulation": None}, EXIT_FALSE, output, output_format)
    run.finish({"simulation": procedure_to_json(witness)}, EXIT_OK, output, output_format)


@cli.command()
@click.argument('name', type=click.Choice(sorted(CATALOG)))
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='Output file path')
@click.pass_context
@handle_errors
def catalog(ctx, name, output):
    """Emit a built-in scenario, model, procedure or game as an input file."""
    text = canonical_json(to_json(CATALOG[name]()))
    if output:
        Path(output).write_text(text, encoding='utf-8')
        console.print(f"[green]{name} written to {output}[/green]")
    else:
        click.echo(text, nl=False)


@cli.group()
def config():
    """Manage configuration."""
    pass


@config.command()
@click.option('--path', type=click.Path(dir_okay=False), help='Configuration file path')
def init(path):
    """Create default configuration file."""
    try:
        config_path = ConfigManager.create_default_config(Path(path) if path else None)
        console.print(f"[green]Default configuration created at {config_path}[/green]")
        console.print("Edit this file to customize your settings.")
    except OSError as e:
        console.print(f"[red]Error creating configuration: {escape(str(e))}[/red]")
        sys.exit(EXIT_FALSE)


@config.command()
@click.option('--path', type=click.Path(exists=True, dir_okay=False), help='Configuration file path')
def show(path):
    """Display current configuration."""
    app_config = ConfigManager.load_config(Path(path) if path else None)

    table = Table(title="Current Configuration")
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")

    table.add_row("Assignment Budget", str(app_config.assignment_budget))
    table.add_row("Hom Outcome Budget", str(app_config.hom_outcome_budget))
    table.add_row("Procedure Budget", str(app_config.procedure_budget))
    table.add_row("Pivot Limit", str(app_config.pivot_limit))
    table.add_row("Default Mode", app_config.default_mode)
    table.add_row("Default Format", app_config.default_format)

    Console().print(table)


@cli.command()
def version():
    """Show version information."""
    from . import __version__
    click.echo(f"ctx-sim v{__version__}")


def main():
    """Main entry point."""
    cli()


if __name__ == '__main__':
    main()
