"""Command line entry point: ``rvforce <command> ...``.

Errors are reported on stderr as one line ``error: <code>: <message>`` with a
nonzero exit status.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path

import click

from .errors import RVForceError, ScenarioError
from .evaluator import Evaluator
from .logic import Exists, Forall, classify_formula, free_variables, is_open
from .parser import render_formula
from .report import FORMATS, emit_report
from .saturation import check_satur, realize_existential_type, realize_open_type
from .scenario import Scenario, load_scenario, load_type_file
from .universal import build_universal_failure
from .witnessing import POLICIES, cowitness_universal, skolem_chain, witness_existential

EXIT_ERROR = 2


def _settings(ctx: click.Context, report: str | None, workers: int | None) -> tuple[str, int]:
    obj = ctx.find_root().obj or {}
    return report or obj.get("report", "text"), workers or obj.get("workers", 1)


def _common(f):
    f = click.option("--workers", type=click.IntRange(1), default=None,
                     help="Worker threads for quantifier evaluation.")(f)
    f = click.option("--report", "report", type=click.Choice(FORMATS), default=None,
                     help="Report format.")(f)
    f = click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
                     help="Write the report here instead of stdout.")(f)
    return f


def _emit(result, fmt: str, out: Path | None) -> None:
    if out is None:
        emit_report(result, fmt, sys.stdout)
        return
    try:
        with out.open("w") as fh:
            emit_report(result, fmt, fh)
    except OSError as e:
        raise ScenarioError(f"cannot write {out}: {e.strerror}") from None


def _formula(scen: Scenario, spec: str):
    """Formula from a scenario name, ``@file`` or literal text."""
    if spec in scen.formulas:
        return scen.formula(spec)
    if spec.startswith("@"):
        path = Path(spec[1:])
        try:
            return scen.parse(path.read_text().strip())
        except OSError as e:
            raise ScenarioError(f"cannot read {path}: {e.strerror}") from None
    return scen.parse(spec)


def _eps(scen: Scenario, eps: str | None) -> Fraction:
    if eps is None:
        return scen.eps
    try:
        value = Fraction(eps)
    except (ValueError, ZeroDivisionError):
        raise ScenarioError(f"bad eps {eps!r}") from None
    if value < 0:
        raise ScenarioError("eps must be non-negative")
    return value


scenario_opt = click.option("--scenario", "scenario_path", required=True,
                            type=click.Path(exists=True, dir_okay=False, path_type=Path))


@click.group()
@click.option("--report", type=click.Choice(FORMATS), default="text", show_default=True,
              help="Default report format.")
@click.option("--workers", type=click.IntRange(1), default=1, show_default=True,
              help="Default worker count.")
@click.pass_context
def cli(ctx: click.Context, report: str, workers: int) -> None:
    """Boolean-valued evaluation of formulas over families of random variables."""
    ctx.obj = {"report": report, "workers": workers}


@cli.command("eval")
@scenario_opt
@click.option("--formula", "formula_spec", required=True,
              help="Formula text, @file, or a named formula of the scenario.")
@click.option("--bind", multiple=True, metavar="VAR=RV", help="Bind a free variable to a random variable.")
@click.option("--eps", default=None, help="Tolerance (defaults to the scenario's).")
@_common
@click.pass_context
def eval_cmd(ctx, scenario_path, formula_spec, bind, eps, out, report, workers):
    """Truth value of a formula as an event."""
    fmt, workers = _settings(ctx, report, workers)
    scen = load_scenario(scenario_path)
    f = _formula(scen, formula_spec)
    env = {}
    for item in bind:
        var, sep, name = item.partition("=")
        if not sep:
            raise ScenarioError(f"--bind expects VAR=RV, got {item!r}")
        env[var.strip()] = scen.family.lookup(name.strip())
    tol = _eps(scen, eps)
    value = Evaluator(scen.family, workers=workers).event(f, env)
    result = {
        "formula": render_formula(f),
        "class": classify_formula(f),
        "bindings": {k: v.name for k, v in env.items()},
        "value": value,
        "eps": tol,
        "valid": value.measure() >= 1 - tol,
    }
    _emit(result, fmt, out)


@cli.command()
@scenario_opt
@click.option("--formula", "formula_spec", required=True,
              help="(exists x)A, (forall y)C, or an open formula with --var.")
@click.option("--var", default=None, help="Variable to witness when the formula is open.")
@click.option("--universal", is_flag=True, help="Treat an open formula as the body of a forall.")
@click.option("--policy", type=click.Choice(POLICIES), default="synthesize", show_default=True)
@_common
@click.pass_context
def witness(ctx, scenario_path, formula_spec, var, universal, policy, out, report, workers):
    """Witness for an existential or counter-witness for a universal formula."""
    fmt, workers = _settings(ctx, report, workers)
    scen = load_scenario(scenario_path)
    f = _formula(scen, formula_spec)
    if isinstance(f, (Exists, Forall)) and is_open(f.body):
        universal, var, body = isinstance(f, Forall), f.var, f.body
    else:
        body = f
        if var is None:
            free = sorted(free_variables(f))
            if len(free) != 1:
                raise ScenarioError("give --var: cannot infer the witnessed variable")
            var = free[0]
    ev = Evaluator(scen.family, workers=workers)
    run = cowitness_universal if universal else witness_existential
    _emit(run(body, var, None, scen.family, policy, evaluator=ev), fmt, out)


@cli.command()
@scenario_opt
@click.option("--formula", "formula_spec", required=True)
@click.option("--policy", type=click.Choice(POLICIES), default="synthesize", show_default=True)
@_common
@click.pass_context
def skolemize(ctx, scenario_path, formula_spec, policy, out, report, workers):
    """Stage-by-stage witnesses for an exists/forall prefix formula."""
    fmt, workers = _settings(ctx, report, workers)
    scen = load_scenario(scenario_path)
    f = _formula(scen, formula_spec)
    ev = Evaluator(scen.family, workers=workers)
    _emit(skolem_chain(f, scen.family, policy, evaluator=ev), fmt, out)


type_opt = click.option("--type", "type_path", required=True,
                        type=click.Path(exists=True, dir_okay=False, path_type=Path),
                        help="Type file: one formula per line.")


@cli.command()
@scenario_opt
@type_opt
@click.option("--eps", default=None)
@click.option("--policy", type=click.Choice(POLICIES), default="synthesize", show_default=True)
@click.option("--closure-depth", type=click.IntRange(0), default=0, show_default=True,
              help="Term-closure depth for existential types.")
@click.option("--thin", is_flag=True, help="Thin the chain to meet the measure-drop bound.")
@click.option("--var", default="x", show_default=True)
@_common
@click.pass_context
def realize(ctx, scenario_path, type_path, eps, policy, closure_depth, thin, var, out, report, workers):
    """Realize an open or existential type and report the saturation profile."""
    fmt, workers = _settings(ctx, report, workers)
    scen = load_scenario(scenario_path)
    p = load_type_file(type_path, scen.constants, var)
    tol = _eps(scen, eps)
    if p.kind == "open" and closure_depth == 0:
        ev = Evaluator(scen.family, workers=workers)
        result = realize_open_type(p, scen.family, tol, policy, thin=thin, evaluator=ev)
    elif p.kind in ("open", "existential"):
        result = realize_existential_type(p, scen.family, tol, closure_depth, policy=policy,
                                          thin=thin, workers=workers)
    else:
        raise ScenarioError(f"realize handles open or existential types, this one is {p.kind}")
    _emit(result, fmt, out)


@cli.command("check-satur")
@scenario_opt
@type_opt
@click.option("--witness", "witness_name", required=True, help="Random variable to test.")
@click.option("--eps", default=None)
@click.option("--var", default="x", show_default=True)
@_common
@click.pass_context
def check_satur_cmd(ctx, scenario_path, type_path, witness_name, eps, var, out, report, workers):
    """Both sides of the saturation inequality at a given random variable."""
    fmt, workers = _settings(ctx, report, workers)
    scen = load_scenario(scenario_path)
    p = load_type_file(type_path, scen.constants, var)
    u = scen.family.lookup(witness_name)
    _emit(check_satur(p, u, scen.family, _eps(scen, eps), workers=workers), fmt, out)


@cli.group()
def demo() -> None:
    """Built-in scenarios."""


@demo.command("universal-failure")
@click.option("--n", "n", type=int, default=256, show_default=True, help="Sample bit width.")
@click.option("--levels", type=int, default=4, show_default=True)
@click.option("--samples", type=int, default=1024, show_default=True)
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--horizon", type=int, default=3, show_default=True, help="Prefix length for the left side.")
@click.option("--depth", type=int, default=4, show_default=True, help="Prefix length for the deep meet.")
@_common
@click.pass_context
def universal_failure(ctx, n, levels, samples, seed, horizon, depth, out, report, workers):
    """Length-budget filtration where a universal type has no witness in the core."""
    fmt, workers = _settings(ctx, report, workers)
    result = build_universal_failure(n, levels, samples, seed, horizon, depth, workers=workers)
    _emit(result, fmt, out)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="rvforce", standalone_mode=False)
    except RVForceError as e:
        click.echo(f"error: {e.code}: {e}", err=True)
        return EXIT_ERROR
    except ValueError as e:
        click.echo(f"error: invalid: {e}", err=True)
        return EXIT_ERROR
    except click.exceptions.Abort:
        click.echo("error: aborted: interrupted", err=True)
        return EXIT_ERROR
    except click.ClickException as e:
        click.echo(f"error: usage: {e.format_message()}", err=True)
        return EXIT_ERROR
    return 0


if __name__ == "__main__":
    sys.exit(main())
