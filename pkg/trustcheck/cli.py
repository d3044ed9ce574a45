import argparse
import json
from enum import Enum
from importlib.metadata import version as get_version
from typing import Callable, Optional

import typer
from typing_extensions import Annotated

from .errors import TrustCheckError
from .model.report import RunReport
from .trustcheck import (
    run_belief,
    run_check,
    run_dump_expanded,
    run_dump_sccs,
    run_simulate,
    run_synth,
    run_validate,
)

app = typer.Typer(pretty_exceptions_show_locals=False)


class Engines(str, Enum):
    auto = "auto"
    bounded = "bounded"
    qualitative = "qualitative"
    direct = "direct"


class Modes(str, Enum):
    path = "path"
    belief_state = "belief-state"


def version_callback(value: bool):
    if value:
        print(f'trustcheck {get_version("trustcheck")}')
        raise typer.Exit()


ModelArg = Annotated[str, typer.Argument(help="Model file, or the name of a shipped model such as trust_game")]
FormulaArg = Annotated[str, typer.Argument(help="Formula, see docs/formula_grammar.md")]
AtOption = Annotated[
    Optional[str],
    typer.Option("--at", "-a", help="Context path as space separated state ids, e.g. 's0 s2 s5'"),
]
JsonOption = Annotated[bool, typer.Option("--json", "-j", help="Print the machine readable report")]
OutdirOption = Annotated[
    Optional[str], typer.Option("--outdir", "-o", help="Also write report, json and csv to this folder")
]
DebugOption = Annotated[bool, typer.Option("--debug", "-d", help="Debug mode")]
ValueOption = Annotated[bool, typer.Option("--value", help="Ask for the value of the outermost bounded operator")]


def _execute(driver: Callable[[argparse.Namespace], RunReport], args: argparse.Namespace):
    """Run a driver, print its report and leave with 0 (true), 1 (false) or 2 (error)."""
    try:
        report = driver(args)
    except TrustCheckError as e:
        typer.echo(f"error: {type(e).__name__}: {' '.join(str(e).split())}", err=True)
        raise typer.Exit(2)
    if args.json:
        typer.echo(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        typer.echo(report.to_text(), nl=False)
    raise typer.Exit(report.exit_code)


@app.callback()
def main(
    version: Annotated[
        Optional[bool],
        typer.Option(
            "--version",
            "-v",
            help="Print version and quit",
            is_eager=True,
            callback=version_callback,
        ),
    ] = False,
):
    """
    trustcheck is a model checker for beliefs and trust in stochastic multi-agent systems.
    Agents carry goals and intentions, observe the system partially and reason about each other.
    """


@app.command()
def check(
    model: ModelArg,
    formula: FormulaArg,
    at: AtOption = None,
    engine: Annotated[
        Engines, typer.Option("--engine", "-e", help="Engine, auto picks one from the fragment of the formula")
    ] = Engines.auto,
    mode: Annotated[
        Modes, typer.Option("--mode", "-m", help="Belief semantics of the direct engine")
    ] = Modes.path,
    value: ValueOption = False,
    json_out: JsonOption = False,
    outdir: OutdirOption = None,
    debug: DebugOption = False,
):
    """Check a formula on a model, from its initial states or at a context path."""
    args = argparse.Namespace(
        model=model,
        formula=formula,
        at=at,
        engine=engine.value,
        mode=mode.value,
        value=value,
        json=json_out,
        outdir=outdir,
        debug=debug,
    )
    _execute(run_check, args)


@app.command()
def belief(
    model: ModelArg,
    agent: Annotated[str, typer.Option("--agent", "-g", help="Observing agent")],
    trace: Annotated[
        Optional[str],
        typer.Option("--trace", "-t", help="Observation trace, e.g. 'o(s0) Alice.g o(s1)'"),
    ] = None,
    at: AtOption = None,
    asmas: Annotated[bool, typer.Option("--asmas", help="Explore the belief ASMAS of the agent")] = False,
    depth: Annotated[
        Optional[int],
        typer.Option("--depth", help="Depth of the belief ASMAS [default: belief_asmas_depth setting]"),
    ] = None,
    recursive: Annotated[
        bool, typer.Option("--recursive", "-r", help="Compute the belief by step-wise updates")
    ] = False,
    json_out: JsonOption = False,
    outdir: OutdirOption = None,
    debug: DebugOption = False,
):
    """Print an agent's belief after an observation trace, or its belief ASMAS."""
    args = argparse.Namespace(
        model=model,
        agent=agent,
        trace=trace,
        at=at,
        asmas=asmas,
        depth=depth,
        recursive=recursive,
        json=json_out,
        outdir=outdir,
        debug=debug,
    )
    _execute(run_belief, args)


@app.command()
def synth(
    model: ModelArg,
    formula: Annotated[
        Optional[str], typer.Option("--formula", "-f", help="Synthesize as far as this formula looks")
    ] = None,
    horizon: Annotated[
        Optional[int], typer.Option("--horizon", "-n", help="Longest path, in states, to synthesize on")
    ] = None,
    at: AtOption = None,
    json_out: JsonOption = False,
    outdir: OutdirOption = None,
    debug: DebugOption = False,
):
    """Print the synthesized cognitive strategies and updated preferences."""
    args = argparse.Namespace(
        model=model,
        formula=formula,
        horizon=horizon,
        at=at,
        json=json_out,
        outdir=outdir,
        debug=debug,
    )
    _execute(run_synth, args)


@app.command()
def simulate(
    model: ModelArg,
    seed: Annotated[Optional[int], typer.Option("--seed", "-s", help="Random seed")] = None,
    steps: Annotated[
        Optional[int], typer.Option("--steps", "-n", help="Rounds of cognitive and temporal steps")
    ] = None,
    runs: Annotated[
        int, typer.Option("--runs", "-r", help="Sample this many paths and print their frequencies")
    ] = 0,
    json_out: JsonOption = False,
    outdir: OutdirOption = None,
    debug: DebugOption = False,
):
    """Simulate the model with online beliefs of every agent."""
    args = argparse.Namespace(
        model=model,
        seed=seed,
        steps=steps,
        runs=runs,
        json=json_out,
        outdir=outdir,
        debug=debug,
    )
    _execute(run_simulate, args)


@app.command()
def validate(
    model: ModelArg,
    json_out: JsonOption = False,
    outdir: OutdirOption = None,
    debug: DebugOption = False,
):
    """Load a model and list every well-formedness violation."""
    args = argparse.Namespace(model=model, json=json_out, outdir=outdir, debug=debug)
    _execute(run_validate, args)


@app.command("dump-expanded")
def dump_expanded(
    model: ModelArg,
    formula: FormulaArg,
    at: AtOption = None,
    observer: Annotated[
        Optional[str], typer.Option("--observer", help="Annotate states with this agent's reachability")
    ] = None,
    value: ValueOption = False,
    json_out: JsonOption = False,
    outdir: OutdirOption = None,
    debug: DebugOption = False,
):
    """Check a bounded formula and print the expanded system it was checked on."""
    args = argparse.Namespace(
        model=model,
        formula=formula,
        at=at,
        observer=observer,
        value=value,
        json=json_out,
        outdir=outdir,
        debug=debug,
    )
    _execute(run_dump_expanded, args)


@app.command("dump-sccs")
def dump_sccs(
    model: ModelArg,
    formula: FormulaArg,
    json_out: JsonOption = False,
    outdir: OutdirOption = None,
    debug: DebugOption = False,
):
    """Check a qualitative formula and print the classified product components."""
    args = argparse.Namespace(model=model, formula=formula, json=json_out, outdir=outdir, debug=debug)
    _execute(run_dump_sccs, args)
