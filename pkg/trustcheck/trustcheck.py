#!/usr/bin/env python
import logging
import os
import time
from fractions import Fraction
from importlib.metadata import version as get_version

from .checkers.bounded import BoundedChecker
from .checkers.qualitative import check_qualitative
from .engine.belief import BeliefEngine, observation_trace, parse_trace
from .engine.prob import ProbEngine
from .engine.semantics import EvalMode, Verdict
from .engine.simulate import Simulator
from .engine.synthesis import (
    HistoryPreferences,
    Synthesizer,
    check_direct,
    pipeline_horizon,
    preference_rows,
    run_pipeline,
)
from .errors import FragmentError, ModelError
from .logic.formula import Formula, as_query, to_text
from .logic.fragment import FragmentClass, classify_fragment
from .logic.parser import parse_formula
from .model.asmas import Asmas, FinitePath
from .model.loader import load_model
from .model.report import ResultRow, RunReport
from .model.validate import validate_model
from .settings import Settings, load_settings

logging.basicConfig(level=logging.INFO)
log = logging.getLogger("trustcheck")

ENGINES = ("auto", "bounded", "qualitative", "direct")


def _start(command: str, args) -> tuple[Settings, str]:
    version = get_version("trustcheck")
    if args.debug:
        log.setLevel(logging.DEBUG)
    log.info(f" version {version}")
    log.info(f" {command} arguments {vars(args)}")
    settings = load_settings()
    assert isinstance(settings, Settings)
    return settings.override(simulate_seed=getattr(args, "seed", None)), version


def _load(args, settings: Settings) -> Asmas:
    started = time.perf_counter()
    model = load_model(args.model, settings)
    log.debug(f" loaded {args.model} in {time.perf_counter() - started:.3f}s")
    return model


def _context(model: Asmas, at: str | None) -> FinitePath | None:
    return model.path_from_ids(at) if at else None


def _formula(model: Asmas, text: str, value: bool = False) -> Formula:
    formula = parse_formula(text, model)
    return as_query(formula) if value else formula


def _row(formula: Formula, at: FinitePath | None, engine: str, verdict: Verdict) -> ResultRow:
    where = str(at) if at is not None else None
    if isinstance(verdict, Fraction):
        return ResultRow(to_text(formula), where, engine, value=verdict)
    return ResultRow(to_text(formula), where, engine, verdict=bool(verdict))


def select_engine(formula: Formula, requested: str, nesting_depth: int) -> str:
    """The engine a check runs on; auto follows the fragment of the formula."""
    if requested not in ENGINES:
        raise FragmentError(f"unknown engine '{requested}', expected one of {', '.join(ENGINES)}")
    if requested != "auto":
        return requested
    fragment = classify_fragment(formula, nesting_depth)
    if fragment is FragmentClass.BPRTL:
        return "bounded"
    if fragment is FragmentClass.PQRTL1:
        return "qualitative"
    return "direct"


def finish(report: RunReport, args) -> RunReport:
    """Write the report files when an output folder was given."""
    if getattr(args, "outdir", None):
        os.makedirs(args.outdir, exist_ok=True)
        report.write_report(args.outdir)
        report.write_json(args.outdir)
        report.write_dataframe(args.outdir)
        log.info(f" reports written to {args.outdir}")
    return report


def run_check(args) -> RunReport:
    settings, version = _start("check", args)
    model = _load(args, settings)
    report = RunReport("check", model.name, version, settings.include_timings)
    formula = _formula(model, args.formula, args.value)
    at = _context(model, args.at)
    engine = select_engine(formula, args.engine, settings.belief_nesting_depth)
    log.info(f" checking {to_text(formula)} with the {engine} engine")

    started = time.perf_counter()
    if engine == "bounded":
        result = run_pipeline(model, formula, settings, at)
        report.add_result(_row(formula, at, engine, result.verdict))
        report.add_table("synthesis", [e.to_dict() for e in result.synthesis.entries])
        if result.preferences:
            report.add_table("preferences", result.preferences)
        for w in result.warnings:
            report.add_warning(w)
    elif engine == "qualitative":
        if at is not None:
            report.add_warning("the qualitative engine checks from the initial states, --at is ignored")
        qualitative = check_qualitative(model, formula, Synthesizer(model))
        report.add_result(_row(formula, None, engine, qualitative.verdict))
        if qualitative.counterexample is not None:
            report.add_section("counterexample", f"psi-state {qualitative.counterexample}")
        for w in qualitative.warnings:
            report.add_warning(w)
    else:
        mode = EvalMode(getattr(args, "mode", EvalMode.path.value))
        verdict = check_direct(model, formula, at, mode)
        report.add_result(_row(formula, at, engine, verdict))
    report.add_timing(engine, time.perf_counter() - started)
    return finish(report, args)


def run_belief(args) -> RunReport:
    settings, version = _start("belief", args)
    model = _load(args, settings)
    report = RunReport("belief", model.name, version, settings.include_timings)
    synthesizer = Synthesizer(model)
    beliefs = BeliefEngine(
        ProbEngine(model, HistoryPreferences(model, synthesizer), synthesizer), settings.belief_asmas_depth
    )

    if args.asmas:
        exploration = beliefs.explore(args.agent, args.depth)
        report.add_section(f"belief ASMAS of {args.agent} to depth {exploration.depth}", exploration.to_text())
        report.add_table(
            "belief_states", [{"id": f"b{i}", "belief": str(b)} for i, b in enumerate(exploration.states)]
        )
        return finish(report, args)

    if args.trace:
        trace = parse_trace(model, args.agent, args.trace)
    elif args.at:
        trace = observation_trace(model, args.agent, model.path_from_ids(args.at))
    else:
        raise ModelError("belief needs one of --trace, --at or --asmas")
    assignment = beliefs.recursive_assignment(trace) if args.recursive else beliefs.assignment(trace)
    weights = assignment.to_dict()
    report.add_section(
        f"belief of {args.agent} after {trace}",
        "{" + ", ".join(f"{p}: {w}" for p, w in weights.items()) + "}",
    )
    report.add_table("belief", [{"path": p, "weight": w} for p, w in weights.items()])
    return finish(report, args)


def run_synth(args) -> RunReport:
    settings, version = _start("synth", args)
    model = _load(args, settings)
    report = RunReport("synth", model.name, version, settings.include_timings)
    at = _context(model, args.at)
    if args.horizon is not None:
        horizon = args.horizon
    elif args.formula:
        horizon = pipeline_horizon(_formula(model, args.formula), at)
    else:
        horizon = len(at) if at is not None else 1
    started = time.perf_counter()
    synthesizer = Synthesizer(model)
    table = synthesizer.synthesize(horizon)
    report.add_timing("synthesis", time.perf_counter() - started)
    report.add_section("strategies", table.to_text())
    report.add_table("synthesis", [e.to_dict() for e in table.entries])
    rows = preference_rows(model, HistoryPreferences(model, synthesizer), horizon)
    if rows:
        report.add_section(
            "updated preferences",
            "\n".join(f"{r['owner']} over {r['over']} at {r['path']}: {r['goal']} {r['intention']}" for r in rows),
        )
        report.add_table("preferences", rows)
    for problem in synthesizer.check_uniformity(horizon):
        report.add_warning(f"strategy not uniform on its observation class: {problem}")
    if table.undefined:
        report.add_warning(f"synthesis skipped {len(table.undefined)} observation class(es) of probability zero")
    return finish(report, args)


def run_simulate(args) -> RunReport:
    settings, version = _start("simulate", args)
    model = _load(args, settings)
    report = RunReport("simulate", model.name, version, settings.include_timings)
    steps = args.steps if args.steps is not None else settings.simulate_steps
    synthesizer = Synthesizer(model)
    simulator = Simulator(model, synthesizer, HistoryPreferences(model, synthesizer), settings.simulate_seed)
    if args.runs:
        counts = simulator.frequencies(args.runs, steps)
        rows = [
            {"path": path, "count": n, "frequency": n / args.runs}
            for path, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        ]
        report.add_section(
            f"{args.runs} run(s) with seed {settings.simulate_seed}",
            "\n".join(f"{r['count']:>8} {r['path']}" for r in rows),
        )
        report.add_table("frequencies", rows)
        return finish(report, args)
    trace = simulator.run(steps)
    report.add_section("simulation", trace.to_text())
    report.add_table("simulation", trace.to_rows())
    return finish(report, args)


def run_validate(args) -> RunReport:
    settings, version = _start("validate", args)
    model = load_model(args.model, settings, validate=False)
    report = RunReport("validate", model.name, version, settings.include_timings)
    validation = validate_model(model)
    report.add_result(ResultRow("model is valid", None, "validate", verdict=validation.clean))
    report.add_section("validation", validation.to_text())
    report.add_table("violations", [{"code": v.code, "message": v.message} for v in validation.violations])
    return finish(report, args)


def run_dump_expanded(args) -> RunReport:
    settings, version = _start("dump-expanded", args)
    model = _load(args, settings)
    report = RunReport("dump-expanded", model.name, version, settings.include_timings)
    formula = _formula(model, args.formula, args.value)
    at = _context(model, args.at)
    synthesizer = Synthesizer(model)
    synthesizer.synthesize(pipeline_horizon(formula, at))
    checker = BoundedChecker(
        model, HistoryPreferences(model, synthesizer), synthesizer, settings.belief_nesting_depth
    )
    verdict = checker.check(formula, at)
    report.add_result(_row(formula, at, "bounded", verdict))
    report.add_section("expanded system", checker.system.to_text(args.observer))
    return finish(report, args)


def run_dump_sccs(args) -> RunReport:
    settings, version = _start("dump-sccs", args)
    model = _load(args, settings)
    report = RunReport("dump-sccs", model.name, version, settings.include_timings)
    formula = _formula(model, args.formula)
    result = check_qualitative(model, formula, Synthesizer(model))
    report.add_result(_row(formula, None, "qualitative", result.verdict))
    report.add_section("components", result.sccs_text())
    report.add_table("components", [{"component": c.to_text(), "qualifying": c.qualifying} for c in result.components])
    for w in result.warnings:
        report.add_warning(w)
    return finish(report, args)
