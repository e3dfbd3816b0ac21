"""
Command-line front end.

    robpareto classify --builtin problem-1
    robpareto scalarize --builtin problem-2 --u wsum:w=0.5,0.5
    robpareto --emit out sweep --phantom default --p 1,2,10 --scale

Library errors are reported on stderr with their exit code: 2 for bad
input, 3 for empty or degenerate models, 4 when output cannot be written.
"""
import functools
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import click
import numpy as np

from .config import DEFAULT_REFINEMENTS, DEFAULT_STEP, EQ_TOL, STRICT_TOL, THREADS_ENV, Tolerances, thread_count
from .core import format_coordinate, rescaled
from .distro import to_robust
from .efficiency import CONVEX_HULL, ROBUST, classify, verify_report
from .errors import DomainError, InvariantViolation, RobParetoError
from .figures import certificate_csv, image_csv, report_csv, scatter_svg, solve_csv, trace_csv, write_atomic
from .geometry import DominanceMode
from .instances import BUILTINS, builtin, dump_instance, load_document, save_instance
from .phantom import PhantomConfig, generate
from .scalarize import WeightedPNorm, constructive_scalarizer, parse_scalarizer, worst_case_values
from .solve import SolveMethod, minimize_scalarized, sweep_front

logger = logging.getLogger(__name__)


@dataclass
class RunManifest:
    command: str
    source: str = None
    scalarizers: list = field(default_factory=list)
    step: float = DEFAULT_STEP
    eq_tol: float = EQ_TOL
    strict_tol: float = STRICT_TOL
    seed: int = 0
    threads: int = 1
    outputs: list = field(default_factory=list)
    wall_clock: float = 0.0

    def to_json(self):
        return json.dumps(asdict(self), indent=1) + "\n"


@dataclass
class RunContext:
    step: float
    tol: Tolerances
    seed: int
    emit: str
    threads: int
    started: float = field(default_factory=time.perf_counter)

    def manifest(self, command, source):
        return RunManifest(command, source, step=self.step, eq_tol=self.tol.eq_tol,
                           strict_tol=self.tol.strict_tol, seed=self.seed, threads=self.threads)

    def emit_file(self, manifest, name, text, directory=None):
        path = os.path.join(directory or self.emit, name)
        write_atomic(path, text)
        manifest.outputs.append(path)
        return path

    def override(self, step=None, eq_tol=None, strict_tol=None, seed=None, emit=None):
        if step is not None:
            self.step = step
        if eq_tol is not None or strict_tol is not None:
            self.tol = Tolerances(self.tol.eq_tol if eq_tol is None else eq_tol,
                                  self.tol.strict_tol if strict_tol is None else strict_tol)
        if seed is not None:
            self.seed = seed
        if emit is not None:
            self.emit = emit

    def finish(self, manifest, directory=None):
        directory = directory or self.emit
        manifest.wall_clock = round(time.perf_counter() - self.started, 6)
        if directory:
            path = os.path.join(directory, "manifest.json")
            manifest.outputs.append(path)
            write_atomic(path, manifest.to_json())


def reports_errors(command):
    """Turn library errors into a message on stderr and the error's exit code."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except RobParetoError as err:
            click.echo(f"Error: {err}", err=True)
            sys.exit(err.exit_code)
    return wrapper


def instance_options(command):
    command = click.option("--builtin", "builtin_name", type=click.Choice(BUILTINS),
                           help="Use a built-in instance.")(command)
    command = click.option("--instance", "instance_path", type=click.Path(dir_okay=False),
                           help="Instance JSON file.")(command)
    command = click.option("--dro", is_flag=True,
                           help="Transform by the file's ambiguity block before solving.")(command)
    return command


def run_options(command):
    """Accept the global run settings after the sub-command name as well; given values win."""
    @functools.wraps(command)
    def wrapper(run, *args, step=None, eq_tol=None, strict_tol=None, seed=None, emit=None, **kwargs):
        run.override(step, eq_tol, strict_tol, seed, emit)
        return command(run, *args, **kwargs)
    wrapper = click.option("--emit", type=click.Path(file_okay=False), default=None,
                           help="Directory for CSV/SVG/manifest output.")(wrapper)
    wrapper = click.option("--seed", type=int, default=None, help="Seed recorded in the run manifest.")(wrapper)
    wrapper = click.option("--strict-tol", type=float, default=None)(wrapper)
    wrapper = click.option("--eq-tol", type=float, default=None)(wrapper)
    wrapper = click.option("--step", type=float, default=None, help="Lattice step on the decision simplex.")(wrapper)
    return wrapper


def _load(run, builtin_name, instance_path, dro=False):
    if (builtin_name is None) == (instance_path is None):
        raise DomainError("give exactly one of --builtin or --instance")
    if builtin_name is not None:
        if dro:
            raise DomainError("--dro needs an instance file with an ambiguity block")
        return builtin(builtin_name, run.step), builtin_name
    instance, ambiguity, constraint = load_document(instance_path)
    if dro:
        if ambiguity is None:
            raise DomainError(f"{instance_path} has no ambiguity block")
        instance = to_robust(instance, ambiguity, constraint, run.tol)
    return instance, instance_path


@click.group()
@click.option("--step", type=float, default=DEFAULT_STEP, show_default=True,
              help="Lattice step on the decision simplex.")
@click.option("--eq-tol", type=float, default=EQ_TOL, show_default=True)
@click.option("--strict-tol", type=float, default=STRICT_TOL, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True, help="Seed recorded in the run manifest.")
@click.option("--emit", type=click.Path(file_okay=False), default=None, help="Directory for CSV/SVG/manifest output.")
@click.option("--threads", type=str, envvar=THREADS_ENV, default=None, help="Worker thread cap.")
@click.option("-v", "--verbose", count=True)
@click.pass_context
@reports_errors
def main(ctx, step, eq_tol, strict_tol, seed, emit, threads, verbose):
    """Robust multiobjective efficiency and scalarization."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("robpareto").setLevel(level)
    ctx.obj = RunContext(step, Tolerances(eq_tol, strict_tol), seed, emit, thread_count(threads))


@main.command("classify")
@instance_options
@click.option("--verify", is_flag=True, help="Re-check every dominance witness.")
@click.pass_obj
@reports_errors
@run_options
def cmd_classify(run, builtin_name, instance_path, dro, verify):
    """Label every candidate robust, convex hull and objectivewise efficient."""
    instance, source = _load(run, builtin_name, instance_path, dro)
    manifest = run.manifest("classify", source)
    report = classify(instance, run.tol, run.threads)
    if verify:
        failures = verify_report(instance, report, run.tol)
        if failures:
            raise InvariantViolation(f"{len(failures)} dominance witnesses failed re-verification")
    text = report_csv(report)
    click.echo(text, nl=False)
    if run.emit:
        run.emit_file(manifest, "classify.csv", text)
    run.finish(manifest)


def _print_result(result):
    click.echo(f"candidate: {result.label}")
    click.echo(f"value: {result.value:.12g}")
    click.echo(f"method: {result.method.value}")
    click.echo(f"evaluations: {result.evaluations}")
    click.echo(f"worst_scenario: {result.scenario}")


@main.command("scalarize")
@instance_options
@click.option("--u", "spec", required=True, help="Scalarizer, e.g. pnorm:p=2,w=1,ref=0 or wsum:w=0.5,0.5.")
@click.option("--method", type=click.Choice(["auto"] + [m.value for m in SolveMethod]), default="auto")
@click.option("--refinements", type=int, default=DEFAULT_REFINEMENTS, show_default=True)
@click.option("--trace", is_flag=True, help="Print the per-scenario values of the optimum.")
@click.pass_obj
@reports_errors
@run_options
def cmd_scalarize(run, builtin_name, instance_path, dro, spec, method, refinements, trace):
    """Minimize the worst-case value of one scalarizing function."""
    instance, source = _load(run, builtin_name, instance_path, dro)
    u = parse_scalarizer(spec, instance)
    manifest = run.manifest("scalarize", source)
    manifest.scalarizers.append(u.spec())
    result = minimize_scalarized(instance, u, refinements=refinements, method=method, threads=run.threads)
    _print_result(result)
    if trace:
        click.echo(trace_csv(instance, u, result.candidate), nl=False)
    if run.emit:
        run.emit_file(manifest, "solve.csv", solve_csv([(u.spec(), result)]))
        run.emit_file(manifest, "trace.csv", trace_csv(instance, u, result.candidate))
    run.finish(manifest)


def _p_values(text):
    values = []
    for part in (text or "").split(","):
        part = part.strip()
        if not part:
            continue
        try:
            values.append(np.inf if part in ("inf", "infinity") else float(part))
        except ValueError:
            raise DomainError(f"not a p value: {part!r}")
    if not values:
        raise DomainError("--p needs at least one value")
    return values


def _p_name(p):
    return "inf" if np.isinf(p) else format_coordinate(p)


@main.command("sweep")
@instance_options
@click.option("--phantom", "phantom_source", default=None,
              help='"default" or a JSON file of phantom settings.')
@click.option("--p", "p_text", required=True, help="Comma-separated p values, e.g. 1,2,10.")
@click.option("--w", "w_text", default="1", show_default=True, help="p-norm weights.")
@click.option("--ref", "ref_text", default="0", show_default=True, help="p-norm reference point.")
@click.option("--scale", is_flag=True, help="Rescale every objective to [0, 1] first.")
@click.pass_obj
@reports_errors
@run_options
def cmd_sweep(run, builtin_name, instance_path, dro, phantom_source, p_text, w_text, ref_text, scale):
    """Minimize weighted p-norm distances for several p and emit the optimal images."""
    ps = _p_values(p_text)
    if phantom_source is not None:
        if builtin_name or instance_path:
            raise DomainError("--phantom replaces --builtin and --instance")
        cfg = PhantomConfig() if phantom_source == "default" else _phantom_config(phantom_source)
        instance, source = generate(cfg, name=f"phantom-{phantom_source}"), f"phantom:{phantom_source}"
    else:
        instance, source = _load(run, builtin_name, instance_path, dro)
    if scale:
        instance = rescaled(instance)
    base = parse_scalarizer(f"pnorm:w={w_text},ref={ref_text}")
    family = [WeightedPNorm(base.weights, p, base.reference) for p in ps]
    manifest = run.manifest("sweep", source)
    manifest.scalarizers.extend(u.spec() for u in family)
    results = sweep_front(instance, family, threads=run.threads)
    text = solve_csv(results)
    click.echo(text, nl=False)
    directory = run.emit
    if directory:
        run.emit_file(manifest, "sweep.csv", text, directory)
        for u, (_, result) in zip(family, results):
            name = f"sweep-p{_p_name(u.p)}"
            run.emit_file(manifest, f"{name}.csv", image_csv(instance, result.candidate), directory)
            if instance.n == 2:
                points = instance.image(result.candidate).points
                svg = scatter_svg(points, u, result.value, scaled=scale,
                                  title=f"{instance.name} p={_p_name(u.p)} optimum {result.label}")
                run.emit_file(manifest, f"{name}.svg", svg, directory)
    run.finish(manifest, directory)


def _phantom_config(path):
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, ValueError) as err:
        raise DomainError(f"cannot read phantom settings {path}: {err}")
    return PhantomConfig.from_dict(data)


@main.command("phantom")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON file of phantom settings.")
@click.option("--levels", type=int, default=None, help="Spot-weight lattice levels.")
@click.option("--shifts", default=None, help="Comma-separated integer shifts.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None,
              help="Instance file to write; stdout when omitted and no --emit is given.")
@click.pass_obj
@reports_errors
@run_options
def cmd_phantom(run, config_path, levels, shifts, output):
    """Generate the dose phantom instance."""
    cfg = _phantom_config(config_path) if config_path else PhantomConfig()
    overrides = cfg.to_dict()
    if levels is not None:
        overrides["levels"] = levels
    if shifts is not None:
        try:
            overrides["shifts"] = [int(v) for v in shifts.split(",") if v.strip()]
        except ValueError:
            raise DomainError(f"shifts must be integers, got {shifts!r}")
    cfg = PhantomConfig.from_dict(overrides)
    instance = generate(cfg)
    manifest = run.manifest("phantom", config_path or "default")
    if output is None and run.emit:
        output = os.path.join(run.emit, "phantom.json")
    if output is None:
        click.echo(json.dumps(dump_instance(instance), indent=1))
    else:
        save_instance(instance, output)
        manifest.outputs.append(output)
        click.echo(f"wrote {len(instance.candidates)} candidates to {output}")
    run.finish(manifest)


@main.command("report")
@instance_options
@click.option("--candidate", "anchors", multiple=True, help="Restrict to these candidates.")
@click.pass_obj
@reports_errors
@run_options
def cmd_report(run, builtin_name, instance_path, dro, anchors):
    """Constructive scalarizer certificates for efficient candidates."""
    instance, source = _load(run, builtin_name, instance_path, dro)
    manifest = run.manifest("report", source)
    report = classify(instance, run.tol, run.threads)
    chosen = [instance.resolve(a) for a in anchors] or list(instance.candidates)
    rows = []
    for cand in chosen:
        entry = report.entry(cand)
        for mode, name in ((DominanceMode.PLAIN, ROBUST), (DominanceMode.HULL, CONVEX_HULL)):
            u = constructive_scalarizer(instance, cand, mode)
            values = worst_case_values(u, instance)
            own = float(values[instance.candidates.index(cand)])
            k = int(np.argmin(values))
            rows.append((cand.label, mode, entry.label(name), own, float(values[k]), instance.candidates[k].label))
    text = certificate_csv(rows)
    click.echo(text, nl=False)
    if run.emit:
        run.emit_file(manifest, "report.csv", text)
    run.finish(manifest)
