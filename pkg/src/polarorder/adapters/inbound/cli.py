# src/polarorder/adapters/inbound/cli.py
"""
polarorder command line: synthesize polar channels, compare channels under the
stochastic orders, build information sets and rerun the Z-channel/BSC study.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional

import typer
from loguru import logger
from typing_extensions import Annotated

from polarorder.adapters.inbound.run_config import RunConfig
from polarorder.adapters.outbound.channel_loader import ChannelSpecLoader
from polarorder.adapters.outbound.report_writer import (
    FileReportWriter,
    render_containment_grid_json,
    render_containment_json,
    render_distribution_csv,
    render_infoset_csv,
    render_infoset_summary,
    render_summary_json,
    render_verdict_json,
)
from polarorder.adapters.outbound.solver_factory import get_feasibility_solver
from polarorder.config import load_config, setup_logging
from polarorder.core.channel import delta_distribution, is_symmetric
from polarorder.core.delta import channel_parameters
from polarorder.core.errors import PolarOrderError
from polarorder.core.examples import zbsc_study
from polarorder.core.functionals import parse_functional
from polarorder.core.infoset import build_info_set, containment_grid
from polarorder.core.ordering import ORDER_METHODS, order_check
from polarorder.core.polar import synthesize

app = typer.Typer(
    name="polarorder",
    help="Stochastic ordering of binary-input channels under polar transforms.",
    add_completion=False,
)

DEFAULT_P_GRID = [0.1, 0.25, 0.5, 0.75, 0.9]
DEFAULT_PHI = "bhattacharyya_complement"
DEFAULT_EPS = 0.1

_loader = ChannelSpecLoader()
_writer = FileReportWriter()


def _config(ctx: typer.Context) -> Dict[str, Any]:
    return ctx.obj if ctx.obj is not None else load_config()


def _fail(error: Exception) -> None:
    typer.echo(f"❌ Error: {error}", err=True)
    raise typer.Exit(code=2)


def _emit(content: str, destination: Optional[Path]) -> None:
    _writer.write(content, None if destination is None else str(destination))


@app.callback()
def main(
    ctx: typer.Context,
    config_path: Annotated[Optional[Path], typer.Option("--config", help="Path to a YAML config file.")] = None,
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="Overrides logging.level.")] = None,
):
    """Loads the configuration and sets up logging for every subcommand."""
    try:
        config = load_config(config_path)
    except (FileNotFoundError, ValueError) as e:
        _fail(e)
    if log_level:
        config["logging"]["level"] = log_level
    setup_logging(config)
    ctx.obj = config


@app.command("synth")
def cmd_synth(
    ctx: typer.Context,
    channel: Annotated[Path, typer.Option("--channel", "-c", help="Channel spec file.")],
    sequence: Annotated[str, typer.Option("--sequence", "-s", help="Sign sequence such as '+-+'.")] = "",
    budget: Annotated[Optional[int], typer.Option("--budget", help="Atom budget after each transform.")] = None,
    exact: Annotated[bool, typer.Option("--exact", help="Disable quantization.")] = False,
    tol: Annotated[Optional[float], typer.Option("--tol", help="Atoms closer than this are merged.")] = None,
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="Where to write the distribution CSV.")] = None,
    summary: Annotated[Optional[Path], typer.Option("--summary", help="Where to write the summary JSON.")] = None,
):
    """Delta distribution of W^s as CSV plus a functional summary as JSON."""
    config = _config(ctx)
    try:
        run = RunConfig(
            subcommand="synth", channels=[channel], sequence=sequence, budget=budget,
            exact=exact, tol=tol, output=output,
        )
        effective = run.effective_budget(config)
        merge_tol = run.tol if run.tol is not None else float(config["delta"]["merge_tol"])
        dist = synthesize(
            delta_distribution(_loader.load(channel)),
            run.sequence,
            budget=effective,
            max_atoms=int(config["polar"]["max_atoms"]),
            merge_tol=merge_tol,
        )
    except (PolarOrderError, ValueError, FileNotFoundError) as e:
        _fail(e)

    payload = {"sequence": run.sequence, "budget": effective, "merge_tol": merge_tol, **channel_parameters(dist)}
    _emit(render_distribution_csv(dist), run.output)
    _emit(render_summary_json(payload), summary)


@app.command("order")
def cmd_order(
    ctx: typer.Context,
    lhs: Annotated[Path, typer.Option("--lhs", help="Channel expected to be the smaller one.")],
    rhs: Annotated[Path, typer.Option("--rhs", help="Channel expected to be the larger one.")],
    method: Annotated[str, typer.Option("--method", "-m", help=f"One of {', '.join(ORDER_METHODS)}.")] = "symmetric",
    tol: Annotated[Optional[float], typer.Option("--tol", help="Comparison tolerance.")] = None,
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="Where to write the verdict JSON.")] = None,
):
    """Tests lhs <= rhs; exits 0 when the order holds and 1 when it does not."""
    config = _config(ctx)
    try:
        if method not in ORDER_METHODS:
            raise ValueError(f"unknown method '{method}'; expected one of {list(ORDER_METHODS)}")
        run = RunConfig(subcommand="order", channels=[lhs, rhs], method=method, tol=tol, output=output)
        verdict = order_check(
            _loader.load(lhs),
            _loader.load(rhs),
            run.method,
            tol=run.tol if run.tol is not None else float(config["tolerances"]["exact"]),
            solver=get_feasibility_solver(config),
        )
    except (PolarOrderError, ValueError, FileNotFoundError) as e:
        _fail(e)

    _emit(render_verdict_json(verdict), run.output)
    if not verdict.holds:
        raise typer.Exit(code=1)


@app.command("infoset")
def cmd_infoset(
    ctx: typer.Context,
    channel: Annotated[Path, typer.Option("--channel", "-c", help="Channel spec file.")],
    n: Annotated[int, typer.Option("--n", "-n", help="Number of polarization levels.")],
    phi: Annotated[str, typer.Option("--phi", help="Functional, e.g. capacity or power:3.")] = DEFAULT_PHI,
    eps: Annotated[float, typer.Option("--eps", help="Threshold: members have E[phi] >= 1 - eps.")] = DEFAULT_EPS,
    budget: Annotated[Optional[int], typer.Option("--budget", help="Atom budget after each transform.")] = None,
    exact: Annotated[bool, typer.Option("--exact", help="Disable quantization.")] = False,
    tol: Annotated[Optional[float], typer.Option("--tol", help="Membership slack below 1 - eps.")] = None,
    concurrency: Annotated[Optional[int], typer.Option("--concurrency", help="Parallel node expansions per level.")] = None,
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="Where to write the report CSV.")] = None,
    summary: Annotated[Optional[Path], typer.Option("--summary", help="Where to write the summary JSON.")] = None,
):
    """Builds the information set A_N(W) and writes the per-sequence report."""
    config = _config(ctx)
    try:
        run = RunConfig(
            subcommand="infoset", channels=[channel], n=n, phi=phi, eps=eps,
            budget=budget, exact=exact, tol=tol, output=output,
        )
        info_set = build_info_set(
            _loader.load(channel),
            run.n,
            run.functional,
            run.eps,
            budget=run.effective_budget(config),
            max_concurrency=concurrency or int(config["infoset"]["max_concurrency"]),
            max_atoms=int(config["polar"]["max_atoms"]),
            tol=run.tol,
        )
    except (PolarOrderError, ValueError, FileNotFoundError) as e:
        _fail(e)

    _emit(render_infoset_csv(info_set), run.output)
    _emit(render_infoset_summary(info_set), summary)


@app.command("containment")
def cmd_containment(
    ctx: typer.Context,
    lhs: Annotated[Path, typer.Option("--lhs", help="Channel expected to have the smaller information set.")],
    rhs: Annotated[Path, typer.Option("--rhs", help="Channel expected to have the larger information set.")],
    n: Annotated[int, typer.Option("--n", "-n", help="Number of polarization levels.")],
    phi: Annotated[Optional[List[str]], typer.Option("--phi", help="Functional, e.g. capacity; repeatable.")] = None,
    eps: Annotated[Optional[List[float]], typer.Option("--eps", help="Threshold 1 - eps; repeatable.")] = None,
    budget: Annotated[Optional[int], typer.Option("--budget", help="Atom budget after each transform.")] = None,
    exact: Annotated[bool, typer.Option("--exact", help="Disable quantization.")] = False,
    tol: Annotated[Optional[float], typer.Option("--tol", help="Membership slack below 1 - eps.")] = None,
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="Where to write the report JSON.")] = None,
):
    """
    Checks A_N(lhs) within A_N(rhs) for every --phi/--eps combination, synthesizing
    each channel once. Exits 0 when every pair is contained and 1 otherwise.
    """
    config = _config(ctx)
    phis = phi or [DEFAULT_PHI]
    eps_values = eps or [DEFAULT_EPS]
    try:
        runs = [
            RunConfig(
                subcommand="containment", channels=[lhs, rhs], n=n, phi=name, eps=value,
                budget=budget, exact=exact, tol=tol, output=output,
            )
            for name in phis
            for value in eps_values
        ]
        run = runs[0]
        reports = containment_grid(
            _loader.load(lhs),
            _loader.load(rhs),
            run.n,
            [parse_functional(name) for name in phis],
            eps_values,
            budget=run.effective_budget(config),
            recheck_budget=int(config["infoset"]["recheck_budget"]),
            max_concurrency=int(config["infoset"]["max_concurrency"]),
            max_atoms=int(config["polar"]["max_atoms"]),
            tol=run.tol,
        )
    except (PolarOrderError, ValueError, FileNotFoundError) as e:
        _fail(e)

    if len(reports) == 1:
        _emit(render_containment_json(reports[0]), run.output)
    else:
        _emit(render_containment_grid_json(reports), run.output)
    if not all(r.contained for r in reports):
        raise typer.Exit(code=1)


@app.command("example-zbsc")
def cmd_example_zbsc(
    ctx: typer.Context,
    p: Annotated[Optional[List[float]], typer.Option("--p", help="Z-channel crossover probability; repeatable.")] = None,
    tol: Annotated[Optional[float], typer.Option("--tol", help="Bisection resolution.")] = None,
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="Also write the reports as JSON.")] = None,
):
    """Best BSC below Z(p) by degradation, symmetric convex order and symmetrization."""
    config = _config(ctx)
    grid = p or DEFAULT_P_GRID
    resolution = tol if tol is not None else float(config["example"]["bisection_tol"])
    try:
        for value in grid:
            RunConfig(subcommand="example-zbsc", p=value, tol=resolution)
        solver = get_feasibility_solver(config)
        reports = [zbsc_study(value, tol=resolution, solver=solver) for value in grid]
    except (PolarOrderError, ValueError) as e:
        _fail(e)

    lines = [f"{'p':>6}  {'degradation':>11}  {'p/(1+p)':>9}  {'sym. convex':>11}  {'p/2':>9}  {'symmetrized':>11}  strict"]
    for r in reports:
        lines.append(
            f"{r.p:>6.3f}  {r.degradation_threshold:>11.7f}  {r.degradation_closed_form:>9.7f}  "
            f"{r.symmetric_convex_threshold:>11.7f}  {r.symmetric_convex_closed_form:>9.7f}  "
            f"{r.symmetrization_threshold:>11.7f}  {'yes' if r.strict else 'no'}"
        )
    typer.echo("\n".join(lines))
    if output is not None:
        _emit(render_summary_json([r.model_dump() for r in reports]), output)


@app.command("params")
def cmd_params(
    ctx: typer.Context,
    channel: Annotated[Path, typer.Option("--channel", "-c", help="Channel spec file.")],
    output: Annotated[Optional[Path], typer.Option("--output", "-o", help="Where to write the JSON.")] = None,
):
    """Variational distance, Bhattacharyya parameter, symmetric capacity and symmetry of a channel."""
    config = _config(ctx)
    try:
        run = RunConfig(subcommand="params", channels=[channel], output=output)
        w = _loader.load(channel)
    except (PolarOrderError, ValueError, FileNotFoundError) as e:
        _fail(e)

    payload = {
        **channel_parameters(delta_distribution(w, merge_tol=float(config["delta"]["merge_tol"]))),
        "outputs": w.size,
        "is_symmetric": is_symmetric(w, tol=float(config["tolerances"]["stochastic"])),
    }
    logger.debug(f"params for {channel}: {payload}")
    _emit(render_summary_json(payload), run.output)
