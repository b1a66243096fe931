"""Command-line front end: a thin client over the service handlers.

Exit codes: 0 on success, 1 on numerical failure (the report is still
written), 2 on input errors.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from .errors import SeriesFlowError
from .service import (
    JacobianCheckRequest,
    NumericalFailure,
    SolveRequest,
    SolveResponse,
    TraceRequest,
    TraceResponse,
    run_jacobian_check,
    run_solve,
    run_trace,
    run_verify,
    VerifyRequest,
)

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_INPUT = 2


@dataclass(frozen=True)
class RunConfig:
    command: str
    case_path: Path
    sidecar_path: Path | None
    order: int
    lam: float
    eta: float
    model: str
    out_path: Path | None
    out_format: str


def _read(path: Path | None) -> str | None:
    return None if path is None else Path(path).read_text()


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _write(path: Path, text: str) -> None:
    Path(path).write_text(text)


def _solve_csv(resp: SolveResponse) -> str:
    header = (
        ["lambda"]
        + [f"e_{v.bus}" for v in resp.voltages]
        + [f"f_{v.bus}" for v in resp.voltages]
        + ["residual"]
    )
    row = (
        [repr(resp.lam)]
        + [repr(v.e) for v in resp.voltages]
        + [repr(v.f) for v in resp.voltages]
        + [repr(resp.residual_inf)]
    )
    return ",".join(header) + "\n" + ",".join(row) + "\n"


def _trace_csv(resp: TraceResponse, bus_ids: list[int]) -> str:
    header = (
        ["lambda"]
        + [f"e_{b}" for b in bus_ids]
        + [f"f_{b}" for b in bus_ids]
        + ["residual"]
    )
    lines = [",".join(header)]
    for p in resp.points:
        row = (
            [repr(p.lam)]
            + [repr(v) for v in p.e]
            + [repr(v) for v in p.f]
            + [repr(p.residual_inf)]
        )
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def emit_report(resp, out_format: str, path: Path, bus_ids: list[int] | None = None) -> None:
    """Write a response as JSON or (for solve/trace results) curve CSV."""
    if out_format == "json":
        _write(path, _json_text(resp.model_dump(by_alias=True)))
    elif isinstance(resp, SolveResponse):
        _write(path, _solve_csv(resp))
    elif isinstance(resp, TraceResponse):
        _write(path, _trace_csv(resp, bus_ids or []))
    else:
        raise click.UsageError(f"csv output not supported for {type(resp).__name__}")


def _bus_ids(case_text: str) -> list[int]:
    from .netmodel import parse_case

    return [b.bus_id for b in parse_case(case_text).buses]


_case_argument = click.argument(
    "case_path", metavar="CASE", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
_sidecar_option = click.option(
    "--zip",
    "sidecar_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="ZIP/direction sidecar (JSON).",
)
_model_option = click.option(
    "--model",
    type=click.Choice(["const-power", "zip"]),
    default="const-power",
    show_default=True,
)
_format_option = click.option(
    "--format",
    "out_format",
    type=click.Choice(["json", "csv"]),
    default="json",
    show_default=True,
)
_out_option = click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, path_type=Path),
    required=True,
    help="Report destination.",
)


@click.group()
def main() -> None:
    """Power-flow solver based on per-order series recursions."""


@main.command()
@_case_argument
@_sidecar_option
@click.option("--order", type=click.IntRange(min=1), default=30, show_default=True)
@click.option("--lambda", "lam", type=float, default=0.0, show_default=True,
              help="Target loading parameter.")
@_model_option
@click.option("--no-polish", is_flag=True, help="Skip Newton re-polish between expansions.")
@_out_option
@_format_option
def solve(case_path, sidecar_path, order, lam, model, no_polish, out_path, out_format) -> int:
    """Solve the power flow at a target loading and write a report."""
    req = SolveRequest(
        case_text=Path(case_path).read_text(),
        sidecar_text=_read(sidecar_path),
        order=order,
        lam=lam,
        model=model,
        polish=not no_polish,
    )
    try:
        resp = run_solve(req)
    except NumericalFailure as exc:
        click.echo(f"error: {exc.reason}", err=True)
        emit_report(exc.report, out_format, out_path)
        return EXIT_NUMERICAL
    emit_report(resp, out_format, out_path)
    click.echo(f"solved at lambda={resp.lam!r}, residual {resp.residual_inf:.3e}")
    return EXIT_OK


@main.command()
@_case_argument
@_sidecar_option
@click.option("--order", type=click.IntRange(min=6), default=30, show_default=True)
@click.option("--lambda-max", type=float, required=True, help="Trace up to this loading.")
@click.option("--eta", type=click.FloatRange(0.0, 1.0, min_open=True), default=0.5,
              show_default=True, help="Step fraction of the estimated radius.")
@_model_option
@click.option("--no-polish", is_flag=True, help="Skip Newton re-polish between expansions.")
@_out_option
@_format_option
def trace(case_path, sidecar_path, order, lambda_max, eta, model, no_polish,
          out_path, out_format) -> int:
    """Trace the PV curve up to a maximum loading and write the points."""
    case_text = Path(case_path).read_text()
    req = TraceRequest(
        case_text=case_text,
        sidecar_text=_read(sidecar_path),
        order=order,
        lambda_max=lambda_max,
        eta=eta,
        model=model,
        polish=not no_polish,
    )
    resp = run_trace(req)
    emit_report(resp, out_format, out_path, bus_ids=_bus_ids(case_text))
    reached = resp.termination == "ReachedLambdaMax"
    last = resp.points[-1].lam if resp.points else None
    click.echo(f"trace ended: {resp.termination} (last lambda {last!r})",
               err=not reached)
    return EXIT_OK if reached else EXIT_NUMERICAL


@main.command()
@_case_argument
@click.option("--trials", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="Optional JSON report destination.")
def verify(case_path, trials, seed, out_path) -> int:
    """Check the per-order linear forms against the convolution oracle."""
    req = VerifyRequest(case_text=Path(case_path).read_text(), trials=trials, seed=seed)
    resp = run_verify(req)
    click.echo(f"verify: case={resp.case} trials={resp.trials} seed={resp.seed}")
    for kind, dev in resp.max_deviation.items():
        click.echo(f"  {kind:>4}: max |deviation| = {dev:.3e}")
    click.echo(f"tolerance {resp.tolerance:.1e}: {'PASS' if resp.passed else 'FAIL'}")
    if out_path is not None:
        _write(out_path, _json_text(resp.model_dump()))
    return EXIT_OK if resp.passed else EXIT_NUMERICAL


@main.command("jacobian-check")
@_case_argument
@_sidecar_option
@_model_option
@click.option("--h", type=click.FloatRange(min=0, min_open=True), default=1e-6,
              show_default=True, help="Finite-difference step.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path),
              default=None, help="Optional JSON report destination.")
def jacobian_check(case_path, sidecar_path, model, h, seed, out_path) -> int:
    """Compare the assembled system with a finite-difference Jacobian."""
    req = JacobianCheckRequest(
        case_text=Path(case_path).read_text(),
        sidecar_text=_read(sidecar_path),
        model=model,
        h=h,
        seed=seed,
    )
    resp = run_jacobian_check(req)
    click.echo(
        f"jacobian-check: case={resp.case} model={resp.model} "
        f"max rel error {resp.max_rel_error:.3e} "
        f"(tolerance {resp.tolerance:.1e}): {'PASS' if resp.passed else 'FAIL'}"
    )
    if out_path is not None:
        _write(out_path, _json_text(resp.model_dump()))
    return EXIT_OK if resp.passed else EXIT_NUMERICAL


def run(argv: list[str]) -> int:
    """Run the CLI on an argument list and return the exit code."""
    try:
        result = main.main(args=list(argv), standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return EXIT_INPUT
    except (SeriesFlowError, OSError, UnicodeDecodeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_INPUT
    return int(result) if result is not None else EXIT_OK


def entrypoint() -> None:
    sys.exit(run(sys.argv[1:]))
