"""Command line runner: eigen / fixed / shoot / verify runs and parameter sweeps.

    python -m runner.cli --config run.json --mode fixed --n 1025 --output results/fixed.json
"""
import argparse
import asyncio
import csv
import json
import os
import sys
import time
import traceback
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import bittensor as bt
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from analysis.validation_schemas import ValidationSchemas
from analysis.verify import min_interior_slope, verify_solution, weak_residual
from config.config import appConfig as config
from radial.errors import NotConverged, RadialError
from radial.functionals import nehari_residual
from radial.grid import RadialFn
from radial.protocol import (EigenResult, NehariResult, NonlinSpec, ProblemSpec, ShootResult, SolveMode,
                             WeightSpec)
from solvers.eigen_solver import solve_eigen
from solvers.nehari_solver import solve_fixed
from solvers.shooting import shoot

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2

PROBLEM_FIELDS = ("dim", "p", "weight", "nonlin", "mode", "grid_n", "tol", "max_iter", "allow_constant_weight")

# config file spellings of RunConfig fields
CONFIG_KEY_ALIASES = {"n": "grid_n", "nonlinearity": "nonlin", "output": "output_path"}


class RunConfig(BaseModel):
    """One run: the problem definition plus where and what to write."""
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    dim: int = Field(3, description="Space dimension N")
    p: float = Field(2.0, description="Exponent of the p-Laplacian")
    weight: WeightSpec = Field(default_factory=WeightSpec, description="Coefficient a(|x|)")
    nonlin: NonlinSpec = Field(default_factory=NonlinSpec, description="Nonlinearity f")
    mode: SolveMode = Field(SolveMode.EIGEN, description="What to compute")
    grid_n: int = Field(config.DEFAULT_GRID_N, description="Number of grid intervals")
    tol: float = Field(config.RADIAL_TOL, description="Convergence tolerance")
    max_iter: int = Field(config.RADIAL_MAX_ITER, description="Iteration cap of the optimizers")
    allow_constant_weight: bool = Field(False, description="Admit constant weights")

    output_path: str = Field(os.path.join(config.OUTPUT_DIRECTORY, "report.json"), description="Report JSON path")
    emit_profile: bool = Field(False, description="Also write the profile CSV next to the report")
    shoot_bracket: Tuple[float, float] = Field((config.SHOOT_BRACKET_LO, config.SHOOT_BRACKET_HI),
                                               description="Bracket for the initial height in shoot mode")
    lam: Optional[float] = Field(None, alias="lambda", gt=0.0, description="lambda for shoot / verify modes")
    profile_path: Optional[str] = Field(None, description="Profile CSV checked in verify mode")
    sweep: Optional[List[Dict[str, Any]]] = Field(None, description="Parameter overrides, one run per entry")

    def problem(self) -> ProblemSpec:
        return ProblemSpec(**{name: getattr(self, name) for name in PROBLEM_FIELDS})

    @property
    def profile_csv_path(self) -> str:
        return os.path.splitext(self.output_path)[0] + ".csv"

    def expand_sweep(self) -> List["RunConfig"]:
        """One RunConfig per sweep entry, reporting to <stem>_<i>.json."""
        base = self.model_dump(by_alias=True, mode="json")
        base["sweep"] = None
        stem, extension = os.path.splitext(self.output_path)

        runs = []
        for i, override in enumerate(self.sweep or []):
            data = dict(base)
            for key, value in override.items():
                if key in ("weight", "nonlin"):
                    data[key] = {**base[key], **value}
                else:
                    data[key] = value
            data["output_path"] = f"{stem}_{i}{extension or '.json'}"
            runs.append(RunConfig(**data))
        return runs


@dataclass
class RunOutput:
    exit_code: int
    report: Dict[str, Any]
    profile: Optional[RadialFn] = None


def _base_report(spec: ProblemSpec) -> Dict[str, Any]:
    return {
        "mode": spec.mode.value,
        "p": spec.p,
        "dim": spec.dim,
        "n": spec.grid_n,
        "objective": None,
        "lambda": None,
        "c0": None,
        "iterations": 0,
        "converged": False,
        "weak_residual_max": None,
        "min_value": None,
        "min_interior_slope": None,
        "nehari_residual": None,
    }


def _profile_diagnostics(u: RadialFn, lam: float, spec: ProblemSpec) -> Dict[str, float]:
    return {
        "weak_residual_max": weak_residual(u, lam, spec),
        "min_value": float(np.min(u.values)),
        "min_interior_slope": min_interior_slope(u),
    }


def _eigen_report(result: EigenResult, spec: ProblemSpec) -> Dict[str, Any]:
    report = _base_report(spec)
    report.update(objective=result.S, iterations=result.iterations, converged=result.converged)
    report["lambda"] = result.lam
    report.update(_profile_diagnostics(result.u, result.lam, spec))
    return report


def _fixed_report(result: NehariResult, spec: ProblemSpec) -> Dict[str, Any]:
    report = _base_report(spec)
    report.update(objective=result.c0, c0=result.c0, iterations=result.iterations, converged=result.converged,
                  nehari_residual=nehari_residual(result.u, spec))
    report["lambda"] = 1.0
    report.update(_profile_diagnostics(result.u, 1.0, spec))
    return report


def _shoot_report(result: ShootResult, lam: float, spec: ProblemSpec) -> Dict[str, Any]:
    report = _base_report(spec)
    report.update(iterations=result.rootfind_iterations,
                  converged=abs(result.terminal_flux) <= config.SHOOT_TOL,
                  initial_height=result.d, terminal_flux=result.terminal_flux)
    report["lambda"] = lam
    report.update(_profile_diagnostics(result.profile, lam, spec))
    return report


def read_profile(path: str, spec: ProblemSpec) -> RadialFn:
    """Load a r,u[,slope] CSV written on the uniform grid."""
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows or "r" not in rows[0] or "u" not in rows[0]:
        raise ValueError(f"profile {path} needs a header with columns r,u")

    r = np.array([float(row["r"]) for row in rows])
    u = np.array([float(row["u"]) for row in rows])
    grid = spec.with_overrides(grid_n=len(rows) - 1).grid()
    if np.max(np.abs(r - grid.nodes)) > 1e-9:
        raise ValueError(f"profile {path} is not sampled on the uniform grid with n={grid.n}")
    return RadialFn(grid, u)


def write_profile(u: RadialFn, path: str) -> None:
    slopes = u.slopes
    # node slope: right cell, last node takes its left cell
    node_slopes = np.append(slopes, slopes[-1])
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["r", "u", "slope"])
        for r, value, slope in zip(u.grid.nodes, u.values, node_slopes):
            writer.writerow([repr(float(r)), repr(float(value)), repr(float(slope))])


def write_report(report: Dict[str, Any], path: str) -> None:
    is_valid, errors = ValidationSchemas.validate_report(report)
    if not is_valid:
        raise ValueError(f"report failed schema validation: {errors}")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w") as f:
        json.dump(report, f, indent=2)
    bt.logging.info(f"💾 Report written to {path}")


def execute(run_config: RunConfig) -> RunOutput:
    """Solve one configuration; nothing is written here."""
    started = time.perf_counter()
    spec = run_config.problem()

    try:
        if spec.mode == SolveMode.EIGEN:
            result = solve_eigen(spec)
            output = RunOutput(EXIT_OK, _eigen_report(result, spec), result.u)
        elif spec.mode == SolveMode.FIXED:
            result = solve_fixed(spec)
            output = RunOutput(EXIT_OK, _fixed_report(result, spec), result.u)
        elif spec.mode == SolveMode.SHOOT:
            lam = run_config.lam if run_config.lam is not None else 1.0
            result = shoot(spec, lam, run_config.shoot_bracket)
            output = RunOutput(EXIT_OK, _shoot_report(result, lam, spec), result.profile)
        else:
            output = _verify(run_config, spec)
    except NotConverged as e:
        bt.logging.warning(f"⚠️ {spec.mode.value} run did not converge: {e}")
        output = _partial_output(e, run_config, spec)

    if output.exit_code == EXIT_OK and not output.report["converged"]:
        output.exit_code = EXIT_NOT_CONVERGED
    output.report["wall_time_ms"] = 1000.0 * (time.perf_counter() - started)
    return output


def _verify(run_config: RunConfig, spec: ProblemSpec) -> RunOutput:
    if run_config.profile_path is None or run_config.lam is None:
        raise ValueError("verify mode needs both profile_path and lambda")
    u = read_profile(run_config.profile_path, spec)
    spec = spec.with_overrides(grid_n=u.grid.n)
    checked = verify_solution(u, run_config.lam, spec)

    report = _base_report(spec)
    report.update(
        weak_residual_max=checked.weak_residual_max,
        min_value=checked.min_value,
        min_interior_slope=checked.min_interior_slope,
        converged=checked.weak_residual_max <= config.VERIFY_RESIDUAL_TOL,
        lambda_consistency=checked.lambda_consistency,
        subsolution_margin=checked.subsolution_margin,
        linf_ratio=checked.linf_ratio,
    )
    report["lambda"] = run_config.lam
    return RunOutput(EXIT_OK, report)


def _partial_output(error: NotConverged, run_config: RunConfig, spec: ProblemSpec) -> RunOutput:
    best = error.best
    if isinstance(best, EigenResult):
        report = _eigen_report(best, spec)
    elif isinstance(best, NehariResult):
        report = _fixed_report(best, spec)
    elif isinstance(best, ShootResult):
        report = _shoot_report(best, run_config.lam or 1.0, spec)
    else:
        report = _base_report(spec)
    report["converged"] = False
    report["error"] = str(error)
    return RunOutput(EXIT_NOT_CONVERGED, report, getattr(best, "u", getattr(best, "profile", None)))


def _write_outputs(run_config: RunConfig, output: RunOutput) -> None:
    write_report(output.report, run_config.output_path)
    if run_config.emit_profile and output.profile is not None:
        write_profile(output.profile, run_config.profile_csv_path)


def run_single(run_config: RunConfig) -> int:
    try:
        output = execute(run_config)
        _write_outputs(run_config, output)
        return output.exit_code
    except (RadialError, ValidationError, ValueError, OSError) as e:
        bt.logging.error(f"💥 Invalid run: {e}")
        return EXIT_INVALID


async def run_sweep(run_config: RunConfig) -> List[int]:
    """Run every sweep entry concurrently; report writes are serialized."""
    runs = run_config.expand_sweep()
    semaphore = asyncio.Semaphore(config.SWEEP_MAX_CONCURRENCY)
    write_lock = asyncio.Lock()

    async def run_entry(entry: RunConfig) -> int:
        async with semaphore:
            output = await asyncio.to_thread(execute, entry)
        async with write_lock:
            _write_outputs(entry, output)
        return output.exit_code

    bt.logging.info(f"🧪 Sweep: {len(runs)} runs, concurrency {config.SWEEP_MAX_CONCURRENCY}")
    codes = await asyncio.gather(*(run_entry(entry) for entry in runs), return_exceptions=True)

    exit_codes = []
    for i, code in enumerate(codes):
        if isinstance(code, Exception):
            bt.logging.error(f"💥 Sweep entry {i} failed: {code}")
            exit_codes.append(EXIT_INVALID)
        else:
            exit_codes.append(code)
    return exit_codes


def run(run_config: RunConfig) -> int:
    """Execute the configured run (or sweep) and return the process exit code."""
    if run_config.sweep:
        try:
            codes = asyncio.run(run_sweep(run_config))
        except (ValidationError, ValueError) as e:
            bt.logging.error(f"💥 Invalid sweep: {e}")
            return EXIT_INVALID
        return max(codes) if codes else EXIT_OK
    return run_single(run_config)


def get_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Radial Neumann p-Laplace solver")
    parser.add_argument('--config', type=str, default=None, help='JSON run configuration')
    parser.add_argument('--p', type=float, default=None, help='Exponent of the p-Laplacian')
    parser.add_argument('--dim', type=int, default=None, help='Space dimension N')
    parser.add_argument('--n', type=int, default=None, help='Number of grid intervals')
    parser.add_argument('--mode', type=str, default=None, choices=[m.value for m in SolveMode], help='What to compute')
    parser.add_argument('--weight-kind', type=str, default=None, choices=['power', 'affine', 'exp', 'constant'], help='Weight family')
    parser.add_argument('--alpha', type=float, default=None, help='Power weight exponent')
    parser.add_argument('--beta', type=float, default=None, help='Affine / exponential weight slope')
    parser.add_argument('--c', type=float, default=None, help='Constant weight value')
    parser.add_argument('--q', type=float, default=None, help='Exponent of f(s) = s^q')
    parser.add_argument('--tol', type=float, default=None, help='Convergence tolerance')
    parser.add_argument('--max-iter', type=int, default=None, help='Iteration cap')
    parser.add_argument('--allow-constant-weight', action='store_true', default=None, help='Admit constant weights')
    parser.add_argument('--output', type=str, default=None, help='Report JSON path')
    parser.add_argument('--emit-profile', action='store_true', default=None, help='Write the profile CSV')
    parser.add_argument('--lambda', dest='lam', type=float, default=None, help='lambda for shoot / verify modes')
    parser.add_argument('--profile', type=str, default=None, help='Profile CSV to verify')
    parser.add_argument('--shoot-bracket', type=float, nargs=2, default=None, metavar=('LO', 'HI'),
                        help='Bracket for the initial height in shoot mode')
    parser.add_argument('--debug', action='store_true', help='Enable debug logging')
    return parser


def canonical_keys(data: Dict[str, Any]) -> Dict[str, Any]:
    """Rename config file spellings (n, nonlinearity, output) to RunConfig field names."""
    renamed = {CONFIG_KEY_ALIASES.get(key, key): value for key, value in data.items()}
    if renamed.get("sweep"):
        renamed["sweep"] = [canonical_keys(entry) for entry in renamed["sweep"]]
    return renamed


def build_config(args: argparse.Namespace) -> RunConfig:
    data: Dict[str, Any] = {}
    if args.config:
        with open(args.config) as f:
            data = json.load(f)
        is_valid, errors = ValidationSchemas.validate_config(data)
        if not is_valid:
            raise ValueError(f"config {args.config} is invalid: {errors}")
        data = canonical_keys(data)

    flags = {
        "p": args.p, "dim": args.dim, "grid_n": args.n, "mode": args.mode, "tol": args.tol,
        "max_iter": args.max_iter, "allow_constant_weight": args.allow_constant_weight,
        "output_path": args.output, "emit_profile": args.emit_profile, "lambda": args.lam,
        "profile_path": args.profile, "shoot_bracket": args.shoot_bracket,
    }
    data.update({key: value for key, value in flags.items() if value is not None})

    weight = {"kind": args.weight_kind, "alpha": args.alpha, "beta": args.beta, "c": args.c}
    data["weight"] = {**data.get("weight", {}), **{k: v for k, v in weight.items() if v is not None}}
    if args.q is not None:
        data["nonlin"] = {**data.get("nonlin", {}), "q": args.q}

    return RunConfig(**data)


def configure_logging(debug: bool = False) -> str:
    """Apply LOG_LEVEL to bt.logging; --debug and DEBUG_MODE raise it to at least debug."""
    level = config.LOG_LEVEL
    if (debug or config.DEBUG_MODE) and level == "info":
        level = "debug"
    if level == "trace":
        bt.logging.set_trace(True)
    elif level == "debug":
        bt.logging.set_debug(True)
    return level


def main(argv: Optional[List[str]] = None) -> int:
    args = get_parser().parse_args(argv)
    configure_logging(args.debug)

    try:
        run_config = build_config(args)
    except (ValidationError, ValueError, OSError) as e:
        bt.logging.error(f"💥 Invalid configuration: {e}")
        return EXIT_INVALID

    try:
        return run(run_config)
    except Exception as e:
        bt.logging.error(f"💥 Unexpected failure: {e}")
        bt.logging.error(traceback.format_exc())
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
