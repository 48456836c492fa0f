"""
circloyd command line

Subcommands:
- sweep           stability diagram (post-transient codepoints per κ)
- eigen           circulant Jacobian and its spectrum at one κ
- fscan           smallest eigenvalue, F and the flip bound over a κ grid
- lyapunov        Lyapunov spectra over a κ grid
- sala            stability-aware Lloyd run with its residual trace
- jacobian        analytic vs finite-difference Jacobian at the symmetric configuration
- critical-kappa  root search for F(κ) = flip bound
- distortion      distortion of one configuration
- step            one Lloyd step, optionally followed by an orbit

Exit codes: 0 success, 1 usage error, 2 numerical or I/O failure.
"""

import argparse
import logging
import os
import sys
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError, model_validator

from ..models.circle import KAPPA_MAX, CentroidMode, DensityFamily, SalaConfig
from ..repositories.records import RecordStore
from ..services.angle import Configuration, symmetric_configuration
from ..services.errors import LloydError
from ..services.experiments import (
    ORBIT_COLUMNS,
    TRACE_COLUMNS,
    density_for,
    eigen_scan,
    kappa_grid,
    lyapunov_columns,
    lyapunov_rows,
    lyapunov_scan,
    orbit_rows,
    stability_sweep,
    symmetry_diagnostics,
    trace_rows,
)
from ..services.linearization import (
    DEFAULT_FD_EPS,
    FD_EPS_MAX,
    FD_EPS_MIN,
    expand,
    jacobian_summary,
    symmetric_jacobian,
)
from ..services.quantizer import LloydMap, random_configuration
from ..services.sala import sala_run
from ..services.stability import classify, critical_kappa
from .plots import PlotSpec, eigen_plot, emit_svg, lyapunov_plot, sweep_plot, trace_plot

logger = logging.getLogger(__name__)

LOG_ENV = "CIRCLOYD_LOG"
LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2

DEFAULT_GRID_MAX = 10.0
DEFAULT_CRITICAL_MAX = 100.0


# =============================================================================
# CONFIGURATION
# =============================================================================

class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    SVG = "svg"


class RunConfig(BaseModel):
    """Validated command-line settings; unset flags take these defaults."""
    command: str
    density: DensityFamily = DensityFamily.VONMISES
    kappa: float = Field(0.0, ge=0.0, le=KAPPA_MAX)
    mu: float = 0.0
    mode: CentroidMode = CentroidMode.INTRINSIC
    n: int = Field(8, ge=2)

    kappa_min: float = Field(0.0, ge=0.0, le=KAPPA_MAX)
    kappa_max: Optional[float] = Field(None, ge=0.0, le=KAPPA_MAX)
    nk: int = Field(20, ge=1)
    iters: int = Field(100, ge=1)
    trans: int = Field(80, ge=0)
    orbit_steps: Optional[int] = Field(None, ge=1)
    eps_fd: float = Field(DEFAULT_FD_EPS, ge=FD_EPS_MIN, le=FD_EPS_MAX)
    tol: float = Field(1e-10, gt=0.0)

    epsilon: float = Field(1e-9, gt=0.0)
    eta: float = Field(1e-4, gt=0.0)
    delta: float = Field(1e-3, gt=0.0)
    window: int = Field(5, ge=1)
    tmax: int = Field(10000, ge=1)

    seed: int = 0
    trials: int = Field(1, ge=1)
    threads: int = Field(1, ge=1)
    no_drift: bool = False
    random: bool = False
    points: Optional[List[float]] = None

    out: Optional[Path] = None
    format: Optional[OutputFormat] = None

    @model_validator(mode="after")
    def _consistent(self) -> "RunConfig":
        if self.kappa_max is not None and self.kappa_max < self.kappa_min:
            raise ValueError("kappa-max must not be below kappa-min")
        if self.command == "sweep" and self.trans >= self.iters:
            raise ValueError("trans must be smaller than iters")
        if self.format == OutputFormat.SVG and self.out is None:
            raise ValueError("svg output needs --out")
        return self

    def grid(self) -> List[float]:
        upper = DEFAULT_GRID_MAX if self.kappa_max is None else self.kappa_max
        return kappa_grid(self.kappa_min, upper, self.nk)

    def model(self):
        return density_for(self.density, self.kappa, self.mu)

    def configuration(self) -> Configuration:
        """--points if given, else a seeded random draw with --random, else Q*."""
        if self.points is not None:
            return Configuration(self.points)
        if self.random:
            return random_configuration(self.n, self.seed)
        return symmetric_configuration(self.n)

    def sala(self) -> SalaConfig:
        return SalaConfig(epsilon=self.epsilon, eta=self.eta, delta=self.delta,
                          window_L=self.window, t_max=self.tmax, seed=self.seed)


class UsageError(Exception):
    """Raised when a flag combination is invalid for the chosen subcommand."""
    pass


def configure_logging() -> None:
    name = os.environ.get(LOG_ENV, "error").strip().lower()
    level = LOG_LEVELS.get(name)
    logging.basicConfig(
        stream=sys.stderr,
        level=level if level is not None else logging.ERROR,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if level is None:
        logger.error("unknown %s=%r, using error", LOG_ENV, name)


# =============================================================================
# OUTPUT
# =============================================================================

def _emit(
    cfg: RunConfig,
    default: OutputFormat,
    rows=None,
    columns=None,
    payload=None,
    plot: Optional[Callable[[], PlotSpec]] = None,
) -> None:
    fmt = cfg.format or default
    store = RecordStore(cfg.out)
    if fmt == OutputFormat.CSV and columns is not None:
        store.write_csv(rows, columns)
    elif fmt == OutputFormat.JSON:
        store.write_json(payload if payload is not None else rows)
    elif fmt == OutputFormat.SVG and plot is not None:
        summary = emit_svg(plot(), cfg.out)
        print(f"circloyd: wrote {summary.path}: {summary.points_drawn} point(s), "
              f"{summary.points_dropped} dropped", file=sys.stderr)
    else:
        raise UsageError(f"{cfg.command} does not support --format {fmt.value}")


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_sweep(cfg: RunConfig) -> None:
    records = stability_sweep(
        cfg.kappa_min,
        DEFAULT_GRID_MAX if cfg.kappa_max is None else cfg.kappa_max,
        cfg.nk,
        cfg.n,
        cfg.iters,
        cfg.trans,
        seed=cfg.seed,
        family=cfg.density,
        trials=cfg.trials,
        drift=not cfg.no_drift,
        threads=cfg.threads,
        mode=cfg.mode,
        mu=cfg.mu,
    )
    hopping = sorted({r.kappa for r in records if r.alternating})
    if hopping:
        print("circloyd: note: column(s) alternating between rotated copies at kappa="
              + ",".join(f"{k:g}" for k in hopping), file=sys.stderr)
    _emit(cfg, OutputFormat.CSV, rows=records, columns=["kappa", "t", "j", "angle"],
          plot=lambda: sweep_plot(records, cfg.n))


STABILITY_COLUMNS = ["n", "kappa", "F", "bound", "m_star", "lambda_min", "verdict"]


def cmd_eigen(cfg: RunConfig) -> None:
    model = cfg.model()
    report = classify(cfg.n, model)
    payload = jacobian_summary(symmetric_jacobian(cfg.n, model))
    payload["stability"] = report.model_dump(mode="json")
    _emit(cfg, OutputFormat.JSON, rows=[report], columns=STABILITY_COLUMNS, payload=payload)


def cmd_fscan(cfg: RunConfig) -> None:
    records = eigen_scan(cfg.n, cfg.grid(), family=cfg.density, mu=cfg.mu, threads=cfg.threads)
    rows = [dict(r.model_dump(), lower_boundary=-1.0, upper_reference=1.0) for r in records]
    _emit(cfg, OutputFormat.CSV, rows=rows,
          columns=["kappa", "lambda_min", "F", "bound", "lower_boundary", "upper_reference"],
          plot=lambda: eigen_plot(records, cfg.n))


def cmd_lyapunov(cfg: RunConfig) -> None:
    reports = lyapunov_scan(
        cfg.n, cfg.grid(), n_trans=cfg.trans, n_iter=cfg.iters, eps=cfg.eps_fd,
        seed=cfg.seed, family=cfg.density, mode=cfg.mode, mu=cfg.mu, threads=cfg.threads,
    )
    _emit(cfg, OutputFormat.CSV, rows=lyapunov_rows(reports), columns=lyapunov_columns(cfg.n),
          payload=reports, plot=lambda: lyapunov_plot(reports, cfg.n))


def cmd_sala(cfg: RunConfig) -> None:
    q0 = Configuration(cfg.points) if cfg.points is not None else None
    n = q0.n if q0 is not None else cfg.n
    trace = sala_run(cfg.model(), n, cfg.sala(), q0=q0, mode=cfg.mode)
    rows = trace_rows(trace)
    payload = {
        "status": trace.status.value,
        "iterations": len(trace),
        "perturbations": trace.perturbations,
        "terminal": trace.terminal.tolist(),
        "rows": rows,
    }
    _emit(cfg, OutputFormat.CSV, rows=rows, columns=TRACE_COLUMNS, payload=payload,
          plot=lambda: trace_plot(rows))


def cmd_jacobian(cfg: RunConfig) -> None:
    model = cfg.model()
    jacobian = symmetric_jacobian(cfg.n, model)
    diagnostics = symmetry_diagnostics(cfg.n, model, eps=cfg.eps_fd)
    payload = jacobian_summary(jacobian, fd_deviation=diagnostics["fd_max_deviation"])
    payload["matrix"] = expand(jacobian).tolist()
    payload["diagnostics"] = diagnostics
    _emit(cfg, OutputFormat.JSON, payload=payload)


def cmd_critical_kappa(cfg: RunConfig) -> None:
    upper = DEFAULT_CRITICAL_MAX if cfg.kappa_max is None else cfg.kappa_max
    result = critical_kappa(
        cfg.n,
        (cfg.kappa_min, upper),
        tol=cfg.tol,
        model_factory=lambda k: density_for(cfg.density, k, cfg.mu),
    )
    _emit(cfg, OutputFormat.JSON, payload=result)


def cmd_distortion(cfg: RunConfig) -> None:
    config = cfg.configuration()
    lmap = LloydMap(cfg.model(), cfg.mode)
    payload = {"n": config.n, "kappa": cfg.kappa, "points": config.tolist(),
               "distortion": lmap.distortion(config)}
    _emit(cfg, OutputFormat.JSON, payload=payload)


def cmd_step(cfg: RunConfig) -> None:
    config = cfg.configuration()
    model = cfg.model()
    lmap = LloydMap(model, cfg.mode)
    image = lmap.step(config)
    payload = {
        "n": config.n,
        "kappa": cfg.kappa,
        "mode": cfg.mode.value,
        "points": config.tolist(),
        "image": image.tolist(),
        "residual": lmap.residual(config),
        "distortion_before": lmap.distortion(config),
        "distortion_after": lmap.distortion(image),
        "symmetry": symmetry_diagnostics(config.n, model, eps=cfg.eps_fd),
    }
    rows = columns = None
    if cfg.orbit_steps is not None:
        orbit = lmap.iterate(config, cfg.orbit_steps, normalize=not cfg.no_drift)
        rows, columns = orbit_rows(orbit), ORBIT_COLUMNS
        payload["orbit"] = rows
    _emit(cfg, OutputFormat.JSON, rows=rows, columns=columns, payload=payload)


HANDLERS: Dict[str, Callable[[RunConfig], None]] = {
    "sweep": cmd_sweep,
    "eigen": cmd_eigen,
    "fscan": cmd_fscan,
    "lyapunov": cmd_lyapunov,
    "sala": cmd_sala,
    "jacobian": cmd_jacobian,
    "critical-kappa": cmd_critical_kappa,
    "distortion": cmd_distortion,
    "step": cmd_step,
}


# =============================================================================
# PARSER
# =============================================================================

class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _point_list(text: str) -> List[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid point list {text!r}") from exc


def build_parser() -> CliParser:
    # flags default to None so RunConfig supplies the defaults
    common = CliParser(add_help=False)
    common.add_argument("--n", type=int, help="number of codepoints")
    common.add_argument("--seed", type=int, help="seed for every random draw")
    common.add_argument("--out", type=Path, help="output file (stdout when omitted)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat])

    density = CliParser(add_help=False)
    density.add_argument("--density", choices=[f.value for f in DensityFamily])
    density.add_argument("--kappa", type=float, help="von Mises concentration")
    density.add_argument("--mu", type=float, help="von Mises mean direction")
    density.add_argument("--mode", choices=[m.value for m in CentroidMode])

    grid = CliParser(add_help=False)
    grid.add_argument("--kappa-min", dest="kappa_min", type=float)
    grid.add_argument("--kappa-max", dest="kappa_max", type=float)
    grid.add_argument("--nk", type=int, help="number of κ grid points")
    grid.add_argument("--threads", type=int, help="worker threads for the κ grid")

    orbit = CliParser(add_help=False)
    orbit.add_argument("--iters", type=int, help="iterations (sampled ones for lyapunov)")
    orbit.add_argument("--trans", type=int, help="transient iterations")

    fd = CliParser(add_help=False)
    fd.add_argument("--eps-fd", dest="eps_fd", type=float, help="finite-difference step")

    config = CliParser(add_help=False)
    config.add_argument("--points", type=_point_list, help="comma-separated angles")
    config.add_argument("--random", action="store_true", help="seeded random configuration")

    sala = CliParser(add_help=False)
    sala.add_argument("--epsilon", type=float, help="convergence tolerance")
    sala.add_argument("--eta", type=float, help="oscillation threshold")
    sala.add_argument("--delta", type=float, help="perturbation size")
    sala.add_argument("--window", type=int, help="convergence window length")
    sala.add_argument("--tmax", type=int, help="iteration cap")

    parser = CliParser(prog="circloyd", description="Lloyd quantization dynamics on the circle")
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", parents=[common, density, grid, orbit],
                           help="stability diagram")
    sweep.add_argument("--trials", type=int, help="independent seeded trials per κ")
    sweep.add_argument("--no-drift", dest="no_drift", action="store_true",
                       help="skip drift removal")
    sub.add_parser("eigen", parents=[common, density], help="circulant spectrum at one κ")
    sub.add_parser("fscan", parents=[common, density, grid], help="λ_min and F over κ")
    sub.add_parser("lyapunov", parents=[common, density, grid, orbit, fd],
                   help="Lyapunov spectra over κ")
    sub.add_parser("sala", parents=[common, density, sala, config], help="SALA residual trace")
    sub.add_parser("jacobian", parents=[common, density, fd],
                   help="analytic vs finite-difference Jacobian")
    critical = sub.add_parser("critical-kappa", parents=[common, density, grid],
                              help="root of F(κ) = flip bound")
    critical.add_argument("--tol", type=float, help="bisection tolerance")
    sub.add_parser("distortion", parents=[common, density, config], help="distortion of Q")
    step = sub.add_parser("step", parents=[common, density, config, fd],
                          help="one Lloyd step, or an orbit with --iters")
    step.add_argument("--iters", dest="orbit_steps", type=int,
                      help="also iterate this many steps and report the orbit")
    step.add_argument("--no-drift", dest="no_drift", action="store_true",
                      help="skip drift removal along the orbit")
    return parser


# =============================================================================
# ENTRY POINT
# =============================================================================

def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    parser = build_parser()
    try:
        namespace = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        cfg = RunConfig(**{k: v for k, v in vars(namespace).items() if v is not None})
        HANDLERS[cfg.command](cfg)
    except (ValidationError, UsageError) as exc:
        print(f"circloyd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LloydError as exc:
        print(f"circloyd: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"circloyd: I/O error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
