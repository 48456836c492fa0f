"""
circloyd experiments

Batch drivers over κ grids:
- stability_sweep: post-transient codepoints of normalized Lloyd orbits
- eigen_scan: smallest circulant eigenvalue against the -1 boundary
- lyapunov_scan: Lyapunov spectra per κ
- residual_trace: a SALA run as rows
- critical_scan: critical κ search for several n
- symmetry_diagnostics: how well the equally spaced configuration behaves as a fixed point

Grid points are independent. With threads > 1 they run on a thread pool,
and results are always merged in grid order.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from ..models.circle import (
    KAPPA_MAX,
    CentroidMode,
    CriticalKappaResult,
    DensityFamily,
    DensitySpec,
    LyapunovReport,
    SalaConfig,
    ScanRecord,
    SweepRecord,
)
from .angle import (
    Configuration,
    aligned_distance,
    forward_gaps,
    remove_drift,
    symmetric_configuration,
)
from .density import DensityModel
from .errors import DomainError, LloydError
from .linearization import DEFAULT_FD_EPS, expand, fd_jacobian, symmetric_jacobian
from .lyapunov import lyapunov_spectrum
from .quantizer import LloydMap, Orbit, random_configuration
from .sala import SalaTrace, sala_run
from .stability import DEFAULT_KAPPA_RANGE, DEFAULT_TOL, classify, critical_kappa

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

# gap spread below which a sweep column counts as settled
COLUMN_TOL = 1e-4


# =============================================================================
# HELPERS
# =============================================================================

def kappa_grid(kappa_min: float, kappa_max: float, n_kappa: int) -> List[float]:
    """κ_i = κ_min + iΔκ with Δκ = (κ_max - κ_min)/(n_kappa - 1); one point when n_kappa = 1."""
    if not (0.0 <= kappa_min <= kappa_max <= KAPPA_MAX):
        raise DomainError(
            f"kappa range must satisfy 0 ≤ min ≤ max ≤ {KAPPA_MAX:g}, got ({kappa_min}, {kappa_max})"
        )
    if n_kappa < 1:
        raise DomainError(f"n_kappa must be positive, got {n_kappa}")
    if n_kappa == 1:
        return [float(kappa_min)]
    step = (kappa_max - kappa_min) / (n_kappa - 1)
    return [float(kappa_min + i * step) for i in range(n_kappa)]


def density_for(
    family: DensityFamily,
    kappa: float,
    mu: float = 0.0,
    normalized: bool = True,
) -> DensityModel:
    return DensityModel.from_spec(
        DensitySpec(family=family, kappa=kappa, mu=mu, normalized=normalized)
    )


def trial_seed(seed: int, kappa_index: int, trial: int) -> int:
    """Independent per-(κ, trial) seed derived from the run seed."""
    return int(np.random.SeedSequence([seed, kappa_index, trial]).generate_state(1)[0])


def _map_ordered(fn: Callable[[T], R], items: Sequence[T], threads: int) -> List[R]:
    if threads <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# =============================================================================
# STABILITY DIAGRAM
# =============================================================================

def stability_sweep(
    kappa_min: float,
    kappa_max: float,
    n_kappa: int,
    n: int,
    n_iter: int,
    n_trans: int,
    seed: int = 0,
    family: DensityFamily = DensityFamily.VONMISES,
    trials: int = 1,
    drift: bool = True,
    threads: int = 1,
    mode: CentroidMode = CentroidMode.INTRINSIC,
    mu: float = 0.0,
) -> List[SweepRecord]:
    """
    Codepoints of normalized Lloyd orbits for every t > n_trans, per κ and trial.

    A κ (or trial) whose orbit fails contributes one marker record instead
    and the sweep carries on.
    """
    if n_kappa < 2:
        raise DomainError(f"n_kappa must be at least 2, got {n_kappa}")
    if not (0 <= n_trans < n_iter):
        raise DomainError(f"need 0 ≤ n_trans < n_iter, got {n_trans}, {n_iter}")
    if trials < 1:
        raise DomainError(f"trials must be positive, got {trials}")
    kappas = kappa_grid(kappa_min, kappa_max, n_kappa)
    items = [(i, k, trial) for i, k in enumerate(kappas) for trial in range(trials)]
    logger.info("sweep n=%d over %d kappa values x %d trial(s)", n, n_kappa, trials)

    def run(item: Tuple[int, float, int]) -> List[SweepRecord]:
        index, kappa, trial = item
        tseed = trial_seed(seed, index, trial)
        lmap = LloydMap(density_for(family, kappa, mu), mode)
        records: List[SweepRecord] = []
        try:
            config = random_configuration(n, tseed)
            for t in range(1, n_iter + 1):
                config = lmap.step(config)
                if drift:
                    config = remove_drift(config)
                if t > n_trans:
                    records.extend(
                        SweepRecord(kappa=kappa, t=t, j=j, angle=float(a), trial_seed=tseed)
                        for j, a in enumerate(config.points)
                    )
        except LloydError as exc:
            logger.warning("sweep kappa=%g trial=%d failed: %s", kappa, trial, exc)
            return [SweepRecord(kappa=kappa, t=-1, j=-1, angle=math.nan,
                                trial_seed=tseed, error=str(exc))]
        return records

    batches = _map_ordered(run, items, threads)
    records = [record for batch in batches for record in batch]
    flagged = set(alternating_columns(records))
    if not flagged:
        return records
    return [r.model_copy(update={"alternating": True}) if (r.kappa, r.trial_seed) in flagged else r
            for r in records]


def alternating_columns(
    records: Sequence[SweepRecord],
    tol: float = COLUMN_TOL,
) -> List[Tuple[float, int]]:
    """
    (κ, trial seed) of columns that move while keeping their gap multiset.

    Such a column has settled up to rotation: literal mean subtraction is
    not rotation-equivariant at the seam, so the normalized orbit can hop
    between rotated copies of one configuration and draw 2n angles.
    """
    columns: Dict[Tuple[float, int], Dict[int, List[float]]] = {}
    for r in records:
        if not r.is_marker:
            columns.setdefault((r.kappa, r.trial_seed), {}).setdefault(r.t, []).append(r.angle)

    flagged = []
    for key, steps in columns.items():
        states = np.array([np.sort(steps[t]) for t in sorted(steps)])
        if len(states) < 2:
            continue
        gaps = np.sort(forward_gaps(states), axis=-1)
        if np.max(np.abs(gaps - gaps[0])) >= tol:
            continue
        first = Configuration(states[0])
        if max(aligned_distance(Configuration(s), first) for s in states[1:]) > tol:
            flagged.append(key)
    if flagged:
        logger.warning("%d sweep column(s) alternate between rotated copies: kappa=%s",
                       len(flagged), ", ".join(f"{k:g}" for k, _ in flagged))
    return flagged


# =============================================================================
# SPECTRAL SCANS
# =============================================================================

def eigen_scan(
    n: int,
    kappas: Iterable[float],
    family: DensityFamily = DensityFamily.VONMISES,
    mu: float = 0.0,
    threads: int = 1,
) -> List[ScanRecord]:
    """λ_min, F and the flip bound at each κ."""

    def run(kappa: float) -> ScanRecord:
        report = classify(n, density_for(family, kappa, mu))
        return ScanRecord(kappa=kappa, lambda_min=report.lambda_min, F=report.F, bound=report.bound)

    return _map_ordered(run, [float(k) for k in kappas], threads)


def lyapunov_scan(
    n: int,
    kappas: Iterable[float],
    n_trans: int = 200,
    n_iter: int = 500,
    eps: float = DEFAULT_FD_EPS,
    seed: int = 0,
    family: DensityFamily = DensityFamily.VONMISES,
    mode: CentroidMode = CentroidMode.INTRINSIC,
    mu: float = 0.0,
    threads: int = 1,
) -> List[LyapunovReport]:
    """One report per κ; every κ starts from the same seeded configuration."""

    def run(kappa: float) -> LyapunovReport:
        try:
            return lyapunov_spectrum(density_for(family, kappa, mu), n, n_trans=n_trans,
                                     n_iter=n_iter, eps=eps, seed=seed, mode=mode)
        except LloydError as exc:
            logger.warning("lyapunov kappa=%g failed: %s", kappa, exc)
            return LyapunovReport(
                kappa=kappa, n=n, n_iter=n_iter, n_trans=n_trans, eps=eps, seed=seed,
                exponents=[math.nan] * n, floored=[False] * n,
                transverse_exponents=[math.nan] * (n - 1), error=str(exc),
            )

    return _map_ordered(run, [float(k) for k in kappas], threads)


def lyapunov_columns(n: int) -> List[str]:
    return ["kappa"] + [f"lambda_{j}" for j in range(1, n + 1)] + ["transverse_max"]


def lyapunov_rows(reports: Sequence[LyapunovReport]) -> List[dict]:
    """Flatten reports to `kappa, lambda_1..lambda_n, transverse_max`."""
    rows = []
    for report in reports:
        row = {"kappa": report.kappa}
        row.update({f"lambda_{j}": v for j, v in enumerate(report.exponents, start=1)})
        row["transverse_max"] = report.max_transverse
        rows.append(row)
    return rows


ORBIT_COLUMNS = ["t", "j", "angle", "residual", "distortion"]


def orbit_rows(orbit: Orbit) -> List[dict]:
    """
    One row per codepoint and state.

    residual is the aligned distance from the previous state, nan at t = 0;
    distortion belongs to the state itself.
    """
    rows = []
    for t, state in enumerate(orbit.states):
        residual = orbit.residuals[t - 1] if t > 0 else math.nan
        distortion = orbit.distortions[t] if t < len(orbit.distortions) else math.nan
        rows.extend(
            {"t": t, "j": j, "angle": float(a), "residual": residual, "distortion": distortion}
            for j, a in enumerate(state.points)
        )
    return rows


# =============================================================================
# SALA TRACE
# =============================================================================

TRACE_COLUMNS = ["t", "residual", "rho", "perturbed"]


def trace_rows(trace: SalaTrace) -> List[dict]:
    return [
        {"t": row.t, "residual": row.residual, "rho": row.rho, "perturbed": int(row.perturbed)}
        for row in trace.rows
    ]


def residual_trace(
    model: DensityModel,
    n: int,
    cfg: Optional[SalaConfig] = None,
    mode: CentroidMode = CentroidMode.INTRINSIC,
) -> List[dict]:
    return trace_rows(sala_run(model, n, cfg, mode=mode))


# =============================================================================
# CRITICAL CONCENTRATION AND SYMMETRY CHECKS
# =============================================================================

def critical_scan(
    ns: Iterable[int],
    kappa_range: Tuple[float, float] = DEFAULT_KAPPA_RANGE,
    tol: float = DEFAULT_TOL,
    model_factory: Callable[[float], DensityModel] = DensityModel.von_mises,
) -> List[CriticalKappaResult]:
    """critical_kappa for several codebook sizes over one κ range."""
    return [critical_kappa(n, kappa_range, tol, model_factory=model_factory) for n in ns]


def symmetry_diagnostics(n: int, model: DensityModel, eps: float = DEFAULT_FD_EPS) -> dict:
    """
    Behaviour of the equally spaced configuration Q* (offset μ) under the model.

    Reports the fixed-point residual in both centroid modes, the distance
    between the intrinsic and extrinsic images, and the largest entry of
    fd_jacobian(Q*) - circulant(α, β).
    """
    q_star = symmetric_configuration(n, offset=model.mu)
    intrinsic = LloydMap(model, CentroidMode.INTRINSIC)
    extrinsic = LloydMap(model, CentroidMode.EXTRINSIC)
    image_in = intrinsic.step(q_star)
    image_ex = extrinsic.step(q_star)
    deviation = np.abs(fd_jacobian(q_star, model, eps=eps) - expand(symmetric_jacobian(n, model)))
    return {
        "n": n,
        "kappa": model.kappa,
        "residual_intrinsic": aligned_distance(q_star, image_in),
        "residual_extrinsic": aligned_distance(q_star, image_ex),
        "mode_discrepancy": aligned_distance(image_in, image_ex),
        "fd_max_deviation": float(np.max(deviation)),
    }
