"""
circloyd SALA

Stability-aware Lloyd iteration: normalized Lloyd steps with a
convergence window, period-2 oscillation detection and a random
zero-mean kick to escape a detected oscillation.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..models.circle import CentroidMode, SalaConfig, SalaStatus, TraceRow
from .angle import Configuration, aligned_distance, remove_drift, sort_config, wrap_2pi
from .density import DensityModel
from .errors import LloydError, OrbitError
from .quantizer import LloydMap, random_configuration

logger = logging.getLogger(__name__)


@dataclass
class SalaTrace:
    """
    Per-iteration record of a SALA run.

    status is converged only when the last window_L residuals are all
    below epsilon.
    """
    rows: List[TraceRow] = field(default_factory=list)
    perturbations: List[int] = field(default_factory=list)
    terminal: Optional[Configuration] = None
    status: SalaStatus = SalaStatus.MAX_ITERATIONS

    @property
    def residuals(self) -> List[float]:
        return [row.residual for row in self.rows]

    @property
    def converged(self) -> bool:
        return self.status == SalaStatus.CONVERGED

    def __len__(self) -> int:
        return len(self.rows)


def oscillation_indicator(q_next: Configuration, q_prev2: Configuration) -> float:
    """ρ = ||Q^(t+1) - Q^(t-1)|| under the same alignment as the residual."""
    return aligned_distance(q_prev2, q_next)


def zero_mean_kick(rng: np.random.Generator, n: int, delta: float) -> np.ndarray:
    """δ·ξ with ξ uniform on [-1, 1]^n, recentered to mean zero."""
    xi = rng.uniform(-1.0, 1.0, size=n)
    return delta * (xi - xi.mean())


def sala_run(
    model: DensityModel,
    n: int,
    cfg: Optional[SalaConfig] = None,
    q0: Optional[Configuration] = None,
    mode: CentroidMode = CentroidMode.INTRINSIC,
) -> SalaTrace:
    """
    Run SALA from q0, or from a random configuration drawn with cfg.seed.

    Each iteration applies the Lloyd map, wraps, sorts and removes drift,
    then records r_t. From the second iteration on, ρ_t < ε together with
    r_t > η counts as a period-2 oscillation; the new iterate is then kicked
    by a zero-mean vector of size δ and re-sorted, and the convergence
    window restarts.
    """
    cfg = cfg or SalaConfig()
    lmap = LloydMap(model, mode)
    rng = np.random.default_rng(cfg.seed)
    current = q0 if q0 is not None else random_configuration(n, rng)

    trace = SalaTrace(terminal=current)
    previous: Optional[Configuration] = None
    streak = 0
    for t in range(1, cfg.t_max + 1):
        try:
            nxt = remove_drift(lmap.step(current))
            residual = aligned_distance(current, nxt)
            rho = math.nan if previous is None else oscillation_indicator(nxt, previous)
            perturbed = False
            if cfg.perturb and previous is not None and rho < cfg.epsilon and residual > cfg.eta:
                nxt = sort_config(wrap_2pi(nxt.points + zero_mean_kick(rng, nxt.n, cfg.delta)))
                perturbed = True
        except LloydError as exc:
            trace.terminal = current
            logger.warning("SALA aborted at iteration %d: %s", t, exc)
            raise OrbitError(str(exc), step=t, partial=trace) from exc

        if perturbed:
            trace.perturbations.append(t)
            streak = 0
            logger.warning("period-2 oscillation at t=%d (r=%.3e, rho=%.3e); perturbing",
                           t, residual, rho)
        elif residual < cfg.epsilon:
            streak += 1
        else:
            streak = 0

        trace.rows.append(TraceRow(t=t, residual=residual, rho=rho, perturbed=perturbed))
        logger.debug("SALA t=%d r=%.3e rho=%.3e", t, residual, rho)
        previous, current = current, nxt
        trace.terminal = current
        if streak >= cfg.window_L:
            trace.status = SalaStatus.CONVERGED
            break

    logger.info("SALA %s after %d iterations, %d perturbation(s)",
                trace.status.value, len(trace), len(trace.perturbations))
    return trace
