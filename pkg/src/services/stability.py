"""
circloyd stability

Linear stability of the equally spaced quantizer: the stability functional
F = (π/(nM)) h(π/n) = 2β, the flip bound 2/(1 - cos(2πm*/n)) at the
critical mode m*, verdicts, and the root search for a critical κ where F
reaches the bound.
"""

import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import optimize

from ..models.circle import (
    KAPPA_MAX,
    CriticalKappaResult,
    RootStatus,
    StabilityReport,
    Verdict,
)
from .density import DensityModel
from .errors import DomainError
from .linearization import symmetric_jacobian

logger = logging.getLogger(__name__)

MARGINAL_BAND = 1e-12
SCAN_POINTS = 256
DEFAULT_KAPPA_RANGE = (0.0, 100.0)
DEFAULT_TOL = 1e-10


def _check_n(n: int) -> int:
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    return int(n)


def _critical_cosine(n: int) -> float:
    m = m_star(n)
    return math.cos(2.0 * math.pi * min(m, n - m) / n)


def m_star(n: int) -> int:
    """Fourier mode minimizing cos(2πm/n): n/2 for even n, ⌊n/2⌋ for odd n."""
    return _check_n(n) // 2


def flip_bound(n: int) -> float:
    """2/(1 - cos(2πm*/n)); exactly 1 for even n."""
    n = _check_n(n)
    if n % 2 == 0:
        return 1.0
    return 2.0 / (1.0 - _critical_cosine(n))


def stability_functional_F(n: int, model: DensityModel) -> float:
    """F = (π/(nM)) h(π/n), with M the mass of (-π/n, π/n); equals 2β."""
    return 2.0 * symmetric_jacobian(_check_n(n), model).beta


def classify_functional(n: int, F: float, kappa: Optional[float] = None) -> StabilityReport:
    """Verdict for a given value of F; |F - bound| ≤ 1e-12 is marginal."""
    n = _check_n(n)
    if not math.isfinite(F):
        raise DomainError(f"F must be finite, got {F}")
    bound = flip_bound(n)
    margin = bound - F
    if abs(margin) <= MARGINAL_BAND:
        verdict = Verdict.MARGINAL
    elif margin > 0:
        verdict = Verdict.STABLE
    else:
        verdict = Verdict.UNSTABLE
    return StabilityReport(
        n=n,
        kappa=kappa,
        F=F,
        bound=bound,
        m_star=m_star(n),
        lambda_min=1.0 - F * (1.0 - _critical_cosine(n)),
        verdict=verdict,
        margin=margin,
    )


def classify(n: int, model: DensityModel) -> StabilityReport:
    report = classify_functional(n, stability_functional_F(n, model), kappa=model.kappa)
    logger.debug("classify n=%d %s -> %s (F=%.12g)", n, model.name, report.verdict.value, report.F)
    return report


def critical_kappa(
    n: int,
    kappa_range: Tuple[float, float] = DEFAULT_KAPPA_RANGE,
    tol: float = DEFAULT_TOL,
    model_factory: Callable[[float], DensityModel] = DensityModel.von_mises,
    functional: Optional[Callable[[float], float]] = None,
) -> CriticalKappaResult:
    """
    Search for κ_c with F(κ_c) = flip_bound(n).

    F - bound is sampled on 256 equally spaced points; the first sign change
    is refined by bisection to tol. Without one, no_root is returned along
    with the largest F seen. functional, when given, replaces
    κ -> F(n, model_factory(κ)).
    """
    n = _check_n(n)
    lo, hi = (float(k) for k in kappa_range)
    if not (0.0 <= lo < hi <= KAPPA_MAX) or not (math.isfinite(lo) and math.isfinite(hi)):
        raise DomainError(f"kappa range must satisfy 0 ≤ lo < hi ≤ {KAPPA_MAX:g}, got {kappa_range}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")

    if functional is None:
        def functional(kappa: float) -> float:
            return stability_functional_F(n, model_factory(kappa))

    bound = flip_bound(n)

    def excess(kappa: float) -> float:
        return functional(kappa) - bound

    grid = np.linspace(lo, hi, SCAN_POINTS)
    values = np.array([excess(k) for k in grid])
    max_F = float(np.max(values) + bound)

    kappa_c: Optional[float] = None
    for i in range(SCAN_POINTS):
        if values[i] == 0.0:
            kappa_c = float(grid[i])
            break
        if i + 1 < SCAN_POINTS and values[i] * values[i + 1] < 0.0:
            kappa_c = float(optimize.bisect(excess, grid[i], grid[i + 1], xtol=tol))
            break

    status = RootStatus.NO_ROOT if kappa_c is None else RootStatus.ROOT
    logger.info("critical kappa n=%d: %s (max F=%.12g, bound=%.12g)", n, status.value, max_F, bound)
    return CriticalKappaResult(
        n=n,
        status=status,
        kappa_c=kappa_c,
        max_F=max_F,
        bound=bound,
        kappa_range=(lo, hi),
    )
