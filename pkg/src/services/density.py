"""
circloyd densities on S¹

Uniform and von Mises densities, the modified Bessel normalization, and
arc integrals (mass, local first moment, first circular moment) feeding
the Lloyd map and its Jacobian.

Arc integrals use composite Gauss-Legendre quadrature of order 64 on
panels no longer than π/8. Arcs are parameterized by their offset from
a reference angle, so an arc across the 0/2π seam needs no special case.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np
from scipy import special

from ..models.circle import KAPPA_MAX, DensityFamily, DensitySpec, VonMisesParams
from .angle import DUPLICATE_TOL, TWO_PI, wrap_2pi
from .errors import CellTooLargeError, DegenerateConfigurationError, DomainError

logger = logging.getLogger(__name__)

GL_ORDER = 64
MAX_PANEL = math.pi / 8
CELL_SLACK = 1e-9


# =============================================================================
# BESSEL FUNCTIONS
# =============================================================================

def _check_kappa(kappa: float) -> float:
    kappa = float(kappa)
    if not math.isfinite(kappa) or kappa < 0.0 or kappa > KAPPA_MAX:
        raise DomainError(f"kappa must lie in [0, {KAPPA_MAX:g}], got {kappa}")
    return kappa


def bessel_i0(kappa: float) -> float:
    """Modified Bessel function of the first kind, order zero."""
    return float(special.i0(_check_kappa(kappa)))


def bessel_i1(kappa: float) -> float:
    """Modified Bessel function of the first kind, order one."""
    return float(special.i1(_check_kappa(kappa)))


def mean_resultant_length(kappa: float) -> float:
    """A(κ) = I₁(κ)/I₀(κ), the length of the von Mises first moment."""
    kappa = _check_kappa(kappa)
    # exponentially scaled forms cancel the e^κ growth
    return float(special.i1e(kappa) / special.i0e(kappa))


# =============================================================================
# QUADRATURE
# =============================================================================

@lru_cache(maxsize=64)
def _composite_rule(panels: int, order: int = GL_ORDER) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes in (0, 1) and weights summing to 1 for equal Gauss-Legendre panels."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    starts = np.arange(panels) / panels
    nodes = (starts[:, None] + x[None, :] / panels).ravel()
    weights = np.tile(w / panels, panels)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@dataclass(frozen=True)
class CellMoments:
    """
    Integrals of the density over arcs, in the arc's local coordinate u.

    mass is D_j, local_first is N_j = ∫ u h, second is ∫ u² h and
    circular_first is ∫ e^{iθ} h (absolute angle). Fields are floats for a
    single arc and arrays for a batch.
    """
    mass: np.ndarray
    local_first: np.ndarray
    second: np.ndarray
    circular_first: np.ndarray


# =============================================================================
# DENSITY MODELS
# =============================================================================

class DensityModel(ABC):
    """
    Strictly positive density on S¹ with arc-integral queries.

    Subclasses supply the unnormalized shape and its normalization; the
    model is immutable, so every query is thread-safe.
    """

    max_panel: float

    @property
    @abstractmethod
    def name(self) -> str:
        ...

    @property
    @abstractmethod
    def normalization(self) -> float:
        """Constant dividing the shape: 2πI₀(κ), 2π, or 1 when unnormalized."""

    @property
    def kappa(self) -> float:
        return 0.0

    @property
    def mu(self) -> float:
        return 0.0

    @abstractmethod
    def eval(self, theta):
        """Density value(s) at theta, in probability per radian."""

    # -------------------------------------------------------------------------
    # Factories
    # -------------------------------------------------------------------------

    @staticmethod
    def uniform() -> "UniformDensity":
        return UniformDensity()

    @staticmethod
    def von_mises(kappa: float, mu: float = 0.0, normalized: bool = True) -> "VonMisesDensity":
        return VonMisesDensity(VonMisesParams(kappa=kappa, mu=mu), normalized=normalized)

    @staticmethod
    def custom(fn: Callable[[np.ndarray], np.ndarray], label: str = "custom") -> "CustomDensity":
        return CustomDensity(fn, label=label)

    @staticmethod
    def from_spec(spec: DensitySpec) -> "DensityModel":
        if spec.family == DensityFamily.UNIFORM:
            model: DensityModel = UniformDensity()
        else:
            model = VonMisesDensity(spec.params, normalized=spec.normalized)
        logger.debug("density %s from %s", model.name, spec.model_dump())
        return model

    # -------------------------------------------------------------------------
    # Arc integrals
    # -------------------------------------------------------------------------

    def cell_moments(self, centers, lower, upper) -> CellMoments:
        """
        Moments over the arcs [center + lower, center + upper].

        lower/upper are offsets from center (lower < upper); all three may be
        arrays of one common shape. The panel count is chosen from the longest
        arc so every panel is at most max_panel long.
        """
        centers = np.asarray(centers, dtype=float)
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        length = upper - lower
        longest = float(np.max(length)) if length.size else 0.0
        panels = max(1, math.ceil(longest / self.max_panel - 1e-12))
        s, w = _composite_rule(panels)

        u = lower[..., None] + length[..., None] * s
        hw = self.eval(centers[..., None] + u) * w
        mass = length * hw.sum(axis=-1)
        first = length * (hw * u).sum(axis=-1)
        second = length * (hw * u * u).sum(axis=-1)
        c = length * (hw * np.cos(u)).sum(axis=-1)
        sn = length * (hw * np.sin(u)).sum(axis=-1)
        circular = (np.cos(centers) + 1j * np.sin(centers)) * (c + 1j * sn)
        return CellMoments(mass=mass, local_first=first, second=second, circular_first=circular)

    def arc_mass(self, a: float, b: float) -> float:
        """Probability of the forward arc from a to b (0 to 2π is the full circle)."""
        start, length = _forward_arc(a, b)
        return float(self.cell_moments(start, 0.0, length).mass)

    def arc_local_first_moment(self, a: float, b: float, center: float) -> float:
        """
        N = ∫ wrap_pi(θ - center) h(θ) dθ over the forward arc from a to b.

        The arc must be at most a half circle and contain center.
        """
        start, length = _forward_arc(a, b)
        if length > math.pi + CELL_SLACK:
            raise CellTooLargeError(f"arc of length {length:.12g} exceeds π")
        offset = float(wrap_2pi(center - start))
        if offset > length + DUPLICATE_TOL:
            raise DomainError(f"center {center} lies outside the arc ({a}, {b})")
        return float(self.cell_moments(center, -offset, length - offset).local_first)

    def arc_circular_first_moment(self, a: float, b: float) -> complex:
        """∫ e^{iθ} h(θ) dθ over the forward arc; divide by arc_mass for m₁."""
        start, length = _forward_arc(a, b)
        return complex(self.cell_moments(start, 0.0, length).circular_first)

    def total_mass(self) -> float:
        return float(self.cell_moments(0.0, 0.0, TWO_PI).mass)


def _forward_arc(a: float, b: float) -> Tuple[float, float]:
    a = float(a)
    b = float(b)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("arc endpoints must be finite")
    raw = b - a
    length = raw % TWO_PI
    if length < DUPLICATE_TOL or TWO_PI - length < DUPLICATE_TOL:
        if abs(raw) < DUPLICATE_TOL:
            raise DegenerateConfigurationError(f"zero-length arc ({a}, {b})")
        length = TWO_PI
    return a, length


@dataclass(frozen=True)
class UniformDensity(DensityModel):
    """h(θ) = 1/(2π)."""
    max_panel: float = MAX_PANEL

    @property
    def name(self) -> str:
        return "uniform"

    @property
    def normalization(self) -> float:
        return TWO_PI

    def eval(self, theta):
        theta = np.asarray(theta, dtype=float)
        value = np.full(theta.shape, 1.0 / TWO_PI)
        return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class VonMisesDensity(DensityModel):
    """
    h(θ; κ, μ) = e^{κ cos(θ - μ)} / (2π I₀(κ)).

    With normalized=False the shape e^{κ cos(θ - μ)} is used as is; every
    downstream ratio (N/D, F) is unchanged by the scale.
    """
    params: VonMisesParams
    normalized: bool = True
    max_panel: float = MAX_PANEL

    @property
    def name(self) -> str:
        return f"vonmises(kappa={self.params.kappa:g}, mu={self.params.mu:g})"

    @property
    def kappa(self) -> float:
        return self.params.kappa

    @property
    def mu(self) -> float:
        return self.params.mu

    @property
    def normalization(self) -> float:
        return TWO_PI * bessel_i0(self.params.kappa) if self.normalized else 1.0

    def eval(self, theta):
        kappa = self.params.kappa
        c = np.cos(np.asarray(theta, dtype=float) - self.params.mu)
        if self.normalized:
            # e^{κ(cos - 1)} / (2π I₀ e^{-κ}) keeps large κ finite
            value = np.exp(kappa * (c - 1.0)) / (TWO_PI * special.i0e(kappa))
        else:
            value = np.exp(kappa * c)
        return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class CustomDensity(DensityModel):
    """
    Arbitrary positive shape given as a vectorized callable of θ ∈ [0, 2π).

    Left unnormalized; used for synthetic families in tests and scans.
    """
    fn: Callable[[np.ndarray], np.ndarray]
    label: str = "custom"
    max_panel: float = MAX_PANEL

    @property
    def name(self) -> str:
        return self.label

    @property
    def normalization(self) -> float:
        return 1.0

    def eval(self, theta):
        value = np.asarray(self.fn(wrap_2pi(np.asarray(theta, dtype=float))), dtype=float)
        return float(value) if value.ndim == 0 else value
