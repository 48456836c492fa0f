"""
circloyd models

Validated parameter bundles and analysis records for the Lloyd map on S¹.

Array-carrying state (configurations, partitions, orbits, spectra) lives
next to the service that produces it as a dataclass; everything here is
plain numbers and feeds CSV/JSON emission.
"""

import math
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# =============================================================================
# ENUMS
# =============================================================================

class DensityFamily(str, Enum):
    UNIFORM = "uniform"
    VONMISES = "vonmises"


class CentroidMode(str, Enum):
    INTRINSIC = "intrinsic"  # q_j + N_j/D_j in local coordinates
    EXTRINSIC = "extrinsic"  # arg of the cell's first circular moment


class Verdict(str, Enum):
    STABLE = "stable"
    MARGINAL = "marginal"
    UNSTABLE = "unstable"


class RootStatus(str, Enum):
    ROOT = "root"
    NO_ROOT = "no_root"


class SalaStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max_iterations"


# =============================================================================
# DENSITY PARAMETERS
# =============================================================================

KAPPA_MAX = 700.0  # e^κ overflows a double near 709


class VonMisesParams(BaseModel):
    """Concentration and mean direction of a von Mises density."""
    model_config = ConfigDict(frozen=True)

    kappa: float = Field(0.0, ge=0.0, le=KAPPA_MAX)
    mu: float = 0.0

    @field_validator("kappa", "mu")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v


class DensitySpec(BaseModel):
    """
    Serializable description of a density on S¹.

    mu defaults to 0; rotating the density only rotates every result.
    """
    model_config = ConfigDict(frozen=True)

    family: DensityFamily = DensityFamily.VONMISES
    kappa: float = Field(0.0, ge=0.0, le=KAPPA_MAX)
    mu: float = 0.0
    normalized: bool = True

    @field_validator("kappa", "mu")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("must be finite")
        return v

    @property
    def params(self) -> VonMisesParams:
        return VonMisesParams(kappa=self.kappa, mu=self.mu)

    def with_kappa(self, kappa: float) -> "DensitySpec":
        return self.model_copy(update={"kappa": kappa})


# =============================================================================
# LINEARIZATION / STABILITY RECORDS
# =============================================================================

class CirculantJacobian(BaseModel):
    """
    Linearization of the Lloyd map at the symmetric configuration.

    Periodic tridiagonal circulant: alpha on the diagonal, beta on both
    cyclic neighbours. The row sum alpha + 2 beta is 1.
    """
    model_config = ConfigDict(frozen=True)

    n: int = Field(..., ge=2)
    alpha: float
    beta: float

    @model_validator(mode="after")
    def _row_sum(self) -> "CirculantJacobian":
        if abs(self.alpha + 2.0 * self.beta - 1.0) > 1e-12:
            raise ValueError(f"row sum alpha + 2 beta = {self.alpha + 2 * self.beta}, expected 1")
        return self


class StabilityReport(BaseModel):
    """Stability verdict for the symmetric quantizer."""
    n: int
    kappa: Optional[float] = None
    F: float
    bound: float
    m_star: int
    lambda_min: float
    verdict: Verdict
    margin: float  # bound - F


class CriticalKappaResult(BaseModel):
    """Outcome of the flip-condition root search."""
    n: int
    status: RootStatus
    kappa_c: Optional[float] = None
    max_F: float
    bound: float
    kappa_range: Tuple[float, float]


class ScanRecord(BaseModel):
    """One κ of the eigenvalue scan."""
    kappa: float
    lambda_min: float
    F: float
    bound: float


# =============================================================================
# LYAPUNOV
# =============================================================================

LOG_FLOOR = -50.0


class LyapunovReport(BaseModel):
    """
    Lyapunov spectrum of one orbit (nats per iteration).

    exponents cover the full configuration space; transverse_exponents are
    computed on the complement of the rotation direction 1.
    """
    kappa: Optional[float] = None
    n: int
    n_iter: int
    n_trans: int
    eps: float
    seed: int
    exponents: List[float] = Field(default_factory=list)
    floored: List[bool] = Field(default_factory=list)
    transverse_exponents: List[float] = Field(default_factory=list)
    error: Optional[str] = None

    @property
    def max_exponent(self) -> float:
        return self.exponents[0] if self.exponents else math.nan

    @property
    def max_transverse(self) -> float:
        return self.transverse_exponents[0] if self.transverse_exponents else math.nan


# =============================================================================
# SALA
# =============================================================================

class SalaConfig(BaseModel):
    """
    Stability-Aware Lloyd Algorithm settings.

    delta is required by the perturbation step even though the algorithm's
    requirements line leaves it out. perturb=False switches the escape off.
    """
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(1e-9, gt=0.0)
    eta: float = Field(1e-4, gt=0.0)
    delta: float = Field(1e-3, gt=0.0)
    window_L: int = Field(5, ge=1)
    t_max: int = Field(10000, ge=1)
    seed: int = 0
    perturb: bool = True

    @model_validator(mode="after")
    def _eta_above_epsilon(self) -> "SalaConfig":
        if self.eta <= self.epsilon:
            raise ValueError("eta must exceed epsilon")
        return self


class TraceRow(BaseModel):
    """One SALA iteration: residual, oscillation indicator, perturbation flag."""
    t: int
    residual: float
    rho: float  # nan before the second iteration
    perturbed: bool = False


# =============================================================================
# SWEEPS
# =============================================================================

class SweepRecord(BaseModel):
    """
    One post-transient codepoint of the stability diagram.

    A κ whose orbit failed is represented by a single marker record with
    t = j = -1, angle = nan and the error message. alternating marks a
    column whose orbit hops between rotated copies of one gap pattern.
    """
    kappa: float
    t: int
    j: int
    angle: float
    trial_seed: int
    error: Optional[str] = None
    alternating: bool = False

    @property
    def is_marker(self) -> bool:
        return self.error is not None
