"""
circloyd quantizer

Voronoi partition on S¹, the Lloyd map T in its intrinsic (local mean)
and extrinsic (arg of first circular moment) forms, distortion, fixed-point
residuals and orbit iteration with wrap -> sort -> drift removal.

Cell j of a cyclically ordered point set runs from the midpoint with its
predecessor to the midpoint with its successor. Integrals are taken in
the local coordinate u = θ - q_j ∈ [-g_{j-1}/2, g_j/2], which is also the
signed geodesic offset because every cell is at most a half circle.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from ..models.circle import CentroidMode
from .angle import (
    TWO_PI,
    Configuration,
    aligned_distance,
    forward_gaps,
    remove_drift,
    sort_config,
    wrap_2pi,
)
from .density import CELL_SLACK, DensityModel
from .errors import (
    CellTooLargeError,
    DegenerateConfigurationError,
    LloydError,
    OrbitError,
    UndefinedCentroidError,
)

logger = logging.getLogger(__name__)

MIN_GAP = 1e-10
UNDEFINED_CENTROID_TOL = 1e-14
RANDOM_GAP_DIVISOR = 100


# =============================================================================
# RESULT TYPES
# =============================================================================

@dataclass(frozen=True)
class VoronoiPartition:
    """
    Cells of a configuration.

    boundaries[j] is the midpoint between points[j] and points[j+1 mod n];
    cell j is the forward arc (boundaries[j-1], boundaries[j]).
    """
    generators: Configuration
    boundaries: np.ndarray
    lengths: np.ndarray

    @property
    def n(self) -> int:
        return self.generators.n

    def cell(self, j: int) -> tuple:
        return float(self.boundaries[j - 1]), float(self.boundaries[j])

    def locate(self, theta: float) -> int:
        """Index of the cell containing theta."""
        starts = np.roll(self.boundaries, 1)
        offsets = wrap_2pi(theta - starts)
        inside = np.flatnonzero(offsets < self.lengths)
        # boundary points belong to two cells; take the first
        return int(inside[0]) if inside.size else int(np.argmin(offsets - self.lengths))


@dataclass
class Orbit:
    """
    States of an iteration with per-step diagnostics.

    residuals[t] is the aligned distance between states[t+1] and states[t];
    distortions[t] belongs to states[t]. error is set when the run stopped early.
    """
    states: List[Configuration] = field(default_factory=list)
    residuals: List[float] = field(default_factory=list)
    distortions: List[float] = field(default_factory=list)
    error: Optional[str] = None

    @property
    def final(self) -> Configuration:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.states)


# =============================================================================
# LLOYD MAP
# =============================================================================

def _cell_offsets(points: np.ndarray):
    """Local cell bounds (lower, upper) for cyclically ordered points (..., n)."""
    gaps = forward_gaps(points)
    total = gaps.sum(axis=-1)
    if np.any(np.abs(total - TWO_PI) > 1e-9):
        raise DegenerateConfigurationError("codepoints are not in cyclic order")
    if np.any(gaps <= MIN_GAP):
        raise DegenerateConfigurationError("codepoints closer than the minimum gap")
    previous = np.roll(gaps, 1, axis=-1)
    lengths = 0.5 * (previous + gaps)
    if np.any(lengths > np.pi + CELL_SLACK):
        raise CellTooLargeError(f"cell of length {float(np.max(lengths)):.12g} exceeds π")
    return -0.5 * previous, 0.5 * gaps


class LloydMap:
    """
    The Lloyd map T for one density and centroid mode.

    step() returns a sorted Configuration; raw() keeps labels and accepts
    any cyclically ordered array (batches on the leading axes), which is
    what finite differences need.
    """

    def __init__(self, model: DensityModel, mode: CentroidMode = CentroidMode.INTRINSIC):
        self.model = model
        self.mode = CentroidMode(mode)

    def raw(self, points: np.ndarray) -> np.ndarray:
        """Label-preserving centroids of cyclically ordered points, wrapped to [0, 2π)."""
        points = np.asarray(points, dtype=float)
        lower, upper = _cell_offsets(points)
        moments = self.model.cell_moments(points, lower, upper)

        if self.mode == CentroidMode.INTRINSIC:
            updated = points + moments.local_first / moments.mass
        else:
            m1 = moments.circular_first / moments.mass
            if np.any(np.abs(m1) < UNDEFINED_CENTROID_TOL):
                raise UndefinedCentroidError("first circular moment vanishes on a cell")
            updated = np.angle(m1)
        return np.asarray(wrap_2pi(updated))

    def step(self, config: Configuration) -> Configuration:
        return sort_config(self.raw(config.points))

    def voronoi(self, config: Configuration) -> VoronoiPartition:
        lower, upper = _cell_offsets(config.points)
        boundaries = np.asarray(wrap_2pi(config.points + upper))
        return VoronoiPartition(generators=config, boundaries=boundaries, lengths=upper - lower)

    def distortion(self, config: Configuration) -> float:
        """Σ_j ∫_{R_j} d_G(θ, q_j)² h(θ) dθ."""
        lower, upper = _cell_offsets(config.points)
        return float(np.sum(self.model.cell_moments(config.points, lower, upper).second))

    def residual(self, config: Configuration) -> float:
        """Aligned distance between T(Q) and Q."""
        return aligned_distance(config, self.step(config))

    def iterate(
        self,
        q0: Configuration,
        t_max: int,
        normalize: bool = True,
    ) -> Orbit:
        """
        Iterate T up to t_max times.

        With normalize set, each new state goes through wrap -> sort ->
        drift removal. A failing step raises OrbitError carrying the partial
        orbit with its error field set.
        """
        orbit = Orbit(states=[q0], distortions=[self.distortion(q0)])
        current = q0
        for t in range(1, t_max + 1):
            try:
                nxt = self.step(current)
                if normalize:
                    nxt = remove_drift(nxt)
                orbit.distortions.append(self.distortion(nxt))
            except LloydError as exc:
                orbit.error = str(exc)
                logger.warning("orbit aborted at step %d: %s", t, exc)
                raise OrbitError(str(exc), step=t, partial=orbit) from exc
            orbit.residuals.append(aligned_distance(current, nxt))
            orbit.states.append(nxt)
            current = nxt
            logger.debug(
                "step %d residual=%.3e distortion=%.12g",
                t, orbit.residuals[-1], orbit.distortions[-1],
            )
        return orbit


# =============================================================================
# MODULE-LEVEL OPERATIONS
# =============================================================================

def voronoi(config: Configuration, model: Optional[DensityModel] = None) -> VoronoiPartition:
    """Voronoi partition; the density plays no part in it."""
    return LloydMap(model or DensityModel.uniform()).voronoi(config)


def lloyd_step(
    config: Configuration,
    model: DensityModel,
    mode: CentroidMode = CentroidMode.INTRINSIC,
) -> Configuration:
    return LloydMap(model, mode).step(config)


def distortion(config: Configuration, model: DensityModel) -> float:
    return LloydMap(model).distortion(config)


def fixed_point_residual(
    config: Configuration,
    model: DensityModel,
    mode: CentroidMode = CentroidMode.INTRINSIC,
) -> float:
    return LloydMap(model, mode).residual(config)


def iterate(
    q0: Configuration,
    model: DensityModel,
    t_max: int,
    normalize: bool = True,
    mode: CentroidMode = CentroidMode.INTRINSIC,
) -> Orbit:
    return LloydMap(model, mode).iterate(q0, t_max, normalize=normalize)


def random_configuration(
    n: int,
    seed: Union[int, np.random.Generator, None] = None,
) -> Configuration:
    """
    n independent uniform draws on [0, 2π), sorted.

    Redrawn while any gap, the seam gap included, is below 2π/(100 n).
    """
    if n < 2:
        raise DegenerateConfigurationError(f"need n ≥ 2 codepoints, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    floor = TWO_PI / (RANDOM_GAP_DIVISOR * n)
    while True:
        points = np.sort(rng.uniform(0.0, TWO_PI, size=n))
        if np.min(forward_gaps(points)) >= floor:
            return Configuration(points)
