"""
circloyd angular arithmetic

Wrapping, geodesic distance, circular midpoints and the Configuration
type: an ordered n-tuple of codepoints 0 ≤ q_0 < ... < q_{n-1} < 2π.

Every function is pure. Scalar input gives a float back, array input
an array.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import DegenerateConfigurationError, DimensionMismatchError, DomainError

TWO_PI = 2.0 * math.pi
DUPLICATE_TOL = 1e-12

ArrayLike = Union[float, Iterable[float], np.ndarray]


def _finite(x: ArrayLike) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("angle must be finite")
    return arr


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


# =============================================================================
# WRAPPING AND DISTANCES
# =============================================================================

def wrap_2pi(x: ArrayLike):
    """Representative of x modulo 2π in [0, 2π)."""
    r = np.mod(_finite(x), TWO_PI)
    # np.mod can round tiny negatives up to exactly 2π
    r = np.where(r >= TWO_PI, 0.0, r)
    return _out(r)


def wrap_pi(x: ArrayLike):
    """
    Signed representative in [-π, π), computed as ((x + π) mod 2π) - π.

    π itself maps to -π.
    """
    r = np.mod(_finite(x) + math.pi, TWO_PI)
    r = np.where(r >= TWO_PI, 0.0, r)
    return _out(r - math.pi)


def geodesic(a: ArrayLike, b: ArrayLike):
    """Shortest angular distance, min(|a-b|, 2π-|a-b|), in [0, π]."""
    d = np.mod(np.abs(_finite(a) - _finite(b)), TWO_PI)
    return _out(np.minimum(d, TWO_PI - d))


def forward_arc(a: ArrayLike, b: ArrayLike):
    """Counterclockwise arc length from a to b, in [0, 2π)."""
    return wrap_2pi(_finite(b) - _finite(a))


def forward_gaps(points: np.ndarray) -> np.ndarray:
    """
    Forward gaps g_j = q_{j+1} - q_j (mod 2π) of cyclically ordered points.

    Works on the last axis, so a batch of configurations (..., n) is fine.
    """
    pts = np.asarray(points, dtype=float)
    return np.mod(np.roll(pts, -1, axis=-1) - pts, TWO_PI)


def circular_midpoint(a: float, b: float) -> float:
    """
    Midpoint of the forward arc from a to its cyclic successor b.

    (3π/2, π/2) gives 0: the arc crosses the seam.
    """
    if geodesic(a, b) < DUPLICATE_TOL:
        raise DegenerateConfigurationError(f"midpoint of coincident points {a} and {b}")
    return wrap_2pi(a + 0.5 * forward_arc(a, b))


# =============================================================================
# CONFIGURATIONS
# =============================================================================

@dataclass(frozen=True, eq=False)
class Configuration:
    """
    State of the Lloyd dynamical system.

    points is a read-only float array, strictly increasing in [0, 2π),
    with n ≥ 2 and no two points closer than DUPLICATE_TOL around the circle.
    """
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 1 or pts.size < 2:
            raise DegenerateConfigurationError(f"need n ≥ 2 codepoints, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DomainError("codepoints must be finite")
        if np.any(pts < 0.0) or np.any(pts >= TWO_PI):
            raise DomainError("codepoints must lie in [0, 2π)")
        gaps = np.diff(pts)
        seam_gap = pts[0] + TWO_PI - pts[-1]
        if np.any(gaps <= DUPLICATE_TOL) or seam_gap <= DUPLICATE_TOL:
            raise DegenerateConfigurationError(
                "codepoints must be strictly increasing and pairwise distinct"
            )
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return int(self.points.size)

    def __len__(self) -> int:
        return self.n

    def gaps(self) -> np.ndarray:
        """Forward gaps, the last one across the seam."""
        return forward_gaps(self.points)

    def rotated(self, phi: float) -> "Configuration":
        return sort_config(wrap_2pi(self.points + phi))

    def tolist(self) -> list:
        return [float(p) for p in self.points]

    def __repr__(self) -> str:
        return f"Configuration(n={self.n}, points={np.array2string(self.points, precision=6)})"


def sort_config(points: ArrayLike) -> Configuration:
    """Sort wrapped angles into a Configuration; duplicates are rejected."""
    arr = np.atleast_1d(_finite(points))
    if arr.size < 2:
        raise DegenerateConfigurationError(f"need n ≥ 2 codepoints, got {arr.size}")
    arr = np.sort(wrap_2pi(arr))
    gaps = np.diff(arr)
    if np.any(gaps <= DUPLICATE_TOL) or arr[0] + TWO_PI - arr[-1] <= DUPLICATE_TOL:
        raise DegenerateConfigurationError("duplicate codepoints")
    return Configuration(arr)


def remove_drift(config: Configuration) -> Configuration:
    """
    Subtract the arithmetic mean of the [0, 2π) representatives, wrap, re-sort.

    This is literal mean subtraction; it is not rotation-equivariant once
    points straddle the seam.
    """
    q_bar = float(np.mean(config.points))
    return sort_config(wrap_2pi(config.points - q_bar))


def symmetric_configuration(n: int, offset: float = 0.0) -> Configuration:
    """Equally spaced codepoints q_j = offset + 2πj/n."""
    if n < 2:
        raise DegenerateConfigurationError(f"need n ≥ 2 codepoints, got {n}")
    return sort_config(wrap_2pi(offset + TWO_PI * np.arange(n) / n))


def aligned_distance(a: Configuration, b: Configuration) -> float:
    """
    Euclidean norm of wrap_pi(b - a) under the best cyclic relabeling of b.

    Sorting can move a label across the seam, so all n rotations of the
    index are tried.
    """
    if a.n != b.n:
        raise DimensionMismatchError(f"configurations of size {a.n} and {b.n}")
    n = a.n
    index = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    diffs = wrap_pi(b.points[index] - a.points[None, :])
    return float(np.min(np.linalg.norm(diffs, axis=1)))
