"""
circloyd linearization

Jacobians of the Lloyd map: the circulant closed form at the equally
spaced configuration, centered finite differences anywhere else, and the
circulant spectrum λ_m = α + 2β cos(2πm/n).
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..models.circle import CentroidMode, CirculantJacobian
from .angle import Configuration, wrap_pi
from .density import DensityModel
from .errors import DimensionMismatchError, DomainError, PerturbationTooLargeError
from .quantizer import LloydMap

logger = logging.getLogger(__name__)

DEFAULT_FD_EPS = 1e-6
FD_EPS_MIN = 1e-9
FD_EPS_MAX = 1e-3

DenseMatrix = np.ndarray


@dataclass(frozen=True)
class ModeSpectrum:
    """Eigenvalues λ_0..λ_{n-1} of a circulant Jacobian, indexed by Fourier mode."""
    eigenvalues: np.ndarray
    modes: np.ndarray

    @property
    def n(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def nontrivial(self) -> np.ndarray:
        """Eigenvalues with the rotation mode m = 0 removed."""
        return self.eigenvalues[1:]

    @property
    def lambda_min(self) -> float:
        return float(np.min(self.nontrivial))

    @property
    def spectral_radius_nontrivial(self) -> float:
        return float(np.max(np.abs(self.nontrivial)))

    def tolist(self) -> list:
        return [float(v) for v in self.eigenvalues]


def symmetric_jacobian(n: int, model: DensityModel) -> CirculantJacobian:
    """
    Circulant (α, β) at the equally spaced configuration.

    α = 1 - (π/(nM)) h(π/n), β = (1/2)(π/(nM)) h(π/n), M the mass of the
    reference cell (-π/n, π/n). Both are taken relative to the density's
    mean direction μ.
    """
    if n < 2:
        raise DomainError(f"n must be at least 2, got {n}")
    half = math.pi / n
    mu = model.mu
    mass = float(model.cell_moments(mu, -half, half).mass)
    ratio = math.pi * float(model.eval(mu + half)) / (n * mass)
    return CirculantJacobian(n=n, alpha=1.0 - ratio, beta=0.5 * ratio)


def fd_jacobian(
    config: Configuration,
    model: DensityModel,
    eps: float = DEFAULT_FD_EPS,
    mode: CentroidMode = CentroidMode.INTRINSIC,
) -> DenseMatrix:
    """
    Centered finite-difference Jacobian J[:, k] = wrap(T(Q + εe_k) - T(Q - εe_k)) / 2ε.

    Perturbed configurations are not re-sorted, so labels survive.
    """
    if not (FD_EPS_MIN <= eps <= FD_EPS_MAX):
        raise DomainError(f"eps must lie in [{FD_EPS_MIN:g}, {FD_EPS_MAX:g}], got {eps}")
    if float(np.min(config.gaps())) < 2.0 * eps:
        raise PerturbationTooLargeError(f"a gap is smaller than 2·eps = {2 * eps:g}")

    n = config.n
    shift = eps * np.eye(n)
    batch = np.concatenate([config.points + shift, config.points - shift])
    images = LloydMap(model, mode).raw(batch)
    jacobian = np.asarray(wrap_pi(images[:n] - images[n:])).T / (2.0 * eps)
    logger.debug("fd jacobian n=%d eps=%g row-sum spread=%.3e", n, eps,
                 float(np.ptp(jacobian.sum(axis=1))))
    return jacobian


def circulant_eigenvalues(jacobian: CirculantJacobian) -> ModeSpectrum:
    """λ_m = α + 2β cos(2πm/n) for m = 0..n-1."""
    n = jacobian.n
    modes = np.arange(n)
    # cos evaluated on min(m, n-m) so λ_m and λ_{n-m} are bitwise equal
    folded = np.minimum(modes, n - modes)
    eigenvalues = jacobian.alpha + 2.0 * jacobian.beta * np.cos(2.0 * np.pi * folded / n)
    return ModeSpectrum(eigenvalues=eigenvalues, modes=modes)


def expand(jacobian: CirculantJacobian) -> DenseMatrix:
    """
    Dense periodic tridiagonal matrix: α on the diagonal, β on both cyclic neighbours.

    For n = 2 both neighbours are the same index and the entry is 2β.
    """
    n = jacobian.n
    dense = jacobian.alpha * np.eye(n)
    rows = np.arange(n)
    np.add.at(dense, (rows, (rows + 1) % n), jacobian.beta)
    np.add.at(dense, (rows, (rows - 1) % n), jacobian.beta)
    return dense


def matvec(matrix: DenseMatrix, vector: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    vector = np.asarray(vector, dtype=float)
    if matrix.ndim != 2 or vector.ndim != 1 or matrix.shape[1] != vector.shape[0]:
        raise DimensionMismatchError(f"cannot multiply {matrix.shape} by {vector.shape}")
    return matrix @ vector


def jacobian_summary(
    jacobian: CirculantJacobian,
    fd_deviation: Optional[float] = None,
) -> dict:
    """JSON payload {n, alpha, beta, eigenvalues[, fd_max_deviation]}."""
    payload = {
        "n": jacobian.n,
        "alpha": jacobian.alpha,
        "beta": jacobian.beta,
        "eigenvalues": circulant_eigenvalues(jacobian).tolist(),
    }
    if fd_deviation is not None:
        payload["fd_max_deviation"] = fd_deviation
    return payload
