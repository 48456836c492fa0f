"""
circloyd Lyapunov spectra

Tangent-basis propagation with QR re-orthonormalization along an orbit of
the Lloyd map. Jacobians come from centered finite differences; the
spectrum is reported both on the full configuration space and on the
complement of the rotation direction 1.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from ..models.circle import LOG_FLOOR, CentroidMode, LyapunovReport
from .angle import Configuration, sort_config
from .density import DensityModel
from .errors import DimensionMismatchError, DomainError, LloydError, OrbitError
from .linearization import DEFAULT_FD_EPS, fd_jacobian
from .quantizer import LloydMap, random_configuration

logger = logging.getLogger(__name__)

RANK_TOL = 1e-14
FLOOR_VALUE = math.exp(LOG_FLOOR)


# =============================================================================
# QR
# =============================================================================

@dataclass(frozen=True)
class QRPair:
    """A = QR with R's diagonal non-negative; rank_deficient flags zeroed R_jj."""
    q: np.ndarray
    r: np.ndarray
    rank_deficient: Tuple[bool, ...]


def qr_decompose(matrix: np.ndarray) -> QRPair:
    """
    Householder QR (LAPACK) with the sign convention diag(R) ≥ 0.

    |R_jj| < 1e-14 is set to zero and flagged rather than raised.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix must be finite")

    q, r = np.linalg.qr(a)
    signs = np.where(np.diag(r) < 0.0, -1.0, 1.0)
    q = q * signs[None, :]
    r = r * signs[:, None]
    small = np.abs(np.diag(r)) < RANK_TOL
    if np.any(small):
        idx = np.flatnonzero(small)
        r[idx, idx] = 0.0
    return QRPair(q=q, r=r, rank_deficient=tuple(bool(s) for s in small))


class QRAccumulator:
    """Running sums S_j of log R_jj for a propagated orthonormal basis."""

    def __init__(self, dim: int, basis: Optional[np.ndarray] = None):
        self.dim = dim
        self.basis = np.eye(dim) if basis is None else np.array(basis, dtype=float)
        self.sums = np.zeros(dim)
        self.floored = np.zeros(dim, dtype=bool)
        self.steps = 0

    def update(self, jacobian: np.ndarray) -> None:
        if jacobian.shape != (self.dim, self.dim):
            raise DimensionMismatchError(f"expected {self.dim}x{self.dim}, got {jacobian.shape}")
        pair = qr_decompose(jacobian @ self.basis)
        growth = np.diag(pair.r)
        clamped = growth < FLOOR_VALUE
        if np.any(clamped):
            logger.debug("log floor applied at step %d to %s", self.steps, np.flatnonzero(clamped))
        self.floored |= clamped
        self.sums += np.log(np.maximum(growth, FLOOR_VALUE))
        self.basis = pair.q
        self.steps += 1

    def relabel(self, permutation: np.ndarray) -> None:
        """Apply an orthogonal change of coordinates to the basis."""
        self.basis = permutation @ self.basis

    def exponents(self) -> Tuple[np.ndarray, np.ndarray]:
        """Exponents sorted descending and their floor flags."""
        if self.steps == 0:
            raise DomainError("no Jacobians accumulated")
        values = self.sums / self.steps
        order = np.argsort(-values, kind="stable")
        return values[order], self.floored[order]


def lyapunov_from_jacobians(
    jacobians: Iterable[np.ndarray],
    basis: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """Lyapunov exponents of a product of Jacobians, starting from U⁰ = I unless given."""
    accumulator: Optional[QRAccumulator] = None
    for jacobian in jacobians:
        jacobian = np.asarray(jacobian, dtype=float)
        if accumulator is None:
            accumulator = QRAccumulator(jacobian.shape[0], basis)
        accumulator.update(jacobian)
    if accumulator is None:
        raise DomainError("no Jacobians given")
    return accumulator.exponents()


def transverse_basis(n: int) -> np.ndarray:
    """Orthonormal n×(n-1) basis of the complement of 1."""
    seed = np.eye(n)
    seed[:, 0] = 1.0
    q, _ = np.linalg.qr(seed)
    return q[:, 1:]


# =============================================================================
# ORBIT SPECTRUM
# =============================================================================

def _advance(lmap: LloydMap, config: Configuration) -> Tuple[Configuration, np.ndarray]:
    """One Lloyd step plus the permutation matrix taking old labels to sorted ones."""
    image = lmap.raw(config.points)
    order = np.argsort(image, kind="stable")
    permutation = np.eye(config.n)[order]
    return sort_config(image), permutation


def lyapunov_spectrum(
    model: DensityModel,
    n: int,
    n_trans: int = 200,
    n_iter: int = 500,
    eps: float = DEFAULT_FD_EPS,
    seed: int = 0,
    mode: CentroidMode = CentroidMode.INTRINSIC,
) -> LyapunovReport:
    """
    Lyapunov spectrum along the orbit of a seeded random configuration.

    After n_trans plain Lloyd steps, each of n_iter steps takes a
    finite-difference Jacobian, pushes the orthonormal basis through it,
    re-orthonormalizes by QR and accumulates log R_jj (floored at -50).
    The trajectory is advanced without drift removal; when sorting
    relabels codepoints the basis is permuted along with them.
    """
    if n_iter < 1 or n_trans < 0:
        raise DomainError(f"need n_iter ≥ 1 and n_trans ≥ 0, got {n_iter}, {n_trans}")

    lmap = LloydMap(model, mode)
    config = random_configuration(n, np.random.default_rng(seed))
    step = 0
    try:
        for step in range(1, n_trans + 1):
            config = lmap.step(config)

        full = QRAccumulator(n)
        basis = transverse_basis(n)
        transverse = QRAccumulator(n - 1)
        for t in range(n_iter):
            step = n_trans + t + 1
            jacobian = fd_jacobian(config, model, eps=eps, mode=mode)
            full.update(jacobian)
            transverse.update(basis.T @ jacobian @ basis)
            config, permutation = _advance(lmap, config)
            full.relabel(permutation)
            transverse.relabel(basis.T @ permutation @ basis)
    except LloydError as exc:
        logger.warning("lyapunov orbit failed (n=%d, %s): %s", n, model.name, exc)
        raise OrbitError(str(exc), step=step) from exc

    exponents, floored = full.exponents()
    transverse_exponents, _ = transverse.exponents()
    if np.any(floored):
        logger.warning("%d exponent(s) hit the log floor", int(np.sum(floored)))
    logger.info(
        "lyapunov n=%d %s: max=%.6g transverse max=%.6g",
        n, model.name, exponents[0], transverse_exponents[0],
    )
    return LyapunovReport(
        kappa=model.kappa,
        n=n,
        n_iter=n_iter,
        n_trans=n_trans,
        eps=eps,
        seed=seed,
        exponents=[float(v) for v in exponents],
        floored=[bool(f) for f in floored],
        transverse_exponents=[float(v) for v in transverse_exponents],
    )
