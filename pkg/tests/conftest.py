"""Shared fixtures and independent oracles."""

import math

import numpy as np
import pytest
from scipy import special

from src.services.density import DensityModel


def bessel_series(order: int, x: float, terms: int = 200) -> float:
    """I_order(x) = Σ (x/2)^{2k+order} / (k! (k+order)!), summed directly."""
    total = 0.0
    term = (x / 2.0) ** order / math.factorial(order)
    for k in range(terms):
        total += term
        term *= (x / 2.0) ** 2 / ((k + 1) * (k + 1 + order))
        if term < 1e-18 * total:
            break
    return total


def power_iteration_spectrum(matrix: np.ndarray, iterations: int = 5000, seed: int = 1):
    """
    Eigenvalues of a symmetric matrix by power iteration with Hotelling deflation.

    Largest magnitude first; signs recovered from the Rayleigh quotient.
    """
    a = np.array(matrix, dtype=float)
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(a.shape[0]):
        v = rng.standard_normal(a.shape[0])
        v /= np.linalg.norm(v)
        for _ in range(iterations):
            w = a @ v
            norm = np.linalg.norm(w)
            if norm == 0.0:
                break
            v = w / norm
        lam = float(v @ a @ v)
        values.append(lam)
        a = a - lam * np.outer(v, v)
    return values


def synthetic_flip_density(n: int, s: float) -> DensityModel:
    """h ∝ e^{-s cos(nθ)}: Q* stays a fixed point and F = e^s / (2 I₀(s))."""
    return DensityModel.custom(lambda theta: np.exp(-s * np.cos(n * theta)),
                               label=f"flip(n={n}, s={s:g})")


def synthetic_flip_F(s: float) -> float:
    return float(1.0 / (2.0 * special.i0e(s)))


@pytest.fixture
def uniform():
    return DensityModel.uniform()


@pytest.fixture(params=[0.5, 2.0, 5.0])
def von_mises(request):
    return DensityModel.von_mises(request.param)
