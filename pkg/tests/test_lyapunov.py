import math

import numpy as np
import pytest

from src.models.circle import LOG_FLOOR
from src.services.density import DensityModel
from src.services.errors import DomainError, OrbitError
from src.services.lyapunov import (
    lyapunov_from_jacobians,
    lyapunov_spectrum,
    qr_decompose,
    transverse_basis,
)


class TestQR:
    def test_identity(self):
        pair = qr_decompose(np.eye(3))
        assert np.allclose(pair.q, np.eye(3))
        assert np.allclose(pair.r, np.eye(3))

    def test_positive_diagonal_matrix(self):
        pair = qr_decompose(np.diag([2.0, 3.0]))
        assert pair.q == pytest.approx(np.eye(2), abs=1e-15)
        assert pair.r == pytest.approx(np.diag([2.0, 3.0]), abs=1e-15)

    def test_random_matrix_properties(self):
        a = np.random.default_rng(5).standard_normal((5, 5))
        pair = qr_decompose(a)
        assert np.max(np.abs(pair.q.T @ pair.q - np.eye(5))) < 1e-10
        assert np.max(np.abs(pair.q @ pair.r - a)) < 1e-10
        assert np.all(np.diag(pair.r) >= 0)
        assert np.all(np.abs(np.tril(pair.r, -1)) <= 1e-12)

    def test_rank_deficiency_flagged(self):
        pair = qr_decompose(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert pair.rank_deficient == (False, True)
        assert pair.r[1, 1] == 0.0

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            qr_decompose(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestConstantStubs:
    def test_diagonal_stub(self):
        exps, floored = lyapunov_from_jacobians([np.diag([0.5, 0.25])] * 1000)
        assert exps == pytest.approx([math.log(0.5), math.log(0.25)], abs=1e-10)
        assert not floored.any()

    def test_non_normal_stub(self):
        stub = np.array([[0.5, 0.3], [0.0, 0.25]])
        exps, _ = lyapunov_from_jacobians([stub] * 1000)
        assert exps == pytest.approx([math.log(0.5), math.log(0.25)], abs=1e-6)

    def test_general_stub_and_sum_rule(self):
        stub = np.array([[0.6, 0.2, 0.0], [0.1, 0.3, 0.1], [0.0, 0.2, 0.5]])
        exps, _ = lyapunov_from_jacobians([stub] * 1000)
        eig = np.sort(np.log(np.abs(np.linalg.eigvals(stub))))[::-1]
        # U⁰ = I leaves an O(1/N) start-up term
        assert exps == pytest.approx(eig, abs=5e-3)
        assert exps.sum() == pytest.approx(math.log(abs(np.linalg.det(stub))), abs=1e-10)

    def test_singular_stub_is_floored(self):
        exps, floored = lyapunov_from_jacobians([np.diag([1.0, 0.0])] * 10)
        assert exps == pytest.approx([0.0, LOG_FLOOR])
        assert list(floored) == [False, True]

    def test_empty_sequence(self):
        with pytest.raises(DomainError):
            lyapunov_from_jacobians([])


class TestTransverseBasis:
    @pytest.mark.parametrize("n", [2, 3, 8])
    def test_orthonormal_complement(self, n):
        basis = transverse_basis(n)
        assert basis.shape == (n, n - 1)
        assert basis.T @ basis == pytest.approx(np.eye(n - 1), abs=1e-12)
        assert basis.T @ np.ones(n) == pytest.approx(np.zeros(n - 1), abs=1e-12)


class TestOrbitSpectrum:
    def test_uniform_three(self, uniform):
        report = lyapunov_spectrum(uniform, 3, n_trans=200, n_iter=500, seed=0)
        # the uniform Lloyd map is linear with spectrum {1, 1/4, 1/4}; starting the
        # basis at I adds log(1/√3)/N to the neutral exponent
        assert report.exponents[0] == pytest.approx(math.log(1 / math.sqrt(3)) / 500, abs=1e-6)
        for value in report.exponents[1:]:
            assert value == pytest.approx(math.log(0.25), abs=1e-3)
        assert sum(report.exponents) == pytest.approx(math.log(1 / 16), abs=1e-8)
        assert report.transverse_exponents == pytest.approx([math.log(0.25)] * 2, abs=1e-8)
        assert report.exponents == sorted(report.exponents, reverse=True)

    def test_uniform_three_long_run(self, uniform):
        report = lyapunov_spectrum(uniform, 3, n_trans=10, n_iter=2000, seed=1)
        assert report.exponents[0] == pytest.approx(0.0, abs=1e-3)

    def test_uniform_four_zero_mode(self, uniform):
        # λ = 0 at m = 2: only finite-difference noise survives in that direction
        report = lyapunov_spectrum(uniform, 4, n_trans=50, n_iter=50, seed=2)
        assert report.exponents[-1] < -15.0
        assert all(v >= LOG_FLOOR for v in report.exponents)

    def test_deterministic(self):
        model = DensityModel.von_mises(2.0)
        a = lyapunov_spectrum(model, 4, n_trans=20, n_iter=30, seed=7)
        b = lyapunov_spectrum(model, 4, n_trans=20, n_iter=30, seed=7)
        assert a.model_dump() == b.model_dump()

    def test_failure_reports_step(self):
        broken = DensityModel.custom(lambda theta: np.where(theta > 3.0, np.nan, 1.0))
        with pytest.raises(OrbitError) as info:
            lyapunov_spectrum(broken, 4, n_trans=3, n_iter=5)
        assert info.value.step == 1

    def test_invalid_counts(self, uniform):
        with pytest.raises(DomainError):
            lyapunov_spectrum(uniform, 3, n_iter=0)

    @pytest.mark.slow
    @pytest.mark.parametrize("kappa", [0.0, 2.5, 5.0, 10.0])
    def test_von_mises_max_exponent_non_positive(self, kappa):
        report = lyapunov_spectrum(DensityModel.von_mises(kappa), 8, n_trans=200, n_iter=300)
        assert report.max_exponent <= 1e-3
        assert all(math.isfinite(v) for v in report.exponents)
