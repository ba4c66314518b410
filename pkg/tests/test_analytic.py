import numpy as np
import pytest

from isopair.analytic import (
    bridge_identity_residual,
    characteristic_invariant,
    intertwining_residual,
    series_inner_check,
    series_mult,
    theta_Vj,
    tilde_pi_on_kernel,
    wold_series,
)
from isopair.bcl import BCLData, bcl_graded_pair, random_bcl_data
from isopair.errors import PurityError, TruncationError
from isopair.hardy import GradedVector
from isopair.linalg import opnorm

from helpers import SWAP


@pytest.fixture(scope="module")
def pure_pair():
    rng = np.random.default_rng(10)
    return bcl_graded_pair(random_bcl_data(3, 1, rng), 40)


def test_series_mult_is_cauchy_product():
    a = np.array([[[1.0]], [[2.0]]])
    b = np.array([[[3.0]], [[4.0]], [[5.0]]])
    # (1 + 2z)(3 + 4z + 5z^2) = 3 + 10z + 13z^2 + 10z^3
    assert np.allclose(series_mult(a, b, 3)[:, 0, 0], [3, 10, 13, 10])


def _radius(m):
    return max(abs(np.linalg.eigvals(m)))


def test_theta_is_inner():
    # pick an instance whose compressions P U and P_perp U have spectral radius <= 0.8,
    # so 60 Taylor terms leave a tail of order 0.8^60
    rng = np.random.default_rng(12)
    while True:
        d = random_bcl_data(3, 1, rng)
        if max(_radius(d.P @ d.U), _radius((np.eye(3) - d.P) @ d.U)) <= 0.8:
            break
    pair = bcl_graded_pair(d, 64)
    for i in (1, 2):
        assert series_inner_check(theta_Vj(pair, i, 60)) < 1e-4


def test_theta_for_swap_is_z():
    # for the swap pair both wandering subspaces are one dimensional and Theta(z) = z
    pair = bcl_graded_pair(SWAP, 8)
    coeffs = theta_Vj(pair, 1, 4).coeffs
    assert np.allclose(np.abs(coeffs[:, 0, 0]), [0, 1, 0, 0, 0])


def test_wold_series_reconstructs(pure_pair):
    rng = np.random.default_rng(11)
    h = np.zeros(pure_pair.ambient_dim, complex)
    h[:9] = rng.standard_normal(9)
    coeffs, rest = wold_series(pure_pair, 1, h)
    assert rest < 1e-13
    w = pure_pair.wandering(1)
    rebuilt = np.zeros_like(h)
    for c in coeffs[::-1]:
        rebuilt = pure_pair.v1 @ rebuilt + w.basis @ c
    assert np.linalg.norm(rebuilt - h) < 1e-10


def test_non_pure_factor_is_refused():
    pair = bcl_graded_pair(BCLData(np.eye(2), np.zeros((2, 2))), 6)
    with pytest.raises(PurityError):
        theta_Vj(pair, 2, 3)


def test_kernel_route_needs_room():
    pair = bcl_graded_pair(SWAP, 8)
    with pytest.raises(TruncationError):
        tilde_pi_on_kernel(pair, 1, 0.3, np.ones(2), 20)


def test_intertwining_and_bridge(pure_pair):
    f = GradedVector(3, np.arange(9.0).reshape(3, 3) + 0j)
    for i in (1, 2):
        assert intertwining_residual(pure_pair, i, f, 20) < 1e-9
        assert bridge_identity_residual(pure_pair, i, 12) < 1e-9


def test_characteristic_invariant_constant_term(pure_pair):
    theta = characteristic_invariant(pure_pair, 1, 3)
    sub = pure_pair.subspaces
    w = pure_pair.wandering(0)
    expected = -w.basis.conj().T @ pure_pair.v1 @ sub.w2.basis
    assert opnorm(theta.coefficient(0) - expected) < 1e-12
