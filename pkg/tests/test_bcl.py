import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isopair.bcl import (
    BCLData,
    BCLPair,
    bcl_purity,
    build_multipliers,
    extract_bcl,
    random_bcl_data,
    wandering_data_of_pair,
    wold_coefficients,
)
from isopair.errors import InvalidBCLData, PurityError
from isopair.hardy import GradedVector, PolySymbol
from isopair.linalg import opnorm

from helpers import DIAG, SWAP


def test_swap_symbols():
    pair = build_multipliers(SWAP)
    # Phi1(z) = Phi2(z) = [[0, z], [1, 0]]
    expected = np.array([[[0, 0], [1, 0]], [[0, 1], [0, 0]]])
    assert np.allclose(pair.phi1.matrices, expected)
    assert np.allclose(pair.phi2.matrices, expected)


def test_invalid_data_is_rejected():
    with pytest.raises(InvalidBCLData):
        BCLData(np.array([[2.0]]), np.array([[1.0]])).validate()
    with pytest.raises(InvalidBCLData):
        BCLData(np.eye(2), np.array([[1.0, 1.0], [0.0, 0.0]])).validate()


def test_non_bcl_pair_fails_check():
    ident = PolySymbol.constant(np.eye(2))
    with pytest.raises(PurityError):
        BCLPair(ident, ident).check()


@settings(max_examples=30, deadline=None)
@given(dim=st.integers(1, 6), data=st.data(), seed=st.integers(0, 2**32 - 1))
def test_extraction_recovers_input(dim, data, seed):
    rank = data.draw(st.integers(0, dim))
    d = random_bcl_data(dim, rank, np.random.default_rng(seed))
    back = extract_bcl(build_multipliers(d))
    assert opnorm(back.U - d.U) < 1e-9
    assert opnorm(back.P - d.P) < 1e-9


def test_wandering_dimensions():
    d = random_bcl_data(5, 2, np.random.default_rng(3))
    dims = wandering_data_of_pair(build_multipliers(d)).dims()
    # W1 = ker(P U), W2 = ker(U^H P_perp)
    assert dims == {"W": 5, "W1": 3, "W2": 2, "V1W2": 2, "V2W1": 3}


def test_purity_from_spectral_radius():
    pur = bcl_purity(BCLData(np.eye(2), np.zeros((2, 2))))
    assert pur.v1 and not pur.v2  # Phi2 = U is a constant unitary
    assert bcl_purity(SWAP).v1 and bcl_purity(SWAP).v2
    assert not bcl_purity(DIAG).v1 and not bcl_purity(DIAG).v2


def test_commuting_generator():
    rng = np.random.default_rng(4)
    for rank in range(4):
        d = random_bcl_data(3, rank, rng, commuting=True)
        assert opnorm(d.U @ d.P - d.P @ d.U) < 1e-12
        assert d.rank == rank


def test_wold_coefficients_rebuild_vector():
    rng = np.random.default_rng(5)
    d = random_bcl_data(3, 1, rng)
    pair = build_multipliers(d)
    wd = wandering_data_of_pair(pair)
    h = GradedVector(3, rng.standard_normal((5, 3)) + 0j)
    etas = wold_coefficients(pair, wd.w, h)
    # V = M_z, so the Wold coefficients are the Taylor coefficients
    assert np.allclose(np.array(etas), h.coeffs)


def test_conjugation_acts_on_both_factors():
    rng = np.random.default_rng(6)
    d = random_bcl_data(3, 1, rng)
    z = np.linalg.qr(rng.standard_normal((3, 3)))[0]
    c = d.conjugate(z)
    assert np.allclose(c.U, z @ d.U @ z.T) and np.allclose(c.P, z @ d.P @ z.T)
