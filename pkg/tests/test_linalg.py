import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isopair.errors import ContainmentError, NonFiniteError, NotHermitianError
from isopair.linalg import (
    Subspace,
    TolerancePolicy,
    as_matrix,
    hermitian_spectrum,
    intersect_coordinates,
    kernel,
    operator_class,
    opnorm,
    orthonormal_basis,
    ortho_complement_within,
    projector,
    subspace_distance,
)


def complex_matrix(rng, rows, cols):
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def test_tolerance_policy_rejects_inverted_bands():
    with pytest.raises(ValueError):
        TolerancePolicy(eq_tol=1e-3, approx_tol=1e-6)
    with pytest.raises(ValueError):
        TolerancePolicy(eq_tol=0.0)


def test_as_matrix_rejects_nan():
    with pytest.raises(NonFiniteError):
        as_matrix([[np.nan]])


def test_orthonormal_basis_detects_rank():
    rng = np.random.default_rng(0)
    a = complex_matrix(rng, 6, 2)
    cols = np.hstack([a, a @ complex_matrix(rng, 2, 3)])
    s = orthonormal_basis(cols)
    assert s.dim == 2
    assert s.orthonormality_error() < 1e-12
    assert opnorm(cols - projector(s) @ cols) < 1e-12


def test_kernel_of_zero_matrix_is_everything():
    assert kernel(np.zeros((3, 4))).dim == 4


def test_kernel_vectors_are_annihilated():
    rng = np.random.default_rng(1)
    m = complex_matrix(rng, 2, 5)
    k = kernel(m)
    assert k.dim == 3
    assert opnorm(m @ k.basis) < 1e-12


def test_ortho_complement_requires_containment():
    e = np.eye(3)
    s = Subspace(e[:, :2])
    t = Subspace(e[:, 2:])
    with pytest.raises(ContainmentError):
        ortho_complement_within(s, t)
    rest = ortho_complement_within(s, Subspace(e[:, :1]))
    assert subspace_distance(rest, Subspace(e[:, 1:2])) < 1e-12


def test_intersect_coordinates_keeps_basis_when_inside():
    rng = np.random.default_rng(2)
    q, _ = np.linalg.qr(complex_matrix(rng, 3, 2))
    basis = np.vstack([q, np.zeros((2, 2))])
    s = Subspace(basis)
    out = intersect_coordinates(s, np.array([True, True, True, False, False]))
    assert np.array_equal(out.basis, s.basis)


def test_intersect_coordinates_cuts_mixed_subspace():
    e = np.eye(3)
    s = Subspace(np.stack([e[0], (e[1] + e[2]) / np.sqrt(2)], axis=1))
    out = intersect_coordinates(s, np.array([True, True, False]))
    assert subspace_distance(out, Subspace(e[:, :1])) < 1e-12


def test_hermitian_spectrum_rejects_nonhermitian():
    with pytest.raises(NotHermitianError):
        hermitian_spectrum(np.array([[0, 1], [0, 0]]))
    assert np.allclose(hermitian_spectrum(np.diag([2.0, -1.0])), [-1, 2])


def test_operator_class():
    assert operator_class(np.eye(2)).unitary
    assert operator_class(np.diag([1.0, 0.0])).projection
    iso = operator_class(np.eye(3)[:, :2])
    assert iso.isometry and not iso.unitary


@settings(max_examples=40, deadline=None)
@given(rows=st.integers(1, 6), cols=st.integers(0, 6), seed=st.integers(0, 2**32 - 1))
def test_projector_is_orthogonal_projection(rows, cols, seed):
    rng = np.random.default_rng(seed)
    p = projector(orthonormal_basis(complex_matrix(rng, rows, cols)))
    assert opnorm(p @ p - p) < 1e-10
    assert opnorm(p - p.conj().T) < 1e-12
