"""Dense complex linear algebra with an explicit tolerance policy.

Subspaces are stored as matrices with orthonormal columns. Every rank
decision goes through a singular-value threshold taken from a
:class:`TolerancePolicy`, so callers never compare floats ad hoc.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContainmentError, NonFiniteError, NotHermitianError

__all__ = [
    "TolerancePolicy",
    "DEFAULT_TOL",
    "Subspace",
    "OperatorClass",
    "as_matrix",
    "orthonormal_basis",
    "kernel",
    "projector",
    "ortho_complement_within",
    "intersect_coordinates",
    "subspace_distance",
    "hermitian_spectrum",
    "operator_class",
    "opnorm",
]


@dataclass(frozen=True)
class TolerancePolicy:
    """Two tolerance bands.

    ``eq_tol`` is for identities that hold exactly up to rounding,
    ``approx_tol`` for anything computed through truncation or iteration.
    """

    eq_tol: float = 1e-9
    approx_tol: float = 1e-6

    def __post_init__(self):
        if not (0 < self.eq_tol <= self.approx_tol < 1):
            raise ValueError(
                f"need 0 < eq_tol <= approx_tol < 1, got {self.eq_tol}, {self.approx_tol}"
            )

    def to_dict(self):
        return {"eq_tol": self.eq_tol, "approx_tol": self.approx_tol}


DEFAULT_TOL = TolerancePolicy()


def as_matrix(a, rows=None) -> np.ndarray:
    """Coerce to a finite complex 2-d array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {m.shape[0]}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError("matrix has non-finite entries")
    return m


def opnorm(m) -> float:
    """Spectral norm; zero for empty matrices."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of C^ambient_dim given by an orthonormal basis (columns)."""

    basis: np.ndarray
    ambient_dim: int = field(default=-1)

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=complex)
        amb = self.ambient_dim
        if b.ndim == 1:
            b = b.reshape(-1, 1) if b.size else np.zeros((max(amb, 0), 0), complex)
        if amb < 0:
            amb = b.shape[0]
        if b.shape[0] != amb:
            raise ValueError(f"basis has {b.shape[0]} rows, ambient_dim is {amb}")
        if b.shape[1] > amb:
            raise ValueError("more basis vectors than ambient dimension")
        b = b.copy()
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "ambient_dim", amb)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(np.zeros((ambient_dim, 0), complex), ambient_dim)

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(np.eye(ambient_dim, dtype=complex), ambient_dim)

    def projector(self) -> np.ndarray:
        return projector(self)

    def coords(self, v) -> np.ndarray:
        """Coordinates of ``v`` (or of its projection) in this basis."""
        return self.basis.conj().T @ np.asarray(v, dtype=complex)

    def contains(self, v, tol: float = DEFAULT_TOL.eq_tol) -> bool:
        v = np.asarray(v, dtype=complex)
        resid = v - self.basis @ self.coords(v)
        return np.linalg.norm(resid) <= tol * max(1.0, np.linalg.norm(v))

    def equals(self, other: "Subspace", tol: float = DEFAULT_TOL.eq_tol) -> bool:
        return subspace_distance(self, other) <= tol

    def orthonormality_error(self) -> float:
        g = self.basis.conj().T @ self.basis
        return opnorm(g - np.eye(self.dim))


def orthonormal_basis(vectors, tol: TolerancePolicy = DEFAULT_TOL, scale: float = 0.0) -> Subspace:
    """Orthonormal basis of the column space of ``vectors``.

    Singular values below ``tol.eq_tol * max(s_max, scale)`` are treated as
    zero. With the default ``scale=0`` the threshold is purely relative;
    pass ``scale=1`` when the columns are known to be of unit size so that
    rounding noise on an almost-zero block is not promoted to a direction.
    """
    v = as_matrix(vectors)
    n = v.shape[0]
    if v.shape[1] == 0 or n == 0:
        return Subspace.zero(n)
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    smax = s[0] if s.size else 0.0
    if smax == 0.0:
        return Subspace.zero(n)
    rank = int(np.sum(s > tol.eq_tol * max(smax, scale)))
    return Subspace(u[:, :rank], n)


def kernel(m, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    """Null space of ``m`` as a subspace of its domain.

    Threshold is ``tol.eq_tol * max(1, ||m||)`` so that a zero matrix has the
    whole domain as kernel.
    """
    m = as_matrix(m)
    ncols = m.shape[1]
    if ncols == 0:
        return Subspace.zero(0)
    if m.shape[0] == 0:
        return Subspace.full(ncols)
    _, s, vh = np.linalg.svd(m, full_matrices=True)
    thresh = tol.eq_tol * max(1.0, s[0] if s.size else 0.0)
    rank = int(np.sum(s > thresh))
    return Subspace(vh[rank:].conj().T, ncols)


def projector(s: Subspace) -> np.ndarray:
    """Orthogonal projection B B^H onto ``s``."""
    b = s.basis
    return b @ b.conj().T


def ortho_complement_within(s: Subspace, t: Subspace, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    """Return S ⊖ T; raises ContainmentError if T is not inside S."""
    if s.ambient_dim != t.ambient_dim:
        raise ValueError("subspaces live in different ambient spaces")
    resid = opnorm(t.basis - projector(s) @ t.basis)
    if resid > tol.eq_tol * 10:
        raise ContainmentError("T is not contained in S", resid)
    k = s.dim - t.dim
    if k <= 0:
        return Subspace.zero(s.ambient_dim)
    rest = s.basis - t.basis @ (t.basis.conj().T @ s.basis)
    u, _, _ = np.linalg.svd(rest, full_matrices=False)
    return Subspace(u[:, :k], s.ambient_dim)


def intersect_coordinates(s: Subspace, mask, tol: TolerancePolicy = DEFAULT_TOL) -> Subspace:
    """Intersection of ``s`` with the coordinate subspace selected by ``mask``.

    A vector ``B c`` lies in the coordinate subspace iff its entries outside
    ``mask`` vanish, so the intersection is ``B ker(B[~mask])``.
    """
    mask = np.asarray(mask, dtype=bool)
    if s.dim == 0:
        return s
    outside = s.basis[~mask]
    if outside.shape[0] == 0 or opnorm(outside) <= tol.eq_tol:
        return s
    c = kernel(outside, tol)
    vecs = s.basis @ c.basis
    vecs[~mask] = 0.0
    return orthonormal_basis(vecs, tol, scale=1.0)


def subspace_distance(a: Subspace, b: Subspace) -> float:
    """Spectral-norm distance between the two orthogonal projections."""
    if a.ambient_dim != b.ambient_dim:
        return float("inf")
    return opnorm(projector(a) - projector(b))


def hermitian_spectrum(m, tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in nondecreasing order."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotHermitianError(f"matrix is not square: {m.shape}")
    if m.size == 0:
        return np.zeros(0)
    asym = opnorm(m - m.conj().T)
    if asym > tol.eq_tol * (1.0 + opnorm(m)):
        raise NotHermitianError(f"||M - M^H|| = {asym:.3e}")
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


@dataclass(frozen=True)
class OperatorClass:
    isometry: bool
    unitary: bool
    projection: bool
    self_adjoint: bool


def operator_class(m, tol: TolerancePolicy = DEFAULT_TOL) -> OperatorClass:
    """Classify ``m`` as isometry / unitary / projection / self-adjoint."""
    m = as_matrix(m)
    r, c = m.shape
    eps = tol.eq_tol
    iso = opnorm(m.conj().T @ m - np.eye(c)) <= eps
    square = r == c
    unitary = iso and square and opnorm(m @ m.conj().T - np.eye(r)) <= eps
    sa = square and opnorm(m - m.conj().T) <= eps
    proj = sa and opnorm(m @ m - m) <= eps
    return OperatorClass(isometry=bool(iso), unitary=bool(unitary),
                         projection=bool(proj), self_adjoint=bool(sa))
