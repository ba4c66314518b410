"""Truncated graded models of a commuting pair of isometries.

Every concrete pair (BCL multipliers, general symbol pairs, restrictions to
bidisc invariant subspaces, finite unitary pairs and direct sums of those)
is turned into a :class:`GradedPair`: explicit matrices for V1, V2 and their
adjoints on a finite orthonormal basis, each basis vector tagged with a
degree. Forward maps are trusted only on inputs up to ``exact_degree``;
analysis results are reported on the band up to ``interior_degree``.
Adjoint matrices are exact on the whole truncation for every model built
here with graded (degree-preserving) structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import block_diag

from .errors import DimensionMismatch, PurityError, TruncationError
from .hardy import PolySymbol
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    TolerancePolicy,
    intersect_coordinates,
    kernel,
    opnorm,
    orthonormal_basis,
)

__all__ = ["Purity", "GradedPair", "BandSubspaces", "multiplier_matrix"]


@dataclass(frozen=True)
class Purity:
    """Structurally declared purity of V = V1 V2, V1 and V2."""

    product: bool
    v1: bool
    v2: bool

    def of(self, i: int) -> bool:
        return self.v1 if i == 1 else self.v2

    def to_dict(self):
        return {"product": self.product, "v1": self.v1, "v2": self.v2}


def multiplier_matrix(phi: PolySymbol, degree: int) -> np.ndarray:
    """Matrix of M_phi on polynomials of degree <= ``degree``, top overflow cut.

    Basis ordering is block-major: index ``m * dim + i`` is ``z^m e_i``.
    The conjugate transpose is the exact adjoint on this truncation.
    """
    n = phi.dim
    nb = degree + 1
    out = np.zeros((nb * n, nb * n), complex)
    for k, a in enumerate(phi.matrices):
        for m in range(nb - k):
            out[(m + k) * n:(m + k + 1) * n, m * n:(m + 1) * n] = a
    return out


@dataclass(frozen=True)
class BandSubspaces:
    """Wandering-type subspaces restricted to degrees <= ``degree``.

    ``w1`` and ``w2`` are taken over the whole truncation (``w1_full``,
    ``w2_full``) and over the band; ``v2w1`` / ``v1w2`` are the images of
    the band pieces intersected with the band.
    """

    degree: int
    w: Subspace
    w1: Subspace
    w2: Subspace
    v1w2: Subspace
    v2w1: Subspace
    w1_full: Subspace
    w2_full: Subspace


@dataclass(frozen=True, eq=False)
class GradedPair:
    v1: np.ndarray
    v2: np.ndarray
    v1_adj: np.ndarray
    v2_adj: np.ndarray
    degrees: np.ndarray
    exact_degree: int
    interior_degree: int
    purity: Purity
    unitary_mask: np.ndarray = None
    label: str = ""
    tol: TolerancePolicy = DEFAULT_TOL
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        d = self.v1.shape[0]
        for m in (self.v1, self.v2, self.v1_adj, self.v2_adj):
            if m.shape != (d, d):
                raise DimensionMismatch("pair matrices must share one square shape")
        if self.unitary_mask is None:
            object.__setattr__(self, "unitary_mask", np.zeros(d, dtype=bool))
        object.__setattr__(self, "degrees", np.asarray(self.degrees, dtype=int))
        if self.interior_degree > self.exact_degree:
            raise TruncationError("interior band exceeds the exactness band")
        if self.interior_degree < 0:
            raise TruncationError("truncation too small: empty interior band")

    # construction ---------------------------------------------------------

    @classmethod
    def from_symbols(cls, phi1: PolySymbol, phi2: PolySymbol, degree: int,
                     purity: Purity, interior: int | None = None,
                     label: str = "", tol: TolerancePolicy = DEFAULT_TOL) -> "GradedPair":
        """Multiplication pair (M_phi1, M_phi2) on H^2_W truncated at ``degree``."""
        if phi1.dim != phi2.dim:
            raise DimensionMismatch("symbols act on different spaces")
        raise_by = max(phi1.degree, phi2.degree, 1)
        exact = degree - raise_by
        if exact < 0:
            raise TruncationError(f"degree {degree} too small for symbols of degree {raise_by}")
        m1 = multiplier_matrix(phi1, degree)
        m2 = multiplier_matrix(phi2, degree)
        degs = np.repeat(np.arange(degree + 1), phi1.dim)
        return cls(m1, m2, m1.conj().T, m2.conj().T, degs, exact,
                   exact if interior is None else interior, purity,
                   label=label, tol=tol,
                   meta={"model": "hardy", "coeff_dim": phi1.dim, "degree": degree})

    @classmethod
    def from_unitaries(cls, u1, u2, label: str = "",
                       tol: TolerancePolicy = DEFAULT_TOL) -> "GradedPair":
        """Finite pair of commuting unitaries, declared as a unitary summand."""
        u1 = np.asarray(u1, dtype=complex)
        u2 = np.asarray(u2, dtype=complex)
        d = u1.shape[0]
        big = 1 << 30
        return cls(u1, u2, u1.conj().T, u2.conj().T, np.zeros(d, int), big, big,
                   Purity(False, False, False), unitary_mask=np.ones(d, dtype=bool),
                   label=label, tol=tol, meta={"model": "unitary"})

    @classmethod
    def direct_sum(cls, parts: list["GradedPair"], label: str = "") -> "GradedPair":
        if not parts:
            raise ValueError("empty direct sum")
        shifty = [p for p in parts if not p.unitary_mask.all()]
        exact = min((p.exact_degree for p in shifty), default=parts[0].exact_degree)
        interior = min((p.interior_degree for p in shifty), default=parts[0].interior_degree)
        has_unitary = any(p.unitary_mask.any() for p in parts)
        pur = Purity(
            product=all(p.purity.product for p in parts) and not has_unitary,
            v1=all(p.purity.v1 for p in parts) and not has_unitary,
            v2=all(p.purity.v2 for p in parts) and not has_unitary,
        )
        return cls(
            block_diag(*[p.v1 for p in parts]),
            block_diag(*[p.v2 for p in parts]),
            block_diag(*[p.v1_adj for p in parts]),
            block_diag(*[p.v2_adj for p in parts]),
            np.concatenate([p.degrees for p in parts]),
            exact, interior, pur,
            unitary_mask=np.concatenate([p.unitary_mask for p in parts]),
            label=label, tol=parts[0].tol,
            meta={"model": "direct-sum", "parts": [p.meta for p in parts]},
        )

    # basic access ---------------------------------------------------------

    @property
    def ambient_dim(self) -> int:
        return self.v1.shape[0]

    @property
    def model_degree(self) -> int:
        shift = self.degrees[~self.unitary_mask]
        return int(shift.max()) if shift.size else 0

    def op(self, i: int) -> np.ndarray:
        return self.v1 if i == 1 else self.v2

    def adj(self, i: int) -> np.ndarray:
        return self.v1_adj if i == 1 else self.v2_adj

    @cached_property
    def v(self) -> np.ndarray:
        return self.v1 @ self.v2

    @cached_property
    def v_adj(self) -> np.ndarray:
        return self.v2_adj @ self.v1_adj

    def band(self, degree: int) -> np.ndarray:
        """Coordinate mask of the band of degree <= ``degree``.

        Unitary-summand coordinates always belong to every band.
        """
        return (self.degrees <= degree) | self.unitary_mask

    @property
    def interior(self) -> np.ndarray:
        return self.band(self.interior_degree)

    def vector_degree(self, vec: np.ndarray) -> int:
        vec = np.asarray(vec)
        mag = np.abs(vec)
        # entries at rounding level relative to the vector are not support
        support = mag > self.tol.eq_tol * 1e-3 * (mag.max() if mag.size else 0.0)
        if vec.ndim == 2:
            support = support.any(axis=1)
        support &= ~self.unitary_mask
        if not support.any():
            return 0 if np.any(vec) else -1
        return int(self.degrees[support].max())

    def require_pure(self, i: int):
        if not self.purity.of(i):
            raise PurityError(f"V{i} is not declared pure on this model")

    # wandering geometry ---------------------------------------------------

    def wandering(self, which: int, degree: int | None = None) -> Subspace:
        """ker(V_which^*) inside the band of degree <= ``degree``.

        ``which`` is 1, 2 or 0 (0 = the product V).
        """
        adj = {0: self.v_adj, 1: self.v1_adj, 2: self.v2_adj}[which]
        mask = self.band(self.model_degree if degree is None else degree)
        k = kernel(adj[:, mask], self.tol)
        basis = np.zeros((self.ambient_dim, k.dim), complex)
        basis[mask] = k.basis
        return Subspace(basis, self.ambient_dim)

    def image_in_band(self, i: int, s: Subspace, degree: int) -> Subspace:
        """(V_i s) intersected with the band of degree <= ``degree``."""
        if s.dim == 0:
            return Subspace.zero(self.ambient_dim)
        img = orthonormal_basis(self.op(i) @ s.basis, self.tol, scale=1.0)
        return intersect_coordinates(img, self.band(degree), self.tol)

    def band_subspaces(self, degree: int | None = None) -> BandSubspaces:
        k = self.interior_degree if degree is None else degree
        w1_full = self.wandering(1)
        w2_full = self.wandering(2)
        mask = self.band(k)
        w1 = intersect_coordinates(w1_full, mask, self.tol)
        w2 = intersect_coordinates(w2_full, mask, self.tol)
        return BandSubspaces(
            degree=k,
            w=self.wandering(0, k),
            w1=w1,
            w2=w2,
            v1w2=self.image_in_band(1, w2, k),
            v2w1=self.image_in_band(2, w1, k),
            w1_full=w1_full,
            w2_full=w2_full,
        )

    @cached_property
    def subspaces(self) -> BandSubspaces:
        return self.band_subspaces()

    def commutator_norm(self) -> float:
        """||V1 V2 - V2 V1|| on the exact band."""
        mask = self.band(self.exact_degree - 1)
        return opnorm((self.v1 @ self.v2 - self.v2 @ self.v1)[:, mask])

    def adjoint_pairing_error(self) -> float:
        """Largest ||<V_j f, g> - <f, V_j^* g>|| on interior inputs."""
        mask = self.interior
        err = 0.0
        for i in (1, 2):
            fwd = self.op(i)[:, mask]
            adj = self.adj(i)[mask, :]
            err = max(err, opnorm(fwd.conj().T - adj))
        return err
