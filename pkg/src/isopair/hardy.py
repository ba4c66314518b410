"""Vector-valued Hardy space on finitely supported Taylor sequences.

A :class:`GradedVector` is a polynomial ``f(z) = sum_m f_m z^m`` with
``f_m`` in C^n. Multiplication by a matrix polynomial never truncates, so
every identity between multiplication operators can be checked exactly
(up to rounding) without truncation error. Adjoints shrink degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ContainmentError, DimensionMismatch, NonFiniteError
from .linalg import DEFAULT_TOL, Subspace, TolerancePolicy, opnorm

__all__ = [
    "GradedVector",
    "PolySymbol",
    "KernelVector",
    "mult_apply",
    "mult_adjoint_apply",
    "symbol_product",
    "symbol_is_inner",
    "kernel_vector_truncate",
    "taylor_extract",
    "commutant_residual",
    "INNER_SAMPLES",
]

INNER_SAMPLES = 64


def _trim(blocks: np.ndarray, keep_one: bool) -> np.ndarray:
    k = blocks.shape[0]
    while k > (1 if keep_one else 0) and not np.any(blocks[k - 1]):
        k -= 1
    return blocks[:k]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    if not np.all(np.isfinite(a)):
        raise NonFiniteError("non-finite coefficients")
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class GradedVector:
    """Finitely supported coefficient sequence ``(f_0, ..., f_N)``.

    ``coeffs`` has shape ``(N + 1, dim)``; trailing all-zero blocks are
    dropped, so the zero vector has shape ``(0, dim)``.
    """

    dim: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.size == 0:
            c = np.zeros((0, self.dim), complex)
        if c.ndim == 1:
            c = c.reshape(1, -1)
        if c.shape[1] != self.dim:
            raise DimensionMismatch(f"coefficients have width {c.shape[1]}, dim is {self.dim}")
        object.__setattr__(self, "coeffs", _frozen(_trim(c, keep_one=False)))

    @classmethod
    def zero(cls, dim: int) -> "GradedVector":
        return cls(dim, np.zeros((0, dim), complex))

    @classmethod
    def constant(cls, eta) -> "GradedVector":
        eta = np.asarray(eta, dtype=complex).ravel()
        return cls(eta.size, eta.reshape(1, -1))

    @classmethod
    def monomial(cls, eta, m: int) -> "GradedVector":
        eta = np.asarray(eta, dtype=complex).ravel()
        c = np.zeros((m + 1, eta.size), complex)
        c[m] = eta
        return cls(eta.size, c)

    @classmethod
    def from_flat(cls, dim: int, flat) -> "GradedVector":
        flat = np.asarray(flat, dtype=complex)
        return cls(dim, flat.reshape(-1, dim))

    @property
    def degree(self) -> int:
        """Index of the last nonzero block; -1 for the zero vector."""
        return self.coeffs.shape[0] - 1

    def block(self, m: int) -> np.ndarray:
        if 0 <= m <= self.degree:
            return self.coeffs[m]
        return np.zeros(self.dim, complex)

    def padded(self, n_blocks: int) -> np.ndarray:
        """Coefficients as an ``(n_blocks, dim)`` array, zero filled or cut."""
        out = np.zeros((n_blocks, self.dim), complex)
        k = min(n_blocks, self.coeffs.shape[0])
        out[:k] = self.coeffs[:k]
        return out

    def flat(self, n_blocks: int | None = None) -> np.ndarray:
        n = self.coeffs.shape[0] if n_blocks is None else n_blocks
        return self.padded(n).ravel()

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def inner(self, other: "GradedVector") -> complex:
        """<self, other>, linear in the first slot."""
        _check_dims(self.dim, other.dim)
        k = min(self.coeffs.shape[0], other.coeffs.shape[0])
        return complex(np.sum(self.coeffs[:k] * other.coeffs[:k].conj()))

    def __add__(self, other: "GradedVector") -> "GradedVector":
        _check_dims(self.dim, other.dim)
        n = max(self.coeffs.shape[0], other.coeffs.shape[0])
        return GradedVector(self.dim, self.padded(n) + other.padded(n))

    def __sub__(self, other: "GradedVector") -> "GradedVector":
        return self + other.scale(-1.0)

    def scale(self, a: complex) -> "GradedVector":
        return GradedVector(self.dim, a * self.coeffs)

    def shift(self, k: int = 1) -> "GradedVector":
        """Multiply by z^k (k >= 0) or apply the backward shift (k < 0)."""
        if k >= 0:
            return GradedVector(self.dim, np.vstack([np.zeros((k, self.dim)), self.coeffs]))
        return GradedVector(self.dim, self.coeffs[-k:])

    def truncate(self, degree: int) -> "GradedVector":
        return GradedVector(self.dim, self.coeffs[: degree + 1])

    def apply_constant(self, a) -> "GradedVector":
        """Apply the matrix ``a`` to every coefficient block."""
        a = np.asarray(a, dtype=complex)
        return GradedVector(a.shape[0], self.coeffs @ a.T)


@dataclass(frozen=True, eq=False)
class PolySymbol:
    """Matrix polynomial ``Phi(z) = sum_k A_k z^k`` on C^dim."""

    dim: int
    matrices: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrices, dtype=complex)
        if m.ndim == 2:
            m = m[None]
        if m.shape[0] == 0:
            m = np.zeros((1, self.dim, self.dim), complex)
        if m.shape[1:] != (self.dim, self.dim):
            raise DimensionMismatch(f"matrices have shape {m.shape[1:]}, dim is {self.dim}")
        object.__setattr__(self, "matrices", _frozen(_trim(m, keep_one=True)))

    @classmethod
    def constant(cls, a) -> "PolySymbol":
        a = np.asarray(a, dtype=complex)
        return cls(a.shape[0], a[None])

    @classmethod
    def linear(cls, a0, a1) -> "PolySymbol":
        a0 = np.asarray(a0, dtype=complex)
        return cls(a0.shape[0], np.stack([a0, np.asarray(a1, dtype=complex)]))

    @classmethod
    def identity(cls, dim: int) -> "PolySymbol":
        return cls.constant(np.eye(dim))

    @classmethod
    def shift(cls, dim: int, k: int = 1) -> "PolySymbol":
        m = np.zeros((k + 1, dim, dim), complex)
        m[k] = np.eye(dim)
        return cls(dim, m)

    @property
    def degree(self) -> int:
        return self.matrices.shape[0] - 1

    def coefficient(self, k: int) -> np.ndarray:
        if 0 <= k <= self.degree:
            return self.matrices[k]
        return np.zeros((self.dim, self.dim), complex)

    def __call__(self, z: complex) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), complex)
        for a in self.matrices[::-1]:
            out = out * z + a
        return out

    def distance(self, other: "PolySymbol") -> float:
        """Largest spectral-norm difference over coefficients."""
        _check_dims(self.dim, other.dim)
        n = max(self.degree, other.degree) + 1
        return max(opnorm(self.coefficient(k) - other.coefficient(k)) for k in range(n))

    def coefficient_norms(self) -> list[float]:
        return [opnorm(a) for a in self.matrices]


@dataclass(frozen=True)
class KernelVector:
    """Szegő kernel vector S(., w) eta truncated at degree N."""

    w: complex
    eta: np.ndarray
    degree: int

    def __post_init__(self):
        if not abs(self.w) < 1:
            raise ValueError(f"kernel point must lie in the open disc, got |w| = {abs(self.w)}")


def _check_dims(a: int, b: int):
    if a != b:
        raise DimensionMismatch(f"dimension mismatch: {a} vs {b}")


def mult_apply(phi: PolySymbol, f: GradedVector) -> GradedVector:
    """Exact product ``Phi(z) f(z)``."""
    _check_dims(phi.dim, f.dim)
    if f.degree < 0:
        return GradedVector.zero(f.dim)
    out = np.zeros((phi.degree + f.degree + 1, f.dim), complex)
    for k, a in enumerate(phi.matrices):
        out[k : k + f.degree + 1] += f.coeffs @ a.T
    return GradedVector(f.dim, out)


def mult_adjoint_apply(phi: PolySymbol, f: GradedVector) -> GradedVector:
    """Adjoint of multiplication: ``(M_Phi^* f)_n = sum_k A_k^H f_{n+k}``."""
    _check_dims(phi.dim, f.dim)
    if f.degree < 0:
        return GradedVector.zero(f.dim)
    out = np.zeros((f.degree + 1, f.dim), complex)
    for k, a in enumerate(phi.matrices):
        if k > f.degree:
            break
        out[: f.degree + 1 - k] += f.coeffs[k:] @ a.conj()
    return GradedVector(f.dim, out)


def symbol_product(phi: PolySymbol, psi: PolySymbol) -> PolySymbol:
    """Coefficient convolution, so that M_{phi psi} = M_phi M_psi."""
    _check_dims(phi.dim, psi.dim)
    out = np.zeros((phi.degree + psi.degree + 1, phi.dim, phi.dim), complex)
    for i, a in enumerate(phi.matrices):
        for j, b in enumerate(psi.matrices):
            out[i + j] += a @ b
    return PolySymbol(phi.dim, out)


def symbol_is_inner(phi: PolySymbol, tol: TolerancePolicy = DEFAULT_TOL,
                    samples: int = INNER_SAMPLES) -> bool:
    """Whether ``M_phi`` is an isometry.

    Degree <= 1 uses the exact criterion ``A0^H A0 + A1^H A1 = I`` and
    ``A0^H A1 = 0``. Higher degrees fall back to checking isometry of
    ``Phi`` at ``samples`` equispaced points on the unit circle.
    """
    n = phi.dim
    if phi.degree <= 1:
        a0, a1 = phi.coefficient(0), phi.coefficient(1)
        gram = a0.conj().T @ a0 + a1.conj().T @ a1
        return (opnorm(gram - np.eye(n)) <= tol.eq_tol
                and opnorm(a0.conj().T @ a1) <= tol.eq_tol)
    for t in np.arange(samples) * (2 * np.pi / samples):
        v = phi(np.exp(1j * t))
        if opnorm(v.conj().T @ v - np.eye(n)) > tol.approx_tol:
            return False
    return True


def kernel_vector_truncate(k: KernelVector) -> tuple[GradedVector, float]:
    """Coefficients ``conj(w)^m eta`` for m <= N and the norm of the dropped tail."""
    eta = np.asarray(k.eta, dtype=complex).ravel()
    wbar = np.conj(k.w)
    powers = wbar ** np.arange(k.degree + 1)
    vec = GradedVector(eta.size, powers[:, None] * eta[None, :])
    r = abs(k.w)
    tail = r ** (k.degree + 1) / np.sqrt(1.0 - r * r) * np.linalg.norm(eta)
    return vec, float(tail)


def _project_constants(w: Subspace, g: GradedVector) -> np.ndarray:
    """Coordinates in ``w`` of the degree-0 block of ``g``."""
    return w.coords(g.block(0))


def taylor_extract(v_adjoint: Callable[[GradedVector], GradedVector],
                   c_apply: Callable[[GradedVector], GradedVector],
                   wandering: Subspace,
                   degree: int,
                   tol: TolerancePolicy = DEFAULT_TOL) -> PolySymbol:
    """Taylor coefficients ``Theta_m = P_W V*^m C|_W`` for m = 0..degree.

    ``wandering`` is a subspace of the constants; the result is expressed in
    its orthonormal basis. ``v_adjoint`` and ``c_apply`` act on graded vectors.
    """
    n = wandering.ambient_dim
    basis = [GradedVector.constant(wandering.basis[:, k]) for k in range(wandering.dim)]
    resid = 0.0
    for eta in basis:
        resid = max(resid, v_adjoint(eta).norm())
    if resid > tol.eq_tol:
        raise ContainmentError("W is not contained in ker V*", resid)
    r = wandering.dim
    out = np.zeros((degree + 1, r, r), complex)
    for col, eta in enumerate(basis):
        g = c_apply(eta)
        if g.dim != n:
            raise DimensionMismatch("C does not act on the model space")
        for m in range(degree + 1):
            out[m, :, col] = _project_constants(wandering, g)
            g = v_adjoint(g)
    return PolySymbol(r, out)


def commutant_residual(c_apply: Callable[[GradedVector], GradedVector],
                       theta: PolySymbol,
                       wandering: Subspace,
                       degree: int) -> float:
    """Largest ``||C(z^m eta) - Theta(z) z^m eta||`` over basis vectors of W and m <= degree.

    ``theta`` is expressed in the basis of ``wandering`` (a subspace of the
    constants). Zero exactly when C agrees with M_Theta on polynomials, which
    for a commutant of the shift is the reconstruction of C from its symbol.
    """
    b = wandering.basis
    embedded = PolySymbol(b.shape[0], np.stack([b @ a @ b.conj().T for a in theta.matrices]))
    worst = 0.0
    for k in range(wandering.dim):
        eta = GradedVector.constant(b[:, k])
        for m in range(degree + 1):
            f = eta.shift(m)
            worst = max(worst, (c_apply(f) - mult_apply(embedded, f)).norm())
    return worst
