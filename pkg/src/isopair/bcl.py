"""BCL multiplier pairs built from a unitary U and a projection P.

``Phi1(z) = U^H (P + z P_perp)`` and ``Phi2(z) = (P_perp + z P) U`` act on
H^2_W with W = C^n; their product is ``z I``. The reverse direction reads
the wandering subspaces W1, W2, V1 W2, V2 W1 off the constant terms and
reassembles U and P = P_{W2}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DirectSumError, InvalidBCLData, PurityError, RouteDisagreement
from .hardy import GradedVector, PolySymbol, mult_adjoint_apply, mult_apply, symbol_is_inner, symbol_product
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    TolerancePolicy,
    as_matrix,
    kernel,
    opnorm,
    operator_class,
    orthonormal_basis,
    projector,
)
from .pairs import GradedPair, Purity

__all__ = [
    "BCLData",
    "BCLPair",
    "WanderingData",
    "WanderingCoefficients",
    "build_multipliers",
    "wandering_data_of_pair",
    "wandering_coefficients",
    "wold_coefficients",
    "extract_bcl",
    "random_unitary",
    "random_projection",
    "random_bcl_data",
    "bcl_purity",
    "bcl_graded_pair",
]


@dataclass(frozen=True, eq=False)
class BCLData:
    U: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        u = as_matrix(self.U)
        p = as_matrix(self.P)
        if u.shape[0] != u.shape[1] or p.shape != u.shape:
            raise InvalidBCLData(f"U and P must be square of equal size, got {u.shape}, {p.shape}")
        object.__setattr__(self, "U", u)
        object.__setattr__(self, "P", p)

    @property
    def dim(self) -> int:
        return self.U.shape[0]

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.P).real))

    def validate(self, tol: TolerancePolicy = DEFAULT_TOL) -> "BCLData":
        cu = operator_class(self.U, tol)
        cp = operator_class(self.P, tol)
        if not cu.unitary:
            raise InvalidBCLData(f"U is not unitary: {cu}")
        if not cp.projection:
            raise InvalidBCLData(f"P is not an orthogonal projection: {cp}")
        return self

    def conjugate(self, z) -> "BCLData":
        z = np.asarray(z, dtype=complex)
        return BCLData(z @ self.U @ z.conj().T, z @ self.P @ z.conj().T)


@dataclass(frozen=True, eq=False)
class BCLPair:
    phi1: PolySymbol
    phi2: PolySymbol

    @property
    def dim(self) -> int:
        return self.phi1.dim

    def product_errors(self) -> tuple[float, float]:
        z = PolySymbol.shift(self.dim)
        return (symbol_product(self.phi1, self.phi2).distance(z),
                symbol_product(self.phi2, self.phi1).distance(z))

    def check(self, tol: TolerancePolicy = DEFAULT_TOL) -> "BCLPair":
        if self.phi1.degree > 1 or self.phi2.degree > 1:
            raise PurityError("BCL symbols have degree at most one")
        e12, e21 = self.product_errors()
        if max(e12, e21) > tol.eq_tol:
            raise PurityError(f"Phi1 Phi2 = Phi2 Phi1 = zI fails: errors {e12:.3e}, {e21:.3e}")
        return self

    def is_inner(self, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[bool, bool]:
        return symbol_is_inner(self.phi1, tol), symbol_is_inner(self.phi2, tol)

    def v1(self, f: GradedVector) -> GradedVector:
        return mult_apply(self.phi1, f)

    def v2(self, f: GradedVector) -> GradedVector:
        return mult_apply(self.phi2, f)

    def v1_adj(self, f: GradedVector) -> GradedVector:
        return mult_adjoint_apply(self.phi1, f)

    def v2_adj(self, f: GradedVector) -> GradedVector:
        return mult_adjoint_apply(self.phi2, f)

    def v(self, f: GradedVector) -> GradedVector:
        return self.v1(self.v2(f))

    def v_adj(self, f: GradedVector) -> GradedVector:
        return self.v2_adj(self.v1_adj(f))


@dataclass(frozen=True, eq=False)
class WanderingData:
    """Subspaces of the constants C^n and the unitary U assembled from them."""

    w: Subspace
    w1: Subspace
    w2: Subspace
    v1w2: Subspace
    v2w1: Subspace
    U: np.ndarray
    residual: float

    def dims(self) -> dict:
        return {"W": self.w.dim, "W1": self.w1.dim, "W2": self.w2.dim,
                "V1W2": self.v1w2.dim, "V2W1": self.v2w1.dim}


@dataclass(frozen=True, eq=False)
class WanderingCoefficients:
    """Constant and linear coefficients of Phi1 (A, B) and Phi2 (C, D)."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    mismatch: float

    def phi1(self) -> PolySymbol:
        return PolySymbol.linear(self.A, self.B)

    def phi2(self) -> PolySymbol:
        return PolySymbol.linear(self.C, self.D)


def build_multipliers(data: BCLData, tol: TolerancePolicy = DEFAULT_TOL) -> BCLPair:
    data.validate(tol)
    u, p = data.U, data.P
    pp = np.eye(data.dim) - p
    uh = u.conj().T
    return BCLPair(PolySymbol.linear(uh @ p, uh @ pp), PolySymbol.linear(pp @ u, p @ u))


def wandering_data_of_pair(pair: BCLPair, tol: TolerancePolicy = DEFAULT_TOL) -> WanderingData:
    """Locate W, W1, W2, V1 W2, V2 W1 inside the constants and assemble U.

    On constants ``V_j^*`` acts as the adjoint of the constant term, so
    ``W_j = ker Phi_j(0)^H``; ``V1`` maps W2 into the constants through
    ``Phi1(0)`` and ``V2`` maps W1 through ``Phi2(0)``.
    """
    n = pair.dim
    a0, a1 = pair.phi1.coefficient(0), pair.phi1.coefficient(1)
    c0, c1 = pair.phi2.coefficient(0), pair.phi2.coefficient(1)
    w = Subspace.full(n)
    w1 = kernel(a0.conj().T, tol)
    w2 = kernel(c0.conj().T, tol)
    v1w2 = orthonormal_basis(a0 @ w2.basis, tol, scale=1.0)
    v2w1 = orthonormal_basis(c0 @ w1.basis, tol, scale=1.0)
    # V1 W2 and V2 W1 must be constants: the linear terms kill W2, W1.
    leak = max(opnorm(a1 @ w2.basis), opnorm(c1 @ w1.basis))
    p_w1, p_w2 = projector(w1), projector(w2)
    p_v1w2, p_v2w1 = projector(v1w2), projector(v2w1)
    eye = np.eye(n)
    resid = max(
        leak,
        opnorm(p_w1 + p_v1w2 - eye),
        opnorm(p_v2w1 + p_w2 - eye),
        opnorm(p_w1 @ p_v1w2),
        opnorm(p_v2w1 @ p_w2),
    )
    if resid > tol.eq_tol * 10:
        raise DirectSumError("W = W1 + V1 W2 = V2 W1 + W2 fails; not a BCL pair", resid)
    u = c0 @ p_w1 + a0.conj().T @ p_v1w2
    return WanderingData(w, w1, w2, v1w2, v2w1, u, resid)


def wandering_coefficients(wd: WanderingData, pair: BCLPair,
                           tol: TolerancePolicy = DEFAULT_TOL) -> WanderingCoefficients:
    """Coefficients of Phi1, Phi2 read from operator actions on wandering subspaces.

    ``A = V1 P_{W2}``, ``B = V2^* P_{V2 W1}``, ``C = V2 P_{W1}``,
    ``D = V1^* P_{V1 W2}``, all as operators on the constants. The result is
    compared with ``build_multipliers(U, P_{W2})``.
    """
    n = pair.dim

    def act(op, proj):
        cols = []
        for k in range(n):
            g = op(GradedVector.constant(proj[:, k]))
            if g.degree > 0 and np.linalg.norm(g.coeffs[1:]) > tol.eq_tol:
                raise RouteDisagreement("image left the constants", float(np.linalg.norm(g.coeffs[1:])), tol.eq_tol)
            cols.append(g.block(0))
        return np.array(cols).T

    a = act(pair.v1, projector(wd.w2))
    b = act(pair.v2_adj, projector(wd.v2w1))
    c = act(pair.v2, projector(wd.w1))
    d = act(pair.v1_adj, projector(wd.v1w2))
    ref = build_multipliers(BCLData(wd.U, projector(wd.w2)), tol)
    mismatch = max(
        opnorm(a - ref.phi1.coefficient(0)),
        opnorm(b - ref.phi1.coefficient(1)),
        opnorm(c - ref.phi2.coefficient(0)),
        opnorm(d - ref.phi2.coefficient(1)),
    )
    if mismatch > tol.eq_tol:
        raise RouteDisagreement("wandering-subspace coefficients differ from the (U, P) form",
                                mismatch, tol.eq_tol)
    return WanderingCoefficients(a, b, c, d, mismatch)


def wold_coefficients(pair: BCLPair, w: Subspace, h: GradedVector,
                      tol: TolerancePolicy = DEFAULT_TOL) -> list[np.ndarray]:
    """``eta_m = P_W V*^m h`` so that ``h = sum_m V^m eta_m``.

    ``w`` is the wandering subspace of V = V1 V2 inside the constants. The
    reconstruction is verified and a RouteDisagreement raised if it fails.
    """
    pw = projector(w)
    etas = []
    g = h
    while g.degree >= 0:
        etas.append(pw @ g.block(0))
        g = pair.v_adj(g)
        if len(etas) > h.degree + 1:
            break
    floor = tol.eq_tol * (1.0 + h.norm())
    while etas and np.linalg.norm(etas[-1]) <= floor:
        etas.pop()
    rebuilt = GradedVector.zero(pair.dim)
    for eta in reversed(etas):
        rebuilt = pair.v(rebuilt) + GradedVector.constant(eta)
    resid = (rebuilt - h).norm()
    if resid > tol.eq_tol * (1.0 + h.norm()):
        raise RouteDisagreement("Wold reconstruction failed", resid, tol.eq_tol)
    return etas


def extract_bcl(pair: BCLPair, tol: TolerancePolicy = DEFAULT_TOL) -> BCLData:
    """Read (U, P_{W2}) off the pair, in the standard basis of the constants."""
    pair.check(tol)
    wd = wandering_data_of_pair(pair, tol)
    return BCLData(wd.U, projector(wd.w2)).validate(tol)


def bcl_purity(data: BCLData, tol: TolerancePolicy = DEFAULT_TOL) -> Purity:
    """Purity of V1 = M_Phi1 and V2 = M_Phi2.

    On the constants V1^* acts as P U and V2^* as U^H P_perp; V_j is pure iff
    that compression has spectral radius below one.
    """
    p, u = data.P, data.U
    pp = np.eye(data.dim) - p
    slack = np.sqrt(tol.eq_tol)

    def radius(m):
        return max(abs(np.linalg.eigvals(m))) if m.size else 0.0

    return Purity(True, bool(radius(p @ u) < 1 - slack), bool(radius(pp @ u) < 1 - slack))


def bcl_graded_pair(data: BCLData, degree: int, tol: TolerancePolicy = DEFAULT_TOL,
                    label: str = "bcl") -> GradedPair:
    pair = build_multipliers(data, tol)
    return GradedPair.from_symbols(pair.phi1, pair.phi2, degree, bcl_purity(data, tol),
                                   label=label, tol=tol)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from QR of a complex Gaussian matrix with phase correction."""
    g = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_projection(n: int, rank: int, rng: np.random.Generator) -> np.ndarray:
    q = random_unitary(n, rng)[:, :rank]
    return q @ q.conj().T


def random_bcl_data(dim: int, rank: int, rng: np.random.Generator,
                    commuting: bool = False) -> BCLData:
    """Random (U, P) with rank(P) = ``rank``.

    With ``commuting=True``, U is block diagonal with respect to ran P, so
    UP = PU and the resulting pair is doubly commuting.
    """
    if not 0 <= rank <= dim:
        raise ValueError(f"rank {rank} outside [0, {dim}]")
    frame = random_unitary(dim, rng)
    p = frame[:, :rank] @ frame[:, :rank].conj().T
    if commuting:
        blocks = np.zeros((dim, dim), complex)
        if rank:
            blocks[:rank, :rank] = random_unitary(rank, rng)
        if dim - rank:
            blocks[rank:, rank:] = random_unitary(dim - rank, rng)
        u = frame @ blocks @ frame.conj().T
    else:
        u = random_unitary(dim, rng)
    return BCLData(u, (p + p.conj().T) / 2)
