"""Analytic symbols and intertwiners of a pair with a pure factor.

All resolvents are truncated Neumann series. Every closed formula is
paired with a definitional computation on the truncated model, and the
definitional route is the one returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RouteDisagreement, TruncationError
from .hardy import GradedVector, KernelVector, kernel_vector_truncate
from .linalg import DEFAULT_TOL, Subspace, TolerancePolicy, opnorm, projector
from .pairs import GradedPair

__all__ = [
    "AnalyticSymbolSeries",
    "theta_Vj",
    "wold_series",
    "tilde_pi_apply",
    "TwoRouteResult",
    "tilde_pi_on_kernel",
    "tilde_pi_double",
    "characteristic_invariant",
    "bridge_identity_residual",
    "intertwining_residual",
    "series_mult",
    "series_inner_check",
]


@dataclass(frozen=True, eq=False)
class AnalyticSymbolSeries:
    """Taylor coefficients ``T_0..T_N`` of an operator-valued function."""

    coeffs: np.ndarray
    tail_bound: float = 0.0
    label: str = ""

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 3:
            raise ValueError("coefficient array must be (N+1, rows, cols)")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coefficients")
        object.__setattr__(self, "coeffs", c)

    @property
    def truncation(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def codomain_dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def domain_dim(self) -> int:
        return self.coeffs.shape[2]

    def coefficient(self, m: int) -> np.ndarray:
        if 0 <= m <= self.truncation:
            return self.coeffs[m]
        return np.zeros(self.coeffs.shape[1:], complex)

    def __call__(self, z: complex) -> np.ndarray:
        out = np.zeros(self.coeffs.shape[1:], complex)
        for a in self.coeffs[::-1]:
            out = out * z + a
        return out

    def coefficient_norms(self) -> list[float]:
        return [opnorm(a) for a in self.coeffs]


def series_mult(a: np.ndarray, b: np.ndarray, degree: int) -> np.ndarray:
    """Cauchy product of two coefficient stacks, cut at ``degree``.

    ``a`` has shape (Na, r, s); ``b`` is either (Nb, s, t) or (Nb, s) for a
    vector-valued series.
    """
    vec = b.ndim == 2
    shape = (degree + 1, a.shape[1]) if vec else (degree + 1, a.shape[1], b.shape[2])
    out = np.zeros(shape, complex)
    for i in range(min(a.shape[0], degree + 1)):
        k = min(b.shape[0], degree + 1 - i)
        if k <= 0:
            break
        if vec:
            out[i:i + k] += b[:k] @ a[i].T
        else:
            out[i:i + k] += np.einsum("rs,kst->krt", a[i], b[:k])
    return out


def _pure_factor(pair: GradedPair, i: int):
    if i not in (1, 2):
        raise ValueError("factor index must be 1 or 2")
    pair.require_pure(i)
    return i, 3 - i


def theta_Vj(pair: GradedPair, i: int, degree: int) -> AnalyticSymbolSeries:
    """Coefficients ``T_m = P_{W_i} V_i^{*m} V_j |_{W_i}`` (j != i).

    Codomain: basis of W_i over the whole truncation. Domain: the same basis
    when W_i lies inside the exact band (finite-dimensional W_i), otherwise
    the interior-band basis, giving a rectangular compression.
    """
    i, j = _pure_factor(pair, i)
    sub = pair.subspaces
    cod = sub.w1_full if i == 1 else sub.w2_full
    dom = cod if pair.vector_degree(cod.basis) <= pair.exact_degree else (sub.w1 if i == 1 else sub.w2)
    adj = pair.adj(i)
    g = pair.op(j) @ dom.basis
    out = np.zeros((degree + 1, cod.dim, dom.dim), complex)
    for m in range(degree + 1):
        out[m] = cod.basis.conj().T @ g
        g = adj @ g
    return AnalyticSymbolSeries(out, label=f"Theta_V{j}")


def wold_series(pair: GradedPair, i: int, h: np.ndarray, degree: int | None = None,
                tail_tol: float = 1e-13, max_degree: int = 20000):
    """Coefficients ``P_{W_i} V_i^{*m} h`` in the basis of W_i.

    With ``degree=None`` the series runs until the exact remainder
    ``||V_i^{*(m+1)} h||`` drops below ``tail_tol``. Returns the coefficient
    array and that remainder norm.
    """
    pair.require_pure(i)
    w = pair.wandering(i)
    adj = pair.adj(i)
    g = np.asarray(h, dtype=complex)
    coeffs = []
    m = 0
    while True:
        coeffs.append(w.basis.conj().T @ g)
        g = adj @ g
        rest = float(np.linalg.norm(g))
        m += 1
        if degree is not None and m > degree:
            break
        if degree is None and (rest < tail_tol or m > max_degree):
            break
    return np.array(coeffs), rest


def _wandering_embed(pair: GradedPair, f: GradedVector, w: Subspace) -> np.ndarray:
    """Pi_V^* f = sum_m V^m f_m, with f's coefficients in the basis of W."""
    if f.dim != w.dim:
        raise ValueError(f"vector has coefficient dim {f.dim}, W has dim {w.dim}")
    out = np.zeros(pair.ambient_dim, complex)
    for m in range(f.degree, -1, -1):
        out = pair.v @ out + w.basis @ f.coeffs[m]
    if f.degree >= 0:
        top = pair.vector_degree(out)
        if top > pair.model_degree - 1:
            raise TruncationError(
                f"Pi_V^* of a degree-{f.degree} vector needs a model beyond degree {pair.model_degree}")
    return out


def tilde_pi_apply(pair: GradedPair, i: int, f: GradedVector, degree: int | None = None,
                   tail_tol: float = 1e-13):
    """``Pi_{V_i} Pi_V^* f`` as a graded vector over W_i plus its remainder norm."""
    w = pair.wandering(0)
    h = _wandering_embed(pair, f, w)
    coeffs, rest = wold_series(pair, i, h, degree, tail_tol)
    return GradedVector(coeffs.shape[1], coeffs), rest


@dataclass(frozen=True)
class TwoRouteResult:
    value: GradedVector
    closed: GradedVector
    difference: float
    bound: float
    intertwining: float = 0.0


def tilde_pi_on_kernel(pair: GradedPair, i: int, w: complex, eta, degree: int,
                       tol: TolerancePolicy = DEFAULT_TOL) -> TwoRouteResult:
    """Image of the kernel vector S(., w) eta under Pi_{V_i} Pi_V^*.

    ``eta`` is given in the basis of the wandering subspace W of V.
    Route 1 is the closed kernel formula with the resolvent of
    ``w_bar z Theta_{V_j}(z)`` expanded to ``degree``; route 2 pushes the
    truncated kernel vector through the model.
    """
    i, j = _pure_factor(pair, i)
    wsp = pair.wandering(0)
    eta = np.asarray(eta, dtype=complex).ravel()
    kvec, tail = kernel_vector_truncate(KernelVector(w, eta, degree))

    # route 2: definitional
    h = _wandering_embed(pair, kvec, wsp)
    defn, _ = wold_series(pair, i, h, degree)

    # route 1: closed formula
    theta = theta_Vj(pair, i, degree).coeffs
    base, _ = wold_series(pair, i, wsp.basis @ eta, degree)
    ztheta = np.zeros_like(theta)
    ztheta[1:] = theta[:-1] * np.conj(w)
    acc = base.copy()
    term = base.copy()
    for _ in range(degree):
        term = series_mult(ztheta, term, degree)
        acc = acc + term
        if not np.any(term):
            break
    closed = acc

    diff = float(np.linalg.norm(defn - closed))
    bound = tail + tol.approx_tol
    if diff > bound:
        raise RouteDisagreement("closed kernel formula disagrees with Pi_{V_i} Pi_V^*", diff, bound)
    return TwoRouteResult(GradedVector(defn.shape[1], defn), GradedVector(closed.shape[1], closed),
                          diff, bound)


def tilde_pi_double(pair: GradedPair, w: complex, eta1, degree: int,
                    tol: TolerancePolicy = DEFAULT_TOL, intertwining_powers: int = 3) -> TwoRouteResult:
    """Image of S(., w) eta1 (eta1 in W1) under Pi_{V2} Pi_{V1}^*.

    Route 1: ``(I - w_bar Theta_{V1}(z))^{-1} P_{W2} (I - z V2^*)^{-1} eta1``
    with the outer resolvent expanded to ``degree`` terms. Route 2: the
    definitional composition on the truncated kernel vector. Also checks
    ``Pi(z^m eta1) = Theta_{V1}^m Pi(eta1)`` for m <= ``intertwining_powers``.
    """
    pair.require_pure(1)
    pair.require_pure(2)
    w1 = pair.wandering(1)
    eta1 = np.asarray(eta1, dtype=complex).ravel()
    if eta1.size != w1.dim:
        raise ValueError(f"eta1 must have {w1.dim} coordinates in the basis of W1")
    x = w1.basis @ eta1
    r = abs(w)
    wbar = np.conj(w)

    # route 2: sum_m w_bar^m V1^m eta1, then Pi_{V2}
    h = np.zeros(pair.ambient_dim, complex)
    for m in range(degree, -1, -1):
        h = wbar * (pair.v1 @ h) + x
    if pair.vector_degree(h) > pair.model_degree - 1:
        raise TruncationError("model too small for the truncated kernel vector")
    defn, _ = wold_series(pair, 2, h, degree)

    # route 1
    theta1 = theta_Vj(pair, 2, degree).coeffs
    base, _ = wold_series(pair, 2, x, degree)
    acc = base.copy()
    term = base.copy()
    for _ in range(degree):
        term = wbar * series_mult(theta1, term, degree)
        acc = acc + term
    closed = acc

    diff = float(np.linalg.norm(defn - closed))
    nrm = float(np.linalg.norm(eta1))
    bound = (r ** (degree + 1) / np.sqrt(1 - r * r) + r ** (degree + 1) / (1 - r)) * nrm + tol.approx_tol
    if diff > bound:
        raise RouteDisagreement("closed double-intertwiner formula disagrees", diff, bound)

    # intertwining on monomials
    worst = 0.0
    g = x.copy()
    power = base.copy()
    for _ in range(intertwining_powers):
        g = pair.v1 @ g
        if pair.vector_degree(g) > pair.exact_degree:
            break
        lhs, _ = wold_series(pair, 2, g, degree)
        power = series_mult(theta1, power, degree)
        worst = max(worst, float(np.linalg.norm(lhs - power)))
    return TwoRouteResult(GradedVector(defn.shape[1], defn), GradedVector(closed.shape[1], closed),
                          diff, bound, worst)


def intertwining_residual(pair: GradedPair, i: int, f: GradedVector, degree: int) -> float:
    """``||Pi~_i (z f) - z Theta_{V_j} Pi~_i f||`` over coefficients 0..``degree``.

    Here ``Pi~_i = Pi_{V_i} Pi_V^*``; coefficient m of either side only
    depends on coefficients <= m, so the truncated comparison is exact.
    """
    lhs, _ = tilde_pi_apply(pair, i, f.shift(1), degree)
    rhs, _ = tilde_pi_apply(pair, i, f, degree)
    theta = theta_Vj(pair, i, degree).coeffs
    ztheta = np.zeros_like(theta)
    ztheta[1:] = theta[:-1]
    prod = series_mult(ztheta, rhs.padded(degree + 1), degree)
    return float(np.linalg.norm(lhs.padded(degree + 1) - prod))


def characteristic_invariant(pair: GradedPair, i: int, degree: int) -> AnalyticSymbolSeries:
    """``theta_{Vi,Vj}(z) = [-V_i + z P_{W_i} (I - z V_i^*)^{-1} P_{W_j}]|_{W_j}``.

    For isometries the defect operator of ``V^*`` is the wandering projection,
    so no square roots appear. Domain: basis of W_j; codomain: basis of the
    wandering subspace W of the product (the values lie in W).
    """
    if i not in (1, 2):
        raise ValueError("factor index must be 1 or 2")
    j = 3 - i
    sub = pair.subspaces
    wj = sub.w2 if i == 1 else sub.w1
    wi_full = sub.w1_full if i == 1 else sub.w2_full
    w = pair.wandering(0)
    out = np.zeros((degree + 1, w.dim, wj.dim), complex)
    if wj.dim == 0:
        return AnalyticSymbolSeries(out, label=f"theta_V{i},V{j}")
    out[0] = -w.basis.conj().T @ (pair.op(i) @ wj.basis)
    pwi = projector(wi_full)
    g = wj.basis.copy()
    adj = pair.adj(i)
    for m in range(1, degree + 1):
        out[m] = w.basis.conj().T @ (pwi @ g)
        g = adj @ g
    return AnalyticSymbolSeries(out, label=f"theta_V{i},V{j}")


def bridge_identity_residual(pair: GradedPair, i: int, degree: int) -> float:
    """Coefficientwise gap in ``P_{W_i}[I + z(I - zV_i^*)^{-1} V_i^*]|_W = I_W + theta(z) V_i^*|_W``."""
    sub = pair.subspaces
    w = pair.wandering(0)
    wj = sub.w2 if i == 1 else sub.w1
    wi_full = sub.w1_full if i == 1 else sub.w2_full
    # inputs from the interior band of W, so that V_i^* W lands in the band of W_j
    w_in = pair.wandering(0, pair.interior_degree)
    theta = characteristic_invariant(pair, i, degree)
    adj = pair.adj(i)
    pwi = projector(wi_full)
    # V_i^* maps W onto W_j; express it in the basis of W_j
    vstar_w = wj.basis.conj().T @ (adj @ w_in.basis)
    embed = w.basis.conj().T @ w_in.basis
    worst = 0.0
    g = w_in.basis.copy()
    for m in range(degree + 1):
        lhs = w.basis.conj().T @ (pwi @ g)
        rhs = theta.coefficient(m) @ vstar_w
        if m == 0:
            rhs = rhs + embed
        worst = max(worst, opnorm(lhs - rhs))
        g = adj @ g
    return worst


def series_inner_check(series: AnalyticSymbolSeries, samples: int = 64,
                       tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """Worst ``||T(z)^H T(z) - I||`` over boundary samples of the truncated series."""
    worst = 0.0
    for t in np.arange(samples) * (2 * np.pi / samples):
        v = series(np.exp(1j * t))
        worst = max(worst, opnorm(v.conj().T @ v - np.eye(v.shape[1])))
    return worst
