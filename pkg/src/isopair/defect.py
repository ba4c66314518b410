"""Defect operator C(V1, V2) and the doubly-commuting verdicts.

``C = I - V1 V1^* - V2 V2^* + V1 V2 V1^* V2^*`` is computed twice: directly
from the four terms and geometrically as ``P_{W1} - P_{V2 W1}`` (and
``P_{W2} - P_{V1 W2}``). Both live on the interior band of a
:class:`~isopair.pairs.GradedPair`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, RouteDisagreement, TruncationError
from .linalg import (
    DEFAULT_TOL,
    Subspace,
    TolerancePolicy,
    hermitian_spectrum,
    opnorm,
    orthonormal_basis,
    projector,
)
from .pairs import GradedPair

__all__ = [
    "VERDICT_KEYS",
    "DefectReport",
    "defect_direct",
    "defect_geometric",
    "fringe_operator",
    "doubly_commuting_verdicts",
    "negativity_check",
    "NegativityVerdict",
    "wold_part_containments",
    "ContainmentReport",
]

VERDICT_KEYS = ("nonneg", "V2W1_in_W1", "doubly_commuting", "projection", "fringe2_isometric")


def _interior_block(pair: GradedPair, m: np.ndarray) -> np.ndarray:
    mask = pair.interior
    return m[np.ix_(mask, mask)]


def defect_direct(pair: GradedPair, truncation: int | None = None) -> np.ndarray:
    """Four-term defect operator on the interior band.

    ``truncation`` (if given) is the model degree N; the band used is
    degrees <= N - 1 and must not exceed the pair's exact band.
    """
    if truncation is not None:
        if truncation < 2:
            raise TruncationError("defect_direct needs truncation N >= 2")
        if truncation - 1 > pair.exact_degree:
            raise TruncationError(f"N = {truncation} exceeds the model truncation")
    v1, v2, a1, a2 = pair.v1, pair.v2, pair.v1_adj, pair.v2_adj
    c = np.eye(pair.ambient_dim) - v1 @ a1 - v2 @ a2 + v1 @ (v2 @ (a1 @ a2))
    return _interior_block(pair, c)


def _band_projector(pair: GradedPair, s: Subspace) -> np.ndarray:
    return _interior_block(pair, projector(s))


def defect_geometric(pair: GradedPair, tol: TolerancePolicy | None = None) -> np.ndarray:
    """``P_{W1} - P_{V2 W1}``, checked against ``P_{W2} - P_{V1 W2}``."""
    tol = tol or pair.tol
    sub = pair.subspaces
    first = _band_projector(pair, sub.w1) - _band_projector(pair, sub.v2w1)
    second = _band_projector(pair, sub.w2) - _band_projector(pair, sub.v1w2)
    diff = opnorm(first - second)
    if diff > tol.eq_tol * 10:
        raise RouteDisagreement("the two geometric defect formulas disagree", diff, tol.eq_tol * 10)
    return first


def fringe_operator(pair: GradedPair, j: int) -> np.ndarray:
    """``F_j = P_{W_i} V_j |_{W_i}`` (i != j).

    Columns are the interior-band basis of W_i, rows the basis of W_i over
    the whole truncation (they coincide when W_i is finite dimensional and
    sits inside the band). Empty W_i gives a 0 x 0 matrix.
    """
    sub = pair.subspaces
    dom = sub.w1 if j == 2 else sub.w2
    cod = sub.w1_full if j == 2 else sub.w2_full
    if dom.dim == 0:
        return np.zeros((0, 0), complex)
    return cod.basis.conj().T @ pair.op(j) @ dom.basis


@dataclass
class DefectReport:
    defect_matrix: np.ndarray
    spectrum: np.ndarray
    verdicts: dict
    residuals: dict
    fringe: dict
    consistency: bool
    purity: dict
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "spectrum": [float(x) for x in self.spectrum],
            "verdicts": dict(self.verdicts),
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "consistency": bool(self.consistency),
            "declared_purity": dict(self.purity),
            "fringe_shapes": {k: list(v.shape) for k, v in self.fringe.items()},
            "config": dict(self.config),
        }


def doubly_commuting_verdicts(pair: GradedPair, tol: TolerancePolicy | None = None,
                      strict: bool = True) -> DefectReport:
    """Evaluate the five equivalent conditions independently.

    (a) C >= 0, (b) V2 W1 inside W1, (c) V1^* V2 = V2 V1^*, (d) C is a
    projection, (e) F2 is an isometry. With ``strict`` an inconsistent
    outcome raises ConsistencyError carrying every verdict and residual.
    """
    tol = tol or pair.tol
    band = tol.approx_tol
    c_direct = defect_direct(pair)
    c_geo = defect_geometric(pair, tol)
    spec = hermitian_spectrum(c_direct, tol) if c_direct.size else np.zeros(0)
    sub = pair.subspaces

    # (b) component of V2 W1 outside W1
    if sub.w1.dim:
        img = pair.v2 @ sub.w1.basis
        outside = img - projector(sub.w1_full) @ img
        b_res = opnorm(outside)
    else:
        b_res = 0.0

    # (c) commutator V1^* V2 - V2 V1^* on interior inputs
    mask = pair.interior
    comm = pair.v1_adj @ pair.v2 - pair.v2 @ pair.v1_adj
    c_res = opnorm(comm[:, mask])

    # (d) projection
    d_res = max(opnorm(c_direct @ c_direct - c_direct), opnorm(c_direct - c_direct.conj().T)) \
        if c_direct.size else 0.0

    # (e) fringe isometry
    f2 = fringe_operator(pair, 2)
    f1 = fringe_operator(pair, 1)
    e_res = opnorm(f2.conj().T @ f2 - np.eye(f2.shape[1])) if f2.size else 0.0

    min_eig = float(spec[0]) if spec.size else 0.0
    verdicts = {
        "nonneg": bool(min_eig >= -band),
        "V2W1_in_W1": bool(b_res <= band),
        "doubly_commuting": bool(c_res <= band),
        "projection": bool(d_res <= band),
        "fringe2_isometric": bool(e_res <= band),
    }
    residuals = {
        "min_eigenvalue": min_eig,
        "V2W1_outside_W1": b_res,
        "commutator": c_res,
        "projection": d_res,
        "fringe2_defect": e_res,
        "two_route": opnorm(c_direct - c_geo),
        "wandering_split": _wandering_split_residual(pair),
    }
    consistent = len(set(verdicts.values())) == 1
    report = DefectReport(c_direct, spec, verdicts, residuals, {"F1": f1, "F2": f2},
                          consistent, pair.purity.to_dict(),
                          {"interior_degree": pair.interior_degree, **tol.to_dict()})
    if strict and not consistent:
        raise ConsistencyError("five-way doubly-commuting verdicts disagree", verdicts, residuals)
    return report


def _wandering_split_residual(pair: GradedPair) -> float:
    """||P_W - P_{W1} - P_{V1 W2}|| and ||P_W - P_{V2 W1} - P_{W2}|| on the band."""
    sub = pair.subspaces
    pw = projector(sub.w)
    return max(opnorm(pw - projector(sub.w1) - projector(sub.v1w2)),
               opnorm(pw - projector(sub.v2w1) - projector(sub.w2)))


@dataclass(frozen=True)
class NegativityVerdict:
    passed: bool
    nonpositive: bool
    max_eigenvalue: float
    defect_norm: float
    context: dict


def negativity_check(report: DefectReport, some_vi_pure: bool = False,
                     some_dim_wj_finite: bool = False,
                     tol: TolerancePolicy = DEFAULT_TOL) -> NegativityVerdict:
    """``C <= 0`` must force ``C = 0`` under either hypothesis flag."""
    if not (some_vi_pure or some_dim_wj_finite):
        raise ValueError("negativity check needs a purity or finite-dimension hypothesis")
    spec = report.spectrum
    top = float(spec[-1]) if spec.size else 0.0
    norm = float(np.max(np.abs(spec))) if spec.size else 0.0
    nonpos = top <= tol.approx_tol
    passed = (not nonpos) or norm <= tol.approx_tol
    return NegativityVerdict(passed, nonpos, top, norm,
                             {"some_Vi_pure": some_vi_pure, "some_dim_Wj_finite": some_dim_wj_finite})


@dataclass(frozen=True)
class ContainmentReport:
    shift_dim: int
    unitary_dim: int
    hs_vj_in_hs_v: dict
    hu_v_in_hu_vj: dict
    holds: bool


def wold_part_containments(pair: GradedPair, tol: TolerancePolicy | None = None) -> ContainmentReport:
    """Check H_s(V_j) inside H_s(V) and H_u(V) inside H_u(V_j) on a split model.

    H_s(V) is the graded summand and H_u(V) the declared unitary summand.
    H_s(V_j) is approximated by span{V_j^m W_j} over the exact band and
    H_u(V_j) by the range of V_j^m on the interior band, m up to the
    interior degree.
    """
    tol = tol or pair.tol
    q = np.diag(pair.unitary_mask.astype(float)).astype(complex)
    interior = pair.interior
    hs, hu = {}, {}
    for j in (1, 2):
        wj = pair.wandering(j, pair.exact_degree)
        vecs = [wj.basis]
        cur = wj.basis
        for _ in range(pair.exact_degree):
            cur = pair.op(j) @ cur
            cur = cur[:, np.abs(cur).sum(axis=0) > 0] if cur.size else cur
            vecs.append(cur)
        span = orthonormal_basis(np.hstack(vecs), tol, scale=1.0) if wj.dim else Subspace.zero(pair.ambient_dim)
        hs[f"V{j}"] = opnorm(q @ span.basis) if span.dim else 0.0

        worst = 0.0
        power = np.eye(pair.ambient_dim, dtype=complex)
        for _ in range(max(pair.interior_degree, 1)):
            power = pair.op(j) @ power
            rng = orthonormal_basis(power[:, interior], tol, scale=1.0)
            worst = max(worst, opnorm(q - projector(rng) @ q))
        hu[f"V{j}"] = worst
    holds = all(v <= tol.eq_tol * 100 for v in (*hs.values(), *hu.values()))
    return ContainmentReport(int((~pair.unitary_mask).sum()), int(pair.unitary_mask.sum()),
                             hs, hu, holds)
