"""Restrictions of (M_z1, M_z2) to invariant subspaces of the bidisc Hardy space.

Monomials ``z1^a z2^b`` are orthonormal. A subspace S generated by finitely
many polynomials is approximated by ``S_N``, the span of all monomial
multiples of the generators of total degree at most N, orthonormalized
degree by degree so that ``S_K`` is a prefix of the basis of ``S_N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np

from .errors import ConvergenceError, SchemaError, TruncationError
from .linalg import DEFAULT_TOL, TolerancePolicy, opnorm, orthonormal_basis
from .pairs import GradedPair, Purity

__all__ = [
    "BivariatePoly",
    "TruncatedSubspace",
    "ProjectionResult",
    "SignatureVerdict",
    "DEFAULT_GUARD",
    "monomials",
    "span_to_degree",
    "project_onto_S",
    "restricted_pair",
    "signature_check",
]

DEFAULT_GUARD = 3


@dataclass(frozen=True, eq=False)
class BivariatePoly:
    """Finitely supported map ``(a, b) -> coefficient of z1^a z2^b``."""

    terms: Mapping[tuple[int, int], complex]

    def __post_init__(self):
        clean = {}
        for (a, b), c in dict(self.terms).items():
            if a < 0 or b < 0:
                raise ValueError(f"negative exponent ({a}, {b})")
            c = complex(c)
            if not np.isfinite(c):
                raise ValueError("non-finite coefficient")
            if c != 0:
                clean[(int(a), int(b))] = clean.get((int(a), int(b)), 0) + c
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v != 0})

    @classmethod
    def monomial(cls, a: int, b: int, c: complex = 1.0) -> "BivariatePoly":
        return cls({(a, b): c})

    @property
    def degree(self) -> int:
        return max((a + b for a, b in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def times_monomial(self, a: int, b: int) -> "BivariatePoly":
        return BivariatePoly({(x + a, y + b): c for (x, y), c in self.terms.items()})

    def vector(self, index: dict) -> np.ndarray:
        v = np.zeros(len(index), complex)
        for key, c in self.terms.items():
            v[index[key]] = c
        return v

    @classmethod
    def from_vector(cls, v, mons, tol: float = 0.0) -> "BivariatePoly":
        return cls({m: c for m, c in zip(mons, v) if abs(c) > tol})


def monomials(degree: int) -> list[tuple[int, int]]:
    """Monomials of total degree <= ``degree`` ordered by degree, then by z2-power."""
    return [(d - b, b) for d in range(degree + 1) for b in range(d + 1)]


@dataclass(frozen=True, eq=False)
class TruncatedSubspace:
    generators: tuple[BivariatePoly, ...]
    degree: int
    guard: int
    basis: np.ndarray          # monomial coordinates (len(monomials(degree)) x dim)
    labels: np.ndarray         # degree band of each basis vector
    tol: TolerancePolicy = DEFAULT_TOL

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def trusted_degree(self) -> int:
        return self.degree - self.guard

    @cached_property
    def mons(self) -> list[tuple[int, int]]:
        return monomials(self.degree)

    @cached_property
    def index(self) -> dict:
        return {m: i for i, m in enumerate(self.mons)}

    def band_dims(self) -> list[int]:
        return [int(np.sum(self.labels == d)) for d in range(self.degree + 1)]

    def projector_coords(self, v) -> np.ndarray:
        """Coordinates in the basis of S_N of the projection of ``v``."""
        return self.basis.conj().T @ v


def span_to_degree(generators, degree: int, guard: int = DEFAULT_GUARD,
                   tol: TolerancePolicy = DEFAULT_TOL) -> TruncatedSubspace:
    """Graded orthonormal basis of span{z1^a z2^b g : deg <= degree}."""
    gens = tuple(g if isinstance(g, BivariatePoly) else BivariatePoly(g) for g in generators)
    if not gens or all(g.is_zero() for g in gens):
        raise ValueError("need at least one nonzero generator")
    mons = monomials(degree)
    index = {m: i for i, m in enumerate(mons)}
    by_degree: dict[int, list[np.ndarray]] = {}
    for g in gens:
        if g.is_zero():
            continue
        for d in range(g.degree, degree + 1):
            for (a, b) in monomials(d - g.degree)[-(d - g.degree + 1):]:
                by_degree.setdefault(d, []).append(g.times_monomial(a, b).vector(index))
    labels: list[int] = []
    current = np.zeros((len(mons), 0), complex)
    for d in range(degree + 1):
        cands = by_degree.get(d)
        if not cands:
            continue
        block = np.array(cands).T
        # two passes of projection keep the basis orthonormal to rounding
        for _ in range(2):
            block = block - current @ (current.conj().T @ block)
        new = orthonormal_basis(block, tol, scale=1.0)
        if new.dim:
            current = np.hstack([current, new.basis])
            labels.extend([d] * new.dim)
    return TruncatedSubspace(gens, degree, guard, current, np.array(labels, dtype=int), tol)


@dataclass(frozen=True)
class ProjectionResult:
    coords: np.ndarray
    poly: BivariatePoly
    stabilized_degree: int
    history: list


def project_onto_S(f: BivariatePoly, generators, degree: int, guard: int = DEFAULT_GUARD,
                   limit: int | None = None, tol: TolerancePolicy = DEFAULT_TOL) -> ProjectionResult:
    """Project ``f`` onto S, escalating the truncation degree by two until stable."""
    if f.degree > degree - guard:
        raise TruncationError(f"deg f = {f.degree} exceeds trusted degree {degree - guard}")
    limit = degree + 8 if limit is None else limit
    prev = None
    history = []
    n = degree
    while n <= limit:
        s = span_to_degree(generators, n, guard, tol)
        v = f.vector(s.index) if f.degree >= 0 else np.zeros(len(s.mons), complex)
        proj = s.basis @ s.projector_coords(v)
        if prev is not None:
            padded = np.zeros_like(proj)
            padded[: prev.size] = prev
            delta = float(np.linalg.norm(proj - padded))
            history.append((n, delta))
            if delta < tol.approx_tol:
                return ProjectionResult(s.projector_coords(v), BivariatePoly.from_vector(proj, s.mons, 1e-14),
                                        n, history)
        prev = proj
        n += 2
    raise ConvergenceError(f"projection did not stabilize by degree {limit}", history)


def _shift_matrix(mons_from, index_to, axis: int) -> np.ndarray:
    out = np.zeros((len(index_to), len(mons_from)))
    for k, (a, b) in enumerate(mons_from):
        tgt = (a + 1, b) if axis == 1 else (a, b + 1)
        if tgt in index_to:
            out[index_to[tgt], k] = 1.0
    return out


def restricted_pair(s: TruncatedSubspace, limit: int | None = None) -> GradedPair:
    """(M_z1|_S, M_z2|_S) on the basis of S_N, trusted up to degree N - guard.

    Forward maps are exact on basis vectors of degree <= N - 1. Adjoints are
    compressions ``P_{S_N} M_{z_j}^*``; their action on the trusted band is
    compared against S_{N+2} (and further, up to ``limit``) and the model is
    rebuilt at the first stable degree.
    """
    limit = s.degree + 8 if limit is None else limit
    pair = _compressed_pair(s)
    history = []
    cur = s
    while True:
        bigger = span_to_degree(s.generators, cur.degree + 2, s.guard, s.tol)
        other = _compressed_pair(bigger)
        k = cur.dim
        trusted = np.nonzero(cur.labels <= s.degree - s.guard)[0]
        delta = 0.0
        for i in (1, 2):
            a = pair.adj(i)[:, trusted]
            b = other.adj(i)[:, trusted]
            pad = np.zeros_like(b)
            pad[:k] = a
            delta = max(delta, opnorm(b - pad))
        history.append((cur.degree, delta))
        if delta < s.tol.approx_tol:
            break
        if bigger.degree > limit:
            raise ConvergenceError(f"adjoint compression did not stabilize by degree {limit}", history)
        cur, pair = bigger, other
    trusted_degree = s.degree - s.guard
    if trusted_degree < 0:
        raise TruncationError("guard exceeds truncation degree")
    return GradedPair(pair.v1, pair.v2, pair.v1_adj, pair.v2_adj, pair.degrees,
                      cur.degree - 1, trusted_degree, Purity(True, True, True),
                      label="bidisc", tol=s.tol,
                      meta={"model": "bidisc", "degree": s.degree, "guard": s.guard,
                            "model_degree": cur.degree, "stabilization": history})


def _compressed_pair(s: TruncatedSubspace) -> GradedPair:
    up = monomials(s.degree + 1)
    index_up = {m: i for i, m in enumerate(up)}
    lift = np.zeros((len(up), len(s.mons)))
    for k, m in enumerate(s.mons):
        lift[index_up[m], k] = 1.0
    b = s.basis
    mats = []
    for axis in (1, 2):
        shifted = _shift_matrix(s.mons, index_up, axis) @ b
        mats.append((lift @ b).conj().T @ shifted)
    m1, m2 = mats
    exact = max(s.degree - 1, 0)
    return GradedPair(m1, m2, m1.conj().T, m2.conj().T, s.labels, exact, exact,
                      Purity(True, True, True), label="bidisc", tol=s.tol)


@dataclass(frozen=True)
class SignatureVerdict:
    applicable: bool
    passed: bool
    defect_rank: int
    defect_is_projection: bool
    wandering_band_dims: list
    reference_band_dims: list
    offset: int | None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def signature_check(s: TruncatedSubspace, report=None) -> SignatureVerdict:
    """Compare structural signatures with the full bidisc pair when doubly commuting.

    The defect must be a rank-one projection and the per-degree dimensions of
    the wandering subspace of the product must match those of H^2(D^2)
    (1, 2, 2, ...) after a shift in degree.
    """
    from .defect import doubly_commuting_verdicts

    pair = restricted_pair(s)
    rep = report if report is not None else doubly_commuting_verdicts(pair, strict=False)
    band = pair.tol.approx_tol
    rank = int(np.sum(np.abs(rep.spectrum) > band))
    is_proj = bool(rep.verdicts["projection"])
    w = pair.wandering(0, pair.interior_degree)
    dims = [int(round(np.sum(np.abs(w.basis[pair.degrees == d]) ** 2)))
            for d in range(pair.interior_degree + 1)]
    start = next((d for d, x in enumerate(dims) if x), None)
    ref = [1] + [2] * max(len(dims) - 1, 0)
    if not rep.verdicts["doubly_commuting"]:
        return SignatureVerdict(False, False, rank, is_proj, dims, ref, start)
    ok = start is not None and rank == 1 and is_proj and dims[start:] == ref[: len(dims) - start]
    return SignatureVerdict(True, bool(ok), rank, is_proj, dims, ref, start)


def parse_generator_file(doc: dict) -> tuple[list[BivariatePoly], int, int]:
    """Read ``{"generators": [{"terms": [{"a", "b", "c": [re, im]}]}], "degree", "guard"}``."""
    try:
        gens = []
        for g in doc["generators"]:
            terms = {}
            for t in g["terms"]:
                re, im = t["c"]
                key = (int(t["a"]), int(t["b"]))
                terms[key] = terms.get(key, 0) + complex(float(re), float(im))
            gens.append(BivariatePoly(terms))
        degree = int(doc.get("degree", 12))
        guard = int(doc.get("guard", DEFAULT_GUARD))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad generator file: {exc!r}") from exc
    if not gens or all(g.is_zero() for g in gens):
        raise SchemaError("generator file has no nonzero generator")
    return gens, degree, guard


def generator_file(generators, degree: int, guard: int = DEFAULT_GUARD) -> dict:
    return {
        "generators": [
            {"terms": [{"a": a, "b": b, "c": [c.real, c.imag]}
                       for (a, b), c in sorted(g.terms.items())]}
            for g in generators
        ],
        "degree": degree,
        "guard": guard,
    }
