"""Joint unitary equivalence of pure pairs.

Two tuples of matrices are compared first through traces of words in the
matrices and their adjoints (a necessary condition), then by constructing a
unitary witness from the space of joint intertwiners. A positive verdict is
only returned together with a verified witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import polar

from .bcl import BCLPair, wandering_coefficients, wandering_data_of_pair
from .errors import RouteDisagreement
from .linalg import DEFAULT_TOL, TolerancePolicy, kernel, opnorm, operator_class, projector

__all__ = [
    "Verdict",
    "InvariantTuple",
    "EquivalenceResult",
    "PairEquivalence",
    "word_traces",
    "first_distinguishing_word",
    "joint_intertwiners",
    "simultaneous_unitary_equiv",
    "invariant_tuple",
    "up_tuple",
    "pair_equivalence",
    "MAX_WORD_LENGTH",
]

# Traces of all 4^L words are enumerated; L = 6 is 5460 words per tuple.
MAX_WORD_LENGTH = 6


class Verdict(str, Enum):
    TRUE = "true"
    FALSE = "false"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True, eq=False)
class InvariantTuple:
    C1: np.ndarray
    C2: np.ndarray

    def __post_init__(self):
        c1 = np.asarray(self.C1, dtype=complex)
        c2 = np.asarray(self.C2, dtype=complex)
        if c1.shape != c2.shape or c1.ndim != 2 or c1.shape[0] != c1.shape[1]:
            raise ValueError(f"need two square matrices of equal size, got {c1.shape}, {c2.shape}")
        object.__setattr__(self, "C1", c1)
        object.__setattr__(self, "C2", c2)

    @property
    def dim(self) -> int:
        return self.C1.shape[0]

    def letters(self) -> np.ndarray:
        """Stack (C1, C2, C1^H, C2^H), matching the alphabet order of words."""
        return np.stack([self.C1, self.C2, self.C1.conj().T, self.C2.conj().T])

    def conjugate(self, z) -> "InvariantTuple":
        z = np.asarray(z, dtype=complex)
        return InvariantTuple(z @ self.C1 @ z.conj().T, z @ self.C2 @ z.conj().T)


ALPHABET = ("1", "2", "1*", "2*")


def _word_name(index: int, length: int) -> str:
    digits = []
    for _ in range(length):
        digits.append(ALPHABET[index % 4])
        index //= 4
    return " ".join(reversed(digits))


def word_traces(t: InvariantTuple, length: int) -> np.ndarray:
    """Traces of all words of exactly ``length`` letters, in base-4 order."""
    letters = t.letters()
    prods = letters
    for _ in range(length - 1):
        prods = np.einsum("wij,ljk->wlik", prods, letters).reshape(-1, t.dim, t.dim)
    return np.einsum("wii->w", prods)


def first_distinguishing_word(a: InvariantTuple, b: InvariantTuple, max_length: int,
                              tol: float) -> tuple[str | None, float]:
    """Shortest word whose traces differ beyond ``tol * (1 + max |trace|)``.

    Returns the word (letters separated by spaces) or None, and the largest
    relative gap seen.
    """
    worst = 0.0
    for length in range(1, max_length + 1):
        ta, tb = word_traces(a, length), word_traces(b, length)
        scale = 1.0 + max(np.abs(ta).max(), np.abs(tb).max())
        gaps = np.abs(ta - tb) / scale
        worst = max(worst, float(gaps.max()))
        bad = np.nonzero(gaps > tol)[0]
        if bad.size:
            return _word_name(int(bad[0]), length), worst
    return None, worst


def joint_intertwiners(a: InvariantTuple, b: InvariantTuple,
                       tol: TolerancePolicy = DEFAULT_TOL) -> np.ndarray:
    """Basis of {Z : Z X = Y Z for each letter pair (X of a, Y of b)}.

    Returned as an array of shape (k, n, n).
    """
    n = a.dim
    eye = np.eye(n)
    rows = []
    for x, y in zip(a.letters(), b.letters()):
        # column-major vec: vec(Z X) = (X^T kron I) vec Z, vec(Y Z) = (I kron Y) vec Z
        rows.append(np.kron(x.T, eye) - np.kron(eye, y))
    ker = kernel(np.vstack(rows), TolerancePolicy(eq_tol=max(tol.eq_tol, 1e-10) * 100,
                                                  approx_tol=tol.approx_tol))
    return np.array([v.reshape(n, n, order="F") for v in ker.basis.T])


@dataclass
class EquivalenceResult:
    verdict: Verdict
    witness: np.ndarray | None = None
    word: str | None = None
    residual: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict.value, "distinguishing_word": self.word,
               "residual": self.residual, "diagnostics": self.diagnostics}
        out["witness"] = None if self.witness is None else self.witness
        return out


def simultaneous_unitary_equiv(a: InvariantTuple, b: InvariantTuple,
                               tol: TolerancePolicy = DEFAULT_TOL,
                               max_word_length: int | None = None,
                               seed: int = 0, attempts: int = 3) -> EquivalenceResult:
    """Decide whether a unitary Z with Z C_j Z^H = C~_j exists.

    Word traces up to ``min(2 n^2, max_word_length)`` letters are compared
    first. If they agree, random elements of the joint intertwiner space are
    polar-decomposed and the unitary factor is verified.
    """
    if a.dim != b.dim:
        return EquivalenceResult(Verdict.FALSE, diagnostics={"reason": "dimension mismatch",
                                                             "dims": [a.dim, b.dim]})
    n = a.dim
    if n == 0:
        return EquivalenceResult(Verdict.TRUE, witness=np.zeros((0, 0), complex), residual=0.0)
    cap = MAX_WORD_LENGTH if max_word_length is None else max_word_length
    length = min(2 * n * n, cap)
    word, gap = first_distinguishing_word(a, b, length, tol.approx_tol)
    diag = {"word_length_checked": length, "max_trace_gap": gap}
    if word is not None:
        return EquivalenceResult(Verdict.FALSE, word=word, diagnostics=diag)

    basis = joint_intertwiners(a, b, tol)
    diag["intertwiner_dim"] = int(basis.shape[0])
    if basis.shape[0] == 0:
        diag["reason"] = "no nonzero joint intertwiner"
        return EquivalenceResult(Verdict.UNDETERMINED, diagnostics=diag)
    rng = np.random.default_rng(seed)
    best = None
    for attempt in range(attempts):
        coef = rng.standard_normal(basis.shape[0]) + 1j * rng.standard_normal(basis.shape[0])
        z = np.tensordot(coef, basis, axes=1)
        if np.linalg.svd(z, compute_uv=False)[-1] < tol.approx_tol * opnorm(z):
            continue
        u, _ = polar(z)
        res = max(opnorm(u @ x - y @ u) for x, y in zip(a.letters(), b.letters()))
        if best is None or res < best[1]:
            best = (u, res)
        if res <= tol.approx_tol and operator_class(u, TolerancePolicy(tol.approx_tol, tol.approx_tol)).unitary:
            diag["attempts_used"] = attempt + 1
            return EquivalenceResult(Verdict.TRUE, witness=u, residual=res, diagnostics=diag)
    diag["reason"] = "trace test passed but no unitary witness verified"
    if best is not None:
        diag["best_residual"] = best[1]
    return EquivalenceResult(Verdict.UNDETERMINED, diagnostics=diag)


def invariant_tuple(pair: BCLPair, tol: TolerancePolicy = DEFAULT_TOL) -> InvariantTuple:
    """(V1|_{W2}, V2^*|_{V2 W1}) as operators on W, i.e. the coefficients of Phi1."""
    wd = wandering_data_of_pair(pair, tol)
    co = wandering_coefficients(wd, pair, tol)
    return InvariantTuple(co.A, co.B)


def up_tuple(pair: BCLPair, tol: TolerancePolicy = DEFAULT_TOL) -> InvariantTuple:
    wd = wandering_data_of_pair(pair, tol)
    return InvariantTuple(wd.U, projector(wd.w2))


@dataclass
class PairEquivalence:
    verdict: Verdict
    coefficient_route: EquivalenceResult
    up_route: EquivalenceResult

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value,
                "coefficient_route": self.coefficient_route.to_dict(),
                "up_route": self.up_route.to_dict()}


def pair_equivalence(a: BCLPair, b: BCLPair, tol: TolerancePolicy = DEFAULT_TOL,
                     max_word_length: int | None = None) -> PairEquivalence:
    """Compare two pure pairs by both complete invariants and demand agreement."""
    a.check(tol)
    b.check(tol)
    coef = simultaneous_unitary_equiv(invariant_tuple(a, tol), invariant_tuple(b, tol), tol,
                                      max_word_length)
    up = simultaneous_unitary_equiv(up_tuple(a, tol), up_tuple(b, tol), tol, max_word_length)
    decided = {coef.verdict, up.verdict} - {Verdict.UNDETERMINED}
    if len(decided) > 1:
        raise RouteDisagreement("coefficient and (U, P) routes disagree", 1.0, 0.0)
    verdict = decided.pop() if decided else Verdict.UNDETERMINED
    return PairEquivalence(verdict, coef, up)
