import numpy as np
from hypothesis import given, settings, strategies as st

from isopair.bcl import build_multipliers, random_bcl_data, random_unitary
from isopair.equivalence import (
    InvariantTuple,
    Verdict,
    first_distinguishing_word,
    invariant_tuple,
    joint_intertwiners,
    pair_equivalence,
    simultaneous_unitary_equiv,
    word_traces,
)
from isopair.linalg import opnorm

from helpers import DIAG, SWAP


def test_length_one_words_are_traces():
    rng = np.random.default_rng(0)
    c1, c2 = rng.standard_normal((2, 3, 3)) + 1j * rng.standard_normal((2, 3, 3))
    t = InvariantTuple(c1, c2)
    assert np.allclose(word_traces(t, 1), [np.trace(c1), np.trace(c2), np.conj(np.trace(c1)), np.conj(np.trace(c2))])
    # word "1 2" is index 1 in base-4 order of length-2 words
    assert np.isclose(word_traces(t, 2)[1], np.trace(c1 @ c2))


def test_swap_and_diag_are_distinguished():
    a = invariant_tuple(build_multipliers(SWAP))
    b = invariant_tuple(build_multipliers(DIAG))
    word, gap = first_distinguishing_word(a, b, 6, 1e-6)
    assert word is not None and gap > 0.1


def test_identical_tuples_admit_identity_intertwiner():
    t = InvariantTuple(np.diag([1.0, 2.0]), np.diag([3.0, 3.0]))
    basis = joint_intertwiners(t, t)
    assert basis.shape[0] == 2  # diagonal matrices commute with both


def test_dimension_mismatch_is_false():
    a = InvariantTuple(np.eye(1), np.eye(1))
    b = InvariantTuple(np.eye(2), np.eye(2))
    assert simultaneous_unitary_equiv(a, b).verdict is Verdict.FALSE


def test_no_positive_verdict_without_words_or_witness():
    a = invariant_tuple(build_multipliers(SWAP))
    b = invariant_tuple(build_multipliers(DIAG))
    res = simultaneous_unitary_equiv(a, b, max_word_length=0)
    assert res.verdict is not Verdict.TRUE


@settings(max_examples=25, deadline=None)
@given(dim=st.integers(1, 4), data=st.data(), seed=st.integers(0, 2**32 - 1))
def test_conjugate_is_equivalent_with_verified_witness(dim, data, seed):
    rng = np.random.default_rng(seed)
    d = random_bcl_data(dim, data.draw(st.integers(0, dim)), rng)
    z = random_unitary(dim, rng)
    a, b = invariant_tuple(build_multipliers(d)), invariant_tuple(build_multipliers(d.conjugate(z)))
    res = simultaneous_unitary_equiv(a, b)
    assert res.verdict is Verdict.TRUE
    u = res.witness
    assert opnorm(u @ u.conj().T - np.eye(dim)) < 1e-8
    assert opnorm(u @ a.C1 @ u.conj().T - b.C1) < 1e-6
    assert opnorm(u @ a.C2 @ u.conj().T - b.C2) < 1e-6


def test_both_routes_agree():
    res = pair_equivalence(build_multipliers(SWAP), build_multipliers(DIAG))
    assert res.coefficient_route.verdict is res.up_route.verdict is Verdict.FALSE
    assert res.to_dict()["verdict"] == "false"
