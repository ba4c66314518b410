import numpy as np
import pytest

from isopair.bidisc import (
    BivariatePoly,
    generator_file,
    monomials,
    parse_generator_file,
    project_onto_S,
    restricted_pair,
    signature_check,
    span_to_degree,
)
from isopair.errors import ConvergenceError, SchemaError, TruncationError

from helpers import BIDISC_FIXTURES


def test_monomial_order():
    assert monomials(2) == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_whole_space_basis_dimension():
    s = span_to_degree(BIDISC_FIXTURES["whole"], 6)
    assert s.dim == 28
    assert np.allclose(s.basis.conj().T @ s.basis, np.eye(28))


def test_graded_bands_of_z1_multiples():
    s = span_to_degree(BIDISC_FIXTURES["z1"], 6)
    assert s.band_dims() == [0, 1, 2, 3, 4, 5, 6]


def test_projection_onto_ideal():
    gens = BIDISC_FIXTURES["z1"]
    res = project_onto_S(BivariatePoly({(0, 0): 1, (1, 0): 2, (0, 1): 3}), gens, 8)
    assert res.poly.terms.keys() == {(1, 0)}
    assert res.poly.terms[(1, 0)] == pytest.approx(2)


def test_projection_guards_and_escalation_limit():
    with pytest.raises(TruncationError):
        project_onto_S(BivariatePoly.monomial(7, 0), BIDISC_FIXTURES["z1"], 8)
    with pytest.raises(ConvergenceError):
        project_onto_S(BivariatePoly.monomial(1, 0), BIDISC_FIXTURES["z1"], 8, limit=8)


def test_restricted_pair_commutes_and_pairs():
    pair = restricted_pair(span_to_degree(BIDISC_FIXTURES["z1,z2"], 8))
    assert pair.commutator_norm() < 1e-12
    assert pair.adjoint_pairing_error() < 1e-12
    assert pair.interior_degree == 5


@pytest.mark.parametrize("name,applicable,passed", [("whole", True, True), ("z1", True, True),
                                                    ("z1,z2", False, False)])
def test_signature_fixtures(name, applicable, passed):
    verdict = signature_check(span_to_degree(BIDISC_FIXTURES[name], 10))
    assert (verdict.applicable, verdict.passed) == (applicable, passed)


def test_generator_file_round_trip():
    gens = [BivariatePoly({(1, 0): 1, (0, 1): 0.5j})]
    back, degree, guard = parse_generator_file(generator_file(gens, 9, 2))
    assert back[0].terms == gens[0].terms and (degree, guard) == (9, 2)


def test_generator_file_errors():
    with pytest.raises(SchemaError):
        parse_generator_file({"generators": []})
    with pytest.raises(SchemaError):
        parse_generator_file({"generators": [{"terms": [{"a": 1}]}]})
