import json

import numpy as np
import pytest

from isopair.errors import SchemaError
from isopair.serialize import (
    atomic_write,
    decode_graded_vector,
    decode_matrix,
    decode_poly_symbol,
    dumps,
    parse_pair_spec,
)


def test_complex_and_rounding():
    doc = json.loads(dumps({"z": 1 / 3 + 2j, "m": np.array([[1.0, -0.0]]), "flag": np.bool_(True)}))
    assert doc == {"z": [0.333333333333, 2.0], "m": [[1.0, 0.0]], "flag": True}


def test_output_is_key_sorted():
    assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


def test_decode_matrix_mixed_entries():
    m = decode_matrix([[1, [0, 1]], [[2, -1], 0.5]], 2)
    assert np.allclose(m, [[1, 1j], [2 - 1j, 0.5]])
    with pytest.raises(SchemaError):
        decode_matrix([[1, 2]], 2)
    with pytest.raises(SchemaError):
        decode_matrix([[True]])


def test_graded_vector_and_symbol():
    v = decode_graded_vector({"dim": 2, "coeffs": [[1, 0], [0, [0, 1]]]})
    assert v.degree == 1 and v.block(1)[1] == 1j
    phi = decode_poly_symbol({"dim": 1, "matrices": [[[0]], [[1]]]})
    assert phi(0.5)[0, 0] == 0.5


def test_pair_spec_sniffing():
    assert parse_pair_spec({"dim": 1, "U": [[1]], "P": [[0]]}).kind == "bcl"
    gens = {"generators": [{"terms": [{"a": 1, "b": 0, "c": [1, 0]}]}], "degree": 8, "guard": 3}
    assert parse_pair_spec(gens).kind == "bidisc"
    nested = {"kind": "direct-sum", "payload": {"parts": [{"kind": "bcl", "payload": {"dim": 1, "U": [[1]], "P": [[1]]}}]}}
    assert parse_pair_spec(nested).payload[0].kind == "bcl"
    for bad in ([], {"kind": "weird", "payload": {}}, {"x": 1}, {"kind": "bcl", "payload": {"dim": 2, "U": [[1]], "P": [[1]]}}):
        with pytest.raises(SchemaError):
            parse_pair_spec(bad)


def test_atomic_write(tmp_path):
    target = tmp_path / "sub" / "out.json"
    atomic_write(target, "{}\n")
    assert target.read_text() == "{}\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.json"]
