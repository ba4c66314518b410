import json

import numpy as np
import pytest

from isopair import cli
from isopair.errors import ConsistencyError

SWAP = {"kind": "bcl", "payload": {"dim": 2, "U": [[0, 1], [1, 0]], "P": [[1, 0], [0, 0]]}}
DIAG = {"dim": 2, "U": [[1, 0], [0, 1]], "P": [[1, 0], [0, 0]]}
TRIVIAL = {"dim": 1, "U": [[1]], "P": [[0]]}
IDEAL = {"generators": [{"terms": [{"a": 1, "b": 0, "c": [1, 0]}]}, {"terms": [{"a": 0, "b": 1, "c": [1, 0]}]}],
         "degree": 10, "guard": 3}
UNITARIES = {"kind": "matrix-unitary", "payload": {"U1": [[1, 0], [0, -1]], "U2": [[[0, 1], 0], [0, 1]]}}


@pytest.fixture
def write(tmp_path):
    def _write(name, doc):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)
    return _write


def run(argv, tmp_path):
    out = tmp_path / "report.json"
    code = cli.main([*argv, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_analyze_swap(write, tmp_path):
    code, rep = run(["analyze", write("swap.json", SWAP)], tmp_path)
    assert code == 0
    assert not any(rep["defect"]["verdicts"].values())
    nonzero = sorted(x for x in rep["defect"]["spectrum"] if abs(x) > 1e-9)
    assert nonzero == pytest.approx([-1, 1])
    assert rep["config"]["tolerance"]["approx_tol"] == 1e-6


def test_analyze_trivial(write, tmp_path):
    code, rep = run(["analyze", write("t.json", TRIVIAL)], tmp_path)
    assert code == 0
    assert all(rep["defect"]["verdicts"].values())
    assert all(abs(x) < 1e-12 for x in rep["defect"]["spectrum"])


def test_analyze_bidisc_ideal(write, tmp_path):
    code, rep = run(["analyze", write("ideal.json", IDEAL), "--degree", "10"], tmp_path)
    assert code == 0
    assert rep["defect"]["verdicts"]["doubly_commuting"] is False
    assert min(rep["defect"]["spectrum"]) <= -0.1


def test_analyze_unitary_pair(write, tmp_path):
    code, rep = run(["analyze", write("u.json", UNITARIES)], tmp_path)
    assert code == 0 and rep["consistent"]


def test_compare_verdicts(write, tmp_path):
    swap, diag = write("swap.json", SWAP), write("diag.json", DIAG)
    code, rep = run(["compare", swap, swap], tmp_path)
    assert code == 0 and rep["verdict"] == "true"
    code, rep = run(["compare", swap, diag], tmp_path)
    assert code == 0 and rep["verdict"] == "false"
    assert rep["coefficient_route"]["distinguishing_word"]


def test_compare_conjugated_instance(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["construct", "--dim", "3", "--rank", "1", "--seed", "5", "--out", str(a)]) == 0
    doc = json.loads(a.read_text())
    u = np.array([[complex(*x) for x in row] for row in doc["payload"]["U"]])
    p = np.array([[complex(*x) for x in row] for row in doc["payload"]["P"]])
    z = np.linalg.qr(np.random.default_rng(0).standard_normal((3, 3)))[0]
    enc = lambda m: [[[x.real, x.imag] for x in row] for row in m]
    b.write_text(json.dumps({"dim": 3, "U": enc(z @ u @ z.T), "P": enc(z @ p @ z.T)}))
    code, rep = run(["compare", str(a), str(b)], tmp_path)
    assert code == 0 and rep["verdict"] == "true"


def test_compare_rejects_bidisc(write, tmp_path):
    assert cli.main(["compare", write("s.json", SWAP), write("i.json", IDEAL)]) == 2


def test_schema_errors_exit_2(write, tmp_path):
    assert cli.main(["validate", write("bad.json", "{not json")]) == 2
    assert cli.main(["validate", str(tmp_path / "missing.json")]) == 2
    bad_u = {"dim": 2, "U": [[1, 1], [0, 1]], "P": [[1, 0], [0, 0]]}
    assert cli.main(["analyze", write("u.json", bad_u)]) == 2
    assert cli.main(["validate", write("p.json", {"kind": "matrix-unitary",
                                                  "payload": {"U1": [[0, 1], [1, 0]], "U2": [[1, 0], [0, -1]]}})]) == 2


def test_consistency_failure_exit_1(write, tmp_path, monkeypatch):
    def broken(*args, **kwargs):
        raise ConsistencyError("forced", {"nonneg": True}, {})
    monkeypatch.setattr(cli, "analyze", broken)
    code, rep = run(["analyze", write("swap.json", SWAP)], tmp_path)
    assert code == 1 and rep["consistent"] is False and rep["error"]["type"] == "ConsistencyError"


def test_reports_are_byte_identical(write, tmp_path):
    spec = write("swap.json", SWAP)
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        cli.main(["analyze", spec, "--out", str(path), "--seed", "3"])
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_construct_is_seeded(tmp_path, capsys):
    cli.main(["construct", "--dim", "4", "--seed", "9"])
    first = capsys.readouterr().out
    cli.main(["construct", "--dim", "4", "--seed", "9"])
    assert capsys.readouterr().out == first
    cli.main(["construct", "--dim", "4", "--seed", "10"])
    assert capsys.readouterr().out != first
    doc = json.loads(first)
    assert doc["config"]["rank"] == 2 and doc["kind"] == "bcl"


def test_env_overrides_default_tolerance(write, tmp_path, monkeypatch):
    monkeypatch.setenv("ISOPAIR_TOL", "1e-5")
    code, rep = run(["validate", write("swap.json", SWAP)], tmp_path)
    assert rep["config"]["tolerance"]["approx_tol"] == 1e-5
    code, rep = run(["validate", write("swap.json", SWAP), "--tol", "1e-7"], tmp_path)
    assert rep["config"]["tolerance"]["approx_tol"] == 1e-7
