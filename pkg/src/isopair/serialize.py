"""JSON encoding of matrices, symbols and pair specifications.

Complex numbers are written as ``[re, im]`` and matrices as row-major nested
lists. Floats are rounded to 12 significant digits and keys are sorted, so
equal inputs give byte-identical documents.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
import tempfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from .errors import SchemaError
from .hardy import GradedVector, PolySymbol

__all__ = [
    "PairSpec",
    "PAIR_KINDS",
    "to_jsonable",
    "dumps",
    "atomic_write",
    "load_json",
    "decode_matrix",
    "encode_matrix",
    "decode_graded_vector",
    "decode_poly_symbol",
    "parse_pair_spec",
]

SIGNIFICANT_DIGITS = 12
PAIR_KINDS = ("bcl", "bidisc", "matrix-unitary", "direct-sum")


def _round(x: float) -> float:
    if x == 0 or not math.isfinite(x):
        return 0.0 if x == 0 else x
    out = float(f"{x:.{SIGNIFICANT_DIGITS}g}")
    return 0.0 if out == 0 else out  # drop the sign of negative zero


def _complex(z: complex) -> list[float]:
    return [_round(z.real), _round(z.imag)]


def to_jsonable(obj: Any) -> Any:
    """Convert numpy data, dataclasses and enums into plain JSON values."""
    if hasattr(obj, "to_dict") and callable(obj.to_dict):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _complex(complex(obj))
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(obj.tolist())
        if obj.dtype == bool:
            return obj.tolist()
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if dataclasses.is_dataclass(obj):
        return to_jsonable(dataclasses.asdict(obj))
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def atomic_write(path, text: str) -> None:
    """Write through a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_json(path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc


# decoding -----------------------------------------------------------------

def _scalar(x) -> complex:
    if isinstance(x, bool):
        raise SchemaError("booleans are not numbers")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) and not isinstance(t, bool)
                                                   for t in x):
        return complex(x[0], x[1])
    raise SchemaError(f"expected a number or [re, im], got {x!r}")


def decode_matrix(doc, rows: int | None = None, name: str = "matrix") -> np.ndarray:
    if not isinstance(doc, list) or not all(isinstance(r, list) for r in doc):
        raise SchemaError(f"{name}: expected a list of rows")
    out = np.array([[_scalar(x) for x in row] for row in doc], dtype=complex)
    if out.ndim != 2 and not (out.size == 0):
        raise SchemaError(f"{name}: ragged rows")
    if out.size == 0:
        out = out.reshape(len(doc), 0)
    if rows is not None and out.shape != (rows, rows):
        raise SchemaError(f"{name}: expected shape ({rows}, {rows}), got {out.shape}")
    if not np.all(np.isfinite(out)):
        raise SchemaError(f"{name}: non-finite entries")
    return out


def encode_matrix(m) -> list:
    return to_jsonable(np.asarray(m, dtype=complex))


def _dim(doc: dict) -> int:
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise SchemaError(f"'dim' must be a non-negative integer, got {dim!r}")
    return dim


def decode_graded_vector(doc: dict) -> GradedVector:
    if not isinstance(doc, dict) or "coeffs" not in doc:
        raise SchemaError("graded vector needs 'dim' and 'coeffs'")
    dim = _dim(doc)
    rows = doc["coeffs"]
    coeffs = decode_matrix(rows, name="coeffs") if rows else np.zeros((0, dim), complex)
    if coeffs.shape[1] != dim and coeffs.shape[0]:
        raise SchemaError(f"coefficient blocks have length {coeffs.shape[1]}, dim is {dim}")
    return GradedVector(dim, coeffs)


def decode_poly_symbol(doc: dict) -> PolySymbol:
    if not isinstance(doc, dict) or "matrices" not in doc:
        raise SchemaError("symbol needs 'dim' and 'matrices'")
    dim = _dim(doc)
    mats = [decode_matrix(m, dim, f"matrices[{k}]") for k, m in enumerate(doc["matrices"])]
    if not mats:
        raise SchemaError("symbol needs at least one coefficient")
    return PolySymbol(dim, np.stack(mats))


@dataclass(frozen=True)
class PairSpec:
    """A pair description: ``kind`` plus the kind-specific payload."""

    kind: str
    payload: Any

    def to_dict(self) -> dict:
        if self.kind == "direct-sum":
            return {"kind": self.kind, "payload": {"parts": [p.to_dict() for p in self.payload]}}
        return {"kind": self.kind, "payload": self.payload}


def parse_pair_spec(doc) -> PairSpec:
    """Accept a ``{"kind", "payload"}`` document, a bare (U, P) document or a generator file."""
    if not isinstance(doc, dict):
        raise SchemaError("top-level JSON value must be an object")
    if "kind" in doc:
        kind = doc["kind"]
        if kind not in PAIR_KINDS:
            raise SchemaError(f"unknown kind {kind!r}; expected one of {PAIR_KINDS}")
        payload = doc.get("payload")
        if not isinstance(payload, dict):
            raise SchemaError("'payload' must be an object")
    elif {"U", "P"} <= doc.keys():
        kind, payload = "bcl", doc
    elif "generators" in doc:
        kind, payload = "bidisc", doc
    else:
        raise SchemaError("cannot tell what kind of pair this document describes")

    if kind == "bcl":
        dim = _dim(payload)
        decode_matrix(payload.get("U"), dim, "U")
        decode_matrix(payload.get("P"), dim, "P")
    elif kind == "bidisc":
        from .bidisc import parse_generator_file
        parse_generator_file(payload)
    elif kind == "matrix-unitary":
        u1 = decode_matrix(payload.get("U1"), name="U1")
        decode_matrix(payload.get("U2"), u1.shape[0], "U2")
    else:
        parts = payload.get("parts")
        if not isinstance(parts, list) or not parts:
            raise SchemaError("direct-sum payload needs a nonempty 'parts' list")
        return PairSpec(kind, tuple(parse_pair_spec(p) for p in parts))
    return PairSpec(kind, payload)
