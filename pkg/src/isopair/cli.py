"""Command-line front end: validate, analyze, compare, construct.

Exit codes: 0 success, 1 a consistency check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__
from .analytic import bridge_identity_residual, characteristic_invariant, theta_Vj
from .bcl import (
    BCLData,
    bcl_graded_pair,
    build_multipliers,
    extract_bcl,
    random_bcl_data,
    wandering_coefficients,
    wandering_data_of_pair,
)
from .bidisc import parse_generator_file, restricted_pair, signature_check, span_to_degree
from .defect import doubly_commuting_verdicts
from .equivalence import pair_equivalence
from .errors import (
    ConsistencyError,
    ContainmentError,
    ConvergenceError,
    DirectSumError,
    InvalidBCLData,
    IsopairError,
    NonFiniteError,
    PurityError,
    RouteDisagreement,
    SchemaError,
    TruncationError,
)
from .linalg import TolerancePolicy, operator_class, opnorm
from .pairs import GradedPair
from .serialize import PairSpec, atomic_write, decode_matrix, dumps, encode_matrix, load_json, parse_pair_spec

EXIT_OK, EXIT_INCONSISTENT, EXIT_INPUT = 0, 1, 2
DEFAULT_DEGREE = 12
TOL_ENV = "ISOPAIR_TOL"

_CONSISTENCY_ERRORS = (ConsistencyError, RouteDisagreement, DirectSumError, ContainmentError,
                       ConvergenceError)


class InputError(Exception):
    """Input file is unreadable, malformed or unsuitable for the subcommand."""


def default_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return 1e-6
    try:
        return float(raw)
    except ValueError:
        raise SystemExit(f"{TOL_ENV}={raw!r} is not a number")


def tolerance(approx: float) -> TolerancePolicy:
    if not 0 < approx < 1:
        raise InputError(f"--tol must lie in (0, 1), got {approx}")
    return TolerancePolicy(eq_tol=min(1e-9, approx), approx_tol=approx)


def _load_spec(path) -> PairSpec:
    try:
        return parse_pair_spec(load_json(path))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except (IsopairError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _bcl_data(payload: dict, tol: TolerancePolicy) -> BCLData:
    dim = payload["dim"]
    try:
        return BCLData(decode_matrix(payload["U"], dim, "U"), decode_matrix(payload["P"], dim, "P")).validate(tol)
    except (IsopairError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _unitaries(payload: dict, tol: TolerancePolicy):
    u1 = decode_matrix(payload["U1"], name="U1")
    u2 = decode_matrix(payload["U2"], u1.shape[0], "U2")
    for name, u in (("U1", u1), ("U2", u2)):
        if not operator_class(u, tol).unitary:
            raise InputError(f"{name} is not unitary")
    if opnorm(u1 @ u2 - u2 @ u1) > tol.eq_tol:
        raise InputError("U1 and U2 do not commute")
    return u1, u2


def _bidisc_params(payload: dict, degree: int | None):
    gens, file_degree, guard = parse_generator_file(payload)
    return gens, (file_degree if degree is None else degree), guard


def build_model(spec: PairSpec, degree: int | None, tol: TolerancePolicy) -> GradedPair:
    """Truncated model for any pair kind; BCL models get two extra degrees of headroom."""
    n = DEFAULT_DEGREE if degree is None else degree
    if spec.kind == "bcl":
        return bcl_graded_pair(_bcl_data(spec.payload, tol), n + 2, tol)
    if spec.kind == "bidisc":
        gens, deg, guard = _bidisc_params(spec.payload, degree)
        if deg - guard < 1:
            raise InputError(f"degree {deg} leaves no trusted band with guard {guard}")
        return restricted_pair(span_to_degree(gens, deg, guard, tol))
    if spec.kind == "matrix-unitary":
        return GradedPair.from_unitaries(*_unitaries(spec.payload, tol), label="unitary", tol=tol)
    return GradedPair.direct_sum([build_model(p, degree, tol) for p in spec.payload], label="direct-sum")


def _series_summary(series, full: bool) -> dict:
    out = {"label": series.label, "shape": list(series.coeffs.shape),
           "coefficient_norms": series.coefficient_norms()}
    if full:
        out["coefficients"] = series.coeffs
    return out


def analyze(spec: PairSpec, degree: int | None, tol: TolerancePolicy) -> tuple[dict, bool]:
    n = DEFAULT_DEGREE if degree is None else degree
    report: dict = {"kind": spec.kind}
    checks: dict[str, bool] = {}
    if spec.kind == "bcl":
        data = _bcl_data(spec.payload, tol)
        pair = build_multipliers(data, tol)
        wd = wandering_data_of_pair(pair, tol)
        co = wandering_coefficients(wd, pair, tol)
        back = extract_bcl(pair, tol)
        round_trip = max(opnorm(back.U - data.U), opnorm(back.P - data.P))
        report["wandering"] = {"dims": wd.dims(), "direct_sum_residual": wd.residual}
        report["extraction"] = {"U": encode_matrix(back.U), "P": encode_matrix(back.P),
                                "round_trip_error": round_trip, "coefficient_mismatch": co.mismatch}
        report["symbols"] = {"inner": list(pair.is_inner(tol)),
                             "product_errors": list(pair.product_errors())}
        checks["round_trip"] = round_trip <= tol.eq_tol * 10
        checks["inner_symbols"] = all(pair.is_inner(tol))
    model = build_model(spec, degree, tol)
    defect = doubly_commuting_verdicts(model, tol, strict=False)
    report["defect"] = defect
    report["model"] = {"ambient_dim": model.ambient_dim, "exact_degree": min(model.exact_degree, 1 << 20),
                       "interior_degree": min(model.interior_degree, 1 << 20),
                       "declared_purity": model.purity.to_dict(),
                       "stabilization": model.meta.get("stabilization")}
    checks["verdicts_agree"] = defect.consistency
    checks["defect_two_route"] = defect.residuals["two_route"] <= tol.eq_tol * 10
    checks["wandering_split"] = defect.residuals["wandering_split"] <= tol.approx_tol
    checks["adjoint_pairing"] = model.adjoint_pairing_error() <= tol.approx_tol
    checks["commuting"] = model.commutator_norm() <= tol.approx_tol

    full = spec.kind == "bcl"
    series, residuals = {}, {}
    for i in (1, 2):
        if model.purity.of(i):
            series[f"Theta_V{3 - i}"] = _series_summary(theta_Vj(model, i, n), full)
        if not model.unitary_mask.any():
            series[f"theta_V{i},V{3 - i}"] = _series_summary(characteristic_invariant(model, i, n), full)
            residuals[f"bridge_{i}"] = bridge_identity_residual(model, i, min(n, model.interior_degree))
            checks[f"bridge_{i}"] = residuals[f"bridge_{i}"] <= tol.approx_tol
    report["series"] = series
    report["residuals"] = {"commutator": model.commutator_norm(),
                           "adjoint_pairing": model.adjoint_pairing_error(), **residuals}
    if spec.kind == "bidisc":
        gens, deg, guard = _bidisc_params(spec.payload, degree)
        s = span_to_degree(gens, deg, guard, tol)
        report["bidisc"] = {"degree": deg, "guard": guard, "band_dims": s.band_dims(), "signature": signature_check(s, defect)}
    report["checks"] = checks
    return report, all(checks.values())


def _config(args, tol: TolerancePolicy, **extra) -> dict:
    degree = DEFAULT_DEGREE if args.degree is None else args.degree
    return {"command": args.command, "degree": degree, "seed": args.seed,
            "tolerance": tol.to_dict(), "version": __version__, **extra}


def _emit(doc: dict, out) -> None:
    text = dumps(doc)
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def cmd_validate(args, tol):
    spec = _load_spec(args.spec)
    details = {}
    if spec.kind == "bcl":
        data = _bcl_data(spec.payload, tol)
        details = {"dim": data.dim, "rank": data.rank}
    elif spec.kind == "bidisc":
        gens, deg, guard = _bidisc_params(spec.payload, args.degree)
        details = {"generators": len(gens), "degree": deg, "guard": guard}
    elif spec.kind == "matrix-unitary":
        details = {"dim": _unitaries(spec.payload, tol)[0].shape[0]}
    else:
        build_model(spec, args.degree, tol)
        details = {"parts": len(spec.payload)}
    _emit({"valid": True, "kind": spec.kind, "details": details,
           "config": _config(args, tol, spec=str(args.spec))}, args.out)
    return EXIT_OK


def cmd_analyze(args, tol):
    spec = _load_spec(args.spec)
    try:
        report, ok = analyze(spec, args.degree, tol)
    except _CONSISTENCY_ERRORS as exc:
        report, ok = {"kind": spec.kind, "error": {"type": type(exc).__name__, "message": str(exc)}}, False
    report["consistent"] = ok
    report["config"] = _config(args, tol, spec=str(args.spec))
    _emit(report, args.out)
    return EXIT_OK if ok else EXIT_INCONSISTENT


def cmd_compare(args, tol):
    specs = [_load_spec(p) for p in (args.spec_a, args.spec_b)]
    for path, spec in zip((args.spec_a, args.spec_b), specs):
        if spec.kind != "bcl":
            raise InputError(f"{path}: compare needs a pure pair given by (U, P), got kind {spec.kind!r}")
    a, b = (build_multipliers(_bcl_data(s.payload, tol), tol) for s in specs)
    try:
        result = pair_equivalence(a, b, tol)
        doc = result.to_dict()
        code = EXIT_OK
    except _CONSISTENCY_ERRORS as exc:
        doc = {"verdict": "undetermined", "error": {"type": type(exc).__name__, "message": str(exc)}}
        code = EXIT_INCONSISTENT
    doc["config"] = _config(args, tol, spec_a=str(args.spec_a), spec_b=str(args.spec_b))
    _emit(doc, args.out)
    return code


def cmd_construct(args, tol):
    if args.dim < 1:
        raise InputError("--dim must be at least 1")
    rank = args.dim // 2 if args.rank is None else args.rank
    if not 0 <= rank <= args.dim:
        raise InputError(f"--rank must lie in [0, {args.dim}]")
    data = random_bcl_data(args.dim, rank, np.random.default_rng(args.seed), commuting=args.commuting)
    doc = {"kind": "bcl",
           "payload": {"dim": data.dim, "U": encode_matrix(data.U), "P": encode_matrix(data.P)},
           "config": _config(args, tol, dim=args.dim, rank=rank, commuting=args.commuting)}
    _emit(doc, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--degree", type=int, default=None,
                        help=f"truncation degree N (default {DEFAULT_DEGREE}, or the generator file's)")
    common.add_argument("--tol", type=float, default=None,
                        help=f"approximation tolerance (default 1e-6, or ${TOL_ENV})")
    common.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")

    parser = argparse.ArgumentParser(prog="isopair", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a pair file against its schema")
    p.add_argument("spec")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("analyze", parents=[common], help="full report for one pair")
    p.add_argument("spec")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("compare", parents=[common], help="decide joint unitary equivalence of two pairs")
    p.add_argument("spec_a")
    p.add_argument("spec_b")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("construct", parents=[common], help="write a random (U, P) pair")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--rank", type=int, default=None, help="rank of P (default dim // 2)")
    p.add_argument("--commuting", action="store_true", help="make U commute with P")
    p.set_defaults(func=cmd_construct)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = tolerance(default_tol() if args.tol is None else args.tol)
        return args.func(args, tol)
    except (InputError, SchemaError, InvalidBCLData, NonFiniteError, PurityError, TruncationError) as exc:
        print(f"isopair: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
