"""JSON-in/JSON-out command line front door.

Commands: psi-eval, psi-invert, discriminants, validate-system,
complete-system, classify, deform, deform-projective, jacobian,
transversality, general-position, suite.

Exit codes: 0 success, 1 suite ran with failing criteria, 2 validation
failure, 3 numerical failure, 64 unknown command, 65 malformed JSON.
stdout carries exactly one JSON document; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from .acceptance import run_suite
from .config import RunConfig
from .deformation import (
    DeformationContext,
    deform,
    deform_projective,
    orbit_jacobian,
)
from .errors import NumericalError, StratdeformError, ValidationError
from .geometry import ImplicitPatch, general_position_trial, transversality_trial
from .interpolation import dpsi_deta, gamma, psi, psi_inverse
from .polyalg import MultiPoly
from .stratification import (
    PolynomialSystem,
    complete_system,
    stratum_label,
    validate_system,
)
from .symmetric import generalized_discriminants

KNOWN_COMMANDS = (
    "psi-eval", "psi-invert", "discriminants", "validate-system",
    "complete-system", "classify", "deform", "deform-projective",
    "jacobian", "transversality", "general-position", "suite",
)

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_UNKNOWN_COMMAND = 64
EXIT_BAD_JSON = 65


def _c2j(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _j2c(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValidationError(f"expected a number or [re, im] pair, got {v!r}")


def _vec(doc) -> list[complex]:
    if not isinstance(doc, list):
        raise ValidationError("expected a list of complex values")
    return [_j2c(v) for v in doc]


def _require(doc, key):
    if not isinstance(doc, dict) or key not in doc:
        raise ValidationError(f"input document needs the key {key!r}")
    return doc[key]


def _context_from(doc, config: RunConfig) -> DeformationContext:
    system = PolynomialSystem.from_json(_require(doc, "system"))
    radius = config.t_radius
    if radius is None and "t_radius" in doc:
        radius = float(doc["t_radius"])
    return DeformationContext.create(
        system,
        t_radius=radius,
        tolerances=dict(config.tolerances),
        calibration_samples=int(doc.get("calibration_samples", 200)),
        seed=config.seed,
    )


def _cmd_psi_eval(doc, config):
    a = _vec(_require(doc, "a"))
    b = _vec(_require(doc, "b"))
    z = _j2c(_require(doc, "z"))
    eta = _j2c(doc.get("eta", 0.0))
    value = psi(z, a, b, eta, n_cap=config.n_cap)
    return {
        "value": _c2j(value),
        "dpsi_deta": _c2j(dpsi_deta(z, a, b, eta, n_cap=config.n_cap)),
        "gamma": gamma(a, b),
    }


def _cmd_psi_invert(doc, config):
    a = _vec(_require(doc, "a"))
    b = _vec(_require(doc, "b"))
    w = _j2c(_require(doc, "w"))
    eta = _j2c(doc.get("eta", 0.0))
    z = psi_inverse(w, a, b, eta, tol=config.tol("psi_inverse"),
                    n_cap=config.n_cap)
    return {"z": _c2j(z), "gamma": gamma(a, b)}


def _cmd_discriminants(doc, config):
    a = _vec(_require(doc, "a"))
    if len(a) > config.n_cap:
        raise ValidationError(f"vector length {len(a)} exceeds --n-cap")
    dv = generalized_discriminants(a)
    return {"values": dv.to_json(),
            "distinct_value_count": dv.distinct_value_count()}


def _cmd_validate_system(doc, config):
    polys = [MultiPoly.from_json(p) for p in _require(doc, "polys")]
    return validate_system(polys).to_json()


def _cmd_complete_system(doc, config):
    top = MultiPoly.from_json(_require(doc, "top"))
    n = int(doc.get("n", top.num_vars))
    return complete_system(top, n).to_json()


def _cmd_classify(doc, config):
    system = PolynomialSystem.from_json(_require(doc, "system"))
    tol = config.tol("zero_test")
    labels = []
    for pt in _require(doc, "points"):
        lab = stratum_label(_vec(pt), system, tol=tol)
        labels.append(lab.to_json())
    return {"labels": labels}


def _cmd_deform(doc, config):
    ctx = _context_from(doc, config)
    t = _vec(_require(doc, "t"))
    zero_tol = config.tol("zero_test")
    points_out, before, after = [], [], []
    for pt in _require(doc, "points"):
        x = _vec(pt)
        y = deform(ctx, t, x)
        points_out.append([_c2j(v) for v in y])
        before.append(stratum_label(x, ctx.system, tol=zero_tol,
                                    strict=False).to_json())
        after.append(stratum_label(y, ctx.system, tol=zero_tol,
                                   strict=False).to_json())
    return {"points": points_out, "labels_before": before,
            "labels_after": after, "t_radius": ctx.t_radius}


def _cmd_deform_projective(doc, config):
    ctx = _context_from(doc, config)
    t = _vec(_require(doc, "t"))
    out = []
    for pt in _require(doc, "points"):
        y = deform_projective(ctx, t, _vec(pt))
        out.append([_c2j(v) for v in y])
    return {"points": out, "t_radius": ctx.t_radius}


def _cmd_jacobian(doc, config):
    ctx = _context_from(doc, config)
    t = _vec(_require(doc, "t"))
    x = _vec(_require(doc, "x"))
    return orbit_jacobian(ctx, t, x).to_json()


def _cmd_transversality(doc, config):
    ctx = _context_from(doc, config)
    z_patch = ImplicitPatch.from_json(_require(doc, "Z"))
    w_patch = ImplicitPatch.from_json(_require(doc, "W"))
    trials = int(doc.get("trials", 100))
    t_override = doc.get("t")
    if t_override is not None:
        t_override = _vec(t_override)
    report = transversality_trial(
        z_patch, w_patch, ctx, trials, config.seed,
        t_override=t_override, tol=config.tol("transversality"),
        newton_tol=config.tol("newton"),
        cluster_radius=config.tol("point_cluster"),
    )
    return report.to_json()


def _cmd_general_position(doc, config):
    ctx = _context_from(doc, config)
    z_patch = ImplicitPatch.from_json(_require(doc, "Z"))
    w_patch = ImplicitPatch.from_json(_require(doc, "W"))
    trials = int(doc.get("trials", 100))
    report = general_position_trial(
        z_patch, w_patch, ctx, trials, config.seed,
        newton_tol=config.tol("newton"),
        cluster_radius=config.tol("point_cluster"),
    )
    return report.to_json()


HANDLERS = {
    "psi-eval": _cmd_psi_eval,
    "psi-invert": _cmd_psi_invert,
    "discriminants": _cmd_discriminants,
    "validate-system": _cmd_validate_system,
    "complete-system": _cmd_complete_system,
    "classify": _cmd_classify,
    "deform": _cmd_deform,
    "deform-projective": _cmd_deform_projective,
    "jacobian": _cmd_jacobian,
    "transversality": _cmd_transversality,
    "general-position": _cmd_general_position,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stratdeform", add_help=True,
        description="interpolation, stratification, and deformation toolbox",
    )
    parser.add_argument("command", choices=KNOWN_COMMANDS)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--tol", action="append", default=[],
                        metavar="NAME=VALUE")
    parser.add_argument("--n-cap", type=int, default=8)
    parser.add_argument("--t-radius", type=float, default=None)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--input", default="-",
                        help="input JSON file, or - for stdin")
    parser.add_argument("--output", default="-",
                        help="output JSON file, or - for stdout")
    return parser


def _parse_config(args) -> RunConfig:
    config = RunConfig.from_env()
    if args.seed is not None:
        config.seed = args.seed
    for entry in args.tol:
        if "=" not in entry:
            raise ValidationError(f"--tol expects NAME=VALUE, got {entry!r}")
        name, value = entry.split("=", 1)
        config.tolerances[name.strip()] = float(value)
    config.n_cap = args.n_cap
    config.t_radius = args.t_radius
    config.jobs = args.jobs
    return config


def _emit(payload, destination) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if destination == "-":
        sys.stdout.write(text)
    else:
        with open(destination, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in KNOWN_COMMANDS and not argv[0].startswith("-"):
        print(f"unknown command: {argv[0]}", file=sys.stderr)
        return EXIT_UNKNOWN_COMMAND
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; --help exits 0
        return EXIT_OK if exc.code == 0 else EXIT_UNKNOWN_COMMAND
    try:
        config = _parse_config(args)
    except (ValidationError, ValueError) as exc:
        print(f"bad flags: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.command == "suite":
        report = run_suite(config, emit=lambda line: print(line, file=sys.stderr))
        _emit(report.to_json(), args.output)
        return EXIT_OK if report.all_passed else EXIT_SUITE_FAILED

    try:
        if args.input == "-":
            raw = sys.stdin.read()
        else:
            with open(args.input, "r", encoding="utf-8") as fh:
                raw = fh.read()
        doc = json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"malformed input: {exc}", file=sys.stderr)
        return EXIT_BAD_JSON

    handler = HANDLERS[args.command]
    try:
        payload = handler(doc, config)
    except ValidationError as exc:
        _emit({"error": {"kind": "validation", "message": str(exc)}},
              args.output)
        print(f"validation failure: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        _emit({"error": {"kind": "numerical", "message": str(exc)}},
              args.output)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except StratdeformError as exc:
        _emit({"error": {"kind": "internal", "message": str(exc)}},
              args.output)
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _emit(payload, args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
