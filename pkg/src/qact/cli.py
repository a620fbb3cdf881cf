"""Command line driver.

Verbs: validate, validate-graded, build, spectral, roundtrip,
module-functor, fullness, cocycle-check, deform.

Exit codes: 0 all residuals under tolerance, 1 validation failure,
2 input error.  The report is written to --report (or stdout) either way;
identical inputs and seed produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import serialize
from .actions import (
    ActionError,
    canonical_module_iso,
    fullness_check,
    module_from_algebra,
    roundtrip_check,
    spectral_functor,
)
from .algebras import AlgebraError
from .cocycles import CocycleError, check_cocycle, deform_action, deform_functor, twist_element
from .functors import IncompleteDataError, validate_functor, validate_graded
from .reconstruction import build_algebra, build_report
from .repcat import BackendError

SCHEMA = "report.v1"


class InputError(Exception):
    pass


# malformed or mismatched data surfaced by the library maps to exit code 2
INPUT_ERRORS = (ActionError, AlgebraError, BackendError, CocycleError,
                IncompleteDataError, serialize.SchemaError)


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return serialize.encode_complex(obj)
    return obj


def _load(path, loader, what):
    try:
        data = serialize.load_json(path)
    except FileNotFoundError:
        raise InputError(f"{what} file not found: {path}")
    except json.JSONDecodeError as err:
        raise InputError(f"{what} file {path} is not valid JSON: {err}")
    try:
        return loader(data)
    except (serialize.SchemaError, KeyError, ValueError) as err:
        raise InputError(f"{what} file {path}: {err}")


def _need_inputs(args, count):
    if len(args.input) != count:
        raise InputError(
            f"verb {args.verb!r} needs {count} --input file(s), got {len(args.input)}"
        )


def _need_backend(args):
    if not args.backend:
        raise InputError(f"verb {args.verb!r} needs --backend")
    return _load(args.backend, serialize.backend_from_json, "backend")


def run_verb(args) -> tuple[int, dict]:
    tol = args.tolerance
    report: dict = {
        "schema": SCHEMA,
        "verb": args.verb,
        "tolerance": tol,
        "seed": args.seed,
        "inputs": list(args.input),
        "backend": args.backend,
    }

    if args.verb == "validate":
        backend = _need_backend(args)
        _need_inputs(args, 1)
        functor = _load(args.input[0], lambda d: serialize.functor_from_json(d, backend),
                        "functor")
        val = validate_functor(functor, tol)
        report["validation"] = val.summary()
        return (0 if val.passed else 1), report

    if args.verb == "validate-graded":
        _need_inputs(args, 1)
        bundle = _load(args.input[0], serialize.bundle_from_json, "bundle")
        val = validate_graded(bundle, tol)
        report["validation"] = val.summary()
        return (0 if val.passed else 1), report

    if args.verb == "build":
        backend = _need_backend(args)
        _need_inputs(args, 1)
        functor = _load(args.input[0], lambda d: serialize.functor_from_json(d, backend),
                        "functor")
        val = validate_functor(functor, tol)
        report["validation"] = val.summary()
        if not val.passed:
            return 1, report
        alg = build_algebra(functor, tol=tol, validate=False)
        audit = build_report(alg, seed=args.seed)
        audit["multiplication_table"] = serialize.encode_complex(
            alg.multiplication_table()
        )
        report["build"] = audit
        return (0 if audit["passed"] else 1), report

    if args.verb == "spectral":
        backend = _need_backend(args)
        _need_inputs(args, 1)
        act = _load(args.input[0], serialize.action_from_json, "action")
        act_report = act.validate(tol)
        report["action"] = act_report
        if not act_report["passed"]:
            return 1, report
        spec = spectral_functor(backend, act, seed=args.seed, tol=tol)
        val = validate_functor(spec.functor, tol)
        report["fixed_algebra_blocks"] = list(spec.fixed.algebra.blocks)
        report["module_dims"] = {
            label: spec.functor.module(label).dim for label in backend.labels
        }
        report["validation"] = val.summary()
        return (0 if val.passed else 1), report

    if args.verb == "roundtrip":
        backend = _need_backend(args)
        _need_inputs(args, 1)
        act = _load(args.input[0], serialize.action_from_json, "action")
        cert = roundtrip_check(backend, act, seed=args.seed, tol=tol)
        report["certificate"] = {
            "passed": cert.passed,
            "residuals": cert.residuals,
            "dims": list(cert.dims),
            "isomorphism": serialize.encode_complex(cert.matrix),
        }
        return (0 if cert.passed else 1), report

    if args.verb == "module-functor":
        backend = _need_backend(args)
        _need_inputs(args, 1)
        act = _load(args.input[0], serialize.action_from_json, "action")
        spec, mf, iso = canonical_module_iso(backend, act, tol=tol, seed=args.seed)
        val = validate_functor(mf.functor, tol)
        report["endomorphism_blocks"] = list(mf.endomorphisms.algebra.blocks)
        report["module_dims"] = {
            label: mf.functor.module(label).dim for label in backend.labels
        }
        report["validation"] = val.summary()
        report["natural_iso_to_spectral"] = {
            "passed": iso.passed, "residuals": iso.residuals,
        }
        ok = val.passed and iso.passed
        return (0 if ok else 1), report

    if args.verb == "fullness":
        backend = _need_backend(args)
        _need_inputs(args, 1)
        act = _load(args.input[0], serialize.action_from_json, "action")
        module = module_from_algebra(backend, act)
        cert = fullness_check(backend, module, tol=tol)
        report["certificate"] = {
            "passed": cert.passed,
            "lower_constant": cert.lower_constant,
            "residuals": cert.residuals,
            "max_rank": cert.max_rank,
            "chosen": [label for label, _ in cert.chosen],
            "gram": serialize.encode_complex(cert.gram) if cert.gram is not None else None,
        }
        return (0 if cert.passed else 1), report

    if args.verb == "cocycle-check":
        backend = _need_backend(args)
        _need_inputs(args, 1)
        cocycle = _load(args.input[0], serialize.cocycle_from_json, "cocycle")
        try:
            chk = check_cocycle(cocycle, tol)
        except CocycleError as err:
            raise InputError(str(err))
        report["cocycle"] = chk
        if chk["passed"]:
            _, urep = twist_element(backend, cocycle, tol)
            report["twist_element"] = urep
            ok = urep["passed"]
        else:
            ok = False
        return (0 if ok else 1), report

    if args.verb == "deform":
        backend = _need_backend(args)
        _need_inputs(args, 2)
        act = _load(args.input[0], serialize.action_from_json, "action")
        cocycle = _load(args.input[1], serialize.cocycle_from_json, "cocycle")
        chk = check_cocycle(cocycle, tol)
        report["cocycle"] = chk
        if not chk["passed"]:
            return 1, report
        deformed = deform_action(backend, act, cocycle, tol=tol, seed=args.seed)
        report["deformed"] = deformed.report
        report["center_dimension"] = deformed.model.center_dimension()
        ok = deformed.report["passed"]
        if args.cross_test:
            spec = spectral_functor(backend, act, seed=args.seed, tol=tol)
            twisted = deform_functor(spec.functor, cocycle)
            val = validate_functor(twisted, tol)
            alg = build_algebra(twisted, tol=tol, validate=False)
            cert = roundtrip_check(backend, act, seed=args.seed, tol=tol)
            phi = cert.matrix
            worst = 0.0
            basis = alg.basis()
            for x in basis:
                xs = phi @ alg.flatten(x)
                worst = max(worst, float(np.abs(
                    phi @ alg.flatten(alg.star(x)) - deformed.star(xs)
                ).max()))
                for y in basis:
                    lhs = phi @ alg.flatten(alg.multiply(x, y))
                    rhs = deformed.multiply(xs, phi @ alg.flatten(y))
                    worst = max(worst, float(np.abs(lhs - rhs).max()))
            report["cross_test"] = {
                "twisted_functor_valid": val.passed,
                "comparison_residual": worst,
                "passed": bool(val.passed and worst < 1e4 * tol),
            }
            ok = ok and report["cross_test"]["passed"]
        return (0 if ok else 1), report

    raise InputError(f"unknown verb {args.verb!r}")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qact",
        description="Validate, build, round-trip and deform symmetry actions "
                    "and their spectral data.",
    )
    parser.add_argument("verb", choices=[
        "validate", "validate-graded", "build", "spectral", "roundtrip",
        "module-functor", "fullness", "cocycle-check", "deform",
    ])
    parser.add_argument("--backend", help="backend table (JSON)")
    parser.add_argument("--input", action="append", default=[],
                        help="input file; repeat for verbs taking several")
    parser.add_argument("--tolerance", type=float, default=1e-9)
    parser.add_argument("--report", help="write the JSON report here")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--cross-test", action="store_true", dest="cross_test",
                        help="deform: also rebuild through the twisted functor "
                             "and compare")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    if args.tolerance <= 0:
        print("tolerance must be positive", file=sys.stderr)
        return 2
    try:
        code, report = run_verb(args)
    except (InputError, *INPUT_ERRORS) as err:
        report = {"schema": SCHEMA, "verb": args.verb, "error": str(err)}
        code = 2
    text = json.dumps(jsonable(report), indent=2, sort_keys=True) + "\n"
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
