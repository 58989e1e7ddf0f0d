"""Command-line front end.

Every operation is exposed as a subcommand with JSON/CSV file I/O so
results can be scripted and round-tripped: curve documents are read by
``CurveGerm.from_doc``, structure specs by ``structure_from_spec``, disc
grids by ``GridFunction.load_csv``, ledgers by ``GenusLedger.from_json``.
Singularity types can be passed inline as ``type://p0,p1,...``.

Exit codes: 0 success, 1 computation failure (divergence, precision,
non-convergence, failing fixtures), 2 usage or parse error.  With
``--json-errors`` failures are mirrored as a JSON object on stderr.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import PseudocurveError, UnknownFixture
from .corpus import run_all, run_fixture
from .grid import GridFunction
from .singularity import (CurveGerm, characteristic_exponents,
                          cusp_index_formula, multiplicity, puiseux_sequence,
                          realize_type, validate_type)
from .solver import perturb_cusp, picard_solve
from .structures import structure_from_spec
from .topology import (GenusLedger, cusp_index_topological, genus_check,
                       linking, sphere_slice)

_TYPE_PREFIX = "type://"


class _UsageError(Exception):
    """Bad arguments or unreadable/invalid input files (exit code 2)."""


# -- input readers ------------------------------------------------------------

def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise _UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _UsageError(f"{path} is not valid JSON: {exc}") from exc


def _read_curve(path):
    try:
        return CurveGerm.from_doc(_read_json(path))
    except (TypeError, ValueError, PseudocurveError) as exc:
        raise _UsageError(f"{path}: {exc}") from exc


def _read_structure(path):
    try:
        return structure_from_spec(_read_json(path))
    except (TypeError, ValueError, KeyError) as exc:
        raise _UsageError(f"{path}: {exc}") from exc


def _read_reference(path, grid_shape):
    """Reference data for the solvers: a grid CSV, or a curve document
    sampled on the requested grid."""
    p = Path(path)
    if p.suffix.lower() == ".csv":
        try:
            return GridFunction.load_csv(p)
        except (OSError, PseudocurveError, ValueError) as exc:
            raise _UsageError(f"{path}: {exc}") from exc
    germ = _read_curve(path)
    nr, nt = grid_shape
    return GridFunction.from_callable(
        lambda z: np.stack(germ.evaluate(z), axis=-1), nr, nt)


def _parse_type_uri(text):
    if not text.startswith(_TYPE_PREFIX):
        raise _UsageError(f"expected {_TYPE_PREFIX}p0,p1,... got {text!r}")
    body = text[len(_TYPE_PREFIX):]
    try:
        return [int(tok) for tok in body.split(",")]
    except ValueError as exc:
        raise _UsageError(f"bad type URI {text!r}: {exc}") from exc


def _validated_type(exponents):
    result = validate_type(exponents)
    if not result:
        raise _UsageError(f"invalid type {exponents}: "
                          f"{result.clause}: {result.detail}")
    return result


def _default_realization(t, truncation=None):
    """Two-component germ with unit coefficients: leading term on the
    first axis, every later exponent on the second (orthogonal) axis."""
    vectors = [(1, 0)] + [(0, 1)] * (len(t.exponents) - 1)
    germ = realize_type(t, vectors)
    if truncation is not None:
        if truncation <= t.exponents[-1]:
            raise _UsageError(f"truncation {truncation} must exceed the "
                              f"last exponent {t.exponents[-1]}")
        germ = CurveGerm.from_terms(
            [dict(c.terms()) for c in germ.components], truncation)
    return germ


def _curve_or_type(text, truncation=None):
    if text.startswith(_TYPE_PREFIX):
        return _default_realization(_validated_type(_parse_type_uri(text)),
                                    truncation)
    return _read_curve(text)


def _parse_w0(text):
    try:
        return np.array([complex(tok.strip().replace(" ", ""))
                         for tok in text.split(",")])
    except ValueError as exc:
        raise _UsageError(f"bad --w0 {text!r}: expected comma-separated "
                          f"complex literals like '0,0.02j'") from exc


def _parse_grid(text):
    parts = text.lower().split("x")
    if len(parts) == 2 and all(p.isdigit() for p in parts):
        nr, nt = int(parts[0]), int(parts[1])
        if nr > 0 and nt > 0:
            return nr, nt
    raise _UsageError(f"bad --grid {text!r}: expected NRxNT like 128x256")


def _emit(doc):
    print(json.dumps(doc, indent=2))


def _out_dir(args):
    if args.out is None:
        return None
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


# -- subcommand handlers -------------------------------------------------------

def _cmd_puiseux(args):
    g = _read_curve(args.curve)
    mu, v0 = multiplicity(g)
    t = characteristic_exponents(g)
    seq = puiseux_sequence(g)
    doc = {
        "schema": 1,
        "multiplicity": mu,
        "tangent": [[str(c.re), str(c.im)] for c in v0],
        "exponents": list(t.exponents),
        "divisors": list(t.divisors),
        "stages": [st.germ.to_doc() for st in seq.stages],
    }
    out = _out_dir(args)
    if out is not None:
        for i, stage in enumerate(doc["stages"]):
            (out / f"stage_{i}.json").write_text(json.dumps(stage, indent=2))
    _emit(doc)
    return 0


def _cmd_cusp_index(args):
    if args.topological:
        germ = _curve_or_type(args.curve, args.truncation)
        J = _read_structure(args.structure) if args.structure else None
        kappa = cusp_index_topological(germ, J, r=args.radius,
                                       samples=args.samples)
    elif args.curve.startswith(_TYPE_PREFIX):
        kappa = cusp_index_formula(
            _validated_type(_parse_type_uri(args.curve)))
    else:
        kappa = cusp_index_formula(
            characteristic_exponents(_read_curve(args.curve)))
    print(kappa)
    return 0


def _cmd_realize_type(args):
    t = _validated_type(_parse_type_uri(args.type))
    germ = _default_realization(t, args.truncation)
    doc = germ.to_doc()
    out = _out_dir(args)
    if out is not None:
        (out / "curve.json").write_text(json.dumps(doc, indent=2))
    _emit(doc)
    return 0


def _cmd_validate_type(args):
    result = validate_type(_parse_type_uri(args.type))
    if result:
        _emit({"schema": 1, "valid": True,
               "exponents": list(result.exponents),
               "divisors": list(result.divisors)})
    else:
        _emit({"schema": 1, "valid": False, "clause": result.clause,
               "detail": result.detail})
    return 0


def _cmd_solve(args):
    J = _read_structure(args.structure)
    ref = _read_reference(args.reference, args.grid)
    report = picard_solve(J, ref, tol=args.tol, seed=args.seed)
    out = _out_dir(args)
    path = None if out is None else out / "solution.csv"
    _emit(report.to_dict(solution_path=path))
    return 0 if report.converged else 1


def _cmd_perturb(args):
    J = _read_structure(args.structure)
    u0 = _read_reference(args.reference, args.grid)
    w0 = _parse_w0(args.w0)
    report = perturb_cusp(J, u0, args.nu, w0, tol=args.tol, seed=args.seed)
    out = _out_dir(args)
    doc = report.to_dict(solution_path=None if out is None
                         else out / "solution.csv")
    if out is not None and "w" in report.aux:
        report.aux["w"].save_csv(out / "correction.csv")
        doc["correction_csv"] = str(out / "correction.csv")
    _emit(doc)
    return 0 if report.converged else 1


def _cmd_linking(args):
    a = _curve_or_type(args.curve_a, args.truncation)
    b = _curve_or_type(args.curve_b, args.truncation)
    ga = sphere_slice(a, args.radius, args.samples)
    gb = sphere_slice(b, args.radius, args.samples)
    print(linking(ga, gb))
    return 0


def _cmd_intersection_index(args):
    from .topology import intersection_index
    a = _curve_or_type(args.curve_a, args.truncation)
    b = _curve_or_type(args.curve_b, args.truncation)
    print(intersection_index(a, b, r=args.radius, samples=args.samples))
    return 0


def _cmd_bennequin(args):
    from .topology import bennequin
    germ = _curve_or_type(args.curve, args.truncation)
    J = _read_structure(args.structure) if args.structure else None
    gamma = sphere_slice(germ, args.radius, args.samples)
    print(bennequin(gamma, J))
    return 0


def _cmd_genus(args):
    try:
        text = Path(args.ledger).read_text()
        ledger = GenusLedger.from_json(text)
    except OSError as exc:
        raise _UsageError(f"cannot read {args.ledger}: {exc}") from exc
    except (TypeError, ValueError, KeyError, PseudocurveError) as exc:
        raise _UsageError(f"{args.ledger}: {exc}") from exc
    report = genus_check(ledger)
    _emit(report.to_dict())
    return 0


def _cmd_verify(args):
    if args.all:
        reports = run_all()
    elif args.fixture:
        reports = [run_fixture(args.fixture)]
    else:
        raise _UsageError("verify needs a fixture id or --all")
    for rep in reports:
        print(rep)
    return 0 if all(r.passed for r in reports) else 1


# -- parser --------------------------------------------------------------------

_GLOBAL_DEFAULTS = {"grid": "128x256", "tol": 1e-6, "truncation": None,
                    "seed": 0, "out": None, "json_errors": False}


def _build_parser():
    # SUPPRESS defaults keep a subcommand's re-parse from clobbering
    # global flags given before the subcommand; main() fills the gaps
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", default=argparse.SUPPRESS, metavar="NRxNT",
                        help="grid shape for sampling curve references "
                             "(default 128x256)")
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help="solver tolerance (default 1e-6)")
    common.add_argument("--truncation", type=int, default=argparse.SUPPRESS,
                        help="series truncation for realized types")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for sampling estimators (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS, metavar="DIR",
                        help="directory for artifact files (created)")
    common.add_argument("--json-errors", action="store_true",
                        default=argparse.SUPPRESS,
                        help="mirror failures as JSON on stderr")

    parser = argparse.ArgumentParser(
        prog="pseudocurve", parents=[common],
        description="Exact singularity data, disc solvers, and sphere-slice "
                    "topology for curve germs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("puiseux", parents=[common],
                       help="multiplicity, exponent chain, and "
                            "approximation stages of a curve document")
    p.add_argument("curve", help="curve JSON file")
    p.set_defaults(handler=_cmd_puiseux)

    p = sub.add_parser("cusp-index", parents=[common],
                       help="cusp index of a curve file or type:// URI")
    p.add_argument("curve", help="curve JSON file or type://p0,p1,...")
    p.add_argument("--topological", action="store_true",
                   help="measure via sphere-slice self-linking instead "
                        "of the exponent formula")
    p.add_argument("--structure", default=None,
                   help="structure spec JSON for the topological route")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.set_defaults(handler=_cmd_cusp_index)

    p = sub.add_parser("realize-type", parents=[common],
                       help="two-component germ realizing an exponent chain")
    p.add_argument("type", help="type://p0,p1,...")
    p.set_defaults(handler=_cmd_realize_type)

    p = sub.add_parser("validate-type", parents=[common],
                       help="check an exponent chain; reports the violated "
                            "clause if invalid")
    p.add_argument("type", help="type://p0,p1,...")
    p.set_defaults(handler=_cmd_validate_type)

    p = sub.add_parser("solve", parents=[common],
                       help="fixed-point solve against a reference grid")
    p.add_argument("--structure", required=True,
                   help="structure spec JSON")
    p.add_argument("--reference", required=True,
                   help="grid CSV or curve JSON (sampled on --grid)")
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("perturb", parents=[common],
                       help="desingularizing perturbation of a reference "
                            "curve")
    p.add_argument("--structure", required=True)
    p.add_argument("--reference", required=True,
                   help="grid CSV or curve JSON (sampled on --grid)")
    p.add_argument("--nu", type=int, required=True,
                   help="vanishing order of the correction factor")
    p.add_argument("--w0", required=True,
                   help="anchor value, comma-separated complex literals")
    p.set_defaults(handler=_cmd_perturb)

    p = sub.add_parser("linking", parents=[common],
                       help="linking number of two curves sliced on a "
                            "common sphere")
    p.add_argument("curve_a")
    p.add_argument("curve_b")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--samples", type=int, default=1024)
    p.set_defaults(handler=_cmd_linking)

    p = sub.add_parser("intersection-index", parents=[common],
                       help="local intersection index of two germs")
    p.add_argument("curve_a")
    p.add_argument("curve_b")
    p.add_argument("--radius", type=float, default=None)
    p.add_argument("--samples", type=int, default=1024)
    p.set_defaults(handler=_cmd_intersection_index)

    p = sub.add_parser("bennequin", parents=[common],
                       help="self-linking of a curve's sphere slice")
    p.add_argument("curve", help="curve JSON file or type://p0,p1,...")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--structure", default=None,
                   help="structure spec JSON for the framing")
    p.set_defaults(handler=_cmd_bennequin)

    p = sub.add_parser("genus", parents=[common],
                       help="balance or solve a genus ledger")
    p.add_argument("--ledger", required=True, help="ledger JSON file")
    p.set_defaults(handler=_cmd_genus)

    p = sub.add_parser("verify", parents=[common],
                       help="run bundled fixtures and report per-claim "
                            "diffs")
    p.add_argument("fixture", nargs="?", default=None,
                   help="fixture id (see --all)")
    p.add_argument("--all", action="store_true", help="run every fixture")
    p.set_defaults(handler=_cmd_verify)

    return parser


def _report_error(args, exc, code):
    message = str(exc) or type(exc).__name__
    if args is not None and getattr(args, "json_errors", False):
        print(json.dumps({"schema": 1, "error": type(exc).__name__,
                          "message": message, "exit_code": code}),
              file=sys.stderr)
    else:
        print(f"pseudocurve: {message}", file=sys.stderr)
    return code


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed usage; normalize its exit code
        return int(exc.code) if exc.code else 0
    for name, value in _GLOBAL_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, value)
    try:
        args.grid = _parse_grid(args.grid)
        return args.handler(args)
    except _UsageError as exc:
        return _report_error(args, exc, 2)
    except UnknownFixture as exc:
        return _report_error(args, exc, 2)
    except PseudocurveError as exc:
        return _report_error(args, exc, 1)


if __name__ == "__main__":
    sys.exit(main())
