"""Command-line interface: ``perfectforms <command> ...``.

Exit codes: 0 complete, 2 partial (a limit stopped the run), 1 error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import polycone as pc
from .admethod import AdmPolicy
from .qform import (
    FormFileError,
    NotPositiveDefiniteError,
    QuadraticForm,
    format_form,
    hermite_power,
    is_eutactic,
    is_perfect,
    read_form,
)
from .symmetry import arithmetic_equivalence, aut_group
from .voronoi import (
    ClassificationState,
    ClassifyLimits,
    FacetPolicy,
    NotPerfectError,
    StateFileError,
    classification_report,
    classify,
    facet_orbits,
    flip,
    perfect_domain,
)

EXIT_OK, EXIT_ERROR, EXIT_PARTIAL = 0, 1, 2
REPORT_VERSION = 1


class CliError(Exception):
    pass


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def _matrix(M) -> list:
    return [[str(x) for x in row] for row in M]


def _emit(report: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    report = {"version": REPORT_VERSION, **_jsonable(report)}
    if fmt == "json":
        out.write(json.dumps(report, indent=1, sort_keys=True) + "\n")
        return
    for k, v in report.items():
        if isinstance(v, list) and v and isinstance(v[0], list):
            out.write(f"{k}:\n")
            for row in v:
                out.write("  " + " ".join(str(x) for x in row) + "\n")
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            out.write(f"{k}:\n")
            for row in v:
                out.write("  " + "  ".join(f"{a}={b}" for a, b in row.items()) + "\n")
        else:
            out.write(f"{k}: {v}\n")


def _load_form(path) -> QuadraticForm:
    try:
        A = read_form(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc
    except FormFileError as exc:
        raise CliError(f"{path}: {exc}") from exc
    return A


def _require_pd(A: QuadraticForm, path) -> None:
    try:
        A.require_pd()
    except NotPositiveDefiniteError as exc:
        raise CliError(f"{path}: form is {exc.kind.replace('-', ' ')}, not positive definite; "
                       f"witness vector {list(exc.witness)}") from exc


def _facet_policy(args) -> FacetPolicy:
    return FacetPolicy(
        plain_dd_max_rays=args.plain_dd_max_rays,
        adm=AdmPolicy(recursion_threshold=args.recursion_threshold, use_bank=args.bank,
                      full_aut_on_faces=args.full_aut_on_faces))


# ---------------------------------------------------------------- commands

def cmd_classify(args) -> int:
    d = args.dim
    if d >= 8 and not args.i_know_this_takes_months:
        raise CliError("dimension 8 and above takes months of computation; "
                       "pass --i-know-this-takes-months to proceed")
    state_dir = Path(os.environ.get("VORONOI_STATE_DIR", "."))
    state_path = Path(args.state) if args.state else (Path(args.resume) if args.resume else state_dir / f"classify-d{d}.json")
    state = None
    if args.resume:
        try:
            state = ClassificationState.load(args.resume)
        except StateFileError as exc:
            raise CliError(str(exc)) from exc
        if state.dimension != d:
            raise CliError(f"resume file is for dimension {state.dimension}, not {d}")
    elif state_path.exists() and not args.overwrite:
        raise CliError(f"state file {state_path} exists; use --resume {state_path} or --overwrite")
    try:
        state_path.parent.mkdir(parents=True, exist_ok=True)
        with open(state_path, "a"):
            pass
    except OSError as exc:
        raise CliError(f"cannot write state file {state_path}: {exc.strerror}") from exc
    limits = ClassifyLimits(max_forms=args.max_forms, wall_clock=args.wall_clock)
    if args.verbose >= 2:
        logging.basicConfig(level=logging.DEBUG, format="%(asctime)s %(message)s", stream=sys.stderr)

    def progress(st, rec):
        if args.verbose:
            print(f"closed record {rec.id} ({rec.name or 'unnamed'}): {len(rec.facet_orbits)} facet orbits, "
                  f"{len(st.records)} classes known, {len(st.open)} open", file=sys.stderr)

    state = classify(d, limits, state=state, policy=_facet_policy(args), workers=args.workers,
                     state_path=state_path, progress=progress)
    state.save(state_path)
    report = classification_report(state)
    report["state_file"] = str(state_path)
    if args.report:
        Path(args.report).write_text(json.dumps(_jsonable({"version": REPORT_VERSION, **report}),
                                                indent=1, sort_keys=True) + "\n")
    if args.format == "json":
        _emit(report, "json")
    else:
        print(f"dimension  perfect  maximizer  extreme  complete")
        m = report["maximizer"] or {}
        print(f"{d:>9}  {report['perfect']:>7}  {str(m.get('name') or m.get('id')):>9}  "
              f"{report['extreme']:>7}  {report['complete']}")
        for c in report["classes"]:
            print(f"  class {c['id']:>3}  {str(c['name'] or '-'):>4}  kissing {c['kissing']:>4}  "
                  f"gamma^d {c['hermite_power']:>8}  extreme {c['extreme']}  aut {c['aut_order']}  "
                  f"facet orbits {c['facet_orbits']}")
        print(f"state: {state_path}")
    return EXIT_OK if state.complete else EXIT_PARTIAL


def cmd_analyze(args) -> int:
    A = _load_form(args.form)
    _require_pd(A, args.form)
    perfect = is_perfect(A)
    eutactic = is_eutactic(A)
    report = {"dimension": A.dim, "minimum": A.minimum, "min_count": A.minimal_vectors.kissing_number,
              "det": A.determinant, "hermite_power": hermite_power(A), "perfect": perfect,
              "eutactic": eutactic, "extreme": perfect and eutactic, "aut_order": aut_group(A).order}
    _emit(report, args.format)
    return EXIT_OK


def _perfect_form(path) -> QuadraticForm:
    A = _load_form(path)
    _require_pd(A, path)
    if not is_perfect(A):
        raise CliError(f"{path}: form is not perfect")
    return A


def cmd_facets(args) -> int:
    A = _perfect_form(args.form)
    orbits = facet_orbits(A, _facet_policy(args))
    report = {"rays": len(A.minimal_vectors.vectors), "orbits": len(orbits),
              "facets": sum(o.orbit_size for o in orbits),
              "facet_orbits": [{"index": k, "incidence": o.incidence, "orbit_size": o.orbit_size,
                                "functional": " ".join(map(str, o.face.functional))}
                               for k, o in enumerate(orbits)]}
    _emit(report, args.format)
    return EXIT_OK


def cmd_flip(args) -> int:
    A = _perfect_form(args.form)
    orbits = facet_orbits(A, _facet_policy(args))
    if not 0 <= args.facet < len(orbits):
        raise CliError(f"facet index {args.facet} out of range (0..{len(orbits) - 1})")
    A2 = flip(A.scaled(Fraction(2) / A.minimum), orbits[args.facet].face)
    if args.output:
        Path(args.output).write_text(format_form(A2))
    _emit({"facet": args.facet, "neighbour": _matrix(A2.gram),
           "min_count": A2.minimal_vectors.kissing_number}, args.format)
    return EXIT_OK


def cmd_isom(args) -> int:
    A = _load_form(args.form_a)
    B = _load_form(args.form_b)
    _require_pd(A, args.form_a)
    _require_pd(B, args.form_b)
    if A.dim != B.dim:
        raise CliError("forms have different dimensions")
    P = arithmetic_equivalence(A, B)
    report = {"equivalent": P is not None}
    if P is not None:
        report["P"] = [list(r) for r in P]
        report["verified"] = A.transform(P) == B
    _emit(report, args.format)
    return EXIT_OK


def cmd_autgroup(args) -> int:
    A = _load_form(args.form)
    _require_pd(A, args.form)
    aut = aut_group(A)
    _emit({"order": aut.order, "min_count": 2 * len(aut.min_vectors),
           "order_on_min_lines": aut.group.order(),
           "generators": [{"matrix": " ; ".join(" ".join(map(str, r)) for r in M)} for M in aut.matrices]},
          args.format)
    return EXIT_OK


def cmd_dual_desc(args) -> int:
    try:
        obj = pc.read_cone(args.cone)
    except OSError as exc:
        raise CliError(f"cannot read {args.cone}: {exc.strerror}") from exc
    except (pc.ConeFileError, ValueError) as exc:
        raise CliError(f"{args.cone}: {exc}") from exc
    result = pc.dual_description(obj) if isinstance(obj, pc.ConeV) else pc.reverse_description(obj)
    sys.stdout.write(pc.format_cone(result))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _add_policy(p) -> None:
    p.add_argument("--recursion-threshold", type=int, default=None,
                   help="facet incidence above which ADM recurses (default 2m)")
    bank = p.add_mutually_exclusive_group()
    bank.add_argument("--bank", dest="bank", action="store_true", default=True, help="use the face bank (default)")
    bank.add_argument("--no-bank", dest="bank", action="store_false", help="disable the face bank")
    p.add_argument("--full-aut-on-faces", action="store_true",
                   help="use full restricted automorphism groups of faces")
    p.add_argument("--plain-dd-max-rays", type=int, default=30,
                   help="use plain double description for domains with at most this many rays")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="perfectforms", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p):
        p.add_argument("--format", choices=("json", "table"), default="table")

    p = sub.add_parser("classify", help="enumerate perfect forms of a dimension")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--max-forms", type=int, default=None, help="close at most this many forms in this run")
    p.add_argument("--wall-clock", type=float, default=None, help="stop after this many seconds")
    start = p.add_mutually_exclusive_group()
    start.add_argument("--resume", metavar="STATE", help="continue from a state file")
    start.add_argument("--overwrite", action="store_true", help="replace an existing state file")
    p.add_argument("--state", help="state file (default $VORONOI_STATE_DIR/classify-d<dim>.json)")
    p.add_argument("--report", help="also write the JSON report here")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--i-know-this-takes-months", action="store_true")
    p.add_argument("-v", "--verbose", action="count", default=0,
                   help="-v: one line per closed form; -vv: also ADM orbit progress")
    _add_policy(p)
    fmt(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("analyze", help="invariants of a single form")
    p.add_argument("form")
    fmt(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("facets", help="facet orbits of a perfect domain")
    p.add_argument("form")
    _add_policy(p)
    fmt(p)
    p.set_defaults(func=cmd_facets)

    p = sub.add_parser("flip", help="perfect neighbour across a facet orbit")
    p.add_argument("form")
    p.add_argument("--facet", type=int, default=0, help="facet orbit index as listed by 'facets'")
    p.add_argument("-o", "--output", help="write the neighbour form file here")
    _add_policy(p)
    fmt(p)
    p.set_defaults(func=cmd_flip)

    p = sub.add_parser("isom", help="arithmetic equivalence of two forms")
    p.add_argument("form_a")
    p.add_argument("form_b")
    fmt(p)
    p.set_defaults(func=cmd_isom)

    p = sub.add_parser("autgroup", help="automorphism group of a form")
    p.add_argument("form")
    fmt(p)
    p.set_defaults(func=cmd_autgroup)

    p = sub.add_parser("dual-desc", help="convert between ray and facet descriptions")
    p.add_argument("cone")
    p.set_defaults(func=cmd_dual_desc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be at least 1")
    try:
        return args.func(args)
    except (CliError, NotPerfectError, pc.DegenerateConeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
