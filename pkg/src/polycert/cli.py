"""Command-line entry point.

Exit codes: 0 means the checked condition holds (strictly or with
equality), 1 means it is violated or a corpus entry failed, 2 means the input
or the request was invalid.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .bundle import (
    BundleError,
    compatibility_check,
    cone_fan,
    bundle_document,
    polytope_bundle,
    stability_verdict,
)
from .concentration import Mode, Overall, agrees_with_oracle, brute_force_oracle, check
from .corpus import compute_flags, corpus_dir, enumerated_entries, load_corpus, verify_entry, write_corpus
from .linalg import fmt_q
from .polytope import (
    LatticePolytope,
    PolytopeError,
    barycenter,
    facets,
    load_polytope,
    normalized_volume,
    polytope_document,
)


class UsageError(Exception):
    pass


def _plain(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _vec(v: Sequence) -> str:
    return ",".join(_plain(x) for x in v)


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=1, sort_keys=True))


def _bundle_summary(P: LatticePolytope) -> dict:
    try:
        fan, data, volumes = polytope_bundle(P)
    except BundleError as exc:
        return {"error": str(exc)}
    verdict = stability_verdict(data, volumes)
    return {"compatible": bool(compatibility_check(fan, data)), **verdict.to_dict()}


def analysis_document(P: LatticePolytope) -> dict:
    """The full self-contained ``analyze --json`` document."""
    flags = compute_flags(P)
    return {
        "input": polytope_document(P),
        "predicates": flags,
        "normalized_volume": normalized_volume(P),
        "barycenter": [fmt_q(x) for x in barycenter(P)],
        "facets": [
            {
                "normal": list(F.normal),
                "offset": F.offset,
                "lattice_volume": F.lattice_volume,
                "vertices": sorted(F.vertex_indices),
            }
            for F in facets(P)
        ],
        "reports": {m.value: check(P, m).to_dict() for m in Mode},
        "bundle": _bundle_summary(P),
    }


# ---------------------------------------------------------------- subcommands


def cmd_analyze(args) -> int:
    P = load_polytope(args.file)
    doc = analysis_document(P)
    if args.json:
        _emit(doc)
        return 0
    print(f"polytope {P.name or args.file} (dim {P.dim}, {len(P.vertices)} vertices)")
    for k, v in doc["predicates"].items():
        print(f"{k}: {str(v).lower()}")
    print(f"normalized volume: {doc['normalized_volume']}")
    print(f"barycenter: {_vec(barycenter(P))}")
    print("facets:")
    for F in facets(P):
        print(f"  normal ({_vec(F.normal)})  offset {F.offset}  volume {F.lattice_volume}")
    print(f"facet volumes: {','.join(str(F.lattice_volume) for F in facets(P))}")
    return 0


def _record_line(rec) -> str:
    sub = rec.subspace
    where = f"point ({_vec(sub.base)})" if rec.dim == 0 and hasattr(sub, "base") else f"span {rec.subspace.basis_ints()}"
    return f"dim {rec.dim} {where} incident {sorted(rec.incident)} lhs {fmt_q(rec.lhs)} rhs {fmt_q(rec.rhs)}"


def cmd_check(args) -> int:
    P = load_polytope(args.file)
    report = check(P, args.mode)
    agree = None
    if args.oracle:
        agree = agrees_with_oracle(report, brute_force_oracle(report.normals, report.volumes, report.mode))
    if args.json:
        doc = {"input": polytope_document(P), **report.to_dict()}
        if agree is not None:
            doc["oracle_agrees"] = agree
        _emit(doc)
    else:
        print(f"mode: {report.mode.value}")
        print(f"rhs: {fmt_q(report.rhs)}")
        print(f"overall: {report.overall.value}")
        for rec in report.witnesses:
            print(f"witness: {_record_line(rec)}")
        for a, b in report.equality_pairs:
            print(f"equality pair: [{_record_line(report.records[a])}] + [{_record_line(report.records[b])}]")
        for a in report.unpaired:
            print(f"unpaired equality: {_record_line(report.records[a])}")
        if agree is not None:
            print(f"oracle: {'agrees' if agree else 'DISAGREES'}")
    if agree is False:
        print("error: candidate evaluation disagrees with the brute-force oracle", file=sys.stderr)
        return 2
    return 1 if report.overall is Overall.VIOLATED else 0


def cmd_bundle(args) -> int:
    P = load_polytope(args.file)
    fan, data, volumes = polytope_bundle(P)
    compat = compatibility_check(fan, data)
    verdict = stability_verdict(data, volumes)
    cf = cone_fan(fan) if args.fan_of_cone else None
    if args.json:
        doc = {
            "input": polytope_document(P),
            "fan": fan.to_dict(),
            "volumes": volumes,
            "filtrations": bundle_document(fan, data),
            "compatible": bool(compat),
            "stability": verdict.to_dict(),
        }
        if cf is not None:
            doc["fan_of_cone"] = {**cf.fan.to_dict(), "smooth": cf.fan.is_smooth()}
        _emit(doc)
        return 0
    print(f"canonical extension of rank {data.rank} over {len(fan.rays)} rays")
    for ray, f in zip(fan.rays, data.filtrations):
        parts = []
        for j, (i, basis) in enumerate(f.steps):
            parts.append(f"i{'<=' if j == 0 else '='}{i}: " + " ".join(f"({_vec(v)})" for v in basis))
        parts.append(f"i>={f.steps[-1][0] + 1}: 0")
        print(f"  ray ({_vec(ray)})  " + "; ".join(parts))
    lines = sum(1 for f in data.filtrations for i, b in f.steps if i == 1 and len(b) == 1)
    print(f"step-1 lines: {lines}")
    print(f"compatibility: {'ok' if compat else 'fails on cone ' + str(compat.failed_cone)}")
    print(f"stability: {verdict.kind.value} (slope {fmt_q(verdict.slope)})")
    for basis, d in verdict.witnesses:
        print(f"  witness span {[list(v) for v in basis]} degree {fmt_q(d)}")
    if cf is not None:
        print(f"fan of the cone: {len(cf.fan.rays)} rays, {len(cf.fan.cones)} maximal cones, smooth {str(cf.fan.is_smooth()).lower()}")
        for r in cf.fan.rays:
            print(f"  ray ({_vec(r)})")
        for c in cf.fan.cones:
            print(f"  cone {list(c)}")
    return 0


def cmd_enumerate(args) -> int:
    if args.dim != 2:
        raise UsageError(f"enumeration supports dimension 2 only, got {args.dim}")
    if args.bound < 2:
        raise UsageError("bound must be at least 2")
    entries = enumerated_entries(args.bound)
    smooth = sum(e.expected["smooth"] for e in entries)
    for e in entries:
        flags = " ".join(f"{k}={str(v).lower()}" for k, v in e.expected.items())
        print(f"{e.name}: {len(e.polytope.vertices)} vertices, volume {normalized_volume(e.polytope)}, {flags}")
    print(f"{len(entries)} classes, {smooth} smooth")
    if args.out:
        write_corpus(entries, args.out)
    return 0


def cmd_verify_corpus(args) -> int:
    directory = Path(args.dir) if args.dir else corpus_dir()
    entries = load_corpus(directory, verify=False)
    if not entries:
        print(f"warning: no corpus entries in {directory}", file=sys.stderr)
        return 0
    failures = 0
    theorem = 0
    for e in entries:
        problems = verify_entry(e)
        flags = compute_flags(e.polytope)
        if not problems and all(flags.values()):
            theorem += 1
        for p in problems:
            print(f"FAIL {p}")
        failures += bool(problems)
    print(f"{len(entries)} entries, {theorem} smooth reflexive centered, {failures} failures")
    return 1 if failures else 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polycert", description="Exact checks on lattice polytopes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="predicates, facet table and barycenter")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("check", help="subspace concentration conditions")
    p.add_argument("file")
    p.add_argument("--mode", choices=[m.value for m in Mode], required=True)
    p.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bundle", help="canonical extension filtrations and stability")
    p.add_argument("file")
    p.add_argument("--fan-of-cone", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bundle)

    p = sub.add_parser("enumerate", help="reflexive polygons up to unimodular equivalence")
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--bound", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("verify-corpus", help="re-verify labels and the theorem on the corpus")
    p.add_argument("--dir", help="corpus directory (default: $POLYCERT_CORPUS_DIR or the bundled data)")
    p.set_defaults(func=cmd_verify_corpus)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args)
    except (PolytopeError, BundleError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
