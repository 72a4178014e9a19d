"""Acceptance criteria 1-9, all exact.

Each test records one PASS/FAIL line; the lines are printed in the pytest
terminal summary and also when this file is run as a script.
"""

from __future__ import annotations

import io
import json
import random
import sys
from contextlib import redirect_stderr, redirect_stdout

import pytest

from polycert import linalg
from polycert.bundle import (
    canonical_extension,
    compatibility_check,
    cone_fan,
    normal_fan,
    polytope_bundle,
    stability_verdict,
)
from polycert.cli import main
from polycert.concentration import (
    Mode,
    Overall,
    agrees_with_oracle,
    brute_force_oracle,
    check,
    check_affine,
    check_lifted,
    evaluate,
    lifted_correspondence,
)
from polycert.corpus import DATA_DIR, compute_flags, enumerate_reflexive_polygons, load_corpus, unimodular_equivalent
from polycert.polytope import (
    barycenter,
    facet_lattice_volume,
    facets,
    is_reflexive,
    is_smooth,
    normalized_volume,
)
from test_linalg import check_hnf, check_snf

RESULTS: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    RESULTS[n] = (ok, detail)
    assert ok, f"criterion {n}: {detail}"


def summary_lines() -> list[str]:
    return [f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}" for n, (ok, detail) in sorted(RESULTS.items())]


def cli(*argv) -> tuple[int, str]:
    out = io.StringIO()
    with redirect_stdout(out), redirect_stderr(io.StringIO()):
        code = main(list(argv))
    return code, out.getvalue()


@pytest.fixture(scope="module")
def entries():
    return load_corpus(DATA_DIR)


def test_criterion_1_triangle_regression():
    problems = []
    code, out = cli("check", str(DATA_DIR / "fig1a.json"), "--mode", "affine", "--json")
    doc = json.loads(out)
    if code != 0 or doc["overall"] != "holds-with-equality":
        problems.append(f"fig1a exit {code} overall {doc['overall']}")
    recs = doc["records"]
    pairs = {}
    for a, b in doc["equality_pairs"]:
        p, line = sorted((recs[a], recs[b]), key=lambda r: r["dim"])
        if p["dim"] == 0 and line["dim"] == 1:
            pairs[tuple(p["incident"])] = tuple(line["incident"])
    want = {(0,): (1, 2), (1,): (0, 2), (2,): (0, 1)}
    if pairs != want:
        problems.append(f"fig1a pairs {pairs}")
    code, out = cli("check", str(DATA_DIR / "fig1b.json"), "--mode", "affine", "--json")
    doc = json.loads(out)
    wit = [r for r in doc["records"] if r["status"] == "violated" and r["dim"] == 0 and r["base"] == ["0/1", "1/1"]]
    if code != 1 or not wit or wit[0]["lhs"] != "2/1" or doc["rhs"] != "4/3":
        problems.append(f"fig1b exit {code} witness {wit} rhs {doc['rhs']}")
    code, _ = cli("check", str(DATA_DIR / "fig1c.json"), "--mode", "affine")
    if code != 0:
        problems.append(f"fig1c exit {code}")
    record(1, not problems, "; ".join(problems) or "fig1a equality pairs, fig1b witness (0,1) 2/1 > 4/3, fig1c holds")


def test_criterion_2_theorem_on_corpus(entries):
    problems = []
    code, _ = cli("verify-corpus", "--dir", str(DATA_DIR))
    if code != 0:
        problems.append(f"verify-corpus exit {code}")
    hyp = [e for e in entries if all(compute_flags(e.polytope).values())]
    names = {e.name for e in hyp}
    if "cube3" not in names:
        problems.append("cube3 missing")
    classes = [P for P in enumerate_reflexive_polygons(3) if is_smooth(P) and not any(barycenter(P))]
    for P in classes:
        if not any(unimodular_equivalent(P, e.polytope) for e in hyp if e.polytope.dim == 2):
            problems.append(f"class {P.vertices} absent from corpus")
    for e in hyp:
        rep = check_affine(e.polytope)
        if rep.overall is Overall.VIOLATED or rep.unpaired:
            problems.append(f"{e.name}: {rep.overall.value}, unpaired {rep.unpaired}")
    record(2, not problems, "; ".join(problems) or f"{len(hyp)} smooth reflexive centered entries, all equalities paired")


def test_criterion_3_bridge(entries):
    problems = []
    smooth = [e for e in entries if is_smooth(e.polytope)]
    bridge = {"unstable": Overall.VIOLATED, "strictly-semistable": Overall.HOLDS_WITH_EQUALITY, "stable": Overall.HOLDS_STRICTLY}
    for e in smooth:
        kind = stability_verdict(*polytope_bundle(e.polytope)[1:]).kind.value
        overall = check_affine(e.polytope).overall
        if bridge[kind] != overall:
            problems.append(f"{e.name}: {kind} vs {overall.value}")
    record(3, not problems, "; ".join(problems) or f"bridge holds on {len(smooth)} smooth entries")


def test_criterion_4_oracle(entries):
    problems = []
    for e in entries:
        for mode in (Mode.AFFINE, Mode.LINEAR):
            rep = check(e.polytope, mode)
            if not agrees_with_oracle(rep, brute_force_oracle(rep.normals, rep.volumes, mode)):
                problems.append(f"{e.name}/{mode.value}")
    rng = random.Random(20240601)
    for t in range(100):
        n = rng.randint(1, 3)
        m = rng.randint(1, 6 if n > 1 else 2)
        normals: set = set()
        while len(normals) < m:
            v = tuple(rng.randint(-3, 3) for _ in range(n))
            if any(v):
                normals.add(linalg.primitive(v))
        normals_l = sorted(normals)
        vols = [rng.randint(1, 9) for _ in normals_l]
        for mode in (Mode.AFFINE, Mode.LINEAR):
            if not agrees_with_oracle(evaluate(normals_l, vols, mode), brute_force_oracle(normals_l, vols, mode)):
                problems.append(f"synthetic {t}/{mode.value}: {normals_l} {vols}")
    record(4, not problems, "; ".join(problems) or f"{len(entries)} entries + 100 synthetic sets agree in both modes")


def test_criterion_5_lifted(entries):
    problems = []
    for e in entries:
        aff, lift = check_affine(e.polytope), check_lifted(e.polytope)
        problems += [f"{e.name}: {p}" for p in lifted_correspondence(aff, lift)]
        if not any(r.subspace.inside_horizontal() for r in lift.records):
            problems.append(f"{e.name}: no horizontal subspace checked")
    record(5, not problems, "; ".join(problems) or f"bijection with equal lhs on {len(entries)} entries, horizontal lhs 0")


def test_criterion_6_filtration_shape(entries):
    problems = []
    count = 0
    for e in entries:
        if not is_smooth(e.polytope):
            continue
        fan = normal_fan(e.polytope)
        data = canonical_extension(fan)
        n = fan.dim
        for v, f in zip(fan.rays, data.filtrations):
            dims = [linalg.rank(f.subspace(i)) if f.subspace(i) else 0 for i in (0, 1, 2)]
            if dims != [n + 1, 1, 0] or linalg.rref(f.subspace(1)) != linalg.rref([tuple(v) + (-1,)]):
                problems.append(f"{e.name}: ray {v} dims {dims}")
        res = compatibility_check(fan, data)
        if not res or set(res.decompositions) != set(fan.cones):
            problems.append(f"{e.name}: incompatible on {res.failed_cone}")
        count += 1
    record(6, not problems, "; ".join(problems) or f"dims (n+1,1,0) and compatibility on {count} smooth fans")


def test_criterion_7_cone_fan(entries):
    problems = []
    fig1a = next(e for e in entries if e.name == "fig1a").polytope
    fan = normal_fan(fig1a)
    Yp = cone_fan(fan)
    Y = cone_fan(fan, include_top=True)
    if set(Yp.fan.rays) != {(1, 0, -1), (0, 1, -1), (-1, -1, -1), (0, 0, 1)}:
        problems.append(f"rays {Yp.fan.rays}")
    minus_max = [Yp.minus[c] for c in fan.cones]
    plus_max = [Yp.plus[c] for c in fan.cones]
    if (len(minus_max), len(plus_max)) != (3, 3):
        problems.append(f"maximal sigma counts {len(minus_max)}+{len(plus_max)}")
    if len(Yp.all_cones()) != 14 or () not in Yp.all_cones() or (Yp.lone_ray,) not in Yp.all_cones():
        problems.append(f"{len(Yp.all_cones())} cones in Y'")
    extra = set(Y.all_cones()) - set(Yp.all_cones())
    if len(Y.all_cones()) != len(Yp.all_cones()) + 1 or len(extra) != 1:
        problems.append(f"Y adds {extra}")
    if not Yp.fan.is_smooth():
        problems.append("Y' not smooth")
    record(7, not problems, "; ".join(problems) or "4 rays, 3+3 cones plus origin and lone ray, Y adds one, Y' smooth")


def test_criterion_8_enumerator():
    reps = enumerate_reflexive_polygons(3)
    problems = []
    smooth = sum(bool(is_smooth(P)) for P in reps)
    if (len(reps), smooth) != (16, 5):
        problems.append(f"{len(reps)} classes, {smooth} smooth")
    if not all(is_reflexive(P) for P in reps):
        problems.append("non-reflexive output")
    for i, P in enumerate(reps):
        for Q in reps[i + 1:]:
            if unimodular_equivalent(P, Q) is not None:
                problems.append(f"{P.name} ~ {Q.name}")
    record(8, not problems, "; ".join(problems) or "16 classes, 5 smooth, all reflexive, pairwise inequivalent")


def _verdicts(P) -> tuple:
    flags = tuple(compute_flags(P).values())
    reports = tuple(check(P, m).overall for m in Mode)
    vols = tuple(sorted(F.lattice_volume for F in facets(P)))
    kind = stability_verdict(*polytope_bundle(P)[1:]).kind if flags[1] else None
    return flags, reports, vols, normalized_volume(P), kind


def test_criterion_9_properties(entries):
    problems = []
    rng = random.Random(9)
    for _ in range(1000):
        A = [[rng.randint(-9, 9) for _ in range(rng.randint(1, 4))]]
        A += [[rng.randint(-9, 9) for _ in A[0]] for _ in range(rng.randint(1, 4) - 1)]
        try:
            check_hnf(A)
            check_snf(A)
        except AssertionError:
            problems.append(f"normal form identity fails on {A}")
    for e in entries:
        P = e.polytope
        total = [0] * P.dim
        for F in facets(P):
            total = [t + F.lattice_volume * x for t, x in zip(total, F.normal)]
        if any(total):
            problems.append(f"{e.name}: closure {total}")
        b = barycenter(P)
        if any(barycenter(P, apex) != b for apex in range(len(P.vertices))):
            problems.append(f"{e.name}: apex dependence")
        for F in facets(P):
            B = linalg.kernel_lattice_basis([list(F.normal)])
            U = linalg.random_unimodular(rng, len(B)) if B else []
            B2 = [tuple(sum(U[i][k] * B[k][j] for k in range(len(B))) for j in range(P.dim)) for i in range(len(B))]
            if facet_lattice_volume(P, F, B2) != F.lattice_volume:
                problems.append(f"{e.name}: facet volume basis dependence")
        base = _verdicts(P)
        for _ in range(20):
            U = linalg.random_unimodular(rng, P.dim)
            if _verdicts(P.transform(U)) != base:
                problems.append(f"{e.name}: verdict changes under {U}")
                break
    record(9, not problems, "; ".join(problems[:5]) or "HNF/SNF x1000, closure, apex, facet basis, 20 maps per entry")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
