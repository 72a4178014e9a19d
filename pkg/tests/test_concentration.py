from __future__ import annotations

import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from polycert import linalg
from polycert.concentration import (
    AffineSubspace,
    LinearSubspace,
    Mode,
    Overall,
    Status,
    agrees_with_oracle,
    brute_force_oracle,
    candidate_subspaces,
    check_affine,
    check_lifted,
    check_linear,
    evaluate,
    lifted_correspondence,
)
from polycert.polytope import LatticePolytope, facets
from strategies import normal_volume_sets, polytopes, primitive_vectors, unimodular


def _record(report, predicate):
    (rec,) = [r for r in report.records if predicate(r)]
    return rec


def _point(report, p):
    return _record(report, lambda r: r.dim == 0 and r.subspace.base == tuple(Fraction(x) for x in p))


def _span(report, *vecs):
    key = linalg.rref(vecs)
    return _record(report, lambda r: r.subspace.dirs == key and not isinstance(r.subspace, AffineSubspace))


class TestCandidates:
    def test_fig1a_affine(self):
        c = candidate_subspaces([(1, 0), (0, 1), (-1, -1)], "affine")
        assert [S.dim for S, _ in c] == [0, 0, 0, 1, 1, 1]

    def test_single_normal(self):
        c = candidate_subspaces([(1, 0)], Mode.AFFINE)
        assert len(c) == 1 and c[0][1] == {0}

    def test_fig1b_linear(self):
        c = candidate_subspaces([(0, 1), (-2, -1), (2, -1)], Mode.LINEAR)
        assert len(c) == 3 and all(S.dim == 1 for S, _ in c)

    def test_incidence_is_full(self):
        # three collinear normals: the line through two contains the third
        c = candidate_subspaces([(1, 0), (0, 1), (-1, 2)], Mode.AFFINE)
        lines = [inc for S, inc in c if S.dim == 1]
        assert frozenset({0, 1, 2}) in lines and len(lines) == 1

    def test_empty(self):
        with pytest.raises(ValueError):
            candidate_subspaces([], Mode.AFFINE)


class TestAffine:
    def test_fig1a(self, fig1a):
        rep = check_affine(fig1a)
        assert rep.overall is Overall.HOLDS_WITH_EQUALITY
        assert rep.rhs == 3 and all(r.status is Status.EQUALITY for r in rep.records)
        A = _point(rep, (0, 1))
        assert A.lhs == 3
        partner = {b for a, b in rep.equality_pairs if rep.records[a] is A}
        assert len(partner) == 1
        line = rep.records[partner.pop()]
        assert line.dim == 1 and line.lhs == Fraction(3 + 3, 2)
        assert line.subspace.contains((1, 0)) and line.subspace.contains((-1, -1))
        assert not rep.unpaired and not rep.contradicts_theorem

    def test_fig1a_pairs_each_point_with_opposite_line(self, fig1a):
        rep = check_affine(fig1a)
        assert len(rep.equality_pairs) == 3
        for a, b in rep.equality_pairs:
            p, line = rep.records[a], rep.records[b]
            assert p.dim == 0 and line.dim == 1 and not (p.incident & line.incident)

    def test_fig1b(self, fig1b):
        rep = check_affine(fig1b)
        assert rep.overall is Overall.VIOLATED
        A = _point(rep, (0, 1))
        assert A.status is Status.VIOLATED and (A.lhs, A.rhs) == (2, Fraction(4, 3))
        assert not rep.hypotheses_met

    def test_fig1c(self, fig1c):
        rep = check_affine(fig1c)
        assert rep.overall is Overall.HOLDS_WITH_EQUALITY
        assert rep.rhs == 1 and all(r.lhs == 1 for r in rep.records)

    def test_report_serialization(self, fig1b):
        doc = check_affine(fig1b).to_dict()
        assert json.loads(json.dumps(doc)) == doc
        assert doc["rhs"] == "4/3" and doc["overall"] == "violated"
        assert all("/" in r["lhs"] for r in doc["records"])


class TestLinear:
    def test_fig1a(self, fig1a):
        rep = check_linear(fig1a)
        assert rep.overall is Overall.HOLDS_STRICTLY
        assert rep.rhs == Fraction(9, 2) and all(r.lhs == 3 for r in rep.records)

    def test_square(self):
        rep = check_linear(LatticePolytope(((-1, -1), (1, -1), (1, 1), (-1, 1))))
        x = _span(rep, (1, 0))
        y = _span(rep, (0, 1))
        assert x.lhs == 4 == rep.rhs and y.status is Status.EQUALITY
        pair = tuple(sorted((rep.records.index(x), rep.records.index(y))))
        assert pair in rep.equality_pairs

    def test_fig1b_unpaired(self, fig1b):
        rep = check_linear(fig1b)
        r = _span(rep, (0, 1))
        assert (r.lhs, rep.rhs) == (2, 2) and r.status is Status.EQUALITY
        assert rep.unpaired == [rep.records.index(r)]
        assert not rep.contradicts_theorem


class TestLifted:
    def test_fig1a(self, fig1a):
        rep = check_lifted(fig1a)
        assert _span(rep, (0, 1, -1)).lhs == 3 == rep.rhs
        horiz = [r for r in rep.records if r.subspace.inside_horizontal()]
        assert horiz and all(r.lhs == 0 for r in horiz)
        assert lifted_correspondence(check_affine(fig1a), rep) == []

    def test_fig1b(self, fig1b):
        rep = check_lifted(fig1b)
        assert rep.overall is Overall.VIOLATED
        assert _span(rep, (0, 1, -1)).status is Status.VIOLATED

    def test_slice(self):
        W = LinearSubspace.spanned_by([(1, 0, -1), (0, 1, -1)], 3)
        A = W.slice_at_minus_one()
        assert A == AffineSubspace.spanned_by([(1, 0), (0, 1)])
        assert A.lift() == W

    @given(polytopes(dim=2, box=3))
    def test_correspondence_2d(self, P):
        assert lifted_correspondence(check_affine(P), check_lifted(P)) == []

    @given(polytopes(dim=3, box=1, max_points=8))
    def test_correspondence_3d(self, P):
        assert lifted_correspondence(check_affine(P), check_lifted(P)) == []


class TestOracle:
    def test_fig1a_fig1b(self, fig1a, fig1b):
        for P in (fig1a, fig1b):
            rep = check_affine(P)
            orc = brute_force_oracle(rep.normals, rep.volumes, Mode.AFFINE)
            assert agrees_with_oracle(rep, orc)
        assert brute_force_oracle(rep.normals, rep.volumes, "affine").overall is Overall.VIOLATED

    def test_single(self):
        assert len(brute_force_oracle([(1, 0)], [5], Mode.AFFINE).records) == 1

    def test_limit(self):
        normals = [(1, k) for k in range(21)]
        with pytest.raises(ValueError):
            brute_force_oracle(normals, [1] * 21, Mode.LINEAR)

    @given(normal_volume_sets(), st.sampled_from([Mode.AFFINE, Mode.LINEAR]))
    def test_synthetic_agreement(self, data, mode):
        normals, volumes = data
        assert agrees_with_oracle(evaluate(normals, volumes, mode), brute_force_oracle(normals, volumes, mode))

    @given(polytopes(dim=2, box=3))
    def test_polytope_agreement(self, P):
        for mode in (Mode.AFFINE, Mode.LINEAR):
            rep = check_affine(P) if mode is Mode.AFFINE else check_linear(P)
            assert agrees_with_oracle(rep, brute_force_oracle(rep.normals, rep.volumes, mode))


class TestProperties:
    @given(normal_volume_sets(), st.sampled_from([Mode.AFFINE, Mode.LINEAR]), st.integers(1, 20))
    def test_monotone_in_witness_span(self, data, mode, extra):
        normals, volumes = data
        rep = evaluate(normals, volumes, mode)
        if rep.overall is not Overall.VIOLATED:
            return
        k = min(rep.witnesses[0].incident)
        bumped = list(volumes)
        bumped[k] += extra
        assert evaluate(normals, bumped, mode).overall is Overall.VIOLATED

    @given(polytopes(dim=2, box=3), unimodular(2))
    def test_unimodular_invariance(self, P, U):
        Q = P.transform(U)
        for check in (check_affine, check_linear):
            a, b = check(P), check(Q)
            assert a.overall == b.overall
            assert sorted((r.dim, r.lhs) for r in a.records) == sorted((r.dim, r.lhs) for r in b.records)

    @given(polytopes(dim=2, box=3), unimodular(2))
    def test_normals_transform_contragrediently(self, P, U):
        Uinv_t = linalg.transpose(linalg.inverse(U))
        mapped = {tuple(int(x) for x in linalg.matvec(Uinv_t, F.normal)) for F in facets(P)}
        assert mapped == {F.normal for F in facets(P.transform(U))}

    @given(st.lists(primitive_vectors(2), min_size=1, max_size=5, unique=True), st.data())
    def test_overall_matches_records(self, normals, data):
        volumes = data.draw(st.lists(st.integers(1, 9), min_size=len(normals), max_size=len(normals)))
        rep = evaluate(normals, volumes, Mode.AFFINE)
        assert (rep.overall is Overall.VIOLATED) == any(r.status is Status.VIOLATED for r in rep.records)
        for r in rep.records:
            assert r.lhs == Fraction(sum(volumes[k] for k in r.incident), r.dim + 1)
            assert r.rhs == Fraction(sum(volumes), 3)


@pytest.mark.parametrize("mode", [Mode.AFFINE, Mode.LINEAR])
def test_monotone_on_corpus(corpus, mode):
    hits = 0
    for e in corpus:
        rep = evaluate([F.normal for F in facets(e.polytope)], [F.lattice_volume for F in facets(e.polytope)], mode)
        if rep.overall is not Overall.VIOLATED:
            continue
        for w in rep.witnesses:
            for k in w.incident:
                for extra in (1, 5):
                    bumped = list(rep.volumes)
                    bumped[k] += extra
                    assert evaluate(rep.normals, bumped, mode).overall is Overall.VIOLATED
                    hits += 1
    assert mode is Mode.LINEAR or hits > 0
