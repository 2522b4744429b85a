"""Maximal abelian subspaces, restricted roots, fingerprints and periods."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rank2geo.catalog import construct_tangent, load_catalog
from rank2geo.curvature import jacobi_operator, tangent_subspace
from rank2geo.errors import NotAnLTS
from rank2geo.recipes import product_factors
from rank2geo.roots import (
    Fingerprint,
    de_rham_factors,
    factor_orthogonality,
    fingerprint,
    flat_directions,
    geodesic_period,
    maximal_abelian,
    restricted_roots,
    root_datum,
)
from rank2geo.symspace import build_space, get_space, registry


def entry(entry_id, **inst):
    e = load_catalog().by_id(entry_id)
    return e, construct_tangent(e, inst or None)


def lengths(rd):
    return [round(l, 6) for l, m in rd.lengths() for _ in range(m)]


class TestMaximalAbelian:
    @pytest.mark.parametrize("sid", ["ai", "g2r:4", "g2c:3", "gi", "grp-g2", "diii"])
    def test_full_tangent_space_has_rank_two(self, sid):
        m = get_space(sid)
        a = maximal_abelian(m, np.eye(m.dim_p))
        assert a.shape[0] == 2
        br = np.einsum("abk,a,b->k", m.p_bracket_k, a[0], a[1])
        assert np.abs(br).max() < 1e-9

    def test_sphere_has_rank_one(self):
        _, T = entry("g2r/item2", n=3)
        assert maximal_abelian(T.model, T).shape[0] == 1

    def test_line(self, rng):
        m = get_space("g2r:3")
        v = rng.standard_normal(m.dim_p)
        a = maximal_abelian(m, tangent_subspace(m, v))
        assert a.shape[0] == 1 and abs(abs(a[0] @ v) - np.linalg.norm(v)) < 1e-10

    def test_requires_lts(self, rng):
        m = get_space("g2r:3")
        with pytest.raises(NotAnLTS):
            maximal_abelian(m, tangent_subspace(m, rng.standard_normal((2, 6))))


class TestRestrictedRoots:
    def test_b2_pattern(self):
        rd = root_datum(get_space("g2r:3", "srr1"))
        s2 = round(math.sqrt(2), 6)
        assert lengths(rd) == [1.0, 1.0, s2, s2]
        assert rd.zero_dim == 2

    def test_multiplicity_count(self):
        # each +/- pair contributes its multiplicity once to p, plus dim a
        for sid in ("g2r:5", "g2c:3", "g2h:2", "aii", "diii", "grp-sp2"):
            m = get_space(sid)
            rd = root_datum(m)
            assert sum(mm for _, mm in rd.lengths()) + rd.rank == m.dim_p

    def test_roots_closed_under_negation(self):
        rd = root_datum(get_space("gi"))
        for alpha in rd.roots:
            assert np.min(np.linalg.norm(rd.roots + alpha, axis=1)) < 1e-9

    def test_g2c2_short_roots_vanish(self):
        rd = root_datum(get_space("g2c:2", "srr1star"))
        ls = lengths(rd)
        assert min(ls) == pytest.approx(math.sqrt(2), abs=1e-6)
        assert 1.0 not in ls

    def test_g2_type_ratio(self):
        ls = lengths(root_datum(get_space("gi")))
        assert max(ls) / min(ls) == pytest.approx(math.sqrt(3), abs=1e-6)

    def test_seed_independence(self):
        for sid in ("g2c:4", "gi", "grp-su3"):
            m = get_space(sid)
            a = lengths(root_datum(m, seed=1))
            b = lengths(root_datum(m, seed=99))
            assert np.allclose(a, b, atol=1e-6)

    def test_flat_subspace_has_no_roots(self):
        m = get_space("ai")
        a = root_datum(m).a_basis
        rd = restricted_roots(m, a, a)
        assert len(rd.roots) == 0 and rd.zero_dim == 2

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0.05, 20.0))
    def test_scaling_keeps_ratios(self, c):
        base = build_space("g2r:4")
        ref = root_datum(base).lengths()
        got = root_datum(base.with_scale(c)).lengths()
        assert [m for _, m in got] == [m for _, m in ref]
        r0 = np.array([l for l, _ in ref])
        r1 = np.array([l for l, _ in got])
        assert np.allclose(r1 / r1[0], r0 / r0[0], atol=1e-8)


class TestFingerprint:
    def test_sphere_radius_sqrt5(self):
        _, T = entry("g2r/item6", n=3)
        fp = fingerprint(T.model, T)
        assert fp.dim == 2 and fp.rank == 1
        assert fp.curv_min == pytest.approx(0.2, abs=1e-6)
        assert fp.curv_max == pytest.approx(0.2, abs=1e-6)
        assert fp.radius == pytest.approx(math.sqrt(5), abs=1e-6)

    def test_real_projective_plane(self):
        _, T = entry("ai/item2")
        fp = fingerprint(T.model, T)
        assert fp.curv_min == pytest.approx(0.25, abs=1e-6)
        assert fp.curv_max == pytest.approx(0.25, abs=1e-6)

    def test_complex_projective_plane(self):
        _, T = entry("g2c/item7", n=4)
        fp = fingerprint(T.model, T)
        assert fp.curv_min == pytest.approx(0.2, abs=1e-5)
        assert fp.curv_max == pytest.approx(0.8, abs=1e-5)
        assert fp.curv_min - 1e-9 <= fp.sampled_min <= fp.sampled_max <= fp.curv_max + 1e-9

    def test_deterministic(self):
        _, T = entry("g2c/item3", n=3)
        assert fingerprint(T.model, T, seed=3).to_dict() == fingerprint(T.model, T, seed=3).to_dict()

    def test_dict_round_trip(self):
        _, T = entry("g2r/item3", n=3, l=1)
        fp = fingerprint(T.model, T)
        assert Fingerprint.from_dict(fp.to_dict()).to_dict() == fp.to_dict()
        assert Fingerprint.from_dict(fp.to_dict()).distance(fp) < 1e-9

    def test_distance_separates_discrete_data(self):
        a = Fingerprint(2, 1, [(1.0, 1)], 1.0, 1.0, 0)
        b = Fingerprint(2, 2, [], 0.0, 0.0, 2)
        assert a.distance(b) == math.inf
        assert a.distance(a) == 0.0

    def test_invariants(self):
        for sid in ("ai", "gi", "g2r:3"):
            m = get_space(sid)
            fp = fingerprint(m, np.eye(m.dim_p), n_planes=200)
            assert 1 <= fp.rank <= fp.dim and fp.curv_min <= fp.curv_max


class TestProducts:
    @pytest.mark.parametrize("eid,inst", [("g2r/item3", {"n": 4, "l": 2}), ("g2c/item4", {"n": 3, "l": 1}),
                                          ("g2h/item4", {"n": 2, "l": 1})])
    def test_factor_orthogonality(self, eid, inst):
        e, T = entry(eid, **inst)
        f1, f2 = product_factors(T.model, e.recipe.params, inst)
        assert factor_orthogonality(T.model, f1, f2) < 1e-8

    def test_de_rham_splits_sphere_product(self):
        _, T = entry("g2r/item3", n=4, l=2)
        dims = sorted(f.dim for f in de_rham_factors(T.model, T))
        assert dims == [2, 2]

    def test_de_rham_flat_part_last(self):
        _, T = entry("g2r/item3", n=4, l=1)
        parts = de_rham_factors(T.model, T)
        assert [p.dim for p in parts] == [3, 1]

    def test_flat_directions(self):
        m = get_space("ai")
        assert flat_directions(m, np.eye(m.dim_p)).shape[0] == 0
        _, T = entry("ai/item1")
        assert flat_directions(m, T).shape[0] == 1


class TestGeodesicPeriod:
    def test_unit_sphere(self):
        for n in (2, 3):
            _, T = entry("g2r/item2", n=n)
            assert geodesic_period(T.model, T.basis[0]) == pytest.approx(2 * math.pi, abs=1e-6)

    @pytest.mark.parametrize("sid", ["ai", "gi", "g2r:3"])
    def test_root_vector_period(self, sid):
        m = get_space(sid)
        rd = root_datum(m)
        c = np.array([0.3, 0.8])
        w, v = np.linalg.eigh(jacobi_operator(m, c @ rd.a_basis))
        # the top eigenvector lies in the root space of the root maximizing alpha(h)^2
        alpha = max((a for a, _ in rd.positive()), key=lambda a: (a @ c) ** 2)
        assert w[-1] == pytest.approx((alpha @ c) ** 2, rel=1e-8)
        assert geodesic_period(m, v[:, -1]) == pytest.approx(2 * math.pi / np.linalg.norm(alpha), abs=1e-6)

    def test_scale_invariant_in_direction(self):
        _, T = entry("g2r/item2", n=2)
        assert geodesic_period(T.model, 5 * T.basis[0]) == pytest.approx(2 * math.pi, abs=1e-6)


def test_registry_roots_normalized():
    for sid in registry():
        m = get_space(sid, "srr1")
        assert min(l for l, _ in root_datum(m).lengths()) == pytest.approx(1.0, abs=1e-9)
