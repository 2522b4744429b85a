"""Polars, meridians, centrosomes and Cartan maps."""
import math

import numpy as np
import pytest

from rank2geo.catalog import construct_tangent, expected_signature, compare_fingerprint, load_catalog
from rank2geo.constructions import (
    cartan_map_check,
    center_residual,
    centrosome_sample,
    geodesic_reflection,
    meridian_at,
    polar_components,
    pole_residual,
)
from rank2geo.curvature import lts_defect, subspace_distance
from rank2geo.errors import UnsupportedAmbient, UnsupportedPair
from rank2geo.numlin import mat_exp
from rank2geo.recipes import CARTAN_PAIRS
from rank2geo.roots import fingerprint
from rank2geo.symspace import get_space, sp_basis

GRASSMANN = ["g2r:3", "g2r:4", "g2c:2", "g2c:3", "g2h:2"]


def fp_key(model, T):
    return fingerprint(model, T, n_planes=100).key()


class TestGeodesicReflection:
    @pytest.mark.parametrize("sid", GRASSMANN)
    def test_involutive(self, sid):
        assert geodesic_reflection(get_space(sid)).check_involutive()

    def test_rejects_other_families(self):
        with pytest.raises(UnsupportedAmbient):
            polar_components(get_space("ai"))


@pytest.mark.parametrize("sid", GRASSMANN)
class TestPolars:
    def test_components_are_lts(self, sid):
        m = get_space(sid)
        for comp in polar_components(m):
            assert lts_defect(m, comp.tangent) < 1e-8
            assert lts_defect(m, meridian_at(m, comp)) < 1e-8

    def test_meridian_is_complement(self, sid):
        m = get_space(sid)
        for comp in polar_components(m):
            M = meridian_at(m, comp)
            assert comp.tangent.dim + M.dim == m.dim_p
            if comp.tangent.dim and M.dim:
                assert np.abs(comp.tangent.basis @ M.basis.T).max() < 1e-9

    def test_base_plane_excluded(self, sid):
        assert all(c.meet_dim < 2 or c.is_pole for c in polar_components(get_space(sid)))


class TestPolarExamples:
    @pytest.mark.parametrize("sid", ["g2c:2", "g2h:2"])
    def test_orthogonal_plane_is_a_pole(self, sid):
        poles = [c for c in polar_components(get_space(sid)) if c.meet_dim == 0]
        assert len(poles) == 1 and poles[0].is_pole
        M = meridian_at(get_space(sid), poles[0])
        assert M.dim == get_space(sid).dim_p

    def test_meridian_of_pole_is_full_space(self):
        m = get_space("g2r:3")
        pole = [c for c in polar_components(m) if c.is_pole][0]
        assert subspace_distance(meridian_at(m, pole).basis, np.eye(m.dim_p)) < 1e-12

    @pytest.mark.parametrize("n", [3, 4])
    def test_polar_is_smaller_grassmannian(self, n):
        m = get_space(f"g2r:{n}")
        comp = [c for c in polar_components(m) if c.meet_dim == 0][0]
        ref = get_space(f"g2r:{n - 2}")
        a = fingerprint(m, comp.tangent, n_planes=100)
        b = fingerprint(ref, np.eye(ref.dim_p), n_planes=100)
        assert a.key() == b.key()
        assert a.distance(b) < 1e-6

    def test_grassmann_meridian_rank(self):
        m = get_space("g2r:4")
        comp = [c for c in polar_components(m) if c.meet_dim == 0][0]
        assert fingerprint(m, meridian_at(m, comp), n_planes=100).rank == 2

    def test_meridian_of_line_polar(self):
        m = get_space("g2r:3")
        comp = [c for c in polar_components(m) if c.meet_dim == 1][0]
        assert lts_defect(m, meridian_at(m, comp)) < 1e-8


class TestCentrosome:
    def test_quaternionic_centrosome(self):
        m = get_space("g2h:2")
        T, info = centrosome_sample(m, return_info=True)
        assert T.dim == 10
        assert info["pole_residual"] < 1e-8 and info["center_residual"] < 1e-8
        e = load_catalog().by_id("g2h/item5a")
        assert all(c.passed for c in compare_fingerprint(fingerprint(m, T), expected_signature(e, {"n": 2})))

    def test_complement_has_flat_circle(self):
        m = get_space("g2h:2")
        fp = fingerprint(m, centrosome_sample(m).complement())
        assert fp.rank == 2 and fp.flat_dim == 1

    def test_complex_centrosome(self):
        T = centrosome_sample(get_space("g2c:2"))
        assert T.dim == 4

    def test_midpoints_reflect_poles(self, rng):
        m = get_space("g2h:2")
        for _ in range(5):
            A = np.einsum("i,ijk->jk", rng.standard_normal(10), sp_basis(2))
            Q = mat_exp(A)
            assert center_residual(m, Q) < 1e-8
            assert pole_residual(m, Q) < 1e-8

    def test_other_spaces_rejected(self):
        with pytest.raises(UnsupportedAmbient):
            centrosome_sample(get_space("g2c:3"))


class TestCartanMap:
    @pytest.mark.parametrize("pair", sorted(CARTAN_PAIRS))
    def test_image_is_lts(self, pair):
        fam, inner = pair
        m = get_space(fam)
        T = cartan_map_check(m, inner)
        assert lts_defect(m, T) < 1e-8

    @pytest.mark.parametrize("fam,inner,dim", [("grp-su3", "ai", 5), ("grp-su3", "cp2", 4),
                                               ("grp-sp2", "g2r5", 6), ("grp-sp2", "hp1", 4),
                                               ("grp-g2", "gi", 8)])
    def test_image_dimension(self, fam, inner, dim):
        assert cartan_map_check(get_space(fam), inner).dim == dim

    def test_real_form_image_matches_model(self):
        m = get_space("grp-su3")
        ai = get_space("ai")
        a = fingerprint(m, cartan_map_check(m, "ai"))
        b = fingerprint(ai, np.eye(ai.dim_p))
        assert a.key() == b.key()

    def test_unknown_pair(self):
        with pytest.raises(UnsupportedPair):
            cartan_map_check(get_space("grp-su3"), "gi")

    def test_quaternionic_line_is_round(self):
        m = get_space("grp-sp2")
        fp = fingerprint(m, cartan_map_check(m, "hp1"))
        assert fp.rank == 1 and fp.curv_min == pytest.approx(fp.curv_max, abs=1e-9)
        assert fp.radius is not None and math.isfinite(fp.radius)
