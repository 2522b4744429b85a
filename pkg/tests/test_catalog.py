"""Catalog data, expected signatures and entry verification."""
import json
import math
from collections import defaultdict

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rank2geo.catalog import (
    Catalog,
    CatalogEntry,
    Check,
    EntryResult,
    compare_fingerprint,
    construct_tangent,
    default_catalog_path,
    dumps_catalog,
    evaluate,
    expected_signature,
    item_counts,
    load_catalog,
    loads_catalog,
    period_matches,
    signature,
    verify_entry,
)
from rank2geo.curvature import lts_defect
from rank2geo.errors import RecipeUnavailable, UnsupportedSpace
from rank2geo.roots import Fingerprint, fingerprint
from rank2geo.symspace import registry

# G2(F^3) is isometric to FP^2, so at n = 2 the first item repeats a projective one
LOW_DIM_COINCIDENCES = {
    frozenset({"g2r:2/item1", "g2r:2/item2"}),
    frozenset({"g2c:2/item1", "g2c:2/item3"}),
    frozenset({"g2h:2/item1", "g2h:2/item3"}),
}


@pytest.fixture(scope="module")
def cat():
    return load_catalog()


class TestExpressions:
    @pytest.mark.parametrize("expr,env,val", [("n-1", {"n": 4}, 3), ("2/3*sqrt(21)", {}, 2 / 3 * math.sqrt(21)),
                                              ("n >= 2 and n % 2 == 0", {"n": 4}, True),
                                              ("1/sqrt(2)", {}, 1 / math.sqrt(2)), ("-l", {"l": 2}, -2)])
    def test_values(self, expr, env, val):
        assert evaluate(expr, env) == pytest.approx(val)

    @pytest.mark.parametrize("expr", ["__import__('os')", "n.real", "open('x')", "[1, 2]"])
    def test_rejects_non_arithmetic(self, expr):
        with pytest.raises(ValueError):
            evaluate(expr, {"n": 1})

    def test_unknown_variable(self):
        with pytest.raises(ValueError):
            evaluate("m + 1", {"n": 1})


class TestData:
    def test_round_trip_bit_exact(self, cat):
        text = default_catalog_path().read_text(encoding="utf-8")
        assert dumps_catalog(loads_catalog(text)) == text
        assert dumps_catalog(cat) == text

    def test_completeness(self, cat):
        expected = {"g2r": 6, "g2c": 7, "g2h": 7, "ai": 2, "aii": 4, "diii": 5, "gi": 4,
                    "grp-su3": 4, "grp-sp2": 4, "grp-g2": 4, "eiii": 6, "eiv": 4}
        assert item_counts(cat) == expected

    def test_ids_unique(self, cat):
        ids = [e.id for e in cat.entries]
        assert len(ids) == len(set(ids))

    def test_statuses(self, cat):
        out = {e.id for e in cat.entries if e.status == "out-of-scope"}
        assert out == {e.id for e in cat.entries if e.ambient in ("eiii", "eiv")}
        assert {e.id for e in cat.entries if e.status == "stretch"} == {"g2h/item6", "g2h/item7"}

    def test_every_value_has_a_source(self, cat):
        def walk(node):
            if isinstance(node, dict):
                if "value" in node:
                    assert node.get("source") in ("listed", "derived")
                for v in node.values():
                    walk(v)
            elif isinstance(node, list):
                for v in node:
                    walk(v)

        for e in cat.entries:
            walk(e.expected)

    def test_instances_satisfy_applicability(self, cat):
        for e in cat.entries:
            for inst in e.instances:
                assert e.applies_to(inst), e.instance_id(inst)

    def test_instances_live_in_registered_spaces(self, cat):
        known = {str(s) for s in registry()}
        for e in cat.entries:
            if e.status in ("out-of-scope", "stretch"):
                continue
            for inst in e.instances:
                assert e.space_id(inst) in known

    def test_unknown_status_rejected(self, cat):
        d = cat.entries[0].to_dict()
        d["status"] = "guessed"
        with pytest.raises(ValueError):
            CatalogEntry.from_dict(d)

    def test_lookup(self, cat):
        assert cat.by_id("ai/item2").label.startswith("RP^2")
        assert len(cat.for_family("ai")) == 2
        with pytest.raises(KeyError):
            cat.by_id("ai/item9")

    def test_instance_ids(self, cat):
        e = cat.by_id("g2r/item3")
        assert e.instance_id({"n": 4, "l": 1}) == "g2r:4/item3@l=1"
        assert cat.by_id("gi/item1").instance_id({}) == "gi/item1"


class TestSignatures:
    def test_sphere(self):
        s = signature({"type": "sphere", "dim": "3", "r": "2"}, {})
        assert (s.dim, s.rank, s.flat_dim) == (3, 1, 0)
        assert s.curvature_range() == pytest.approx((0.25, 0.25))

    def test_circle_from_sphere(self):
        s = signature({"type": "sphere", "dim": "1", "r": "sqrt(3)"}, {})
        assert s.flat_dim == 1 and s.circles == [pytest.approx(math.sqrt(3))]

    @pytest.mark.parametrize("t,d,lo,hi", [("cp", 4, 0.5, 2.0), ("hp", 8, 0.5, 2.0), ("rp", 2, 0.5, 0.5)])
    def test_projective(self, t, d, lo, hi):
        s = signature({"type": t, "dim": "2", "kappa": "1/2"}, {})
        assert s.dim == d and s.curvature_range() == pytest.approx((lo, hi))

    def test_projective_line_is_round(self):
        s = signature({"type": "hp", "dim": "1", "kappa": "1/2"}, {})
        assert s.dim == 4 and s.curvature_range() == pytest.approx((2.0, 2.0))

    def test_product_adds_up(self):
        spec = {"type": "product", "factors": [{"type": "sphere", "dim": "2", "r": "1"},
                                               {"type": "sphere", "dim": "1", "r": "sqrt(3)"}]}
        s = signature(spec, {})
        assert (s.dim, s.rank, s.flat_dim) == (3, 2, 1)

    def test_space_reference_scales_roots(self):
        a = signature({"type": "space", "space": "g2r:3", "srr": "1", "convention": "srr1"}, {})
        b = signature({"type": "space", "space": "g2r:3", "srr": "sqrt(2)", "convention": "srr1"}, {})
        assert [x * math.sqrt(2) for x in a.lengths] == pytest.approx(b.lengths)

    def test_templated_space(self, cat):
        s = expected_signature(cat.by_id("g2c/item1"), {"n": 4})
        assert s.dim == 12

    def test_unchecked(self):
        with pytest.raises(UnsupportedSpace):
            signature({"type": "unchecked"}, {})

    def test_unknown_type(self):
        with pytest.raises(ValueError):
            signature({"type": "torus"}, {})

    @given(st.floats(0.1, 10.0), st.sampled_from([1, 2, 4]))
    def test_period_matches_quotients(self, r, k):
        assert period_matches(2 * math.pi * r / k, r)
        assert not period_matches(2 * math.pi * r / 3, r)


class TestComparison:
    def test_exact_match_passes(self):
        fp = Fingerprint(2, 1, [(0.5, 1)], 0.25, 0.25, 0, 0.25, 0.25)
        sig = signature({"type": "sphere", "dim": "2", "r": "2"}, {})
        assert all(c.passed for c in compare_fingerprint(fp, sig))

    def test_root_length_mismatch_fails(self):
        fp = Fingerprint(2, 1, [(0.6, 1)], 0.36, 0.36, 0)
        sig = signature({"type": "sphere", "dim": "2", "r": "2"}, {})
        failed = {c.name for c in compare_fingerprint(fp, sig) if not c.passed}
        assert failed == {"root_lengths", "curvature_range"}

    def test_check_serializes(self):
        d = Check("dim", 2, 3, False).to_dict()
        assert json.loads(json.dumps(d)) == d


class TestConstruction:
    def test_search_only_routes_to_search(self, cat):
        with pytest.raises(RecipeUnavailable):
            construct_tangent(cat.by_id("gi/item3"))

    def test_out_of_scope(self, cat):
        with pytest.raises(UnsupportedSpace):
            construct_tangent(cat.by_id("eiii/item1"))

    def test_sphere_example(self, cat):
        T = construct_tangent(cat.by_id("g2r/item2"), {"n": 3})
        fp = fingerprint(T.model, T)
        assert T.dim == 3 and fp.radius == pytest.approx(1.0, abs=1e-8)

    def test_cartan_example(self, cat):
        e = cat.by_id("grp-su3/item1")
        T = construct_tangent(e)
        assert T.dim == 5
        assert all(c.passed for c in compare_fingerprint(fingerprint(T.model, T), expected_signature(e, {})))

    def test_quaternionic_product_example(self, cat):
        T = construct_tangent(cat.by_id("g2h/item4"), {"n": 2, "l": 1})
        assert T.dim == 8

    def test_distinct_fingerprints(self, cat):
        seen = defaultdict(list)
        for e in cat.entries:
            if e.status != "verified":
                continue
            for inst in e.instances:
                T = construct_tangent(e, inst)
                seen[(e.space_id(inst), fingerprint(T.model, T, n_planes=50).key())].append(e.instance_id(inst))
        clashes = {frozenset(v) for v in seen.values() if len(v) > 1}
        assert clashes <= LOW_DIM_COINCIDENCES

    def test_reflective_complements(self, cat):
        flagged = [e for e in cat.entries if e.complement_reflective]
        assert flagged
        for e in flagged:
            for inst in e.instances:
                T = construct_tangent(e, inst)
                assert lts_defect(T.model, T.complement()) < 1e-8


class TestVerification:
    def test_sphere_radius_sqrt5(self, cat):
        r = verify_entry(cat.by_id("g2r/item6"), {"n": 3})
        assert r.outcome == "pass"
        assert r.measured["curv_min"] == pytest.approx(0.2, abs=1e-6)

    def test_circle_period_checked(self, cat):
        r = verify_entry(cat.by_id("ai/item1"), {})
        names = {c["name"] for c in r.checks}
        assert "circle_period" in names and r.outcome == "pass"

    def test_product_checks(self, cat):
        r = verify_entry(cat.by_id("g2c/item4"), {"n": 3, "l": 1})
        names = {c["name"] for c in r.checks}
        assert {"factor_orthogonality", "factor_dims"} <= names and r.outcome == "pass"

    def test_out_of_scope_skipped(self, cat):
        r = verify_entry(cat.by_id("eiv/item2"), {})
        assert r.outcome == "skipped" and not r.checks

    def test_stretch_skipped(self, cat):
        e = cat.by_id("g2h/item6")
        r = verify_entry(e, e.instances[0])
        assert r.outcome == "skipped"
        assert any("stretch" in n for n in r.notes)

    def test_recompute_from_dict(self, cat):
        r = verify_entry(cat.by_id("ai/item2"), {})
        d = json.loads(json.dumps(r.to_dict()))
        again = EntryResult(d["entry"], d["instance"], d["status"], d["route"], "skipped", checks=d["checks"])
        assert again.recompute() == r.outcome == "pass"

    def test_deterministic(self, cat):
        e = cat.by_id("diii/item3")
        assert verify_entry(e, {}).to_dict() == verify_entry(e, {}).to_dict()

    def test_custom_catalog_object(self, cat):
        sub = Catalog(cat.version, tuple(cat.for_family("ai")))
        assert loads_catalog(dumps_catalog(sub)).entries == sub.entries
