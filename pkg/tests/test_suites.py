import numpy as np
import pytest

from magnetik import suites
from magnetik.chart import DEFAULT_STEPS
from magnetik.suites import CheckRecord, refinement_ratio, run_suite


def test_check_record_modes():
    assert CheckRecord("a", "g", None, 1, 1e-9, 1e-8).passed
    assert not CheckRecord("a", "g", None, 1, 1e-8, 1e-8).passed
    assert CheckRecord("a", "g", None, 1, 0.3, 0.0, "min").passed
    assert not CheckRecord("a", "g", None, 1, 0.0, 0.0, "min").passed
    assert not CheckRecord("a", "g", None, 1, float("nan"), 1.0).passed


def test_refinement_ratio_floor():
    assert refinement_ratio(1e-4, 2.5e-5) == 0.25
    assert refinement_ratio(1e-9, 1e-9) == 0.0


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("bogus")


def test_report_is_sorted_and_reproducible():
    a = run_suite("classical", ["s2-in-r3-uniform"], samples=4)
    b = run_suite("classical", ["s2-in-r3-uniform"], samples=4)
    assert a.to_dict(meta=False) == b.to_dict(meta=False)
    keys = [r.key() for r in a.records]
    assert keys == sorted(keys)
    assert {"started", "wall_time"} <= set(a.to_dict())
    assert not {"started", "wall_time"} & set(a.to_dict(meta=False))


def test_sample_streams_are_independent_of_other_checks():
    one = run_suite("classical", ["plane-in-r3-static"], samples=3)
    both = run_suite("classical", ["s2-in-r3-uniform", "plane-in-r3-static"], samples=3)
    pick = lambda rep: [r.to_dict() for r in rep.records if r.geometry == "plane-in-r3-static"]
    assert pick(one) == pick(both)


def test_tolerance_override_only_touches_residuals():
    rep = run_suite("appendix", samples=3, tol=1e-30)
    assert not rep.passed
    mins = [r for r in rep.records if r.mode == "min"]
    assert mins and all(r.passed for r in mins)


def test_classical_suite_all_geometries():
    rep = run_suite("classical", samples=20)
    assert rep.passed, rep.failures()


def test_props_suite():
    rep = run_suite("props", samples=10)
    assert rep.passed, rep.failures()
    checks = {r.check for r in rep.records}
    assert {"II-symmetry", "duality", "mag-duality", "projectors", "Y-skew"} <= checks


def test_appendix_suite_contents():
    rep = run_suite("appendix", samples=10)
    assert rep.passed, rep.failures()
    checks = {r.check for r in rep.records}
    for name in ("s3-curl", "s3-bracket", "s3-cross", "koszul-curl", "double-cross", "mag-sec-asymmetry",
                 "static-K", "static-rejects-Ei", "killing-closed-form", "fig2-ric", "stiefel-min-sec"):
        assert name in checks


def test_rs_quadratic_structure():
    from magnetik import geometries as geo
    from magnetik.chart import random_orthonormal

    sub = geo.submanifold("greats2-in-s3-sigmai")
    u = np.array([0.3, -0.1])
    v, w = random_orthonormal(sub.N.g, u, 2, np.random.default_rng(0)).T
    assert suites.rs_quadratic_defect(sub, u, v, w) < 1e-4


def test_stiefel_min_positive_above_half():
    """The S^3 sectional curvature is a sum of squares; its zero set is empty exactly when s > 1/2."""
    above = suites.stiefel_min_sec(0.6, points=10, pairs=50)
    below = suites.stiefel_min_sec(0.4, points=10, pairs=50)
    assert above > 0
    assert -1e-8 < below < above
    assert abs(suites.flatness_witness(0.4)) < 1e-6


def test_record_serializes_plain_types():
    import json

    rec = CheckRecord("a", "g", None, 1, np.float64(1e-9), 1e-8)
    assert type(rec.passed) is bool
    json.dumps(rec.to_dict())
