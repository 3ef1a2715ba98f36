"""Criteria: rule tables, margins, pinched-curvature diagnostics."""

import numpy as np
import pytest

from hardyspec import geometry as geo
from hardyspec.criteria import (
    PotentialEnvelope,
    classify_ah,
    classify_ale,
    classify_berger,
    classify_euclidean,
    classify_hyperbolic,
    classify_pinched,
    pinched_weight_lower_bound,
    pinching_margin,
)
from hardyspec.errors import DomainError
from hardyspec.reduction import InverseSquare


def lower(c, delta=0.0, correction=False):
    return PotentialEnvelope("lower", c, delta, 1.0, correction)


def upper(c, delta=0.0):
    return PotentialEnvelope("upper", c, delta, 1.0)


def test_classify_euclidean_table():
    assert classify_euclidean(3, lower(1.0)).result == "Finite"
    assert classify_euclidean(3, upper(1.0, 0.5)).result == "Infinite"
    assert classify_euclidean(3, upper(1.0, 0.0)).result == "Indeterminate"
    with pytest.raises(DomainError):
        classify_euclidean(2, lower(1.0))


def test_classify_hyperbolic_table():
    v = classify_hyperbolic(2, 1.0, upper(1.0, 0.5))
    assert v.result == "Infinite" and v.threshold == pytest.approx(0.25)
    v = classify_hyperbolic(3, 2.0, lower(1.0, correction=True))
    assert v.result == "Finite" and v.threshold == pytest.approx(2.0)
    assert classify_hyperbolic(3, 1.0, lower(0.9, correction=True)).result == "Indeterminate"
    assert classify_hyperbolic(3, 1.0, lower(1.0, correction=False)).result == "Indeterminate"
    with pytest.raises(DomainError):
        classify_hyperbolic(3, -1.0, lower(1.0))


def test_classify_ale_table():
    assert classify_ale(4, lower(4.0, delta=0.1)).result == "Finite"
    assert classify_ale(4, lower(4.0, delta=0.0)).result == "Indeterminate"  # strictness
    assert classify_ale(3, upper(1.0, delta=0.2)).result == "Infinite"
    with pytest.raises(DomainError):
        classify_ale(2, lower(1.0, delta=0.1))


def test_classify_ah_table():
    v = classify_ah(2, lower(1.0, delta=0.5))
    assert v.result == "Finite" and v.threshold == pytest.approx(0.25)
    v = classify_ah(3, upper(1.0, delta=0.1))
    assert v.result == "Infinite" and v.threshold == pytest.approx(1.0)
    assert classify_ah(3, lower(1.0, delta=0.0)).result == "Indeterminate"


def test_classify_berger_table():
    v = classify_berger(lower(1.0))
    assert v.result == "Finite" and v.threshold == 0.25
    assert classify_berger(upper(1.0, delta=1.0)).result == "Infinite"
    assert classify_berger(lower(0.5)).result == "Indeterminate"


def test_verdict_threshold_matches_geometry():
    gh = geo.ModelGeometry(3, geo.Hyperbolic(2.0), 1.0)
    assert classify_hyperbolic(3, 2.0, upper(1.0, 0.1)).threshold == geo.essential_threshold(gh)
    gb = geo.ModelGeometry(4, geo.BergerExpShrink(1.0), 1.0)
    assert classify_berger(upper(1.0, 0.1)).threshold == geo.essential_threshold(gb)
    gah = geo.ModelGeometry(3, geo.AHModel(0.0), 1.0)
    assert classify_ah(3, upper(1.0, 0.1)).threshold == geo.essential_threshold(gah)


def test_classifiers_never_error_on_odd_envelopes():
    """Total on the stated domain: unmatched claims give Indeterminate."""
    for env in [lower(0.3), upper(2.0, 0.5), upper(1.0), lower(5.0, 0.2, True)]:
        for verdict in [
            classify_euclidean(4, env),
            classify_hyperbolic(3, 1.0, env),
            classify_ale(4, env),
            classify_ah(3, env),
            classify_berger(env),
        ]:
            assert verdict.result in ("Finite", "Infinite", "Indeterminate")
            assert verdict.notes


def test_envelope_sampling_check():
    # claim: V >= -1/(4 r^2); actual potential is four times deeper
    env = lower(1.0)
    verdict = classify_euclidean(3, env, V=InverseSquare(4.0))
    assert verdict.result == "Indeterminate"
    assert any("violated" in note for note in verdict.notes)
    # honest claim passes through
    assert classify_euclidean(3, env, V=InverseSquare(1.0)).result == "Finite"
    # upper side: claim V <= -(1+0.5)/(4r^2) vs the exact matching potential
    assert classify_euclidean(3, upper(1.0, 0.5), V=InverseSquare(1.5)).result == "Infinite"
    assert (
        classify_euclidean(3, upper(1.0, 0.5), V=InverseSquare(1.2)).result == "Indeterminate"
    )


def test_pinching_margin():
    assert pinching_margin(3, 0.0, 0.0) == pytest.approx(1.0)
    assert pinching_margin(4, 1.0, 0.0) == pytest.approx(-2.0)
    assert pinching_margin(3, 2.0, 1.0) == pytest.approx(4.0)
    with pytest.raises(DomainError):
        pinching_margin(3, 0.0, 1.0)
    # independent arithmetic on a 3x3x3 grid
    for n in (2, 3, 4):
        for d1 in (1.0, 2.0, 3.0):
            for d2 in (-1.0, 0.0, 1.0):
                expected = 1.0 - (2 * n - 5) * d1 + (n * n - 4) * d2
                assert pinching_margin(n, d1, d2) == pytest.approx(expected, abs=1e-14)


def test_pinching_margin_affine():
    """Affine in each delta: three-point interpolation recovers midpoints."""
    n = 5
    for d2 in (0.0, 0.3):
        f = lambda d1: pinching_margin(n, d1, d2)
        assert f(1.0) == pytest.approx((f(0.5) + f(1.5)) / 2.0, abs=1e-14)
    g = lambda d2: pinching_margin(n, 4.0, d2)
    assert g(1.0) == pytest.approx((g(0.0) + g(2.0)) / 2.0, abs=1e-14)


def test_classify_pinched():
    v = classify_pinched(3, 1.0, 0.0, 0.0)
    assert v.result == "Finite" and v.threshold == pytest.approx(1.0)
    assert classify_pinched(4, 1.0, 1.0, 0.0).result == "Indeterminate"
    v2 = classify_pinched(2, 1.0, 0.0, 0.0)
    assert v2.result == "Finite"
    with pytest.raises(DomainError):
        classify_pinched(3, 0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        classify_pinched(3, 1.0, 0.0, 1.0)


def test_pinched_weight_lower_bound_exact_cases():
    assert pinched_weight_lower_bound(3, 1.0, 0.0, 0.0, 2.0) == pytest.approx(1.0625, abs=1e-14)
    for n in (2, 3, 5):
        for kappa in (0.5, 2.0):
            for r in (1.0, 10.0):
                expected = (n - 1) ** 2 * kappa / 4.0 + 1.0 / (4.0 * r**2)
                assert pinched_weight_lower_bound(n, kappa, 0.0, 0.0, r) == pytest.approx(
                    expected, rel=1e-14
                )


def test_pinched_weight_lower_bound_asymptotics():
    """4 r^2 (bound - (n-1)^2 kappa/4) tends to 1 - (n-3) d1 + (n^2-n-2) d2,
    which dominates the certified margin, with equality when d1 = d2."""
    n, kappa = 4, 1.0
    for d1, d2 in [(0.3, 0.1), (0.5, 0.5), (1.0, -0.2)]:
        coeff = 1.0 - (n - 3) * d1 + (n * n - n - 2) * d2
        margin = pinching_margin(n, d1, d2)
        vals = []
        for r in (1e3, 1e4):
            v = pinched_weight_lower_bound(n, kappa, d1, d2, r)
            vals.append((v - (n - 1) ** 2 * kappa / 4.0) * 4.0 * r**2)
        assert vals[1] == pytest.approx(coeff, abs=1e-4)
        assert coeff >= margin - 1e-12
        if d1 == d2:
            assert coeff == pytest.approx(margin, abs=1e-12)


def test_pinched_weight_lower_bound_guards():
    with pytest.raises(DomainError):
        pinched_weight_lower_bound(3, 1.0, 0.0, 0.0, -1.0)
    with pytest.raises(DomainError):
        pinched_weight_lower_bound(3, 1.0, 0.1, 0.2, 1.0)
    with pytest.raises(DomainError):
        # delta2 so negative that the Hessian lower bound turns negative
        pinched_weight_lower_bound(3, 1.0, -3.0, -4.0, 1.0)


def test_envelope_validation():
    with pytest.raises(DomainError):
        PotentialEnvelope("sideways", 1.0)
    with pytest.raises(DomainError):
        PotentialEnvelope("lower", 1.0, delta=-0.1)
    with pytest.raises(DomainError):
        PotentialEnvelope("lower", 1.0, R0=0.0)


@pytest.mark.parametrize("n,delta", [(3, 12.0), (4, 3.0)])
def test_scale_consistency_with_truncation_sweep(n, delta):
    """An Infinite verdict is echoed by a Growing truncation sweep.

    The count grows like sqrt((n-2)^2 delta) log(L)/(2 pi), so delta is
    chosen large enough that every decade step adds at least one state.
    """
    from hardyspec import spectrum as spec

    env = PotentialEnvelope("upper", float((n - 2) ** 2), delta, 1.0)
    verdict = classify_euclidean(n, env)
    assert verdict.result == "Infinite"
    g = geo.ModelGeometry(n, geo.Euclidean(), 1.0)
    V = InverseSquare((1.0 + delta) * (n - 2) ** 2)
    report = spec.truncation_sweep(g, V, 1.0, [1e2, 1e3, 1e4, 1e5], 1000)
    assert report.classification == "Growing"
