import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracanalytic import (ClassParams, ExtremePointWeights, FractionalSeries, KernelCoeffs, KernelFamily, Sign,
                          Verdict, WeightVariant, coefficient_bound, coefficient_margin,
                          decompose_extreme_points, extremal_function, extreme_point_combination, is_member,
                          preset, xi_weight)
from fracanalytic.classes import NotAMemberError, PresetName
from fracanalytic.geometry import VerificationGrid, subordination_residual

from conftest import random_member, random_params


def test_kernel_families():
    mu = Fraction(3, 2)
    assert KernelCoeffs(KernelFamily.ALL_ONES, mu).coeff(4) == 1.0
    assert KernelCoeffs(KernelFamily.KOEBE, mu).coeff(4) == 6.0
    assert KernelCoeffs(KernelFamily.KOEBE2, mu).coeff(4) == 36.0
    custom = KernelCoeffs(KernelFamily.CUSTOM, mu, {3: 2.5})
    assert custom.coeff(3) == 2.5 and custom.coeff(4) == 0.0
    assert custom.series(8).coefficient(3) == 2.5


def test_xi_weight_sstar(sstar):
    assert [xi_weight(sstar, n) for n in range(2, 6)] == [4.0, 6.0, 8.0, 10.0]
    theta = preset(PresetName.STARLIKE_MU, weight_variant=WeightVariant.THETA)
    assert xi_weight(theta, 2) == 6.0


def test_xi_weight_convex_and_fractional():
    assert xi_weight(preset(PresetName.CONVEX_MU), 3) == pytest.approx(18.0)
    assert xi_weight(preset(PresetName.STARLIKE_MU, Fraction(3, 2), 0.5), 2) == pytest.approx(5.0)


@pytest.mark.parametrize("name", list(PresetName))
@pytest.mark.parametrize("mu", [Fraction(1), Fraction(3, 2), Fraction(2)])
@pytest.mark.parametrize("g", [0.0, 0.3, 0.7])
def test_xi_increasing(name, mu, g):
    p = preset(name, mu, g)
    xs = [xi_weight(p, n) for n in range(2, 201)]
    assert np.all(np.diff(xs) > 0)


def test_margin_examples(sstar):
    assert coefficient_margin(sstar, FractionalSeries.identity()) == 2.0
    assert coefficient_margin(sstar, FractionalSeries(1, {2: 0.5})) == 0.0
    assert coefficient_margin(sstar, FractionalSeries(1, {2: 0.6})) == pytest.approx(-0.4, abs=1e-15)


def test_verdicts(sstar):
    assert is_member(sstar, FractionalSeries.identity()) is Verdict.MEMBER_CERTIFIED
    assert is_member(sstar, FractionalSeries(1, {2: 0.6})) is Verdict.NOT_MEMBER
    assert is_member(sstar, FractionalSeries(1, {2: 0.6}, Sign.PLUS)) is Verdict.INCONCLUSIVE


def test_mu_mismatch(sstar):
    with pytest.raises(ValueError):
        coefficient_margin(sstar, FractionalSeries(Fraction(3, 2), {2: 0.1}))


def test_coefficient_bound(sstar, kpreset):
    assert coefficient_bound(sstar, 2) == 0.5
    assert coefficient_bound(sstar, 3) == pytest.approx(1 / 3, abs=1e-16)
    assert extremal_function(sstar, 2) == FractionalSeries(1, {2: 0.5})
    assert extremal_function(kpreset, 2).coefficient(2) == 0.25


@pytest.mark.parametrize("kwargs", [
    dict(A=1.0, B=0.2), dict(A=-0.5, B=-0.4), dict(A=1.2, B=-1.0), dict(B=-1.5),
    dict(gamma=1.0), dict(gamma=-0.1), dict(k=0, m=1), dict(k=-1),
])
def test_params_invariants(kwargs):
    base = dict(phi=KernelCoeffs(KernelFamily.KOEBE), psi=KernelCoeffs(KernelFamily.ALL_ONES))
    with pytest.raises(ValueError):
        ClassParams(**base, **kwargs)


def test_params_kernel_ordering():
    with pytest.raises(ValueError):
        ClassParams(phi=KernelCoeffs(KernelFamily.ALL_ONES), psi=KernelCoeffs(KernelFamily.KOEBE))
    with pytest.raises(ValueError):
        ClassParams(phi=KernelCoeffs(KernelFamily.KOEBE, Fraction(3, 2)),
                    psi=KernelCoeffs(KernelFamily.ALL_ONES), mu=1)


def test_params_json(sstar):
    doc = {"phi": {"family": "koebe"}, "psi": {"family": "all_ones"}, "A": 1, "B": -1, "gamma": 0,
           "k": 0, "m": 0, "mu": "1", "variant": "lambda"}
    assert ClassParams.from_json(doc) == sstar
    p = preset(PresetName.CONVEX_MU, Fraction(3, 2), 0.25, WeightVariant.THETA)
    assert ClassParams.from_json(json.loads(json.dumps(p.to_json()))) == p
    with pytest.raises(ValueError):
        ClassParams.from_json({**doc, "extra": 1})
    with pytest.raises(ValueError):
        ClassParams.from_json({**doc, "A": "1"})


@pytest.mark.parametrize("g", [0.0, 0.3, 0.7])
def test_classical_starlike_reduction(g):
    p = preset(PresetName.STARLIKE_MU, 1, g)
    for n in range(2, 51):
        assert abs(xi_weight(p, n) - 2.0 * (n - g)) <= 1e-12
    assert p.scale == pytest.approx(2.0 * (1.0 - g), abs=1e-15)


def test_classical_convex_reduction(kpreset):
    for n in range(2, 51):
        assert xi_weight(kpreset, n) == pytest.approx(2.0 * n * n, abs=1e-12)


def test_extremal_saturates_random_params():
    rng = np.random.default_rng(7)
    for _ in range(50):
        p = random_params(rng)
        for n in range(2, 11):
            assert abs(coefficient_margin(p, extremal_function(p, n))) <= 1e-12


def test_extreme_point_examples(sstar):
    assert extreme_point_combination(sstar, ExtremePointWeights({1: 1.0})) == FractionalSeries.identity()
    assert extreme_point_combination(sstar, ExtremePointWeights({2: 1.0})) == FractionalSeries(1, {2: 0.5})
    half = extreme_point_combination(sstar, ExtremePointWeights({1: 0.5, 2: 0.5}))
    assert half == FractionalSeries(1, {2: 0.25})
    assert coefficient_margin(sstar, half) == 1.0
    w = decompose_extreme_points(sstar, half)
    assert w[1] == 0.5 and w[2] == 0.5
    assert decompose_extreme_points(sstar, FractionalSeries.identity()).eta == {1: 1.0}


def test_decompose_rejects(sstar):
    with pytest.raises(NotAMemberError):
        decompose_extreme_points(sstar, FractionalSeries(1, {2: 0.6}))
    with pytest.raises(NotAMemberError):
        decompose_extreme_points(sstar, FractionalSeries(1, {2: 0.1}, Sign.PLUS))


def test_weights_validation():
    with pytest.raises(ValueError):
        ExtremePointWeights({1: 0.5, 2: 0.4})
    with pytest.raises(ValueError):
        ExtremePointWeights({1: 1.5, 2: -0.5})
    with pytest.raises(ValueError):
        ExtremePointWeights({0: 1.0})


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_extreme_point_roundtrip(seed):
    rng = np.random.default_rng(seed)
    p = random_params(rng)
    f = random_member(rng, p)
    back = extreme_point_combination(p, decompose_extreme_points(p, f))
    for n, a in f.coeffs.items():
        assert abs(back.coefficient(n) - a) <= 1e-12
    w = decompose_extreme_points(p, f)
    again = decompose_extreme_points(p, extreme_point_combination(p, w))
    for n in set(w.eta) | set(again.eta):
        assert abs(w[n] - again[n]) <= 1e-12


def test_membership_certificate_is_sound():
    """Certified members keep the subordination residual inside the unit disk."""
    rng = np.random.default_rng(11)
    grid = VerificationGrid((0.3, 0.6, 0.9, 0.99), angular_samples=256)
    for _ in range(100):
        p = random_params(rng)
        f = random_member(rng, p)
        assert is_member(p, f) is Verdict.MEMBER_CERTIFIED
        assert subordination_residual(p, f, grid) <= 1.0 + 1e-9
