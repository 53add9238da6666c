import csv
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracanalytic import FractionalSeries, GeneralSeries, Sign, extremal_function, preset
from fracanalytic.classes import NotAMemberError, PresetName
from fracanalytic.geometry import (THREADS_ENV, FunctionalKind, NonMonotonicProfileError, PoleError,
                                   VerificationGrid, brute_force_radius, critical_coefficient, grid_records,
                                   integral_mean, l2_integral, min_re_functional, subordination_residual,
                                   subordination_values, verify_integral_means_dominance, write_grid_csv)

from conftest import random_member, random_params
from oracle_values import L2_IDENTITY_R_HALF, L2_Z_MINUS_HALF_Z2_R_HALF, L2_Z_MINUS_QUARTER_Z2_R_HALF


def test_grid_validation():
    with pytest.raises(ValueError):
        VerificationGrid((0.5, 0.4))
    with pytest.raises(ValueError):
        VerificationGrid((0.5, 1.0))
    with pytest.raises(ValueError):
        VerificationGrid(angular_samples=100)
    grid = VerificationGrid.boundary()
    assert grid.radii[-1] == 0.995 and grid.angular_samples == 2048
    assert grid.restricted(0.99).radii[-1] == 0.99


def test_angles_skip_slit():
    theta = VerificationGrid(angular_samples=64).angles()
    assert 0.0 in theta
    assert np.all(np.abs(theta) < math.pi - 1e-3)
    assert len(theta) == 63


@pytest.mark.parametrize("kind", list(FunctionalKind))
def test_identity_functionals(kind):
    assert min_re_functional(FractionalSeries.identity(), kind, 0.7) == pytest.approx(1.0, abs=1e-15)


def test_min_re_examples():
    r = 2.0 / 3.0
    assert min_re_functional(FractionalSeries(1, {2: 0.5}), FunctionalKind.STARLIKE, r) == pytest.approx(0.5,
                                                                                                      abs=1e-12)
    assert min_re_functional(FractionalSeries(1, {2: 0.25}), FunctionalKind.CONVEX, r) == pytest.approx(0.5,
                                                                                                     abs=1e-12)
    # F' = 1 - z vanishes nowhere inside, bounded turning min is 1 - r
    assert min_re_functional(FractionalSeries(1, {2: 0.5}), FunctionalKind.BOUNDED_TURNING, 0.4) == pytest.approx(
        0.6, abs=1e-12)


def test_pole_reported():
    # F = z - z^2 vanishes at z = 1 only, but F' = 1 - 2z vanishes at 0.5
    with pytest.raises(PoleError):
        min_re_functional(FractionalSeries(1, {2: 1.0}), FunctionalKind.CONVEX, 0.5)


def test_brute_force_radius_examples():
    f = FractionalSeries(1, {2: 0.5})
    assert brute_force_radius(f, FunctionalKind.STARLIKE, 0.5) == pytest.approx(2 / 3, abs=1e-6)
    assert brute_force_radius(f, FunctionalKind.STARLIKE, 0.0) >= 0.999
    assert brute_force_radius(FractionalSeries.identity(), FunctionalKind.CONVEX, 0.3, tol=1e-6) == 1 - 1e-6


def test_brute_force_detects_rising_profile(monkeypatch):
    import fracanalytic.geometry as geo

    # a harmonic minimum cannot rise, so feed a synthetic profile through the scan
    monkeypatch.setattr(geo, "min_re_functional", lambda f, kind, r, samples: 1.0 - abs(r - 0.4))
    with pytest.raises(NonMonotonicProfileError):
        brute_force_radius(FractionalSeries.identity(), FunctionalKind.STARLIKE, 0.1)


def test_brute_force_requires_start_above_psi():
    with pytest.raises(ValueError):
        brute_force_radius(GeneralSeries((1.0,), (0.2,)), FunctionalKind.BOUNDED_TURNING, 0.5)


@pytest.mark.parametrize("name", list(PresetName))
@pytest.mark.parametrize("mu", [Fraction(1), Fraction(3, 2), Fraction(2)])
@pytest.mark.parametrize("n", [2, 3, 5])
def test_min_re_nonincreasing_for_extremals(name, mu, n):
    p = preset(name, mu, 0.3)
    f = extremal_function(p, n)
    kind = FunctionalKind.STARLIKE if name is PresetName.STARLIKE_MU else FunctionalKind.CONVEX
    values = [min_re_functional(f, kind, r) for r in np.linspace(0.05, 0.95, 19)]
    assert np.all(np.diff(values) <= 1e-12)


def test_subordination_normalized_at_origin(sstar):
    f = FractionalSeries(1, {2: 0.3, 4: 0.1})
    w = subordination_values(sstar, f, 1e-6, np.array([0.0, 1.0, -2.0]))
    assert np.all(np.abs(w) < 1e-5)


def test_subordination_examples(sstar):
    grid = VerificationGrid()
    assert subordination_residual(sstar, FractionalSeries(1, {2: 0.5}), grid) <= 1 + 1e-9
    assert subordination_residual(sstar, FractionalSeries(1, {2: 0.9}), grid) > 1


def test_threaded_residual_is_identical(sstar, monkeypatch):
    f = FractionalSeries(1, {2: 0.2, 3: 0.1})
    grid = VerificationGrid.boundary(256)
    serial = subordination_residual(sstar, f, grid)
    monkeypatch.setenv(THREADS_ENV, "4")
    assert subordination_residual(sstar, f, grid) == serial


def test_critical_coefficient_sstar(sstar):
    crit = critical_coefficient(sstar, 2, VerificationGrid.boundary(512))
    assert [r for r, _ in crit.per_radius] == [0.985, 0.99, 0.995]
    assert all(a >= 0.5 for _, a in crit.per_radius)
    assert crit.boundary == pytest.approx(0.5, abs=1e-3)


def test_grid_csv(tmp_path, sstar):
    f = FractionalSeries(1, {2: 0.5})
    grid = VerificationGrid((0.5, 0.9), angular_samples=64)
    rows = grid_records(sstar, f, FunctionalKind.STARLIKE, grid)
    path = tmp_path / "grid.csv"
    write_grid_csv(path, rows)
    with open(path, newline="") as fh:
        read = list(csv.DictReader(fh))
    assert list(read[0]) == ["r", "theta", "re_functional", "abs_w"]
    assert len(read) == 2 * 63
    at_zero = [row for row in read if float(row["theta"]) == 0.0 and float(row["r"]) == 0.5]
    assert float(at_zero[0]["re_functional"]) == pytest.approx(2 / 3, abs=1e-12)


@pytest.mark.parametrize("coeffs, expected", [
    ({}, L2_IDENTITY_R_HALF), ({2: 0.5}, L2_Z_MINUS_HALF_Z2_R_HALF), ({2: 0.25}, L2_Z_MINUS_QUARTER_Z2_R_HALF),
])
def test_parseval_examples(coeffs, expected):
    f = FractionalSeries(1, coeffs)
    assert integral_mean(f, 2, 0.5) == pytest.approx(expected, rel=1e-12)
    assert l2_integral(f, 0.5) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("mu", [Fraction(1), Fraction(3, 2), Fraction(5, 3), Fraction(2)])
def test_quadrature_matches_exact_l2(mu):
    rng = np.random.default_rng(3)
    for _ in range(20):
        p = random_params(rng, mus=(mu,))
        f = random_member(rng, p)
        for r in (0.25, 0.5, 0.9):
            assert integral_mean(f, 2, r) == pytest.approx(l2_integral(f, r), rel=1e-8)


def test_integer_mu_parseval_formula():
    rng = np.random.default_rng(5)
    for _ in range(20):
        p = random_params(rng, mus=(Fraction(1), Fraction(2)))
        f = random_member(rng, p)
        r = 0.7
        exact = 2 * math.pi * (r**2 + sum(a * a * r ** (2 * float(p.mu) * n) for n, a in f.coeffs.items()))
        assert integral_mean(f, 2, r) == pytest.approx(exact, rel=1e-8)


@pytest.mark.parametrize("q", [1, 2, 3])
@pytest.mark.parametrize("mu", [Fraction(1), Fraction(3, 2)])
def test_quadrature_self_convergence(q, mu):
    f = FractionalSeries(mu, {2: 0.3, 3: 0.1})
    coarse, fine = integral_mean(f, q, 0.8, 4096), integral_mean(f, q, 0.8, 8192)
    assert abs(coarse - fine) < 1e-8 * fine


def test_q1_refinement():
    f = FractionalSeries(1, {2: 0.5})
    assert abs(integral_mean(f, 1, 0.5) - integral_mean(f, 1, 0.5, 40960)) < 1e-6


def test_dominance_examples(sstar):
    rep = verify_integral_means_dominance(sstar, extremal_function(sstar, 2), 1, 0.6)
    assert rep.holds and rep.margin == 0.0
    rep = verify_integral_means_dominance(sstar, FractionalSeries(1, {2: 0.25}), 2, 0.5)
    assert rep.oracle == pytest.approx(L2_Z_MINUS_QUARTER_Z2_R_HALF, rel=1e-12)
    assert rep.closed_form == pytest.approx(L2_Z_MINUS_HALF_Z2_R_HALF, rel=1e-12)
    assert rep.holds
    spread = FractionalSeries(1, {2: 0.2, 3: 0.1})
    for r in (0.25, 0.5, 0.75, 0.9):
        assert verify_integral_means_dominance(sstar, spread, 2, r).holds
    with pytest.raises(NotAMemberError):
        verify_integral_means_dominance(sstar, FractionalSeries(1, {2: 0.6}), 2, 0.5)


def test_dominance_fails_for_fractional_mu():
    """With a non-integer mu the n=2 extremal need not dominate at q=1."""
    p = preset(PresetName.CONVEX_MU, Fraction(3, 2), 0.3)
    f = extremal_function(p, 3)
    rep = verify_integral_means_dominance(p, f, 1, 0.75)
    assert not rep.holds


@settings(max_examples=40, deadline=None)
@given(st.floats(0.01, 0.5), st.integers(2, 6), st.floats(0.05, 0.95))
def test_real_axis_modulus(a, n, r):
    f = FractionalSeries(Fraction(3, 2), {n: a})
    from fracanalytic import evaluate
    assert abs(evaluate(f, r)) == pytest.approx(abs(r - a * r ** (1.5 * n)), abs=1e-15)
