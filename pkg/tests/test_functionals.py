import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx

from conftest import make_potential
from ricci_ma import exact
from ricci_ma.functionals import (
    FunctionalReport,
    InequalityVerdict,
    beta_constants,
    bishop_bound,
    capacity_sublevel_check,
    default_beta,
    energy,
    f_functional,
    mt_check,
    mt_fit,
    mt_solvable_bound,
    relative_entropy,
    sublevel_radius,
    volume_capacity_check,
)
from ricci_ma.radial import RadialGrid, RadialPotential, log_int_exp

coef = st.floats(0.0, 4.0)


def mix(n, R, a, b, nodes=1025):
    g = RadialGrid.uniform(n, R, nodes)
    u = RadialPotential.from_function(g, exact.phi_unif(n, R)).values
    s = RadialPotential.from_function(g, exact.phi_star(n, R)).values
    return RadialPotential(g, a * u + b * s)


def test_verdict_json_keys():
    v = InequalityVerdict.compare(1.0, 2.0, 3.0)
    assert set(v.to_json()) == {"lhs", "rhs", "slack", "holds", "fittedConstant"}
    assert v.slack == 1.0 and v.holds
    assert not InequalityVerdict.compare(2.0, 1.0).holds


def test_verdict_slack_tolerance():
    assert InequalityVerdict.compare(1.0 + 1e-12, 1.0).holds
    assert not InequalityVerdict.compare(1.0 + 1e-6, 1.0).holds


def test_report_json_keys():
    assert FunctionalReport(1.0, 2.0, 3.0).to_json() == {"E": 1.0, "logIntExp": 2.0, "F": 3.0}


@pytest.mark.parametrize("n", [1, 2, 3])
def test_energy_unif(n):
    assert energy(make_potential(n, 0.6, exact.phi_unif(n, 0.6), 4096)) == approx(exact.energy_unif(n), abs=1e-8)


def test_star_values_n1(star1):
    rep = f_functional(star1)
    assert rep.E == approx(exact.ENERGY_STAR_1, abs=1e-6)
    assert rep.logIntExp == approx(exact.LOG_INT_EXP_STAR_1, abs=1e-8)
    assert rep.F == approx(0.136954, abs=1e-6)


@given(st.integers(1, 3), coef, coef, st.floats(0.0, 3.0))
@settings(max_examples=40, deadline=None)
def test_energy_homogeneous_and_nonpositive(n, a, b, s):
    phi = mix(n, 0.7, a, b, 257)
    E = energy(phi)
    assert E <= 0.0
    assert energy(phi.scaled(s)) == approx(s ** (n + 1) * E, rel=1e-10, abs=1e-14)


@given(st.integers(1, 3), coef, coef)
@settings(max_examples=40, deadline=None)
def test_jensen(n, a, b):
    phi = mix(n, 0.7, a, b, 257)
    mean = float(np.dot(phi.grid.weights, phi.values))
    assert log_int_exp(phi) >= -mean - 1e-14


@given(coef, coef, coef, coef)
@settings(max_examples=40, deadline=None)
def test_relative_entropy_nonnegative(a, b, c, d):
    p, q = mix(1, 0.5, a, b, 257), mix(1, 0.5, c, d, 257)
    assert relative_entropy(p, q) >= -1e-15
    assert relative_entropy(p, p) == approx(0.0, abs=1e-15)


def test_mt_fitting_mode_is_equality(star1):
    v = mt_check(star1, 0.9)
    assert v.slack == approx(0.0, abs=1e-15)
    assert v.fittedConstant == approx(math.exp(v.lhs - 0.9 * abs(energy(star1))))


def test_mt_beta_range(star1):
    with pytest.raises(ValueError):
        mt_check(star1, 1.0)
    with pytest.raises(ValueError):
        mt_check(star1, 0.0)


def test_mt_fit_family():
    family = [mix(1, 0.5, s, 0.0) for s in np.linspace(0, 6, 13)]
    C, verdicts = mt_fit(family, 0.8)
    assert math.isfinite(C) and C >= 1.0  # the zero member forces C >= 1
    assert all(v.holds for v in verdicts)
    assert min(v.slack for v in verdicts) == approx(0.0, abs=1e-14)


def test_default_beta():
    assert 0.5 <= default_beta(1) < 1.0
    assert default_beta(1) == approx(0.5)


@pytest.mark.parametrize("t", [0.05, 0.2, 0.4])
def test_sublevel_radius_unif(t):
    phi = make_potential(1, 1.0, exact.phi_unif(1, 1.0), 4096)
    assert sublevel_radius(phi, t) == approx(math.sqrt(1 - 2 * t), abs=1e-6)
    assert sublevel_radius(phi, 0.6) == 0.0


@given(st.integers(1, 2), coef, coef, st.floats(0.01, 2.0))
@settings(max_examples=40, deadline=None)
def test_capacity_sublevel_property(n, a, b, t):
    phi = mix(n, 0.6, a + 0.1, b, 1025)
    assert capacity_sublevel_check(phi, t).holds


def test_capacity_needs_positive_t(star1):
    with pytest.raises(ValueError):
        capacity_sublevel_check(star1, 0.0)


@given(st.integers(1, 3), st.floats(0.01, 0.99), st.floats(0.2, 3.0))
def test_volume_capacity_equality_case(n, rho, R):
    v = volume_capacity_check(rho * R, 2.0 * n, n, R)
    assert v.fittedConstant == approx(1.0, abs=1e-12)
    assert v.holds


def test_volume_capacity_suboptimal_gamma():
    v = volume_capacity_check(np.linspace(0.1, 0.9, 9), 1.0, 1)
    assert v.fittedConstant == approx(0.9, rel=1e-12)
    assert v.holds
    with pytest.raises(ValueError):
        volume_capacity_check(0.5, 2.5, 1)


def test_bounds():
    assert bishop_bound(1) == approx(4.0)
    assert bishop_bound(2) == approx(6.9282, abs=5e-5)
    assert bishop_bound(3) == approx(9.2832, abs=5e-5)
    assert mt_solvable_bound(1) == approx(16.0)
    assert mt_solvable_bound(2) == approx(4 ** 1.5 * 1.5 ** 1.5)
    assert beta_constants(1, 2.0, 1.0) == approx(0.25)
    assert beta_constants(2, 4.0, 2.0) == approx(8 / (16 * 2.25))
    with pytest.raises(ValueError):
        bishop_bound(0)
