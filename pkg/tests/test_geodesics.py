import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx

from conftest import make_potential
from ricci_ma import exact
from ricci_ma.errors import NonConvexProfile
from ricci_ma.functionals import energy, f_functional
from ricci_ma.geodesics import (
    SLogProfile,
    biconjugate,
    check_energy_affine,
    check_f_concave,
    geodesic_between_profiles,
    geodesic_path,
    inverse_legendre,
    legendre,
    uniqueness_experiment,
)

R1 = exact.star_radius(1)


def profiles(n=1, R=R1, nodes=1024):
    u0 = SLogProfile.from_function(n, R, exact.phi_unif(n, R), nodes)
    u1 = SLogProfile.from_function(n, R, exact.phi_star(n, R), nodes)
    return u0, u1


def test_profile_properties():
    u0, u1 = profiles()
    u0.check_convex()
    u1.check_convex()
    assert u0.sMax == approx(math.log(R1))
    assert u0.u[-1] == 0.0


def test_nonconvex_profile_rejected():
    s = np.linspace(-3, 0, 200)
    u = s + 0.2 * np.sin(5 * s)  # nondecreasing but wiggly
    with pytest.raises(NonConvexProfile):
        SLogProfile(1, 1.0, s, u).check_convex()
    with pytest.raises(ValueError):
        SLogProfile(1, 1.0, s, u + 1.0)


@pytest.mark.parametrize("n", [1, 2])
def test_profile_functionals_match_radial(n):
    R = exact.star_radius(n)
    u = SLogProfile.from_function(n, R, exact.phi_star(n), 4096)
    rep = f_functional(make_potential(n, R, exact.phi_star(n), 4096))
    assert u.energy() == approx(rep.E, abs=1e-5)
    assert u.log_int_exp() == approx(rep.logIntExp, abs=1e-6)
    assert SLogProfile.from_function(n, R, exact.phi_unif(n, R), 4096).energy() == approx(exact.energy_unif(n), abs=1e-5)


def test_from_radial_matches_from_function():
    phi = make_potential(1, R1, exact.phi_star(1), 4096)
    a = SLogProfile.from_radial(phi, 1024)
    b = SLogProfile.from_function(1, R1, exact.phi_star(1), 1024)
    assert np.max(np.abs(a.u - b.u)) < 1e-9
    r = np.linspace(0, R1, 50)
    assert np.max(np.abs(b.radial_values(r) - exact.phi_star(1)(r))) < 1e-4  # linear interpolation in s


@given(st.floats(0.0, 3.0), st.floats(0.0, 3.0), st.integers(1, 3))
@settings(max_examples=25, deadline=None)
def test_biconjugate_recovers_convex_profile(a, b, n):
    R = 0.6
    fu, fs = exact.phi_unif(n, R), exact.phi_star(n, R)
    u = SLogProfile.from_function(n, R, lambda r: a * fu(r) + b * fs(r) + 1e-3 * fu(r), 512)
    assert np.max(np.abs(biconjugate(u).u - u.u)) < 1e-9


def test_legendre_of_linear_profile():
    # u = c (s - sMax) has dual  c*sMax  at p = c  (sup over the window)
    s = np.linspace(-5.0, 0.0, 101)
    u = SLogProfile(1, 1.0, s, 2.0 * s, 2.0)
    d = legendre(u, np.array([2.0]))
    assert d.values[0] == approx(0.0, abs=1e-12)
    assert inverse_legendre(legendre(u), s) == approx(u.u, abs=1e-12)


def test_geodesic_endpoints_and_convexity():
    u0, u1 = profiles()
    path = geodesic_between_profiles(u0, u1, 8)
    assert path.samples[0] is u0 and path.samples[-1] is u1
    for prof in path.samples:
        prof.check_convex(1e-8)
        assert prof.u[-1] == 0.0
    assert len(path.t) == 9


def test_geodesic_constant_for_equal_endpoints():
    u0, _ = profiles()
    path = geodesic_between_profiles(u0, u0, 4)
    for prof in path.samples:
        assert np.max(np.abs(prof.u - u0.u)) < 1e-10


def test_geodesic_reversal():
    u0, u1 = profiles()
    fwd = geodesic_between_profiles(u0, u1, 4)
    bwd = geodesic_between_profiles(u1, u0, 4).reversed()
    for a, b in zip(fwd.samples, bwd.samples):
        assert np.max(np.abs(a.u - b.u)) < 1e-10


def test_energy_affine_and_f_concave():
    phi0 = make_potential(1, R1, exact.phi_unif(1, R1), 4096)
    phi1 = make_potential(1, R1, exact.phi_star(1), 4096)
    path = geodesic_path(phi0, phi1, 8, 2048)
    assert check_energy_affine(path).holds
    assert check_f_concave(path).holds
    with pytest.raises(ValueError):
        check_f_concave(geodesic_path(phi0, phi1, 2, 2048))


def test_energy_affine_between_scalings():
    _, u1 = profiles(nodes=2048)
    path = geodesic_between_profiles(u1.with_values(0.5 * u1.u), u1, 8)
    assert check_energy_affine(path).holds


def test_csv_long_format(tmp_path):
    u0, u1 = profiles(nodes=64)
    path = geodesic_between_profiles(u0, u1, 2)
    path.write_csv(tmp_path / "p.csv")
    lines = (tmp_path / "p.csv").read_text().splitlines()
    assert lines[0] == "t,s,u" and len(lines) == 1 + 3 * 64


def test_mismatched_grids():
    u0, _ = profiles(nodes=64)
    _, u1 = profiles(nodes=65)
    with pytest.raises(ValueError):
        geodesic_between_profiles(u0, u1)


def test_uniqueness_report():
    g = make_potential(1, 0.5, exact.phi_unif(1, 0.5), 1024).grid
    from ricci_ma.radial import RadialPotential

    starts = [RadialPotential.zero(g), RadialPotential.from_function(g, exact.phi_unif(1, 0.5)).scaled(2.0)]
    rep = uniqueness_experiment(1, 0.5, starts)
    assert rep.passed and set(rep.to_json()) >= {"maxPairwiseSupDistance", "passed"}
    big = make_potential(1, 1.5, exact.phi_unif(1, 1.5), 64)
    with pytest.raises(ValueError):
        uniqueness_experiment(1, 1.5, [big])
