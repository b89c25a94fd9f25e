import math

import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, strategies as st

from branchsurf import reference as ref

PHI_STAR = 3 * math.pi / 4


# --- Bessel ------------------------------------------------------------------

def test_i0_frozen_values():
    # [DERIVED] 30-digit series evaluation, rounded to double
    assert ref.bessel_i0(0.0) == 1.0
    assert ref.bessel_i0(2.0) == pytest.approx(2.279585302336067, abs=1e-15)
    assert ref.bessel_i0(1.0) == pytest.approx(1.2660658777520082, abs=1e-15)


def test_series_meets_asymptotic_at_cutoff():
    x = np.array(ref.SERIES_CUTOFF)
    s = ref._i0_series(x)
    a = ref._asymptotic(x, 0.0)
    assert abs(s / a - 1) < 1e-8


@given(st.floats(0.0, 200.0))
def test_i0_against_scipy(x):
    assert ref.bessel_i0(x) == pytest.approx(float(sp.i0(x)), rel=1e-12)
    assert ref.bessel_i1(x) == pytest.approx(float(sp.i1(x)), rel=1e-12, abs=1e-300)


def test_i0_even_i1_odd():
    assert ref.bessel_i0(-3.0) == ref.bessel_i0(3.0)
    assert ref.bessel_i1(-3.0) == -ref.bessel_i1(3.0)


@given(st.floats(0.0, 40.0))
def test_inverse_round_trip(x):
    y = ref.bessel_i0(x)
    assert ref.bessel_i0_inv(y) == pytest.approx(x, rel=1e-10, abs=1e-7)


@given(st.floats(1.0, 1e10))
def test_inverse_then_forward(y):
    assert ref.bessel_i0(ref.bessel_i0_inv(y)) == pytest.approx(y, rel=1e-12)


def test_inverse_domain():
    assert ref.bessel_i0_inv(1.0) == 0.0
    with pytest.raises(ValueError):
        ref.bessel_i0_inv(0.5)


# --- Painleve III ------------------------------------------------------------

def test_painleve_step_halving():
    a = ref.painleve_iii(math.pi / 2, 5.0, 1e-3)
    b = ref.painleve_iii(math.pi / 2, 5.0, 5e-4)
    assert np.max(np.abs(a.phi - b.at(a.z))) < 1e-8
    assert abs(ref.z_star(a) - ref.z_star(b)) < 1e-6


def test_painleve_satisfies_equation():
    p = ref.painleve_iii(0.3, 6.0)
    h = p.z[1] - p.z[0]
    z = p.z[1:-1]
    d2 = (p.phi[2:] - 2 * p.phi[1:-1] + p.phi[:-2]) / h ** 2
    res = d2 + p.dphi[1:-1] / z - np.sin(p.phi[1:-1])
    assert np.max(np.abs(res[z > 0.1])) < 1e-5


def test_profile_starts_flat():
    p = ref.painleve_iii(1.0, 1.0)
    assert p.at(0.0) == 1.0
    # phi ~ phi0 + sin(phi0) z^2 / 4 + sin(phi0) cos(phi0) z^4 / 64 near the centre
    s, c = math.sin(1.0), math.cos(1.0)
    assert p.at(0.1) == pytest.approx(1 + s * 0.01 / 4 + s * c * 1e-4 / 64, abs=1e-8)


def test_z_star_none_when_not_reached():
    assert ref.z_star(ref.painleve_iii(0.1, 2.0)) is None


def test_z_star_values():
    # [DERIVED] RK4 with step 1e-3 and 5e-4 agree to 1e-7
    assert ref.z_star(ref.painleve_iii(math.pi / 2, 5.0)) == pytest.approx(2.7289, abs=2e-3)
    assert ref.z_star(ref.painleve_iii(math.pi / 100, 10.0)) == pytest.approx(6.7542, abs=1e-3)
    assert ref.z_star(ref.painleve_iii(math.pi / 1000, 12.0)) == pytest.approx(9.1981, abs=1e-3)


@pytest.mark.parametrize("phi0", [math.pi / 100, math.pi / 1000])
def test_asymptotic_profile_close(phi0):
    p = ref.painleve_iii(phi0, 12.0)
    zs = ref.z_star(p)
    m = p.z <= zs
    err = np.max(np.abs(ref.painleve_asymptotic(phi0, p.z[m]) - p.phi[m]))
    assert err < 0.15
    assert abs(ref.asymptotic_crossing(phi0) - zs) < 0.1


def test_crossing_grows_like_log():
    zs = [ref.z_star(ref.painleve_iii(10.0 ** -k, 16.0)) for k in (2, 3, 4)]
    steps = np.diff(zs)
    # each factor of 10 in phi0 moves z* by roughly log 10
    assert np.all(np.abs(steps - math.log(10)) < 0.3)


def test_bessel_bound_constant():
    assert ref.bessel_bound_constant(math.pi) == pytest.approx(0.0, abs=1e-7)
    assert ref.bessel_bound_constant(math.pi / 2) == pytest.approx(math.sqrt(2 / math.pi))


# --- bobbin ------------------------------------------------------------------

def test_bobbin_energy_conserved():
    kappa = 2.0
    b = ref.bobbin_profile(kappa, 8.0)
    k2 = kappa * kappa + 1
    e = b.ds ** 2 / 2 + np.sinh(b.s) ** 2 / (2 * k2)
    assert np.max(np.abs(e - kappa ** 2 / (2 * k2))) < 1e-10


@pytest.mark.parametrize("kappa", [0.5, 1.0, 3.0])
def test_bobbin_peak(kappa):
    b = ref.bobbin_profile(kappa, 15.0)
    assert b.max_abs_s() == pytest.approx(math.asinh(kappa), abs=1e-6)


def test_bobbin_rejects_bad_kappa():
    with pytest.raises(ValueError):
        ref.bobbin_profile(0.0, 1.0)


def test_bobbin_bound_values():
    assert ref.bobbin_energy_bound(0.0) == pytest.approx(1.0, abs=1e-15)


# past r = 6 the check itself loses digits to k^2 - sinh^2 r cancelling
@given(st.floats(0.0, 6.0))
def test_bobbin_bound_balances(r):
    k = ref.bobbin_energy_bound(r)
    sh = math.sinh(r)
    # both branches are equal at the optimum
    assert k == pytest.approx(math.cosh(r) / math.sqrt(k * k - sh * sh), rel=1e-9)
    assert k >= sh


# --- recursion curves ----------------------------------------------------------

def test_alpha_star_tangency():
    a_star = ref.alpha_star()
    assert 1 / a_star ** 2 == pytest.approx(0.7291, abs=1e-3)
    alpha = np.linspace(0.01, 2.0, 2000)
    f1, f2 = ref.recursion_curves(alpha)
    # the quadratic curve touches f1 from below
    assert np.all(f2 <= f1 + 1e-9)
    assert np.min(f1 - f2) < 1e-6


def test_recursion_bound_at_threshold():
    assert ref.amsler_recursion_bound(PHI_STAR, PHI_STAR, 1.0) == pytest.approx(1 / 3)


def test_recursion_bound_below_observed(cx8):
    # [published] the f1 bound holds at every Amsler-diagonal branch point
    kinds = [b for b in cx8.branches if b.node_kind == "amsler_diagonal"]
    assert kinds
    for b in kinds:
        bound = ref.amsler_recursion_bound(b.phi_n, cx8.phi_star, b.s_n)
        if b.jk == (0, 0):
            # trisected at the apex: the ratio is exactly 1/3, a hair under the bound
            assert b.ratio == pytest.approx(1 / 3) and bound <= b.ratio * 1.001
        else:
            assert bound <= b.ratio * (1 + 1e-9)
