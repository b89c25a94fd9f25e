"""Closed-form and ODE references: Bessel I0, the Painleve III angle profile of
the Amsler surface, Minding's bobbin and the energy bounds built from them.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

SERIES_CUTOFF = 15.0


def _i0_series(x):
    x = np.asarray(x, dtype=float)
    q = (x / 2.0) ** 2
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 200):
        term = term * q / (k * k)
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    return total


def _asymptotic(x, nu):
    # e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(nu) / x^k with the sign flipped for I
    x = np.asarray(x, dtype=float)
    mu = 4.0 * nu * nu
    term = np.ones_like(x)
    total = np.ones_like(x)
    alive = np.ones(x.shape, dtype=bool)
    for k in range(1, 60):
        nxt = -term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
        # stop each entry at its smallest term (optimal truncation)
        alive &= np.abs(nxt) < np.abs(term)
        term = np.where(alive, nxt, 0.0)
        total = total + term
        alive &= np.abs(term) > 1e-17 * np.abs(total)
        if not alive.any():
            break
    return np.exp(x) / np.sqrt(2.0 * math.pi * x) * total


def bessel_i0(x):
    """Modified Bessel function I0 (power series up to 15, asymptotic expansion beyond)."""
    x = np.abs(np.asarray(x, dtype=float))
    with np.errstate(over="ignore"):
        out = np.where(x <= SERIES_CUTOFF, _i0_series(np.minimum(x, SERIES_CUTOFF)),
                       _asymptotic(np.maximum(x, SERIES_CUTOFF), 0.0))
    return float(out) if out.ndim == 0 else out


def _i1_series(x):
    x = np.asarray(x, dtype=float)
    q = (x / 2.0) ** 2
    term = x / 2.0
    total = term.copy()
    for k in range(1, 200):
        term = term * q / (k * (k + 1))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def bessel_i1(x):
    """Modified Bessel function I1, the derivative of I0."""
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    with np.errstate(over="ignore"):
        out = np.where(ax <= SERIES_CUTOFF, _i1_series(np.minimum(ax, SERIES_CUTOFF)),
                       _asymptotic(np.maximum(ax, SERIES_CUTOFF), 1.0))
    out = np.sign(x) * out
    return float(out) if out.ndim == 0 else out


def bessel_i0_inv(y):
    """Nonnegative x with I0(x) = y.  Raises ValueError for y < 1."""
    y = float(y)
    if not y >= 1.0:
        raise ValueError(f"I0 takes values >= 1, got {y!r}")
    if y == 1.0:
        return 0.0
    # cosh(x) >= I0(x) >= 1 + x^2/4 brackets the root
    lo = math.acosh(y)
    hi = 2.0 * math.sqrt(y - 1.0)
    x = brentq(lambda t: bessel_i0(t) - y, lo, max(hi, lo), xtol=1e-15, rtol=1e-15)
    # one Newton polish step
    return x - (bessel_i0(x) - y) / bessel_i1(x) if x > 0 else x


@dataclass
class Profile:
    """Samples of the radial Amsler angle phi(z) together with phi'(z)."""

    z: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    phi0: float

    def at(self, zq):
        """Angle at arbitrary z (inner series below the first sample, cubic Hermite above)."""
        zq = np.asarray(zq, dtype=float)
        s, c = math.sin(self.phi0), math.cos(self.phi0)
        inner = self.phi0 + s * zq ** 2 / 4 + s * c * zq ** 4 / 64
        h = self.z[1] - self.z[0]
        i = np.clip(((zq - self.z[0]) / h).astype(int), 0, len(self.z) - 2)
        t = (zq - self.z[i]) / h
        p0, p1 = self.phi[i], self.phi[i + 1]
        m0, m1 = self.dphi[i] * h, self.dphi[i + 1] * h
        herm = ((2 * t ** 3 - 3 * t ** 2 + 1) * p0 + (t ** 3 - 2 * t ** 2 + t) * m0
                + (-2 * t ** 3 + 3 * t ** 2) * p1 + (t ** 3 - t ** 2) * m1)
        out = np.where(zq < self.z[0], inner, herm)
        return float(out) if out.ndim == 0 else out


def painleve_iii(phi0, z_max, step=1e-3):
    """Integrate phi'' + phi'/z - sin(phi) = 0 with phi(0) = phi0, phi'(0) = 0.

    Classical RK4 with a fixed step, started at z = 10*step from the series
    phi0 + sin(phi0) z^2/4 + sin(phi0) cos(phi0) z^4/64.
    """
    s, c = math.sin(phi0), math.cos(phi0)
    z = 10.0 * step
    y0 = phi0 + s * z ** 2 / 4 + s * c * z ** 4 / 64
    y1 = s * z / 2 + s * c * z ** 3 / 16
    n = int(math.ceil((z_max - z) / step))
    zs = np.empty(n + 1)
    ps = np.empty(n + 1)
    ds = np.empty(n + 1)
    zs[0], ps[0], ds[0] = z, y0, y1
    sin = math.sin
    for i in range(1, n + 1):
        h = step
        a1, b1 = y1, sin(y0) - y1 / z
        zh = z + h / 2
        a2, b2 = y1 + h / 2 * b1, sin(y0 + h / 2 * a1) - (y1 + h / 2 * b1) / zh
        a3, b3 = y1 + h / 2 * b2, sin(y0 + h / 2 * a2) - (y1 + h / 2 * b2) / zh
        a4, b4 = y1 + h * b3, sin(y0 + h * a3) - (y1 + h * b3) / (z + h)
        y0 += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        y1 += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        z = zs[0] + i * step
        zs[i], ps[i], ds[i] = z, y0, y1
    return Profile(zs, ps, ds, phi0)


def z_star(profile, level=math.pi):
    """First z where the profile reaches ``level`` (linear interpolation), or None."""
    idx = np.flatnonzero(profile.phi >= level)
    if len(idx) == 0:
        return None
    i = int(idx[0])
    if i == 0:
        return float(profile.z[0])
    z0, z1 = profile.z[i - 1], profile.z[i]
    p0, p1 = profile.phi[i - 1], profile.phi[i]
    return float(z0 + (level - p0) * (z1 - z0) / (p1 - p0))


def bessel_bound_constant(phi_cap):
    """C = sqrt(sin(phi*)/phi*) for the lower Bessel bound (0 at phi* = pi)."""
    return math.sqrt(max(math.sin(phi_cap), 0.0) / phi_cap)


def _outer(phi0, t):
    return phi0 * np.exp(t) / np.sqrt(2 * math.pi * t) * (1 + 1 / (8 * t))


def pendulum_switch_point(phi0, switch=0.5):
    """z where the outer Bessel asymptotics reaches ``switch``."""
    if _outer(phi0, 1.0) >= switch:
        return 1.0
    return brentq(lambda t: _outer(phi0, t) - switch, 1.0, 700.0)


def _pendulum_branch(phi0, switch, n=4000):
    """z(psi) for psi from the switch angle up to pi + 1 along a slowly damped pendulum.

    The energy E = phi'^2/2 + cos(phi) starts from the Bessel value and slope at
    the switch point and decays as dE/dz = -phi'^2/z, so that both z and E
    become functions of the angle psi.
    """
    zm = pendulum_switch_point(phi0, switch)
    slope = switch * (1 - 1 / (2 * zm) - 1 / (8 * zm * zm + zm))
    psi = np.linspace(switch, math.pi + 1.0, n + 1)
    h = psi[1] - psi[0]
    zs = np.empty(n + 1)
    z, e = zm, math.cos(switch) + slope * slope / 2

    def rhs(ps, z, e):
        p = math.sqrt(max(2.0 * (e - math.cos(ps)), 1e-300))
        return 1.0 / p, -p / z

    zs[0] = z
    for i in range(n):
        a1, b1 = rhs(psi[i], z, e)
        a2, b2 = rhs(psi[i] + h / 2, z + h / 2 * a1, e + h / 2 * b1)
        a3, b3 = rhs(psi[i] + h / 2, z + h / 2 * a2, e + h / 2 * b2)
        a4, b4 = rhs(psi[i] + h, z + h * a3, e + h * b3)
        z += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4)
        e += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
        zs[i + 1] = z
    return psi, zs


def painleve_asymptotic(phi0, z, switch=0.5):
    """Three-regime approximation to the Painleve III profile for small phi0.

    Inner Bessel series phi0 (1 + z^2/4) for z < 1, the outer Bessel asymptotics
    phi0 e^z / sqrt(2 pi z) (1 + 1/(8z)) until the angle reaches ``switch``,
    then a pendulum phi'' = sin(phi) whose energy drifts slowly under the 1/z
    friction term.  Close to pi the last regime is pi - A sin(z* - z) with
    A = sqrt(2 (E + 1)).
    """
    z = np.asarray(z, dtype=float)
    zm = pendulum_switch_point(phi0, switch)
    psi, zp = _pendulum_branch(phi0, switch)
    zz = np.maximum(z, 1.0)
    outer = _outer(phi0, np.minimum(zz, zm))
    pend = np.interp(z, zp, psi)
    out = np.where(z < 1.0, phi0 * (1 + z ** 2 / 4), np.where(z <= zm, outer, pend))
    return float(out) if out.ndim == 0 else out


def asymptotic_crossing(phi0, switch=0.5):
    """First crossing of pi predicted by the three-regime approximation."""
    psi, zp = _pendulum_branch(phi0, switch)
    return float(np.interp(math.pi, psi, zp))


@dataclass
class Bobbin:
    xi: np.ndarray
    s: np.ndarray
    ds: np.ndarray
    rho: np.ndarray
    height: np.ndarray
    sigma: np.ndarray
    phi: np.ndarray
    kappa: float

    def max_abs_s(self):
        """Peak |s| located by cubic Hermite interpolation at the turning points."""
        best = float(np.max(np.abs(self.s)))
        h = self.xi[1] - self.xi[0]
        flips = np.flatnonzero(np.sign(self.ds[:-1]) != np.sign(self.ds[1:]))
        for i in flips:
            p0, p1 = self.s[i], self.s[i + 1]
            m0, m1 = self.ds[i] * h, self.ds[i + 1] * h
            ts = np.linspace(0.0, 1.0, 2001)
            vals = ((2 * ts ** 3 - 3 * ts ** 2 + 1) * p0 + (ts ** 3 - 2 * ts ** 2 + ts) * m0
                    + (-2 * ts ** 3 + 3 * ts ** 2) * p1 + (ts ** 3 - ts ** 2) * m1)
            best = max(best, float(np.max(np.abs(vals))))
        return best


def bobbin_profile(kappa, xi_max, step=1e-3):
    """Minding's bobbin generated by s'' = -sinh(s) cosh(s) / (kappa^2 + 1).

    Starts at s = 0 with s' = kappa / sqrt(kappa^2 + 1).  Returns the radius
    rho = cosh(s)/kappa, the height z (integrated alongside), the branch sign
    sigma = sign(s') and the asymptotic angle as a function of xi = u + v.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    k2 = kappa * kappa + 1.0
    ck = 1.0 / (kappa * math.sqrt(k2))

    def f(y):
        s, p, _ = y
        return np.array([p, -math.sinh(s) * math.cosh(s) / k2, (kappa ** 2 - math.sinh(s) ** 2) * ck])

    n = int(math.ceil(xi_max / step))
    ys = np.empty((n + 1, 3))
    y = np.array([0.0, kappa / math.sqrt(k2), 0.0])
    ys[0] = y
    for i in range(1, n + 1):
        a = f(y)
        b = f(y + step / 2 * a)
        c = f(y + step / 2 * b)
        d = f(y + step * c)
        y = y + step / 6 * (a + 2 * b + 2 * c + d)
        ys[i] = y
    xi = np.arange(n + 1) * step
    s, ds, height = ys[:, 0], ys[:, 1], ys[:, 2]
    sigma = np.where(ds >= 0, 1.0, -1.0)
    arg = np.clip(np.cosh(s) / math.sqrt(k2), -1.0, 1.0)
    phi = (1 + sigma) * np.arcsin(arg) + (1 - sigma) * np.arccos(arg)
    return Bobbin(xi, s, ds, np.cosh(s) / kappa, height, sigma, phi, kappa)


def bobbin_energy_bound(radius):
    """inf over kappa >= sinh R of max(kappa, cosh R / sqrt(kappa^2 - sinh^2 R)).

    The two branches balance at kappa^2 = (sinh^2 R + sqrt(sinh^4 R + 4 cosh^2 R)) / 2.
    """
    sh2 = math.sinh(radius) ** 2
    ch2 = math.cosh(radius) ** 2
    return math.sqrt((sh2 + math.sqrt(sh2 * sh2 + 4.0 * ch2)) / 2.0)


def _f1(alpha):
    return bessel_i0(2.0 * alpha * alpha) / 3.0


def alpha_star():
    """Maximiser of alpha / sqrt(I0(2 alpha^2)/3): the tangency point of f1 and (alpha/alpha*)^2."""
    res = minimize_scalar(lambda a: -a * a / _f1(a), bounds=(0.1, 3.0), method="bounded",
                          options={"xatol": 1e-12})
    a = res.x
    return a / math.sqrt(_f1(a))


def recursion_curves(alpha):
    """Lower bounds on the frontier ratio: f1 = I0(2 alpha^2)/3 and f2 = (alpha/alpha*)^2."""
    a_star = alpha_star()
    alpha = np.asarray(alpha, dtype=float)
    return bessel_i0(2 * alpha * alpha) / 3.0, (alpha / a_star) ** 2


def amsler_recursion_bound(phi_n, phi_star, s_n, c=None):
    """Lower bound (1/3) I0(C/(2 s_n) (I0^{-1}(phi*/phi_n))^2) on phi_{n+1}/phi_n."""
    if c is None:
        c = bessel_bound_constant(phi_star)
    x = bessel_i0_inv(phi_star / phi_n) ** 2
    return bessel_i0(c * x / (2.0 * s_n)) / 3.0
