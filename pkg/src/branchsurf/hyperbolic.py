"""Poincare disk primitives: Mobius translations, distances, geodesic rays and
the rhombus completion that drives the hyperbolic Chebyshev net.

All functions accept python complex scalars or complex numpy arrays.
"""
import numpy as np

DISK_MARGIN = 1e-12
DEGENERATE_TOL = 1e-12


class DiskOverflowError(ValueError):
    """A point left the open unit disk (|z| >= 1 - DISK_MARGIN)."""


def check_disk(z):
    """Return ``z`` unchanged, raising DiskOverflowError if any entry has left the disk."""
    a = np.abs(np.asarray(z))
    if np.any(a >= 1.0 - DISK_MARGIN):
        raise DiskOverflowError(f"point with |z| = {a.max():.17g} is not inside the disk")
    return z


def mobius(z, z0):
    """Disk automorphism sending 0 to ``z0``; ``mobius(., -z0)`` is its inverse."""
    return (z + z0) / (1 + z * np.conj(z0))


def hyp_distance(z1, z2):
    """Hyperbolic distance in the curvature -1 Poincare disk.

    Evaluated as 2 artanh |(z1 - z2) / (1 - z1 conj(z2))|, which equals the
    arccosh form but keeps full precision for nearby points.
    """
    r = np.abs(z1 - z2) / np.abs(1 - z1 * np.conj(z2))
    return 2.0 * np.arctanh(r)


def hyp_distance_arccosh(z1, z2):
    """The textbook arccosh form of the distance (used as a cross-check)."""
    num = 2.0 * np.abs(z1 - z2) ** 2
    den = (1.0 - np.abs(z1) ** 2) * (1.0 - np.abs(z2) ** 2)
    return np.arccosh(1.0 + num / den)


def geodesic_points(base, direction, delta, n):
    """Points k*delta along the geodesic ray leaving ``base`` at angle ``direction``.

    Returns an array of length n + 1 whose first entry is ``base`` itself.
    Raises DiskOverflowError if the ray gets numerically too close to the
    boundary circle; ask for fewer points in that case.
    """
    if n < 0 or not delta > 0:
        raise ValueError("need n >= 0 and delta > 0")
    t = np.tanh(np.arange(n + 1) * delta / 2.0)
    pts = mobius(np.exp(1j * direction) * t, base)
    pts[0] = base
    return check_disk(pts)


def complete_rhombus(z0, z1, z2):
    """Fourth vertex of the hyperbolic rhombus with vertex ``z0`` and neighbours ``z1``, ``z2``.

    The sides z0-z1 and z0-z2 must have equal length; the returned point is at
    that same distance from both ``z1`` and ``z2``.  When z1 and z2 are
    antipodal about z0 the rhombus collapses and z0 itself comes back; use
    :func:`rhombus_degenerate` to flag that case.
    """
    w1 = mobius(z1, -z0)
    w2 = mobius(z2, -z0)
    w12 = (w1 + w2) / (1 + np.abs(w1 * w2))
    return mobius(w12, z0)


def rhombus_degenerate(z0, z1, z2, tol=DEGENERATE_TOL):
    """True where the two edges at ``z0`` point in opposite directions."""
    w1 = mobius(z1, -z0)
    w2 = mobius(z2, -z0)
    return np.abs(w1 + w2) < tol * np.maximum(np.abs(w1), 1e-300)


def vertex_angle(z0, z1, z2):
    """Signed angle at ``z0`` from the edge towards ``z1`` to the edge towards ``z2``, in (-pi, pi]."""
    w1 = mobius(z1, -z0)
    w2 = mobius(z2, -z0)
    return np.angle(w2 * np.conj(w1))


def cross(a, b):
    """z-component of the planar cross product of two complex numbers."""
    return np.imag(np.conj(a) * b)


def trisect_angles(z0, z1, z2):
    """Directions at ``z0`` splitting the wedge from edge z0-z1 to edge z0-z2 into thirds.

    Returns absolute directions (phi1, phi2) with phi1 one third and phi2 two
    thirds of the signed turn from the first edge.  A wedge of (near) zero
    opening raises ValueError.
    """
    w1 = mobius(z1, -z0)
    w2 = mobius(z2, -z0)
    turn = np.angle(w2 * np.conj(w1))
    if abs(turn) < 1e-9:
        raise ValueError("degenerate wedge: edges are parallel")
    a = np.angle(w1)
    return a + turn / 3.0, a + 2.0 * turn / 3.0


def reversal_check(z, z_up, z_um, z_vp, z_vm):
    """True if the quads around ``z`` change orientation (a folded vertex).

    ``z_up``/``z_um`` are the forward/backward neighbours along the first
    family and ``z_vp``/``z_vm`` along the second.
    """
    prod = 1.0
    for a in (z_up, z_um):
        for b in (z_vp, z_vm):
            prod = prod * cross(mobius(a, -z), mobius(b, -z))
    return prod <= 0
