"""Greedy construction of branched hyperbolic Chebyshev nets in the Poincare disk.

The disk of radius R is covered by sectors filled with rhombi of side delta.
Whenever the asymptotic angle in a sector climbs past a threshold phi_star the
sector is cut at the corner of its largest safe L-shaped region and three new
sectors are grown from that corner, each with a third of the opening angle.
"""
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import hyperbolic as hb
from .quadgraph import AsymptoticComplex, Attaching, BranchRecord, Sector
from .reference import bessel_i0_inv


class ConfigError(ValueError):
    """Invalid construction parameters."""


class InconsistentCut(RuntimeError):
    """The angle threshold is already violated at a sector origin."""


def grid_size(radius, delta):
    return int(math.ceil(2.0 * radius / delta))


def ray_length(base, radius, delta):
    """Steps needed on a ray from ``base`` to get past the disk of radius R.

    Point k lies at least k*delta - d(0, base) from the origin, so nothing
    beyond this count can be active; stopping here keeps rays away from the
    boundary circle.
    """
    d0 = float(hb.hyp_distance(0j, base))
    return min(grid_size(radius, delta), int(math.ceil((radius + d0) / delta)) + 1)


def ray_activity(points, radius):
    """Keep a ray point while its predecessor is still inside the radius-R disk."""
    inside = hb.hyp_distance(0, points) <= radius
    act = np.ones(len(points), dtype=bool)
    act[1:] = np.cumprod(inside[:-1]).astype(bool)
    return act


def fill_sector(row, row_active, col, col_active, radius):
    """Fill a sector from its two boundary lines by rhombus completion.

    ``row`` holds the points (j, 0) and ``col`` the points (0, k); both start
    with the sector origin.  A vertex is created only when its three
    predecessors exist and at least one of (j-1, k), (j, k-1) lies inside the
    disk of radius ``radius``.  Returns (z, active, n_degenerate) cropped to
    the bounding box of the active vertices.
    """
    nj, nk = len(row) - 1, len(col) - 1
    z = np.full((nj + 1, nk + 1), np.nan + 0j)
    act = np.zeros((nj + 1, nk + 1), dtype=bool)
    z[:, 0] = row
    z[0, :] = col
    act[:, 0] = row_active
    act[0, :] = col_active
    z[~act] = np.nan
    inside = np.zeros_like(act)
    inside[:, 0] = act[:, 0] & (hb.hyp_distance(0, np.where(act[:, 0], row, 0)) <= radius)
    inside[0, :] = act[0, :] & (hb.hyp_distance(0, np.where(act[0, :], col, 0)) <= radius)
    degenerate = 0
    for s in range(2, nj + nk + 1):
        j = np.arange(max(1, s - nk), min(nj, s - 1) + 1)
        if len(j) == 0:
            continue
        k = s - j
        ok = act[j - 1, k - 1] & act[j - 1, k] & act[j, k - 1] & (inside[j - 1, k] | inside[j, k - 1])
        if not ok.any():
            break
        j, k = j[ok], k[ok]
        z0, z1, z2 = z[j - 1, k - 1], z[j, k - 1], z[j - 1, k]
        degenerate += int(hb.rhombus_degenerate(z0, z1, z2).sum())
        zz = hb.complete_rhombus(z0, z1, z2)
        z[j, k] = zz
        act[j, k] = True
        inside[j, k] = hb.hyp_distance(0, zz) <= radius
    jmax = int(np.flatnonzero(act.any(axis=1)).max())
    kmax = int(np.flatnonzero(act.any(axis=0)).max())
    return z[: jmax + 1, : kmax + 1].copy(), act[: jmax + 1, : kmax + 1].copy(), degenerate


def sector_angles(z, act, excised=None):
    """Raw signed vertex angles; NaN unless both forward neighbours exist.

    A vertex whose forward quad was removed by a cut keeps no angle either.
    """
    nj, nk = z.shape
    phi = np.full((nj, nk), np.nan)
    a = np.zeros((nj + 1, nk + 1), dtype=bool)
    a[:nj, :nk] = act
    ok = a[1:, :-1] & a[:-1, 1:]
    ok = ok[:nj, :nk] & act
    if excised is not None:
        ex = np.zeros((nj + 1, nk + 1), dtype=bool)
        ex[:nj, :nk] = excised
        ok &= ~ex[1:, 1:]
    jj, kk = np.nonzero(ok)
    if len(jj):
        phi[jj, kk] = hb.vertex_angle(z[jj, kk], z[jj + 1, kk], z[jj, kk + 1])
    return phi


def reversal_flags(z, act):
    """Interior vertices whose four incident quads do not share one orientation."""
    nj, nk = z.shape
    out = np.zeros((nj, nk), dtype=bool)
    if nj < 3 or nk < 3:
        return out
    c = act[1:-1, 1:-1] & act[2:, 1:-1] & act[:-2, 1:-1] & act[1:-1, 2:] & act[1:-1, :-2]
    jj, kk = np.nonzero(c)
    jj, kk = jj + 1, kk + 1
    if len(jj):
        out[jj, kk] = hb.reversal_check(z[jj, kk], z[jj + 1, kk], z[jj - 1, kk], z[jj, kk + 1], z[jj, kk - 1])
    return out


def find_cut(phi, phi_star):
    """Corner (j*, k*) of the largest L-shaped region where |phi| <= phi_star.

    Columns 0..j* and rows 0..k* are free of violations.  Returns None when
    the sector never exceeds the threshold.
    """
    bad = np.abs(np.nan_to_num(phi, nan=0.0)) > phi_star
    if not bad.any():
        return None
    if bad[0, 0]:
        raise InconsistentCut("angle threshold exceeded at the sector origin")
    j_bad = int(np.flatnonzero(bad.any(axis=1)).min())
    k_bad = int(np.flatnonzero(bad.any(axis=0)).min())
    # a violation on a boundary line still leaves a usable corner on that line
    return max(j_bad - 1, 0), max(k_bad - 1, 0)


def initial_directions(m, phi0=None):
    """Directions of the 2m rays leaving the origin.

    By default the rays are equally spaced.  With an explicit ``phi0`` the
    first sector opens by phi0 and the remaining 2m - 1 share the rest evenly.
    """
    if phi0 is None:
        return [math.pi * r / m for r in range(2 * m)]
    rest = (2.0 * math.pi - phi0) / (2 * m - 1)
    return [0.0] + [phi0 + (r - 1) * rest for r in range(1, 2 * m)]


def _check_config(radius, delta, phi_star, m, phi0):
    if not (radius > 0 and math.isfinite(radius)):
        raise ConfigError("radius must be positive")
    if not (delta > 0 and math.isfinite(delta)):
        raise ConfigError("delta must be positive")
    if m < 2:
        raise ConfigError("need at least two sector pairs (m >= 2)")
    if not (0 < phi_star < math.pi):
        raise ConfigError("phi_star must lie in (0, pi)")
    openings = np.diff(initial_directions(m, phi0) + [2 * math.pi])
    if np.any(openings <= 0) or np.any(openings >= math.pi):
        raise ConfigError("initial sector openings must lie in (0, pi)")
    if np.any(openings >= phi_star):
        raise ConfigError("phi_star must exceed every initial sector opening")


def _make_sector(sid, row, row_act, col, col_act, radius, **kw):
    z, act, ndeg = fill_sector(row, row_act, col, col_act, radius)
    excised = np.zeros_like(act)
    phi = sector_angles(z, act)
    return Sector(sid=sid, z=z, active=act, phi=phi, excised=excised, degenerate=ndeg, **kw)


def _map(threads, fn, jobs):
    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(lambda a: fn(*a[0], **a[1]), jobs))
    return [fn(*a, **k) for a, k in jobs]


def _initial(cx, radius, delta, m, phi0, threads):
    n = ray_length(0j, radius, delta)
    dirs = initial_directions(m, phi0)
    rays = []
    for b in dirs:
        p = hb.geodesic_points(0j, b, delta, n)
        rays.append((p, ray_activity(p, radius)))
    jobs = []
    for i in range(2 * m):
        row, col = rays[i], rays[(i + 1) % (2 * m)]
        fam = "u" if i % 2 == 0 else "v"
        jobs.append(((i, row[0], row[1], col[0], col[1], radius), dict(generation=0, j_family=fam)))
    cx.sectors.extend(_map(threads, _make_sector, jobs))
    for i in range(2 * m):
        cx.attachings.append(Attaching(child=(i + 1) % (2 * m), axis="j", parent=i, start=(0, 0), step=(0, 1)))


def build_periodic_amsler(radius, m0, delta=0.05, threads=1):
    """2*m0 identical Amsler sectors of opening pi/m0 with no surgery."""
    cx = AsymptoticComplex(radius=radius, delta=delta, phi_star=math.pi, m=m0)
    _initial(cx, radius, delta, m0, None, threads)
    return cx


def amsler_sector(radius, opening, delta=0.05):
    """A single Amsler sector between two geodesic rays meeting at the origin."""
    n = ray_length(0j, radius, delta)
    r1 = hb.geodesic_points(0j, 0.0, delta, n)
    r2 = hb.geodesic_points(0j, opening, delta, n)
    return _make_sector(0, r1, ray_activity(r1, radius), r2, ray_activity(r2, radius), radius,
                        generation=0, j_family="u")


def sector_admissible(sec):
    """No fold: every defined angle keeps the sign of the origin angle and no vertex reverses."""
    phi = sec.phi[~np.isnan(sec.phi)]
    if np.any(np.sign(phi) != np.sign(sec.phi[0, 0])):
        return False
    return not reversal_flags(sec.z, sec.active).any()


def minimal_amsler_sectors(radius, delta=0.05, m_max=400):
    """Smallest m0 for which the periodic Amsler net of radius R does not fold."""
    m0 = 2
    while m0 <= m_max:
        if sector_admissible(amsler_sector(radius, math.pi / m0, delta)):
            return m0
        m0 += 1
    raise ConfigError(f"no admissible periodic Amsler net with m0 <= {m_max}")


def _surgery(cx, sec, cut, queue, threads):
    delta, radius = cx.delta, cx.radius
    js, ks = cut
    z0, z1, z2 = sec.z[js, ks], sec.z[js + 1, ks], sec.z[js, ks + 1]
    phi_parent = float(abs(sec.phi[js, ks]))
    phi_n = sec.opening
    phi1, phi2 = hb.trisect_angles(z0, z1, z2)
    n = ray_length(z0, radius, delta)
    ray1 = hb.geodesic_points(z0, phi1, delta, n)
    ray2 = hb.geodesic_points(z0, phi2, delta, n)
    act1, act2 = ray_activity(ray1, radius), ray_activity(ray2, radius)
    row_p, row_pa = sec.z[js:, ks].copy(), sec.active[js:, ks].copy()
    col_p, col_pa = sec.z[js, ks:].copy(), sec.active[js, ks:].copy()

    # excise the parent beyond the cut corner
    cutmask = np.zeros_like(sec.active)
    cutmask[js + 1:, ks + 1:] = True
    cutmask &= sec.active
    sec.excised |= cutmask
    sec.active &= ~cutmask
    sec.z[cutmask] = np.nan
    sec.phi = sector_angles(sec.z, sec.active, sec.excised)

    bid = len(cx.branches)
    gen = sec.generation + 1
    base = len(cx.sectors)
    s1, s2, s3 = base, base + 1, base + 2
    common = dict(generation=gen, j_family=sec.j_family, origin_branch=bid)
    jobs = [
        ((s1, row_p, row_pa, ray1, act1, radius), dict(role="right", fresh_j=False, fresh_k=True, **common)),
        ((s2, ray2, act2, ray1, act1, radius), dict(role="middle", fresh_j=True, fresh_k=True, **common)),
        ((s3, ray2, act2, col_p, col_pa, radius), dict(role="left", fresh_j=True, fresh_k=False, **common)),
    ]
    cx.sectors.extend(_map(threads, _make_sector, jobs))
    cx.attachings += [
        Attaching(child=s1, axis="j", parent=sec.sid, start=(js, ks), step=(1, 0)),
        Attaching(child=s1, axis="k", parent=s2, start=(0, 0), step=(0, 1)),
        Attaching(child=s3, axis="j", parent=s2, start=(0, 0), step=(1, 0)),
        Attaching(child=s3, axis="k", parent=sec.sid, start=(js, ks), step=(0, 1)),
    ]
    origin = sec.z[0, 0]
    s_n = radius - float(hb.hyp_distance(0j, origin))
    alpha_sq = bessel_i0_inv(cx.phi_star / phi_n) ** 2 / (4.0 * s_n)
    kind = "amsler_diagonal" if (sec.fresh_j and sec.fresh_k) else "pseudo_amsler"
    cx.branches.append(BranchRecord(
        bid=bid, generation=gen, parent_sector=sec.sid, parent_branch=sec.origin_branch,
        jk=(js, ks), location=complex(z0), phi_parent=phi_parent, phi_n=phi_n, s_n=s_n,
        alpha_sq=float(alpha_sq), node_kind=kind, daughters=(s1, s2, s3)))
    queue.extend([s1, s2, s3])


def run_greedy(radius, phi_star=3 * math.pi / 4, delta=0.05, m=2, phi0=None,
               max_generations=64, threads=1):
    """Branched asymptotic net covering the hyperbolic disk of radius ``radius``.

    Sectors are processed first in, first out.  A sector whose angle exceeds
    ``phi_star`` is cut and replaced by three daughters.  If a cut would go
    deeper than ``max_generations`` it is skipped and the returned complex has
    status "NON_TERMINATED".
    """
    _check_config(radius, delta, phi_star, m, phi0)
    cx = AsymptoticComplex(radius=radius, delta=delta, phi_star=phi_star, m=m)
    _initial(cx, radius, delta, m, phi0, threads)
    queue = deque(range(len(cx.sectors)))
    while queue:
        sec = cx.sectors[queue.popleft()]
        cut = find_cut(sec.phi, phi_star)
        if cut is None:
            continue
        if sec.generation + 1 > max_generations:
            cx.status = "NON_TERMINATED"
            continue
        _surgery(cx, sec, cut, queue, threads)
    cx.invalidate()
    return cx
