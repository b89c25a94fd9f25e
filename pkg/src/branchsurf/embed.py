"""Gauss map and 3D surface of a branched asymptotic net.

The unit normals form a spherical Chebyshev net: every edge spans the same
spherical angle delta and every quad is completed by reflecting the opposite
normal (the discrete Moutard step).  Positions then follow from the discrete
Lelieuvre formulas r1 = r0 + N1 x N0 along u-edges and r2 = r0 - N2 x N0
along v-edges.
"""
import math
from dataclasses import dataclass

import numpy as np

E3 = np.array([0.0, 0.0, 1.0])


class DegenerateNormal(ValueError):
    """The two neighbours of a spherical quad are antipodal."""


def complete_normal(n0, n1, n2):
    """Reflect n0 across the line through n1 + n2 (works on (..., 3) arrays)."""
    n0, n1, n2 = np.asarray(n0, float), np.asarray(n1, float), np.asarray(n2, float)
    s = n1 + n2
    ss = np.sum(s * s, axis=-1, keepdims=True)
    if np.any(ss < 1e-18):
        raise DegenerateNormal("antipodal neighbours: the reflection axis is undefined")
    return 2.0 * np.sum(s * n0, axis=-1, keepdims=True) / ss * s - n0


def rotate(v, axis, angle):
    """Rodrigues rotation of v about the unit vector ``axis``."""
    c, s = math.cos(angle), math.sin(angle)
    return v * c + np.cross(axis, v) * s + axis * np.dot(axis, v) * (1 - c)


def family_sign(family):
    return 1.0 if family == "u" else -1.0


def ray_normals(n, e, family, delta, count):
    """Normals along a straight asymptotic line leaving a point with normal n in direction e.

    The normal turns by delta per step about e; u- and v-lines turn in
    opposite senses so that both Lelieuvre steps move forward along e.
    """
    k = np.arange(count)[:, None] * delta
    b = family_sign(family) * np.cross(n, e)
    return np.cos(k) * n + np.sin(k) * b


def lelieuvre_steps(normals, family):
    """Edge vectors N_{i+1} x N_i (u) or -N_{i+1} x N_i (v) along the last-but-one axis."""
    return family_sign(family) * np.cross(normals[1:], normals[:-1])


def integrate_line(r0, normals, family):
    out = np.empty_like(normals)
    out[0] = r0
    out[1:] = r0 + np.cumsum(lelieuvre_steps(normals, family), axis=0)
    return out


@dataclass
class SectorNet:
    """Normals and positions of one sector, shape (nj + 1, nk + 1, 3), NaN where inactive."""

    normals: np.ndarray
    positions: np.ndarray


@dataclass
class SphericalNet:
    cx: object
    delta: float
    sectors: list
    rays: dict

    def normal(self, sid, j, k):
        return self.sectors[sid].normals[j, k]


def _fill_normals(row, col, active):
    nj, nk = active.shape
    out = np.full((nj, nk, 3), np.nan)
    out[:, 0] = row[:nj]
    out[0, :] = col[:nk]
    out[~active] = np.nan
    for s in range(2, nj + nk - 1):
        j = np.arange(max(1, s - nk + 1), min(nj - 1, s - 1) + 1)
        if len(j) == 0:
            continue
        k = s - j
        ok = active[j, k]
        if not ok.any():
            continue
        j, k = j[ok], k[ok]
        out[j, k] = complete_normal(out[j - 1, k - 1], out[j, k - 1], out[j - 1, k])
    return out


def _positions(normals, active, row_r, col_r, j_family, k_family):
    """Positions from the row and column data, summing k-edges column by column."""
    nj, nk = active.shape
    steps = np.zeros((nj, nk, 3))
    steps[:, 1:] = family_sign(k_family) * np.cross(normals[:, 1:], normals[:, :-1])
    steps[~active] = 0.0
    pos = row_r[:nj, None, :] + np.cumsum(steps, axis=1)
    # boundary lines are copies, never recomputed, so seams stay bit-identical
    pos[:, 0] = row_r[:nj]
    pos[0, :] = col_r[:nk]
    pos[~active] = np.nan
    return pos


def build_spherical_net(cx, r_origin=(0.0, 0.0, 0.0), frame=None):
    """Normals and Lelieuvre positions over every sector of ``cx``.

    Initial rays leave the origin with normal e3 and tangents (cos b, sin b, 0)
    for their disk directions b; ``frame`` (a 3x3 rotation) rotates all of
    that boundary data.  At a branch point the two new rays get the tangents
    that trisect the angle between the parent's forward edges within the
    tangent plane.
    """
    delta = cx.delta
    rot = np.eye(3) if frame is None else np.asarray(frame, float)
    n0 = rot @ E3
    r0 = np.asarray(r_origin, float)
    nets = [None] * len(cx.sectors)
    rays = {}
    m2 = 2 * cx.m
    init = [s for s in cx.sectors if s.generation == 0]
    for i, s in enumerate(init):
        count = _ray_count(cx)
        b = float(np.angle(s.z[1, 0])) if s.active[1, 0] else None
        if b is None:
            raise ValueError("initial ray without a first step")
        e = rot @ np.array([math.cos(b), math.sin(b), 0.0])
        fam = s.j_family
        nrm = ray_normals(n0, e, fam, delta, count)
        rays[("init", i)] = (nrm, integrate_line(r0, nrm, fam))
    branch_of = {b.bid: b for b in cx.branches}
    for sec in cx.sectors:
        sid = sec.sid
        act = sec.active
        nj, nk = act.shape
        if sec.generation == 0:
            row_n, row_r = rays[("init", sid)]
            col_n, col_r = rays[("init", (sid + 1) % m2)]
            row_n, row_r = row_n[:nj], row_r[:nj]
            col_n, col_r = col_n[:nk], col_r[:nk]
        else:
            br = branch_of[sec.origin_branch]
            if br.bid not in rays:
                rays[br.bid] = _branch_rays(cx, nets, br, delta)
            (n1, p1), (n2, p2) = rays[br.bid]
            par = nets[br.parent_sector]
            js, ks = br.jk
            if sec.role == "right":
                row_n, row_r = par.normals[js:, ks], par.positions[js:, ks]
                col_n, col_r = n1, p1
            elif sec.role == "middle":
                row_n, row_r, col_n, col_r = n2, p2, n1, p1
            else:
                row_n, row_r = n2, p2
                col_n, col_r = par.normals[js, ks:], par.positions[js, ks:]
        row_n, row_r = _fit(row_n, nj), _fit(row_r, nj)
        col_n, col_r = _fit(col_n, nk), _fit(col_r, nk)
        normals = _fill_normals(row_n, col_n, act)
        pos = _positions(normals, act, row_r, col_r, sec.j_family, sec.k_family)
        nets[sid] = SectorNet(normals, pos)
    return SphericalNet(cx, delta, nets, rays)


def _fit(a, n):
    if len(a) >= n:
        return a[:n]
    pad = np.full((n - len(a),) + a.shape[1:], np.nan)
    return np.concatenate([a, pad])


def _branch_rays(cx, nets, br, delta):
    par = nets[br.parent_sector]
    sec = cx.sectors[br.parent_sector]
    js, ks = br.jk
    nb = par.normals[js, ks]
    rb = par.positions[js, ks]
    t1 = par.positions[js + 1, ks] - rb
    t2 = par.positions[js, ks + 1] - rb
    theta = math.atan2(float(np.dot(nb, np.cross(t1, t2))), float(np.dot(t1, t2)))
    e = t1 / np.linalg.norm(t1)
    e1 = rotate(e, nb, theta / 3.0)
    e2 = rotate(e, nb, 2.0 * theta / 3.0)
    count = _ray_count(cx)
    n1 = ray_normals(nb, e1, sec.k_family, delta, count)
    n2 = ray_normals(nb, e2, sec.j_family, delta, count)
    return (n1, integrate_line(rb, n1, sec.k_family)), (n2, integrate_line(rb, n2, sec.j_family))


def _ray_count(cx):
    return int(math.ceil(2.0 * cx.radius / cx.delta)) + 1


@dataclass
class KSurface:
    """Global vertex positions with seams merged, quad faces and the complex they came from."""

    vertices: np.ndarray
    normals: np.ndarray
    faces: np.ndarray
    net: SphericalNet


def integrate_lelieuvre(net):
    """Collect the per-sector positions into one vertex list using the complex's numbering."""
    idx = net.cx.index()
    o = idx.owner
    verts = np.empty((idx.n_vertices, 3))
    nrms = np.empty((idx.n_vertices, 3))
    for sid, sn in enumerate(net.sectors):
        m = o[:, 0] == sid
        verts[m] = sn.positions[o[m, 1], o[m, 2]]
        nrms[m] = sn.normals[o[m, 1], o[m, 2]]
    return KSurface(verts, nrms, idx.face_array, net)


def closure_residuals(net):
    """|r(j+1,k) - r(j,k) - (j-edge from the normals)| over all j-edges in all sectors.

    Positions are summed along k, so this is exactly the mismatch between the
    two routes around every quad.
    """
    out = []
    for sec, sn in zip(net.cx.sectors, net.sectors):
        a = sec.active
        ok = a[:-1, :] & a[1:, :]
        ok[:, 0] = False
        if not ok.any():
            continue
        step = family_sign(sec.j_family) * np.cross(sn.normals[1:], sn.normals[:-1])
        d = sn.positions[1:] - sn.positions[:-1] - step
        out.append(np.linalg.norm(d[ok], axis=-1))
    return np.concatenate(out) if out else np.zeros(0)


def gauss_angle_sum(surface, v):
    """Signed angle swept by the Gauss image around vertex ``v``.

    Neighbours are ordered by the direction of their 3D edges in the tangent
    plane; the projected normal differences are then followed around the
    vertex.  Equals 2 pi (1 - m) at a vertex with 2m incident edges.
    """
    idx = surface.net.cx.index()
    e = idx.edges
    nb = np.concatenate([e[e[:, 0] == v, 1], e[e[:, 1] == v, 0]])
    n = surface.normals[v]
    a = np.cross(n, [1.0, 0.0, 0.0])
    if np.linalg.norm(a) < 0.5:
        a = np.cross(n, [0.0, 1.0, 0.0])
    a /= np.linalg.norm(a)
    b = np.cross(n, a)
    d = surface.vertices[nb] - surface.vertices[v]
    order = np.argsort(np.arctan2(d @ b, d @ a))
    g = surface.normals[nb[order]] - n
    ang = np.arctan2(g @ b, g @ a)
    turn = np.diff(np.concatenate([ang, ang[:1]]))
    turn = (turn + math.pi) % (2 * math.pi) - math.pi
    return float(turn.sum())


def embedded_angles(net, sid):
    """Angle between the forward j- and k-edges of the 3D surface at every vertex of a sector."""
    sn = net.sectors[sid]
    sec = net.cx.sectors[sid]
    p = sn.positions
    nj, nk = sec.active.shape
    out = np.full((nj, nk), np.nan)
    a = p[1:, :-1] - p[:-1, :-1]
    b = p[:-1, 1:] - p[:-1, :-1]
    c = np.sum(a * b, axis=-1) / (np.linalg.norm(a, axis=-1) * np.linalg.norm(b, axis=-1))
    out[:-1, :-1] = np.arccos(np.clip(c, -1.0, 1.0))
    out[np.isnan(sec.phi)] = np.nan
    return out


def validate_embedding(surface, tol=1e-9):
    """Edge lengths, star planarity, Chebyshev property, angle agreement and closure.

    Angle agreement is reported as the largest | |phi_disk| - phi_3d | rather
    than judged here, because its tolerance depends on delta.
    """
    net = surface.net
    cx = net.cx
    idx = cx.index()
    e = idx.edges
    v = surface.vertices
    n = surface.normals
    d = v[e[:, 1]] - v[e[:, 0]]
    lengths = np.linalg.norm(d, axis=1)
    sd = math.sin(net.delta)
    dots = np.sum(n[e[:, 0]] * n[e[:, 1]], axis=1)
    planar = np.maximum(np.abs(np.sum(d * n[e[:, 0]], axis=1)), np.abs(np.sum(d * n[e[:, 1]], axis=1)))
    angle_err = 0.0
    for sid, sec in enumerate(cx.sectors):
        th = embedded_angles(net, sid)
        m = ~np.isnan(th)
        if m.any():
            angle_err = max(angle_err, float(np.max(np.abs(np.abs(sec.phi[m]) - th[m]))))
    res = closure_residuals(net)
    rep = {
        "edge_length_err": float(np.max(np.abs(lengths - sd))) if len(e) else 0.0,
        "chebyshev_err": float(np.max(np.abs(dots - math.cos(net.delta)))) if len(e) else 0.0,
        "planarity_err": float(planar.max()) if len(e) else 0.0,
        "closure_max": float(res.max()) if len(res) else 0.0,
        "angle_err": angle_err,
        "worst_planarity_edge": int(np.argmax(planar)) if len(e) else -1,
    }
    rep["ok"] = (rep["edge_length_err"] < tol and rep["chebyshev_err"] < tol
                 and rep["planarity_err"] < tol and rep["closure_max"] < tol)
    return rep


def export_obj(surface, path):
    """Write vertices and 1-based quad faces; 17 significant digits."""
    with open(path, "w", newline="\n") as fh:
        for x, y, z in surface.vertices:
            fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
        for f in surface.faces + 1:
            fh.write(f"f {f[0]} {f[1]} {f[2]} {f[3]}\n")
