"""Bending energies, distance to the singular edge, the branched Hazzidakis
identity and the frontier records of a greedy run.
"""
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from . import hyperbolic as hb
from .reference import bessel_i0_inv, bobbin_energy_bound

SINGULAR_TOL = 1e-9


class SingularAngle(ValueError):
    """An asymptotic angle is numerically 0 or pi."""


class LoopError(ValueError):
    """A Hazzidakis loop is open or does not follow the net."""


def principal_curvatures(phi):
    """(tan(|phi|/2), -cot(|phi|/2)) for an asymptotic angle phi."""
    a = np.abs(np.asarray(phi, dtype=float))
    if np.any(a <= SINGULAR_TOL) or np.any(a >= math.pi - SINGULAR_TOL):
        raise SingularAngle("asymptotic angle on the singular edge")
    k1, k2 = np.tan(a / 2), -1.0 / np.tan(a / 2)
    if k1.ndim == 0:
        return float(k1), float(k2)
    return k1, k2


def defined_angles(cx):
    """All defined vertex angles of the complex as magnitudes."""
    parts = [np.abs(s.phi[~np.isnan(s.phi)]) for s in cx.sectors]
    return np.concatenate(parts) if parts else np.zeros(0)


def quad_angles(sec):
    """|phi| at the (j, k) corner of every quad; NaN where there is no quad.

    The 0-corner and the opposite corner of a rhombus carry the same angle, so
    this is the mean over the two corners where the u-to-v angle is measured.
    """
    q = sec.quads()
    out = np.full(q.shape, np.nan)
    out[q] = np.abs(sec.phi[:-1, :-1][q])
    return out


def energy_max(cx):
    """E_inf over the vertices and the branch-angle formula value.

    Returns (vertex_value, formula_value) where vertex_value is the maximum of
    max(tan(|phi|/2), cot(|phi|/2)) over all defined vertices and
    formula_value is max(cot(phi_min/2), tan(phi*/2)) with phi_min the
    smallest sector opening.
    """
    a = defined_angles(cx)
    if not len(a):
        return 1.0, 1.0
    k1, k2 = principal_curvatures(a)
    vertex = float(max(np.max(k1), np.max(-k2)))
    openings = [s.opening for s in cx.sectors if not math.isnan(s.opening)]
    formula = max(1.0 / math.tan(min(openings) / 2), math.tan(cx.phi_star / 2))
    return vertex, formula


def willmore_density(phi):
    a = np.abs(phi) / 2
    return np.tan(a) ** 2 + 1.0 / np.tan(a) ** 2


def energy_willmore(cx, quads=None):
    """Sum over quads of (kappa1^2 + kappa2^2) sin(phi) delta^2.

    ``quads`` optionally restricts the sum to a dict sid -> boolean mask.
    """
    total = 0.0
    d2 = cx.delta ** 2
    for s in cx.sectors:
        q = quad_angles(s)
        m = ~np.isnan(q)
        if quads is not None:
            m &= quads.get(s.sid, np.zeros_like(m))
        if m.any():
            total += float(np.sum(willmore_density(q[m]) * np.sin(q[m]))) * d2
    return total


def total_area(cx):
    d2 = cx.delta ** 2
    return sum(float(np.nansum(np.sin(quad_angles(s)))) * d2 for s in cx.sectors)


def singular_proximity(cx):
    """Smallest distance min(|phi|, pi - |phi|) of any defined angle from the singular values."""
    a = defined_angles(cx)
    if not len(a):
        return math.pi / 2
    return float(np.min(np.minimum(a, math.pi - a)))


@dataclass
class EnergyReport:
    e_inf: float
    e_inf_formula: float
    e_willmore: float
    area: float
    min_phi: float
    max_phi: float
    proximity: float
    n_vertices: int
    n_quads: int
    n_branches: int
    cut_depth: int
    status: str
    min_branch_angle: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def energy_report(cx):
    a = defined_angles(cx)
    e_inf, formula = energy_max(cx)
    idx = cx.index()
    per_gen = {}
    for s in cx.sectors:
        if s.generation and not math.isnan(s.opening):
            per_gen[s.generation] = min(per_gen.get(s.generation, math.pi), s.opening)
    return EnergyReport(
        e_inf=e_inf, e_inf_formula=formula, e_willmore=energy_willmore(cx), area=total_area(cx),
        min_phi=float(a.min()), max_phi=float(a.max()), proximity=singular_proximity(cx),
        n_vertices=idx.n_vertices, n_quads=len(idx.face_array), n_branches=len(cx.branches),
        cut_depth=cx.cut_depth, status=cx.status,
        min_branch_angle={str(g): v for g, v in sorted(per_gen.items())})


@dataclass
class FrontierRecord:
    generation: int
    node_kind: str
    phi_n: float
    phi_ratio: float
    alpha_sq: float
    s_n: float
    branch_radius: float


def frontier_records(cx):
    """One record per branch point: alpha^2 = (I0^{-1}(phi*/phi_n))^2 / (4 s_n) and phi_{n+1}/phi_n."""
    out = []
    for b in cx.branches:
        a2 = bessel_i0_inv(cx.phi_star / b.phi_n) ** 2 / (4.0 * b.s_n)
        out.append(FrontierRecord(
            generation=b.generation, node_kind=b.node_kind, phi_n=b.phi_n, phi_ratio=b.ratio,
            alpha_sq=float(a2), s_n=b.s_n, branch_radius=float(hb.hyp_distance(0j, b.location))))
    return out


# --- Hazzidakis -------------------------------------------------------------

@dataclass
class Loop:
    """A closed lattice path and the quads it encloses.

    ``path`` lists (sector, j, k) entries; consecutive entries in the same
    sector are grid neighbours, consecutive entries in different sectors must
    be the same vertex seen from both sides of a seam.  ``quads`` maps sector
    id to a boolean mask over that sector's quads.
    """

    path: list
    quads: dict


def _steps(cx, loop):
    """Global vertices of the loop, the family of each step and the (sector, j, k) seen first at each vertex."""
    idx = cx.index()
    verts, fams, where = [], [], []
    prev = None
    for sid, j, k in loop.path:
        g = idx.vertex_of(sid, j, k)
        if g < 0:
            raise LoopError(f"inactive vertex {(sid, j, k)} on loop")
        if prev is not None:
            psid, pj, pk, pg = prev
            if psid != sid:
                if pg != g:
                    raise LoopError("sector change away from a seam")
            else:
                dj, dk = j - pj, k - pk
                if abs(dj) + abs(dk) != 1:
                    raise LoopError("loop steps must join grid neighbours")
                sec = cx.sectors[sid]
                fams.append(sec.j_family if dj else sec.k_family)
                verts.append(g)
                where.append((sid, j, k))
        else:
            verts.append(g)
            where.append((sid, j, k))
        prev = (sid, j, k, g)
    if verts[0] != verts[-1]:
        raise LoopError("loop is not closed")
    return verts[:-1], fams, where[:-1]


def corner_angle(sec, j, k):
    """psi = (angle from the u-direction to the v-direction) mod pi at a vertex of ``sec``.

    Uses the sector's forward edges, so it is the sector's own phi when the
    rows are u-lines and its mirror image otherwise.
    """
    phi = sec.phi[j, k]
    if np.isnan(phi):
        raise LoopError(f"no angle at corner {(sec.sid, j, k)}")
    return float(phi if sec.j_family == "u" else -phi) % math.pi


def hazzidakis_terms(cx, loop):
    """(Delta, A, B) for a loop: alternating corner sum, enclosed area and branch correction.

    The corner sum takes psi with sign + where a u-run starts and - where a
    v-run starts, multiplied by the loop's orientation in the disk.  A sums
    sin(phi) delta^2 over the enclosed quads and B is pi (m - 2) over the
    enclosed vertices with 2m edges.
    """
    verts, fams, where = _steps(cx, loop)
    idx = cx.index()
    z = idx.points()
    n = len(verts)
    delta_sum = 0.0
    for i in range(n):
        f_in, f_out = fams[i - 1], fams[i]
        if f_in == f_out:
            continue
        sid, j, k = where[i]
        psi = corner_angle(cx.sectors[sid], j, k)
        delta_sum += psi if f_out == "u" else -psi
    zz = z[verts]
    orient = np.sign(np.sum(np.imag(np.conj(zz) * np.roll(zz, -1))))
    delta_sum *= orient
    area = 0.0
    inner = set()
    on_path = set(verts)
    d2 = cx.delta ** 2
    for sid, mask in loop.quads.items():
        sec = cx.sectors[sid]
        q = quad_angles(sec)
        m = mask & ~np.isnan(q)
        area += float(np.sum(np.sin(q[m]))) * d2
        g = idx.gid[sid]
        jj, kk = np.nonzero(m)
        for dj in (0, 1):
            for dk in (0, 1):
                inner.update(g[jj + dj, kk + dk].tolist())
    deg = idx.degrees()
    b = math.pi * sum(int(deg[v]) // 2 - 2 for v in inner - on_path)
    return float(delta_sum), area, b


def hazzidakis_check(cx, loop):
    """|Delta - A + B| for a closed asymptotic loop."""
    d, a, b = hazzidakis_terms(cx, loop)
    return abs(d - a + b)


def rectangle_loop(cx, sid, j0, k0, j1, k1):
    """Boundary of the grid rectangle [j0, j1] x [k0, k1] inside one sector."""
    path = [(sid, j, k0) for j in range(j0, j1 + 1)]
    path += [(sid, j1, k) for k in range(k0 + 1, k1 + 1)]
    path += [(sid, j, k1) for j in range(j1 - 1, j0 - 1, -1)]
    path += [(sid, j0, k) for k in range(k1 - 1, k0 - 1, -1)]
    mask = np.zeros(cx.sectors[sid].quads().shape, dtype=bool)
    mask[j0:j1, k0:k1] = True
    return Loop(path, {sid: mask})


def branch_loop(cx, bid, a, b, c, d, e, f):
    """Hexagonal loop around a branch point through its parent and its three daughters.

    With (j*, k*) the cut in the parent P and M1, M2, M3 the right, middle and
    left daughters, the corners are P(j*-a, k*-b), P(j*+c, k*-b), M1(c, e),
    M2(f, e), M3(f, d) and P(j*-a, k*+d).
    """
    br = cx.branches[bid]
    p = br.parent_sector
    m1, m2, m3 = br.daughters
    js, ks = br.jk
    path = [(p, j, ks - b) for j in range(js - a, js + c + 1)]
    path += [(p, js + c, k) for k in range(ks - b + 1, ks + 1)]
    path += [(m1, c, k) for k in range(0, e + 1)]
    path += [(m1, j, e) for j in range(c - 1, -1, -1)]
    path += [(m2, j, e) for j in range(0, f + 1)]
    path += [(m2, f, k) for k in range(e - 1, -1, -1)]
    path += [(m3, f, k) for k in range(0, d + 1)]
    path += [(m3, j, d) for j in range(f - 1, -1, -1)]
    path += [(p, j, ks + d) for j in range(js, js - a - 1, -1)]
    path += [(p, js - a, k) for k in range(ks + d - 1, ks - b - 1, -1)]
    quads = {}
    pm = np.zeros(cx.sectors[p].quads().shape, dtype=bool)
    pm[js - a:js + c, ks - b:ks + d] = True
    pm[js:, ks:] = False
    quads[p] = pm
    for sid, nj, nk in ((m1, c, e), (m2, f, e), (m3, f, d)):
        mm = np.zeros(cx.sectors[sid].quads().shape, dtype=bool)
        mm[:nj, :nk] = True
        quads[sid] = mm
    return Loop(path, quads)


def loop_perimeter(loop):
    return len(loop.path) - 1 - sum(1 for a, b in zip(loop.path, loop.path[1:]) if a[0] != b[0])


def random_rectangles(cx, count, rng, max_side=12):
    """Reversal-free rectangles drawn uniformly from sectors with room for them."""
    from .netgen import reversal_flags
    out = []
    tries = 0
    while len(out) < count and tries < 100 * count:
        tries += 1
        s = cx.sectors[int(rng.integers(len(cx.sectors)))]
        q = s.quads()
        if q.shape[0] < 3 or q.shape[1] < 3:
            continue
        j0 = int(rng.integers(q.shape[0] - 1))
        k0 = int(rng.integers(q.shape[1] - 1))
        j1 = j0 + int(rng.integers(1, max_side + 1))
        k1 = k0 + int(rng.integers(1, max_side + 1))
        if j1 > q.shape[0] or k1 > q.shape[1] or not q[j0:j1, k0:k1].all():
            continue
        if reversal_flags(s.z, s.active)[j0:j1 + 1, k0:k1 + 1].any():
            continue
        if np.isnan(s.phi[[j0, j0, j1, j1], [k0, k1, k0, k1]]).any():
            continue
        out.append(rectangle_loop(cx, s.sid, j0, k0, j1, k1))
    return out


def random_branch_loops(cx, count, rng, max_side=8):
    """Hexagons that enclose exactly one branch vertex and only active quads."""
    out = []
    tries = 0
    while len(out) < count and tries < 200 * count:
        tries += 1
        bid = int(rng.integers(len(cx.branches)))
        a, b, c, d, e, f = (int(x) for x in rng.integers(1, max_side + 1, size=6))
        br = cx.branches[bid]
        js, ks = br.jk
        if js - a < 0 or ks - b < 0:
            continue
        try:
            loop = branch_loop(cx, bid, a, b, c, d, e, f)
            _steps(cx, loop)
        except (LoopError, IndexError):
            continue
        if not all(_mask_fits(cx, sid, m) for sid, m in loop.quads.items()):
            continue
        try:
            _, _, b_term = hazzidakis_terms(cx, loop)
        except LoopError:
            continue
        if b_term != math.pi:
            continue
        out.append(loop)
    return out


def _mask_fits(cx, sid, mask):
    q = cx.sectors[sid].quads()
    return bool(np.all(q[mask])) if mask.shape == q.shape else False


# --- scans -------------------------------------------------------------------

def periodic_amsler_energy(radius, delta):
    """E_inf of the least-saddled periodic Amsler net that covers the disk, and its m0.

    All 2 m0 sectors are rotated copies of each other, so one sector is enough.
    """
    from .netgen import amsler_sector, minimal_amsler_sectors
    m0 = minimal_amsler_sectors(radius, delta)
    sec = amsler_sector(radius, math.pi / m0, delta)
    a = np.abs(sec.phi[~np.isnan(sec.phi)])
    k1, k2 = principal_curvatures(a)
    return float(max(np.max(k1), np.max(-k2))), m0


def energy_scan_row(radius, phi_star, delta, m=2, phi0=None, threads=1):
    """One row of the energy-versus-radius table."""
    import time
    from .netgen import run_greedy
    t = time.perf_counter()
    cx = run_greedy(radius, phi_star=phi_star, delta=delta, m=m, phi0=phi0, threads=threads)
    e_inf, _ = energy_max(cx)
    ew = energy_willmore(cx)
    n_vert = cx.index().n_vertices
    wall = (time.perf_counter() - t) * 1000.0
    periodic, m0 = periodic_amsler_energy(radius, delta)
    return {
        "R": radius, "e_inf_branched": e_inf, "e_willmore": ew,
        "e_inf_bobbin_bound": bobbin_energy_bound(radius), "e_inf_periodic_amsler": periodic,
        "m0": m0, "cut_depth": cx.cut_depth, "n_branches": len(cx.branches),
        "n_vertices": n_vert, "wall_ms": wall,
    }


def fit_residual(x, y):
    """Residual norm of the least-squares line y ~ a + b x."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    a = np.stack([np.ones_like(x), x], axis=1)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    return float(np.linalg.norm(a @ coef - y))
