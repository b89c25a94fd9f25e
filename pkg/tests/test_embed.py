import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from branchsurf import embed, netgen
from branchsurf.quadgraph import branch_vertices, origin_vertex


def unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


@pytest.fixture(scope="module")
def saddle():
    cx = netgen.build_periodic_amsler(1.0, 2, 0.1)
    return embed.integrate_lelieuvre(embed.build_spherical_net(cx))


@pytest.fixture(scope="module")
def monkey():
    cx = netgen.build_periodic_amsler(1.0, 3, 0.1)
    return embed.integrate_lelieuvre(embed.build_spherical_net(cx))


# --- spherical quads ---------------------------------------------------------

def test_complete_normal_square():
    d = 0.1
    n0 = np.array([0.0, 0.0, 1.0])
    n1 = np.array([math.sin(d), 0.0, math.cos(d)])
    n2 = np.array([0.0, math.sin(d), math.cos(d)])
    n12 = embed.complete_normal(n0, n1, n2)
    # reflection of e3 across the bisector of n1 and n2
    s = unit(n1 + n2)
    assert n12 == pytest.approx(2 * s[2] * s - n0, abs=1e-15)
    assert np.dot(n12, n1) == pytest.approx(math.cos(d), abs=1e-15)
    assert np.dot(n12, n2) == pytest.approx(math.cos(d), abs=1e-15)


def test_complete_normal_antipodal():
    with pytest.raises(embed.DegenerateNormal):
        embed.complete_normal([0, 0, 1], [1, 0, 0], [-1, 0, 0])


sphere = st.builds(lambda a, b: np.array([math.sin(a) * math.cos(b), math.sin(a) * math.sin(b), math.cos(a)]),
                   st.floats(0.1, 3.0), st.floats(-math.pi, math.pi))


@given(sphere, sphere, sphere)
def test_complete_normal_involution_and_norm(n0, n1, n2):
    if np.linalg.norm(n1 + n2) < 1e-3:
        return
    n12 = embed.complete_normal(n0, n1, n2)
    assert abs(np.linalg.norm(n12) - 1) < 1e-12
    back = embed.complete_normal(n12, n1, n2)
    assert np.max(np.abs(back - n0)) < 1e-10
    # Chebyshev: opposite sides span equal spherical angles
    assert abs(np.dot(n12, n1) - np.dot(n2, n0)) < 1e-12
    assert abs(np.dot(n12, n2) - np.dot(n1, n0)) < 1e-12


# --- straight rays -----------------------------------------------------------

def test_ray_normal_first_step():
    d = 0.1
    u = embed.ray_normals(embed.E3, np.array([1.0, 0, 0]), "u", d, 3)
    v = embed.ray_normals(embed.E3, np.array([1.0, 0, 0]), "v", d, 3)
    # the normal tilts sideways, never along the direction of travel
    assert u[1] == pytest.approx([0.0, math.sin(d), math.cos(d)], abs=1e-16)
    assert v[1] == pytest.approx([0.0, -math.sin(d), math.cos(d)], abs=1e-16)


@given(st.floats(-math.pi, math.pi), st.sampled_from(["u", "v"]), st.floats(0.01, 0.3))
def test_ray_is_straight_and_forward(b, fam, d):
    e = np.array([math.cos(b), math.sin(b), 0.0])
    nrm = embed.ray_normals(embed.E3, e, fam, d, 12)
    steps = embed.lelieuvre_steps(nrm, fam)
    assert np.allclose(np.linalg.norm(steps, axis=1), math.sin(d), atol=1e-14)
    # every step points along e
    assert np.allclose(steps / math.sin(d), e, atol=1e-12)
    assert np.allclose(np.sum(nrm[1:] * nrm[:-1], axis=1), math.cos(d), atol=1e-14)


def test_constant_normal_gives_point():
    nrm = np.tile(embed.E3, (5, 1))
    line = embed.integrate_line(np.array([1.0, 2.0, 3.0]), nrm, "u")
    assert np.all(line == [1.0, 2.0, 3.0])


# --- whole nets --------------------------------------------------------------

def test_saddle_embedding_valid(saddle):
    rep = embed.validate_embedding(saddle)
    assert rep["ok"], rep
    assert rep["edge_length_err"] < 1e-12
    assert rep["closure_max"] < 1e-12


def test_greedy_embedding_valid(cx3):
    surf = embed.integrate_lelieuvre(embed.build_spherical_net(cx3))
    rep = embed.validate_embedding(surf)
    assert rep["ok"], rep
    assert rep["angle_err"] < 5 * cx3.delta


def test_origin_gauss_sum(monkey, saddle):
    for surf, m in ((saddle, 2), (monkey, 3)):
        v = origin_vertex(surf.net.cx)
        assert embed.gauss_angle_sum(surf, v) == pytest.approx(2 * math.pi * (1 - m), abs=1e-9)


def test_regular_vertex_gauss_sum(saddle):
    idx = saddle.net.cx.index()
    v = idx.vertex_of(0, 3, 4)
    assert embed.gauss_angle_sum(saddle, v) == pytest.approx(-2 * math.pi, abs=1e-9)


def test_branch_vertex_gauss_sum(cx3):
    surf = embed.integrate_lelieuvre(embed.build_spherical_net(cx3))
    for v in branch_vertices(cx3):
        assert embed.gauss_angle_sum(surf, v) == pytest.approx(-4 * math.pi, abs=1e-9)


def test_monkey_saddle_alternates(monkey):
    net = monkey.net
    heights = [sn.positions[4, 4, 2] for sn in net.sectors]
    signs = np.sign(heights)
    assert np.all(signs[1:] == -signs[:-1])
    # threefold symmetry: sector i + 2 is sector i rotated by 120 degrees
    c, s = math.cos(2 * math.pi / 3), math.sin(2 * math.pi / 3)
    rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    for i in range(4):
        a = net.sectors[i].positions[4, 4]
        b = net.sectors[i + 2].positions[4, 4]
        assert np.allclose(rot @ a, b, atol=1e-12)


def _random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    return q if np.linalg.det(q) > 0 else -q


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_rigid_motion_equivariance(seed):
    rng = np.random.default_rng(seed)
    rot = _random_rotation(rng)
    t = rng.normal(size=3)
    cx = netgen.run_greedy(2.5, delta=0.1)
    base = embed.integrate_lelieuvre(embed.build_spherical_net(cx))
    moved = embed.integrate_lelieuvre(embed.build_spherical_net(cx, r_origin=t, frame=rot))
    assert np.allclose(moved.vertices, base.vertices @ rot.T + t, atol=1e-10)
    assert np.allclose(moved.normals, base.normals @ rot.T, atol=1e-12)


def test_single_quad_closes():
    d = 0.2
    n0 = embed.E3
    n1 = np.array([0.0, math.sin(d), math.cos(d)])
    n2 = np.array([0.0, -math.sin(d) * math.cos(0.7), math.cos(d)])
    n2[0] = math.sqrt(1 - n2[1] ** 2 - n2[2] ** 2)
    n12 = embed.complete_normal(n0, n1, n2)
    # around the quad: u then v, against v then u
    a = np.cross(n1, n0) - np.cross(n12, n1)
    b = -np.cross(n2, n0) + np.cross(n12, n2)
    assert np.allclose(a, b, atol=1e-15)


def test_angle_agreement_converges():
    errs = []
    for d in (0.04, 0.02):
        cx = netgen.build_periodic_amsler(1.5, 2, d)
        surf = embed.integrate_lelieuvre(embed.build_spherical_net(cx))
        errs.append(embed.validate_embedding(surf)["angle_err"])
    # measured second order (ratio near 4); the requirement is at least first order
    assert errs[0] / errs[1] >= 1.5
    assert errs[0] < 5 * 0.04


def test_corrupt_normal_is_localised(saddle):
    bad = embed.KSurface(saddle.vertices, saddle.normals.copy(), saddle.faces, saddle.net)
    idx = saddle.net.cx.index()
    v = idx.vertex_of(1, 3, 3)
    bad.normals[v] = unit(bad.normals[v] + [0.05, 0.0, 0.0])
    rep = embed.validate_embedding(bad)
    assert not rep["ok"]
    assert rep["planarity_err"] > 1e-4
    assert v in idx.edges[rep["worst_planarity_edge"]]


def test_export_obj(tmp_path, saddle):
    p = tmp_path / "s.obj"
    embed.export_obj(saddle, p)
    lines = p.read_text().splitlines()
    nv = sum(1 for x in lines if x.startswith("v "))
    nf = sum(1 for x in lines if x.startswith("f "))
    assert nv == len(saddle.vertices) and nf == len(saddle.faces)
    idx = [int(t) for x in lines if x.startswith("f ") for t in x.split()[1:]]
    assert min(idx) == 1 and max(idx) <= nv
    # values round-trip exactly
    first = [float(t) for t in lines[1].split()[1:]]
    assert first == saddle.vertices[1].tolist()
