"""Combinatorial side of a branched asymptotic net.

A net is a collection of sectors.  Each sector is a (j, k) grid of Poincare
disk points whose rows run along one asymptotic family and whose columns run
along the other.  Sectors are glued along boundary lines ("attachings") and
the gluing is what turns a set of grids into a single quad mesh with branch
vertices of degree six.
"""
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np


@dataclass
class Sector:
    """One grid patch of the net.

    ``z``, ``active``, ``excised`` and ``phi`` share the shape (nj + 1, nk + 1).
    ``phi`` holds the raw signed vertex angle arg(w2 conj(w1)) and is NaN where
    it is undefined.  ``j_family`` says which asymptotic family ('u' or 'v')
    the rows (index j) belong to; the columns carry the other one.
    """

    sid: int
    z: np.ndarray
    active: np.ndarray
    phi: np.ndarray
    excised: np.ndarray
    generation: int
    j_family: str
    role: str = "initial"
    origin_branch: int | None = None
    fresh_j: bool = True
    fresh_k: bool = True
    degenerate: int = 0
    opening: float = float("nan")
    orientation: int = 1

    def __post_init__(self):
        # fixed at creation: a later cut at the origin erases phi[0, 0]
        if math.isnan(self.opening):
            self.opening = float(abs(self.phi[0, 0]))
            self.orientation = 1 if self.phi[0, 0] > 0 else -1

    @property
    def k_family(self):
        return "v" if self.j_family == "u" else "u"

    def quads(self):
        """Boolean mask of quads, indexed by their (j, k) corner."""
        a = self.active
        return a[:-1, :-1] & a[1:, :-1] & a[:-1, 1:] & a[1:, 1:]

    def n_active(self):
        return int(self.active.sum())


@dataclass
class Attaching:
    """Glue ``child``'s boundary axis onto a grid line of ``parent``.

    Vertex p on the child's axis ('j' means (p, 0), 'k' means (0, p)) is the
    same vertex as parent (start[0] + p * step[0], start[1] + p * step[1]).
    """

    child: int
    axis: str
    parent: int
    start: tuple
    step: tuple

    def pairs(self, sectors):
        """Matching (child_jk, parent_jk) index arrays over vertices active in the child."""
        c = sectors[self.child]
        p = sectors[self.parent]
        line = c.active[:, 0] if self.axis == "j" else c.active[0, :]
        pos = np.flatnonzero(line)
        pj = self.start[0] + pos * self.step[0]
        pk = self.start[1] + pos * self.step[1]
        ok = (pj < p.active.shape[0]) & (pk < p.active.shape[1])
        pos, pj, pk = pos[ok], pj[ok], pk[ok]
        ok = p.active[pj, pk]
        pos, pj, pk = pos[ok], pj[ok], pk[ok]
        zero = np.zeros_like(pos)
        cj, ck = (pos, zero) if self.axis == "j" else (zero, pos)
        return (cj, ck), (pj, pk)


@dataclass
class BranchRecord:
    """A surgery: the cut vertex of a parent sector and the three sectors it spawned."""

    bid: int
    generation: int
    parent_sector: int
    parent_branch: int | None
    jk: tuple
    location: complex
    phi_parent: float
    phi_n: float
    s_n: float
    alpha_sq: float
    node_kind: str
    daughters: tuple = ()

    @property
    def phi_daughter(self):
        return self.phi_parent / 3.0

    @property
    def ratio(self):
        return self.phi_daughter / self.phi_n


@dataclass
class AsymptoticComplex:
    """Sectors, their gluing and the branch tree produced by the net generator."""

    radius: float
    delta: float
    phi_star: float
    m: int
    sectors: list = field(default_factory=list)
    attachings: list = field(default_factory=list)
    branches: list = field(default_factory=list)
    status: str = "OK"
    _index: object = field(default=None, repr=False)

    @property
    def cut_depth(self):
        return max((b.generation for b in self.branches), default=0)

    def invalidate(self):
        self._index = None

    def index(self):
        if self._index is None:
            self._index = VertexIndex(self)
        return self._index


class VertexIndex:
    """Global vertex numbering with seams identified, plus edge and face lists."""

    def __init__(self, cx):
        self.cx = cx
        sectors = cx.sectors
        self.local = []
        offset = 0
        for s in sectors:
            loc = np.full(s.active.shape, -1, dtype=np.int64)
            n = int(s.active.sum())
            loc[s.active] = np.arange(offset, offset + n)
            self.local.append(loc)
            offset += n
        parent = np.arange(offset)

        def find(a):
            root = a
            while parent[root] != root:
                root = parent[root]
            while parent[a] != root:
                parent[a], a = root, parent[a]
            return root

        self.seam_pairs = []
        for att in cx.attachings:
            (cj, ck), (pj, pk) = att.pairs(sectors)
            ca = self.local[att.child][cj, ck]
            pa = self.local[att.parent][pj, pk]
            self.seam_pairs.append((att, (cj, ck), (pj, pk)))
            for a, b in zip(ca.tolist(), pa.tolist()):
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        roots = parent.copy()
        for a in np.flatnonzero(parent != np.arange(offset)).tolist():
            roots[a] = find(a)
        uniq, gid = np.unique(roots, return_inverse=True)
        self.n_vertices = len(uniq)
        self.gid = []
        for loc in self.local:
            g = np.full(loc.shape, -1, dtype=np.int64)
            m = loc >= 0
            g[m] = gid[loc[m]]
            self.gid.append(g)
        # one representative (sector, j, k) per global vertex, first owner wins
        self.owner = np.full((self.n_vertices, 3), -1, dtype=np.int64)
        for sid in range(len(sectors) - 1, -1, -1):
            g = self.gid[sid]
            jj, kk = np.nonzero(g >= 0)
            self.owner[g[jj, kk]] = np.stack([np.full_like(jj, sid), jj, kk], axis=1)
        self._build_edges_faces()

    def _build_edges_faces(self):
        edges = []
        faces = []
        for s, g in zip(self.cx.sectors, self.gid):
            a = g >= 0
            ej = a[:-1, :] & a[1:, :]
            jj, kk = np.nonzero(ej)
            edges.append(np.stack([g[jj, kk], g[jj + 1, kk], np.full_like(jj, s.sid), np.zeros_like(jj)], axis=1))
            ek = a[:, :-1] & a[:, 1:]
            jj, kk = np.nonzero(ek)
            edges.append(np.stack([g[jj, kk], g[jj, kk + 1], np.full_like(jj, s.sid), np.ones_like(jj)], axis=1))
            q = s.quads()
            jj, kk = np.nonzero(q)
            f = np.stack([g[jj, kk], g[jj + 1, kk], g[jj + 1, kk + 1], g[jj, kk + 1]], axis=1)
            if s.orientation < 0:
                f = f[:, ::-1]
            faces.append((s.sid, jj, kk, f))
        e = np.concatenate(edges) if edges else np.zeros((0, 4), dtype=np.int64)
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        key = lo * self.n_vertices + hi
        _, first = np.unique(key, return_index=True)
        first.sort()
        # edges as (a, b, sector, axis); axis 0 runs along j, 1 along k
        self.edges = e[first]
        self.faces = faces
        self.face_array = np.concatenate([f[3] for f in faces]) if faces else np.zeros((0, 4), dtype=np.int64)

    def degrees(self):
        return np.bincount(self.edges[:, :2].ravel(), minlength=self.n_vertices)

    def boundary_vertices(self):
        """Vertices on an edge that belongs to exactly one face."""
        f = self.face_array
        e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 3]], f[:, [3, 0]]])
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        key, counts = np.unique(lo * self.n_vertices + hi, return_counts=True)
        single = key[counts == 1]
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[single // self.n_vertices] = True
        mask[single % self.n_vertices] = True
        used = np.zeros(self.n_vertices, dtype=bool)
        used[f.ravel()] = True
        return mask | ~used

    def vertex_of(self, sid, j, k):
        return int(self.gid[sid][j, k])

    def point(self, v):
        sid, j, k = self.owner[v]
        return self.cx.sectors[sid].z[j, k]

    def points(self):
        o = self.owner
        out = np.empty(self.n_vertices, dtype=complex)
        for sid, s in enumerate(self.cx.sectors):
            m = o[:, 0] == sid
            out[m] = s.z[o[m, 1], o[m, 2]]
        return out


def branch_index(cx, v):
    """Index J = 1 - m of a vertex with 2m incident edges (-1 regular, -2 branch)."""
    deg = cx.index().degrees()[v]
    return 1 - deg // 2


def branch_vertices(cx):
    idx = cx.index()
    return [idx.vertex_of(b.parent_sector, *b.jk) for b in cx.branches]


def origin_vertex(cx):
    return cx.index().vertex_of(0, 0, 0)


def expected_degrees(cx):
    """Degree each special vertex should have: 2m at the origin, 4 elsewhere, plus 2 per cut placed there."""
    out = Counter({origin_vertex(cx): 2 * cx.m})
    for v in branch_vertices(cx):
        out[v] = out.get(v, 4) + 2
    return dict(out)


def face_two_coloring(idx):
    """Colour the quads so that faces sharing an edge differ; None if impossible."""
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import breadth_first_order, connected_components

    f = idx.face_array
    nf = len(f)
    if nf == 0:
        return np.zeros(0, dtype=np.int8)
    e = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 3]], f[:, [3, 0]]])
    key = np.minimum(e[:, 0], e[:, 1]) * idx.n_vertices + np.maximum(e[:, 0], e[:, 1])
    face = np.tile(np.arange(nf), 4)
    order = np.argsort(key, kind="stable")
    key, face = key[order], face[order]
    same = key[1:] == key[:-1]
    a, b = face[:-1][same], face[1:][same]
    g = coo_matrix((np.ones(len(a)), (a, b)), shape=(nf, nf)).tocsr()
    g = g + g.T
    color = np.full(nf, -1, dtype=np.int8)
    _, labels = connected_components(g, directed=False)
    for root in np.unique(labels, return_index=True)[1]:
        nodes, pred = breadth_first_order(g, root, directed=False, return_predecessors=True)
        color[root] = 0
        for n in nodes[1:]:
            color[n] = 1 - color[pred[n]]
    if np.any(color[a] == color[b]):
        return None
    return color


def rhombus_side_error(cx):
    """Largest | side - delta | over every quad of every sector."""
    from .hyperbolic import hyp_distance
    worst = 0.0
    for s in cx.sectors:
        q = s.quads()
        if not q.any():
            continue
        jj, kk = np.nonzero(q)
        z = s.z
        c = [z[jj, kk], z[jj + 1, kk], z[jj + 1, kk + 1], z[jj, kk + 1]]
        for a, b in zip(c, c[1:] + c[:1]):
            worst = max(worst, float(np.max(np.abs(hyp_distance(a, b) - cx.delta))))
    return worst


def validate_complex(cx, rhombus_tol=1e-9):
    """Structural checks; returns a dict of named booleans plus diagnostics.

    Checks: only direct attachings, seams are bit-identical, quads admit a
    checkerboard colouring, interior degrees are even, interior vertices have
    degree four except the origin (2m) and branch vertices (six, or more when
    a later cut lands on an existing branch vertex), every quad is a rhombus
    of side delta, the branch tree is well formed and the sector count equals
    2m + 3 * branches.  Never raises; failures show up as False entries.
    """
    out = {}
    direct = all(tuple(a.step) in ((1, 0), (0, 1)) for a in cx.attachings)
    out["attachings_direct"] = direct
    if not direct:
        out["unsupported"] = [i for i, a in enumerate(cx.attachings) if tuple(a.step) not in ((1, 0), (0, 1))]
        out["ok"] = False
        return out
    idx = cx.index()
    seams_ok = True
    for att, (cj, ck), (pj, pk) in idx.seam_pairs:
        a = cx.sectors[att.child].z[cj, ck]
        b = cx.sectors[att.parent].z[pj, pk]
        if not np.array_equal(a, b):
            seams_ok = False
    out["seams_identical"] = seams_ok
    deg = idx.degrees()
    bnd = idx.boundary_vertices()
    special = expected_degrees(cx)
    bad = []
    for v in np.flatnonzero(~bnd):
        want = special.get(int(v), 4)
        if deg[v] != want:
            bad.append(int(v))
    out["interior_degrees"] = not bad
    out["bad_degree_vertices"] = bad
    out["even_degrees"] = bool(np.all(deg[~bnd] % 2 == 0))
    out["checkerboard"] = face_two_coloring(idx) is not None
    out["rhombus_side_err"] = rhombus_side_error(cx)
    out["rhombi"] = out["rhombus_side_err"] < rhombus_tol
    tree_ok = True
    ids = {b.bid for b in cx.branches}
    for b in cx.branches:
        if b.generation < 1:
            tree_ok = False
        if b.parent_branch is None:
            tree_ok &= b.generation == 1
        else:
            tree_ok &= b.parent_branch in ids
            tree_ok &= cx.branches[b.parent_branch].generation == b.generation - 1
    out["branch_tree"] = tree_ok
    out["sector_count"] = len(cx.sectors) == 2 * cx.m + 3 * len(cx.branches)
    out["ok"] = bool(seams_ok and not bad and tree_ok and out["sector_count"] and out["even_degrees"]
                     and out["checkerboard"] and out["rhombi"])
    return out
