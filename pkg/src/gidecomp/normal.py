"""
Normal surface vectors and the surfaces they encode.

Coordinates are 7 per tetrahedron: four triangle types indexed by the
corner they cut off, then three quadrilateral types indexed by the vertex
partition they realize ({01|23}, {02|13}, {03|12}).  All arithmetic is
exact over Python integers.
"""

import math
from dataclasses import dataclass
from itertools import product

from .triangulation import _DSU, require_valid, vertex_classes

# Quad type q separates QUAD_PAIRS[q][0] from QUAD_PAIRS[q][1].
QUAD_PAIRS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))

# PAIR_TO_QUAD[frozenset({v,w})] = the quad type having {v,w} as a pair.
PAIR_TO_QUAD = {}
for _q, (_A, _B) in enumerate(QUAD_PAIRS):
    PAIR_TO_QUAD[frozenset(_A)] = _q
    PAIR_TO_QUAD[frozenset(_B)] = _q


def quad_type_of_pair(v, w):
    return PAIR_TO_QUAD[frozenset((v, w))]


class NormalSurfaceVector:
    """7t non-negative integer coordinates, tetrahedron-major."""

    __slots__ = ("coords",)

    def __init__(self, coords):
        coords = tuple(int(c) for c in coords)
        if len(coords) % 7 != 0:
            raise ValueError("coordinate length %d is not a multiple of 7"
                             % len(coords))
        if any(c < 0 for c in coords):
            raise ValueError("negative normal coordinate")
        self.coords = coords

    @property
    def tet_count(self):
        return len(self.coords) // 7

    def tri(self, i, v):
        return self.coords[7 * i + v]

    def quad(self, i, q):
        return self.coords[7 * i + 4 + q]

    def quad_data(self, i):
        """The active quad type and its count in tet i, or (None, 0)."""
        for q in range(3):
            c = self.quad(i, q)
            if c:
                return q, c
        return None, 0

    def __eq__(self, other):
        return isinstance(other, NormalSurfaceVector) and self.coords == other.coords

    def __hash__(self):
        return hash(self.coords)

    def __repr__(self):
        return "NormalSurfaceVector(%r)" % (self.coords,)

    def serialize(self):
        return " ".join(str(c) for c in self.coords) + "\n"


def parse_surface(text, tet_count=None):
    tokens = text.split()
    try:
        coords = [int(tok) for tok in tokens]
    except ValueError:
        raise ValueError("surface file must contain integers only")
    v = NormalSurfaceVector(coords)
    if tet_count is not None and v.tet_count != tet_count:
        raise ValueError("surface has %d tetrahedra worth of coordinates, "
                         "triangulation has %d" % (v.tet_count, tet_count))
    return v


def vertex_link(tri):
    """The normal sphere bounding a regular neighborhood of the vertex."""
    if len(vertex_classes(tri)) != 1:
        raise ValueError("tri not one-vertex")
    return NormalSurfaceVector((1, 1, 1, 1, 0, 0, 0) * tri.tet_count)


def zero_vector(tri):
    return NormalSurfaceVector((0,) * (7 * tri.tet_count))


def matching_matrix(tri):
    """One row per (face, arc type): arc counts agree on both sides.

    The arc of type v in face k (v != k) is crossed by the corner-v
    triangles and by the quad type pairing {v,k}.
    """
    t = tri.tet_count
    rows = []
    for i, k, j, p in tri.glued_slots():
        if (i, k) > (j, p[k]):
            continue
        for v in range(4):
            if v == k:
                continue
            row = [0] * (7 * t)
            row[7 * i + v] += 1
            row[7 * i + 4 + quad_type_of_pair(v, k)] += 1
            row[7 * j + p[v]] -= 1
            row[7 * j + 4 + quad_type_of_pair(p[v], p[k])] -= 1
            rows.append(row)
    return rows


def satisfies_matching(tri, vec):
    for row in matching_matrix(tri):
        if sum(c * x for c, x in zip(row, vec.coords)) != 0:
            return False
    return True


def satisfies_quad_constraint(vec):
    for i in range(vec.tet_count):
        if sum(1 for q in range(3) if vec.quad(i, q)) > 1:
            return False
    return True


def is_admissible(tri, vec):
    """Quad constraint plus matching equations."""
    if vec.tet_count != tri.tet_count:
        raise ValueError("vector length %d does not match %d tetrahedra"
                         % (len(vec.coords), tri.tet_count))
    return satisfies_quad_constraint(vec) and satisfies_matching(tri, vec)


# ---------------------------------------------------------------------------
# Geometry of the disc family encoded by a vector.


class TetDiscs:
    """Disc counts and positional bookkeeping within one tetrahedron."""

    def __init__(self, vec, i):
        self.tet = i
        self.n = [vec.tri(i, v) for v in range(4)]
        self.q, self.nq = vec.quad_data(i)
        if self.q is not None:
            self.A, self.B = QUAD_PAIRS[self.q]
        else:
            self.A = self.B = ()

    def quad_crosses(self, v, w):
        return self.q is not None and quad_type_of_pair(v, w) != self.q

    def edge_points(self, v, w):
        return self.n[v] + self.n[w] + (self.nq if self.quad_crosses(v, w) else 0)

    def point_disc(self, v, w, m):
        """The disc crossing edge {v,w} at position m from v."""
        if m < self.n[v]:
            return ("t", v, m)
        total = self.edge_points(v, w)
        if m >= total - self.n[w]:
            return ("t", w, total - 1 - m)
        s_rel = m - self.n[v]
        s = s_rel if v in self.A else self.nq - 1 - s_rel
        return ("q", self.q, s)

    def arc_count(self, k, v):
        extra = self.nq if (self.q is not None
                            and quad_type_of_pair(v, k) == self.q) else 0
        return self.n[v] + extra

    def arc_disc(self, k, v, m):
        """The disc whose arc of type v in face k sits at position m."""
        if m < self.n[v]:
            return ("t", v, m)
        s_rel = m - self.n[v]
        s = s_rel if v in self.A else self.nq - 1 - s_rel
        return ("q", self.q, s)

    def quad_arc_pos(self, k, v, s):
        """Face-arc position of quad disc s, as a type-v arc in face k."""
        s_rel = s if v in self.A else self.nq - 1 - s
        return self.n[v] + s_rel


def _tri_boundary(i, v, layer):
    """Directed boundary arcs of a triangle disc: (slot, type, pos, e_from, e_to)."""
    ws = sorted(w for w in range(4) if w != v)
    out = []
    for a in range(3):
        wa, wb = ws[a], ws[(a + 1) % 3]
        k = 6 - v - wa - wb
        out.append((k, v, layer, frozenset((v, wa)), frozenset((v, wb))))
    return out


def _quad_boundary(td):
    """Directed boundary arcs of the quad discs of one tetrahedron, by layer."""
    (a0, a1), (b0, b1) = td.A, td.B
    corners = [(a0, b0), (a0, b1), (a1, b1), (a1, b0)]
    slots_types = [(a1, a0), (b0, b1), (a0, a1), (b1, b0)]
    out = []
    for s in range(td.nq):
        cyc = []
        for c in range(4):
            k, v = slots_types[c]
            e_from = frozenset(corners[c])
            e_to = frozenset(corners[(c + 1) % 4])
            cyc.append((k, v, td.quad_arc_pos(k, v, s), e_from, e_to))
        out.append(cyc)
    return out


@dataclass
class SurfaceComponent:
    euler_char: int
    orientable: bool
    two_sided: bool
    is_vertex_linking: bool
    disc_count: int


@dataclass
class SurfaceComplex:
    components: list
    disc_counts: tuple
    total_euler: int

    def is_two_sided(self):
        return all(c.two_sided for c in self.components)


class _SignedDSU:
    """Union-find tracking a relative sign along each merge."""

    def __init__(self):
        self.parent = {}
        self.sign = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        self.sign.setdefault(x, 1)
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        s = 1
        for y in reversed(path):
            s *= self.sign[y]
            self.parent[y] = x
            self.sign[y] = s
        return x, self.sign[path[0]] if path else 1

    def union(self, x, y, rel):
        """Record sign(x) * sign(y) == rel.  Returns False on conflict."""
        rx, sx = self.find(x)
        ry, sy = self.find(y)
        if rx == ry:
            return sx * sy == rel
        self.parent[rx] = ry
        self.sign[rx] = rel * sx * sy
        return True


def build_surface(tri, vec):
    """Instantiate the discs of an admissible vector and measure components.

    Two-sidedness coincides with orientability of the component because the
    ambient triangulation is orientable.
    """
    if not is_admissible(tri, vec):
        raise ValueError("vector is not admissible")
    require_valid(tri)
    t = tri.tet_count
    tds = [TetDiscs(vec, i) for i in range(t)]

    # Discs and their directed boundary arcs.
    boundaries = {}
    for i in range(t):
        td = tds[i]
        for v in range(4):
            for layer in range(td.n[v]):
                boundaries[(i, "t", v, layer)] = _tri_boundary(i, v, layer)
        if td.nq:
            for s, cyc in enumerate(_quad_boundary(td)):
                boundaries[(i, "q", td.q, s)] = cyc

    def arc_owner(i, k, v, m):
        kind, x, y = tds[i].arc_disc(k, v, m)
        return (i, kind, x, y)

    # Pair arc instances across the face gluings.
    arc_partner = {}
    for i, k, j, p in tri.glued_slots():
        td = tds[i]
        for v in range(4):
            if v == k:
                continue
            for m in range(td.arc_count(k, v)):
                arc_partner[(i, k, v, m)] = (j, p[k], p[v], m)

    # Connectivity and orientation over the discs.
    comp = _DSU()
    orient = _SignedDSU()
    bad_orient_roots = set()
    arc_dir = {}
    for disc, cyc in boundaries.items():
        comp.find(disc)
        orient.find(disc)
        for (k, v, m, e_from, e_to) in cyc:
            arc_dir[(disc[0], k, v, m)] = (disc, e_from, e_to)
    for inst, partner in arc_partner.items():
        if inst > partner:
            continue
        i, k, v, m = inst
        j, p = tri.gluings[i][k]
        d1, e_from, e_to = arc_dir[inst]
        d2, f_from, f_to = arc_dir[partner]
        comp.union(d1, d2)
        img_from = frozenset(p[x] for x in e_from)
        if img_from == f_from:
            rel = -1  # both traverse the edge the same way
        else:
            assert img_from == f_to
            rel = 1
        if not orient.union(d1, d2, rel):
            bad_orient_roots.add(comp.find(d1))

    # Points on tetrahedron edges, identified through the gluings.
    pts = _DSU()
    point_of = {}
    for i in range(t):
        td = tds[i]
        for v in range(4):
            for w in range(v + 1, 4):
                for m in range(td.edge_points(v, w)):
                    key = (i, v, w, m)
                    pts.find(key)
                    kind, x, y = td.point_disc(v, w, m)
                    point_of[key] = (i, kind, x, y)
    for i, k, j, p in tri.glued_slots():
        td = tds[i]
        for v in range(4):
            for w in range(v + 1, 4):
                if v == k or w == k:
                    continue
                total = td.edge_points(v, w)
                for m in range(total):
                    pv, pw = p[v], p[w]
                    if pv < pw:
                        img = (j, pv, pw, m)
                    else:
                        img = (j, pw, pv, total - 1 - m)
                    pts.union((i, v, w, m), img)

    # Tally per component.
    stats = {}
    for disc in boundaries:
        root = comp.find(disc)
        st = stats.setdefault(root, {"F": 0, "E": 0, "V": 0, "quads": 0})
        st["F"] += 1
        if disc[1] == "q":
            st["quads"] += 1
    for inst, partner in arc_partner.items():
        if inst > partner:
            continue
        stats[comp.find(arc_dir[inst][0])]["E"] += 1
    for pkey, cls in pts.classes().items():
        owner = point_of[cls[0]]
        stats[comp.find(owner)]["V"] += 1

    components = []
    for root, st in stats.items():
        orientable = root not in bad_orient_roots
        components.append(SurfaceComponent(
            euler_char=st["V"] - st["E"] + st["F"],
            orientable=orientable,
            two_sided=orientable,
            is_vertex_linking=(st["quads"] == 0),
            disc_count=st["F"],
        ))
    components.sort(key=lambda c: (c.euler_char, not c.is_vertex_linking,
                                   c.disc_count, not c.orientable))
    total = sum(c.euler_char for c in components)
    return SurfaceComplex(components=components, disc_counts=vec.coords,
                          total_euler=total)


def strip_vertex_linking(vec):
    """Remove the maximal multiple of the vertex link, coordinatewise."""
    t = vec.tet_count
    if t == 0:
        return vec
    k = min(vec.tri(i, v) for i in range(t) for v in range(4))
    if k == 0:
        return vec
    coords = list(vec.coords)
    for i in range(t):
        for v in range(4):
            coords[7 * i + v] -= k
    return NormalSurfaceVector(coords)


# ---------------------------------------------------------------------------
# Bounded enumeration.

ENUM_BITS_LIMIT = 24.0


def _tet_patterns(bound):
    """All 7-coordinate patterns for one tetrahedron obeying the quad
    constraint, with coordinates <= bound."""
    pats = []
    for tris in product(range(bound + 1), repeat=4):
        pats.append(tris + (0, 0, 0))
        for q in range(3):
            for c in range(1, bound + 1):
                quads = [0, 0, 0]
                quads[q] = c
                pats.append(tris + tuple(quads))
    return pats


def _arc_table(pat):
    """arc counts (k, v) -> count for a single-tet pattern, 4x4 table."""
    tab = [[0] * 4 for _ in range(4)]
    for k in range(4):
        for v in range(4):
            if v != k:
                tab[k][v] = pat[v] + pat[4 + quad_type_of_pair(v, k)]
    return tab


def enumerate_admissible(tri, bound, bits_limit=ENUM_BITS_LIMIT):
    """All admissible vectors with coordinates <= bound, vertex-linking
    part stripped, deduplicated, in lexicographic order.

    The search is an exhaustive box walk, pruned tetrahedron by
    tetrahedron through the matching equations.
    """
    require_valid(tri)
    t = tri.tet_count
    bits = 7 * t * math.log2(bound + 1)
    if bits > bits_limit:
        raise ValueError(
            "enumeration guard exceeded: 7t*log2(bound+1) = %.1f > %.1f"
            % (bits, bits_limit))
    if bound == 0:
        return [zero_vector(tri)]

    pats = _tet_patterns(bound)
    tabs = [_arc_table(p) for p in pats]

    # Constraints on tet d from faces into tets <= d.
    back = [[] for _ in range(t)]
    for i, k, j, p in tri.glued_slots():
        if (i, k) > (j, p[k]):
            continue
        hi, lo = max(i, j), min(i, j)
        back[hi].append((i, k, j, p))

    chosen = [None] * t
    found = []

    def ok(d, idx):
        tab = tabs[idx]
        for (i, k, j, p) in back[d]:
            ti = idx if i == d else chosen[i]
            tj = idx if j == d else chosen[j]
            ta, tb = tabs[ti], tabs[tj]
            k2 = p[k]
            for v in range(4):
                if v != k and ta[k][v] != tb[k2][p[v]]:
                    return False
        return True

    def rec(d):
        if d == t:
            coords = []
            for i in range(t):
                coords.extend(pats[chosen[i]])
            found.append(NormalSurfaceVector(coords))
            return
        for idx in range(len(pats)):
            if ok(d, idx):
                chosen[d] = idx
                rec(d + 1)
        chosen[d] = None

    rec(0)
    out = {strip_vertex_linking(v) for v in found}
    return sorted(out, key=lambda v: v.coords)
