"""
One-vertex triangulations of closed orientable 3-manifolds, given by
gluing tables.

A triangulation with t tetrahedra is described by, for each face slot
(tet i, face k), a target tetrahedron j together with a permutation p of
the vertex labels 0..3; face k of tet i (the face opposite vertex k) is
glued to face p[k] of tet j by the vertex map v -> p[v].  Faces may be
left unglued, in which case the complex is not closed.
"""

from dataclasses import dataclass
from itertools import permutations, product

IDENTITY = (0, 1, 2, 3)
ALL_PERMS = tuple(permutations(range(4)))

# Tetrahedra are capped at a size where the exhaustive orientation search
# (2^t sign assignments) stays comfortable.
MAX_TETS = 20


def perm_inverse(p):
    inv = [0] * 4
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def perm_compose(p, q):
    """The permutation "p after q", i.e. x -> p[q[x]]."""
    return tuple(p[q[x]] for x in range(4))


def perm_sign(p):
    sign = 1
    for i in range(4):
        for j in range(i + 1, 4):
            if p[i] > p[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class Triangulation:
    """An immutable gluing table.

    gluings[i][k] is either None (face unglued) or a pair (j, p) with p a
    vertex permutation; the involution property is checked at parse time.
    """

    gluings: tuple

    @property
    def tet_count(self):
        return len(self.gluings)

    def glued_slots(self):
        """All (i, k, j, p) with face k of tet i glued to tet j via p."""
        for i, row in enumerate(self.gluings):
            for k, g in enumerate(row):
                if g is not None:
                    yield i, k, g[0], g[1]

    def is_closed(self):
        return all(g is not None for row in self.gluings for g in row)

    def serialize(self):
        lines = []
        for row in self.gluings:
            tokens = []
            for g in row:
                if g is None:
                    tokens.append("-")
                else:
                    j, p = g
                    tokens.append("%d:%s" % (j, "".join(str(x) for x in p)))
            lines.append(" ".join(tokens))
        return "\n".join(lines) + "\n"


def normalize(text):
    """Canonical whitespace/comment-stripped form of a gluing table."""
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        lines.append(" ".join(line.split()))
    return "\n".join(lines) + "\n" if lines else ""


def _parse_token(tok, t, lineno):
    if tok == "-":
        return None
    head, sep, tail = tok.partition(":")
    if not sep or len(tail) != 4 or not head.lstrip("-").isdigit():
        raise ValueError("malformed line %d: bad token %r" % (lineno, tok))
    j = int(head)
    if j < 0 or j >= t:
        raise ValueError(
            "out-of-range tetrahedron index %d on line %d" % (j, lineno))
    try:
        p = tuple(int(c) for c in tail)
    except ValueError:
        raise ValueError("malformed line %d: bad permutation %r" % (lineno, tail))
    if sorted(p) != [0, 1, 2, 3]:
        raise ValueError("malformed line %d: %r is not a permutation" % (lineno, tail))
    return j, p


def parse_triangulation(text):
    """Parse a gluing table; see the module docstring for the format."""
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            rows.append(line.split())
    if not rows:
        raise ValueError("no tetrahedra")
    t = len(rows)
    if t > MAX_TETS:
        raise ValueError("too many tetrahedra (%d > %d)" % (t, MAX_TETS))
    gluings = []
    for i, tokens in enumerate(rows):
        if len(tokens) != 4:
            raise ValueError("malformed line %d: expected 4 tokens" % i)
        gluings.append([_parse_token(tok, t, i) for tok in tokens])

    # The gluing data must describe an involution on face slots without
    # repetitions: each targeted slot is hit exactly once, by its partner.
    targeted = {}
    for i in range(t):
        for k in range(4):
            g = gluings[i][k]
            if g is None:
                continue
            j, p = g
            if (j, p[k]) == (i, k):
                raise ValueError("face (%d,%d) glued to itself" % (i, k))
            if (j, p[k]) in targeted:
                raise ValueError("face glued twice: (%d,%d)" % (j, p[k]))
            targeted[(j, p[k])] = (i, k, p)
    for (j, k2), (i, k, p) in targeted.items():
        g = gluings[j][k2]
        if g is None:
            raise ValueError("dangling face: (%d,%d) is targeted but unglued" % (j, k2))
        jj, q = g
        if (jj, q[k2]) != (i, k) or q != perm_inverse(p):
            raise ValueError("gluing of face (%d,%d) is not an involution" % (j, k2))

    return Triangulation(tuple(tuple(row) for row in gluings))


class _DSU:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, x, y):
        self.parent[self.find(x)] = self.find(y)

    def classes(self):
        out = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


def vertex_classes(tri):
    """Orbits of (tet, vertex) pairs under the face gluings."""
    dsu = _DSU()
    for i in range(tri.tet_count):
        for v in range(4):
            dsu.find((i, v))
    for i, k, j, p in tri.glued_slots():
        for v in range(4):
            if v != k:
                dsu.union((i, v), (j, p[v]))
    return list(dsu.classes().values())


def is_orientable(tri):
    """Exhaustive search for a consistent orientation sign assignment.

    Signs e_i in {+1,-1} must satisfy e_i * e_j == -sign(p) for every
    gluing p from tet i to tet j.
    """
    t = tri.tet_count
    slots = [(i, j, perm_sign(p)) for i, k, j, p in tri.glued_slots()]
    for tail in product((1, -1), repeat=t - 1):
        eps = (1,) + tail
        if all(eps[i] * eps[j] == -s for i, j, s in slots):
            return True
    return False


def has_reversed_edge(tri):
    """True if some edge orbit identifies a directed edge with its reverse.

    Such identifications do not occur in triangulations of manifolds; they
    are rejected before any cutting is attempted.
    """
    dsu = _DSU()
    for i, k, j, p in tri.glued_slots():
        for v in range(4):
            for w in range(4):
                if v != w and v != k and w != k:
                    dsu.union((i, v, w), (j, p[v], p[w]))
    for i in range(tri.tet_count):
        for v in range(4):
            for w in range(v + 1, 4):
                if dsu.find((i, v, w)) == dsu.find((i, w, v)):
                    return True
    return False


def _link_cells(tri):
    """Cell counts and adjacency of the vertex link complex.

    The link of the vertex set is built from one corner triangle per
    (tet, vertex).  Its edges are the normal arcs near vertices in faces,
    its vertices the points near vertex ends of tetrahedron edges.
    """
    t = tri.tet_count
    faces = [(i, v) for i in range(t) for v in range(4)]

    # Arcs: (i, k, v) with v != k, identified across glued faces.
    arcs = _DSU()
    for i in range(t):
        for k in range(4):
            for v in range(4):
                if v != k:
                    arcs.find((i, k, v))
    for i, k, j, p in tri.glued_slots():
        for v in range(4):
            if v != k:
                arcs.union((i, k, v), (j, p[k], p[v]))

    # Points: (i, v, w) = point near v on edge {v, w}.
    pts = _DSU()
    for i in range(t):
        for v in range(4):
            for w in range(4):
                if v != w:
                    pts.find((i, v, w))
    for i, k, j, p in tri.glued_slots():
        for v in range(4):
            for w in range(4):
                if v != w and v != k and w != k:
                    pts.union((i, v, w), (j, p[v], p[w]))

    return faces, arcs, pts


def link_euler_and_components(tri):
    """Euler characteristic of the whole vertex link and its component count."""
    faces, arcs, pts = _link_cells(tri)
    n_edges = len(arcs.classes())
    n_verts = len(pts.classes())
    chi = n_verts - n_edges + len(faces)

    comp = _DSU()
    for i, v in faces:
        comp.find((i, v))
    for i, k, j, p in tri.glued_slots():
        for v in range(4):
            if v != k:
                comp.union((i, v), (j, p[v]))
    return chi, len(comp.classes())


@dataclass
class ValidationReport:
    closed: bool
    orientable: bool
    vertex_count: int
    vertex_link_euler: int
    vertex_link_connected: bool

    def ok(self):
        return (self.closed and self.orientable and self.vertex_count == 1
                and self.vertex_link_euler == 2 and self.vertex_link_connected)


def validate(tri):
    """Measure the Triangulation invariants; failures are reported, not raised."""
    closed = tri.is_closed()
    orientable = is_orientable(tri)
    vcount = len(vertex_classes(tri))
    chi, ncomp = link_euler_and_components(tri)
    return ValidationReport(
        closed=closed,
        orientable=orientable,
        vertex_count=vcount,
        vertex_link_euler=chi,
        vertex_link_connected=(ncomp == 1),
    )


def require_valid(tri):
    """Raise unless tri is a closed orientable one-vertex triangulation
    with sphere vertex link and no reversed edges."""
    rep = validate(tri)
    if not rep.closed:
        raise ValueError("triangulation is not closed")
    if not rep.orientable:
        raise ValueError("triangulation is not orientable")
    if has_reversed_edge(tri):
        raise ValueError("triangulation has an edge glued to itself in reverse")
    if rep.vertex_count != 1:
        raise ValueError("triangulation has %d vertices, expected one"
                         % rep.vertex_count)
    if rep.vertex_link_euler != 2 or not rep.vertex_link_connected:
        raise ValueError("vertex link is not a 2-sphere")
    return rep


def relabel(tri, tet_perm):
    """Relabel tetrahedra by tet_perm (old index -> new index)."""
    t = tri.tet_count
    new = [[None] * 4 for _ in range(t)]
    for i, row in enumerate(tri.gluings):
        for k, g in enumerate(row):
            if g is not None:
                j, p = g
                new[tet_perm[i]][k] = (tet_perm[j], p)
    return Triangulation(tuple(tuple(row) for row in new))
