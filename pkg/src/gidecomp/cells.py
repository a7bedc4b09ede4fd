"""
Glued polyhedral block complexes.

A block is an abstract combinatorial 3-ball: polygonal faces, each a
cyclic tuple of local vertex keys, such that every undirected local edge
lies on exactly two faces.  Face cycles are reoriented coherently at
construction, so every *directed* local edge appears exactly once among
the stored cycles.  Complexes glue blocks along face pairings given by
corner bijections; all quotient-level structure (cells, chain complexes,
boundary surfaces, collapsibility, canonical signatures) is derived from
the local data, so arbitrarily twisted identifications are safe.
"""

import hashlib
from dataclasses import dataclass

from .snf import homology_summary


def skey(x):
    """A total order on heterogeneous cell keys."""
    return repr(x)


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


class _SignedDSU:
    """Union-find tracking a relative sign (+1/-1) along each merge."""

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
        root = x
        acc = 1
        for y in reversed(path):
            acc = acc * self.sign[y]
            self.parent[y] = root
            self.sign[y] = acc
        if path:
            return root, self.sign[path[0]]
        return root, 1

    def union(self, x, y, rel):
        """Record sign(x) * sign(y) == rel.  Returns False on conflict."""
        rx, sx = self.find(x)
        ry, sy = self.find(y)
        if rx == ry:
            return sx * sy == rel
        self.parent[rx] = ry
        self.sign[rx] = rel * sx * sy
        return True


class Face:
    __slots__ = ("key", "cycle", "tag")

    def __init__(self, key, cycle, tag=None):
        self.key = key
        self.cycle = tuple(cycle)
        self.tag = tag

    def __repr__(self):
        return "Face(%r, %r, tag=%r)" % (self.key, self.cycle, self.tag)


class Block:
    """A combinatorial polyhedron with coherently oriented face cycles."""

    __slots__ = ("key", "kind", "faces", "edge_slot")

    def __init__(self, key, kind, faces):
        self.key = key
        self.kind = kind
        self.faces = {}
        for f in faces:
            if f.key in self.faces:
                raise ValueError("duplicate face key %r in block %r" % (f.key, key))
            if len(f.cycle) < 3 or len(set(f.cycle)) != len(f.cycle):
                raise ValueError("degenerate face cycle %r in block %r"
                                 % (f.cycle, key))
            self.faces[f.key] = f
        self._orient()
        self.edge_slot = {}
        for f in self.faces.values():
            cyc = f.cycle
            for i in range(len(cyc)):
                d = (cyc[i], cyc[(i + 1) % len(cyc)])
                if d in self.edge_slot:
                    raise ValueError("directed edge %r repeated in block %r"
                                     % (d, key))
                self.edge_slot[d] = (f.key, i)
        for (u, v) in list(self.edge_slot):
            if (v, u) not in self.edge_slot:
                raise ValueError("unmatched edge %r in block %r" % ((u, v), key))

    def _orient(self):
        incidence = {}
        for f in self.faces.values():
            cyc = f.cycle
            for i in range(len(cyc)):
                e = frozenset((cyc[i], cyc[(i + 1) % len(cyc)]))
                if len(e) != 2:
                    raise ValueError("degenerate edge in block %r" % (self.key,))
                incidence.setdefault(e, []).append(f.key)
        for e, fs in incidence.items():
            if len(fs) != 2:
                raise ValueError("edge %r lies on %d faces of block %r, not 2"
                                 % (sorted(e, key=skey), len(fs), self.key))
        fkeys = sorted(self.faces, key=skey)
        flipped = {}
        for start in fkeys:
            if start in flipped:
                continue
            flipped[start] = False
            queue = [start]
            while queue:
                fk = queue.pop()
                cyc = self.faces[fk].cycle
                if flipped[fk]:
                    cyc = tuple(reversed(cyc))
                for i in range(len(cyc)):
                    u, v = cyc[i], cyc[(i + 1) % len(cyc)]
                    pair = incidence[frozenset((u, v))]
                    gk = pair[0] if pair[1] == fk else pair[1]
                    if gk == fk:
                        raise ValueError("edge repeated within one face of %r"
                                         % (self.key,))
                    gcyc = self.faces[gk].cycle
                    fwd = any(gcyc[j] == u and gcyc[(j + 1) % len(gcyc)] == v
                              for j in range(len(gcyc)))
                    want = fwd  # neighbor must traverse (v, u): flip if it has (u, v)
                    if gk in flipped:
                        if flipped[gk] != want:
                            raise ValueError(
                                "faces of block %r cannot be coherently oriented"
                                % (self.key,))
                    else:
                        flipped[gk] = want
                        queue.append(gk)
        for fk, fl in flipped.items():
            if fl:
                f = self.faces[fk]
                self.faces[fk] = Face(f.key, tuple(reversed(f.cycle)), f.tag)

    def directed_edges(self, fkey):
        cyc = self.faces[fkey].cycle
        return [(cyc[i], cyc[(i + 1) % len(cyc)]) for i in range(len(cyc))]


class BlockComplex:
    """Blocks plus face pairings.

    A pairing identifies two faces via a corner bijection (which must
    respect the cyclic structure).  Unpaired faces are boundary; their
    Face.tag is the boundary class.
    """

    def __init__(self):
        self.blocks = {}
        self.pairings = {}   # (bkey, fkey) -> ((bkey2, fkey2), cmap dict)

    def add_block(self, key, kind, faces):
        if key in self.blocks:
            raise ValueError("duplicate block key %r" % (key,))
        b = Block(key, kind, faces)
        self.blocks[key] = b
        return b

    def pair(self, side1, side2, cmap):
        """Glue side1 = (bkey, fkey) to side2 via the corner map cmap."""
        if side1 == side2:
            raise ValueError("cannot glue a face to itself")
        for s in (side1, side2):
            if s in self.pairings:
                raise ValueError("face %r already glued" % (s,))
        f1 = self.blocks[side1[0]].faces[side1[1]]
        f2 = self.blocks[side2[0]].faces[side2[1]]
        c1, c2 = f1.cycle, f2.cycle
        if (len(c1) != len(c2) or set(cmap) != set(c1)
                or set(cmap.values()) != set(c2)):
            raise ValueError("corner map is not a bijection %r -> %r"
                             % (side1, side2))
        pos2 = {v: i for i, v in enumerate(c2)}
        idx = [pos2[cmap[v]] for v in c1]
        n = len(c1)
        step = (idx[1] - idx[0]) % n
        if step not in (1, n - 1):
            raise ValueError("corner map does not respect the cyclic structure")
        for i in range(n):
            if (idx[(i + 1) % n] - idx[i]) % n != step:
                raise ValueError("corner map does not respect the cyclic structure")
        self.pairings[side1] = (side2, dict(cmap))
        self.pairings[side2] = (side1, {v: k for k, v in cmap.items()})

    def pairing_id(self, side):
        other = self.pairings[side][0]
        return tuple(sorted((side, other), key=skey))

    def all_pairing_ids(self):
        return sorted({self.pairing_id(s) for s in self.pairings}, key=skey)

    def copy(self):
        cx = BlockComplex()
        cx.blocks = dict(self.blocks)
        cx.pairings = dict(self.pairings)
        return cx

    def subcomplex(self, blocks=None, severed=(), extra_tags=None):
        return Subcomplex(self, blocks, severed, extra_tags)


@dataclass
class Cell2:
    key: tuple          # canonical side
    sides: tuple        # 1 or 2 (bkey, fkey) sides
    tag: object         # boundary tag, or None for interior cells

    @property
    def boundary(self):
        return len(self.sides) == 1


class Subcomplex:
    """A set of blocks with some pairings severed.

    Severing a pairing turns both of its sides into boundary faces; this
    is how pattern annuli are cut open when a piece touches an annulus on
    both sides.
    """

    def __init__(self, cx, blocks=None, severed=(), extra_tags=None):
        self.cx = cx
        if blocks is None:
            blocks = cx.blocks.keys()
        self.blocks = frozenset(blocks)
        self.severed = frozenset(severed)
        self.extra_tags = dict(extra_tags or {})
        self._quotient = None
        self._surface = None

    def live_pairing(self, side):
        """Partner of a face side if its gluing is alive here, else None."""
        p = self.cx.pairings.get(side)
        if p is None:
            return None
        if p[0][0] not in self.blocks or side[0] not in self.blocks:
            return None
        if self.cx.pairing_id(side) in self.severed:
            return None
        return p

    def side_tag(self, side):
        face = self.cx.blocks[side[0]].faces[side[1]]
        if self.cx.pairings.get(side) is None:
            return face.tag
        if side in self.extra_tags:
            return self.extra_tags[side]
        return ("cut",)

    def sides(self):
        for bk in sorted(self.blocks, key=skey):
            for fk in self.cx.blocks[bk].faces:
                yield (bk, fk)

    def boundary_sides(self):
        return [s for s in self.sides() if self.live_pairing(s) is None]

    def quotient(self):
        if self._quotient is None:
            self._quotient = _Quotient(self)
        return self._quotient

    def homology(self, rel=()):
        return self.quotient().homology(rel)

    def boundary_surface(self):
        if self._surface is None:
            self._surface = extract_boundary_surface(self)
        return self._surface

    def signature(self):
        return signature_of(self)


class _Quotient:
    """Quotient cells and integer chain complex of a subcomplex."""

    def __init__(self, sub):
        self.sub = sub
        cx = sub.cx
        vdsu = _DSU()
        edsu = _SignedDSU()

        def canon_edge(bk, u, v):
            if skey(u) <= skey(v):
                return (bk, u, v), 1
            return (bk, v, u), -1

        self._canon_edge = canon_edge

        for bk in sorted(sub.blocks, key=skey):
            b = cx.blocks[bk]
            for f in b.faces.values():
                for u in f.cycle:
                    vdsu.find((bk, u))
                for (u, v) in b.directed_edges(f.key):
                    e, _ = canon_edge(bk, u, v)
                    edsu.find(e)

        seen = set()
        for side in sub.sides():
            p = sub.live_pairing(side)
            if p is None:
                continue
            pid = cx.pairing_id(side)
            if pid in seen:
                continue
            seen.add(pid)
            (b2k, _f2k), cmap = p
            b1k, f1k = side
            f1 = cx.blocks[b1k].faces[f1k]
            for u in f1.cycle:
                vdsu.union((b1k, u), (b2k, cmap[u]))
            for (u, v) in cx.blocks[b1k].directed_edges(f1k):
                e1, s1 = canon_edge(b1k, u, v)
                e2, s2 = canon_edge(b2k, cmap[u], cmap[v])
                if not edsu.union(e1, e2, s1 * s2):
                    raise ValueError("1-cell identified with itself reversed; "
                                     "not a manifold complex")

        self.vdsu, self.edsu = vdsu, edsu

        self.cell2_of_side = {}
        cells = {}
        for side in sub.sides():
            if side in self.cell2_of_side:
                continue
            p = sub.live_pairing(side)
            if p is None:
                sides = (side,)
                tag = sub.side_tag(side)
            else:
                sides = tuple(sorted((side, p[0]), key=skey))
                tag = None
            key = sides[0]
            cells[key] = Cell2(key=key, sides=sides, tag=tag)
            for s in sides:
                self.cell2_of_side[s] = key
        self.cells2 = cells

        self.v_index = {}
        self.e_index = {}
        for bk in sorted(sub.blocks, key=skey):
            b = cx.blocks[bk]
            for f in b.faces.values():
                for u in f.cycle:
                    r = vdsu.find((bk, u))
                    if r not in self.v_index:
                        self.v_index[r] = None
                for (u, v) in b.directed_edges(f.key):
                    e, _ = canon_edge(bk, u, v)
                    r, _s = edsu.find(e)
                    if r not in self.e_index:
                        self.e_index[r] = None
        for n, r in enumerate(sorted(self.v_index, key=skey)):
            self.v_index[r] = n
        for n, r in enumerate(sorted(self.e_index, key=skey)):
            self.e_index[r] = n

        self.c2_keys = sorted(cells, key=skey)
        self.c2_index = {k: n for n, k in enumerate(self.c2_keys)}
        self.b_keys = sorted(sub.blocks, key=skey)
        self.b_index = {k: n for n, k in enumerate(self.b_keys)}
        self._matrices = {}

    # -- cell incidence ----------------------------------------------------

    def edge_class(self, bk, u, v):
        """(1-cell index, sign of (u->v) against the class orientation)."""
        e, s = self._canon_edge(bk, u, v)
        r, s2 = self.edsu.find(e)
        return self.e_index[r], s * s2

    def vertex_class(self, bk, u):
        return self.v_index[self.vdsu.find((bk, u))]

    def cell2_boundary(self, key):
        """Signed 1-cell boundary of a 2-cell, from its reference side."""
        bk, fk = key
        out = {}
        for (u, v) in self.sub.cx.blocks[bk].directed_edges(fk):
            idx, s = self.edge_class(bk, u, v)
            out[idx] = out.get(idx, 0) + s
        return out

    def side_orientation(self, side):
        """+1 if this side's cycle agrees with the 2-cell reference
        orientation, else -1."""
        key = self.cell2_of_side[side]
        if side == key:
            return 1
        pside, cmap = self.sub.cx.pairings[key]
        assert pside == side
        ref = self.sub.cx.blocks[key[0]].faces[key[1]].cycle
        img = [cmap[u] for u in ref]
        cyc = self.sub.cx.blocks[side[0]].faces[side[1]].cycle
        pos = {v: i for i, v in enumerate(cyc)}
        n = len(cyc)
        return 1 if (pos[img[1]] - pos[img[0]]) % n == 1 else -1

    # -- chain complex -----------------------------------------------------

    def chain_matrices(self, rel=()):
        """Boundary matrices with the closed subcomplex spanned by the
        boundary 2-cells in `rel` deleted (relative chain complex).
        Matrices are row-major: rows lower cells, columns higher cells."""
        relkey = tuple(sorted(rel, key=skey))
        if relkey in self._matrices:
            return self._matrices[relkey]
        dead2 = set(relkey)
        for k in dead2:
            if k not in self.cells2 or not self.cells2[k].boundary:
                raise ValueError("relative selector names a non-boundary cell %r"
                                 % (k,))
        dead1 = set()
        dead0 = set()
        for k in dead2:
            bk, fk = k
            for (u, v) in self.sub.cx.blocks[bk].directed_edges(fk):
                idx, _ = self.edge_class(bk, u, v)
                dead1.add(idx)
                dead0.add(self.vertex_class(bk, u))

        live0 = [i for i in range(len(self.v_index)) if i not in dead0]
        live1 = [i for i in range(len(self.e_index)) if i not in dead1]
        live2 = [k for k in self.c2_keys if k not in dead2]
        map0 = {i: n for n, i in enumerate(live0)}
        map1 = {i: n for n, i in enumerate(live1)}
        map2 = {k: n for n, k in enumerate(live2)}

        # canonical directed representative of each 1-cell class
        root_rep = {}
        for bk in self.b_keys:
            b = self.sub.cx.blocks[bk]
            for f in b.faces.values():
                for (u, v) in b.directed_edges(f.key):
                    e, s = self._canon_edge(bk, u, v)
                    r, s2 = self.edsu.find(e)
                    if r not in root_rep:
                        root_rep[r] = (bk, u, v) if s * s2 == 1 else (bk, v, u)

        d1 = [[0] * len(live1) for _ in range(len(live0))]
        for r, (bk, u, v) in root_rep.items():
            idx = self.e_index[r]
            if idx not in map1:
                continue
            col = map1[idx]
            hv = self.vertex_class(bk, v)
            hu = self.vertex_class(bk, u)
            if hv in map0:
                d1[map0[hv]][col] += 1
            if hu in map0:
                d1[map0[hu]][col] -= 1

        d2 = [[0] * len(live2) for _ in range(len(live1))]
        for k in live2:
            col = map2[k]
            for idx, coeff in self.cell2_boundary(k).items():
                if coeff and idx in map1:
                    d2[map1[idx]][col] += coeff

        d3 = [[0] * len(self.b_keys) for _ in range(len(live2))]
        for bk in self.b_keys:
            col = self.b_index[bk]
            for fk in self.sub.cx.blocks[bk].faces:
                key = self.cell2_of_side[(bk, fk)]
                if key in map2:
                    d3[map2[key]][col] += self.side_orientation((bk, fk))

        out = {
            "n0": len(live0), "n1": len(live1), "n2": len(live2),
            "n3": len(self.b_keys),
            "d1": d1, "d2": d2, "d3": d3,
            "map1": map1, "map2": map2,
        }
        self._matrices[relkey] = out
        return out

    def homology(self, rel=()):
        """[(rank, torsion divisors)] for H_0..H_3, relative to `rel`."""
        m = self.chain_matrices(rel)
        return [
            homology_summary([], m["d1"], m["n0"]),
            homology_summary(m["d1"], m["d2"], m["n1"]),
            homology_summary(m["d2"], m["d3"], m["n2"]),
            homology_summary(m["d3"], [], m["n3"]),
        ]

    def cell_counts(self, rel=()):
        m = self.chain_matrices(rel)
        return (m["n0"], m["n1"], m["n2"], m["n3"])

    def chain_of_edge_path(self, edges):
        """1-chain of a list of directed local edges (bkey, u, v)."""
        vec = {}
        for (bk, u, v) in edges:
            idx, s = self.edge_class(bk, u, v)
            vec[idx] = vec.get(idx, 0) + s
        return vec

    def quotient_kills_h1(self, chains):
        """True if H1 / <classes of the given 1-chains> is trivial."""
        m = self.chain_matrices()
        d2 = [list(row) for row in m["d2"]]
        for vec in chains:
            col = [0] * m["n1"]
            for idx, c in vec.items():
                col[m["map1"][idx]] = c
            for r in range(m["n1"]):
                d2[r].append(col[r])
        rank, torsion = homology_summary(m["d1"], d2, m["n1"])
        return rank == 0 and not torsion

    def quotient_kills_h2(self, chains, rel=()):
        """True if relative H2 / <classes of the given 2-chains> is
        trivial; chains are dicts keyed by 2-cell key."""
        m = self.chain_matrices(rel)
        d3 = [list(row) for row in m["d3"]]
        for vec in chains:
            col = [0] * m["n2"]
            for k, c in vec.items():
                if k in m["map2"]:
                    col[m["map2"][k]] = c
            for r in range(m["n2"]):
                d3[r].append(col[r])
        rank, torsion = homology_summary(m["d2"], d3, m["n2"])
        return rank == 0 and not torsion


# ---------------------------------------------------------------------------
# Boundary surface extraction.


@dataclass
class SurfaceFace:
    side: tuple
    cycle: tuple
    tag: object


@dataclass
class SurfaceComponentInfo:
    faces: list           # SurfaceFace records
    euler_char: int
    orientable: bool
    tags: dict            # tag head -> face count
    annuli: set           # annulus ids among pattern tags

    def is_sphere(self):
        return self.euler_char == 2 and self.orientable

    def all_sv(self):
        return set(self.tags) == {"Sv"}


class BoundarySurface:
    """The boundary of a subcomplex as an abstract polygonal surface.

    slot_pairs maps (side, pos) to ((side2, pos2), same_dir): the edge
    slots identified in the surface, and whether they traverse the
    underlying 1-cell in the same direction.
    """

    def __init__(self, faces, slot_pairs, components):
        self.faces = faces
        self.slot_pairs = slot_pairs
        self.components = components
        self._comp_of = {}
        for comp in components:
            for f in comp.faces:
                self._comp_of[f.side] = comp

    def component_of(self, side):
        return self._comp_of[side]


def _surface_partner(sub, side, pos):
    """Rotate around the 1-cell under boundary slot (side, pos) through
    the subcomplex; returns ((side2, pos2), same_direction)."""
    cx = sub.cx
    bk, fk = side
    cyc = cx.blocks[bk].faces[fk].cycle
    tail, head = cyc[pos], cyc[(pos + 1) % len(cyc)]
    # dcur = image of the original (tail -> head) in current block coords
    cur_b = bk
    dcur = (tail, head)
    fcur = cx.blocks[cur_b].edge_slot[(head, tail)][0]
    limit = 8 + 8 * sum(len(bl.faces) for bl in cx.blocks.values())
    for _ in range(limit):
        if sub.live_pairing((cur_b, fcur)) is None:
            blk = cx.blocks[cur_b]
            slot = blk.edge_slot.get(dcur)
            if slot is not None and slot[0] == fcur:
                return (cur_b, fcur), slot[1], True
            slot = blk.edge_slot[(dcur[1], dcur[0])]
            assert slot[0] == fcur
            return (cur_b, fcur), slot[1], False
        (nb, nf), cmap = sub.live_pairing((cur_b, fcur))
        dcur = (cmap[dcur[0]], cmap[dcur[1]])
        cur_b = nb
        # cross block nb: the next face is the other face on this edge
        blk = cx.blocks[nb]
        s1 = blk.edge_slot[dcur]
        s2 = blk.edge_slot[(dcur[1], dcur[0])]
        fcur = s2[0] if s1[0] == nf else s1[0]
        if s1[0] != nf and s2[0] != nf:
            raise RuntimeError("pairing image edge not on target face")
    raise RuntimeError("rotation around 1-cell did not terminate")


def extract_boundary_surface(sub):
    cx = sub.cx
    boundary_sides = sub.boundary_sides()
    faces = {}
    for side in boundary_sides:
        bk, fk = side
        faces[side] = SurfaceFace(side=side,
                                  cycle=cx.blocks[bk].faces[fk].cycle,
                                  tag=sub.side_tag(side))

    slot_pairs = {}
    for side in boundary_sides:
        for pos in range(len(faces[side].cycle)):
            if (side, pos) in slot_pairs:
                continue
            other, pos2, same = _surface_partner(sub, side, pos)
            if (other, pos2) == (side, pos):
                raise RuntimeError("boundary slot paired with itself")
            slot_pairs[(side, pos)] = ((other, pos2), same)
            slot_pairs[(other, pos2)] = ((side, pos), same)

    comp = _DSU()
    parity = _SignedDSU()
    corner = _DSU()
    for side in boundary_sides:
        comp.find(side)
        parity.find(side)
    orient_bad = set()
    for ((side1, pos1), ((side2, pos2), same)) in slot_pairs.items():
        if (skey(side1), pos1) > (skey(side2), pos2):
            continue
        comp.union(side1, side2)
        if not parity.union(side1, side2, -1 if same else 1):
            orient_bad.add(side1)
        n1 = len(faces[side1].cycle)
        n2 = len(faces[side2].cycle)
        if same:
            corner.union((side1, pos1), (side2, pos2))
            corner.union((side1, (pos1 + 1) % n1), (side2, (pos2 + 1) % n2))
        else:
            corner.union((side1, pos1), (side2, (pos2 + 1) % n2))
            corner.union((side1, (pos1 + 1) % n1), (side2, pos2))

    bad_roots = {comp.find(s) for s in orient_bad}
    groups = {}
    for side in boundary_sides:
        groups.setdefault(comp.find(side), []).append(side)
    corner_count = {}
    for key in list(corner.parent):
        root = corner.find(key)
        if root == key:
            corner_count[comp.find(key[0])] = corner_count.get(comp.find(key[0]), 0) + 1

    components = []
    for root in sorted(groups, key=skey):
        sides = sorted(groups[root], key=skey)
        F = len(sides)
        E = sum(len(faces[s].cycle) for s in sides) // 2
        V = corner_count.get(root, 0)
        tags = {}
        annuli = set()
        for s in sides:
            tag = faces[s].tag
            name = tag[0] if tag else "untagged"
            tags[name] = tags.get(name, 0) + 1
            if tag and tag[0] == "pattern":
                annuli.add(tag[1])
        components.append(SurfaceComponentInfo(
            faces=[faces[s] for s in sides],
            euler_char=V - E + F,
            orientable=root not in bad_roots,
            tags=tags,
            annuli=annuli,
        ))
    return BoundarySurface(faces, slot_pairs, components)


# ---------------------------------------------------------------------------
# Collapsibility.


def collapse_type(sub):
    """Greedy free-face collapse of the quotient complex.

    Returns 'ball', 'solid_torus' or None.  Collapsing to a point or a
    disc certifies a ball; to a circle, annulus or Moebius band a solid
    torus (regular neighborhoods in an orientable ambient manifold).
    """
    q = sub.quotient()

    cell2_edges = {}
    for k in q.c2_keys:
        bnd = {}
        bk, fk = k
        for (u, v) in q.sub.cx.blocks[bk].directed_edges(fk):
            idx, _ = q.edge_class(bk, u, v)
            bnd[idx] = bnd.get(idx, 0) + 1
        cell2_edges[k] = bnd
    edge_verts = {}
    for bk in q.b_keys:
        b = q.sub.cx.blocks[bk]
        for f in b.faces.values():
            for (u, v) in b.directed_edges(f.key):
                idx, _ = q.edge_class(bk, u, v)
                if idx not in edge_verts:
                    edge_verts[idx] = (q.vertex_class(bk, u),
                                       q.vertex_class(bk, v))

    live3 = set(q.b_keys)
    live2 = set(q.c2_keys)
    live1 = set(range(len(q.e_index)))
    live0 = set(range(len(q.v_index)))

    def face3_count(c2):
        return sum(1 for s in q.cells2[c2].sides if s[0] in live3)

    def edge2_count(e):
        return sum(cell2_edges[k].get(e, 0) for k in live2)

    def vert1_count(v):
        c = 0
        for e in live1:
            a, b = edge_verts[e]
            c += (a == v) + (b == v)
        return c

    while True:
        step = False
        for c2 in sorted(live2, key=skey):
            if face3_count(c2) == 1:
                blk = next(s[0] for s in q.cells2[c2].sides if s[0] in live3)
                live3.discard(blk)
                live2.discard(c2)
                step = True
                break
        if step:
            continue
        if live3:
            break
        for e in sorted(live1):
            if edge2_count(e) == 1:
                k = next(k for k in sorted(live2, key=skey)
                         if cell2_edges[k].get(e, 0))
                live2.discard(k)
                live1.discard(e)
                step = True
                break
        if step:
            continue
        if live2:
            break
        for v in sorted(live0):
            if vert1_count(v) == 1:
                e = next(e for e in sorted(live1) if v in edge_verts[e])
                live1.discard(e)
                live0.discard(v)
                step = True
                break
        if not step:
            break

    if live3:
        return None
    if live2:
        for e in live1:
            if edge2_count(e) > 2:
                return None
        comp = _DSU()
        for k in live2:
            comp.find(k)
        for e in live1:
            ks = [k for k in live2 if cell2_edges[k].get(e, 0)]
            for a, b in zip(ks, ks[1:]):
                comp.union(a, b)
        if len({comp.find(k) for k in live2}) != 1:
            return None
        chi = len(live0) - len(live1) + len(live2)
        has_bnd = any(edge2_count(e) == 1 for e in live1)
        if chi == 1 and has_bnd:
            return "ball"
        if chi == 0 and has_bnd:
            return "solid_torus"
        return None
    if live1:
        deg = {}
        for e in live1:
            a, b = edge_verts[e]
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        if (set(deg) == live0 and all(d == 2 for d in deg.values())
                and len(live1) == len(live0)):
            comp = _DSU()
            for e in live1:
                a, b = edge_verts[e]
                comp.union(a, b)
            if len({comp.find(v) for v in live0}) == 1:
                return "solid_torus"
        return None
    if len(live0) == 1:
        return "ball"
    return None


# ---------------------------------------------------------------------------
# Canonical signatures.

_KIND_CODES = {}
_TAG_CODES = {None: 0, "S": 1, "Sv": 2, "pattern": 3, "cut": 4, "free": 5}


def _kind_code(kind):
    if kind not in _KIND_CODES:
        h = hashlib.sha256(str(kind).encode()).digest()
        _KIND_CODES[kind] = int.from_bytes(h[:4], "big")
    return _KIND_CODES[kind]


def _tag_code(tag):
    name = tag[0] if tag else None
    return _TAG_CODES.get(name, 9)


def _dart_maps(sub, mirror):
    cx = sub.cx
    darts = []
    dart_id = {}
    cycles = {}
    for bk in sorted(sub.blocks, key=skey):
        b = cx.blocks[bk]
        for fk in sorted(b.faces, key=skey):
            cyc = b.faces[fk].cycle
            if mirror:
                cyc = tuple(reversed(cyc))
            cycles[(bk, fk)] = cyc
            for pos in range(len(cyc)):
                dart_id[(bk, fk, pos)] = len(darts)
                darts.append((bk, fk, pos))

    edge_slot = {}
    for (bk, fk), cyc in cycles.items():
        for i in range(len(cyc)):
            edge_slot[(bk, cyc[i], cyc[(i + 1) % len(cyc)])] = (fk, i)

    n = len(darts)
    alpha = [0] * n
    beta = [0] * n
    gamma = [0] * n
    kind = [0] * n
    for d, (bk, fk, pos) in enumerate(darts):
        cyc = cycles[(bk, fk)]
        L = len(cyc)
        alpha[d] = dart_id[(bk, fk, (pos + 1) % L)]
        u, v = cyc[pos], cyc[(pos + 1) % L]
        f2, p2 = edge_slot[(bk, v, u)]
        beta[d] = dart_id[(bk, f2, p2)]
        kind[d] = _kind_code(cx.blocks[bk].kind)
        live = sub.live_pairing((bk, fk))
        if live is None:
            gamma[d] = -(1 + _tag_code(sub.side_tag((bk, fk))))
        else:
            (b2, fk2), cmap = live
            iu, iv = cmap[u], cmap[v]
            slot = edge_slot.get((b2, iu, iv))
            if slot is None or slot[0] != fk2:
                slot = edge_slot[(b2, iv, iu)]
            assert slot[0] == fk2
            gamma[d] = dart_id[(b2, fk2, slot[1])]
    return alpha, beta, gamma, kind


def _bfs_code(start, alpha, beta, gamma, kind):
    index = {start: 0}
    order = [start]
    code = []
    i = 0
    while i < len(order):
        d = order[i]
        i += 1
        code.append(kind[d])
        for move in (alpha, beta, gamma):
            t = move[d]
            if t < 0:
                code.append(t)
                continue
            if t not in index:
                index[t] = len(order)
                order.append(t)
            code.append(index[t])
    if len(order) != len(alpha):
        code.append(-999)
    return tuple(code)


def signature_of(sub):
    """Canonical combinatorial-type string: minimal BFS encoding over all
    traversal roots, invariant under relabeling and mirroring."""
    best = None
    for mirror in (False, True):
        alpha, beta, gamma, kind = _dart_maps(sub, mirror)
        if not alpha:
            code = (0,)
            best = code if best is None or code < best else best
            continue
        for start in range(len(alpha)):
            code = _bfs_code(start, alpha, beta, gamma, kind)
            if best is None or code < best:
                best = code
    return hashlib.sha256(repr(best).encode()).hexdigest()[:20]


# ---------------------------------------------------------------------------
# Capping constructions.


def cone_cap_spec(surface, component, prefix):
    """Pyramids coning off a boundary sphere component.

    Returns (block specs, pairing specs): one pyramid per sphere face,
    base glued to it, side triangles glued along the sphere's own edge
    pairings.  Works for arbitrarily identified sphere cell structures.
    """
    face_sides = [f.side for f in component.faces]
    face_set = set(face_sides)
    pyr_key = {f: (prefix, idx) for idx, f in enumerate(sorted(face_set, key=skey))}
    blocks = []
    pairs = []
    for f in sorted(face_set, key=skey):
        sf = surface.faces[f]
        n = len(sf.cycle)
        facelist = [Face(("base",), tuple(("b", i) for i in range(n)))]
        for i in range(n):
            facelist.append(Face(("side", i),
                                 (("b", (i + 1) % n), ("b", i), ("apex",))))
        blocks.append((pyr_key[f], "cone", facelist))
        pairs.append(((pyr_key[f], ("base",)), f,
                      {("b", i): sf.cycle[i] for i in range(n)}))
    done = set()
    for f in sorted(face_set, key=skey):
        n = len(surface.faces[f].cycle)
        for pos in range(n):
            (g, pos2), same = surface.slot_pairs[(f, pos)]
            key = tuple(sorted(((f, pos), (g, pos2)), key=skey))
            if key in done:
                continue
            done.add(key)
            if g not in face_set:
                raise ValueError("component is not edge-closed")
            m = len(surface.faces[g].cycle)
            if same:
                cmap = {("b", pos): ("b", pos2),
                        ("b", (pos + 1) % n): ("b", (pos2 + 1) % m),
                        ("apex",): ("apex",)}
            else:
                cmap = {("b", pos): ("b", (pos2 + 1) % m),
                        ("b", (pos + 1) % n): ("b", pos2),
                        ("apex",): ("apex",)}
            pairs.append(((pyr_key[f], ("side", pos)),
                          (pyr_key[g], ("side", pos2)), cmap))
    return blocks, pairs


def apply_specs(cx, blocks, pairs):
    """Extend a copy of cx with block specs and pairing specs."""
    out = cx.copy()
    for key, kind, faces in blocks:
        out.add_block(key, kind, faces)
    for side1, side2, cmap in pairs:
        out.pair(side1, side2, cmap)
    return out


def build_prism_spec(key, word, kind="cap_prism"):
    """A prism over an N-gon whose boundary edges carry the labels of
    `word` (a list of (label, exponent) pairs).  Side face ("s", i)
    covers the i-th edge; its corners are ("t", i), ("t", i+1) on the top
    polygon and ("u", ...) on the bottom."""
    n = len(word)
    if n < 3:
        raise ValueError("prism polygon needs at least 3 edges")
    faces = [Face(("top",), tuple(("t", i) for i in range(n))),
             Face(("bot",), tuple(("u", i) for i in reversed(range(n))))]
    for i in range(n):
        faces.append(Face(("s", i),
                          (("t", i), ("t", (i + 1) % n),
                           ("u", (i + 1) % n), ("u", i))))
    return (key, kind, faces)


def prism_self_pairs(key, word):
    """Pairings of equal-label side quads with opposite exponents,
    identifying the base edges and preserving the fiber direction."""
    n = len(word)
    by_label = {}
    for i, (lab, ex) in enumerate(word):
        by_label.setdefault(lab, []).append((i, ex))
    pairs = []
    for lab in sorted(by_label):
        occ = by_label[lab]
        if len(occ) == 1:
            continue
        if len(occ) != 2 or {e for _, e in occ} != {1, -1}:
            raise ValueError("label %r must occur once with each sign" % (lab,))
        (i, ei), (j, _ej) = occ
        if ei == -1:
            i, j = j, i
        cmap = {("t", i): ("t", (j + 1) % n), ("t", (i + 1) % n): ("t", j),
                ("u", i): ("u", (j + 1) % n), ("u", (i + 1) % n): ("u", j)}
        pairs.append(((key, ("s", i)), (key, ("s", j)), cmap))
    return pairs
