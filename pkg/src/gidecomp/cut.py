"""
Cutting the truncated triangulation along a normal surface.

The vertex-link sphere is re-adjoined internally, so the cut runs along
S union S_v.  Each tetrahedron decomposes into product blocks (between
parallel normal discs), two truncated prisms (if a quad type is present)
or one truncated tetrahedron (if not).  Faces on the tetrahedron boundary
are the complementary regions of the normal arcs: one central region per
face slot (a hexagon of a non-product piece) and one band per pair of
consecutive arcs.  Pairings are induced by the triangulation gluings.

Local vertex keys are points on tetrahedron edges with a side:
("p", lo, hi, pos, facing) is the point at position pos (from lo) on edge
{lo, hi}, on the side toward `facing`.
"""

from dataclasses import dataclass

from .cells import BlockComplex, Face, skey
from .normal import (NormalSurfaceVector, TetDiscs, build_surface,
                     is_admissible, quad_type_of_pair, strip_vertex_linking)
from .triangulation import require_valid

CLASS_SV = "normal-disc-in-Sv"
CLASS_S = "normal-disc-in-S"
CLASS_HEX = "hexagonal"
CLASS_QUADFACE = "quad-face"
CLASS_VERTICAL = "vertical-quad"


@dataclass
class CutPiece:
    kind: str            # TruncatedTet | TruncatedPrism | ProductBlock
    source_tet: int
    block: tuple         # block key in the complex
    faces: list          # (face key, class)


@dataclass
class CutComplex:
    tri: object
    vector: NormalSurfaceVector
    cx: BlockComplex
    pieces: list                  # CutPiece, deterministic order
    face_class: dict              # (block, face key) -> class string
    frontier: set                 # pairing ids of frontier quad faces
    aug: list                     # TetDiscs with the vertex link adjoined

    def piece_by_block(self, block):
        return self._by_block[block]

    def finalize(self):
        self._by_block = {p.block: p for p in self.pieces}
        return self


def _augmented(vec):
    coords = list(vec.coords)
    for i in range(vec.tet_count):
        for v in range(4):
            coords[7 * i + v] += 1
    return NormalSurfaceVector(coords)


def _pt(td, v, w, m, facing):
    """Canonical point key on edge {v,w} at position m from v."""
    if v < w:
        return ("p", v, w, m, facing)
    total = td.edge_points(v, w)
    return ("p", w, v, total - 1 - m, facing)


def _map_pt(td_src, p, key):
    """Image of a point key under the vertex map p (into the glued tet)."""
    _tag, lo, hi, pos, facing = key
    v2, w2 = p[lo], p[hi]
    total = td_src.edge_points(lo, hi)
    if v2 < w2:
        return ("p", v2, w2, pos, p[facing])
    return ("p", w2, v2, total - 1 - pos, p[facing])


def _central_cycle(td, k):
    x, y, z = sorted(v for v in range(4) if v != k)
    cx_, cy, cz = (td.arc_count(k, x), td.arc_count(k, y), td.arc_count(k, z))
    return (
        _pt(td, x, y, cx_ - 1, y), _pt(td, y, x, cy - 1, x),
        _pt(td, y, z, cy - 1, z), _pt(td, z, y, cz - 1, y),
        _pt(td, z, x, cz - 1, x), _pt(td, x, z, cx_ - 1, z),
    )


def _band_cycle(td, k, v, m):
    a, b = sorted(w for w in range(4) if w not in (v, k))
    return (
        _pt(td, v, a, m, a), _pt(td, v, a, m + 1, v),
        _pt(td, v, b, m + 1, v), _pt(td, v, b, m, b),
    )


def _region_cycles(td, k):
    """All regions of face slot k: {region id: corner cycle}."""
    regions = {("c",): _central_cycle(td, k)}
    for v in range(4):
        if v == k:
            continue
        for m in range(td.arc_count(k, v) - 1):
            regions[("b", v, m)] = _band_cycle(td, k, v, m)
    return regions


def _region_class(td, k, rid, block_kind):
    if rid == ("c",):
        return CLASS_HEX
    return CLASS_QUADFACE if block_kind == "prism" else CLASS_VERTICAL


def _disc_tag(i, kind, which, layer, side):
    if kind == "t" and layer == 0:
        return ("Sv", i, which)
    return ("S", (i, kind, which, layer), side)


def _tri_disc_cycle(td, v, layer, facing_v):
    out = []
    for w in sorted(u for u in range(4) if u != v):
        out.append(_pt(td, v, w, layer, v if facing_v else w))
    return tuple(out)


def _quad_disc_cycle(td, s, a_side):
    (a0, a1), (b0, b1) = td.A, td.B
    corners = []
    for (x, y) in ((a0, b0), (a0, b1), (a1, b1), (a1, b0)):
        facing = x if a_side else y
        corners.append(_pt(td, x, y, td.n[x] + s, facing))
    return tuple(corners)


def _tet_blocks(i, td):
    """Block specs (key, kind, faces) for one tetrahedron, plus a map
    from (slot, region id) to (block key, face key)."""
    blocks = []
    owner = {}

    def region_face(bkey, k, rid, cyc):
        owner[(k, rid)] = (bkey, ("r", k, rid))
        return Face(("r", k, rid), cyc)

    # triangle product blocks
    for v in range(4):
        for layer in range(td.n[v] - 1):
            bkey = ("tb", i, v, layer)
            faces = [
                Face(("dt", v, layer, "far"),
                     _tri_disc_cycle(td, v, layer, False),
                     _disc_tag(i, "t", v, layer, "far")),
                Face(("dt", v, layer + 1, "near"),
                     _tri_disc_cycle(td, v, layer + 1, True),
                     _disc_tag(i, "t", v, layer + 1, "near")),
            ]
            for k in range(4):
                if k != v:
                    faces.append(region_face(bkey, k, ("b", v, layer),
                                             _band_cycle(td, k, v, layer)))
            blocks.append((bkey, "tri_block", faces))

    if td.q is None:
        bkey = ("tt", i)
        faces = []
        for v in range(4):
            faces.append(Face(("dt", v, td.n[v] - 1, "far"),
                              _tri_disc_cycle(td, v, td.n[v] - 1, False),
                              _disc_tag(i, "t", v, td.n[v] - 1, "far")))
        for k in range(4):
            faces.append(region_face(bkey, k, ("c",), _central_cycle(td, k)))
        blocks.append((bkey, "trunc_tet", faces))
        return blocks, owner

    (a0, a1), (b0, b1) = td.A, td.B

    # quad product blocks
    for s in range(td.nq - 1):
        bkey = ("qb", i, s)
        faces = [
            Face(("dq", s, "B"), _quad_disc_cycle(td, s, False),
                 _disc_tag(i, "q", td.q, s, "B")),
            Face(("dq", s + 1, "A"), _quad_disc_cycle(td, s + 1, True),
                 _disc_tag(i, "q", td.q, s + 1, "A")),
        ]
        for k in range(4):
            # arc type carrying the quads in slot k is the pair-mate of k
            v = _pair_mate(td, k)
            if v in td.A:
                m = td.n[v] + s
            else:
                m = td.n[v] + td.nq - 2 - s
            faces.append(region_face(bkey, k, ("b", v, m),
                                     _band_cycle(td, k, v, m)))
        blocks.append((bkey, "quad_block", faces))

    # prisms
    for name, pair, other, quad_layer, quad_side in (
            ("A", (a0, a1), (b0, b1), 0, "A"),
            ("B", (b0, b1), (a0, a1), td.nq - 1, "B")):
        bkey = ("pr", i, name)
        faces = []
        for v in pair:
            faces.append(Face(("dt", v, td.n[v] - 1, "far"),
                              _tri_disc_cycle(td, v, td.n[v] - 1, False),
                              _disc_tag(i, "t", v, td.n[v] - 1, "far")))
        faces.append(Face(("dq", quad_layer, quad_side),
                          _quad_disc_cycle(td, quad_layer, quad_side == "A"),
                          _disc_tag(i, "q", td.q, quad_layer, quad_side)))
        for k in other:
            faces.append(region_face(bkey, k, ("c",), _central_cycle(td, k)))
        for k in pair:
            v = pair[0] if k == pair[1] else pair[1]
            m = td.n[v] - 1
            faces.append(region_face(bkey, k, ("b", v, m),
                                     _band_cycle(td, k, v, m)))
        blocks.append((bkey, "prism", faces))

    return blocks, owner


def _pair_mate(td, k):
    if k in td.A:
        return td.A[0] if k == td.A[1] else td.A[1]
    return td.B[0] if k == td.B[1] else td.B[1]


_KIND_NAME = {"trunc_tet": "TruncatedTet", "prism": "TruncatedPrism",
              "tri_block": "ProductBlock", "quad_block": "ProductBlock"}


def cut_along(tri, vec):
    """Cut the truncated triangulation along the surface of `vec` (with
    the vertex link re-adjoined) into a CutComplex."""
    require_valid(tri)
    if not is_admissible(tri, vec):
        raise ValueError("vector is not admissible")
    if strip_vertex_linking(vec) != vec:
        raise ValueError("vertex-linking components must be stripped first")
    if any(c for c in vec.coords):
        surf = build_surface(tri, vec)
        if not surf.is_two_sided():
            raise ValueError("surface has a one-sided component")

    aug = _augmented(vec)
    t = tri.tet_count
    tds = [TetDiscs(aug, i) for i in range(t)]

    cx = BlockComplex()
    owners = []
    pieces = []
    for i in range(t):
        blocks, owner = _tet_blocks(i, tds[i])
        owners.append(owner)
        for bkey, kind, faces in blocks:
            cx.add_block((i,) + bkey, kind,
                         [Face(f.key, tuple((i,) + c for c in f.cycle), f.tag)
                          for f in faces])

    # region owner keys were local to the tet; requalify
    def owner_of(i, k, rid):
        bkey, fkey = owners[i][(k, rid)]
        return ((i,) + bkey, fkey)

    face_class = {}
    for i in range(t):
        td = tds[i]
        for (k, rid), (bkey, fkey) in owners[i].items():
            blk = (i,) + bkey
            face_class[(blk, fkey)] = _region_class(td, k, rid,
                                                    cx.blocks[blk].kind)

    # pairings induced by the triangulation gluings
    for i, k, j, p in tri.glued_slots():
        if (i, k) > (j, p[k]):
            continue
        td = tds[i]
        k2 = p[k]
        for rid, cyc in _region_cycles(td, k).items():
            if rid == ("c",):
                rid2 = ("c",)
            else:
                _b, v, m = rid
                rid2 = ("b", p[v], m)
            side1 = owner_of(i, k, rid)
            side2 = owner_of(j, k2, rid2)
            cmap = {(i,) + c: (j,) + _map_pt(td, p, c) for c in cyc}
            cx.pair(side1, side2, cmap)

    # frontier status of prism quad faces
    frontier = set()
    for side, cls in face_class.items():
        if cls != CLASS_QUADFACE:
            continue
        other = cx.pairings[side][0]
        if face_class[other] == CLASS_VERTICAL:
            frontier.add(cx.pairing_id(side))
        else:
            assert face_class[other] == CLASS_QUADFACE

    # piece records
    for bkey in sorted(cx.blocks, key=skey):
        blk = cx.blocks[bkey]
        fl = []
        for fkey, face in blk.faces.items():
            if (bkey, fkey) in face_class:
                cls = face_class[(bkey, fkey)]
            elif face.tag and face.tag[0] == "Sv":
                cls = CLASS_SV
            else:
                cls = CLASS_S
            fl.append((fkey, cls))
        pieces.append(CutPiece(kind=_KIND_NAME[blk.kind], source_tet=bkey[0],
                               block=bkey, faces=sorted(fl, key=skey)))

    cc = CutComplex(tri=tri, vector=vec, cx=cx, pieces=pieces,
                    face_class=face_class, frontier=frontier, aug=tds)
    return cc.finalize()


def piece_census(cc):
    """(truncated tetrahedra, truncated prisms, product blocks)."""
    n = sum(1 for p in cc.pieces if p.kind == "TruncatedTet")
    m = sum(1 for p in cc.pieces if p.kind == "TruncatedPrism")
    prod = sum(1 for p in cc.pieces if p.kind == "ProductBlock")
    t = cc.tri.tet_count
    assert n <= t and m <= 2 * t
    return n, m, prod
