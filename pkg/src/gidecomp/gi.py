"""
Guts / I-bundle decompositions of a cut complex.

The first approximation glues non-product pieces along hexagonal and
non-frontier quadrilateral faces (guts) and product blocks along their
vertical faces (I-bundles); the frontier cells chain into the pattern
annuli.  Absorption then eliminates tiny patterned pieces (balls, solid
tori, annulus-times-interval, possibly punctured) until none remain,
strictly decreasing the annulus count, and finally the vertex ball is
plugged back in.

Piece recognition is conservative: homology screens plus an explicit
free-face collapse certificate.  Candidates that pass the screens but do
not collapse are reported as `unknown` and never absorbed.
"""

from dataclasses import dataclass, field

from .cells import (BlockComplex, _DSU, _SignedDSU, apply_specs,
                    build_prism_spec, collapse_type, cone_cap_spec,
                    prism_self_pairs, signature_of, skey)
from .cut import CLASS_QUADFACE, CLASS_VERTICAL, cut_along, piece_census
from .normal import build_surface, enumerate_admissible

GUTS_KINDS = ("guts", "pseudo_guts")
IB_KINDS = ("ibundle", "pseudo_ibundle")


@dataclass
class IBundleDescriptor:
    base_euler: int
    base_orientable: bool
    twisted: bool
    base_boundary_circles: int
    vertical_boundary_annuli: int


@dataclass
class Annulus:
    index: int
    cells: tuple      # pairing ids, in cyclic order around the annulus


@dataclass
class Piece:
    index: int
    kind: str         # guts | ibundle | pseudo_guts | pseudo_ibundle
    blocks: frozenset
    descriptor: object = None
    capped: tuple = ()     # cone block keys added at ball plugging


@dataclass
class BoundaryPiece:
    euler_char: int
    orientable: bool
    contains_sv: bool
    annuli: tuple


@dataclass
class PatternedManifold:
    piece: Piece
    cells: tuple                    # block keys
    pattern_annuli: tuple           # Annulus records incident to the piece
    boundary_inventory: tuple       # BoundaryPiece records
    homology: tuple                 # ((rank, torsion) for H0..H3)
    subcomplex: object


class GIDecomposition:
    def __init__(self, cx, pieces, annuli, stage, source=None,
                 sv_unplugged=False):
        self.cx = cx
        self.pieces = list(pieces)
        self.annuli = list(annuli)
        self.stage = stage
        self.source = source       # the CutComplex, if any
        self.sv_unplugged = sv_unplugged
        self.piece_of_block = {}
        for p in self.pieces:
            for b in p.blocks:
                self.piece_of_block[b] = p.index

    # -- structure ----------------------------------------------------------

    def annulus_sides(self, a):
        """(piece index, piece index) on the two sides of an annulus; the
        pair is sorted and may be equal."""
        sides = set()
        for pid in a.cells:
            s1, s2 = pid
            sides.add((self.piece_of_block[s1[0]], self.piece_of_block[s2[0]]))
        pair = {x for s in sides for x in s}
        if len(pair) > 2:
            raise ValueError("inconsistent annulus sides (upstream bug)")
        lo = min(pair)
        hi = max(pair)
        return (lo, hi)

    def annuli_of_piece(self, idx):
        out = []
        for a in self.annuli:
            lo, hi = self.annulus_sides(a)
            if idx in (lo, hi):
                out.append(a.index)
        return out

    def _pattern_tags(self):
        tags = {}
        for a in self.annuli:
            for pid in a.cells:
                for side in pid:
                    tags[side] = ("pattern", a.index)
        return tags

    def piece_subcomplex(self, idx, extra_blocks=()):
        p = self.pieces[idx]
        severed = set()
        for a in self.annuli:
            if idx in self.annulus_sides(a):
                severed.update(self.cx.pairing_id(s)
                               for pid in a.cells for s in pid)
        return self.cx.subcomplex(set(p.blocks) | set(extra_blocks),
                                  severed, self._pattern_tags())

    def patterned(self, idx):
        """The PatternedManifold view of one piece."""
        p = self.pieces[idx]
        sub = self.piece_subcomplex(idx)
        surf = sub.boundary_surface()
        inventory = tuple(
            BoundaryPiece(euler_char=c.euler_char, orientable=c.orientable,
                          contains_sv="Sv" in c.tags,
                          annuli=tuple(sorted(c.annuli)))
            for c in surf.components)
        ann = tuple(a for a in self.annuli
                    if idx in self.annulus_sides(a))
        hom = tuple(sub.homology())
        return PatternedManifold(piece=p, cells=tuple(sorted(p.blocks, key=skey)),
                                 pattern_annuli=ann, boundary_inventory=inventory,
                                 homology=hom, subcomplex=sub)

    def guts_pieces(self):
        return [p for p in self.pieces if p.kind in GUTS_KINDS]

    def ibundle_pieces(self):
        return [p for p in self.pieces if p.kind in IB_KINDS]


def signature(dec, piece_idx):
    """Canonical combinatorial-type string of one piece (with its pattern
    marks), invariant under relabeling of cells."""
    return dec.piece_subcomplex(piece_idx).signature()


# ---------------------------------------------------------------------------
# First approximation.


def _is_segment_pair(c1, c2):
    """True if two cut-complex corner keys lie on the same tetrahedron
    edge at consecutive positions (a fiber segment)."""
    return (len(c1) == 6 and len(c2) == 6 and c1[0] == c2[0]
            and c1[1] == "p" and c2[1] == "p"
            and c1[2:4] == c2[2:4] and abs(c1[4] - c2[4]) == 1)


def _fiber_slots(surface, face_set, side):
    """Slot positions of `side` whose surface partner is another face of
    the same annulus family (the fiber sides of an annulus cell)."""
    cyc = surface.faces[side].cycle
    return [i for i in range(len(cyc))
            if surface.slot_pairs[(side, i)][0][0] in face_set]


def _chain_cycles(surface, face_set):
    """Partition annulus faces into cyclic chains along their fiber sides."""
    cycles = []
    visited = set()
    for start in sorted(face_set, key=skey):
        if start in visited:
            continue
        vs = _fiber_slots(surface, face_set, start)
        if len(vs) != 2:
            raise ValueError("annulus face without exactly two fiber sides")
        cycle = [start]
        visited.add(start)
        (cur, cpos), _ = surface.slot_pairs[(start, vs[1])]
        while cur != start:
            if cur not in face_set or cur in visited:
                raise ValueError("annulus walk left its face family")
            cycle.append(cur)
            visited.add(cur)
            vs2 = _fiber_slots(surface, face_set, cur)
            if len(vs2) != 2 or cpos not in vs2:
                raise ValueError("annulus walk met a bad fiber side")
            out = vs2[0] if vs2[1] == cpos else vs2[1]
            (cur, cpos), _ = surface.slot_pairs[(cur, out)]
        cycles.append(cycle)
    return cycles


def _vertical_eps(cc, block, fkey):
    """+1 if the block's canonical fiber direction agrees with increasing
    arc position in this vertical face's slot."""
    if block[1] == "tb":
        return 1
    assert block[1] == "qb"
    _r, _k, rid = fkey
    v = rid[1]
    td = cc.aug[block[0]]
    return 1 if v in td.A else -1


def assemble_first(cc):
    """The first-approximation decomposition of a cut complex."""
    cx = cc.cx
    products = [b for b in cx.blocks if cx.blocks[b].kind in
                ("tri_block", "quad_block")]
    solids = [b for b in cx.blocks if b not in set(products)]

    guts_dsu = _DSU()
    for b in solids:
        guts_dsu.find(b)
    ib_dsu = _DSU()
    for b in products:
        ib_dsu.find(b)

    for pid in cx.all_pairing_ids():
        side1, side2 = pid
        cls1 = cc.face_class.get(side1)
        cls2 = cc.face_class.get(side2)
        if cls1 is None or cls2 is None:
            continue
        if pid in cc.frontier:
            continue
        if cls1 == CLASS_VERTICAL and cls2 == CLASS_VERTICAL:
            ib_dsu.union(side1[0], side2[0])
        elif cls1 != CLASS_VERTICAL and cls2 != CLASS_VERTICAL:
            guts_dsu.union(side1[0], side2[0])
        else:
            raise ValueError("vertical face glued to a non-frontier "
                             "solid face (upstream bug)")

    pieces = []
    comp_index = {}
    for dsu, kind in ((guts_dsu, "guts"), (ib_dsu, "ibundle")):
        groups = {}
        for b in dsu.parent:
            groups.setdefault(dsu.find(b), []).append(b)
        for root in sorted(groups, key=skey):
            idx = len(pieces)
            pieces.append(Piece(index=idx, kind=kind,
                                blocks=frozenset(groups[root])))
            for b in groups[root]:
                comp_index[b] = idx

    # Frontier cells chain into annuli via their fiber segments.
    frontier_sides = {}
    for pid in sorted(cc.frontier, key=skey):
        for side in pid:
            if cc.face_class.get(side) == CLASS_VERTICAL:
                frontier_sides[side] = pid

    annuli = []
    visited = set()
    for start in sorted(frontier_sides, key=skey):
        if start in visited:
            continue
        cycle = _chain_frontier(cc, frontier_sides, start)
        visited.update(cycle)
        annuli.append(Annulus(index=len(annuli),
                              cells=tuple(frontier_sides[s] for s in cycle)))

    # I-bundle descriptors
    dec = GIDecomposition(cx, pieces, annuli, "FirstApprox", source=cc)
    for p in dec.pieces:
        if p.kind == "ibundle":
            p.descriptor = _ibundle_descriptor(cc, dec, p)
    return dec


def _vertical_slots(cx, side):
    """Positions in the face cycle that are fiber segments."""
    cyc = cx.blocks[side[0]].faces[side[1]].cycle
    out = []
    for i in range(len(cyc)):
        if _is_segment_pair(cyc[i], cyc[(i + 1) % len(cyc)]):
            out.append(i)
    return out


def _chain_frontier(cc, frontier_sides, start):
    """Cycle of product-side frontier faces through shared fiber segments."""
    cx = cc.cx
    sub_ib = cx.subcomplex(
        {b for b in cx.blocks
         if cx.blocks[b].kind in ("tri_block", "quad_block")})
    surf = sub_ib.boundary_surface()
    cycle = [start]
    slots = _vertical_slots(cx, start)
    assert len(slots) == 2, "frontier face without two fiber sides"
    prev_slot = (start, slots[0])
    cur = surf.slot_pairs[prev_slot][0]
    while cur[0] != start or cur[0] in ():
        if cur[0] == start:
            break
        side = cur[0]
        assert side in frontier_sides, "annulus walk left the frontier"
        cycle.append(side)
        s2 = _vertical_slots(cx, side)
        nxt = s2[0] if s2[1] == cur[1] else s2[1]
        cur = surf.slot_pairs[(side, nxt)][0]
    return cycle


def _ibundle_descriptor(cc, dec, piece):
    cx = cc.cx
    sub = cx.subcomplex(piece.blocks)
    q = sub.quotient()

    fibers = set()
    vertical_cells = set()
    verticals = []
    for b in sorted(piece.blocks, key=skey):
        for fk in cx.blocks[b].faces:
            if cc.face_class.get((b, fk)) == CLASS_VERTICAL:
                verticals.append((b, fk))
                vertical_cells.add(q.cell2_of_side.get((b, fk), (b, fk)))
                cyc = cx.blocks[b].faces[fk].cycle
                for i in range(len(cyc)):
                    u, v = cyc[i], cyc[(i + 1) % len(cyc)]
                    if _is_segment_pair(u, v):
                        idx, _ = q.edge_class(b, u, v)
                        fibers.add(idx)

    n_blocks = len(piece.blocks)
    chi = len(fibers) - len(vertical_cells) + n_blocks

    # fiber-direction parity: twisted iff inconsistent
    par = _SignedDSU()
    twisted = False
    for b in piece.blocks:
        par.find(b)
    seen = set()
    for (b, fk) in verticals:
        pid = cx.pairing_id((b, fk))
        if pid in seen or pid in cc.frontier:
            continue
        seen.add(pid)
        (b2, fk2) = cx.pairings[(b, fk)][0]
        rel = _vertical_eps(cc, b, fk) * _vertical_eps(cc, b2, fk2)
        if not par.union(b, b2, rel):
            twisted = True

    circles = len([a for a in dec.annuli
                   if any(dec.piece_of_block[s[0]] == piece.index
                          for pid in a.cells for s in pid)])
    return IBundleDescriptor(base_euler=chi,
                             base_orientable=not twisted,
                             twisted=twisted,
                             base_boundary_circles=circles,
                             vertical_boundary_annuli=circles)


# ---------------------------------------------------------------------------
# Tiny-piece detection and absorption.


@dataclass
class TinyCandidate:
    pieces: frozenset        # piece indices forming the candidate P
    pattern: frozenset       # annulus indices separating P
    tiny_type: str           # 'i' | 'ii' | 'iii' | 'unknown'


def _graph_components(dec, removed):
    dsu = _DSU()
    for p in dec.pieces:
        dsu.find(p.index)
    for a in dec.annuli:
        if a.index in removed:
            continue
        lo, hi = dec.annulus_sides(a)
        dsu.union(lo, hi)
    groups = {}
    for p in dec.pieces:
        groups.setdefault(dsu.find(p.index), set()).add(p.index)
    return list(groups.values())


def _candidate_sets(dec):
    """Piece sets separated off by one annulus or a pair of annuli."""
    out = {}
    m = len(dec.annuli)
    singles = [frozenset((a.index,)) for a in dec.annuli]
    pairs = [frozenset((dec.annuli[i].index, dec.annuli[j].index))
             for i in range(m) for j in range(i + 1, m)]
    for removed in singles + pairs:
        comps = _graph_components(dec, removed)
        if len(comps) < 2:
            continue
        for comp in comps:
            cob = set()
            for a in dec.annuli:
                lo, hi = dec.annulus_sides(a)
                if (lo in comp) != (hi in comp):
                    cob.add(a.index)
            if cob == set(removed):
                out[(frozenset(comp), removed)] = None
    return sorted(out, key=lambda k: (sorted(k[1]), sorted(k[0])))


def _annulus_strip(sub, faces):
    """Order the given annulus faces (sides in `sub`) into a cyclic strip.

    Returns a list of (side, bottom directed local edge) pairs whose
    bottom edges chain into one boundary circle of the annulus."""
    surf = sub.boundary_surface()
    cx = sub.cx
    face_set = set(faces)

    def vertical_positions(side):
        cyc = cx.blocks[side[0]].faces[side[1]].cycle
        n = len(cyc)
        out = [i for i in range(n)
               if surf.slot_pairs[(side, i)][0][0] in face_set]
        return out, n

    start = min(face_set, key=skey)
    vps, n = vertical_positions(start)
    if len(vps) != 2:
        raise ValueError("annulus face without exactly two fiber sides")
    entry, exit_ = vps[0], vps[1]
    # bottom = the horizontal slot adjacent to both verticals, chosen
    # deterministically as (entry + 1) if that slot is horizontal
    out = []
    side = start
    for _ in range(len(face_set) + 1):
        cyc = cx.blocks[side[0]].faces[side[1]].cycle
        n = len(cyc)
        # horizontal slot between entry and exit: candidates are the two
        # slots not in {entry, exit}; pick the one incident to corner of
        # entry's head
        entry_head = (entry + 1) % n
        if entry_head == exit_:
            # entry and exit adjacent: quad has slots entry, exit adjacent;
            # bottom = slot after exit
            bottom = (exit_ + 1) % n
            bdir = (cyc[(bottom + 1) % n], cyc[bottom])
            shared_exit = (exit_ + 1) % n  # corner shared bottom/exit
        else:
            bottom = entry_head
            bdir = (cyc[bottom], cyc[(bottom + 1) % n])
        out.append((side, (side[0],) + ( (bdir[0], bdir[1]) )))
        # cross the exit vertical
        (nside, npos), same = surf.slot_pairs[(side, exit_)]
        if nside == faces[0] and len(out) == len(face_set):
            break
        nvps, nn = vertical_positions(nside)
        assert npos in nvps
        entry = npos
        exit_ = nvps[0] if nvps[1] == npos else nvps[1]
        side = nside
        if side == start and len(out) >= len(face_set):
            break
    if len(out) != len(face_set):
        raise ValueError("annulus strip walk failed to close")
    return out


def _annulus_circle_chain(sub, faces):
    """A 1-chain tracing one boundary circle of the annulus, as a dict
    over quotient 1-cell indices (isotopic to the annulus core)."""
    q = sub.quotient()
    strip = _annulus_strip(sub, sorted(faces, key=skey))
    edges = []
    for side, d in strip:
        bk = side[0]
        u, v = d[1], d[2]
        edges.append((bk, u, v))
    return q.chain_of_edge_path(edges)


def _classify_candidate(dec, piece_set, pattern):
    cx = dec.cx
    blocks = set()
    for idx in piece_set:
        blocks |= dec.pieces[idx].blocks
    severed = set()
    for a in dec.annuli:
        if a.index in pattern:
            severed.update(cx.pairing_id(s) for pid in a.cells for s in pid)
    sub = cx.subcomplex(blocks, severed, dec._pattern_tags())
    surf = sub.boundary_surface()

    sv_spheres = [c for c in surf.components if c.all_sv() and c.is_sphere()]
    pattern_comps = [c for c in surf.components if c.annuli]
    rest = [c for c in surf.components
            if c not in sv_spheres and c not in pattern_comps]
    if rest or len(sv_spheres) > 1 or len(pattern_comps) != 1:
        return None
    pc = pattern_comps[0]
    if pc.annuli != set(pattern):
        return None
    npat = len(pattern)
    if npat == 1 and not (pc.euler_char == 2 and pc.orientable):
        return None
    if npat == 2 and not (pc.euler_char == 0 and pc.orientable):
        return None
    if npat == 1 and pc.euler_char == 2:
        want = "i"
    elif pc.euler_char == 0 and pc.orientable:
        want = "ii" if npat == 1 else "iii"
    else:
        return None

    # cap an Sv puncture before the homology screens
    sub2 = sub
    if sv_spheres:
        specs = cone_cap_spec(surf, sv_spheres[0], ("tinycap",) +
                              tuple(sorted(piece_set)))
        cx2 = apply_specs(cx, *specs)
        capblocks = {b[0] for b in specs[0]}
        sub2 = cx2.subcomplex(blocks | capblocks, severed, dec._pattern_tags())

    hom = sub2.homology()
    if hom[0] != (1, []):
        return None
    if want == "i":
        if hom[1] != (0, []) or hom[2] != (0, []):
            return None
    else:
        if hom[1] != (1, []) or hom[2] != (0, []):
            return None
        # each pattern annulus core must generate H1
        for a in dec.annuli:
            if a.index not in pattern:
                continue
            faces = [s for pid in a.cells for s in pid if s[0] in blocks]
            chain = _annulus_circle_chain(sub2, faces)
            if not sub2.quotient().quotient_kills_h1([chain]):
                return None

    ctype = collapse_type(sub2)
    if want == "i" and ctype == "ball":
        return "i"
    if want in ("ii", "iii") and ctype == "solid_torus":
        return want
    return "unknown"


def detect_tiny(dec):
    """Conservative tiny-piece recognizer; candidates are the patterned
    submanifolds separated off by one or two annuli."""
    out = []
    for piece_set, pattern in _candidate_sets(dec):
        res = _classify_candidate(dec, piece_set, pattern)
        if res is not None:
            out.append(TinyCandidate(pieces=piece_set, pattern=pattern,
                                     tiny_type=res))
    return out


def _eliminate(dec, cand):
    """Absorb one tiny candidate into its neighbors."""
    neighbors = set()
    for a in dec.annuli:
        if a.index in cand.pattern:
            lo, hi = dec.annulus_sides(a)
            neighbors.update(x for x in (lo, hi) if x not in cand.pieces)
    assert neighbors, "tiny candidate with no neighbor"
    merged = set(cand.pieces) | neighbors

    dead_annuli = set(cand.pattern)
    for a in dec.annuli:
        lo, hi = dec.annulus_sides(a)
        if lo in cand.pieces and hi in cand.pieces:
            dead_annuli.add(a.index)

    nkinds = {dec.pieces[i].kind for i in neighbors}
    if nkinds <= set(IB_KINDS):
        kind = "pseudo_ibundle"
    else:
        kind = "pseudo_guts"

    blocks = set()
    for i in merged:
        blocks |= dec.pieces[i].blocks

    new_pieces = []
    for p in sorted(dec.pieces, key=lambda p: skey(min(p.blocks, key=skey))):
        if p.index in merged:
            continue
        new_pieces.append(Piece(index=len(new_pieces), kind=p.kind,
                                blocks=p.blocks, descriptor=p.descriptor,
                                capped=p.capped))
    new_pieces.append(Piece(index=len(new_pieces), kind=kind,
                            blocks=frozenset(blocks)))

    new_annuli = []
    for a in sorted(dec.annuli, key=lambda a: a.index):
        if a.index in dead_annuli:
            continue
        new_annuli.append(Annulus(index=len(new_annuli), cells=a.cells))
    assert len(new_annuli) < len(dec.annuli), \
        "annulus count did not decrease during absorption"
    return GIDecomposition(dec.cx, new_pieces, new_annuli, "FirstApprox",
                           source=dec.source)


def absorb(dec, trace=None):
    """Run the absorption to its fixed point, then plug the vertex ball.

    `trace`, if given, collects the annulus counts after each elimination
    (strictly decreasing)."""
    if dec.stage != "FirstApprox":
        raise ValueError("absorb expects a first-approximation decomposition")
    cur = dec
    while True:
        cands = [c for c in detect_tiny(cur) if c.tiny_type != "unknown"]
        if not cands:
            break
        def cand_key(c):
            blocks = set()
            for i in c.pieces:
                blocks |= cur.pieces[i].blocks
            severed = set()
            for a in cur.annuli:
                if a.index in c.pattern:
                    severed.update(cur.cx.pairing_id(s)
                                   for pid in a.cells for s in pid)
            sig = cur.cx.subcomplex(blocks, severed,
                                    cur._pattern_tags()).signature()
            return (sig, sorted(c.pattern), sorted(c.pieces))
        pick = min(cands, key=cand_key)
        cur = _eliminate(cur, pick)
        if trace is not None:
            trace.append(len(cur.annuli))
    absorbed = GIDecomposition(cur.cx, cur.pieces, cur.annuli, "Absorbed",
                               source=cur.source)
    return _plug_ball(absorbed)


def _plug_ball(dec):
    """Cap every all-Sv boundary sphere of every piece with a cone."""
    cx = dec.cx
    new_pieces = [Piece(index=p.index, kind=p.kind, blocks=p.blocks,
                        descriptor=p.descriptor, capped=p.capped)
                  for p in dec.pieces]
    sv_seen = False
    sv_unplugged = False
    for p in dec.pieces:
        sub = dec.piece_subcomplex(p.index)
        surf = sub.boundary_surface()
        for ci, comp in enumerate(surf.components):
            if "Sv" in comp.tags and not comp.all_sv():
                sv_unplugged = True
            if comp.all_sv() and comp.is_sphere():
                sv_seen = True
                specs = cone_cap_spec(surf, comp, ("plug", p.index, ci))
                cx = apply_specs(cx, *specs)
                capkeys = tuple(b[0] for b in specs[0])
                np_ = new_pieces[p.index]
                new_pieces[p.index] = Piece(
                    index=p.index, kind=np_.kind,
                    blocks=np_.blocks | frozenset(capkeys),
                    descriptor=np_.descriptor,
                    capped=np_.capped + capkeys)
    return GIDecomposition(cx, new_pieces, dec.annuli, "BallPlugged",
                           source=dec.source, sv_unplugged=sv_unplugged)


# ---------------------------------------------------------------------------
# Punctured-torus capping (the boundary-irreducible companion object).


def cap_with_punctured_tori(dec, piece_idx):
    """Glue a punctured-torus-times-interval prism to every pattern
    annulus of a guts piece; returns the capped Subcomplex."""
    if dec.stage != "BallPlugged":
        raise ValueError("capping expects a ball-plugged decomposition")
    sub = dec.piece_subcomplex(piece_idx)
    cx = dec.cx
    blocks = set(dec.pieces[piece_idx].blocks)
    severed = set(sub.severed)
    tags = dict(sub.extra_tags)

    strips = {}
    surf = sub.boundary_surface()
    for comp in surf.components:
        for a_idx in comp.annuli:
            faces = [f.side for f in comp.faces
                     if f.tag and f.tag[0] == "pattern" and f.tag[1] == a_idx]
            strips.setdefault(a_idx, []).extend(faces)

    cur = cx
    new_blocks = set()
    for a_idx in sorted(strips):
        faces = sorted(set(strips[a_idx]), key=skey)
        groups = _strip_groups(sub, faces)
        for gi_, group in enumerate(groups):
            strip = _annulus_strip(sub, group)
            m = len(strip)
            word = ([("x", 1), ("y", 1), ("x", -1), ("y", -1)]
                    + [(("c", j), 1) for j in range(m)])
            key = ("tstar", piece_idx, a_idx, gi_)
            spec = build_prism_spec(key, word)
            pairs = prism_self_pairs(key, word)
            cur = apply_specs(cur, [spec], pairs)
            new_blocks.add(key)
            # glue the c-quads to the strip cells
            sp = cur
            for j, (side, bottom) in enumerate(strip):
                edge_idx = 4 + j
                n = len(word)
                cyc = cur.blocks[side[0]].faces[side[1]].cycle
                frame = _face_frame(cur, side, bottom)
                cmap = {("t", edge_idx): frame[3],
                        ("t", (edge_idx + 1) % n): frame[2],
                        ("u", (edge_idx + 1) % n): frame[1],
                        ("u", edge_idx): frame[0]}
                pid = cur.pairing_id if False else None
                cur.pair((key, ("s", edge_idx)), side, cmap)
                severed.discard(tuple(sorted(((key, ("s", edge_idx)), side),
                                             key=skey)))
    return cur.subcomplex(blocks | new_blocks, severed, tags)


def _strip_groups(sub, faces):
    """Group annulus faces into connected strips (a severed annulus shows
    both sides; each side is its own strip)."""
    surf = sub.boundary_surface()
    face_set = set(faces)
    dsu = _DSU()
    for f in faces:
        dsu.find(f)
    for f in faces:
        cyc = sub.cx.blocks[f[0]].faces[f[1]].cycle
        for i in range(len(cyc)):
            (g, _), _same = surf.slot_pairs[(f, i)]
            if g in face_set and g != f:
                dsu.union(f, g)
    groups = {}
    for f in faces:
        groups.setdefault(dsu.find(f), []).append(f)
    return [sorted(g, key=skey) for g in
            sorted(groups.values(), key=lambda g: skey(min(g, key=skey)))]


def _face_frame(cx, side, bottom):
    """(bl, br, tr, tl) corners of a quad face given its directed bottom
    edge (block, u, v)."""
    cyc = cx.blocks[side[0]].faces[side[1]].cycle
    n = len(cyc)
    u, v = bottom[1], bottom[2]
    pos = {c: i for i, c in enumerate(cyc)}
    iu, iv = pos[u], pos[v]
    if (iu + 1) % n == iv:
        order = [cyc[(iu + k) % n] for k in range(n)]
    else:
        assert (iv + 1) % n == iu
        order = [cyc[(iu - k) % n] for k in range(n)]
    # order = [bl, br, tr, tl]
    return order


# ---------------------------------------------------------------------------
# Catalog.


@dataclass
class CatalogEntry:
    signature: str
    count: int
    example_blocks: int


@dataclass
class CatalogResult:
    entries: list               # CatalogEntry, sorted by signature
    surfaces_total: int
    surfaces_used: int
    surfaces_one_sided: int
    bound: int

    def distinct(self):
        return len(self.entries)


def catalog(tri, bound, bits_limit=None):
    """Guts signatures over all admissible vectors with coordinates up to
    `bound`; the distinct count is checked against 5^t."""
    kwargs = {}
    if bits_limit is not None:
        kwargs["bits_limit"] = bits_limit
    vectors = enumerate_admissible(tri, bound, **kwargs)
    sigs = {}
    used = 0
    one_sided = 0
    for vec in vectors:
        if any(vec.coords) and not build_surface(tri, vec).is_two_sided():
            one_sided += 1
            continue
        used += 1
        dec = absorb(assemble_first(cut_along(tri, vec)))
        for p in dec.guts_pieces():
            sig = signature(dec, p.index)
            if sig not in sigs:
                sigs[sig] = [0, len(p.blocks)]
            sigs[sig][0] += 1
    limit = 5 ** tri.tet_count
    assert len(sigs) <= limit, "catalog exceeded the 5^t bound"
    entries = [CatalogEntry(signature=s, count=c[0], example_blocks=c[1])
               for s, c in sorted(sigs.items())]
    return CatalogResult(entries=entries, surfaces_total=len(vectors),
                         surfaces_used=used, surfaces_one_sided=one_sided,
                         bound=limit)
