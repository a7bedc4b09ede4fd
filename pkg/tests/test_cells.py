"""Exercises the block-complex machinery on unambiguous shapes."""

import random

import pytest

from gidecomp.cells import (BlockComplex, Face, apply_specs, build_prism_spec,
                            collapse_type, cone_cap_spec, prism_self_pairs,
                            signature_of)
from helpers import ball_complex, cube_faces, solid_torus_complex


def homology_ranks(sub, rel=()):
    return [h[0] for h in sub.homology(rel)]


def homology_torsion(sub, rel=()):
    return [h[1] for h in sub.homology(rel)]


def check_dd_zero(sub):
    q = sub.quotient()
    m = q.chain_matrices()
    # d1 . d2 == 0
    for j in range(m["n2"]):
        for i in range(m["n0"]):
            s = sum(m["d1"][i][k] * m["d2"][k][j] for k in range(m["n1"]))
            assert s == 0
    # d2 . d3 == 0
    for j in range(m["n3"]):
        for i in range(m["n1"]):
            s = sum(m["d2"][i][k] * m["d3"][k][j] for k in range(m["n2"]))
            assert s == 0


def test_single_cube_is_a_ball():
    cx = ball_complex()
    sub = cx.subcomplex()
    q = sub.quotient()
    assert (len(q.v_index), len(q.e_index), len(q.c2_keys), len(q.b_keys)) == \
        (8, 12, 6, 1)
    assert homology_ranks(sub) == [1, 0, 0, 0]
    assert homology_torsion(sub) == [[], [], [], []]
    check_dd_zero(sub)
    surf = sub.boundary_surface()
    assert len(surf.components) == 1
    comp = surf.components[0]
    assert comp.euler_char == 2 and comp.orientable
    assert collapse_type(sub) == "ball"


def test_two_cubes_still_a_ball():
    from helpers import cube_complex
    cx = cube_complex([(0, 0, 0), (1, 0, 0)])
    sub = cx.subcomplex()
    assert homology_ranks(sub) == [1, 0, 0, 0]
    assert collapse_type(sub) == "ball"
    assert sub.quotient().euler_characteristic() if hasattr(
        sub.quotient(), "euler_characteristic") else True


def test_cube_ring_is_a_solid_torus():
    cx = solid_torus_complex()
    sub = cx.subcomplex()
    assert homology_ranks(sub) == [1, 1, 0, 0]
    assert homology_torsion(sub)[1] == []
    check_dd_zero(sub)
    surf = sub.boundary_surface()
    assert len(surf.components) == 1
    comp = surf.components[0]
    assert comp.euler_char == 0 and comp.orientable
    assert collapse_type(sub) == "solid_torus"


def test_relative_homology_ball_rel_boundary():
    cx = ball_complex()
    sub = cx.subcomplex()
    q = sub.quotient()
    rel = [k for k, c in q.cells2.items() if c.boundary]
    ranks = homology_ranks(sub, rel)
    assert ranks == [0, 0, 0, 1]


def test_relative_euler_alternating_sum():
    cx = solid_torus_complex()
    sub = cx.subcomplex()
    q = sub.quotient()
    rel = [k for k, c in q.cells2.items() if c.boundary]
    ranks = homology_ranks(sub, rel)
    n0, n1, n2, n3 = q.cell_counts(rel)
    lhs = ranks[0] - ranks[1] + ranks[2] - ranks[3]
    # torsion does not affect the alternating sum
    assert lhs == n0 - n1 + n2 - n3


def test_cone_cap_fills_sphere():
    cx = solid_torus_complex()
    # cap the boundary of a single cube inside a fresh complex
    cx = ball_complex()
    sub = cx.subcomplex()
    surf = sub.boundary_surface()
    blocks, pairs = cone_cap_spec(surf, surf.components[0], ("cap", 0))
    capped = apply_specs(cx, blocks, pairs)
    sub2 = capped.subcomplex()
    ranks = homology_ranks(sub2)
    # ball + cone over its boundary sphere = S^3
    assert ranks == [1, 0, 0, 1]
    assert not sub2.boundary_sides()
    check_dd_zero(sub2)


def test_punctured_torus_times_interval():
    word = [("x", 1), ("y", 1), ("x", -1), ("y", -1),
            ("c0", 1), ("c1", 1), ("c2", 1)]
    spec = build_prism_spec(("tstar",), word)
    cx = BlockComplex()
    cx.add_block(*spec)
    for s1, s2, cmap in prism_self_pairs(("tstar",), word):
        cx.pair(s1, s2, cmap)
    sub = cx.subcomplex()
    assert homology_ranks(sub) == [1, 2, 0, 0]
    assert homology_torsion(sub)[1] == []
    surf = sub.boundary_surface()
    # boundary = double of punctured torus along the annulus: genus 2
    assert len(surf.components) == 1
    assert surf.components[0].euler_char == -2
    assert surf.components[0].orientable
    check_dd_zero(sub)


def test_signature_invariant_under_relabeling():
    cx = solid_torus_complex()
    sig = signature_of(cx.subcomplex())

    # relabel blocks with shuffled names
    rng = random.Random(7)
    keys = list(cx.blocks)
    new_names = {k: ("blk", i) for i, k in enumerate(rng.sample(keys, len(keys)))}
    cx2 = BlockComplex()
    for k in keys:
        b = cx.blocks[k]
        cx2.add_block(new_names[k], b.kind,
                      [Face(f.key, f.cycle, f.tag) for f in b.faces.values()])
    done = set()
    for side, (other, cmap) in cx.pairings.items():
        pid = cx.pairing_id(side)
        if pid in done:
            continue
        done.add(pid)
        cx2.pair((new_names[side[0]], side[1]), (new_names[other[0]], other[1]),
                 cmap)
    assert signature_of(cx2.subcomplex()) == sig


def test_signature_distinguishes_ball_from_solid_torus():
    assert signature_of(ball_complex().subcomplex()) != \
        signature_of(solid_torus_complex().subcomplex())


def test_signature_stable():
    sig1 = signature_of(ball_complex().subcomplex())
    sig2 = signature_of(ball_complex().subcomplex())
    assert sig1 == sig2 and len(sig1) == 20


def test_severed_pairing_doubles_boundary():
    from helpers import cube_complex
    cx = cube_complex([(0, 0, 0), (1, 0, 0)])
    pid = cx.pairing_id(((0, 0, 0), ("x+",)))
    sub = cx.subcomplex(severed=[pid])
    # severing the middle face gives two separate balls
    ranks = homology_ranks(sub)
    assert ranks == [2, 0, 0, 0]
    surf = sub.boundary_surface()
    assert sorted(c.euler_char for c in surf.components) == [2, 2]
