"""Shared fixture builders for the test suite: axis-aligned cube complexes
glued by coordinate matching, plus a few derived shapes."""

from gidecomp.cells import BlockComplex, Face

UNIT = ((0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
        (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1))

# face name -> corner offsets (as indices into UNIT), consistent cycles
CUBE_FACES = {
    "z-": (0, 1, 2, 3),
    "z+": (4, 5, 6, 7),
    "y-": (0, 1, 5, 4),
    "y+": (3, 2, 6, 7),
    "x-": (0, 3, 7, 4),
    "x+": (1, 2, 6, 5),
}

AXIS_FACES = {0: ("x-", "x+"), 1: ("y-", "y+"), 2: ("z-", "z+")}


def cube_corners(pos):
    x, y, z = pos
    return [(x + dx, y + dy, z + dz) for (dx, dy, dz) in UNIT]


def cube_faces(pos, tag=None):
    corners = cube_corners(pos)
    return [Face((name,), tuple(corners[i] for i in idx), tag)
            for name, idx in CUBE_FACES.items()]


def cube_complex(positions, kind="cube"):
    """A complex of unit cubes at integer positions, adjacent faces glued
    by coordinate identity."""
    cx = BlockComplex()
    pset = set(positions)
    for pos in sorted(pset):
        cx.add_block(pos, kind, cube_faces(pos))
    for pos in sorted(pset):
        x, y, z = pos
        for axis, delta in ((0, 1), (1, 1), (2, 1)):
            nbr = list(pos)
            nbr[axis] += delta
            nbr = tuple(nbr)
            if nbr not in pset:
                continue
            f1 = (AXIS_FACES[axis][1],)
            f2 = (AXIS_FACES[axis][0],)
            cyc = cx.blocks[pos].faces[f1].cycle
            cx.pair((pos, f1), (nbr, f2), {c: c for c in cyc})
    return cx


def ring_positions(n=4):
    """Positions of an n-cube ring around a hole (n must be 4: a 2x2 ring
    missing its center needs 8; we use the 8-cube ring of a 3x3 square
    minus center, which is a solid torus)."""
    ring = [(x, y, 0) for x in range(3) for y in range(3) if (x, y) != (1, 1)]
    return ring


def solid_torus_complex():
    return cube_complex(ring_positions())


def ball_complex():
    return cube_complex([(0, 0, 0)])
