#!/usr/bin/env python3
"""
Backtracking search for small closed orientable one-vertex triangulations.

Used to produce the gluing tables bundled under src/gidecomp/data/.  Run as

    python tools/find_triangulations.py T [LIMIT]

to print up to LIMIT distinct valid tables with T tetrahedra.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from gidecomp.triangulation import (
    ALL_PERMS, Triangulation, perm_inverse, perm_sign, validate,
    has_reversed_edge)


def search(t, limit):
    found = []
    slots = [(i, k) for i in range(t) for k in range(4)]
    gluings = [[None] * 4 for _ in range(t)]
    # orientation signs, fixed as we glue; sign[0] = +1
    sign = [0] * t
    sign[0] = 1

    def first_free():
        for s in slots:
            if gluings[s[0]][s[1]] is None:
                return s
        return None

    def rec():
        if len(found) >= limit:
            return
        slot = first_free()
        if slot is None:
            tri = Triangulation(tuple(tuple(row) for row in gluings))
            rep = validate(tri)
            if rep.ok() and not has_reversed_edge(tri):
                found.append(tri)
            return
        i, k = slot
        for j in range(t):
            for p in ALL_PERMS:
                k2 = p[k]
                if (j, k2) == (i, k):
                    continue
                if gluings[j][k2] is not None:
                    continue
                # orientation pruning: need sign_i * sign_j == -sign(p)
                s = perm_sign(p)
                if sign[j] != 0:
                    if sign[i] * sign[j] != -s:
                        continue
                    placed_sign = False
                else:
                    sign[j] = -s * sign[i]
                    placed_sign = True
                gluings[i][k] = (j, p)
                gluings[j][k2] = (i, perm_inverse(p))
                rec()
                gluings[i][k] = None
                gluings[j][k2] = None
                if placed_sign:
                    sign[j] = 0
                if len(found) >= limit:
                    return

    rec()
    return found


def main():
    t = int(sys.argv[1])
    limit = int(sys.argv[2]) if len(sys.argv) > 2 else 10
    seen = set()
    for tri in search(t, limit):
        text = tri.serialize()
        if text in seen:
            continue
        seen.add(text)
        print(text)


if __name__ == "__main__":
    main()
