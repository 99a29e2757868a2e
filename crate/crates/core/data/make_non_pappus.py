"""Writes non_pappus.json: the nine lines of a Pappus configuration as great
circles, with the Pappus line bent by a small tent so that it misses the
third diagonal point. Run from this directory."""

import itertools
import json
import math

VERTICES = 64
BUMP = 0.003
TENT = 0.03


def cross(a, b):
    return [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def unit(v):
    n = math.sqrt(dot(v, v))
    return [x / n for x in v]


def point(x, y):
    return unit([x, y, 1.0])


def meet(l, m):
    p = unit(cross(l, m))
    return p if p[2] > 0 else [-x for x in p]


def circle(normal, start, bump=0.0):
    """Great circle from `start`; with a bump, the start vertex is lifted along
    the normal and flanked by vertices at angle +-TENT."""
    ea = unit([s - normal[i] * dot(normal, start) for i, s in enumerate(start)])
    eb = cross(normal, ea)
    angles = [2 * math.pi * k / VERTICES for k in range(VERTICES // 2)]
    if bump:
        angles = [0.0, TENT] + angles[1:] + [math.pi - TENT]
    half = []
    for t in angles:
        v = [math.cos(t) * a + math.sin(t) * b for a, b in zip(ea, eb)]
        if t == 0.0:
            v = unit([x + bump * n for x, n in zip(v, normal)])
        half.append(v)
    return half + [[-x for x in v] for v in half]


A = [point(-1.0, 0.0), point(0.2, 0.0), point(1.5, 0.0)]
B = [point(-1.3, 1.5), point(0.1, 1.5 - 0.7 * 1.4 / 2.7), point(1.4, 0.8)]
L1 = unit(cross(A[0], A[2]))
L2 = unit(cross(B[0], B[2]))
AB = {(i, j): unit(cross(A[i], B[j])) for i in range(3) for j in range(3) if i != j}
C = [meet(AB[(0, 1)], AB[(1, 0)]), meet(AB[(0, 2)], AB[(2, 0)]), meet(AB[(1, 2)], AB[(2, 1)])]
P = unit(cross(C[0], C[1]))
assert abs(dot(P, C[2])) < 1e-12, "Pappus line misses C3"

normals = [L1, L2] + [AB[k] for k in sorted(AB)] + [P]
curves = [circle(n, [1.0, 0.0, 0.0] if abs(n[0]) < 0.9 else [0.0, 1.0, 0.0]) for n in normals[:-1]]
curves.append(circle(P, C[2], BUMP))

# Separation diagnostics: every pairwise meeting point versus C3.
meets = [meet(a, b) for a, b in itertools.combinations(normals, 2)]
far = [m for m in meets if math.acos(min(1.0, abs(dot(m, C[2])))) > 1e-9]
gap = min(math.acos(min(1.0, abs(dot(m, C[2])))) for m in far)
assert gap > 2 * TENT, gap
for n in (AB[(1, 2)], AB[(2, 1)]):
    assert math.sin(math.acos(abs(dot(n, P)))) > 2 * BUMP / TENT

lines = ['{"n": %d, "symmetric": true, "elements": [' % len(curves)]
for k, c in enumerate(curves):
    vs = ",\n  ".join(json.dumps(v) for v in c)
    lines.append(' {"weight": 1.0, "vertices": [\n  %s]}%s' % (vs, "," if k + 1 < len(curves) else ""))
lines.append("]}")
with open("non_pappus.json", "w") as f:
    f.write("\n".join(lines) + "\n")
