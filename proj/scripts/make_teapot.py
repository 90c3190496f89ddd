#!/usr/bin/env python3
"""Generates assets/teapot.obj: a lathe-body teapot-like fixture with a bent
spout, a handle and a lid, split into two usemtl groups (body, lid)."""
import math

verts = []
norms = []
faces = []  # (material, [(vi, ni), ...])


def add_vert(p, n):
    verts.append(p)
    ln = math.sqrt(sum(c * c for c in n)) or 1.0
    norms.append(tuple(c / ln for c in n))
    return len(verts)  # 1-based


def add_quad(mat, a, b, c, d):
    faces.append((mat, [a, b, c]))
    faces.append((mat, [a, c, d]))


def lathe(profile, segments, mat):
    """profile: list of (radius, y, (nr, ny)) rows; revolve around +Y."""
    rows = []
    for r, y, (nr, ny) in profile:
        ring = []
        for s in range(segments):
            th = 2 * math.pi * s / segments
            cx, cz = math.cos(th), math.sin(th)
            p = (r * cx, y, r * cz)
            n = (nr * cx, ny, nr * cz)
            ring.append(add_vert(p, n))
        rows.append(ring)
    for i in range(len(rows) - 1):
        for s in range(segments):
            a = rows[i][s]
            b = rows[i][(s + 1) % segments]
            c = rows[i + 1][(s + 1) % segments]
            d = rows[i + 1][s]
            add_quad(mat, a, b, c, d)
    return rows


def tube(path, radii, rings, mat):
    """Sweep a circle along a 3D path; path entries are points."""
    rows = []
    for i, (p, r) in enumerate(zip(path, radii)):
        if i == 0:
            t = tuple(b - a for a, b in zip(path[0], path[1]))
        elif i == len(path) - 1:
            t = tuple(b - a for a, b in zip(path[-2], path[-1]))
        else:
            t = tuple(b - a for a, b in zip(path[i - 1], path[i + 1]))
        tl = math.sqrt(sum(c * c for c in t)) or 1.0
        t = tuple(c / tl for c in t)
        up = (0.0, 1.0, 0.0) if abs(t[1]) < 0.9 else (1.0, 0.0, 0.0)
        # orthonormal frame around the tangent
        b0 = (t[1] * up[2] - t[2] * up[1], t[2] * up[0] - t[0] * up[2], t[0] * up[1] - t[1] * up[0])
        bl = math.sqrt(sum(c * c for c in b0)) or 1.0
        b0 = tuple(c / bl for c in b0)
        b1 = (t[1] * b0[2] - t[2] * b0[1], t[2] * b0[0] - t[0] * b0[2], t[0] * b0[1] - t[1] * b0[0])
        ring = []
        for s in range(rings):
            th = 2 * math.pi * s / rings
            n = tuple(math.cos(th) * b0[k] + math.sin(th) * b1[k] for k in range(3))
            q = tuple(p[k] + r * n[k] for k in range(3))
            ring.append(add_vert(q, n))
        rows.append(ring)
    for i in range(len(rows) - 1):
        for s in range(rings):
            a = rows[i][s]
            b = rows[i][(s + 1) % rings]
            c = rows[i + 1][(s + 1) % rings]
            d = rows[i + 1][s]
            add_quad(mat, a, b, c, d)


SEG = 36

# Body: bulbous profile closed at the bottom, open rim folded inward.
profile = []
body_shape = [
    (0.02, 0.00, (0.3, -1.0)),
    (0.55, 0.02, (0.5, -0.8)),
    (0.85, 0.22, (0.9, -0.3)),
    (1.00, 0.55, (1.0, 0.0)),
    (0.92, 0.90, (0.9, 0.35)),
    (0.70, 1.15, (0.75, 0.6)),
    (0.52, 1.28, (0.5, 0.8)),
    (0.50, 1.32, (0.2, 1.0)),
]
lathe(body_shape, SEG, 0)

# Spout: bent tube from the body wall up and outward.
spt = []
for i in range(9):
    u = i / 8.0
    x = 0.8 + 1.05 * u
    y = 0.45 + 0.95 * u * u * (1.6 - u)
    spt.append((x, y, 0.0))
spout_r = [0.16 - 0.09 * (i / 8.0) for i in range(9)]
tube(spt, spout_r, 14, 0)

# Handle: half-torus on the other side.
hnd = []
for i in range(13):
    a = math.pi * (i / 12.0) - math.pi / 2
    hnd.append((-0.85 - 0.45 * math.cos(a), 0.80 + 0.42 * math.sin(a), 0.0))
tube(hnd, [0.07] * 13, 12, 0)

# Lid: shallow dome with a knob, its own material group.
lid_shape = [
    (0.50, 1.32, (0.3, 1.0)),
    (0.42, 1.42, (0.5, 0.9)),
    (0.22, 1.50, (0.4, 1.0)),
    (0.09, 1.52, (0.2, 1.0)),
    (0.10, 1.60, (1.0, 0.1)),
    (0.13, 1.68, (0.6, 0.8)),
    (0.02, 1.74, (0.1, 1.0)),
]
lathe(lid_shape, SEG, 1)

with open('assets/teapot.obj', 'w') as f:
    f.write("# teapot-like fixture, two material groups\n")
    for v in verts:
        f.write("v %.6f %.6f %.6f\n" % v)
    for n in norms:
        f.write("vn %.6f %.6f %.6f\n" % n)
    current = None
    names = ["body", "lid"]
    for mat, idx in faces:
        if mat != current:
            f.write("usemtl %s\n" % names[mat])
            current = mat
        f.write("f %d//%d %d//%d %d//%d\n" % (idx[0], idx[0], idx[1], idx[1], idx[2], idx[2]))

print("wrote assets/teapot.obj:", len(verts), "verts,", len(faces), "tris")
