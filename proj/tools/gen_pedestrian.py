#!/usr/bin/env python3
"""Writes a surface point cloud of a standing pedestrian (x forward, y left, z up)."""
import math
import random
import sys

rng = random.Random(int(sys.argv[2]) if len(sys.argv) > 2 else 7)
pts = []


def cylinder(cy, cz0, cz1, ry, rx, n):
    for _ in range(n):
        a = rng.uniform(0, 2 * math.pi)
        pts.append((rx * math.cos(a), cy + ry * math.sin(a), rng.uniform(cz0, cz1)))


def sphere(cz, r, n):
    for _ in range(n):
        z = rng.uniform(-1, 1)
        a = rng.uniform(0, 2 * math.pi)
        s = math.sqrt(1 - z * z)
        pts.append((r * s * math.cos(a), r * s * math.sin(a), cz + r * z))


sphere(1.62, 0.11, 300)
cylinder(0.0, 0.95, 1.45, 0.17, 0.11, 1100)
for side in (-1, 1):
    cylinder(side * 0.1, 0.0, 0.95, 0.07, 0.07, 500)
    cylinder(side * 0.24, 0.85, 1.45, 0.045, 0.045, 300)

out = open(sys.argv[1], "w") if len(sys.argv) > 1 else sys.stdout
out.write("# pedestrian, %d points\n" % len(pts))
for x, y, z in pts:
    out.write("%.5f %.5f %.5f\n" % (x, y, z))
