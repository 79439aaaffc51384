"""Random star-shaped line/arc cycles with known corner geometry."""

import cmath
import math

import numpy as np

from windline.curves import arc, line
from windline.geometry import ClosedCurve


class StarCycle:
    """Counter-clockwise star-shaped curve about 0 built from chords and outward arcs.

    ``corners`` holds ``(vertex, interior_angle)`` pairs computed from the
    construction data; ``smooth`` holds mid-edge points.
    """

    def __init__(self, rng, n_min=3, n_max=7, arc_prob=0.5, max_gap=0.7 * math.pi):
        while True:
            n = int(rng.integers(n_min, n_max + 1))
            gaps = rng.uniform(0.5, 1.5, n)
            gaps *= 2 * math.pi / gaps.sum()
            if gaps.max() < max_gap:
                break
        theta = float(rng.uniform(0, 2 * math.pi)) + np.concatenate([[0.0], np.cumsum(gaps[:-1])])
        radii = rng.uniform(0.5, 1.5, n)
        self.vertices = [complex(r * cmath.exp(1j * t)) for r, t in zip(radii, theta)]
        self.segments, self.smooth = [], []
        out_tangent, in_tangent = [], []
        for k in range(n):
            a, b = self.vertices[k], self.vertices[(k + 1) % n]
            d = b - a
            if rng.uniform() < arc_prob:
                h = abs(d) * float(rng.uniform(0.6, 2.0))
                c = (a + b) / 2 + 1j * d / abs(d) * h
                th0 = cmath.phase(a - c)
                sweep = (cmath.phase(b - c) - th0) % (2 * math.pi)
                self.segments.append(arc(c, abs(a - c), th0, th0 + sweep))
                self.smooth.append(c + abs(a - c) * cmath.exp(1j * (th0 + sweep / 2)))
                out_tangent.append(1j * (a - c))
                in_tangent.append(1j * (b - c))
            else:
                self.segments.append(line(a, b))
                self.smooth.append((a + b) / 2)
                out_tangent.append(d)
                in_tangent.append(d)
        self.corners = []
        for k in range(n):
            t_in = in_tangent[k - 1]
            t_out = out_tangent[k]
            self.corners.append((self.vertices[k], cmath.phase(-t_in / t_out) % (2 * math.pi)))
        self.curve = ClosedCurve(self.segments)
        self.arc_flags = [s.label == "arc" for s in self.segments]
