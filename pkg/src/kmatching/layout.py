"""Small helper for drawing gadget interiors as unions of grid polylines.

Every gadget is a graph drawn on the grid; its behaviour depends only on the
unit-distance graph of its points. :class:`Sketch` records the intended edges
and :meth:`Sketch.check` rejects drawings where unrelated points touch.
"""
from __future__ import annotations

from .geometry import DIRS, Point, neighbours


def polyline(corners: list[Point]) -> list[Point]:
    """Lattice points along an axis-parallel polyline through ``corners``."""
    out = [corners[0]]
    for a, b in zip(corners, corners[1:]):
        if a[0] != b[0] and a[1] != b[1]:
            raise ValueError(f"segment {a}->{b} is not axis-parallel")
        dx = (b[0] > a[0]) - (b[0] < a[0])
        dy = (b[1] > a[1]) - (b[1] < a[1])
        p = a
        while p != b:
            p = (p[0] + dx, p[1] + dy)
            out.append(p)
    return out


def walk(start: Point, moves: list[tuple[str, int]]) -> list[Point]:
    """Points visited by turtle ``moves`` such as [("E", 4), ("N", 2)], excluding ``start``."""
    out = []
    p = start
    for d, n in moves:
        v = DIRS[d]
        for _ in range(n):
            p = (p[0] + v[0], p[1] + v[1])
            out.append(p)
    return out


class Sketch:
    def __init__(self):
        self.points: list[Point] = []
        self._set: set[Point] = set()
        self.edges: set[frozenset] = set()

    def add_path(self, pts: list[Point], attach: Point | None = None) -> list[Point]:
        """Add consecutive points as a path, optionally joined to ``attach``."""
        prev = attach
        for p in pts:
            if p in self._set:
                raise ValueError(f"point {p} drawn twice")
            self._set.add(p)
            self.points.append(p)
            if prev is not None:
                self.edges.add(frozenset((prev, p)))
            prev = p
        return pts

    def link(self, a: Point, b: Point) -> None:
        self.edges.add(frozenset((a, b)))

    def __contains__(self, p) -> bool:
        return p in self._set

    def check(self) -> list[str]:
        """Differences between intended edges and the actual unit-distance graph."""
        problems = []
        for p in self.points:
            for q in neighbours(p):
                if q in self._set and p < q and frozenset((p, q)) not in self.edges:
                    problems.append(f"unintended contact {p}-{q}")
        for e in self.edges:
            a, b = tuple(e)
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
                problems.append(f"intended edge {a}-{b} is not a unit step")
        return problems
