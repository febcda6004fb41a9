"""Integer grid helpers: rigid motions, unit-distance graphs and k-mino enumeration."""
from __future__ import annotations

from collections.abc import Iterable, Sequence

Point = tuple[int, int]

DIRS: dict[str, Point] = {"E": (1, 0), "N": (0, 1), "W": (-1, 0), "S": (0, -1)}
# counter-clockwise order, used for rotations
CCW = ("E", "N", "W", "S")


def add(p: Point, q: Point) -> Point:
    return (p[0] + q[0], p[1] + q[1])


def scale(p: Point, f: int) -> Point:
    return (p[0] * f, p[1] * f)


def rotate(p: Point, quarter_turns: int) -> Point:
    """Rotate counter-clockwise about the origin by ``quarter_turns`` * 90 degrees."""
    x, y = p
    for _ in range(quarter_turns % 4):
        x, y = -y, x
    return (x, y)


def rotate_dir(d: str, quarter_turns: int) -> str:
    return CCW[(CCW.index(d) + quarter_turns) % 4]


def dir_of(v: Point) -> str:
    for name, u in DIRS.items():
        if u == v:
            return name
    raise ValueError(f"not a unit axis vector: {v}")


def neighbours(p: Point) -> Iterable[Point]:
    x, y = p
    yield (x + 1, y)
    yield (x - 1, y)
    yield (x, y + 1)
    yield (x, y - 1)


def unit_adjacency(points: Iterable[Point]) -> dict[Point, list[Point]]:
    pts = set(points)
    return {p: [q for q in neighbours(p) if q in pts] for p in pts}


def is_connected(points: Sequence[Point]) -> bool:
    """True when the unit-distance graph on ``points`` is connected."""
    pts = set(points)
    if not pts:
        return True
    start = next(iter(pts))
    seen = {start}
    stack = [start]
    while stack:
        p = stack.pop()
        for q in neighbours(p):
            if q in pts and q not in seen:
                seen.add(q)
                stack.append(q)
    return len(seen) == len(pts)


def connected_subsets(adj: dict, k: int, roots: Iterable | None = None) -> list[frozenset]:
    """All connected vertex sets of size ``k`` in the graph ``adj``.

    Uses the standard extension-set enumeration: each subset is generated exactly
    once from its smallest vertex (under the ordering of ``adj``'s keys).
    """
    order = {v: i for i, v in enumerate(sorted(adj))}
    out: list[frozenset] = []
    for root in (sorted(adj) if roots is None else roots):
        r = order[root]
        ext = [w for w in adj[root] if order[w] > r]
        _extend(adj, order, r, k, {root}, ext, {root} | set(adj[root]), out)
    return out


def _extend(adj, order, r, k, sub, ext, closed, out):
    if len(sub) == k:
        out.append(frozenset(sub))
        return
    ext = list(ext)
    while ext:
        w = ext.pop()
        new_ext = list(ext)
        new_closed = set(closed)
        for u in adj[w]:
            if order[u] > r and u not in closed:
                new_ext.append(u)
                new_closed.add(u)
        sub.add(w)
        _extend(adj, order, r, k, sub, new_ext, new_closed, out)
        sub.remove(w)


def bbox(points: Iterable[Point]) -> tuple[int, int, int, int]:
    xs, ys = zip(*points)
    return min(xs), min(ys), max(xs), max(ys)
