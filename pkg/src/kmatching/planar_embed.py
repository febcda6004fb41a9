"""Planar rotation systems and orthogonal grid drawings of max-degree-3 graphs.

The drawing is an upward construction in the style of Biedl and Kant: vertices
are placed one per row in st-order, every edge owns one vertical column, and
horizontal pieces only occur in the rows of its two endpoints. Trees use the
same sweep with a breadth-first order. All coordinates are integers.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import networkx as nx

from .formula import IncidenceGraph

Node = tuple  # ("v", i) or ("c", j) for incidence graphs; any hashable otherwise
CW_DIRS = ("N", "E", "S", "W")
VEC = {"N": (0, 1), "E": (1, 0), "S": (0, -1), "W": (-1, 0)}


class NonPlanarError(ValueError):
    pass


class EmbeddingError(ValueError):
    pass


def _as_nx(g) -> nx.Graph:
    return g.to_networkx() if isinstance(g, IncidenceGraph) else nx.Graph(g)


@dataclass
class RotationSystem:
    order: dict  # node -> tuple of neighbours in clockwise order

    def faces(self) -> list[list[tuple]]:
        """Face boundaries as lists of directed edges."""
        pos = {v: {u: i for i, u in enumerate(nbrs)} for v, nbrs in self.order.items()}
        seen = set()
        faces = []
        for v, nbrs in self.order.items():
            for u in nbrs:
                if (v, u) in seen:
                    continue
                face = []
                a, b = v, u
                while (a, b) not in seen:
                    seen.add((a, b))
                    face.append((a, b))
                    ring = self.order[b]
                    # turn to the neighbour after a in clockwise order around b
                    a, b = b, ring[(pos[b][a] + 1) % len(ring)]
                faces.append(face)
        return faces

    def euler_ok(self) -> bool:
        g = nx.Graph()
        g.add_nodes_from(self.order)
        g.add_edges_from((v, u) for v, nbrs in self.order.items() for u in nbrs)
        comps = nx.number_connected_components(g) if len(g) else 0
        # an isolated vertex has no darts but still bounds one face
        isolated = sum(1 for v in g if g.degree(v) == 0)
        faces = len(self.faces()) + isolated
        return len(g) - g.number_of_edges() + faces == comps + 1 if len(g) else True


def planar_rotation(g) -> RotationSystem:
    """Clockwise rotation system of a planar graph (networkx's LR planarity test)."""
    graph = _as_nx(g)
    planar, emb = nx.check_planarity(graph)
    if not planar:
        raise NonPlanarError("graph is not planar")
    rot = RotationSystem({v: tuple(emb.neighbors_cw_order(v)) for v in graph.nodes})
    if not rot.euler_ok():
        raise EmbeddingError("rotation system fails the Euler check")
    return rot


@dataclass
class GridEmbedding:
    vertex_pos: dict  # node -> (x, y)
    edge_path: dict  # (u, v) -> tuple of polyline corners from u to v
    rotation: RotationSystem | None = None
    meta: dict = field(default_factory=dict)

    @property
    def bbox(self) -> tuple[int, int, int, int]:
        pts = list(self.vertex_pos.values()) + [p for path in self.edge_path.values() for p in path]
        if not pts:
            return (0, 0, 0, 0)
        xs, ys = zip(*pts)
        return min(xs), min(ys), max(xs), max(ys)

    def area(self) -> int:
        x0, y0, x1, y1 = self.bbox
        return (x1 - x0 + 1) * (y1 - y0 + 1)

    def path(self, u, v) -> tuple:
        if (u, v) in self.edge_path:
            return self.edge_path[(u, v)]
        return tuple(reversed(self.edge_path[(v, u)]))

    def initial_direction(self, u, v) -> str:
        p = self.path(u, v)
        return _dir(p[0], p[1])


def _dir(a, b) -> str:
    dx, dy = b[0] - a[0], b[1] - a[1]
    if dx and dy or not (dx or dy):
        raise EmbeddingError(f"segment {a}->{b} is not axis-parallel")
    if dx:
        return "E" if dx > 0 else "W"
    return "N" if dy > 0 else "S"


# ---------------------------------------------------------------------------
# st-numbering

def st_numbering(graph: nx.Graph, s, t) -> list:
    """Vertex order with s first, t last and every other vertex having lower and
    higher neighbours (Tarjan's sign-list construction); graph must be 2-connected."""
    pre, parent, low = {}, {s: None}, {}
    order = []
    # iterative DFS starting with the edge s-t
    stack = [(s, iter([t] + [u for u in graph[s] if u != t]))]
    pre[s] = 0
    order.append(s)
    while stack:
        v, it = stack[-1]
        for u in it:
            if u not in pre:
                pre[u] = len(order)
                order.append(u)
                parent[u] = v
                stack.append((u, iter(graph[u])))
                break
        else:
            stack.pop()
    for v in reversed(order):
        lo = v
        for u in graph[v]:
            if u == parent[v]:
                continue
            cand = low[u] if parent.get(u) == v else u
            if pre[cand] < pre[lo]:
                lo = cand
        low[v] = lo
    nxt, prv = {s: t, t: None}, {s: None, t: s}
    sign = {s: -1}
    for v in order[2:]:
        p = parent[v]
        if sign[low[v]] < 0:
            # insert before p
            a = prv[p]
            prv[v], nxt[v] = a, p
            prv[p] = v
            if a is not None:
                nxt[a] = v
            sign[p] = 1
        else:
            b = nxt[p]
            prv[v], nxt[v] = p, b
            nxt[p] = v
            if b is not None:
                prv[b] = v
            sign[p] = -1
    head = s
    while prv[head] is not None:
        head = prv[head]
    out = []
    while head is not None:
        out.append(head)
        head = nxt[head]
    num = {v: i for i, v in enumerate(out)}
    for v in out[1:-1]:
        ns = [num[u] for u in graph[v]]
        if not (min(ns) < num[v] < max(ns)):
            raise EmbeddingError("st-numbering failed (graph not 2-connected?)")
    return out


# ---------------------------------------------------------------------------
# drawing

IN_PORTS = {0: (), 1: ("S",), 2: ("W", "S"), 3: ("W", "S", "E")}
OUT_PORTS = {0: (), 1: ("N",), 2: ("N", "E"), 3: ("W", "N", "E")}


def _sweep(graph: nx.Graph, rot: RotationSystem, order: list, first_out: list):
    """Place ``order`` bottom-up. ``first_out`` gives the left-to-right out-edges of order[0]."""
    num = {v: i for i, v in enumerate(order)}
    columns: list[object] = []  # left-to-right column tokens
    col_of_edge: dict = {}
    col_of_vertex: dict = {}
    port: dict = {}  # (v, u) -> port letter at v for edge v-u
    open_edges: list[tuple] = []  # left-to-right (lower, upper) pairs
    for v in order:
        cw = list(rot.order[v])
        ins = [u for u in cw if num[u] < num[v]]
        outs = [u for u in cw if num[u] > num[v]]
        if len(ins) > 3 or len(outs) > 3 or len(ins) + len(outs) > 4:
            raise EmbeddingError(f"vertex {v} has unsupported in/out degrees {len(ins)}/{len(outs)}")
        if not ins:
            outs_lr = list(first_out)
            in_lr = []
        else:
            # rotate the clockwise order so the in-edges form the tail
            if outs:
                start = next(i for i in range(len(cw)) if num[cw[i]] > num[v] and num[cw[i - 1]] < num[v])
                seq = cw[start:] + cw[:start]
                k = len(outs)
                if any(num[u] < num[v] for u in seq[:k]) or any(num[u] > num[v] for u in seq[k:]):
                    raise EmbeddingError(f"vertex {v} is not bimodal")
                outs_lr = seq[:k]
                in_lr = list(reversed(seq[k:]))
            else:
                outs_lr = []
                in_lr = None  # any cyclic shift; fixed from the open list below
        # in-edges must sit contiguously in the open list, in the rotation's order
        if ins:
            idx = sorted(open_edges.index((u, v)) for u in ins)
            if idx != list(range(idx[0], idx[0] + len(idx))):
                raise EmbeddingError(f"in-edges of {v} not contiguous")
            seen = [e[0] for e in open_edges[idx[0]:idx[-1] + 1]]
            if in_lr is None:
                rev = list(reversed(cw))
                ok = any(rev[i:] + rev[:i] == seen for i in range(len(rev)))
                in_lr = seen if ok else None
            if in_lr != seen:
                raise EmbeddingError(f"in-edges of {v} out of rotation order")
            at = idx[0]
            del open_edges[idx[0]:idx[-1] + 1]
        else:
            at = len(open_edges)
        iports = IN_PORTS[len(in_lr)]
        oports = OUT_PORTS[len(outs_lr)]
        for u, p in zip(in_lr, iports):
            port[(v, u)] = p
        if ins:
            s_edge = in_lr[iports.index("S")]
            col = col_of_edge[(s_edge, v)]
        else:
            col = object()
            columns.append(col)
        col_of_vertex[v] = col
        ci = columns.index(col)
        new = []
        for u, p in zip(outs_lr, oports):
            port[(v, u)] = p
            if p == "N":
                c = col
            else:
                c = object()
                ci = columns.index(col)
                columns.insert(ci if p == "W" else ci + 1, c)
            col_of_edge[(v, u)] = c
            new.append((v, u))
        open_edges[at:at] = new
    x = {c: i for i, c in enumerate(columns)}
    pos = {v: (x[col_of_vertex[v]], num[v]) for v in order}
    paths = {}
    for a in order:
        for b in rot.order[a]:
            if num[b] <= num[a]:
                continue
            cx = x[col_of_edge[(a, b)]]
            pts = [pos[a]]
            if port[(a, b)] != "N":
                pts.append((cx, pos[a][1]))
            if port[(b, a)] != "S":
                pts.append((cx, pos[b][1]))
            pts.append(pos[b])
            paths[(a, b)] = tuple(pts)
    return pos, paths


def _component_drawing(graph: nx.Graph, rot: RotationSystem):
    if graph.number_of_nodes() == 1:
        return {next(iter(graph)): (0, 0)}, {}
    if graph.number_of_nodes() == 2:
        u, v = sorted(graph.nodes, key=str)
        return {u: (0, 0), v: (1, 0)}, {(u, v): ((0, 0), (1, 0))}
    if nx.is_tree(graph):
        root = min(graph.nodes, key=lambda v: (graph.degree(v) > 3, str(v)))
        order = list(nx.bfs_tree(graph, root))
        return _sweep(graph, rot, order, list(rot.order[root]))
    if not nx.is_biconnected(graph):
        raise EmbeddingError("only 2-connected graphs and trees are supported")
    s = min(graph.nodes, key=str)
    cw = list(rot.order[s])
    last_error = None
    for t in cw:
        order = st_numbering(graph, s, t)
        i = cw.index(t)
        # t's edge is the leftmost or the rightmost out-edge of s
        for outs in (cw[i:] + cw[:i], cw[i + 1:] + cw[:i + 1]):
            try:
                return _sweep(graph, rot, order, outs)
            except EmbeddingError as e:
                last_error = e
    raise EmbeddingError(f"no conforming drawing found: {last_error}")


def orthogonal_embed(g, rot: RotationSystem | None = None) -> GridEmbedding:
    """Orthogonal grid drawing conforming to ``rot``; components are placed left to right."""
    graph = _as_nx(g)
    if any(d > 4 for _, d in graph.degree):
        raise EmbeddingError("vertex degree above 4 has no orthogonal drawing")
    rot = rot or planar_rotation(graph)
    pos, paths = {}, {}
    x0 = 0
    comps = sorted(nx.connected_components(graph), key=lambda c: min(map(str, c)))
    for comp in comps:
        sub = graph.subgraph(comp)
        subrot = RotationSystem({v: rot.order[v] for v in comp})
        p, e = _component_drawing(sub, subrot)
        xs = [x for x, _ in p.values()] + [q[0] for path in e.values() for q in path]
        minx, maxx = min(xs), max(xs)
        shift = x0 - minx
        for v, (x, y) in p.items():
            pos[v] = (x + shift, y)
        for key, path in e.items():
            paths[key] = tuple((x + shift, y) for x, y in path)
        x0 += maxx - minx + 2
    # store each edge in the graph's own orientation
    oriented = {}
    for u, v in graph.edges:
        oriented[(u, v)] = paths[(u, v)] if (u, v) in paths else tuple(reversed(paths[(v, u)]))
    oriented = {k: _simplify(p) for k, p in oriented.items()}
    emb = GridEmbedding(pos, oriented, rot)
    report = validate_embedding(emb)
    if report:
        raise EmbeddingError("drawing failed validation: " + "; ".join(report[:3]))
    return emb


def _simplify(path) -> tuple:
    out = [path[0]]
    for p in path[1:]:
        if p == out[-1]:
            continue
        if len(out) >= 2 and _collinear(out[-2], out[-1], p):
            out[-1] = p
        else:
            out.append(p)
    return tuple(out)


def _collinear(a, b, c) -> bool:
    return (b[0] - a[0]) * (c[1] - a[1]) == (b[1] - a[1]) * (c[0] - a[0])


# ---------------------------------------------------------------------------
# validation

def _segments(path):
    return list(zip(path, path[1:]))


def _seg_intersect(p1, p2, q1, q2):
    """Exact intersection of two axis-parallel integer segments: set of shared points
    (as a range description) or None. Returns True/False only."""
    ax0, ax1 = sorted((p1[0], p2[0]))
    ay0, ay1 = sorted((p1[1], p2[1]))
    bx0, bx1 = sorted((q1[0], q2[0]))
    by0, by1 = sorted((q1[1], q2[1]))
    return ax0 <= bx1 and bx0 <= ax1 and ay0 <= by1 and by0 <= ay1


def _lattice(a, b):
    dx = (b[0] > a[0]) - (b[0] < a[0])
    dy = (b[1] > a[1]) - (b[1] < a[1])
    p = a
    out = [a]
    while p != b:
        p = (p[0] + dx, p[1] + dy)
        out.append(p)
    return out


def validate_embedding(emb: GridEmbedding) -> list[str]:
    """Every violated drawing invariant as a message; an empty list means valid."""
    problems = []
    seen = {}
    for v, p in emb.vertex_pos.items():
        if not all(isinstance(c, int) for c in p):
            problems.append(f"vertex {v} at non-integer point {p}")
        if p in seen:
            problems.append(f"vertices {seen[p]} and {v} share point {p}")
        seen[p] = v
    owner = {}
    for (u, v), path in emb.edge_path.items():
        if any(not all(isinstance(c, int) for c in q) for q in path):
            problems.append(f"edge {u}-{v} has a non-integer point")
            continue
        if len(path) < 2 or path[0] != emb.vertex_pos.get(u) or path[-1] != emb.vertex_pos.get(v):
            problems.append(f"edge {u}-{v} does not join its endpoints")
            continue
        bad = [(a, b) for a, b in _segments(path) if a[0] != b[0] and a[1] != b[1]]
        if bad:
            problems.append(f"edge {u}-{v} has a non-axis-parallel segment {bad[0]}")
            continue
        pts = [q for a, b in _segments(path) for q in _lattice(a, b)[:-1]] + [path[-1]]
        if len(set(pts)) != len(pts):
            problems.append(f"edge {u}-{v} is not simple")
        for q in pts[1:-1]:
            if q in seen:
                problems.append(f"edge {u}-{v} passes through vertex {seen[q]}")
            if q in owner and owner[q] != (u, v):
                problems.append(f"edges {owner[q]} and {(u, v)} cross at {q}")
            owner[q] = (u, v)
    # exact segment test between different edges (catches anything the lattice scan might not)
    edges = list(emb.edge_path.items())
    for i in range(len(edges)):
        (e1, p1) = edges[i]
        for j in range(i + 1, len(edges)):
            (e2, p2) = edges[j]
            shared = set(e1) & set(e2)
            ends = {emb.vertex_pos[v] for v in shared if v in emb.vertex_pos}
            for a, b in _segments(p1):
                for c, d in _segments(p2):
                    if _seg_intersect(a, b, c, d):
                        common = set(_lattice(a, b)) & set(_lattice(c, d)) if a[0] == b[0] or a[1] == b[1] else set()
                        if common - ends:
                            msg = f"edges {e1} and {e2} cross at {sorted(common - ends)[0]}"
                            if msg not in problems:
                                problems.append(msg)
    if emb.rotation is not None:
        for v, nbrs in emb.rotation.order.items():
            if len(nbrs) < 3:
                continue  # every cyclic order of at most two edges agrees
            try:
                dirs = [emb.initial_direction(v, u) for u in nbrs]
            except (KeyError, EmbeddingError):
                problems.append(f"rotation at {v} names an undrawn edge")
                continue
            ranks = [CW_DIRS.index(d) for d in dirs]
            if len(set(ranks)) != len(ranks):
                problems.append(f"two edges leave {v} in the same direction")
                continue
            shifted = ranks[ranks.index(min(ranks)):] + ranks[:ranks.index(min(ranks))]
            if shifted != sorted(shifted):
                problems.append(f"rotation mismatch at {v}")
    return problems


# ---------------------------------------------------------------------------
# serialization

def _name(v) -> str:
    if isinstance(v, tuple) and len(v) == 2 and v[0] in ("v", "c"):
        return f"{v[0]}{v[1] + 1}"
    return str(v)


def _unname(s: str):
    if s[:1] in ("v", "c") and s[1:].isdigit():
        return (s[0], int(s[1:]) - 1)
    return s


def embedding_to_json(emb: GridEmbedding) -> str:
    data = {
        "vertices": [{"node": _name(v), "pos": list(p)} for v, p in sorted(emb.vertex_pos.items(), key=lambda t: str(t[0]))],
        "edges": [{"u": _name(u), "v": _name(v), "path": [list(q) for q in path]}
                  for (u, v), path in sorted(emb.edge_path.items(), key=lambda t: str(t[0]))],
    }
    if emb.rotation is not None:
        data["rotation"] = {_name(v): [_name(u) for u in nbrs] for v, nbrs in emb.rotation.order.items()}
    return json.dumps(data, indent=1, ensure_ascii=False) + "\n"


def embedding_from_json(text: str) -> GridEmbedding:
    data = json.loads(text)
    pos = {_unname(d["node"]): tuple(d["pos"]) for d in data["vertices"]}
    paths = {(_unname(d["u"]), _unname(d["v"])): tuple(tuple(q) for q in d["path"]) for d in data["edges"]}
    rot = None
    if "rotation" in data:
        rot = RotationSystem({_unname(v): tuple(_unname(u) for u in nbrs) for v, nbrs in data["rotation"].items()})
    return GridEmbedding(pos, paths, rot)
