"""General-k charge primitives and the k >= 4 variable and clause gadgets.

Charges follow the wire's forward direction. A port with role ``in`` receives
charge c when c gadget points join the incoming wire's last block; a port with
role ``out`` emits charge c when c outside points join the gadget's block.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product

from .gadget import Certification, GadgetTemplate, Port, certify_gadget
from .geometry import DIRS, Point, bbox, dir_of, rotate, rotate_dir
from .layout import Sketch, polyline, walk


class PrimitiveKind(str, enum.Enum):
    fuse = "fuse"
    switch = "switch"
    amplifier = "amplifier"
    splitter = "splitter"
    junction = "junction"
    xor_filter = "xor_filter"
    xor_enforcer = "xor_enforcer"
    delta_network = "delta_network"


def halves(k: int) -> tuple[int, int]:
    return k // 2, (k + 1) // 2


def _perp(d: str) -> tuple[str, str]:
    return ("N", "S") if d in ("E", "W") else ("E", "W")


def filter_points(sk: Sketch, start: Point, d: str, x: int, k: int, attach: Point | None,
                  side: int = 0) -> list[Point]:
    """Draw an exact filter: two path nodes heading in direction ``d`` from
    ``start`` whose pendants (sizes x-1 then k-1-x) point to opposite sides.

    Only charges 0 and x (in direction ``d``) can cross it; x = 1 is a fuse.
    Returns the two path nodes.
    """
    if not 1 <= x <= k - 1:
        raise ValueError(f"filter charge {x} outside 1..{k - 1}")
    v = DIRS[d]
    s1 = start
    s2 = (s1[0] + v[0], s1[1] + v[1])
    sk.add_path([s1, s2], attach)
    a, b = _perp(d)
    if side:
        a, b = b, a
    if x - 1:
        sk.add_path(walk(s1, [(a, x - 1)]), s1)
    if k - 1 - x:
        sk.add_path(walk(s2, [(b, k - 1 - x)]), s2)
    return [s1, s2]


def _template(kind: str, k: int, sk: Sketch, ports, **meta) -> GadgetTemplate:
    problems = sk.check()
    if problems:
        raise AssertionError(f"{kind}: {problems[:3]}")
    return GadgetTemplate(kind, k, tuple(sk.points), tuple(ports), bbox(sk.points), meta)


def build_primitive(kind: PrimitiveKind | str, k: int, s: int | None = None) -> GadgetTemplate:
    """Point layout of a primitive, with outside wires left to the certifier's stubs.

    ``s`` selects the w2 charge a junction is built for (default k-2).
    """
    kind = PrimitiveKind(kind)
    if k < 4:
        raise ValueError("primitives need k >= 4; k = 3 uses gadgets3")
    h, H = halves(k)
    every = frozenset(range(k))
    sk = Sketch()
    if kind is PrimitiveKind.fuse:
        sk.add_path([(0, 0), (1, 0)])
        sk.add_path(walk((1, 0), [("N", k - 2)]), (1, 0))
        ports = [Port("in", (0, 0), "W", "in", every), Port("out", (1, 0), "E", "out", every)]
    elif kind is PrimitiveKind.switch:
        sk.add_path([(i, 0) for i in range(k)])
        ports = [Port("w1", (k - 1, 0), "E", "out", every), Port("w2", (k - 2, 0), "N", "out", every)]
    elif kind is PrimitiveKind.amplifier:
        t = [(0, k - i) for i in range(1, k + 1)]  # v1 (top) .. vk (bottom)
        sk.add_path(t)
        ports = [Port("in", t[k - 2], "W", "in", frozenset({0, 1})),
                 Port("w1", t[0], "E", "out", every), Port("w2", t[-1], "E", "out", every)]
    elif kind is PrimitiveKind.splitter:
        # a 2k-point spine: the input enters at its k-th point, w1 leaves through a fuse
        t = [(0, 2 * k - i) for i in range(1, 2 * k + 1)]
        sk.add_path(t)
        top = t[0]
        f1 = (top[0] + 1, top[1])
        f2 = (top[0] + 2, top[1])
        sk.add_path([f1, f2], top)
        sk.add_path(walk(f2, [("N", k - 2)]), f2)
        ports = [Port("in", t[k - 1], "W", "in", frozenset(range(1, k))),
                 Port("w1", f2, "E", "out", every), Port("w2", t[-1], "E", "out", every)]
    elif kind is PrimitiveKind.junction:
        s = k - 2 if s is None else s
        if not 1 <= s <= k - 2:
            raise ValueError(f"junction charge s={s} outside 1..{k - 2}")
        t = [(0, k - i) for i in range(1, k + 1)]
        sk.add_path(t)
        # input filters sit on the wires' last minos, output filter on w_out's first
        a1 = filter_points(sk, (0, k + 1), "S", 1, k, None)
        sk.link(a1[1], t[0])
        a2 = filter_points(sk, (0, -2), "N", s, k, None)
        sk.link(a2[1], t[-1])
        # k plain points keep the output filter clear of the spine; charge is unchanged mod k
        run = sk.add_path(walk(t[1], [("E", k)]), t[1])
        o = filter_points(sk, (run[-1][0] + 1, k - 2), "E", s + 1, k, run[-1])
        ports = [Port("w1", a1[0], "N", "in", frozenset({0, 1})),
                 Port("w2", a2[0], "S", "in", every),
                 Port("out", o[1], "E", "out", every)]
    elif kind is PrimitiveKind.xor_filter:
        sk.add_path([(i, 0) for i in range(k)])
        ports = [Port("w1", (0, 0), "N", "in", frozenset({0, h}), "W"),
                 Port("w2", (0, 0), "S", "in", frozenset({0, H}), "W"),
                 Port("out", (k - 1, 0), "E", "out", every)]
    else:  # xor_enforcer and delta_network share one layout
        t1 = [(0, 2 * H - i) for i in range(2 * H + 1)]
        u1 = t1[H]
        sk.add_path(t1)
        t2 = sk.add_path(walk(u1, [("E", 2 * k - 2 * H - 1)]), u1)
        spec3 = frozenset({0, h, H})
        ports = [Port("w1", t1[0], "N", "in", frozenset({0, h}) if kind is PrimitiveKind.xor_enforcer else spec3),
                 Port("w2", t1[-1], "S", "in", frozenset({0, H}) if kind is PrimitiveKind.xor_enforcer else spec3)]
        if kind is PrimitiveKind.xor_enforcer:
            ports.append(Port("out", t2[-1], "E", "out", every))
        else:
            ports.append(Port("w3", t2[-1], "E", "in", spec3))
    return _template(kind.value, k, sk, ports)


@dataclass
class ChargeRelation:
    kind: str
    k: int
    inputs: tuple
    outputs: tuple
    table: dict = field(default_factory=dict)  # input tuple -> set of output tuples
    infeasible: list = field(default_factory=list)

    def outputs_for(self, *inp) -> set:
        return self.table.get(tuple(inp), set())

    def feasible_inputs(self) -> set:
        return set(self.table)

    def report(self) -> str:
        lines = [f"charge table {self.kind} k={self.k}",
                 f"inputs {' '.join(self.inputs)} -> outputs {' '.join(self.outputs)}"]
        for i in sorted(self.table):
            outs = "; ".join(" ".join(map(str, o)) for o in sorted(self.table[i]))
            lines.append(f"  {' '.join(map(str, i))} -> {outs or '-'}")
        for i in sorted(self.infeasible):
            lines.append(f"  {' '.join(map(str, i))} -> infeasible")
        return "\n".join(lines) + "\n"


def relation_from_certificate(t: GadgetTemplate, cert: Certification, restrict: bool = True) -> ChargeRelation:
    """Input -> output relation; ``restrict`` limits inputs to each port's charge spec."""
    names = cert.port_names
    ins = [i for i, n in enumerate(names) if t.port(n).role in ("in", "clause-in")]
    outs = [i for i, n in enumerate(names) if i not in ins]
    specs = [(t.port(n).charge_spec if restrict else None) or frozenset(range(t.k)) for n in names]
    table: dict = {}
    for state in cert.feasible:
        if all(state[i] in specs[i] for i in ins):
            table.setdefault(tuple(state[i] for i in ins), set()).add(tuple(state[i] for i in outs))
    domain = product(*(sorted(specs[i]) for i in ins))
    infeasible = [d for d in domain if d not in table]
    return ChargeRelation(t.kind, t.k, tuple(names[i] for i in ins), tuple(names[i] for i in outs),
                          table, infeasible)


def charge_table(kind: PrimitiveKind | str, k: int, **kw) -> ChargeRelation:
    """Exhaustively enumerated input -> output relation of a primitive."""
    t = build_primitive(kind, k, **kw)
    return relation_from_certificate(t, certify_gadget(t))


# ---------------------------------------------------------------------------
# variable gadget: a ring of six degree-3 nodes with an exact filter on every
# ring segment and on every port branch

LEFT = {"E": "N", "N": "W", "W": "S", "S": "E"}
OPP = {"E": "W", "W": "E", "N": "S", "S": "N"}


def node_triples(k: int) -> tuple:
    """Block shapes (u, d, e) at L and R ring nodes in the false and true states.

    u, d, e count the upstream ring, downstream ring and branch points sharing
    the node's block. Returns (false_L, true_L, false_R, true_R), the first
    solution in lexicographic order. Path shapes (one arm empty) are tried
    first, as the path variant needs them; for even k ring segments have odd
    length, which adds a parity condition that some k (e.g. 6) only meet with
    a T-shaped node.
    """
    h, H = halves(k)
    every = [(u, d, k - 1 - u - d) for u in range(k) for d in range(k - u)]

    def signals(f, t):
        return [(t[i] - f[i]) % k for i in range(3)]

    for shapes in ([t for t in every if 0 in t], every):
        for fL, tL, fR, tR in product(shapes, repeat=4):
            if signals(fL, tL)[2] != h or signals(fR, tR)[2] != H % k:
                continue
            if 0 in signals(fL, tL) or 0 in signals(fR, tR):
                continue
            # downstream signal of one node must cancel the upstream signal of the next
            if (tL[1] - fL[1] + tR[0] - fR[0]) % k or (tR[1] - fR[1] + tL[0] - fL[0]) % k:
                continue
            if k % 2 == 0 and ((fL[1] + fR[0]) % 2 == 0 or (fR[1] + fL[0]) % 2 == 0
                               or (fL[2] - fR[2]) % 2):
                continue
            return fL, tL, fR, tR
    raise ValueError(f"no ring node shapes for k={k}")


def _bump_depth(diff: int, k: int) -> int:
    for b in range(k):
        if (2 * b - diff) % k == 0:
            return b
    raise ValueError(f"length residue {diff} unreachable by bumps for k={k}")


def _decorate(sk: Sketch, attach: Point, interior: list[Point], dirs: list[str], target: int,
              p: int, x: int, k: int, pend_side: str, bump_at: int, bump_side: str) -> list[Point]:
    """Draw a path with an exact filter at interior index ``p`` and a bump at
    ``bump_at`` sized so the plain point count is ``target`` mod k.

    ``dirs[i]`` is the travel direction into ``interior[i]``. Returns the drawn points.
    """
    plain = len(interior) - 2
    b = _bump_depth(target - plain, k)
    pts = list(interior)
    if b:
        j = bump_at
        a = pts[j]
        d = dirs[j + 1]
        if any(dirs[i] != d for i in range(j + 1, j + 4)):
            raise AssertionError("bump must sit on a straight run")
        detour = walk(a, [(bump_side, b), (d, 3), (OPP[bump_side], b - 1)])
        pts = pts[:j + 1] + detour + pts[j + 3:]
    sk.add_path(pts, attach)
    s1, s2 = pts[p], pts[p + 1]
    d = dirs[p + 1]
    if x - 1:
        sk.add_path(walk(s1, [(pend_side, x - 1)]), s1)
    if k - 1 - x:
        sk.add_path(walk(s2, [(OPP[pend_side], k - 1 - x)]), s2)
    return pts


def _interior(corners: list[Point]) -> tuple[list[Point], list[str]]:
    pts = polyline(corners)
    dirs = [dir_of((b[0] - a[0], b[1] - a[1])) for a, b in zip(pts, pts[1:])]
    return pts[1:], dirs


def variable_gadget_k(k: int) -> GadgetTemplate:
    """Variable gadget for k >= 4 with ports L0 R0 (south), L1 R1 (east), L2 R2 (north).

    The two tight states are all ports at charge 0 (false) and every L port at
    floor(k/2) with every R port at ceil(k/2) (true). The west side is unused.
    """
    if k < 4:
        raise ValueError("use gadgets3 for k = 3")
    h, H = halves(k)
    fL, tL, fR, tR = node_triples(k)
    q = 2 * k + 2
    R = q + 2 * k + 10
    y1 = k + 2
    gap = 2 * k + 6
    if k % 2 == 0 and (gap - 1 - fL[2]) % 2:
        gap += 1
    Y = R + gap + y1

    nodes = [(-q, -R), (q, -R), (R, -q), (R, q), (q, R), (-q, R)]
    shapes_f = [fL, fR] * 3
    shapes_t = [tL, tR] * 3
    sk = Sketch()
    sk.add_path(nodes[:1])
    ring_corners = [
        [nodes[0], nodes[1]],
        [nodes[1], (R, -R), nodes[2]],
        [nodes[2], nodes[3]],
        [nodes[3], (R, R), nodes[4]],
        [nodes[4], nodes[5]],
        [nodes[5], (-R, R), (-R, -R), nodes[0]],
    ]
    for j, corners in enumerate(ring_corners):
        f, t = shapes_f[j], shapes_t[j]
        nxt = shapes_f[(j + 1) % 6]
        interior, dirs = _interior(corners)
        if j < 5:
            sk.add_path(nodes[j + 1:j + 2])
        interior = interior[:-1]  # the end node is drawn separately
        p = k + f[1] % k
        x = (t[1] - f[1]) % k
        _decorate(sk, nodes[j], interior, dirs, f[1] + nxt[0], p, x, k,
                  LEFT[dirs[0]], p + 3, LEFT[dirs[0]])
        sk.link(interior[-1], nodes[(j + 1) % 6])
    # port branches: the south pair, then its quarter and half turns
    ports = []
    for side in range(3):
        for which, sign in ((0, -1), (1, 1)):
            j = 2 * side + which
            f, t = shapes_f[j], shapes_t[j]
            base = [(sign * q, -R), (sign * q, -Y + y1), (sign, -Y + y1), (sign, -Y)]
            corners = [rotate(c, side) for c in base]
            interior, dirs = _interior(corners)
            p = k + f[2] % k
            x = (t[2] - f[2]) % k
            # the bump on the branch's second run points away from the ring
            _decorate(sk, nodes[j], interior, dirs, f[2], p, x, k, LEFT[dirs[0]], gap + 1, dirs[0])
            ports.append(Port(f"{'LR'[which]}{side}", interior[-1], dirs[-1], "variable-out",
                              frozenset({0, (h, H)[which]})))
    tmpl = _template("variable", k, sk, ports, true_state=tuple((h, H)[i % 2] for i in range(6)),
                     shapes=(fL, tL, fR, tR))
    tmpl = GadgetTemplate(tmpl.kind, k, tmpl.points, tmpl.ports, (-Y, -Y, Y, Y), tmpl.meta)
    return tmpl.transformed(0, (Y, Y))


# ---------------------------------------------------------------------------
# clause gadget: three XOR primitives feeding a Delta network

RIGHT = {v: k for k, v in LEFT.items()}


def _route(sk: Sketch, corners: list[Point], k: int, residue: int = 0, side: str | None = None,
           start: int | None = None) -> list[Point]:
    """Draw a wire along ``corners`` (every point drawn) padded to ``residue`` mod k points.

    Padding is a bump of depth b (+2b points) and, when parity demands it for
    even k, a single leaf (+1 point). Both go to ``side`` of the run at index
    ``start`` (default k), which callers pick where every admissible charge is
    0 or at least 2, so the leaf filters nothing that matters.
    """
    pts = polyline(corners)
    dirs = [None] + [dir_of((b[0] - a[0], b[1] - a[1])) for a, b in zip(pts, pts[1:])]
    j = k if start is None else start
    deficit = (residue - len(pts)) % k
    leaf = deficit % 2 if k % 2 == 0 else 0
    b = _bump_depth(deficit - leaf, k)
    if (leaf or b) and (j + 8 > len(pts) or any(dirs[i] != dirs[j + 1] for i in range(j + 1, j + 8))):
        raise AssertionError(f"padding site {pts[j]} is not on a straight run")
    out = list(pts)
    if b:
        a = pts[j + 3]
        detour = walk(a, [(side, b), (dirs[j + 4], 3), (OPP[side], b - 1)])
        out = pts[:j + 4] + detour + pts[j + 6:]
    sk.add_path(out)
    if leaf:
        sk.add_path(walk(pts[j], [(side, 1)]), pts[j])
    return out


def _xor_site(sk: Sketch, o: Point, d_out: str) -> tuple[Point, Point]:
    """Entry points (w1 side, w2 side) next to an XOR node ``o`` whose output leaves toward ``d_out``."""
    l, r = DIRS[LEFT[d_out]], DIRS[RIGHT[d_out]]
    return (o[0] + l[0], o[1] + l[1]), (o[0] + r[0], o[1] + r[1])


def clause_gadget_k(k: int, polarity: str = "positive", size: int | None = None,
                    delta: GadgetTemplate | None = None,
                    enforcer_unit: GadgetTemplate | None = None) -> GadgetTemplate:
    """Clause gadget for k >= 4 on a size x size footprint (default s-2 for the variable's s).

    Ports l1 r1 (west), l2 r2 (north), l3 r3 (east). Pairs (l1,r3), (l2,r1),
    (l3,r2) meet in XOR-filters (positive) or XOR-enforcers (negative) whose
    outputs feed the three arms of a Delta network.

    ``delta`` and ``enforcer_unit`` swap in alternative layouts (ports w1 N, w2 S,
    third port E, origin at the junction), as the path variant does.
    """
    if k < 4:
        raise ValueError("use gadgets3 for k = 3")
    if polarity not in ("positive", "negative"):
        raise ValueError(f"unknown polarity {polarity!r}")
    h, H = halves(k)
    if size is None:
        size = variable_gadget_k(k).footprint[2] - 2
    S, c = size, size // 2
    if c < 5 * k + H + 17:
        raise ValueError(f"clause footprint {size} too small for k={k}")
    enforcer = polarity == "negative"
    sk = Sketch()
    extra: list = []  # off-grid points, kept out of the grid sketch
    if delta is None:
        # Delta network at the centre: spine t1 on x = c, arm t2 east along y = c
        t1 = [(c, c + H - i) for i in range(2 * H + 1)]
        sk.add_path(t1)
        t2 = sk.add_path(walk((c, c), [("E", 2 * k - 2 * H - 1)]), (c, c))
        xe = t2[-1][0]
        arm_end = {(c, c - H - 1): t1[-1], (c, c + H + 1): t1[0], (xe + 1, c): t2[-1]}
    else:
        # a Delta template with ports w1 (N), w2 (S), w3 (E), its origin placed at (c, c)
        moved = delta.transformed(0, (c, c))
        arm_end = {}
        for name in ("w1", "w2", "w3"):
            port = moved.port(name)
            v = DIRS[port.direction]
            arm_end[(port.position[0] + v[0], port.position[1] + v[1])] = port.position
        grid_pts = [p for p in moved.points if all(isinstance(x, int) for x in p)]
        extra = [p for p in moved.points if p not in set(grid_pts)]
        sk.add_path(grid_pts[:1])
        for p in grid_pts[1:]:
            sk.add_path([p])
        for p in grid_pts:
            for q in ((p[0] + 1, p[1]), (p[0], p[1] + 1)):
                if q in sk:
                    sk.link(p, q)
        xe = moved.port("w3").position[0]
        south = moved.port("w2").position

    def unit(o: Point, d_out: str, corners: list[Point], side: str) -> tuple[Point, Point]:
        """An XOR unit at node ``o`` whose output runs along ``corners`` to a Delta arm.

        A filter's node row is the output wire's first k points; an enforcer adds a
        spine of 2H+1 points across the flow and an arm of 2k-2H-1 points.
        Returns (entry point, node it touches) for the w1 and w2 wires.
        """
        lv, rv = DIRS[LEFT[d_out]], DIRS[RIGHT[d_out]]
        if enforcer and enforcer_unit is not None:
            # triangle junction: spine loses its far end, the arm starts two steps out
            q = next(q for q in range(4) if rotate_dir("E", q) == d_out)
            moved = enforcer_unit.transformed(q, o)
            extra.extend(p for p in moved.points if not all(isinstance(x, int) for x in p))
            spine = [(o[0] + lv[0] * i, o[1] + lv[1] * i) for i in range(H, 0, -1)]
            spine += [o] + [(o[0] + rv[0] * i, o[1] + rv[1] * i) for i in range(1, H)]
            sk.add_path(spine)
            dv = DIRS[d_out]
            n = 2 * k - 2 * H - 2
            out = _route(sk, [(o[0] + 2 * dv[0], o[1] + 2 * dv[1])] + corners, k, n, side, start=n)
            ends = spine[0], spine[-1]
        elif enforcer:
            spine = [(o[0] + lv[0] * i, o[1] + lv[1] * i) for i in range(H, 0, -1)]
            spine += [o] + [(o[0] + rv[0] * i, o[1] + rv[1] * i) for i in range(1, H + 1)]
            sk.add_path(spine)
            dv = DIRS[d_out]
            first = (o[0] + dv[0], o[1] + dv[1])
            out = _route(sk, [first] + corners, k, 2 * k - 2 * H - 1, side, start=2 * k - 2 * H - 1)
            sk.link(o, first)
            ends = spine[0], spine[-1]
        else:
            out = _route(sk, [o] + corners, k, 0, side)
            ends = o, o
        sk.link(out[-1], arm_end[out[-1]])
        e1 = (ends[0][0] + lv[0], ends[0][1] + lv[1])
        e2 = (ends[1][0] + rv[0], ends[1][1] + rv[1])
        return (e1, ends[0]), (e2, ends[1])

    yA = c - H - 3 * k
    yT = S - 2 * k - 8
    xB, xC = c - 2 * k, c + 2 * k
    yM = c + H + 1 + k
    inA = unit((c, yA), "N", [(c, c - H - 1) if delta is None else (south[0], south[1] - 1)], "E")
    inB = unit((xB, yT), "S", [(xB, yM), (c, yM), (c, c + H + 1)], "E")
    inC = unit((xC, yT), "S", [(xC, c), (xe + 1, c)], "W")
    xl1, xr1 = c - 3 * k, c - 4 * k
    xr3, xl3 = xC + k, xC + 2 * k
    wires = {
        "l1": ([(0, c - 1), (xl1, c - 1), (xl1, yA)], inA[0], "S"),
        "r1": ([(0, c + 1), (xr1, c + 1), (xr1, yT)], inB[1], "N"),
        "l2": ([(c - 1, S), (c - 1, yT)], inB[0], "W"),
        "r2": ([(c + 1, S), (c + 1, yT)], inC[1], "E"),
        "l3": ([(S, c + 1), (xl3, c + 1), (xl3, yT)], inC[0], "N"),
        "r3": ([(S, c - 1), (xr3, c - 1), (xr3, yA)], inA[1], "S"),
    }
    ports = []
    for name, (corners, (entry, node), side) in wires.items():
        out = _route(sk, corners + [entry], k, 0, side)
        sk.link(out[-1], node)
        port_dir = "W" if corners[0][0] == 0 else "E" if corners[0][0] == S else "N"
        ports.append(Port(name, corners[0], port_dir, "clause-in",
                          frozenset({0, h if name[0] == "l" else H})))
    t = _template(f"clause-{polarity}", k, sk, ports, pairs=(("l1", "r1"), ("l2", "r2"), ("l3", "r3")))
    meta = dict(t.meta)
    if delta is not None:
        meta.update({key: v for key, v in delta.meta.items() if key in ("adjacency_threshold2", "digits")})
        meta["delta"] = delta.kind
    path = delta is not None or (enforcer and enforcer_unit is not None)
    return GadgetTemplate(t.kind + "-path" if path else t.kind, k, t.points + tuple(extra),
                          t.ports, (0, 0, S, S), meta)


def pair_consistent_states(t: GadgetTemplate, cert: Certification) -> set:
    """Admissible clause states where each (l_i, r_i) pair is all zero or all nonzero.

    Variable gadgets only ever emit such pairs, so these are the states that matter.
    """
    idx = {n: i for i, n in enumerate(cert.port_names)}
    return {st for st in cert.admissible_feasible()
            if all((st[idx[a]] == 0) == (st[idx[b]] == 0) for a, b in t.meta["pairs"])}


def active_pairs(t: GadgetTemplate, cert: Certification, state: tuple) -> tuple[int, ...]:
    idx = {n: i for i, n in enumerate(cert.port_names)}
    return tuple(int(state[idx[a]] != 0) for a, _ in t.meta["pairs"])


# ---------------------------------------------------------------------------
# wires, duality and composition checks

def wire_template(k: int, minos: int = 3, bend: bool = False, reverse: bool = False) -> GadgetTemplate:
    """A plain wire of ``minos`` k-minos running east (or turning north after the
    first mino when ``bend``). ``reverse`` swaps which end is the input."""
    n = minos * k
    if bend:
        pts = [(i, 0) for i in range(k)] + [(k - 1, j) for j in range(1, n - k + 1)]
        end_dir = "N"
    else:
        pts = [(i, 0) for i in range(n)]
        end_dir = "E"
    roles = ("out", "in") if reverse else ("in", "out")
    every = frozenset(range(k))
    ports = (Port("a", pts[0], "W", roles[0], every), Port("b", pts[-1], end_dir, roles[1], every))
    return GadgetTemplate("wire", k, tuple(pts), ports, bbox(pts))


def direction_duality(k: int, minos: int = 3) -> bool:
    """Forward charge i at an end is read as k - i when the wire is traversed backwards."""
    fwd = certify_gadget(wire_template(k, minos)).feasible_states
    back = certify_gadget(wire_template(k, minos, reverse=True)).feasible_states
    dual = {tuple((k - c) % k for c in st) for st in fwd}
    return dual == back and all(a == b for a, b in fwd)


def chain(t1: GadgetTemplate, out_port: str, t2: GadgetTemplate, in_port: str) -> GadgetTemplate:
    """Join ``t1.out_port`` to ``t2.in_port`` with a k-point straight wire.

    ``t2`` is rotated to face ``t1`` and the remaining ports are renamed
    ``a.<name>`` and ``b.<name>``.
    """
    k = t1.k
    po = t1.port(out_port)
    turns = next(q for q in range(4) if rotate(DIRS[t2.port(in_port).direction], q) == DIRS[OPP[po.direction]])
    t2r = t2.transformed(turns)
    v = DIRS[po.direction]
    target = (po.position[0] + (k + 1) * v[0], po.position[1] + (k + 1) * v[1])
    pi = t2r.port(in_port).position
    t2r = t2r.transformed(0, (target[0] - pi[0], target[1] - pi[1]))
    wire = [(po.position[0] + i * v[0], po.position[1] + i * v[1]) for i in range(1, k + 1)]
    pts = tuple(t1.points) + tuple(wire) + tuple(t2r.points)
    ports = tuple(Port("a." + p.name, p.position, p.direction, p.role, p.charge_spec, p.turn)
                  for p in t1.ports if p.name != out_port)
    ports += tuple(Port("b." + p.name, p.position, p.direction, p.role, p.charge_spec, p.turn)
                   for p in t2r.ports if p.name != in_port)
    return GadgetTemplate(f"{t1.kind}+{t2.kind}", k, pts, ports, bbox(pts))


def compose(r1: ChargeRelation, out_name: str, r2: ChargeRelation, in_name: str) -> dict:
    """Relational composition feeding ``r1``'s output ``out_name`` into ``r2``'s input ``in_name``.

    Returns {r1 inputs + other r2 inputs: set of (other r1 outputs + r2 outputs)}.
    """
    oi = r1.outputs.index(out_name)
    ii = r2.inputs.index(in_name)
    out: dict = {}
    for a, outs in r1.table.items():
        for o in outs:
            for b, outs2 in r2.table.items():
                if b[ii] != o[oi]:
                    continue
                key = a + b[:ii] + b[ii + 1:]
                for o2 in outs2:
                    out.setdefault(key, set()).add(o[:oi] + o[oi + 1:] + o2)
    return out
