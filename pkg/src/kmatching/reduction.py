"""Formula -> point set: refine the grid drawing, place gadgets, tile the wires.

Every incidence edge becomes one wire (k = 3) or two parallel wires one unit
either side of the refined edge path (k > 3). A wire's point count is padded to
a multiple of k, so it carries the charge emitted at its variable end
unchanged to its clause end. Gadgets are rotated so that their unused side
faces the direction the drawing leaves free at that vertex.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import exact_cover
from .formula import Formula, incidence_graph
from .gadget import GadgetTemplate, Port, has_hamiltonian_path, proximity_graph, stub_points
from .gadgets3 import clause_gadget3, variable_gadget3
from .gadgets_k import LEFT, OPP, RIGHT, _bump_depth, clause_gadget_k, halves, variable_gadget_k
from .geometry import DIRS, add, connected_subsets, dir_of, rotate, rotate_dir
from .layout import polyline, walk
from .matcher import Matching, block_is_tight
from .planar_embed import GridEmbedding


class ReductionError(ValueError):
    pass


class PlacementConflict(ReductionError):
    """Gadgets or wires collide; the refinement factor is too small for this drawing."""


class WitnessError(ReductionError):
    """No tight matching exists for the requested gadget states (assignment not satisfying)."""


class DecodeError(ReductionError):
    pass


@dataclass
class GadgetInstance:
    name: str  # "x3" or "C2"
    index: int  # variable or clause index (0-based)
    template: GadgetTemplate  # placed copy
    quarter_turns: int


@dataclass
class WireInstance:
    name: str
    variable: int
    clause: int
    var_port: str
    clause_port: str
    points: list  # variable end first, leaf included right after its attachment point
    leaves: tuple = ()  # indices into points that hold leaf points


@dataclass
class ReductionOutput:
    formula: Formula
    k: int
    mode: str  # "grid" or "path"
    points: tuple
    provenance: tuple  # per point: gadget or wire name
    variables: list = field(default_factory=list)
    clauses: list = field(default_factory=list)
    wires: list = field(default_factory=list)
    refinement: int = 0
    digits: int | None = None  # t, path mode only
    meta: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.points) // self.k

    @property
    def target_weight(self) -> Fraction:
        return Fraction((self.k - 1) * self.m)

    @property
    def port_graph(self) -> list[tuple]:
        """(variable gadget, port, wire, clause gadget, port) per wire."""
        return [(self.variables[w.variable].name, w.var_port, w.name,
                 self.clauses[w.clause].name, w.clause_port) for w in self.wires]

    def index(self) -> dict:
        return {p: i for i, p in enumerate(self.points)}


# ---------------------------------------------------------------------------
# gadget choice

def _templates(k: int, mode: str, digits: int | None):
    """(variable template, clause factory, variable centre, clause centre, unused sides)."""
    if k == 3:
        return (variable_gadget3(), clause_gadget3, (8, 8), (9, 9), "W", "S")
    var = variable_gadget_k(k)
    s = var.footprint[2]
    c = (s - 2) // 2
    if mode == "path" and k % 2 == 1 and k >= 7:
        from .path_variant import clause_gadget_path

        def clause(pol):
            return clause_gadget_path(k, pol, digits)
    else:
        def clause(pol):
            return clause_gadget_k(k, pol)
    return var, clause, (s // 2, s // 2), (c, c), "W", "S"


def default_refinement(k: int) -> int:
    if k == 3:
        return 40
    s = variable_gadget_k(k).footprint[2]
    return s + 4 * k + 24


def _place(t: GadgetTemplate, centre, target, unused: str, free: str) -> tuple[GadgetTemplate, int]:
    q = next(q for q in range(4) if rotate_dir(unused, q) == free)
    rc = rotate(centre, q)
    return t.transformed(q, (target[0] - rc[0], target[1] - rc[1])), q


def _side_ports(t: GadgetTemplate) -> dict:
    """Outward direction -> ports on that side, ordered (L, R) for k > 3."""
    out: dict = {}
    for p in t.ports:
        out.setdefault(p.direction, []).append(p)
    for d, ps in out.items():
        ps.sort(key=lambda p: p.name)  # "L0" < "R0", "l1" < "r1"; k = 3 has one port per side
    return out


# ---------------------------------------------------------------------------
# wires

def _offset_polyline(corners, o: int):
    """Corners of the polyline shifted ``o`` units to the right of travel."""
    dirs = [dir_of(_unit(a, b)) for a, b in zip(corners, corners[1:])]
    out = []
    for i, p in enumerate(corners):
        if i == 0:
            r = DIRS[RIGHT[dirs[0]]]
        elif i == len(corners) - 1:
            r = DIRS[RIGHT[dirs[-1]]]
        else:
            a, b = DIRS[RIGHT[dirs[i - 1]]], DIRS[RIGHT[dirs[i]]]
            r = (a[0] + b[0], a[1] + b[1]) if dirs[i - 1] != dirs[i] else a
        out.append((p[0] + o * r[0], p[1] + o * r[1]))
    return out, dirs


def _unit(a, b):
    dx, dy = b[0] - a[0], b[1] - a[1]
    return ((dx > 0) - (dx < 0), (dy > 0) - (dy < 0))


def _project(p, line_pts, d0):
    """Position of ``p`` along the ray of a straight segment, or None if off the line."""
    a = line_pts
    v = DIRS[d0]
    dx, dy = p[0] - a[0], p[1] - a[1]
    if dx * v[1] - dy * v[0]:
        return None
    return dx * v[0] + dy * v[1]


def _seg_len(a, b) -> int:
    return abs(b[0] - a[0]) + abs(b[1] - a[1])


def _wire_points(start, end, corners, k: int, o: int, label: str):
    """Lattice path start -> end through the interior ``corners``, padded to 0 mod k.

    Padding is a bump of depth b (+2b points) in the middle of the longest
    straight run and, for even k when parity demands, one leaf (+1 point) at a
    path index = 0 mod k, where it only rules out charge 1. Both go to the side
    away from the partner wire (``o`` > 0: right of travel). Returns (points
    with the leaf inserted after its attachment point, leaf indices).
    """
    pts = polyline([start] + list(corners) + [end])
    dirs = [None] + [dir_of(_unit(a, b)) for a, b in zip(pts, pts[1:])]
    n = len(pts)
    deficit = (-n) % k
    leaf = deficit % 2 if k % 2 == 0 else 0
    b = _bump_depth(deficit - leaf, k)
    if not (b or leaf):
        return pts, ()
    # straight runs: maximal index ranges [a, z] with equal incoming direction
    runs = []
    i = 1
    while i < n:
        j = i
        while j + 1 < n and dirs[j + 1] == dirs[i]:
            j += 1
        runs.append((i, j))
        i = j + 1
    guard = k + 2  # keep padding clear of the ports' stub points
    usable = [(max(a, guard), min(z, n - 1 - guard)) for a, z in runs]
    usable = [(a, z) for a, z in usable if z - a >= 2 * k + 12]
    if not usable:
        raise PlacementConflict(f"{label}: no straight run long enough for padding")
    a, z = max(usable, key=lambda r: (r[1] - r[0], -r[0]))
    d = dirs[a + 1]
    side = RIGHT[d] if o > 0 else LEFT[d]
    out = list(pts)
    j = (a + z) // 2 - 2
    if b:
        detour = walk(pts[j], [(side, b), (d, 3), (OPP[side], b - 1)])
        out = pts[:j + 1] + detour + pts[j + 3:]
    if not leaf:
        return out, ()
    shift = 2 * b
    # original indices i > j + 6 sit at i + shift in ``out``
    for i in range(j + 7, z - 1):
        if (i + shift) % k == 0:
            at = i + shift
            break
    else:
        raise PlacementConflict(f"{label}: no site for the parity leaf")
    out = out[:at + 1] + [add(out[at], DIRS[side])] + out[at + 1:]
    return out, (at + 1,)


# ---------------------------------------------------------------------------
# reduce

def reduce(f: Formula, emb: GridEmbedding, k: int, mode: str = "grid",
           refinement: int | None = None, digits: int | None = None) -> ReductionOutput:
    """Build S_psi. With ``refinement=None`` a default factor is tried and then enlarged
    on placement conflicts; an explicit factor raises :class:`PlacementConflict`."""
    if k < 3:
        raise ReductionError("k must be at least 3")
    if mode not in ("grid", "path"):
        raise ReductionError(f"unknown mode {mode!r}")
    if mode == "path" and k % 2 == 1 and k >= 7 and digits is None:
        from .path_variant import choose_precision, triangle_count
        digits = choose_precision(triangle_count(f), k)[0]
    if refinement is not None:
        return _reduce(f, emb, k, mode, refinement, digits)
    F = default_refinement(k)
    last = None
    for _ in range(4):
        try:
            return _reduce(f, emb, k, mode, F, digits)
        except PlacementConflict as e:
            last = e
            F = F * 3 // 2
    raise last


def _reduce(f, emb, k, mode, F, digits) -> ReductionOutput:
    g = incidence_graph(f)
    var_t, clause_f, vc, cc, var_unused, cl_unused = _templates(k, mode, digits)
    clause_ts = {}

    def free_dir(node):
        used = {emb.initial_direction(node, nb) for nb in _neighbours(g, node)}
        rest = [d for d in "ENWS" if d not in used]
        if len(used) != 3 or len(rest) != 1:
            raise ReductionError(f"vertex {node} needs degree 3 in the drawing")
        return rest[0]

    red = ReductionOutput(f, k, mode, (), (), refinement=F, digits=digits)
    for i in range(f.num_vars):
        node = ("v", i)
        pos = emb.vertex_pos[node]
        t, q = _place(var_t, vc, (pos[0] * F, pos[1] * F), var_unused, free_dir(node))
        red.variables.append(GadgetInstance(f"x{i + 1}", i, t, q))
    for j, c in enumerate(f.clauses):
        node = ("c", j)
        pos = emb.vertex_pos[node]
        base = clause_ts.setdefault(c.polarity.value, clause_f(c.polarity.value))
        t, q = _place(base, cc, (pos[0] * F, pos[1] * F), cl_unused, free_dir(node))
        red.clauses.append(GadgetInstance(f"C{j + 1}", j, t, q))
    _check_footprints(red.variables + red.clauses)

    for (vi, cj) in g.edges:
        corners = [(x * F, y * F) for x, y in emb.path(("v", vi), ("c", cj))]
        d0 = dir_of(_unit(corners[0], corners[1]))
        d1 = dir_of(_unit(corners[-2], corners[-1]))
        vports = _side_ports(red.variables[vi].template)[d0]
        cports = _side_ports(red.clauses[cj].template)[OPP[d1]]
        offsets = (0,) if k == 3 else (1, -1)  # L wire on the right of travel
        for o, vp, cp in zip(offsets, vports, cports):
            shifted, _ = _offset_polyline(corners, o)
            start = add(vp.position, DIRS[vp.direction])
            end = add(cp.position, DIRS[cp.direction])
            label = f"{red.variables[vi].name}.{vp.name}-{red.clauses[cj].name}.{cp.name}"
            # both ends must lie on the first/last segment, before its far corner
            s0 = _project(start, shifted[0], d0)
            s1 = _project(end, shifted[-1], OPP[d1])
            if s0 is None or s1 is None:
                raise PlacementConflict(f"{label}: port off the wire line")
            if max(s0, s1) + k > _seg_len(shifted[0], shifted[1]) or \
                    (len(shifted) == 2 and s0 + s1 + 2 * k > _seg_len(shifted[0], shifted[1])):
                raise PlacementConflict(f"{label}: gadget reaches past the first bend")
            pts, leaves = _wire_points(start, end, shifted[1:-1], k, o, label)
            red.wires.append(WireInstance(label, vi, cj, vp.name, cp.name, pts, leaves))
            for g_inst, port, tail in ((red.variables[vi], vp, pts[:k - 1]),
                                       (red.clauses[cj], cp, pts[::-1][:k - 1])):
                if stub_points(port, k) != tail:
                    raise PlacementConflict(f"{label}: wire end is not straight at {g_inst.name}.{port.name}")

    points, prov = [], []
    for gi in red.variables + red.clauses:
        points += gi.template.points
        prov += [gi.name] * len(gi.template.points)
    for w in red.wires:
        points += w.points
        prov += [w.name] * len(w.points)
    # A satisfying assignment yields a tight matching, so |S| = 0 mod k whenever
    # the formula is satisfiable. Otherwise pad with fewer than k isolated
    # points: they can only join a block reaching far away, so no tight
    # matching appears and the point count stays a multiple of k.
    pad = (-len(points)) % k
    if pad:
        x1 = max(p[0] for p in points) + 3
        y0 = min(p[1] for p in points)
        points += [(x1 + i, y0) for i in range(pad)]
        prov += ["pad"] * pad
    red.points, red.provenance = tuple(points), tuple(prov)
    if len(set(points)) != len(points):
        raise PlacementConflict("two components share a point")
    _check_contacts(red)
    return red


def _neighbours(g, node):
    side = 0 if node[0] == "v" else 1
    other = "c" if node[0] == "v" else "v"
    return [(other, e[1 - side]) for e in g.edges if e[side] == node[1]]


def _check_footprints(insts) -> None:
    boxes = [(gi.name, gi.template.footprint) for gi in insts]
    for a in range(len(boxes)):
        for b in range(a + 1, len(boxes)):
            (na, A), (nb, B) = boxes[a], boxes[b]
            if A[0] <= B[2] and B[0] <= A[2] and A[1] <= B[3] and B[1] <= A[3]:
                raise PlacementConflict(f"footprints of {na} and {nb} overlap")


def _check_contacts(red: ReductionOutput) -> None:
    """Only intended unit contacts may occur between different components."""
    owner = {}
    for p, name in zip(red.points, red.provenance):
        if _is_int(p):
            owner[p] = name
    allowed = set()
    for w in red.wires:
        vp = red.variables[w.variable].template.port(w.var_port).position
        cp = red.clauses[w.clause].template.port(w.clause_port).position
        allowed.add(frozenset((vp, w.points[0])))
        allowed.add(frozenset((cp, w.points[-1])))
    for p, name in owner.items():
        for d in DIRS.values():
            q = (p[0] + d[0], p[1] + d[1])
            other = owner.get(q)
            if other is not None and other != name and frozenset((p, q)) not in allowed:
                raise PlacementConflict(f"unintended contact between {name} and {other} at {p}-{q}")
    # off-grid points may only be near points of their own gadget
    for p, name in zip(red.points, red.provenance):
        if _is_int(p):
            continue
        x0, y0 = math.floor(p[0]), math.floor(p[1])
        for q in ((x0 + i, y0 + j) for i in range(-1, 3) for j in range(-1, 3)):
            other = owner.get(q)
            if other is not None and other != name and (p[0] - q[0]) ** 2 + (p[1] - q[1]) ** 2 <= 2:
                raise PlacementConflict(f"off-grid point {p} of {name} is near {other}")
    # within a wire only path neighbours and the leaf attachment may touch
    for w in red.wires:
        idx = {p: i for i, p in enumerate(w.points)}
        allowed_w = {(i, i + 1) for i in range(len(w.points) - 1)}
        for lf in w.leaves:
            allowed_w.discard((lf, lf + 1))
            allowed_w.add((lf - 1, lf + 1))
        for i, p in enumerate(w.points):
            for d in DIRS.values():
                j = idx.get((p[0] + d[0], p[1] + d[1]))
                if j is not None and j > i and (i, j) not in allowed_w:
                    raise PlacementConflict(f"{w.name} touches itself at {p}")
        for i, j in allowed_w:
            p, q = w.points[i], w.points[j]
            if abs(p[0] - q[0]) + abs(p[1] - q[1]) != 1:
                raise AssertionError(f"{w.name}: broken path at {p}-{q}")


def _is_int(p) -> bool:
    return all(isinstance(c, int) or (isinstance(c, Fraction) and c.denominator == 1) for c in p)


# ---------------------------------------------------------------------------
# witness matchings and decoding

def gadget_witness(t: GadgetTemplate, absorbed: dict, budget: float | None = 120.0,
                   mode: str = "grid") -> list[frozenset]:
    """One tight matching of ``t`` plus, per port, its first ``absorbed[port]`` stub points.

    In path mode only blocks with a Hamiltonian path in the proximity graph are used.

    Raises :class:`WitnessError` when no such matching exists.
    """
    k = t.k
    extra = []
    for port in t.ports:
        extra += stub_points(port, k)[:absorbed.get(port.name, 0)]
    pts = list(t.points) + extra
    gadget = set(t.points)
    threshold2 = t.meta.get("adjacency_threshold2", 1)
    adj = proximity_graph(pts, threshold2)
    blocks = [b for b in connected_subsets(adj, k) if b & gadget]
    path_ok = t.meta.get("block_filter")
    if path_ok is not None:
        blocks = [b for b in blocks if path_ok(b)]
    if mode == "path":
        blocks = [b for b in blocks if has_hamiltonian_path(b, adj)]
    rows = {i: sorted(b) for i, b in enumerate(blocks)}
    for sol in exact_cover.solve(rows, sorted(pts), limit=1, budget=budget):
        return [blocks[r] for r in sol]
    raise WitnessError(f"{t.kind}: no tight matching with absorbed counts {absorbed}")


def _variable_state(red: ReductionOutput, value: bool) -> tuple:
    t = red.variables[0].template
    if red.k == 3:
        return tuple(int(value) for _ in t.ports)
    return tuple(t.meta["true_state"]) if value else tuple(0 for _ in t.ports)


def witness_matching(red: ReductionOutput, values) -> Matching:
    """Tight matching realising the assignment ``values``.

    Each variable gadget takes its true or false state, every wire passes the
    emitted charge on, and each clause gadget is solved for the charges that
    arrive. An unsatisfied clause has no tight completion: :class:`WitnessError`.
    """
    f, k = red.formula, red.k
    if len(values) != f.num_vars:
        raise WitnessError("assignment length differs from the variable count")
    index = red.index()
    blocks: list[frozenset] = []
    charge = {}  # wire name -> charge
    for gi in red.variables:
        state = _variable_state(red, bool(values[gi.index]))
        for port, c in zip(gi.template.ports, state):
            charge[(gi.name, port.name)] = c
    arriving: dict = {gi.name: {} for gi in red.clauses}
    for w in red.wires:
        c = charge[(red.variables[w.variable].name, w.var_port)]
        arriving[red.clauses[w.clause].name][w.clause_port] = c
        tail = (k - c) % k
        body = w.points[c:len(w.points) - tail]
        blocks += [frozenset(body[i:i + k]) for i in range(0, len(body), k)]
    for gi in red.variables:
        t = gi.template
        absorbed = {p.name: charge[(gi.name, p.name)] for p in t.ports}
        blocks += gadget_witness(t, absorbed, mode=red.mode)
    for gi in red.clauses:
        t = gi.template
        absorbed = {p.name: p.absorbed(arriving[gi.name][p.name], k) for p in t.ports}
        try:
            blocks += gadget_witness(t, absorbed, mode=red.mode)
        except WitnessError:
            raise WitnessError(f"clause {gi.name} is not satisfied by the assignment") from None
    try:
        idx_blocks = [[index[p] for p in b] for b in blocks]
    except KeyError as e:
        raise AssertionError(f"witness block uses a point outside S: {e}") from None
    covered = sorted(i for b in idx_blocks for i in b)
    if covered != list(range(len(red.points))):
        raise AssertionError("witness blocks do not partition the point set")
    return Matching(idx_blocks, None, "path" if red.mode == "path" else "mst")


def decode_assignment(red: ReductionOutput, match: Matching) -> tuple[bool, ...]:
    """Read each variable gadget's boundary state from a tight matching."""
    k = red.k
    pts = red.points
    n = len(pts)
    if sorted(i for b in match.blocks for i in b) != list(range(n)):
        raise DecodeError("blocks do not partition the point set")
    block_of = {}
    for bi, b in enumerate(match.blocks):
        if len(b) != k:
            raise DecodeError(f"block {bi} has {len(b)} points, not {k}")
        for i in b:
            block_of[i] = bi
    _require_tight(red, match)
    index = red.index()
    gadget_blocks = {}
    for gi in red.variables:
        gadget_blocks[gi.name] = {block_of[index[p]] for p in gi.template.points}
    readings = {gi.name: {} for gi in red.variables}
    for w in red.wires:
        vname = red.variables[w.variable].name
        mine = gadget_blocks[vname]
        absorbed = 0
        for p in w.points:
            if block_of[index[p]] in mine:
                absorbed += 1
            else:
                break
        readings[vname][w.var_port] = absorbed
    out = []
    for gi in red.variables:
        t = gi.template
        state = tuple(p.charge(readings[gi.name][p.name], k) for p in t.ports)
        if state == _variable_state(red, True):
            out.append(True)
        elif state == _variable_state(red, False):
            out.append(False)
        else:
            raise DecodeError(f"variable gadget {gi.name} is in no certified state: {state}")
    values = tuple(out)
    if not red.formula.satisfied(values):
        raise DecodeError("decoded assignment violates a clause; certification or solver bug")
    return values


def _require_tight(red: ReductionOutput, match: Matching) -> None:
    """Every block must have the minimum possible weight k-1."""
    for bi, b in enumerate(match.blocks):
        if not block_is_tight([red.points[i] for i in b], red.k, red.mode):
            raise DecodeError(f"block {bi} is not tight: matching weight exceeds the target")


# ---------------------------------------------------------------------------
# point-set files

POINTS_HEADER = "# kmatching points"


@dataclass
class PointSet:
    """A k-matching instance as stored on disk."""
    k: int
    mode: str
    points: tuple
    target: Fraction  # acceptance threshold W
    digits: int | None = None  # fixed fractional digits (path mode with off-grid points)

    @property
    def m(self) -> int:
        return len(self.points) // self.k


def point_set(red: ReductionOutput) -> PointSet:
    """Instance of ``red`` with its threshold: (k-1)m, plus 1/5 in path mode."""
    target = red.target_weight + (Fraction(1, 5) if red.mode == "path" else 0)
    return PointSet(red.k, red.mode, red.points, target, red.digits)


def _fixed(c, t: int) -> str:
    c = Fraction(c)
    scaled = c * 10 ** t
    if scaled.denominator != 1:
        raise ValueError(f"coordinate {c} needs more than {t} digits")
    n = scaled.numerator
    sign, n = ("-" if n < 0 else ""), abs(n)
    return f"{sign}{n // 10 ** t}.{n % 10 ** t:0{t}d}"


def dumps_points(ps: PointSet | ReductionOutput) -> str:
    if isinstance(ps, ReductionOutput):
        ps = point_set(ps)
    head = f"{POINTS_HEADER} k={ps.k} mode={ps.mode} count={len(ps.points)} target={ps.target}"
    if ps.digits is not None:
        head += f" t={ps.digits}"
    lines = [head]
    for p in ps.points:
        if ps.digits is None:
            if not _is_int(p):
                raise ValueError(f"off-grid point {p} needs a digit count")
            lines.append(f"{int(p[0])} {int(p[1])}")
        else:
            lines.append(f"{_fixed(p[0], ps.digits)} {_fixed(p[1], ps.digits)}")
    return "\n".join(lines) + "\n"


def _num(s: str):
    v = Fraction(s)
    return int(v) if v.denominator == 1 else v


def loads_points(text: str) -> PointSet:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(POINTS_HEADER):
        raise ValueError("missing point-set header")
    try:
        fields = dict(tok.split("=", 1) for tok in lines[0][len(POINTS_HEADER):].split())
        k, mode, count = int(fields["k"]), fields["mode"], int(fields["count"])
        target = Fraction(fields["target"])
        digits = int(fields["t"]) if "t" in fields else None
    except (KeyError, ValueError) as e:
        raise ValueError(f"bad point-set header: {lines[0]!r}") from e
    pts = []
    for lineno, raw in enumerate(lines[1:], 2):
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected two coordinates")
        pts.append((_num(parts[0]), _num(parts[1])))
    if len(pts) != count:
        raise ValueError(f"header says {count} points, file has {len(pts)}")
    return PointSet(k, mode, tuple(pts), target, digits)


def dumps_provenance(red: ReductionOutput) -> str:
    """Sidecar: one ``index owner`` line per point (owner = gadget, wire or pad)."""
    return "".join(f"{i} {name}\n" for i, name in enumerate(red.provenance))


def loads_provenance(text: str) -> list[str]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        i, name = raw.split(" ", 1)
        if int(i) != len(out):
            raise ValueError(f"line {lineno}: index {i} out of order")
        out.append(name)
    return out
