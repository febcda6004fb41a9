"""Gadget templates, ports and the exhaustive boundary-state certifier."""
from __future__ import annotations

import hashlib
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import exact_cover
from .geometry import DIRS, Point, add, connected_subsets, rotate, rotate_dir

ROLES = ("variable-out", "clause-in", "wire", "in", "out")


@dataclass(frozen=True)
class Port:
    """Attachment site: ``position`` is the gadget's last point, ``direction``
    the outward normal. ``role`` decides how absorbed counts become charges."""

    name: str
    position: Point
    direction: str
    role: str
    charge_spec: frozenset = frozenset()
    turn: str | None = None  # outside wire bends here after its first point

    def charge(self, absorbed: int, k: int) -> int:
        """Charge in the forward wire direction, given the number of outside
        points that share a block with gadget points at this port."""
        if self.role in ("variable-out", "out"):
            return absorbed
        return (k - absorbed) % k

    def absorbed(self, charge: int, k: int) -> int:
        if self.role in ("variable-out", "out"):
            return charge
        return (k - charge) % k


@dataclass(frozen=True)
class GadgetTemplate:
    kind: str
    k: int
    points: tuple
    ports: tuple
    footprint: tuple  # (x0, y0, x1, y1)
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if len(set(self.points)) != len(self.points):
            raise ValueError(f"{self.kind}: duplicate points")
        pts = set(self.points)
        for p in self.ports:
            if p.position not in pts:
                raise ValueError(f"{self.kind}: port {p.name} not on a gadget point")

    def port(self, name: str) -> Port:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(name)

    def transformed(self, quarter_turns: int = 0, offset: Point = (0, 0)) -> GadgetTemplate:
        """Rotated (counter-clockwise) then translated copy."""
        f = lambda p: add(rotate(p, quarter_turns), offset)  # noqa: E731
        ports = tuple(
            Port(p.name, f(p.position), rotate_dir(p.direction, quarter_turns), p.role, p.charge_spec,
                 rotate_dir(p.turn, quarter_turns) if p.turn else None)
            for p in self.ports
        )
        corners = [f((self.footprint[0], self.footprint[1])), f((self.footprint[2], self.footprint[3]))]
        xs, ys = zip(*corners)
        return GadgetTemplate(self.kind, self.k, tuple(f(p) for p in self.points), ports,
                              (min(xs), min(ys), max(xs), max(ys)), dict(self.meta))

    def checksum(self) -> str:
        return hashlib.sha256(dump_template(self).encode()).hexdigest()[:16]

    def min_distance_ok(self) -> bool:
        """Pairwise distances are at least one (trivially true for distinct grid points)."""
        if all(isinstance(c, int) for p in self.points for c in p):
            return True
        return all((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 >= 1 for a, b in combinations(self.points, 2))


@dataclass
class Certification:
    kind: str
    k: int
    mode: str
    port_names: tuple
    feasible: dict  # state tuple -> number of internal matchings
    infeasible: list  # admissible states with no matching
    nonpath_only: list = field(default_factory=list)  # states feasible only via non-path blocks
    checksum: str = ""
    specs: tuple = ()
    witnesses: dict = field(default_factory=dict, repr=False)  # state -> one matching; blocks may hold stub points

    @property
    def feasible_states(self) -> set:
        return set(self.feasible)

    def admissible_feasible(self) -> set:
        """Feasible states whose every charge lies in its port's charge_spec."""
        return {s for s in self.feasible
                if all(not spec or c in spec for c, spec in zip(s, self.specs))}

    def report(self) -> str:
        lines = [f"gadget {self.kind} k={self.k} mode={self.mode} checksum={self.checksum}",
                 "ports " + " ".join(self.port_names),
                 f"feasible {len(self.feasible)}"]
        for s in sorted(self.feasible):
            lines.append("  " + " ".join(map(str, s)) + f"  matchings={self.feasible[s]}")
        if self.nonpath_only:
            lines.append(f"nonpath-only {len(self.nonpath_only)}")
            for s in sorted(self.nonpath_only):
                lines.append("  " + " ".join(map(str, s)))
        lines.append(f"infeasible-admissible {len(self.infeasible)}")
        return "\n".join(lines) + "\n"


def stub_points(port: Port, k: int) -> list:
    """The k-1 outside points a neighbouring wire would place next to the port."""
    d = DIRS[port.direction]
    first = (port.position[0] + d[0], port.position[1] + d[1])
    e = DIRS[port.turn] if port.turn else d
    return [first] + [(first[0] + j * e[0], first[1] + j * e[1]) for j in range(1, k - 1)]


def dist2(a, b):
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def proximity_graph(points, threshold2=1) -> dict:
    """Graph joining points at squared distance <= threshold2 (exact arithmetic)."""
    pts = sorted(set(points))
    adj = {p: [] for p in pts}
    if all(isinstance(c, int) for p in pts for c in p) and threshold2 == 1:
        s = set(pts)
        for p in pts:
            adj[p] = [q for q in ((p[0] + 1, p[1]), (p[0] - 1, p[1]), (p[0], p[1] + 1), (p[0], p[1] - 1)) if q in s]
        return adj
    r = math.isqrt(int(math.ceil(threshold2))) + 1
    cells = defaultdict(list)
    for p in pts:
        cells[(math.floor(p[0]), math.floor(p[1]))].append(p)
    for p in pts:
        cx, cy = math.floor(p[0]), math.floor(p[1])
        for dx in range(-r, r + 1):
            for dy in range(-r, r + 1):
                for q in cells.get((cx + dx, cy + dy), ()):
                    if q != p and dist2(p, q) <= threshold2:
                        adj[p].append(q)
    return adj


def has_hamiltonian_path(block, adj) -> bool:
    """True if the graph ``adj`` induced on ``block`` has a Hamiltonian path.

    On grid points this is exactly "minimum path weight k-1": a block is
    path-feasible iff its unit-distance graph can be traversed in one stroke.
    """
    nodes = list(block)
    idx = {p: i for i, p in enumerate(nodes)}
    nb = [[idx[q] for q in adj[p] if q in idx] for p in nodes]
    n = len(nodes)
    full = (1 << n) - 1
    # reachable[mask] = set of end vertices of paths covering mask
    frontier = {(1 << i, i) for i in range(n)}
    for _ in range(n - 1):
        frontier = {(m | 1 << j, j) for m, i in frontier for j in nb[i] if not m >> j & 1}
        if not frontier:
            return False
    return any(m == full for m, _ in frontier)


def is_path_block(block) -> bool:
    """Grid block whose unit-distance graph has a Hamiltonian path."""
    s = set(block)
    adj = {p: [q for q in ((p[0] + 1, p[1]), (p[0] - 1, p[1]), (p[0], p[1] + 1), (p[0], p[1] - 1)) if q in s]
           for p in s}
    return has_hamiltonian_path(s, adj)


def certify_gadget(t: GadgetTemplate, k: int | None = None, mode: str = "mst",
                   budget: float | None = 600.0, max_solutions: int = 2_000_000,
                   path_block=None, forced=()) -> Certification:
    """Enumerate every tight internal matching of ``t`` with wildcard port stubs.

    Each port gets k-1 outside pseudo-points along its outward direction; these
    are optional exact-cover columns, so a solution's use of them is exactly the
    absorbed count at that port. All solutions are enumerated once, which covers
    every boundary state in a single search.

    ``mode='path'`` keeps only blocks whose minimum path has weight k-1 (on grid
    points: the block's unit graph is a path); in that mode ``path_block`` may
    supply a custom predicate for non-grid gadgets. ``forced`` lists blocks that
    must appear in every counted matching.
    """
    k = t.k if k is None else k
    stubs = {}
    for port in t.ports:
        for j, q in enumerate(stub_points(port, k), start=1):
            if q in set(t.points) or q in stubs:
                raise ValueError(f"stub of port {port.name} collides at {q}")
            stubs[q] = (port.name, j)
    allpts = list(t.points) + list(stubs)
    gadget_set = set(t.points)
    threshold2 = t.meta.get("adjacency_threshold2", 1)
    adj = proximity_graph(allpts, threshold2)
    # stubs may only touch their own port
    for q, (name, _) in stubs.items():
        for r in adj[q]:
            if r in gadget_set and r != t.port(name).position:
                raise ValueError(f"stub of {name} touches gadget point {r}")
    blocks = [b for b in connected_subsets(adj, k) if b & gadget_set]
    weight_ok = t.meta.get("block_filter")
    if weight_ok is not None:
        blocks = [b for b in blocks if weight_ok(b)]
    for fb in forced:
        fb = frozenset(fb)
        blocks = [b for b in blocks if b == fb or not (b & fb)]
    nonpath = set()
    for i, b in enumerate(blocks):
        ok = path_block(b) if path_block is not None else has_hamiltonian_path(b, adj)
        if not ok:
            nonpath.add(i)
    rows = {i: list(b) for i, b in enumerate(blocks)}
    primary = sorted(gadget_set)
    secondary = sorted(stubs)
    feasible: Counter = Counter()
    witnesses: dict = {}
    path_feasible: set = set()
    sols = exact_cover.solve(rows, primary, secondary, limit=max_solutions, budget=budget)
    names = tuple(p.name for p in t.ports)
    for sol in sols:
        used = Counter()
        for r in sol:
            for q in blocks[r]:
                if q in stubs:
                    used[stubs[q][0]] += 1
        state = tuple(t.port(n).charge(used[n], k) for n in names)
        feasible[state] += 1
        is_path = not any(r in nonpath for r in sol)
        if state not in witnesses and (is_path or mode != "path"):
            witnesses[state] = [frozenset(blocks[r]) for r in sol]
        if is_path:
            path_feasible.add(state)
    nonpath_only = [s for s in feasible if s not in path_feasible]
    if mode == "path":
        feas = {s: c for s, c in feasible.items() if s in path_feasible}
    else:
        feas = dict(feasible)
    admissible = _admissible_states(t, k)
    infeasible = [s for s in admissible if s not in feas]
    return Certification(t.kind, k, mode, names, feas, infeasible, sorted(nonpath_only), t.checksum(),
                         tuple(p.charge_spec for p in t.ports),
                         {s: w for s, w in witnesses.items() if s in feas})


def _admissible_states(t: GadgetTemplate, k: int) -> list:
    specs = [sorted(p.charge_spec) if p.charge_spec else list(range(k)) for p in t.ports]
    total = 1
    for s in specs:
        total *= len(s)
    if total > 200_000:
        return []
    from itertools import product
    return [s for s in product(*specs)]


# --- text format --------------------------------------------------------------

def _fmt(c) -> str:
    return str(c) if not isinstance(c, Fraction) or c.denominator != 1 else str(c.numerator)


def _parse_num(s: str):
    return int(s) if "/" not in s and "." not in s else Fraction(s)


def dump_template(t: GadgetTemplate) -> str:
    out = ["# kmatching gadget v1", f"kind {t.kind}", f"k {t.k}",
           "footprint " + " ".join(_fmt(c) for c in t.footprint)]
    if "adjacency_threshold2" in t.meta:
        out.append(f"adjacency2 {_fmt(Fraction(t.meta['adjacency_threshold2']))}")
    for p in t.ports:
        spec = ",".join(str(c) for c in sorted(p.charge_spec)) or "*"
        turn = f" {p.turn}" if p.turn else ""
        out.append(f"port {p.name} {_fmt(p.position[0])} {_fmt(p.position[1])} {p.direction} {p.role} {spec}{turn}")
    for q in t.points:
        out.append(f"point {_fmt(q[0])} {_fmt(q[1])}")
    return "\n".join(out) + "\n"


def load_template(text: str) -> GadgetTemplate:
    kind, k, fp = None, None, None
    ports, points, meta = [], [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] == "kind":
            kind = tok[1]
        elif tok[0] == "k":
            k = int(tok[1])
        elif tok[0] == "footprint":
            fp = tuple(_parse_num(x) for x in tok[1:5])
        elif tok[0] == "adjacency2":
            meta["adjacency_threshold2"] = Fraction(tok[1])
        elif tok[0] == "port":
            spec = frozenset() if tok[6] == "*" else frozenset(int(x) for x in tok[6].split(","))
            ports.append(Port(tok[1], (_parse_num(tok[2]), _parse_num(tok[3])), tok[4], tok[5], spec,
                              tok[7] if len(tok) > 7 else None))
        elif tok[0] == "point":
            points.append((_parse_num(tok[1]), _parse_num(tok[2])))
        else:
            raise ValueError(f"line {lineno}: unknown record {tok[0]!r}")
    if kind is None or k is None or fp is None:
        raise ValueError("gadget file lacks kind, k or footprint")
    return GadgetTemplate(kind, k, tuple(points), tuple(ports), fp, meta)
