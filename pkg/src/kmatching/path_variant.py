"""Path-weight variant: a Delta network whose tight blocks are always paths.

For odd k >= 7 the grid Delta network admits a tight T-shaped block. Here the
junction becomes a unit triangle u1, u2, v1 with v1 off the grid, and a second
off-grid point v2 joins v1 to the east arm. Off-grid coordinates are rounded
(half to even) to t decimal digits; the four near-unit edges then deviate from
1 by at most a certified epsilon.
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from fractions import Fraction

import mpmath
from mpmath import libmp

from .gadget import GadgetTemplate, Port
from .matcher import iv_workdps
from .gadgets_k import clause_gadget_k, halves, variable_gadget_k

NEAR_UNIT2 = Fraction(36, 25)  # pairs closer than 1.2 count as edges
SLACK = Fraction(1, 5)
MAX_DIGITS = 60


class PrecisionError(ValueError):
    pass


@dataclass(frozen=True)
class EpsilonBudget:
    t: int
    epsilon: Fraction  # certified upper bound on |length - 1| over the four special edges
    n: int
    slack_used: Fraction  # 4 n epsilon
    long_gap: Fraction  # certified lower bound on (shortest non-edge distance) - 1

    @property
    def ok(self) -> bool:
        """Completeness needs 4 n eps < 0.2; soundness needs a single long edge
        to outweigh the slack: long_gap - 4 n eps > 0.2."""
        return self.slack_used < SLACK and self.long_gap - self.slack_used > SLACK


# ---------------------------------------------------------------------------
# exact geometry

def exact_points(dps: int = 60) -> dict:
    """u1, u2, u3, v1, v2 as mpmath values (not rounded)."""
    with mpmath.workdps(dps):
        r3 = mpmath.sqrt(3)
        a = (14 - 3 * r3 + mpmath.sqrt(12 * r3 - 17)) / (20 - 8 * r3)
        return {"u1": (mpmath.mpf(0), mpmath.mpf(1)), "u2": (mpmath.mpf(0), mpmath.mpf(0)),
                "u3": (mpmath.mpf(2), mpmath.mpf(0)), "v1": (r3 / 2, mpmath.mpf(1) / 2),
                "v2": (a, a * (4 - r3) - 3)}


def exact_distances(dps: int = 60) -> dict:
    p = exact_points(dps)
    with mpmath.workdps(dps):
        def d(x, y):
            return mpmath.sqrt((p[x][0] - p[y][0]) ** 2 + (p[x][1] - p[y][1]) ** 2)
        return {"v1v2": d("v1", "v2"), "v2u3": d("v2", "u3"), "v1u3": d("v1", "u3"),
                "v1u1": d("v1", "u1"), "v1u2": d("v1", "u2")}


def _round(x, t: int) -> Fraction:
    q = Decimal(1).scaleb(-t)
    return Fraction(Decimal(mpmath.nstr(x, t + 30, strip_zeros=False)).quantize(q, rounding=ROUND_HALF_EVEN))


def rounded_points(t: int) -> dict:
    """v1 and v2 rounded half-to-even to t digits; grid points exact."""
    if t < 1 or t > MAX_DIGITS:
        raise PrecisionError(f"digits {t} outside 1..{MAX_DIGITS}")
    p = exact_points(t + 40)
    return {"u1": (0, 1), "u2": (0, 0), "u3": (2, 0),
            "v1": (_round(p["v1"][0], t), _round(p["v1"][1], t)),
            "v2": (_round(p["v2"][0], t), _round(p["v2"][1], t))}


def _ends(iv) -> tuple[Fraction, Fraction]:
    """Exact rational endpoints of an mpmath interval."""
    return tuple(Fraction(*map(int, libmp.to_rational(e))) for e in iv._mpi_)


def _iv_len(a, b):
    dx, dy = Fraction(a[0]) - Fraction(b[0]), Fraction(a[1]) - Fraction(b[1])
    d2 = dx * dx + dy * dy
    return mpmath.iv.sqrt(mpmath.iv.mpf(d2.numerator) / d2.denominator)


SPECIAL_EDGES = (("v1", "u1"), ("v1", "u2"), ("v1", "v2"), ("v2", "u3"))


def epsilon_bound(t: int) -> tuple[Fraction, Fraction]:
    """(epsilon, long gap) for rounding at t digits, both certified by interval arithmetic.

    epsilon bounds |len - 1| over the special edges from above; the long gap
    bounds (v1u3 - 1) from below, v1u3 being the shortest non-edge pair.
    """
    p = rounded_points(t)
    with iv_workdps(2 * t + 30):
        eps = Fraction(0)
        for a, b in SPECIAL_EDGES:
            lo, hi = _ends(_iv_len(p[a], p[b]))
            eps = max(eps, abs(lo - 1), abs(hi - 1))
        gap = _ends(_iv_len(p["v1"], p["u3"]))[0] - 1
    return eps, gap


def choose_precision(n: int, k: int = 7, max_digits: int = 30) -> tuple[int, EpsilonBudget]:
    """Smallest t whose certified epsilon keeps n Delta networks within the 0.2 slack."""
    if n < 1:
        raise ValueError("n must be positive")
    for t in range(1, max_digits + 1):
        eps, gap = epsilon_bound(t)
        b = EpsilonBudget(t, eps, n, 4 * n * eps, gap)
        if b.ok:
            return t, b
    raise PrecisionError(f"no t <= {max_digits} meets the epsilon budget for n={n}")


# ---------------------------------------------------------------------------
# gadgets

def _triangle_layout(k: int, t: int):
    """Grid runs t1, t2, t3 and the off-grid points v1, v2 of the triangle junction."""
    if k % 2 == 0 or k < 7:
        raise ValueError("the triangle junction is for odd k >= 7; use the grid layout otherwise")
    p = rounded_points(t)
    eps, gap = epsilon_bound(t)
    if eps >= Fraction(1, 20) or gap <= SLACK:
        raise PrecisionError(f"{t} digits are too coarse for the triangle junction")
    H = halves(k)[1]
    t1 = [(0, 1 + i) for i in range(H)]
    t2 = [(0, -i) for i in range(H)]
    t3 = [(2 + i, 0) for i in range(2 * k - 2 * H - 2)]
    return t1, t2, t3, p["v1"], p["v2"], eps


def _triangle_template(kind: str, k: int, t: int, specs, out_role: str) -> GadgetTemplate:
    t1, t2, t3, v1, v2, eps = _triangle_layout(k, t)
    pts = tuple(t1 + t2 + t3 + [v1, v2])
    ports = (Port("w1", t1[-1], "N", "in", specs[0]), Port("w2", t2[-1], "S", "in", specs[1]),
             Port(specs[3], t3[-1], "E", out_role, specs[2]))
    xs = [Fraction(x) for x, _ in pts]
    ys = [Fraction(y) for _, y in pts]
    return GadgetTemplate(kind, k, pts, ports, (min(xs), min(ys), max(xs), max(ys)),
                          {"adjacency_threshold2": NEAR_UNIT2, "digits": t, "epsilon": eps})


def delta_network_path(k: int, t: int = 3) -> GadgetTemplate:
    """Delta network with a unit triangle u1 u2 v1 at the junction (origin at u2).

    t1: (0,1) up, ceil(k/2) points; t2: (0,0) down, ceil(k/2) points;
    t3: (2,0) east, 2k - 2 ceil(k/2) - 2 points; v1, v2 off the grid.
    Ports w1 (top, N), w2 (bottom, S), w3 (east end, E).
    """
    h, H = halves(k)
    spec = frozenset({0, h, H})
    return _triangle_template("delta_network_path", k, t, (spec, spec, spec, "w3"), "in")


def xor_enforcer_path(k: int, t: int = 3) -> GadgetTemplate:
    """XOR-enforcer on the same triangle layout, with ``out`` in place of w3.

    The grid enforcer shares the grid Delta layout and, for odd k >= 7, needs a
    T-shaped block for the state (floor(k/2), 0); this layout avoids it.
    """
    h, H = halves(k)
    every = frozenset(range(k))
    return _triangle_template("xor_enforcer_path", k, t,
                              (frozenset({0, h}), frozenset({0, H}), every, "out"), "out")


def clause_gadget_path(k: int, polarity: str, t: int | None = None) -> GadgetTemplate:
    """Clause gadget with triangle junctions in its Delta network and XOR-enforcers (odd k >= 7)."""
    t = 3 if t is None else t
    size = variable_gadget_k(k).footprint[2] - 2
    return clause_gadget_k(k, polarity, size, delta=delta_network_path(k, t),
                           enforcer_unit=xor_enforcer_path(k, t))


def triangle_count(f) -> int:
    """Triangle junctions in the path-variant instance of ``f``: one per clause plus three per negative clause."""
    return sum(4 if c.polarity == "negative" else 1 for c in f.clauses)


def accept_threshold(red) -> Fraction:
    """(k-1) m + 1/5 for a path-variant reduction."""
    if red.mode != "path":
        raise ValueError("accept_threshold applies to path-variant instances only")
    return Fraction((red.k - 1) * red.m) + SLACK


def special_edge_lengths(red) -> list:
    """Interval lengths of the four special edges in every Delta network of ``red``."""
    out = {}
    for gi in red.clauses:
        pts = gi.template.points
        off = [p for p in pts if not all(isinstance(x, int) for x in p)]
        with iv_workdps(60):
            for v in off:
                for q in pts:
                    dx, dy = Fraction(v[0]) - Fraction(q[0]), Fraction(v[1]) - Fraction(q[1])
                    if q != v and dx * dx + dy * dy <= NEAR_UNIT2:
                        out.setdefault(tuple(sorted((v, q))), _iv_len(v, q))
    return list(out.items())
