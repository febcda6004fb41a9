"""Weights of k-sets (MST and path), exact and heuristic k-matching solvers, verification.

Weights are kept exact as sums of square roots with rational coefficients
(:class:`SqrtSum`). Comparisons with a threshold are exact when no irrational
term survives and otherwise use certified interval arithmetic at escalating
precision, reporting "undecidable" instead of guessing.
"""
from __future__ import annotations

import enum
import itertools
import json
import math
import random
import time
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from . import exact_cover
from .exact_cover import BudgetExceeded
from .gadget import has_hamiltonian_path, proximity_graph
from .geometry import connected_subsets, is_connected

@contextmanager
def iv_workdps(dps: int):
    """Temporarily set the precision of mpmath's interval context."""
    old = mpmath.iv.prec
    mpmath.iv.dps = dps
    try:
        yield
    finally:
        mpmath.iv.prec = old


__all__ = [
    "BudgetExceeded", "SqrtSum", "CandidateSet", "Matching", "Verdict", "SizeError",
    "mst_weight", "mst_weight_kruskal", "path_weight", "candidate_sets", "exact_decide",
    "exact_solve_bruteforce", "greedy_local_search", "verify_matching", "block_is_tight",
]

MAX_DPS = 2000  # precision cap for interval comparisons (decimal digits)


class SizeError(ValueError):
    """Instance exceeds the size limit of a brute-force routine."""


# ---------------------------------------------------------------------------
# exact weights

def _split_square(n: int) -> tuple[int, int]:
    """n = a^2 * b with b free of small square factors; exact for n < 10^12."""
    if n == 0:
        return 0, 1
    r = math.isqrt(n)
    if r * r == n:
        return r, 1
    a, b = 1, n
    limit = 1000 if n > 10 ** 12 else math.isqrt(n) + 1
    p = 2
    while p * p <= b and p <= limit:
        while b % (p * p) == 0:
            b //= p * p
            a *= p
        p += 1
    r = math.isqrt(b)
    if r * r == b:
        return a * r, 1
    return a, b


@dataclass(frozen=True)
class SqrtSum:
    """Sum of c_i * sqrt(r_i) with rational c_i and integer radicands r_i (1 = rational part)."""

    terms: tuple = ()  # sorted ((radicand, Fraction coefficient), ...), zero terms dropped

    @staticmethod
    def of_sq(d2) -> SqrtSum:
        """sqrt of a non-negative rational."""
        d2 = Fraction(d2)
        if d2 < 0:
            raise ValueError("negative square")
        # sqrt(p/q) = sqrt(p*q) / q
        a, b = _split_square(d2.numerator * d2.denominator)
        return SqrtSum(((b, Fraction(a, d2.denominator)),)) if a else SqrtSum()

    @staticmethod
    def rational(x) -> SqrtSum:
        x = Fraction(x)
        return SqrtSum(((1, x),)) if x else SqrtSum()

    def __add__(self, other: SqrtSum) -> SqrtSum:
        c = Counter()
        for r, v in self.terms + other.terms:
            c[r] += v
        return SqrtSum(tuple(sorted((r, v) for r, v in c.items() if v)))

    def __neg__(self) -> SqrtSum:
        return SqrtSum(tuple((r, -v) for r, v in self.terms))

    def __sub__(self, other: SqrtSum) -> SqrtSum:
        return self + (-other)

    @property
    def is_rational(self) -> bool:
        return all(r == 1 for r, _ in self.terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("irrational weight")
        return sum((v for _, v in self.terms), Fraction(0))

    def interval(self, dps: int = 30):
        with iv_workdps(dps):
            total = mpmath.iv.mpf(0)
            for r, v in self.terms:
                total += mpmath.iv.sqrt(mpmath.iv.mpf(r)) * (mpmath.iv.mpf(v.numerator) / v.denominator)
            return total

    def __float__(self) -> float:
        return float(sum(float(v) * math.sqrt(r) for r, v in self.terms))

    def sign(self, max_dps: int = MAX_DPS) -> int | None:
        """-1, 0 or 1; None when intervals still straddle zero at ``max_dps`` digits.

        Zero is reported only when it is exact (no surviving terms)."""
        if not self.terms:
            return 0
        if self.is_rational:
            v = self.rational_value()
            return (v > 0) - (v < 0)
        dps = 30
        while dps <= max_dps:
            iv = self.interval(dps)
            if iv.a > 0:
                return 1
            if iv.b < 0:
                return -1
            dps *= 2
        return None

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.rational_value())
        parts = []
        for r, v in self.terms:
            parts.append(str(v) if r == 1 else f"{v}*sqrt({r})")
        return " + ".join(parts)

    def to_json(self):
        return [[r, str(v)] for r, v in self.terms]


def _d2(a, b):
    return (Fraction(a[0]) - Fraction(b[0])) ** 2 + (Fraction(a[1]) - Fraction(b[1])) ** 2 \
        if not (_is_int(a) and _is_int(b)) else (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def _is_int(p) -> bool:
    return isinstance(p[0], int) and isinstance(p[1], int)


def _mst_edges(points) -> list[tuple[int, int]]:
    """Prim's algorithm on exact squared distances (sqrt is monotone, so the tree is exact)."""
    n = len(points)
    if n <= 1:
        return []
    best = {j: (_d2(points[0], points[j]), 0) for j in range(1, n)}
    edges = []
    while best:
        j = min(best, key=lambda v: (best[v][0], v))
        d, i = best.pop(j)
        edges.append((i, j))
        for v in best:
            dv = _d2(points[j], points[v])
            if dv < best[v][0]:
                best[v] = (dv, j)
    return edges


def mst_weight(points) -> SqrtSum:
    """Exact Euclidean MST cost."""
    pts = list(points)
    total = SqrtSum()
    for i, j in _mst_edges(pts):
        total = total + SqrtSum.of_sq(_d2(pts[i], pts[j]))
    return total


def mst_weight_kruskal(points) -> SqrtSum:
    """Independent second MST algorithm (Kruskal with union-find), used as a cross-check."""
    pts = list(points)
    parent = list(range(len(pts)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    total = SqrtSum()
    for d, i, j in sorted((_d2(pts[i], pts[j]), i, j) for i, j in itertools.combinations(range(len(pts)), 2)):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            total = total + SqrtSum.of_sq(d)
    return total


def path_weight(points, max_size: int = 12) -> SqrtSum:
    """Exact minimum Hamiltonian path cost (Held-Karp over 50-digit values)."""
    pts = list(points)
    n = len(pts)
    if n > max_size:
        raise SizeError(f"{n} points exceed the path-weight limit {max_size}")
    if n <= 1:
        return SqrtSum()
    with mpmath.workdps(50):
        dist = [[mpmath.sqrt(mpmath.mpf(Fraction(_d2(a, b)).numerator) / Fraction(_d2(a, b)).denominator)
                 for b in pts] for a in pts]
        INF = mpmath.mpf("inf")
        dp = {(1 << i, i): (mpmath.mpf(0), None) for i in range(n)}
        for mask in range(1, 1 << n):
            for last in range(n):
                if (mask, last) not in dp:
                    continue
                cost = dp[(mask, last)][0]
                for nxt in range(n):
                    if mask >> nxt & 1:
                        continue
                    key = (mask | 1 << nxt, nxt)
                    c = cost + dist[last][nxt]
                    if c < dp.get(key, (INF,))[0]:
                        dp[key] = (c, last)
        full = (1 << n) - 1
        last = min(range(n), key=lambda i: dp[(full, i)][0])
    order = []
    mask = full
    while last is not None:
        order.append(last)
        prev = dp[(mask, last)][1]
        mask &= ~(1 << last)
        last = prev
    total = SqrtSum()
    for a, b in zip(order, order[1:]):
        total = total + SqrtSum.of_sq(_d2(pts[a], pts[b]))
    return total


def block_weight(points, mode: str = "mst") -> SqrtSum:
    return path_weight(points) if mode == "path" else mst_weight(points)


def block_is_tight(points, k: int, mode: str = "mst") -> bool:
    """Weight k-1 (grid points) or at most k-1 + 1/5 (path mode with off-grid points)."""
    pts = list(points)
    if all(_is_int(p) for p in pts):
        if mode == "path":
            s = set(pts)
            adj = {p: [q for q in ((p[0] + 1, p[1]), (p[0] - 1, p[1]), (p[0], p[1] + 1), (p[0], p[1] - 1))
                       if q in s] for p in s}
            return has_hamiltonian_path(s, adj)
        return is_connected(pts)
    return (block_weight(pts, mode) - SqrtSum.rational(Fraction(k - 1) + Fraction(1, 5))).sign() in (-1, 0)


# ---------------------------------------------------------------------------
# candidates

@dataclass(frozen=True)
class CandidateSet:
    indices: tuple
    weight: SqrtSum


def candidate_sets(points, k: int, per_block_bound=None, mode: str = "mst") -> list[CandidateSet]:
    """All k-subsets with weight <= ``per_block_bound`` (default k-1).

    On distinct grid points with bound k-1 these are exactly the k-minos, found
    by enumerating connected k-sets of the unit-distance graph. Otherwise every
    edge of an admissible tree or path is at most bound - (k-2)*dmin long, so
    admissible sets are connected in the proximity graph at that radius.
    """
    pts = list(points)
    bound = Fraction(k - 1) if per_block_bound is None else Fraction(per_block_bound)
    index = {p: i for i, p in enumerate(pts)}
    if len(index) != len(pts):
        raise ValueError("duplicate points")
    if all(_is_int(p) for p in pts) and bound == k - 1:
        adj = proximity_graph(pts, 1)
        out = []
        for b in connected_subsets(adj, k):
            idx = tuple(sorted(index[p] for p in b))
            if mode == "path" and not block_is_tight(b, k, "path"):
                continue
            out.append(CandidateSet(idx, SqrtSum.rational(k - 1)))
        return sorted(out, key=lambda c: c.indices)
    dmin2 = min((_d2(a, b) for a, b in itertools.combinations(pts, 2)), default=1)
    dmin = math.sqrt(float(dmin2))
    reach = float(bound) - (k - 2) * dmin + 1e-9
    if reach < 0:
        return []
    adj = proximity_graph(pts, Fraction(reach) ** 2 if reach else 0)
    out = []
    for b in connected_subsets(adj, k):
        w = block_weight(list(b), mode)
        if (w - SqrtSum.rational(bound)).sign() in (-1, 0):
            out.append(CandidateSet(tuple(sorted(index[p] for p in b)), w))
    return sorted(out, key=lambda c: c.indices)


# ---------------------------------------------------------------------------
# matchings and verification

@dataclass
class Matching:
    blocks: list  # sorted lists of point indices
    weight: SqrtSum | None = None
    mode: str = "mst"

    def __post_init__(self):
        self.blocks = sorted(sorted(b) for b in self.blocks)

    def check_partition(self, n: int, k: int) -> None:
        flat = sorted(i for b in self.blocks for i in b)
        if flat != list(range(n)) or any(len(b) != k for b in self.blocks):
            raise ValueError("blocks do not partition the points into k-sets")

    def dumps(self) -> str:
        lines = [f"# kmatching matching blocks={len(self.blocks)} mode={self.mode}"]
        lines += [" ".join(map(str, b)) for b in self.blocks]
        return "\n".join(lines) + "\n"

    @staticmethod
    def loads(text: str) -> Matching:
        mode = "mst"
        blocks = []
        for line in text.splitlines():
            if line.startswith("#"):
                for tok in line.split():
                    if tok.startswith("mode="):
                        mode = tok[5:]
                continue
            if line.strip():
                blocks.append([int(x) for x in line.split()])
        return Matching(blocks, None, mode)


def matching_weight(points, match: Matching) -> SqrtSum:
    total = SqrtSum()
    for b in match.blocks:
        total = total + block_weight([points[i] for i in b], match.mode)
    return total


class Verdict(str, enum.Enum):
    le = "<= W"
    gt = "> W"
    undecidable = "undecidable-at-precision"


def _as_weight(W) -> SqrtSum:
    if isinstance(W, SqrtSum):
        return W
    if isinstance(W, float):
        raise TypeError("thresholds must be exact rationals, not floats")
    return SqrtSum.rational(Fraction(W))


def compare(weight: SqrtSum, W, max_dps: int = MAX_DPS) -> Verdict:
    s = (weight - _as_weight(W)).sign(max_dps)
    if s is None:
        return Verdict.undecidable
    return Verdict.le if s <= 0 else Verdict.gt


def verify_matching(points, match: Matching, W, mode: str | None = None, k: int | None = None,
                    max_dps: int = MAX_DPS) -> tuple[Verdict, SqrtSum]:
    """Recompute the total weight exactly and compare it with ``W``."""
    pts = list(points)
    if mode is not None:
        match = Matching(match.blocks, None, mode)
    k = k or (len(match.blocks[0]) if match.blocks else 1)
    match.check_partition(len(pts), k)
    w = matching_weight(pts, match)
    return compare(w, W, max_dps), w


def verdict_json(verdict: Verdict, weight: SqrtSum, W) -> str:
    iv = weight.interval(30)
    doc = {"verdict": verdict.value, "threshold": str(W),
           "weight_exact": str(weight) if weight.is_rational else None,
           "weight_terms": weight.to_json(),
           "weight_interval": [mpmath.nstr(mpmath.mpf(e), 25) for e in iv._mpi_]}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# exact solvers

def _tight_grid(pts, k, W, mode) -> bool:
    return all(_is_int(p) for p in pts) and _as_weight(W).is_rational and \
        _as_weight(W).rational_value() == Fraction((k - 1) * (len(pts) // k))


def exact_decide(points, k: int, W, mode: str = "mst", budget: float | None = None,
                 general_limit: int = 30) -> Matching | None:
    """A matching of weight <= W, or None. Raises BudgetExceeded on timeout.

    Tight thresholds ((k-1)m on grid points, (k-1)m + 1/5 in path mode) run an
    exact cover over the candidate blocks with fail-first column choice. Other
    thresholds run branch and bound on at most ``general_limit`` points.
    """
    pts = list(points)
    n = len(pts)
    if n % k:
        raise ValueError(f"{n} points cannot be split into {k}-sets")
    if n == 0:
        return Matching([], SqrtSum(), mode)
    Wv = _as_weight(W)
    m = n // k
    grid = all(_is_int(p) for p in pts)
    if grid and len(set(pts)) == n:
        # every k-set of distinct grid points weighs at least k-1
        if (Wv - SqrtSum.rational((k - 1) * m)).sign() == -1:
            return None
        if _tight_grid(pts, k, W, mode):
            return _cover_search(pts, k, Wv, mode, Fraction(k - 1), budget)
    if mode == "path" and Wv.is_rational and Wv.rational_value() == Fraction((k - 1) * m) + Fraction(1, 5):
        return _cover_search(pts, k, Wv, mode, Fraction(k - 1) + Fraction(1, 5), budget)
    if n > general_limit:
        raise SizeError(f"general thresholds are limited to {general_limit} points, got {n}")
    return _branch_and_bound(pts, k, Wv, mode, budget)


def _cover_search(pts, k, Wv, mode, bound, budget) -> Matching | None:
    cands = candidate_sets(pts, k, bound, mode)
    rows = {i: c.indices for i, c in enumerate(cands)}
    if all(c.weight.is_rational and c.weight.rational_value() <= Fraction(k - 1) for c in cands):
        # every cover weighs exactly (k-1)m <= W: any cover will do
        sol = exact_cover.solve_one(rows, list(range(len(pts))), budget=budget)
        if sol is None:
            return None
        return Matching([cands[r].indices for r in sol], SqrtSum.rational((k - 1) * (len(pts) // k)), mode)
    for sol in exact_cover.solve(rows, list(range(len(pts))), budget=budget):
        match = Matching([cands[r].indices for r in sol], None, mode)
        w = SqrtSum()
        for r in sol:
            w = w + cands[r].weight
        if compare(w, Wv) is Verdict.le:
            match.weight = w
            return match
    return None


def _float_weights(pts, mode):
    cache = {}

    def weight(idx):
        w = cache.get(idx)
        if w is None:
            w = cache[idx] = float(block_weight([pts[i] for i in idx], mode))
        return w
    return weight


def _branch_and_bound(pts, k, Wv, mode, budget) -> Matching | None:
    n = len(pts)
    weight = _float_weights(pts, mode)
    dmin = math.sqrt(min(float(_d2(a, b)) for a, b in itertools.combinations(pts, 2))) if n > 1 else 0
    lb = (k - 1) * dmin  # every k-set's tree has k-1 edges of length >= dmin
    Wf = float(Wv) + 1e-9
    deadline = None if budget is None else time.monotonic() + budget
    free = list(range(n))
    chosen: list = []
    steps = [0]

    def rec(cost) -> Matching | None:
        if not free:
            match = Matching([list(b) for b in chosen], None, mode)
            w = matching_weight(pts, match)
            if compare(w, Wv) is Verdict.le:
                match.weight = w
                return match
            return None
        steps[0] += 1
        if deadline is not None and steps[0] % 512 == 0 and time.monotonic() > deadline:
            raise BudgetExceeded("branch and bound exceeded its budget")
        first = free[0]
        rest = free[1:]
        remaining_blocks = len(free) // k - 1
        options = []
        for combo in itertools.combinations(rest, k - 1):
            idx = (first,) + combo
            w = weight(idx)
            if cost + w + lb * remaining_blocks <= Wf:
                options.append((w, idx))
        options.sort()
        for w, idx in options:
            for i in idx:
                free.remove(i)
            chosen.append(idx)
            got = rec(cost + w)
            chosen.pop()
            for i in idx:
                free.append(i)
            free.sort()
            if got is not None:
                return got
        return None

    return rec(0.0)


def _partitions(items, k):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for combo in itertools.combinations(rest, k - 1):
        left = [x for x in rest if x not in combo]
        for p in _partitions(left, k):
            yield [(first,) + combo] + p


def exact_solve_bruteforce(points, k: int, mode: str = "mst", max_partitions: int = 200_000) -> Matching:
    """Global optimum by enumerating every partition into k-sets."""
    pts = list(points)
    n = len(pts)
    if n % k:
        raise ValueError(f"{n} points cannot be split into {k}-sets")
    count = math.factorial(n) // (math.factorial(k) ** (n // k) * math.factorial(n // k)) if n else 1
    if count > max_partitions:
        raise SizeError(f"{count} partitions exceed the brute-force budget")
    weight = _float_weights(pts, mode)
    best, best_w = None, None
    for part in _partitions(list(range(n)), k):
        w = sum(weight(b) for b in part)
        if best_w is None or w < best_w - 1e-9:
            best, best_w = part, w
        elif abs(w - best_w) <= 1e-9:
            # near tie: settle exactly
            a = matching_weight(pts, Matching(part, None, mode))
            b = matching_weight(pts, Matching(best, None, mode))
            if (a - b).sign() == -1:
                best, best_w = part, w
    match = Matching(best or [], None, mode)
    match.weight = matching_weight(pts, match)
    return match


# ---------------------------------------------------------------------------
# heuristic

def greedy_local_search(points, k: int, seed: int = 0, mode: str = "mst", max_rounds: int = 10_000) -> Matching:
    """Seeded greedy start, then 2-swap descent until no swap lowers the weight."""
    pts = list(points)
    n = len(pts)
    if n % k:
        raise ValueError(f"{n} points cannot be split into {k}-sets")
    rng = random.Random(seed)
    weight = _float_weights(pts, mode)
    order = list(range(n))
    rng.shuffle(order)
    free = set(order)
    blocks = []
    for seed_pt in order:
        if seed_pt not in free:
            continue
        free.discard(seed_pt)
        block = [seed_pt]
        while len(block) < k:
            nxt = min(free, key=lambda j: (min(float(_d2(pts[j], pts[b])) for b in block), j))
            free.discard(nxt)
            block.append(nxt)
        blocks.append(sorted(block))

    def w(b):
        return weight(tuple(sorted(b)))

    for _ in range(max_rounds):
        improved = False
        for a, b in itertools.combinations(range(len(blocks)), 2):
            A, B = blocks[a], blocks[b]
            base = w(A) + w(B)
            for i, j in itertools.product(range(k), range(k)):
                A2 = sorted(A[:i] + A[i + 1:] + [B[j]])
                B2 = sorted(B[:j] + B[j + 1:] + [A[i]])
                if w(A2) + w(B2) < base - 1e-9:
                    blocks[a], blocks[b] = A2, B2
                    improved = True
                    break
            if improved:
                break
        if not improved:
            break
    match = Matching(blocks, None, mode)
    match.weight = matching_weight(pts, match)
    return match
