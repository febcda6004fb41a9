"""Cubic monotone 1-in-3 SAT formulas: parsing, validation, a brute-force oracle
and the variable/clause incidence graph.

Variables are 0-based internally and 1-based in every text form.
"""
from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass


class FormulaError(ValueError):
    """A formula violates the text format or a structural rule."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class LimitExceeded(RuntimeError):
    pass


class Polarity(str, enum.Enum):
    positive = "positive"
    negative = "negative"

    @property
    def sign(self) -> str:
        return "+" if self is Polarity.positive else "-"


@dataclass(frozen=True)
class Clause:
    polarity: Polarity
    vars: tuple[int, int, int]  # sorted, 0-based

    def __post_init__(self):
        if len(self.vars) != 3 or len(set(self.vars)) != 3:
            raise FormulaError(f"clause needs 3 distinct variables, got {[v + 1 for v in self.vars]}")
        object.__setattr__(self, "vars", tuple(sorted(self.vars)))
        object.__setattr__(self, "polarity", Polarity(self.polarity))

    def satisfied(self, values) -> bool:
        """Exactly one variable true (positive) or exactly one false (negative)."""
        trues = sum(bool(values[v]) for v in self.vars)
        return trues == 1 if self.polarity is Polarity.positive else trues == 2


@dataclass(frozen=True)
class Formula:
    num_vars: int
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        validate(self)

    def satisfied(self, values) -> bool:
        return len(values) == self.num_vars and all(c.satisfied(values) for c in self.clauses)

    def occurrences(self, var: int) -> list[int]:
        return [j for j, c in enumerate(self.clauses) if var in c.vars]


def validate(f: Formula) -> None:
    if f.num_vars < 0:
        raise FormulaError("negative variable count")
    counts = Counter()
    for j, c in enumerate(f.clauses):
        for v in c.vars:
            if not 0 <= v < f.num_vars:
                raise FormulaError(f"clause {j + 1} uses x{v + 1} outside 1..{f.num_vars}")
            counts[v] += 1
    for v in range(f.num_vars):
        if counts[v] != 3:
            raise FormulaError(f"x{v + 1} occurs in {counts[v]} clauses, expected exactly 3")


# ---------------------------------------------------------------------------
# text forms

_LITERAL = re.compile(r"^(¬|~|!|-)?\s*x?(\d+)$")


def parse_formula(text: str) -> Formula:
    """Parse the line format (``p m1in3 n m`` header, ``+ a b c`` / ``- a b c`` lines)
    or the parenthesised form ``(x1∨x2∨x4)(¬x1∨¬x2∨¬x3)``."""
    body = "\n".join(line.split("#", 1)[0] for line in text.splitlines())
    if "(" in body:
        return _parse_parenthesised(body)
    return _parse_lines(text)


def _parse_lines(text: str) -> Formula:
    header = None
    clauses = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "p":
            if header is not None:
                raise FormulaError("duplicate header", no)
            if len(parts) != 4 or parts[1] != "m1in3" or not all(p.isdigit() for p in parts[2:]):
                raise FormulaError(f"bad header {line!r}", no)
            header = (int(parts[2]), int(parts[3]), no)
            continue
        if header is None:
            raise FormulaError("clause before the 'p m1in3' header", no)
        if parts[0] not in "+-" or len(parts[0]) != 1:
            raise FormulaError(f"clause must start with + or -, got {parts[0]!r}", no)
        if len(parts) != 4:
            raise FormulaError(f"clause needs exactly 3 variables, got {len(parts) - 1}", no)
        try:
            vs = [int(p) for p in parts[1:]]
        except ValueError:
            raise FormulaError(f"non-integer variable in {line!r}", no) from None
        if any(v < 1 for v in vs):
            raise FormulaError("variables are numbered from 1", no)
        if len(set(vs)) != 3:
            raise FormulaError(f"duplicate variable in {line!r}", no)
        pol = Polarity.positive if parts[0] == "+" else Polarity.negative
        clauses.append((Clause(pol, tuple(v - 1 for v in vs)), no))
    if header is None:
        raise FormulaError("missing 'p m1in3 <num_vars> <num_clauses>' header")
    n, m, hline = header
    if m != len(clauses):
        raise FormulaError(f"header promises {m} clauses, found {len(clauses)}", hline)
    for c, no in clauses:
        if max(c.vars) >= n:
            raise FormulaError(f"variable x{max(c.vars) + 1} exceeds declared {n}", no)
    return Formula(n, tuple(c for c, _ in clauses))


def _parse_parenthesised(text: str) -> Formula:
    groups = re.findall(r"\(([^()]*)\)", text)
    rest = re.sub(r"\(([^()]*)\)", "", text)
    if rest.strip(" \t\n∧&*") or not groups:
        raise FormulaError("expected a product of parenthesised clauses")
    clauses = []
    for j, g in enumerate(groups, start=1):
        lits = [s.strip() for s in re.split(r"∨|\||\bv\b|\bor\b", g)]
        parsed = []
        for lit in lits:
            m = _LITERAL.match(lit)
            if not m:
                raise FormulaError(f"clause {j}: bad literal {lit!r}")
            parsed.append((m.group(1) is not None, int(m.group(2))))
        if len(parsed) != 3:
            raise FormulaError(f"clause {j}: needs exactly 3 literals, got {len(parsed)}")
        negs = {neg for neg, _ in parsed}
        if len(negs) != 1:
            raise FormulaError(f"clause {j}: mixed-polarity clause ({g.strip()})")
        vs = [v for _, v in parsed]
        if len(set(vs)) != 3:
            raise FormulaError(f"clause {j}: duplicate variable")
        if min(vs) < 1:
            raise FormulaError(f"clause {j}: variables are numbered from 1")
        pol = Polarity.negative if negs == {True} else Polarity.positive
        clauses.append(Clause(pol, tuple(v - 1 for v in vs)))
    n = max(max(c.vars) for c in clauses) + 1
    return Formula(n, tuple(clauses))


def serialize_formula(f: Formula) -> str:
    lines = [f"p m1in3 {f.num_vars} {len(f.clauses)}"]
    lines += [f"{c.polarity.sign} " + " ".join(str(v + 1) for v in c.vars) for c in f.clauses]
    return "\n".join(lines) + "\n"


def format_parenthesised(f: Formula) -> str:
    neg = {Polarity.positive: "", Polarity.negative: "¬"}
    return "".join("(" + "∨".join(f"{neg[c.polarity]}x{v + 1}" for v in c.vars) + ")" for c in f.clauses)


def load_formula(path) -> Formula:
    with open(path, encoding="utf-8") as fh:
        return parse_formula(fh.read())


# ---------------------------------------------------------------------------
# oracle

def one_in_three_oracle(f: Formula, limit: int = 24) -> tuple[bool, ...] | None:
    """Lexicographically smallest satisfying assignment (False < True, x1 most
    significant), or None. Depth-first in that order with clause pruning, so the
    first leaf reached is the answer."""
    if f.num_vars > limit:
        raise LimitExceeded(f"{f.num_vars} variables exceed the exhaustive limit {limit}")
    n = f.num_vars
    by_last: list[list[Clause]] = [[] for _ in range(n)]
    by_var: list[list[Clause]] = [[] for _ in range(n)]
    for c in f.clauses:
        by_last[max(c.vars)].append(c)
        for v in c.vars:
            by_var[v].append(c)
    values = [False] * n
    want = {Polarity.positive: 1, Polarity.negative: 2}

    def ok(i: int) -> bool:
        # partial check: true count so far may not exceed the target; complete clauses must hit it
        for c in by_var[i]:
            trues = sum(values[v] for v in c.vars if v <= i)
            if trues > want[c.polarity]:
                return False
            if max(c.vars) == i and trues != want[c.polarity]:
                return False
            undecided = sum(1 for v in c.vars if v > i)
            if trues + undecided < want[c.polarity]:
                return False
        return True

    def rec(i: int) -> bool:
        if i == n:
            return True
        for val in (False, True):
            values[i] = val
            if ok(i) and rec(i + 1):
                return True
        values[i] = False
        return False

    return tuple(values) if rec(0) else None


# ---------------------------------------------------------------------------
# incidence graph

@dataclass(frozen=True)
class IncidenceGraph:
    num_vars: int
    num_clauses: int
    edges: tuple[tuple[int, int], ...]  # (variable, clause), in clause order

    @property
    def variable_nodes(self) -> list[tuple[str, int]]:
        return [("v", i) for i in range(self.num_vars)]

    @property
    def clause_nodes(self) -> list[tuple[str, int]]:
        return [("c", j) for j in range(self.num_clauses)]

    def degree(self, node: tuple[str, int]) -> int:
        side = 0 if node[0] == "v" else 1
        return sum(1 for e in self.edges if e[side] == node[1])

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(self.variable_nodes, bipartite=0)
        g.add_nodes_from(self.clause_nodes, bipartite=1)
        g.add_edges_from((("v", v), ("c", c)) for v, c in self.edges)
        return g


def incidence_graph(f: Formula) -> IncidenceGraph:
    return IncidenceGraph(f.num_vars, len(f.clauses),
                          tuple((v, j) for j, c in enumerate(f.clauses) for v in c.vars))


FIG1 = "(x1∨x2∨x4)(¬x1∨¬x2∨¬x3)(x2∨x3∨x4)(¬x1∨¬x3∨¬x4)"
