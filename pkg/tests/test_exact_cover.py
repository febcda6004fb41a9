import itertools

import pytest

from kmatching.exact_cover import BudgetExceeded, solve, solve_one

# the classic 7-column example; its unique cover is {B, D, F}
KNUTH = {
    "A": [1, 4, 7], "B": [1, 4], "C": [4, 5, 7],
    "D": [3, 5, 6], "E": [2, 3, 6, 7], "F": [2, 7],
}
COLS = list(range(1, 8))


def brute_covers(rows, primary, secondary=()):
    out = set()
    names = list(rows)
    for r in range(len(names) + 1):
        for combo in itertools.combinations(names, r):
            cols = [c for n in combo for c in rows[n]]
            if sorted(c for c in cols if c in primary) == sorted(primary) and \
                    len(cols) == len(set(cols)):
                out.add(frozenset(combo))
    return out


def test_knuth_example():
    sols = {frozenset(s) for s in solve(KNUTH, COLS)}
    assert sols == {frozenset("BDF")} == brute_covers(KNUTH, COLS)
    assert set(solve_one(KNUTH, COLS)) == set("BDF")


def test_no_cover():
    rows = {"a": [1, 2], "b": [2, 3]}
    assert list(solve(rows, [1, 2, 3])) == []
    assert solve_one(rows, [1, 2, 3]) is None


def test_secondary_columns_at_most_once():
    rows = {"a": [1, "s"], "b": [2, "s"], "c": [1], "d": [2]}
    got = {frozenset(s) for s in solve(rows, [1, 2], ["s"])}
    assert got == brute_covers(rows, [1, 2], ["s"])
    assert frozenset("ab") not in got


def test_limit_and_determinism():
    rows = {f"{i}{j}": [i, j] for i, j in itertools.combinations(range(6), 2)}
    assert len(list(solve(rows, list(range(6))))) == 15  # perfect matchings of K6
    assert len(list(solve(rows, list(range(6)), limit=4))) == 4
    assert solve_one(rows, list(range(6))) == solve_one(rows, list(range(6)))


def test_unknown_column_rejected():
    with pytest.raises(KeyError):
        list(solve({"a": [9]}, [1]))


def test_budget_exceeded():
    # dominoes on a 7x7 board: no cover (odd cell count), large search
    cells = [(x, y) for x in range(7) for y in range(7)]
    rows = {}
    for x, y in cells:
        for dx, dy in ((1, 0), (0, 1)):
            if (x + dx, y + dy) in cells:
                rows[(x, y, dx)] = [(x, y), (x + dx, y + dy)]
    with pytest.raises(BudgetExceeded):
        list(solve(rows, cells, budget=0.05))
