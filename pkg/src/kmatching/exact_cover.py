"""Exact cover by Algorithm X over dict-of-sets, with optional (secondary) columns.

Primary columns must be covered exactly once; secondary columns at most once.
The column to branch on is the primary column with the fewest live rows, ties
broken by the column's position in the caller-supplied order, so the first
solution found is deterministic.
"""
from __future__ import annotations

import heapq
import time
from collections.abc import Hashable, Iterator, Mapping, Sequence


class BudgetExceeded(RuntimeError):
    """Raised when a search runs past its wall-clock deadline."""


def solve(
    rows: Mapping[Hashable, Sequence[Hashable]],
    primary: Sequence[Hashable],
    secondary: Sequence[Hashable] = (),
    limit: int | None = None,
    budget: float | None = None,
) -> Iterator[list]:
    """Yield exact covers as lists of row ids (in selection order).

    ``limit`` stops after that many solutions; ``budget`` is a time limit in
    seconds, raising :class:`BudgetExceeded` when hit.
    """
    rank = {c: i for i, c in enumerate(primary)}
    X: dict = {c: set() for c in primary}
    for c in secondary:
        X.setdefault(c, set())
    Y = {}
    for r, cols in rows.items():
        Y[r] = list(cols)
        for c in cols:
            if c not in X:
                raise KeyError(f"row {r!r} uses unknown column {c!r}")
            X[c].add(r)
    live = set(primary)
    # lazy heap of (size, rank, column); an entry is current iff the column is live
    # and its size still matches. Every size change or revival pushes a new entry.
    heap = [(len(X[c]), rank[c], c) for c in primary]
    heapq.heapify(heap)
    push_entry = heapq.heappush
    deadline = None if budget is None else time.monotonic() + budget
    found = 0
    partial: list = []
    stack: list = []  # frames: [candidates, next index, saved columns or None]

    def select(r):
        saved = []
        for j in Y[r]:
            for i in X[j]:
                for c in Y[i]:
                    if c != j:
                        col = X[c]
                        col.discard(i)
                        if c in live:
                            push_entry(heap, (len(col), rank[c], c))
            saved.append(X.pop(j))
            live.discard(j)
        return saved

    def deselect(r, saved):
        for j in reversed(Y[r]):
            X[j] = saved.pop()
            if j in rank:
                live.add(j)
                push_entry(heap, (len(X[j]), rank[j], j))
            for i in X[j]:
                for c in Y[i]:
                    if c != j:
                        col = X[c]
                        col.add(i)
                        if c in live:
                            push_entry(heap, (len(col), rank[c], c))

    def push():
        if not live:
            return False
        while True:
            size, _, c = heap[0]
            if c in live and len(X[c]) == size:
                break
            heapq.heappop(heap)
        stack.append([sorted(X[c], key=_row_key), 0, None])
        return True

    steps = 0
    if not push():
        yield []
        return
    while stack:
        frame = stack[-1]
        cands, idx, saved = frame
        if saved is not None:
            deselect(partial.pop(), saved)
            frame[2] = None
        if idx >= len(cands):
            stack.pop()
            continue
        steps += 1
        if deadline is not None and steps % 256 == 0 and time.monotonic() > deadline:
            raise BudgetExceeded(f"exact cover exceeded {budget} s")
        r = cands[idx]
        frame[1] = idx + 1
        frame[2] = select(r)
        partial.append(r)
        if not live:
            yield list(partial)
            found += 1
            if limit is not None and found >= limit:
                return
            continue
        push()


def _row_key(r):
    return r if isinstance(r, (int, tuple, str)) else repr(r)


def solve_one(
    rows: Mapping[Hashable, Sequence[Hashable]],
    primary: Sequence[Hashable],
    secondary: Sequence[Hashable] = (),
    budget: float | None = None,
    stats: dict | None = None,
) -> list | None:
    """First exact cover under a deterministic order, or None.

    Decision version of :func:`solve` for large instances: forced columns are
    taken eagerly, and whenever the live columns fall apart into independent
    components each component is solved on its own, so a dead end in one
    component never causes re-search of another.
    """
    import sys

    rank = {c: i for i, c in enumerate(primary)}
    X: dict = {c: set() for c in primary}
    for c in secondary:
        X.setdefault(c, set())
    Y = {}
    for r, cols in rows.items():
        Y[r] = list(cols)
        for c in cols:
            if c not in X:
                raise KeyError(f"row {r!r} uses unknown column {c!r}")
            X[c].add(r)
    live = set(primary)
    # columns that may have dropped to one row or none; stale entries are skipped.
    # Propagation always runs to a fixpoint before branching, so after an undo
    # every live column has at least two rows and the list can be cleared.
    pending = [c for c in reversed(primary) if len(X[c]) <= 1]
    deadline = None if budget is None else time.monotonic() + budget
    trail: list = []  # (row, saved columns), strictly LIFO
    stamp = dict.fromkeys(primary, 0)  # last time a column lost a row
    clock = [0]
    ticks = [0]

    def tick():
        ticks[0] += 1
        if deadline is not None and ticks[0] % 256 == 0 and time.monotonic() > deadline:
            raise BudgetExceeded(f"exact cover exceeded {budget} s")

    def select(r):
        saved = []
        for j in Y[r]:
            for i in X[j]:
                for c in Y[i]:
                    if c != j:
                        col = X[c]
                        col.discard(i)
                        if c in live:
                            clock[0] += 1
                            stamp[c] = clock[0]
                            if len(col) <= 1:
                                pending.append(c)
            saved.append(X.pop(j))
            live.discard(j)
        trail.append((r, saved))

    def undo_to(n):
        pending.clear()
        while len(trail) > n:
            r, saved = trail.pop()
            for j in reversed(Y[r]):
                X[j] = saved.pop()
                if j in rank:
                    live.add(j)
                for i in X[j]:
                    for c in Y[i]:
                        if c != j:
                            X[c].add(i)

    def propagate() -> bool:
        while pending:
            c = pending.pop()
            if c not in live:
                continue
            size = len(X[c])
            if size == 0:
                return False
            if size == 1:
                tick()
                select(next(iter(X[c])))
        return True

    def components(cols):
        seen, comps = set(), []
        for c0 in sorted(cols, key=rank.__getitem__):
            if c0 in seen:
                continue
            seen.add(c0)
            comp, stack = [c0], [c0]
            while stack:
                c = stack.pop()
                for r in X[c]:
                    for d in Y[r]:
                        if d in live and d not in seen:
                            seen.add(d)
                            comp.append(d)
                            stack.append(d)
            comps.append(comp)
        return comps

    def rec(scope, since_split=0) -> bool:
        start = len(trail)
        if not propagate():
            undo_to(start)
            return False
        since_split += len(trail) - start
        # splitting needs a long forced run (a wire filled in); checking after
        # every decision would dominate the running time
        if since_split < split_every:
            comps = [scope]
        else:
            remaining = [c for c in scope if c in live]
            if not remaining:
                return True
            comps = components(remaining)
            since_split = 0
        if len(comps) > 1:
            for comp in comps:
                if not rec(comp):
                    undo_to(start)
                    return False
            return True
        comp = comps[0]
        live_comp = [col for col in comp if col in live]
        if not live_comp:
            return True
        # fail-first; ties go to the column constrained most recently, which keeps
        # the search next to the last propagation, then to column order
        c = min(live_comp, key=lambda col: (len(X[col]), -stamp[col], rank[col]))
        if stats is not None:
            stats.setdefault("branch", []).append((c, len(X[c]), len(comp), len(trail)))
        mark = len(trail)
        for r in sorted(X[c], key=_row_key):
            tick()
            select(r)
            if rec(comp, since_split + 1):
                return True
            undo_to(mark)
        undo_to(start)
        return False

    split_every = 64
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 200_000))
    try:
        ok = rec(list(primary))
    finally:
        sys.setrecursionlimit(old)
    return [r for r, _ in trail] if ok else None
