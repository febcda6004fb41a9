"""Acceptance criteria 1-8, one PASS/FAIL line each.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import itertools
import math
import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
from conftest import RESULTS, corpus_paths  # noqa: E402

from kmatching.formula import FIG1, incidence_graph, load_formula, one_in_three_oracle, parse_formula
from kmatching.gadget import certify_gadget
from kmatching.gadgets3 import certify3
from kmatching.gadgets_k import build_primitive, charge_table, halves
from kmatching.geometry import is_connected
from kmatching.matcher import (SqrtSum, Verdict, exact_decide, exact_solve_bruteforce, mst_weight,
                               verify_matching)
from kmatching.path_variant import (_ends, accept_threshold, choose_precision, delta_network_path,
                                    exact_distances, special_edge_lengths, triangle_count)
from kmatching.planar_embed import orthogonal_embed
from kmatching.reduction import decode_assignment, reduce, witness_matching


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[n] = line
    print(line)


def instances():
    out = {"fig1": parse_formula(FIG1)}
    for p in corpus_paths():
        name = Path(p).name.split(".")[0]
        if name != "fig1":
            out[name] = load_formula(p)
    return out


def satisfying(f):
    return [a for a in itertools.product((False, True), repeat=f.num_vars) if f.satisfied(a)]


def end_to_end(f, k, budget):
    """(agrees with oracle, seconds)."""
    t0 = time.monotonic()
    red = reduce(f, orthogonal_embed(incidence_graph(f)), k)
    match = exact_decide(red.points, k, red.target_weight, budget=budget)
    oracle = one_in_three_oracle(f)
    ok = (match is None) == (oracle is None)
    if match is not None:
        w = verify_matching(red.points, match, red.target_weight)[1]
        ok = ok and w.rational_value() == red.target_weight
        ok = ok and f.satisfied(decode_assignment(red, match))
    return ok, time.monotonic() - t0


# ---------------------------------------------------------------------------

def criterion_1():
    fs = instances()
    chosen = [n for n in fs if n == "fig1" or (fs[n].num_vars <= 6)]
    bad, worst = [], 0.0
    for name in chosen:
        ok, dt = end_to_end(fs[name], 3, budget=60)
        worst = max(worst, dt)
        if not ok or dt > 60:
            bad.append(name)
    ok = not bad and len(chosen) >= 6
    record(1, ok, f"k=3 on {len(chosen)} instances, slowest {worst:.1f}s (limit 60s)"
           + (f", failed: {bad}" if bad else ""))
    return ok


def criterion_2():
    fs = instances()
    chosen = ["fig1", "n4_sat_a"]
    bad, times = [], []
    for name in chosen:
        try:
            ok, dt = end_to_end(fs[name], 5, budget=600)
        except Exception as e:  # budget exceeded counts as failure here
            ok, dt = False, float("nan")
            bad.append(f"{name} ({type(e).__name__})")
            times.append(dt)
            continue
        times.append(dt)
        if not ok or dt > 600:
            bad.append(name)
    ok = not bad
    record(2, ok, "k=5 on " + ", ".join(f"{n} {t:.0f}s" for n, t in zip(chosen, times))
           + " (limit 600s each)" + (f", failed: {bad}" if bad else ""))
    return ok


def criterion_3():
    t0 = time.monotonic()
    fails = []

    def check(label, cond):
        if not cond:
            fails.append(label)

    v = certify3("variable3")
    check("variable3", set(v.feasible) == {(0, 0, 0), (1, 1, 1)})
    check("clause3+", certify3("clause3-positive").admissible_feasible() == {(1, 0, 0), (0, 1, 0), (0, 0, 1)})
    check("clause3-", certify3("clause3-negative").admissible_feasible() == {(0, 1, 1), (1, 0, 1), (1, 1, 0)})
    for k in (4, 5):
        h, H = halves(k)
        fuse = charge_table("fuse", k)
        check(f"fuse{k}", fuse.table == {(0,): {(0,)}, (1,): {(1,)}} and
              set(fuse.infeasible) == {(c,) for c in range(2, k)})
        check(f"switch{k}", charge_table("switch", k).outputs_for() == {(0, 0), (k - 1, 1)})
        check(f"amplifier{k}", charge_table("amplifier", k).outputs_for(1) == {(2, k - 1)})
        spl = charge_table("splitter", k)
        check(f"splitter{k}", all(spl.outputs_for(s) == {(1, s - 1)} for s in range(1, k)))
        j = charge_table("junction", k)
        check(f"junction{k}", j.table == {(0, 0): {(0,)}, (1, k - 2): {(k - 1,)}})
        xf = charge_table("xor_filter", k)
        check(f"xor_filter{k}", xf.table == {(0, 0): {(0,)}, (h, 0): {(h,)}, (0, H): {(H,)}})
        xe = charge_table("xor_enforcer", k)
        check(f"xor_enforcer{k}", xe.table == {(h, 0): {(h,)}, (0, H): {(H,)}, (h, H): {(0,)}})
        dl = charge_table("delta_network", k)
        want = {s for s in itertools.product({0, h, H}, repeat=3)
                if sorted(s) == [0, h, H]}
        check(f"delta{k}", set(dl.table) == want)
    dt = time.monotonic() - t0
    ok = not fails and dt <= 1800
    record(3, ok, f"all truth tables for k=3,4,5 in {dt:.1f}s (limit 1800s)"
           + (f", mismatches: {fails}" if fails else ""))
    return ok


def _random_points(rng, n):
    side = math.isqrt(n - 1) + 2 + rng.randrange(2)  # side^2 > n, dense enough for minos
    pts = set()
    while len(pts) < n:
        pts.add((rng.randrange(side), rng.randrange(side)))
    return sorted(pts)


def criterion_4(per_k: int = 200):
    sizes = {3: (6, 9, 12), 4: (8, 12), 5: (10,)}
    bad, tight_yes = [], 0
    for k, ns in sizes.items():
        rng = random.Random(1000 + k)
        for i in range(per_k):
            pts = _random_points(rng, ns[i % len(ns)])
            opt = exact_solve_bruteforce(pts, k)
            found = exact_decide(pts, k, opt.weight)
            if found is None:
                bad.append((k, i, "none at optimum"))
                continue
            w = verify_matching(pts, found, opt.weight)[1]
            if (w - opt.weight).sign() != 0:
                bad.append((k, i, "weight differs"))
            tight = exact_decide(pts, k, (k - 1) * (len(pts) // k))
            opt_tight = opt.weight.is_rational and opt.weight.rational_value() == (k - 1) * (len(pts) // k)
            tight_yes += opt_tight
            if (tight is not None) != opt_tight:
                bad.append((k, i, "tight decision differs"))
    ok = not bad
    record(4, ok, f"{per_k} random instances per k in (3,4,5): exact_decide weight == brute force "
           f"({tight_yes} of them tight at (k-1)m)"
           + (f", mismatches: {bad[:5]}" if bad else ""))
    return ok


def criterion_5():
    grid = [(x, y) for x in range(4) for y in range(4)]
    counter, total = 0, 0
    for k in (3, 4, 5):
        for c in itertools.combinations(grid, k):
            total += 1
            light = (mst_weight(c) - SqrtSum.rational(k - 1)).sign() <= 0
            if light != is_connected(list(c)):
                counter += 1
    ok = counter == 0
    record(5, ok, f"{total} subsets of the 4x4 grid, {counter} counterexamples")
    return ok


def criterion_6():
    d = exact_distances(60)
    errs = []
    if not (abs(d["v1v2"] - 1) < 1e-12 and abs(d["v2u3"] - 1) < 1e-12):
        errs.append("unit edges")
    if not (1.2393 < d["v1u3"] < 1.2394):
        errs.append("v1u3")
    checked = 0
    for name, f in instances().items():
        red = reduce(f, orthogonal_embed(incidence_graph(f)), 7, mode="path")
        N = triangle_count(f)
        _, b = choose_precision(N, 7)
        if red.digits != b.t or not 4 * N * b.epsilon < Fraction(1, 5):
            errs.append(f"{name} budget")
        for _, iv in special_edge_lengths(red):
            lo, hi = _ends(iv)
            if not (1 - b.epsilon <= lo and hi <= 1 + b.epsilon):
                errs.append(f"{name} edge")
                break
        checked += 1
    ok = not errs
    record(6, ok, f"|v1v2|-1={float(d['v1v2'] - 1):.1e}, |v2u3|-1={float(d['v2u3'] - 1):.1e}, "
           f"|v1u3|={float(d['v1u3']):.6f}; eps budget holds on {checked} k=7 path instances"
           + (f", failed: {errs}" if errs else ""))
    return ok


def criterion_7():
    t0 = time.monotonic()
    grid = build_primitive("delta_network", 7)
    mst = certify_gadget(grid).admissible_feasible()
    nonpath = sorted(mst - certify_gadget(grid, mode="path").admissible_feasible())
    modified = certify_gadget(delta_network_path(7), mode="path").admissible_feasible()
    dt = time.monotonic() - t0
    ok = bool(nonpath) and modified == mst and dt <= 1800
    record(7, ok, f"grid Delta k=7 needs a non-path block in {len(nonpath)} states {nonpath}; "
           f"modified gadget: {len(mst - modified)}; {dt:.1f}s")
    return ok


def criterion_8():
    runs, bad = 0, []
    fs = instances()
    for k, mode in ((3, "grid"), (4, "grid"), (5, "grid"), (4, "path"), (5, "path"), (7, "path")):
        for name, f in fs.items():
            sols = satisfying(f)
            if not sols:
                continue
            red = reduce(f, orthogonal_embed(incidence_graph(f)), k, mode=mode)
            for a in sols:
                m = witness_matching(red, a)
                runs += 1
                if mode == "grid":
                    w = verify_matching(red.points, m, red.target_weight)[1]
                    if not (w.is_rational and w.rational_value() == red.target_weight):
                        bad.append((k, mode, name, a))
                else:
                    W = accept_threshold(red)
                    if verify_matching(red.points, m, W, mode="path", k=k)[0] is not Verdict.le:
                        bad.append((k, mode, name, a))
    ok = not bad
    record(8, ok, f"{runs} witness matchings (grid k=3,4,5 exact (k-1)m; path k=4,5,7 <= (k-1)m+0.2)"
           + (f", failed: {bad[:3]}" if bad else ""))
    return ok


# ---------------------------------------------------------------------------

def test_criterion_1():
    assert criterion_1()


@pytest.mark.slow
def test_criterion_2():
    assert criterion_2()


def test_criterion_3():
    assert criterion_3()


@pytest.mark.slow
def test_criterion_4():
    assert criterion_4()


def test_criterion_5():
    assert criterion_5()


def test_criterion_6():
    assert criterion_6()


def test_criterion_7():
    assert criterion_7()


@pytest.mark.slow
def test_criterion_8():
    assert criterion_8()


if __name__ == "__main__":
    only = {int(a) for a in sys.argv[1:]} or set(range(1, 9))
    results = [globals()[f"criterion_{n}"]() for n in sorted(only)]
    sys.exit(0 if all(results) else 1)
