import itertools
from collections import defaultdict
from fractions import Fraction

import pytest

from kmatching.formula import incidence_graph
from kmatching.gadgets_k import variable_gadget_k
from kmatching.geometry import is_connected
from kmatching.matcher import Matching, Verdict, verify_matching
from kmatching.planar_embed import orthogonal_embed
from kmatching.reduction import (DecodeError, PlacementConflict, ReductionError, WitnessError,
                                 decode_assignment, dumps_points, dumps_provenance, loads_points,
                                 loads_provenance, point_set, reduce, witness_matching)

SIZE_CONSTANT = 1  # |S| <= C k s^2 (V + E + area)


def satisfying(f):
    return [a for a in itertools.product((False, True), repeat=f.num_vars) if f.satisfied(a)]


@pytest.fixture(scope="module")
def fig1_red(fig1):
    return reduce(fig1, orthogonal_embed(incidence_graph(fig1)), 3)


def test_fig1_k3_size_and_target(fig1_red):
    assert len(fig1_red.points) % 3 == 0
    assert fig1_red.target_weight == 2 * fig1_red.m


def test_points_distinct_grid(fig1_red):
    pts = fig1_red.points
    assert len(set(pts)) == len(pts)
    assert all(isinstance(c, int) for p in pts for c in p)


def test_provenance_total(fig1_red):
    assert len(fig1_red.provenance) == len(fig1_red.points)
    owners = set(fig1_red.provenance)
    names = {g.name for g in fig1_red.variables + fig1_red.clauses} | {w.name for w in fig1_red.wires}
    assert owners <= names | {o for o in owners if o.startswith("pad")}
    assert len(fig1_red.port_graph) == 12


@pytest.mark.parametrize("k", (3, 4, 5))
def test_ports_touch_wire_ends(corpus, k):
    f = corpus["n4_sat_a"]
    red = reduce(f, orthogonal_embed(incidence_graph(f)), k)
    for w in red.wires:
        vp = red.variables[w.variable].template.port(w.var_port).position
        cp = red.clauses[w.clause].template.port(w.clause_port).position
        assert (vp[0] - w.points[0][0]) ** 2 + (vp[1] - w.points[0][1]) ** 2 == 1
        assert min((cp[0] - q[0]) ** 2 + (cp[1] - q[1]) ** 2 for q in w.points) == 1


def test_k5_parallel_wires(fig1):
    red = reduce(fig1, orthogonal_embed(incidence_graph(fig1)), 5)
    pairs = defaultdict(list)
    for w in red.wires:
        pairs[(w.variable, w.clause)].append(w.points)
    assert len(pairs) == 12 and all(len(v) == 2 for v in pairs.values())
    for a, b in pairs.values():
        d2 = [[(x[0] - y[0]) ** 2 + (x[1] - y[1]) ** 2 for y in b] for x in a]
        assert min(min(r) for r in d2) == 4  # never adjacent
        partnered = sum(1 for r in d2 if 4 in r)
        assert partnered >= 0.8 * len(a)  # offset +-1 from a shared centre line


@pytest.mark.parametrize("k", (3, 4, 5))
def test_size_polynomial(corpus, k):
    s = 16 if k == 3 else variable_gadget_k(k).footprint[2]
    for f in corpus.values():
        g = incidence_graph(f)
        emb = orthogonal_embed(g)
        red = reduce(f, emb, k)
        bound = SIZE_CONSTANT * k * s * s * (g.num_vars + g.num_clauses + len(g.edges) + emb.area())
        assert len(red.points) <= bound


def test_witness_fig1(fig1, fig1_red):
    m = witness_matching(fig1_red, (True, False, True, False))
    verdict, w = verify_matching(fig1_red.points, m, fig1_red.target_weight)
    assert verdict is Verdict.le and w.rational_value() == fig1_red.target_weight
    assert verify_matching(fig1_red.points, m, fig1_red.target_weight - 1)[0] is Verdict.gt
    assert all(is_connected([fig1_red.points[i] for i in b]) for b in m.blocks)


def test_witness_rejects_unsatisfying(fig1_red):
    with pytest.raises(WitnessError):
        witness_matching(fig1_red, (True, True, True, True))


@pytest.mark.parametrize("k", (3, 4, 5))
def test_decode_round_trip_on_corpus(corpus, k):
    for name, f in corpus.items():
        red = reduce(f, orthogonal_embed(incidence_graph(f)), k)
        for a in satisfying(f):
            m = witness_matching(red, a)
            assert verify_matching(red.points, m, red.target_weight)[1].rational_value() == red.target_weight
            assert decode_assignment(red, m) == a, name


def test_decode_rejects_non_mino_block(fig1_red):
    m = witness_matching(fig1_red, (True, False, True, False))
    blocks = [list(b) for b in m.blocks]
    # swap one point between two blocks far apart: both become non-minos
    a, b = blocks[0], blocks[-1]
    a[0], b[0] = b[0], a[0]
    with pytest.raises(DecodeError):
        decode_assignment(fig1_red, Matching(blocks))


def test_decode_rejects_bad_partition(fig1_red):
    m = witness_matching(fig1_red, (True, False, True, False))
    with pytest.raises(DecodeError):
        decode_assignment(fig1_red, Matching(m.blocks[1:]))


def test_placement_conflict_on_tiny_refinement(fig1):
    with pytest.raises(PlacementConflict):
        reduce(fig1, orthogonal_embed(incidence_graph(fig1)), 3, refinement=3)


def test_bad_arguments(fig1):
    emb = orthogonal_embed(incidence_graph(fig1))
    with pytest.raises(ReductionError):
        reduce(fig1, emb, 2)
    with pytest.raises(ReductionError):
        reduce(fig1, emb, 3, mode="spline")


def test_points_file_round_trip(fig1_red):
    text = dumps_points(fig1_red)
    ps = loads_points(text)
    assert ps.points == fig1_red.points and ps.k == 3 and ps.mode == "grid"
    assert ps.target == Fraction(2 * fig1_red.m)
    assert dumps_points(ps) == text
    assert loads_provenance(dumps_provenance(fig1_red)) == list(fig1_red.provenance)


def test_points_file_path_mode(fig1):
    red = reduce(fig1, orthogonal_embed(incidence_graph(fig1)), 4, mode="path")
    ps = point_set(red)
    assert ps.target == Fraction(3 * red.m) + Fraction(1, 5)
    assert dumps_points(loads_points(dumps_points(ps))) == dumps_points(ps)


@pytest.mark.parametrize("text", ["", "1 2\n", "# kmatching points k=3 mode=grid count=2 target=2\n0 0\n",
                                  "# kmatching points k=3 mode=grid count=1 target=2\n0 0 0\n"])
def test_points_file_errors(text):
    with pytest.raises(ValueError):
        loads_points(text)
