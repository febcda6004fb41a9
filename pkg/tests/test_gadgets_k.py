import pytest

from kmatching.gadget import certify_gadget
from kmatching.gadgets_k import (PrimitiveKind, active_pairs, build_primitive, chain, charge_table,
                                 clause_gadget_k, compose, direction_duality, halves,
                                 pair_consistent_states, relation_from_certificate,
                                 variable_gadget_k, wire_template)

KS = (4, 5)


def test_fuse_layout_k4():
    pts = build_primitive("fuse", 4).points
    # v1 v2 horizontal, then a vertical 3-mino starting at v2 (v2 shared): a 4-point L
    assert len(pts) == 4
    horizontal = {p for p in pts if p[1] == pts[0][1]}
    vertical = {p for p in pts if p[0] == pts[1][0]}
    assert len(horizontal) == 2 and len(vertical) == 3


def test_xor_enforcer_layout_k5():
    t = build_primitive("xor_enforcer", 5)
    xs = {p[0] for p in t.points}
    t1 = [p for p in t.points if p[0] == min(xs)]
    assert len(t1) == 2 * 3 + 1
    assert len(t.points) == 10
    assert build_primitive("delta_network", 5).points == t.points


def test_k_below_four_rejected():
    with pytest.raises(ValueError):
        build_primitive("fuse", 3)
    with pytest.raises(ValueError):
        variable_gadget_k(3)


@pytest.mark.parametrize("k", KS)
def test_fuse_caps_at_one(k):
    r = charge_table("fuse", k)
    assert r.outputs_for(0) == {(0,)} and r.outputs_for(1) == {(1,)}
    assert all(r.outputs_for(c) == set() for c in range(2, k))


@pytest.mark.parametrize("k", KS)
def test_switch_two_states(k):
    assert charge_table("switch", k).outputs_for() == {(0, 0), (k - 1, 1)}


@pytest.mark.parametrize("k", KS)
def test_amplifier(k):
    r = charge_table("amplifier", k)
    assert r.outputs_for(1) == {(2, k - 1)}
    assert (0, 0) in r.outputs_for(0)


@pytest.mark.parametrize("k", KS)
def test_splitter(k):
    r = charge_table("splitter", k)
    for s in range(1, k):
        assert r.outputs_for(s) == {(1, s - 1)}


def test_splitter_k4_example():
    assert charge_table("splitter", 4).outputs_for(3) == {(1, 2)}


@pytest.mark.parametrize("k", KS)
def test_junction(k):
    r = charge_table("junction", k)
    assert set(r.table) == {(0, 0), (1, k - 2)}
    assert r.outputs_for(0, 0) == {(0,)}
    assert r.outputs_for(1, k - 2) == {(k - 1,)}
    assert (1, 0) in r.infeasible


def test_junction_k4_example():
    r = charge_table("junction", 4)
    assert r.outputs_for(1, 2) == {(3,)} and r.outputs_for(0, 0) == {(0,)}
    assert r.outputs_for(1, 0) == set()


@pytest.mark.parametrize("k", KS)
def test_xor_filter(k):
    h, H = halves(k)
    r = charge_table("xor_filter", k)
    assert r.outputs_for(h, 0) == {(h,)}
    assert r.outputs_for(0, H) == {(H,)}
    assert r.outputs_for(0, 0) == {(0,)}
    assert r.outputs_for(h, H) == set()


@pytest.mark.parametrize("k", KS)
def test_xor_enforcer(k):
    h, H = halves(k)
    r = charge_table("xor_enforcer", k)
    assert r.outputs_for(h, 0) == {(h,)}
    assert r.outputs_for(0, H) == {(H,)}
    assert r.outputs_for(h, H) == {(0,)}
    assert r.outputs_for(0, 0) == set()


@pytest.mark.parametrize("k", KS)
def test_delta_network(k):
    h, H = halves(k)
    r = charge_table("delta_network", k)
    expected = set()
    for zero in range(3):
        for a, b in ((h, H), (H, h)):
            st = [a, b]
            st.insert(zero, 0)
            expected.add(tuple(st))
    assert set(r.table) == expected
    assert len(expected) == (6 if k % 2 else 3)


@pytest.mark.parametrize("k", KS)
def test_variable_gadget_k(k):
    h, H = halves(k)
    t = variable_gadget_k(k)
    s = t.footprint[2] - t.footprint[0]
    assert s % 2 == 0
    pos = {p.name: p.position for p in t.ports}
    assert pos["L0"] == (s // 2 - 1, 0) and pos["R0"] == (s // 2 + 1, 0)
    assert pos["L1"] == (s, s // 2 - 1) and pos["R1"] == (s, s // 2 + 1)
    assert pos["L2"] == (s // 2 + 1, s) and pos["R2"] == (s // 2 - 1, s)
    c = certify_gadget(t)
    assert c.port_names == ("L0", "R0", "L1", "R1", "L2", "R2")
    true = (h, H, h, H, h, H)
    assert c.admissible_feasible() == {(0,) * 6, true}
    assert sum(true) == 3 * k  # conservation in the true state


@pytest.mark.parametrize("k", KS)
@pytest.mark.parametrize("polarity,expected", [
    ("positive", {(1, 0, 0), (0, 1, 0), (0, 0, 1)}),
    ("negative", {(0, 1, 1), (1, 0, 1), (1, 1, 0)}),
])
def test_clause_gadget_k(k, polarity, expected):
    t = clause_gadget_k(k, polarity)
    c = certify_gadget(t)
    assert {active_pairs(t, c, s) for s in pair_consistent_states(t, c)} == expected


@pytest.mark.parametrize("k", (4, 5, 6))
def test_direction_duality(k):
    assert direction_duality(k, 3)


@pytest.mark.parametrize("k", KS)
def test_bend_same_as_straight(k):
    assert certify_gadget(wire_template(k, 2, bend=True)).feasible == \
        certify_gadget(wire_template(k, 2)).feasible


@pytest.mark.parametrize("k", KS)
@pytest.mark.parametrize("port", ["w1", "w2"])
def test_amplifier_splitter_composition(k, port):
    amp, spl = build_primitive("amplifier", k), build_primitive("splitter", k)
    ch = chain(amp, port, spl, "in")
    joined = relation_from_certificate(ch, certify_gadget(ch))
    spl_all = relation_from_certificate(spl, certify_gadget(spl), restrict=False)
    assert joined.table == compose(charge_table("amplifier", k), port, spl_all, "in")
    # the true state: charge 1 into the amplifier ends as (1, s - 1) out of the splitter
    s = 2 if port == "w1" else k - 1
    other = k - 1 if port == "w1" else 2
    assert joined.table[(1,)] == {(other, 1, s - 1)}


@pytest.mark.parametrize("k", KS)
def test_path_mode_keeps_every_admissible_state(k):
    temps = [build_primitive(kind, k) for kind in PrimitiveKind]
    temps += [variable_gadget_k(k), clause_gadget_k(k, "positive"), clause_gadget_k(k, "negative")]
    for t in temps:
        grid, path = certify_gadget(t), certify_gadget(t, mode="path")
        assert grid.admissible_feasible() == path.admissible_feasible(), t.kind
