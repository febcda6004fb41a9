import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from kmatching.formula import (Clause, Formula, FormulaError, Polarity, format_parenthesised, incidence_graph,
                               one_in_three_oracle, parse_formula, serialize_formula)


def brute_force(f: Formula):
    """Independent enumeration order: True before False, last variable most significant."""
    sols = []
    for bits in itertools.product((True, False), repeat=f.num_vars):
        vals = tuple(reversed(bits))
        counts_ok = all(sum(vals[v] for v in c.vars) == (1 if c.polarity == Polarity.positive else 2)
                        for c in f.clauses)
        if counts_ok:
            sols.append(vals)
    return sols


def random_cubic(n: int, rng: random.Random) -> Formula:
    """Random cubic monotone formula on n variables (n clauses), by rejection."""
    while True:
        slots = [v for v in range(n) for _ in range(3)]
        rng.shuffle(slots)
        triples = [tuple(slots[3 * i:3 * i + 3]) for i in range(n)]
        if all(len(set(t)) == 3 for t in triples):
            return Formula(n, tuple(Clause(rng.choice(("positive", "negative")), t) for t in triples))


def test_fig1_parse(fig1):
    assert fig1.num_vars == 4 and len(fig1.clauses) == 4
    assert [c.polarity.value for c in fig1.clauses] == ["positive", "negative", "positive", "negative"]
    assert fig1.clauses[0].vars == (0, 1, 3)


def test_mixed_polarity_rejected():
    with pytest.raises(FormulaError, match="mixed"):
        parse_formula("(x1∨¬x2∨x3)")


def test_cubic_violation_rejected():
    with pytest.raises(FormulaError, match="occurs in 1"):
        parse_formula("p m1in3 3 1\n+ 1 2 3\n")


@pytest.mark.parametrize("text, msg", [
    ("+ 1 2 3\n", "header"),
    ("p m1in3 3 2\n+ 1 2 3\n", "promises 2"),
    ("p m1in3 3 1\n* 1 2 3\n", "start with"),
    ("p m1in3 3 1\n+ 1 2\n", "exactly 3"),
    ("p m1in3 3 1\n+ 1 1 2\n", "duplicate"),
    ("p m1in3 3 1\n+ 1 2 9\n", "exceeds"),
])
def test_parse_errors(text, msg):
    with pytest.raises(FormulaError, match=msg):
        parse_formula(text)


def test_fig1_oracle(fig1):
    assert one_in_three_oracle(fig1) == (True, False, True, False)
    a = one_in_three_oracle(fig1)
    # each negative clause has exactly one true negative literal, i.e. two true variables
    for c in fig1.clauses:
        trues = sum(a[v] for v in c.vars)
        assert trues == (1 if c.polarity == Polarity.positive else 2)


def test_empty_formula_satisfiable():
    assert one_in_three_oracle(Formula(0, ())) == ()


def test_shared_triple_matches_enumeration():
    # positive and negative clause on the same three variables: exactly one true and exactly two true
    f = Formula(3, (Clause("positive", (0, 1, 2)), Clause("negative", (0, 1, 2)),
                    Clause("positive", (0, 1, 2))))
    assert one_in_three_oracle(f) is None
    assert brute_force(f) == []


def test_incidence_graph_fig1(fig1):
    g = incidence_graph(fig1)
    assert len(g.variable_nodes) == 4 and len(g.clause_nodes) == 4 and len(g.edges) == 12
    assert sorted(c for v, c in g.edges if v == 1) == [0, 1, 2]


def test_k33():
    f = Formula(3, tuple(Clause("positive", (0, 1, 2)) for _ in range(3)))
    g = incidence_graph(f).to_networkx()
    import networkx as nx
    assert nx.is_isomorphic(g, nx.complete_bipartite_graph(3, 3))


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=3, max_value=9), st.integers(min_value=0, max_value=10 ** 6))
def test_oracle_against_enumeration(n, seed):
    f = random_cubic(n, random.Random(seed))
    g = incidence_graph(f)
    assert sum(g.degree(v) for v in g.variable_nodes) == sum(g.degree(c) for c in g.clause_nodes) == 3 * n
    sols = brute_force(f)
    got = one_in_three_oracle(f)
    if not sols:
        assert got is None
    else:
        assert got == min(sols, key=lambda s: tuple(int(x) for x in s))
        assert f.satisfied(got)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=3, max_value=8), st.integers(min_value=0, max_value=10 ** 6))
def test_roundtrip_serialisation(n, seed):
    f = random_cubic(n, random.Random(seed))
    text = serialize_formula(f)
    assert parse_formula(text) == f
    assert serialize_formula(parse_formula(text)) == text
    assert parse_formula(format_parenthesised(f)) == f


def test_corpus_is_cubic_and_labelled(corpus):
    assert len(corpus) >= 6
    for name, f in corpus.items():
        sat = one_in_three_oracle(f) is not None
        if "_sat" in name:
            assert sat, name
        if "_unsat" in name:
            assert not sat, name
