import networkx as nx
import pytest

from kmatching.formula import Clause, Formula, incidence_graph
from kmatching.planar_embed import (GridEmbedding, NonPlanarError, RotationSystem, embedding_from_json,
                                    embedding_to_json, orthogonal_embed, planar_rotation, validate_embedding)


def test_fig1_rotation_euler(fig1):
    g = incidence_graph(fig1)
    rot = planar_rotation(g)
    assert rot.euler_ok()
    assert len(rot.faces()) == 2 - 8 + 12  # V - E + F = 2


def test_k33_nonplanar():
    f = Formula(3, tuple(Clause("positive", (0, 1, 2)) for _ in range(3)))
    with pytest.raises(NonPlanarError):
        planar_rotation(incidence_graph(f))
    with pytest.raises(NonPlanarError):
        orthogonal_embed(incidence_graph(f))


def test_cycle_has_two_faces():
    rot = planar_rotation(nx.cycle_graph(4))
    assert len(rot.faces()) == 2


def test_single_edge():
    emb = orthogonal_embed(nx.Graph([("u", "v")]))
    assert emb.vertex_pos == {"u": (0, 0), "v": (1, 0)}
    assert emb.path("u", "v") == ((0, 0), (1, 0))


def test_star_leaves_in_distinct_directions():
    g = nx.star_graph(3)
    emb = orthogonal_embed(g)
    dirs = [emb.initial_direction(0, leaf) for leaf in (1, 2, 3)]
    assert len(set(dirs)) == 3
    assert validate_embedding(emb) == []


def test_fig1_drawing_valid(fig1):
    emb = orthogonal_embed(incidence_graph(fig1))
    assert validate_embedding(emb) == []


def test_corpus_drawings_valid(corpus):
    for name, f in corpus.items():
        emb = orthogonal_embed(incidence_graph(f))
        assert validate_embedding(emb) == [], name
        assert emb.rotation.euler_ok()


def test_crossing_detected():
    emb = GridEmbedding({"a": (0, 1), "b": (2, 1), "c": (1, 0), "d": (1, 2)},
                        {("a", "b"): ((0, 1), (2, 1)), ("c", "d"): ((1, 0), (1, 2))})
    assert any("cross" in p for p in validate_embedding(emb))


def test_diagonal_detected():
    emb = GridEmbedding({"a": (0, 0), "b": (1, 1)}, {("a", "b"): ((0, 0), (1, 1))})
    assert any("axis" in p for p in validate_embedding(emb))


def test_rotation_mismatch_detected():
    emb = orthogonal_embed(nx.star_graph(3))
    order = emb.rotation.order[0]
    bad = RotationSystem({**emb.rotation.order, 0: (order[1], order[0], order[2])})
    emb2 = GridEmbedding(emb.vertex_pos, emb.edge_path, bad)
    assert any("rotation" in p for p in validate_embedding(emb2))


def test_json_roundtrip_byte_identical(fig1):
    emb = orthogonal_embed(incidence_graph(fig1))
    text = embedding_to_json(emb)
    back = embedding_from_json(text)
    assert embedding_to_json(back) == text
    assert validate_embedding(back) == []
