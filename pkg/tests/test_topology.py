import numpy as np
import pytest

from netshrink.synth import power_law_graph
from netshrink.topology import (
    Link,
    Topology,
    giant_component,
    link_vectors,
    load_edge_list,
    save_edge_list,
)


def test_load_three_line_file(tmp_path):
    p = tmp_path / "net.txt"
    p.write_text("0 1 10 5\n1 2 20 7\n0 2 5 3\n")
    t = load_edge_list(p)
    assert t.n_nodes == 3
    assert t.n_links == 3
    assert t.weighted
    assert t.degrees() == [2, 2, 2]


def test_load_rejects_self_loop(tmp_path):
    p = tmp_path / "net.txt"
    p.write_text("0 0 1 1\n")
    with pytest.raises(ValueError, match="self-loop"):
        load_edge_list(p)


def test_load_rejects_duplicate_edge(tmp_path):
    p = tmp_path / "net.txt"
    p.write_text("0 1 1 1\n1 0 2 2\n")
    with pytest.raises(ValueError, match="duplicate"):
        load_edge_list(p)


def test_load_rejects_partial_attributes(tmp_path):
    p = tmp_path / "net.txt"
    p.write_text("0 1 10\n")
    with pytest.raises(ValueError, match="capacity given without"):
        load_edge_list(p)


def test_load_rejects_mixed_columns(tmp_path):
    p = tmp_path / "net.txt"
    p.write_text("0 1 10 5\n1 2\n")
    with pytest.raises(ValueError, match="inconsistent column count"):
        load_edge_list(p)


def test_load_reports_line_numbers(tmp_path):
    p = tmp_path / "net.txt"
    p.write_text("# comment\n0 1 10 5\nx 2 1 1\n")
    with pytest.raises(ValueError, match=r":3:"):
        load_edge_list(p)


def test_load_densifies_sparse_ids(tmp_path):
    p = tmp_path / "net.txt"
    p.write_text("100 7\n7 3500\n")
    t = load_edge_list(p)
    assert t.n_nodes == 3
    assert not t.weighted
    assert t.original_ids == [7, 100, 3500]
    assert t.degree(0) == 2  # node 7 has both links


def test_unweighted_load(tmp_path):
    p = tmp_path / "net.txt"
    p.write_text("0 1\n1 2\n")
    t = load_edge_list(p)
    assert not t.weighted
    with pytest.raises(ValueError, match="no capacity"):
        link_vectors(t)


def test_save_load_roundtrip_triangle(tmp_path, triangle):
    p = tmp_path / "out.txt"
    save_edge_list(triangle, p)
    t2 = load_edge_list(p)
    assert t2.n_nodes == triangle.n_nodes
    assert sorted(lk.pair for lk in t2.links) == sorted(lk.pair for lk in triangle.links)
    assert link_vectors(t2) == link_vectors(triangle)


def test_save_empty_topology(tmp_path):
    p = tmp_path / "empty.txt"
    save_edge_list(Topology(0, []), p)
    text = p.read_text()
    assert text.startswith("#")
    t = load_edge_list(p)
    assert t.n_nodes == 0 and t.n_links == 0


def test_roundtrip_large_generated_graph(tmp_path):
    t = power_law_graph(10_000, 2.1, seed=3)
    p = tmp_path / "big.txt"
    save_edge_list(t, p)
    t2 = load_edge_list(p)
    assert sorted(t2.degrees()) == sorted(t.degrees())
    assert t2.n_links == t.n_links


def test_save_weighted_attributes_bit_faithful(tmp_path):
    links = [Link(0, 1, 1.0 / 3.0, 0.1 + 0.2), Link(1, 2, 22.913, 7e-3)]
    t = Topology(3, links)
    p = tmp_path / "w.txt"
    save_edge_list(t, p)
    t2 = load_edge_list(p)
    assert link_vectors(t2) == link_vectors(t)


def test_constructor_rejects_bad_links():
    with pytest.raises(ValueError, match="self-loop"):
        Topology(2, [Link(1, 1)])
    with pytest.raises(ValueError, match="duplicate"):
        Topology(2, [Link(0, 1), Link(1, 0)])
    with pytest.raises(ValueError, match="only one of"):
        Topology(2, [Link(0, 1, capacity=5.0)])
    with pytest.raises(ValueError, match="non-positive"):
        Topology(2, [Link(0, 1, -1.0, 2.0)])


def test_degree_sum_is_twice_links():
    rng = np.random.default_rng(11)
    for seed in range(5):
        t = power_law_graph(500, 2.1, seed=seed)
        assert sum(t.degrees()) == 2 * t.n_links


def test_giant_component_connected_input(triangle):
    gcc, retention = giant_component(triangle)
    assert retention == 1.0
    assert gcc.n_nodes == 3 and gcc.n_links == 3


def test_giant_component_extracts_largest():
    links = [Link(0, 1), Link(1, 2), Link(0, 2), Link(3, 4)]
    t = Topology(5, links)
    gcc, retention = giant_component(t)
    assert gcc.n_nodes == 3
    assert retention == pytest.approx(3 / 5)


def test_giant_component_empty():
    gcc, retention = giant_component(Topology(0, []))
    assert gcc.n_nodes == 0 and retention == 1.0


def test_link_vectors_triangle(triangle):
    assert link_vectors(triangle) == [(2, 2, 10.0, 5.0)] * 3


def test_link_vectors_star(star4):
    assert link_vectors(star4) == [(1, 3, 1.0, 1.0)] * 3


def test_link_vectors_ordering_property():
    t = power_law_graph(300, 2.1, seed=2)
    from netshrink.scenario import assign_scenario
    t = assign_scenario(t, 2, seed=0)
    for k, kp, c, p in link_vectors(t):
        assert k <= kp
        assert c > 0 and p > 0
