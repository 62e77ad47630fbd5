import numpy as np
import pytest

from frechet_means import (
    EnumerationCapError,
    Graph,
    GraphParseError,
    GraphSpaceConfig,
    check_metric_axioms,
    enumerate_space,
    format_graph,
    graph_subspace,
    hamming_distance,
    parse_graph,
    read_graph_lines,
)
from frechet_means.graph_space import n_edge_slots, slot_pairs
from oracles import hamming_by_edge_sets


def test_slot_order_is_row_major_upper_triangular():
    assert slot_pairs(4) == ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))
    assert n_edge_slots(7) == 21


def test_hamming_distance_of_canonical_pair(s1, s2):
    assert hamming_distance(s1, s2) == 2


def test_hamming_distance_identity(s1):
    assert hamming_distance(s1, s1) == 0


def test_hamming_empty_vs_complete():
    empty = Graph(4, 0)
    complete = Graph(4, (1 << 6) - 1)
    assert hamming_distance(empty, complete) == 6


def test_hamming_rejects_mismatched_vertex_counts():
    with pytest.raises(ValueError, match="vertex counts differ"):
        hamming_distance(Graph(4, 0), Graph(5, 0))


def test_hamming_matches_edge_set_oracle():
    rng = np.random.Generator(np.random.PCG64(99))
    for nv in (4, 5):
        top = 1 << n_edge_slots(nv)
        for _ in range(200):
            g1 = Graph(nv, int(rng.integers(0, top)))
            g2 = Graph(nv, int(rng.integers(0, top)))
            assert hamming_distance(g1, g2) == hamming_by_edge_sets(g1, g2)


def test_enumerate_small_spaces():
    sp2 = enumerate_space(2)
    assert len(sp2) == 2 and sp2.bound_M == 1
    sp4 = enumerate_space(4)
    assert len(sp4) == 64 and sp4.bound_M == 6
    masks = [g.edges for g in sp4.points]
    assert masks == sorted(masks) and len(set(masks)) == 64


def test_enumeration_cap_refusal_names_required_cap():
    with pytest.raises(EnumerationCapError) as exc:
        enumerate_space(8)
    assert exc.value.required_cap == 28
    assert "28" in str(exc.value)


def test_enumeration_cap_override():
    with pytest.raises(EnumerationCapError):
        enumerate_space(GraphSpaceConfig(5, enumeration_cap=9))
    sp = enumerate_space(GraphSpaceConfig(5, enumeration_cap=10))
    assert len(sp) == 1024


def test_g4_space_satisfies_all_axioms_exhaustively(g4):
    # includes coincidence: distinct labeled graphs are at positive distance
    for nv in (2, 3):
        assert check_metric_axioms(enumerate_space(nv)).ok
    assert check_metric_axioms(g4).ok


def test_parse_examples():
    g = parse_graph("4:011000")
    assert g.edge_list() == ((1, 3), (1, 4))
    g2 = parse_graph("4:110100")
    assert format_graph(g2) == "4:110100"


def test_parse_format_round_trip():
    rng = np.random.Generator(np.random.PCG64(5))
    for nv in (1, 2, 4, 5):
        for _ in range(50):
            g = Graph(nv, int(rng.integers(0, 1 << n_edge_slots(nv))))
            assert parse_graph(format_graph(g)) == g


def test_parse_length_error():
    with pytest.raises(GraphParseError, match="5 slots.*needs exactly 6"):
        parse_graph("4:11010")


def test_parse_bad_bit_reports_column():
    with pytest.raises(GraphParseError) as exc:
        parse_graph("4:11x100")
    assert exc.value.column == 5  # 1-based: "4", ":", then third bit slot


def test_parse_missing_colon_and_bad_nv():
    with pytest.raises(GraphParseError, match="missing ':'"):
        parse_graph("4100101")
    with pytest.raises(GraphParseError, match="not a number"):
        parse_graph("x:10")


def test_graph_mask_bounds_enforced():
    with pytest.raises(ValueError, match="beyond"):
        Graph(3, 0b1000)
    with pytest.raises(ValueError, match="vertex"):
        Graph(0, 0)


def test_from_edges_and_edge_list_round_trip():
    g = Graph.from_edges(4, [(2, 1), (3, 4)])
    assert format_graph(g) == "4:100001"
    assert g.edge_list() == ((1, 2), (3, 4))
    with pytest.raises(ValueError, match="self-loop"):
        Graph.from_edges(4, [(2, 2)])
    with pytest.raises(ValueError, match="outside"):
        Graph.from_edges(4, [(1, 5)])


def test_read_graph_lines_skips_comments_and_blanks(s1, s2):
    lines = [
        "# leading comment",
        "",
        "4:100101   # trailing comment",
        "   ",
        "4:101001",
    ]
    assert read_graph_lines(lines) == [s1, s2]


def test_read_graph_lines_rejects_mixed_nv():
    with pytest.raises(GraphParseError, match="line 2.*vertex count 5 differs from 4"):
        read_graph_lines(["4:100101", "5:1001010000"])


def test_read_graph_lines_rejects_empty_input():
    with pytest.raises(GraphParseError, match="no graphs"):
        read_graph_lines(["# nothing", ""])


def test_read_graph_lines_reports_line_and_column():
    with pytest.raises(GraphParseError, match="line 3"):
        read_graph_lines(["4:100101", "", "4:10x101"])


def test_graph_subspace_matches_ambient_distances(g4, s1, s2):
    sub = graph_subspace([s2, s1, s2])
    assert len(sub) == 2
    assert sub.points == tuple(sorted((s1, s2)))
    assert sub.distance(s1, s2) == hamming_distance(s1, s2)
    assert sub.bound_M == 6


def test_graph_subspace_rejects_mixed_nv(s1):
    with pytest.raises(ValueError, match="same vertex count"):
        graph_subspace([s1, Graph(5, 0)])
