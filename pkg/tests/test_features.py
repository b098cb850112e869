import math

import numpy as np
import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliquespace.errors import DisconnectedGraphError, FeatureTimeoutError
from cliquespace.features import (
    FEATURE_NAMES,
    FeatureVector,
    centrality_stats,
    compute_features,
    greedy_clique,
    mcp_specific_features,
    read_features_csv,
    spectral_features,
    write_features_csv,
)
from cliquespace.graph import Graph, generate

from oracles import connected_gnp, to_networkx


class TestFeatureVectorShape:
    def test_canonical_order_has_35_names(self):
        assert len(FEATURE_NAMES) == 35
        assert FEATURE_NAMES[0] == "node_count"
        assert FEATURE_NAMES[-1] == "chromatic_minus_greedy_clique_gap"

    def test_as_array_follows_canonical_order(self, k3):
        fv = compute_features(k3)
        arr = fv.as_array()
        assert arr.shape == (35,)
        for i, name in enumerate(FEATURE_NAMES):
            assert arr[i] == getattr(fv, name)

    def test_timings_cover_every_group(self, k5):
        fv = compute_features(k5)
        assert set(fv.timings) == {
            "degree", "distance", "centrality", "clustering", "spectral", "clique",
        }
        assert all(t >= 0.0 for t in fv.timings.values())


class TestPreconditions:
    def test_disconnected_graph_rejected(self, two_triangles):
        with pytest.raises(DisconnectedGraphError):
            compute_features(two_triangles)

    def test_single_node_rejected(self):
        with pytest.raises(ValueError):
            compute_features(Graph(1, []))

    def test_nonpositive_timeout_rejected(self, k3):
        with pytest.raises(ValueError):
            compute_features(k3, timeout=0.0)

    def test_budget_overrun_raises(self):
        g = connected_gnp(60, 0.5, seed=7)
        with pytest.raises(FeatureTimeoutError):
            compute_features(g, timeout=1e-9)


class TestCountsAndDegrees:
    def test_k5_basics(self, k5):
        fv = compute_features(k5)
        assert fv.node_count == 5.0
        assert fv.edge_count == 10.0
        assert fv.density == 1.0
        assert fv.median_degree == 4.0
        assert fv.std_degree == 0.0

    def test_star_neighbor_degree_medians(self, star7):
        # leaves see only the hub (degree 6); the hub sees degree-1 leaves
        fv = compute_features(star7)
        assert fv.median_median_neighbor_degree == 6.0
        assert fv.std_median_neighbor_degree == pytest.approx(
            math.sqrt(1050.0 / 343.0), abs=1e-12
        )

    def test_density_of_cycle(self, c5):
        fv = compute_features(c5)
        assert fv.density == pytest.approx(0.5)


class TestDistanceFeatures:
    def test_girth_fixtures(self, k3, c4, c5, p4, star7):
        assert compute_features(k3).girth == 3.0
        assert compute_features(c4).girth == 4.0
        assert compute_features(c5).girth == 5.0
        assert compute_features(p4).girth == 0.0  # acyclic sentinel
        assert compute_features(star7).girth == 0.0

    def test_petersen_girth_and_diameter(self):
        g = Graph(
            10,
            [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0),
             (5, 7), (7, 9), (9, 6), (6, 8), (8, 5),
             (0, 5), (1, 6), (2, 7), (3, 8), (4, 9)],
            name="petersen",
        )
        fv = compute_features(g)
        assert fv.girth == 5.0
        assert fv.diameter == 2.0

    def test_path_geodesic_stats(self, p3):
        # distances on 0-1-2: {1, 1, 2}
        fv = compute_features(p3)
        assert fv.diameter == 2.0
        assert fv.median_geodesic_distance == 1.0
        assert fv.std_geodesic_distance == pytest.approx(math.sqrt(2.0) / 3.0)

    def test_even_cycle_geodesics(self, c4):
        # C4 pair distances: four at 1, two at 2
        fv = compute_features(c4)
        assert fv.diameter == 2.0
        assert fv.median_geodesic_distance == 1.0

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_girth_and_diameter_match_networkx(self, seed):
        g = connected_gnp(25, 0.12, seed=seed)
        G = to_networkx(g)
        fv = compute_features(g)
        expected_girth = nx.girth(G)
        assert fv.girth == (0.0 if expected_girth == math.inf else float(expected_girth))
        assert fv.diameter == float(nx.diameter(G))


class TestCentralities:
    def test_path_betweenness_hand_values(self, p3):
        stats = centrality_stats(p3)
        # centre node carries the single 0-2 geodesic: values (0, 1, 0)
        assert stats.median_betweenness == 0.0
        assert stats.std_betweenness == pytest.approx(math.sqrt(2.0) / 3.0)

    def test_star_betweenness_median_is_zero(self, star7):
        stats = centrality_stats(star7)
        assert stats.median_betweenness == 0.0
        assert stats.median_degree == pytest.approx(1.0 / 6.0)

    def test_vertex_transitive_graphs_have_zero_spread(self, k5, c5):
        for g in (k5, c5):
            stats = centrality_stats(g)
            assert stats.std_betweenness < 1e-9
            assert stats.std_closeness < 1e-9
            assert stats.std_degree < 1e-9
            assert stats.std_eigenvector < 1e-9

    def test_disconnected_rejected(self, two_triangles):
        with pytest.raises(DisconnectedGraphError):
            centrality_stats(two_triangles)

    @pytest.mark.parametrize("seed", [11, 12, 13])
    def test_betweenness_and_closeness_match_networkx(self, seed):
        g = connected_gnp(30, 0.2, seed=seed)
        G = to_networkx(g)
        stats = centrality_stats(g)
        bc = np.array([nx.betweenness_centrality(G, normalized=True)[v]
                       for v in range(g.node_count)])
        cc = np.array([nx.closeness_centrality(G)[v] for v in range(g.node_count)])
        assert stats.median_betweenness == pytest.approx(float(np.median(bc)), abs=1e-9)
        assert stats.std_betweenness == pytest.approx(float(np.std(bc)), abs=1e-9)
        assert stats.median_closeness == pytest.approx(float(np.median(cc)), abs=1e-9)
        assert stats.std_closeness == pytest.approx(float(np.std(cc)), abs=1e-9)

    @pytest.mark.parametrize("seed", [21, 22])
    def test_eigenvector_matches_dense_eigendecomposition(self, seed):
        g = connected_gnp(24, 0.3, seed=seed)
        adj = np.zeros((g.node_count, g.node_count))
        for u, v in g.edges:
            adj[u, v] = adj[v, u] = 1.0
        _, vecs = np.linalg.eigh(adj)
        lead = vecs[:, -1]
        if lead.sum() < 0:
            lead = -lead
        stats = centrality_stats(g)
        assert stats.median_eigenvector == pytest.approx(float(np.median(lead)), abs=1e-6)
        assert stats.std_eigenvector == pytest.approx(float(np.std(lead)), abs=1e-6)

    def test_bipartite_power_iteration_converges(self, c4):
        # adjacency spectrum is symmetric here; the shifted iteration still settles
        stats = centrality_stats(c4)
        assert stats.median_eigenvector == pytest.approx(0.5, abs=1e-7)
        assert stats.std_eigenvector < 1e-7


class TestClustering:
    def test_fixture_values(self, k5, c5, star7):
        assert compute_features(k5).global_clustering_coefficient == 1.0
        assert compute_features(c5).global_clustering_coefficient == 0.0
        assert compute_features(star7).global_clustering_coefficient == 0.0

    @pytest.mark.parametrize("seed", [31, 32, 33])
    def test_matches_networkx_transitivity(self, seed):
        g = connected_gnp(40, 0.25, seed=seed)
        fv = compute_features(g)
        assert fv.global_clustering_coefficient == pytest.approx(
            nx.transitivity(to_networkx(g)), abs=1e-12
        )


class TestSpectralFeatures:
    def test_triangle_even_walk_proportion_frozen(self, k3):
        # adjacency eigenvalues of K3 are (2, -1, -1)
        expected = (math.cosh(2) + 2 * math.cosh(1)) / (math.exp(2) + 2 * math.exp(-1))
        spec = spectral_features(k3)
        assert spec.even_closed_walk_proportion == pytest.approx(expected, abs=1e-12)
        assert spec.even_closed_walk_proportion == pytest.approx(0.84289, abs=5e-6)

    def test_bipartite_graphs_score_exactly_one(self, c4, p4, star7):
        for g in (c4, p4, star7):
            spec = spectral_features(g)
            assert spec.even_closed_walk_proportion == pytest.approx(1.0, abs=1e-9)

    def test_odd_cycle_scores_below_one(self, c5):
        assert spectral_features(c5).even_closed_walk_proportion < 1.0 - 1e-6

    def test_complete_graph_spectrum(self, k5):
        # K5: adjacency (4, -1 x4), Laplacian (0, 5 x4)
        spec = spectral_features(k5)
        assert spec.spectral_radius == pytest.approx(4.0, abs=1e-9)
        assert spec.smallest_adjacency == pytest.approx(-1.0, abs=1e-9)
        assert spec.second_largest_adjacency == pytest.approx(-1.0, abs=1e-9)
        assert spec.gap_largest_second_largest_adjacency == pytest.approx(5.0, abs=1e-9)
        assert spec.laplacian_spectral_radius == pytest.approx(5.0, abs=1e-9)
        assert spec.smallest_nonzero_laplacian == pytest.approx(5.0, abs=1e-9)
        assert spec.second_smallest_nonzero_laplacian == pytest.approx(5.0, abs=1e-9)
        assert spec.gap_largest_smallest_laplacian == pytest.approx(5.0, abs=1e-9)
        assert spec.energy == pytest.approx(8.0, abs=1e-9)

    def test_single_edge_sentinels(self):
        # K2 has one non-zero Laplacian eigenvalue; the second slot is 0
        spec = spectral_features(Graph(2, [(0, 1)]))
        assert spec.smallest_nonzero_laplacian == pytest.approx(2.0)
        assert spec.second_smallest_nonzero_laplacian == 0.0
        assert spec.second_largest_laplacian == pytest.approx(0.0)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            spectral_features(Graph(1, []))

    @pytest.mark.parametrize("seed", [41, 42, 43, 44])
    def test_trace_identities(self, seed):
        g = connected_gnp(30, 0.3, seed=seed)
        adj = np.zeros((g.node_count, g.node_count))
        for u, v in g.edges:
            adj[u, v] = adj[v, u] = 1.0
        eva = np.linalg.eigvalsh(adj)
        # sum of eigenvalues is trace 0; sum of squares counts edge endpoints
        assert abs(eva.sum()) < 1e-8 * g.node_count
        assert (eva ** 2).sum() == pytest.approx(2.0 * g.edge_count, rel=1e-9)
        spec = spectral_features(g)
        assert spec.energy >= abs(eva.sum()) - 1e-9
        assert spec.spectral_radius == pytest.approx(float(eva[-1]), abs=1e-9)


class TestMcpSpecificFeatures:
    def test_c5_walkthrough(self, c5):
        # coloring needs 3 colors on an odd cycle; greedy clique stops at an edge
        k_core, gap = mcp_specific_features(c5)
        assert k_core == 2
        assert gap == 1
        assert len(greedy_clique(c5)) == 2

    def test_complete_graph_gap_zero(self, k5):
        k_core, gap = mcp_specific_features(k5)
        assert k_core == 4
        assert gap == 0
        assert greedy_clique(k5) == [0, 1, 2, 3, 4]

    def test_greedy_clique_is_a_clique(self):
        for seed in (51, 52, 53):
            g = connected_gnp(35, 0.4, seed=seed)
            clique = greedy_clique(g)
            assert len(set(clique)) == len(clique)
            for i, u in enumerate(clique):
                for v in clique[i + 1:]:
                    assert g.has_edge(u, v)

    @pytest.mark.parametrize("seed", [61, 62, 63])
    def test_k_core_matches_networkx(self, seed):
        g = connected_gnp(40, 0.3, seed=seed)
        k_core, _ = mcp_specific_features(g)
        assert k_core == max(nx.core_number(to_networkx(g)).values())

    def test_star_k_core_is_one(self, star7):
        k_core, _ = mcp_specific_features(star7)
        assert k_core == 1


class TestCsvRoundTrip:
    def test_write_read_identity(self, tmp_path, k3, c5, star7):
        rows = [
            ("k3", compute_features(k3)),
            ("c5", compute_features(c5)),
            ("star7", compute_features(star7)),
        ]
        path = tmp_path / "features.csv"
        write_features_csv(path, rows, meta={"tool": "cliquespace/0.1.0", "config": "abc123"})
        ids, matrix, meta = read_features_csv(path)
        assert ids == ["k3", "c5", "star7"]
        assert meta == {"tool": "cliquespace/0.1.0", "config": "abc123"}
        for i, (_, fv) in enumerate(rows):
            assert np.array_equal(matrix[i], fv.as_array())

    def test_header_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("instance_id,node_count\nx,3\n")
        with pytest.raises(ValueError):
            read_features_csv(path)

    def test_empty_corpus(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_features_csv(path, [])
        ids, matrix, _ = read_features_csv(path)
        assert ids == []
        assert matrix.shape == (0, 35)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(4, 18), p=st.floats(0.25, 0.8), seed=st.integers(0, 200))
def test_feature_vector_is_finite_and_consistent(n, p, seed):
    g = connected_gnp(n, p, seed=seed)
    fv = compute_features(g)
    arr = fv.as_array()
    assert np.isfinite(arr).all()
    assert fv.density <= 1.0 + 1e-12
    assert fv.diameter >= 1.0
    assert 0.0 <= fv.global_clustering_coefficient <= 1.0 + 1e-12
    assert fv.even_closed_walk_proportion <= 1.0 + 1e-9
    assert fv.spectral_radius >= fv.second_largest_adjacency - 1e-12
    assert fv.k_core_number >= 1.0
    # greedy coloring bounds the chromatic number from above, which bounds
    # the clique number from above, which bounds the greedy clique
    assert fv.chromatic_minus_greedy_clique_gap >= 0.0
