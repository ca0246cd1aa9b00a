import itertools
import math

import numpy as np
import pytest

from dyngraph import (
    EvalReport,
    betweenness_stat,
    burstiness_stat,
    communicability_stats,
    evaluate,
    generate_toy_disentangled,
    mmd,
    node_attribute_metrics,
    temporal_correlation,
)
from dyngraph.data import DynamicGraph, GraphSnapshot


def graph_from_adjacencies(adjs, feats=None):
    adjs = [np.asarray(a, dtype=float) for a in adjs]
    n = adjs[0].shape[0]
    mask = np.ones(n, dtype=bool)
    if feats is None:
        feats = [np.zeros((n, 1)) for _ in adjs]
    return DynamicGraph(tuple(GraphSnapshot(a, f, mask) for a, f in zip(adjs, feats)))


def random_binary_graph(n, T, seed, p=0.45):
    rng = np.random.default_rng(seed)
    adjs = []
    for _ in range(T):
        adj = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < p:
                    adj[i, j] = adj[j, i] = 1.0
        adjs.append(adj)
    return graph_from_adjacencies(adjs)


def brute_force_betweenness(adj):
    """Independent oracle: enumerate every simple path between every node
    pair, find the shortest ones, and count pass-throughs. Only viable for
    tiny n, which is the point."""
    n = adj.shape[0]
    nodes = range(n)
    norm = (n - 1) * (n - 2) / 2
    score = np.zeros(n)
    for s, t in itertools.combinations(nodes, 2):
        paths = []
        for length in range(1, n):
            for middle in itertools.permutations([v for v in nodes if v not in (s, t)], length - 1):
                path = (s,) + middle + (t,)
                if all(adj[path[i], path[i + 1]] for i in range(len(path) - 1)):
                    paths.append(path)
            if paths:
                break  # shortest length found
        if not paths:
            continue
        for v in nodes:
            if v in (s, t):
                continue
            through = sum(1 for p in paths if v in p)
            score[v] += through / len(paths)
    return score / norm


class TestBetweenness:
    def test_path_graph(self):
        g = graph_from_adjacencies([[[0, 1, 0], [1, 0, 1], [0, 1, 0]]])
        assert betweenness_stat(g).values.tolist() == [0.0, 1.0, 0.0]

    def test_complete_graph(self):
        K4 = np.ones((4, 4)) - np.eye(4)
        g = graph_from_adjacencies([K4])
        assert betweenness_stat(g).values.tolist() == [0.0, 0.0, 0.0, 0.0]

    def test_star_two_snapshots(self):
        star = np.zeros((5, 5))
        star[0, 1:] = star[1:, 0] = 1.0
        g = graph_from_adjacencies([star, star])
        values = betweenness_stat(g).values
        assert values[0] == pytest.approx(1.0, abs=1e-15)
        assert np.all(values[1:] == 0.0)

    def test_matches_brute_force_enumeration(self):
        cases = 0
        for seed in range(220):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(3, 7))
            g = random_binary_graph(n, 1, seed=seed + 1000, p=float(rng.uniform(0.2, 0.8)))
            ours = betweenness_stat(g).values
            oracle = brute_force_betweenness(g.snapshots[0].adjacency)
            assert np.allclose(ours, oracle, atol=1e-12), f"seed {seed}"
            cases += 1
        assert cases >= 200

    def test_too_few_active_nodes_contribute_zero(self):
        mask = np.array([True, True, False, False])
        adj = np.zeros((4, 4))
        adj[0, 1] = adj[1, 0] = 1.0
        g = DynamicGraph((GraphSnapshot(adj, np.zeros((4, 1)), mask),))
        assert betweenness_stat(g).values.tolist() == [0.0, 0.0]


class TestCommunicability:
    def test_empty_graph_identity(self):
        g = graph_from_adjacencies([np.zeros((4, 4))])
        broadcast, receive = communicability_stats(g)
        assert np.allclose(broadcast.values, 0.25, atol=0)
        assert np.allclose(receive.values, 0.25, atol=0)

    def test_two_node_hand_inverse(self):
        g = graph_from_adjacencies([[[0, 1], [1, 0]]])
        broadcast, receive = communicability_stats(g, alpha=0.5)
        # (I - 0.5 A)^{-1} = [[4/3, 2/3], [2/3, 4/3]]; rows sum to 2, / n=2
        assert np.allclose(broadcast.values, [1.0, 1.0], atol=1e-12)
        assert np.allclose(receive.values, [1.0, 1.0], atol=1e-12)

    def test_broadcast_equals_receive_single_snapshot(self):
        # each resolvent is symmetric, so for T=1 the roles coincide; for
        # longer sequences the ordered product of non-commuting symmetric
        # factors is not symmetric and the two centralities genuinely differ
        for seed in range(10):
            g = random_binary_graph(5, 1, seed=seed)
            broadcast, receive = communicability_stats(g)
            assert np.allclose(broadcast.values, receive.values, atol=1e-12)

    def test_broadcast_equals_receive_identical_snapshots(self):
        # identical snapshots commute (powers of one matrix), restoring the
        # symmetry for any T
        base = random_binary_graph(5, 1, seed=3).snapshots[0].adjacency
        g = graph_from_adjacencies([base] * 4)
        broadcast, receive = communicability_stats(g)
        assert np.allclose(broadcast.values, receive.values, atol=1e-12)

    def test_alpha_precondition(self):
        g = graph_from_adjacencies([[[0, 1], [1, 0]]])
        with pytest.raises(ValueError, match="precondition|resolvent"):
            communicability_stats(g, alpha=1.0)  # rho = 1


class TestBurstiness:
    def test_always_active_is_minus_one(self):
        adj = np.array([[0, 1], [1, 0]], dtype=float)
        g = graph_from_adjacencies([adj, adj, adj, adj])
        vec = burstiness_stat(g)
        assert np.allclose(vec.values, -1.0, atol=0)
        assert vec.degenerate == 0

    def test_gaps_one_three(self):
        # node active at snapshots 0, 1, 4: gaps {1, 3} -> B = -1/3 exactly
        empty = np.zeros((2, 2))
        edge = np.array([[0, 1], [1, 0]], dtype=float)
        g = graph_from_adjacencies([edge, edge, empty, empty, edge])
        vec = burstiness_stat(g)
        assert np.allclose(vec.values, -1.0 / 3.0, atol=1e-15)

    def test_single_event_filtered(self):
        empty = np.zeros((2, 2))
        edge = np.array([[0, 1], [1, 0]], dtype=float)
        g = graph_from_adjacencies([empty, edge, empty])
        vec = burstiness_stat(g)
        assert vec.values.size == 0
        assert vec.degenerate == 2


class TestTemporalCorrelation:
    def test_identical_snapshots(self):
        adj = np.array([[0, 1, 1], [1, 0, 0], [1, 0, 0]], dtype=float)
        vec, scalar = temporal_correlation(graph_from_adjacencies([adj, adj, adj]))
        assert np.allclose(vec.values, 1.0, atol=0)
        assert scalar == pytest.approx(1.0, abs=0)

    def test_disjoint_edge_sets(self):
        a = np.zeros((4, 4))
        a[0, 1] = a[1, 0] = 1.0
        b = np.zeros((4, 4))
        b[2, 3] = b[3, 2] = 1.0
        _, scalar = temporal_correlation(graph_from_adjacencies([a, b]))
        assert scalar == 0.0

    def test_hand_computed_three_node_example(self):
        a = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=float)
        b = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=float)
        vec, scalar = temporal_correlation(graph_from_adjacencies([a, b]))
        expected = np.array([1.0, 1.0 / math.sqrt(2.0), 0.0])
        assert np.allclose(vec.values, expected, atol=1e-15)
        assert scalar == pytest.approx((1.0 + 1.0 / math.sqrt(2.0)) / 3.0, abs=1e-12)

    def test_bounded_for_binary_graphs(self):
        for seed in range(20):
            g = random_binary_graph(5, 4, seed=seed)
            vec, scalar = temporal_correlation(g)
            assert np.all(vec.values >= 0) and np.all(vec.values <= 1)
            assert 0.0 <= scalar <= 1.0

    def test_requires_two_snapshots(self):
        with pytest.raises(ValueError):
            temporal_correlation(graph_from_adjacencies([np.zeros((3, 3))]))


class TestMMD:
    def test_identical_sets_exactly_zero(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            sample = rng.standard_normal(int(rng.integers(1, 40)))
            value = mmd([sample], [sample.copy()], floor=False)
            assert abs(value) <= 1e-12
            assert mmd([sample], [sample.copy()]) == 0.0

    def test_singleton_closed_form(self):
        value = mmd([np.array([0.0])], [np.array([1.0])], bandwidth=1.0)
        expected = 2.0 - 2.0 * math.exp(-0.5)
        assert value == pytest.approx(expected, abs=1e-12)

    def test_symmetry_exact(self):
        rng = np.random.default_rng(5)
        a = [rng.standard_normal(9), rng.standard_normal(4)]
        b = [rng.uniform(0, 3, 7)]
        assert mmd(a, b) == mmd(b, a)

    def test_median_heuristic_degenerate(self):
        # all-equal pooled samples: median distance 0 falls back to sigma=1
        value = mmd([np.zeros(4)], [np.zeros(6)])
        assert value == 0.0

    def test_empty_input_error(self):
        with pytest.raises(ValueError):
            mmd([], [np.array([1.0])])

    def test_separated_samples_positive(self):
        value = mmd([np.zeros(10)], [np.full(10, 5.0)])
        assert value > 0.1


class TestNodeAttributeMetrics:
    def test_perfect_prediction(self):
        ds, _ = generate_toy_disentangled(6, 5, 4, seed=0)
        mse, r2, pcc = node_attribute_metrics(ds.graphs, ds.graphs)
        assert mse == 0.0
        assert r2 == pytest.approx(1.0, abs=0)
        assert pcc == pytest.approx(1.0, abs=1e-12)

    def test_constant_prediction_r2_zero(self):
        ds, _ = generate_toy_disentangled(4, 5, 4, seed=1)
        flat = np.concatenate([g.feature_stack().ravel() for g in ds.graphs])
        mean_val = flat.mean()
        const_graphs = []
        for g in ds.graphs:
            snaps = [GraphSnapshot(s.adjacency, np.full_like(s.features, mean_val), s.node_mask)
                     for s in g.snapshots]
            const_graphs.append(DynamicGraph(tuple(snaps)))
        mse, r2, pcc = node_attribute_metrics(ds.graphs, const_graphs)
        assert r2 == pytest.approx(0.0, abs=1e-9)
        assert pcc is None  # zero variance on the generated side

    def test_zero_variance_reference_flagged(self):
        mask = np.ones(2, dtype=bool)
        adj = np.zeros((2, 2))
        flat_g = DynamicGraph((GraphSnapshot(adj, np.ones((2, 1)), mask),))
        other = DynamicGraph((GraphSnapshot(adj, np.array([[0.0], [2.0]]), mask),))
        mse, r2, pcc = node_attribute_metrics([flat_g], [other])
        assert r2 is None and pcc is None
        assert mse == pytest.approx(1.0, abs=1e-15)


class TestEvaluate:
    def test_self_comparison_is_perfect(self):
        ds, _ = generate_toy_disentangled(6, 6, 5, seed=2)
        report = evaluate(ds.graphs, ds.graphs)
        for name, value in report.mmd.items():
            assert value == 0.0, name
        assert report.mse == 0.0
        assert report.r2 == pytest.approx(1.0, abs=0)
        assert report.pcc == pytest.approx(1.0, abs=1e-12)

    def test_empty_graph_sets(self):
        empty = graph_from_adjacencies([np.zeros((3, 3))] * 4)
        report = evaluate([empty] * 2, [empty] * 2)
        assert report.mmd["betweenness"] == 0.0
        assert report.mmd["broadcast"] == 0.0
        assert report.mmd["burstiness"] is None  # everything filtered
        assert report.degenerate["burstiness_real"] == 3 * 2
        assert report.degenerate["burstiness_gen"] == 3 * 2

    def test_graph_order_invariance(self):
        ds, _ = generate_toy_disentangled(8, 6, 5, seed=3)
        real = list(ds.graphs[:4])
        gen = list(ds.graphs[4:])
        r1 = evaluate(real, gen)
        r2 = evaluate(real[::-1], gen[::-1])
        assert r1 == r2

    def test_label_permutation_equivariance(self):
        g = random_binary_graph(5, 4, seed=8)
        perm = np.array([3, 1, 4, 0, 2])
        adjs = [s.adjacency[np.ix_(perm, perm)] for s in g.snapshots]
        gp = graph_from_adjacencies(adjs)
        for stat in (betweenness_stat, burstiness_stat):
            v0 = stat(g).values
            v1 = stat(gp).values
            if v0.size == 5 and v1.size == 5:  # burstiness may filter
                assert np.allclose(v1, v0[perm], atol=1e-12)
        b0, r0 = communicability_stats(g)
        b1, r1 = communicability_stats(gp)
        assert np.allclose(b1.values, b0.values[perm], atol=1e-12)
        n0, s0 = temporal_correlation(g)
        n1, s1 = temporal_correlation(gp)
        assert np.allclose(n1.values, n0.values[perm], atol=1e-12)
        assert s0 == pytest.approx(s1, abs=1e-14)

    def test_report_json_round_trip(self):
        ds, _ = generate_toy_disentangled(4, 6, 5, seed=4)
        report = evaluate(ds.graphs[:2], ds.graphs[2:])
        back = EvalReport.from_json(report.to_json())
        assert back == report

    def test_table_has_all_columns(self):
        ds, _ = generate_toy_disentangled(4, 6, 5, seed=5)
        table = evaluate(ds.graphs[:2], ds.graphs[2:]).format_table()
        for col in ("Betweenness", "Broadcast", "Burstiness", "Receive", "Temporal Corr."):
            assert col in table
