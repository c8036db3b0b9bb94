import math

import numpy as np
import pytest

from models.errors import ClumpValidationError, NodeSetError
from models.fourier_models import NodeSet
from services.bounds_service import psi
from services.torus_geometry import (
    density_criterion,
    diameter,
    local_sparsity,
    min_separation,
    neighborhood_split,
    one_sided_clique,
    pairwise_distances,
    partition_by_gap,
    set_distance,
    sparsity_decomposition,
    torus_distance,
    validate_clumps,
    wrap,
)
from strategy.node_sets import motivational_partition, spike_train_nodes


class TestWrapAndDistance:
    @pytest.mark.parametrize("x, expected", [(0.25, 0.25), (1.25, 0.25), (-0.1, 0.9), (3.0, 0.0)])
    def test_wrap(self, x, expected):
        assert wrap(x) == pytest.approx(expected, abs=1e-15)

    def test_wrap_tiny_negative_stays_canonical(self):
        w = wrap(-1e-18)
        assert 0.0 <= w < 1.0

    def test_wrap_rejects_non_finite(self):
        with pytest.raises(NodeSetError):
            wrap(math.nan)

    @pytest.mark.parametrize("a, b, expected", [(0.0, 0.75, 0.25), (0.3, 0.3, 0.0), (0.1, 0.4, 0.3)])
    def test_torus_distance(self, a, b, expected):
        assert torus_distance(a, b) == pytest.approx(expected, abs=1e-15)

    def test_pairwise_distances_symmetric_and_bounded(self, motivational):
        D = pairwise_distances(motivational)
        assert np.allclose(D, D.T)
        assert np.all(np.diag(D) == 0)
        assert D.max() <= 0.5

    def test_dilation_identity(self):
        rng = np.random.default_rng(7)
        q = rng.integers(1, 101, size=10_000)
        t = rng.uniform(-0.5, 0.5, size=10_000) / q
        for qi, ti in zip(q, t):
            assert torus_distance(qi * ti, 0.0) == pytest.approx(qi * torus_distance(ti, 0.0), abs=1e-12)

    def test_chord_length_matches_psi(self):
        rng = np.random.default_rng(8)
        for t in rng.uniform(-0.5, 0.5, size=10_000):
            chord = abs(1 - np.exp(2j * np.pi * t)) ** 2
            assert chord == pytest.approx(4 * math.pi ** 2 * t ** 2 * psi(t) ** 2, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_distance_is_a_metric(self, seed):
        rng = np.random.default_rng(seed)
        for a, b, c in rng.uniform(-2.0, 2.0, size=(2_000, 3)):
            ab, bc, ac = torus_distance(a, b), torus_distance(b, c), torus_distance(a, c)
            assert ab == pytest.approx(torus_distance(b, a), abs=1e-15)
            assert ac <= ab + bc + 1e-12
            assert 0.0 <= ab <= 0.5
        assert torus_distance(0.3, 1.3) == pytest.approx(0.0, abs=1e-15)


class TestNodeSet:
    def test_points_sorted(self):
        X = NodeSet.from_values([0.7, 1.2, -0.5])
        assert X.points == pytest.approx((0.2, 0.5, 0.7))

    def test_coincident_points_rejected(self):
        with pytest.raises(NodeSetError):
            NodeSet.from_values([0.1, 1.1])

    def test_wraparound_coincidence_rejected(self):
        with pytest.raises(NodeSetError):
            NodeSet((0.0, 1.0 - 1e-16))

    def test_non_canonical_rejected(self):
        with pytest.raises(NodeSetError):
            NodeSet((0.2, 1.5))


class TestSeparationAndSparsity:
    def test_min_separation_antipodal(self, antipodal):
        assert min_separation(antipodal) == 0.5

    def test_min_separation_motivational(self, motivational):
        assert min_separation(motivational) == pytest.approx(1 / 500, rel=1e-9)

    def test_min_separation_wraps(self):
        assert min_separation(NodeSet((0.0, 0.1, 0.95))) == pytest.approx(0.05)

    def test_min_separation_needs_two_nodes(self):
        with pytest.raises(NodeSetError):
            min_separation(NodeSet((0.3,)))

    def test_half_tau_counts_everything(self, motivational):
        assert local_sparsity(0.5, motivational) == motivational.s

    def test_motivational_closed_ball_at_three_tenths(self, motivational):
        # 1/30 and 1/3 are exactly 3/10 apart and the ball is closed
        assert local_sparsity(0.3, motivational) == 5
        assert local_sparsity(0.299, motivational) == 4

    @pytest.mark.parametrize("s", [3, 5, 12, 30])
    def test_spike_train_sparsity_at_one_over_m(self, s):
        # spacing 0.45/m: a closed 1/m ball reaches two neighbours on each side
        m = 200
        assert local_sparsity(1 / m, spike_train_nodes(s, 0.45, m)) == min(s, 5)

    def test_empty_set_has_zero_sparsity(self):
        assert local_sparsity(0.2, NodeSet()) == 0

    @pytest.mark.parametrize("tau", [0.0, -0.1, 0.51])
    def test_tau_out_of_range(self, antipodal, tau):
        with pytest.raises(ValueError):
            local_sparsity(tau, antipodal)

    @pytest.mark.parametrize("seed", range(5))
    def test_sparsity_monotone_under_subsets(self, seed, random_nodes):
        X = random_nodes(seed, 10)
        U = X.subset(range(0, 10, 2))
        for tau in (0.05, 0.1, 0.3):
            assert local_sparsity(tau, U) <= local_sparsity(tau, X)

    @pytest.mark.parametrize("seed", range(5))
    def test_one_sided_clique_bounds_sparsity(self, seed, random_nodes):
        X = random_nodes(seed, 12)
        for tau in (0.02, 0.1, 0.25):
            assert one_sided_clique(tau, X) <= local_sparsity(tau, X)

    @pytest.mark.parametrize("seed", range(20))
    def test_sparsity_one_iff_separated_beyond_tau(self, seed, random_nodes, clustered_nodes):
        rng = np.random.default_rng(30_000 + seed)
        s = int(rng.integers(2, 13))
        X = (clustered_nodes if seed % 2 else random_nodes)(seed, s)
        delta = min_separation(X)
        taus = np.concatenate([rng.uniform(1e-4, 0.5, 20), [delta * 0.999, min(delta * 1.001, 0.5)]])
        for tau in taus:
            assert (local_sparsity(tau, X) == 1) == (delta > tau)


class TestDensityCriterion:
    def test_six_s_at_half(self, motivational):
        assert density_criterion(6 * motivational.s, 0.5, motivational)

    def test_single_node_needs_m_six(self):
        assert not density_criterion(5, 0.5, NodeSet((0.0,)))
        assert density_criterion(6, 0.5, NodeSet((0.0,)))

    def test_spike_train_fails_below_three_s_over_m(self):
        m, s = 200, 20
        X = spike_train_nodes(s, 0.5, m)
        for tau in np.linspace(0.01, 3 * s / m - 0.01, 10):
            assert not density_criterion(m, tau, X)


class TestNeighborhoodSplit:
    def test_half_tau_everything_is_bad(self, motivational):
        bad, good = neighborhood_split(0.0, 0.5, motivational)
        assert bad.s == motivational.s
        assert good.s == 0

    def test_direct_split(self):
        bad, good = neighborhood_split(0.0, 0.1, NodeSet((0.0, 0.05, 0.3)))
        assert bad.points == (0.0, 0.05)
        assert good.points == (0.3,)

    def test_motivational_first_cluster(self, motivational):
        bad, good = neighborhood_split(0.0, 0.3, motivational)
        assert bad.s == 4
        assert good.s == 5


class TestSparsityDecomposition:
    def test_separated_set_is_one_part(self, antipodal):
        parts = sparsity_decomposition(0.2, antipodal)
        assert len(parts) == 1
        assert parts[0].points == antipodal.points

    def test_good_set_example_has_four_parts(self, good_set):
        parts = sparsity_decomposition(0.2, good_set)
        assert len(parts) == 4
        for part in parts:
            if part.s >= 2:
                assert min_separation(part) > 0.2

    def test_three_close_points_split_into_singletons(self):
        W = NodeSet((0.0, 0.01, 0.02))
        parts = sparsity_decomposition(0.015, W)
        assert local_sparsity(0.015, W) == 3
        assert sorted(p.points for p in parts) == [(0.0,), (0.01,), (0.02,)]

    def test_empty_set_rejected(self):
        with pytest.raises(NodeSetError):
            sparsity_decomposition(0.1, NodeSet())

    @pytest.mark.parametrize("seed", range(20))
    def test_partition_properties(self, seed, random_nodes, clustered_nodes):
        rng = np.random.default_rng(1000 + seed)
        W = (random_nodes if seed % 2 else clustered_nodes)(seed, int(rng.integers(2, 16)))
        tau = float(rng.uniform(0.005, 0.5))
        parts = sparsity_decomposition(tau, W)

        assert len(parts) == local_sparsity(tau, W)
        assert all(p.s > 0 for p in parts)
        assert sorted(x for p in parts for x in p) == list(W.points)
        for p in parts:
            if p.s >= 2:
                assert min_separation(p) > tau


class TestClumps:
    def test_motivational_partition(self, motivational):
        params = validate_clumps(motivational, motivational_partition(), 1 / 500)
        assert params.r == 3
        assert params.lam == 4
        assert params.alpha == pytest.approx(3 / 90)
        assert params.gap == pytest.approx(1 / 3 - 3 / 90)
        assert params.beta < params.gap

    def test_single_clump_has_no_gap(self, motivational):
        params = validate_clumps(motivational, [motivational], 1 / 500)
        assert params.r == 1
        assert params.beta is None

    def test_gap_axiom(self):
        X = NodeSet((0.0, 0.1, 0.2, 0.3))
        with pytest.raises(ClumpValidationError) as err:
            validate_clumps(X, [X.subset([0, 1]), X.subset([2, 3])], 0.1)
        assert err.value.axiom == "gap"

    def test_cover_axiom(self, motivational):
        with pytest.raises(ClumpValidationError) as err:
            validate_clumps(motivational, motivational_partition()[:2], 1 / 500)
        assert err.value.axiom == "cover"

    def test_separation_axiom(self, motivational):
        with pytest.raises(ClumpValidationError) as err:
            validate_clumps(motivational, motivational_partition(), 0.01)
        assert err.value.axiom == "separation"

    def test_partition_by_gap_recovers_clusters(self, motivational):
        clumps = partition_by_gap(motivational, 0.1)
        assert sorted(c.s for c in clumps) == [2, 3, 4]

    def test_partition_by_gap_across_zero(self):
        X = NodeSet((0.0, 0.01, 0.5, 0.99))
        clumps = partition_by_gap(X, 0.1)
        assert sorted(c.points for c in clumps) == [(0.0, 0.01, 0.99), (0.5,)]
        assert diameter(clumps[0] if clumps[0].s == 3 else clumps[1]) == pytest.approx(0.02)

    def test_set_distance(self):
        assert set_distance(NodeSet((0.0, 0.1)), NodeSet((0.4, 0.8))) == pytest.approx(0.2)
