import numpy as np
import pytest
from hypothesis import given, strategies as st

from swarmbt.bt import ACTIONS, BehaviorTree, LeafAction, parse, random_tree
from swarmbt.metrics import avg_nn_distance
from swarmbt.sim import (
    ArenaConfig, PlacementError, SwarmState, init_state, leaf_direction, simulate,
    simulate_many, step, tick,
)

A = LeafAction
CFG = ArenaConfig()
R = np.sqrt(0.5)


def state(*pts):
    return SwarmState.from_positions(np.array(pts, dtype=float))


def test_defaults():
    assert (CFG.side_length, CFG.agent_count, CFG.agent_radius, CFG.sensing_range, CFG.speed,
            CFG.steps) == (8.0, 20, 0.25, 0.5, 1.0, 100)


@pytest.mark.parametrize("kw", [{"side_length": 0}, {"agent_count": 0}, {"sensing_range": 0.1}])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        ArenaConfig(**kw)


class TestInit:
    def test_deterministic(self):
        a = init_state(CFG, np.random.default_rng(9))
        b = init_state(CFG, np.random.default_rng(9))
        assert np.array_equal(a.positions, b.positions)

    @given(st.integers(0, 2**32 - 1))
    def test_spacing_and_bounds(self, seed):
        s = init_state(CFG, np.random.default_rng(seed))
        p = s.positions
        d = np.linalg.norm(p[:, None] - p[None], axis=-1) + np.eye(20) * 99
        assert d.min() >= 0.5
        assert ((p >= 0) & (p <= 8)).all()
        assert np.array_equal(s.origins, p) and s.t == 0

    def test_capacity_error(self, rng):
        with pytest.raises(PlacementError):
            init_state(ArenaConfig(side_length=1.0, agent_count=50), rng, max_tries=2000)


class TestLeafDirection:
    s = state((0, 0), (0.3, 0))

    def test_aggregation(self):
        assert np.allclose(leaf_direction(A.AGGREGATION, 0, self.s, CFG), (1, 0))

    def test_dispersion(self):
        assert np.allclose(leaf_direction(A.DISPERSION, 0, self.s, CFG), (-1, 0))

    def test_constants(self):
        assert np.allclose(leaf_direction(A.NORTHEAST, 0, self.s, CFG), (R, R), atol=1e-9)
        assert np.allclose(leaf_direction(A.SOUTHEAST, 0, self.s, CFG), (R, -R), atol=1e-9)
        assert np.allclose(leaf_direction(A.SOUTHWEST, 0, self.s, CFG), (-R, -R), atol=1e-9)
        assert np.allclose(leaf_direction(A.NORTHWEST, 0, self.s, CFG), (-R, R), atol=1e-9)

    def test_clustering_picks_nearest(self):
        s = state((0, 0), (0.3, 0), (0, 0.4))
        assert np.allclose(leaf_direction(A.CLUSTERING, 0, s, CFG), (1, 0))
        # aggregation goes to the centroid instead
        assert np.allclose(leaf_direction(A.AGGREGATION, 0, s, CFG), np.array([0.3, 0.4]) / 0.5)

    def test_separation_weights_closer_neighbours(self):
        s = state((0, 0), (0.1, 0), (0, 0.4))
        v = leaf_direction(A.SEPARATION, 0, s, CFG)
        # push = (-10, 0) + (0, -2.5)
        assert np.allclose(v, np.array([-10, -2.5]) / np.hypot(10, 2.5))

    @pytest.mark.parametrize("action", [A.AGGREGATION, A.DISPERSION, A.SEPARATION, A.CLUSTERING])
    def test_no_neighbours_is_zero(self, action):
        s = state((0, 0), (2, 0))
        assert np.array_equal(leaf_direction(action, 0, s, CFG), np.zeros(2))

    def test_random_is_unit(self, rng):
        for _ in range(50):
            assert np.isclose(np.linalg.norm(leaf_direction(A.RANDOM, 0, self.s, CFG, rng)), 1.0)


class TestTick:
    s = state((4, 4), (7, 7))

    def test_single_constant(self, rng):
        assert np.allclose(tick(BehaviorTree.of(A.NORTHEAST), 0, self.s, CFG, rng), (R, R), atol=1e-9)

    def test_cancellation(self, rng):
        v = tick(BehaviorTree.of(A.NORTHEAST, A.SOUTHWEST), 0, self.s, CFG, rng)
        assert np.array_equal(v, np.zeros(2))

    def test_normalised(self, rng):
        v = tick(BehaviorTree.of(A.NORTHEAST, A.NORTHEAST), 0, self.s, CFG, rng)
        assert np.isclose(np.linalg.norm(v), 1.0) and np.isclose(v[0], v[1])

    def test_speed_scaling(self, rng):
        v = tick(BehaviorTree.of(A.NORTHWEST), 0, self.s, ArenaConfig(speed=2.5), rng)
        assert np.isclose(np.linalg.norm(v), 2.5)


class TestStep:
    def test_one_euler_step(self, rng):
        s = step(state((4, 4)), BehaviorTree.of(A.NORTHEAST), ArenaConfig(agent_count=1), rng)
        assert np.allclose(s.positions, [(4 + R, 4 + R)], atol=1e-9)
        assert s.t == 1

    def test_clamp(self, rng):
        s = step(state((7.9, 7.9)), BehaviorTree.of(A.NORTHEAST), ArenaConfig(agent_count=1), rng)
        assert np.array_equal(s.positions, [(8.0, 8.0)])

    def test_out_of_range_aggregation_rests(self, rng):
        s0 = state((3, 4), (5, 4))
        s = step(s0, BehaviorTree.of(A.AGGREGATION), CFG, rng)
        assert np.array_equal(s.positions, s0.positions)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 5))
    def test_matches_per_agent_reference(self, seed, n_leaves):
        rng = np.random.default_rng(seed)
        tree = random_tree(n_leaves, rng)
        pos = rng.uniform(3, 5, size=(12, 2))  # dense enough to have neighbours
        s0 = SwarmState.from_positions(pos)
        got = step(s0, tree, CFG, np.random.default_rng(seed + 1))
        ref_rng = np.random.default_rng(seed + 1)
        vel = np.array([tick(tree, i, s0, CFG, ref_rng) for i in range(12)])
        want = np.clip(pos + vel * CFG.dt, 0, CFG.side_length)
        assert np.allclose(got.positions, want, atol=1e-12, rtol=0)


class TestSimulate:
    def test_frame_count(self, rng):
        tr = simulate(BehaviorTree.of(A.NORTHEAST), init_state(CFG, rng), CFG, rng)
        assert tr.positions.shape == (101, 20, 2)
        assert len(tr.frames) == 101 and tr.frames[50].t == 50

    @pytest.mark.parametrize("text", ["seq(northeast,aggregation,clustering)", "seq(random,separation,random)"])
    def test_deterministic(self, text):
        runs = []
        for _ in range(2):
            rng = np.random.default_rng(77)
            runs.append(simulate(parse(text), init_state(CFG, rng), CFG, rng))
        assert runs[0].positions.tobytes() == runs[1].positions.tobytes()

    def test_matches_repeated_step(self):
        tree = parse("seq(random,aggregation,northwest)")
        init = init_state(CFG, np.random.default_rng(0))
        tr = simulate(tree, init, CFG, np.random.default_rng(1))
        rng, s = np.random.default_rng(1), init
        for t in range(1, 101):
            s = step(s, tree, CFG, rng)
            assert np.array_equal(s.positions, tr.positions[t])

    def test_separation_spreads_tight_cluster(self):
        grid = [(4 + 0.15 * i, 4 + 0.15 * j) for i in range(5) for j in range(4)]
        tr = simulate(parse("seq(separation)"), state(*grid), CFG, np.random.default_rng(0))
        nn = avg_nn_distance(tr.positions[:11])
        assert np.all(np.diff(nn) >= 0)
        assert nn[-1] > nn[0]

    def test_batch_matches_single(self, rng):
        trees = [random_tree(3, rng) for _ in range(6)]
        init = init_state(CFG, rng)
        batch = simulate_many(trees, init.positions, CFG, [np.random.default_rng(i) for i in range(6)])
        for i, t in enumerate(trees):
            single = simulate(t, init, CFG, np.random.default_rng(i))
            assert np.array_equal(batch[i], single.positions)


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_bounds_and_speed_limit(seed, n_leaves):
    rng = np.random.default_rng(seed)
    cfg = ArenaConfig(steps=40)
    tr = simulate(random_tree(n_leaves, rng), init_state(cfg, rng), cfg, rng)
    p = tr.positions
    assert ((p >= 0) & (p <= cfg.side_length)).all()
    disp = np.linalg.norm(np.diff(p, axis=0), axis=-1)
    assert disp.max() <= cfg.speed * cfg.dt + 1e-9


@given(st.integers(0, 2**32 - 1), st.permutations(list(range(20))))
def test_order_independence(seed, perm):
    rng = np.random.default_rng(seed)
    deterministic = [a for a in ACTIONS if a is not A.RANDOM]
    tree = BehaviorTree(tuple(deterministic[i] for i in rng.integers(0, 8, size=3)))
    cfg = ArenaConfig(steps=30)
    init = init_state(cfg, rng)
    perm = np.array(perm)
    a = simulate(tree, init, cfg, np.random.default_rng(0))
    b = simulate(tree, SwarmState.from_positions(init.positions[perm]), cfg, np.random.default_rng(0))
    inv = np.argsort(perm)
    assert np.allclose(a.positions, b.positions[:, inv], atol=1e-9)
