import numpy as np

from oracles import jury_stable, max_real_root_batch, points_in_convex, routh_stable


def test_routh_matches_roots():
    rng = np.random.default_rng(1)
    for _ in range(1500):
        c = rng.uniform(0.05, 2, int(rng.integers(2, 8))) * rng.choice([1, 1, 1, -1], 1)
        want = bool(np.all(np.roots(c[::-1]).real < 0))
        assert routh_stable(c) == want


def test_jury_matches_roots():
    rng = np.random.default_rng(5)
    for _ in range(1500):
        n = int(rng.integers(1, 9))
        c = np.r_[rng.uniform(-1, 1, n) * rng.uniform(0, 1) ** 2, 1.0]
        assert jury_stable(c) == bool(np.all(np.abs(np.roots(c[::-1])) < 1))


def test_batched_roots_match_scalar():
    rng = np.random.default_rng(2)
    rows = rng.uniform(-2, 2, (50, 6))
    rows[:, -1] = rng.uniform(0.5, 2, 50)
    want = [np.roots(r[::-1]).real.max() for r in rows]
    assert np.allclose(max_real_root_batch(rows), want)


def test_points_in_convex_orientation_free():
    sq = [(0, 0), (1, 0), (1, 1), (0, 1)]
    xs, ys = np.array([0.5, 1.5, 0.0]), np.array([0.5, 0.5, 0.5])
    assert points_in_convex(sq, xs, ys).tolist() == [True, False, False]
    assert points_in_convex(sq[::-1], xs, ys).tolist() == [True, False, False]
