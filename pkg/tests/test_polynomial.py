import numpy as np
import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from pidregion import GammaRegion, RealPoly, root_census, roots
from pidregion.errors import DegreeError
from pidregion.polynomial import cluster_roots, eval_complex

coef = st.floats(-10, 10, allow_nan=False)


def test_eval_complex_basics():
    assert abs(eval_complex(RealPoly([1, 0, 1]), 1j)) < 1e-15
    assert eval_complex(RealPoly([1]), 3 + 4j) == 1


def test_trailing_noise_is_trimmed():
    p = RealPoly([1.0, 2.0, 1e-15])
    assert p.degree == 1


def test_roots_of_simple_quadratic():
    rs = sorted(r.real for r in roots(RealPoly([-1, 0, 1])))
    assert rs == pytest.approx([-1, 1], abs=1e-12)


def test_rhp_counts(plants):
    ex3, ex2 = plants[3], plants[2]
    assert sum(r.real > 0 for r in roots(ex3.a)) == 2
    assert sum(r.real > 0 for r in roots(ex2.a)) == 1


def test_census_schur_examples(plants):
    S = GammaRegion.schur()
    c = root_census(RealPoly.from_roots([0.5, -2]), S)
    assert (c.inside, c.on_boundary, c.outside) == (1, 0, 1)
    c = root_census(plants[1].a, S)
    assert (c.inside, c.on_boundary, c.outside) == (3, 1, 1)
    c = root_census(plants[5].a * RealPoly([0, 1]), S)
    assert (c.inside, c.on_boundary) == (2, 1)


def test_census_of_zero_polynomial_raises():
    with pytest.raises(DegreeError):
        root_census(RealPoly([0.0]), GammaRegion.schur())


def test_clusters_merge_double_root():
    cl = cluster_roots(roots(RealPoly.from_roots([0.3, 0.3, -1])))
    assert sorted(m for _, m in cl) == [1, 2]


@settings(max_examples=60, deadline=None)
@given(st.lists(coef, min_size=2, max_size=8))
@example(cs=[4.219628760160847e-157, 2.225073858507203e-309, 0.0, 0.0, 1.0, 1.0])
def test_roots_are_conjugate_closed(cs):
    p = RealPoly(cs)
    if p.degree < 1:
        return
    rs = roots(p)
    assert len(rs) == p.degree
    for r in rs:
        tol = 1e-8 * max(1.0, abs(r))
        assert min(abs(np.conj(r) - s) for s in rs) <= tol


@settings(max_examples=60, deadline=None)
@given(st.lists(coef, min_size=1, max_size=8),
       st.sampled_from([GammaRegion.hurwitz(), GammaRegion.schur(), GammaRegion.circle(0.3, 0.5)]))
def test_census_sums_to_degree(cs, region):
    p = RealPoly(cs)
    if p.is_zero:
        return
    c = root_census(p, region)
    assert c.inside + c.on_boundary + c.outside == p.degree


def test_roots_of_product_are_union():
    from scipy.optimize import linear_sum_assignment
    rng = np.random.default_rng(3)
    for _ in range(100):
        p = RealPoly(rng.uniform(-10, 10, int(rng.integers(2, 8))))
        q = RealPoly(rng.uniform(-10, 10, int(rng.integers(2, 8))))
        got = np.array(roots(p * q))
        want = np.array(roots(p) + roots(q))
        cost = np.abs(got[:, None] - want[None, :])
        i, j = linear_sum_assignment(cost)
        assert np.all(cost[i, j] <= 1e-6 * np.maximum(1.0, np.abs(want[j])))
