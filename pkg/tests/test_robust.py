import warnings

import numpy as np
import pytest

from pidregion import GammaRegion, PlantModel, QuasiPlant, compute_slice
from pidregion.errors import ConsistencyError, DomainError
from pidregion.geometry import polygon_area
from pidregion.kp_analysis import admissible_intervals
from pidregion.robust import PlantFamily, robust_intervals, robust_slice, robust_slice_record

from conftest import random_corpus
from oracles import line_distance, routh_stable

H = GammaRegion.hurwitz()


def scaled(p, k):
    return PlantModel(p.a, p.b * k)


def member_area(p, r3):
    return sum(abs(polygon_area(f.vertices)) for f in compute_slice(p, H, r3).stable_polygons)


def test_family_validation(plants):
    with pytest.raises(DomainError):
        PlantFamily([])
    with pytest.raises(DomainError):
        PlantFamily([plants[1], plants[2]])
    with pytest.raises(DomainError):
        PlantFamily([plants[7]], GammaRegion.circle(0.0, 0.5))
    fam = PlantFamily([plants[2], plants[3]])
    assert len(fam) == 2 and fam.order == 7 and list(fam) == [plants[2], plants[3]]


def test_robust_intervals_are_intersections(plants):
    got = robust_intervals(PlantFamily([plants[2], plants[3]]))
    want = admissible_intervals(plants[3], H)
    assert [(c.lo, c.hi) for c in got] == pytest.approx([(c.lo, c.hi) for c in want], abs=1e-9)
    assert robust_intervals(PlantFamily([plants[2], plants[4]])) == []


def test_robust_slice_is_order_invariant(plants):
    a = list(plants[2].a.coeffs)
    a[-1] = -0.55
    other = PlantModel(a, plants[2].b)
    a = robust_slice(PlantFamily([plants[2], other]), -2.0)
    b = robust_slice(PlantFamily([other, plants[2]]), -2.0)
    assert a
    assert len(a) == len(b)
    for pa, pb in zip(a, b):
        assert np.allclose(pa.vertices, pb.vertices, atol=1e-9)


def test_robust_area_not_larger_than_members(plants):
    other = scaled(plants[2], 1.05)
    pieces = robust_slice(PlantFamily([plants[2], other]), -2.0)
    area = sum(p.area for p in pieces)
    assert 0 < area <= min(member_area(plants[2], -2.0), member_area(other, -2.0)) + 1e-9


def test_random_families_shrink():
    corpus = random_corpus(10, seed=77, feasible_only=True)
    checked = 0
    for p in corpus:
        fam = PlantFamily([p, scaled(p, 1.1)])
        cells = robust_intervals(fam)
        if not cells:
            continue
        r3 = cells[0].mid
        pieces = robust_slice(fam, r3)
        area = sum(x.area for x in pieces)
        assert area <= min(member_area(m, r3) for m in fam) * (1 + 1e-9) + 1e-12
        for piece in pieces:
            for m in fam:
                assert routh_stable(m.char_poly(H, *piece.point, r3).coeffs)
        checked += 1
    assert checked >= 5


def test_vertices_lie_on_member_lines(plants):
    fam = PlantFamily([plants[2], scaled(plants[2], 1.05)])
    rec = robust_slice_record(fam, -2.0)
    for face in rec.stable_polygons:
        for v in face.vertices:
            d = min(abs(line_distance(ln.coeffs, *v)) for ln in rec.lines)
            assert d < 1e-6 * max(1.0, abs(v[0]), abs(v[1]))


def test_single_member_record_is_member_slice(plants):
    rec = robust_slice_record(PlantFamily([plants[3]]), 0.4)
    assert len(rec.stable_polygons) == len(compute_slice(plants[3], H, 0.4).stable_polygons)


def test_warning_outside_robust_intervals(plants):
    with pytest.warns(UserWarning):
        assert robust_slice(PlantFamily([plants[2]]), 50.0) == []


def test_inconsistent_slices_raise(plants):
    wrong = [compute_slice(plants[2], H, -2.0)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(ConsistencyError):
            robust_slice(PlantFamily([plants[4]]), -2.0, slices=wrong)


def test_delay_member_makes_intervals_necessary_only(plants):
    fam = PlantFamily([plants[7], QuasiPlant(plants[7].a, plants[7].b, 0.04)])
    cells = robust_intervals(fam)
    assert cells and all(c.sufficiency == "necessary_only" for c in cells)
