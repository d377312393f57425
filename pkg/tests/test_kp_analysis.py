import numpy as np
import pytest

from pidregion import GammaRegion, PlantModel, compute_slice
from pidregion.errors import DomainError, NotApplicable
from pidregion.kp_analysis import (admissible_intervals, count_singular_frequencies,
                                   default_search_range, even_floor, interval_cells, kp_plot,
                                   merge_intervals, required_Z, stability_peaks)

H, S = GammaRegion.hurwitz(), GammaRegion.schur()


def cells(p, region):
    return interval_cells(p, region, default_search_range(p, region))


def test_even_floor():
    assert [even_floor(n) for n in (0, 1, 4, 7, 10)] == [0, 0, 4, 6, 10]
    with pytest.raises(DomainError):
        even_floor(-1)


def test_constant_plot_for_linear_plant():
    plot = kp_plot(PlantModel([1], [0, 1]), samples=50)
    ys = np.array([y for _, y in plot.samples])
    assert np.allclose(ys, -1.0)


def test_counts_example2(plants):
    assert count_singular_frequencies(plants[2], H, -2.0) == 4
    assert count_singular_frequencies(plants[2], H, 5.0) == 2


def test_count_example4(plants):
    assert count_singular_frequencies(plants[4], H, 0.0) == 0


def test_required_z_examples(plants):
    assert required_Z(plants[2], H)[0] == 2
    z, census = required_Z(plants[1], S)
    assert z == 3 and (census["N"], census["R"], census["J"], census["J-"]) == (8, 4, 1, 1)
    assert required_Z(plants[1], S, decoupling="quadratic")[0] == 3
    assert required_Z(plants[5], S)[0] == 3


def test_intervals_example2(plants):
    adm = admissible_intervals(plants[2], H)
    assert [c.Z for c in adm] == [2, 4, 2]
    edges = [adm[0].lo] + [c.hi for c in adm]
    assert edges == pytest.approx([-24.0, -2.7614, 3.7664, 6.1565], abs=2e-3)
    assert merge_intervals(adm) == [pytest.approx((-24.0, 6.1565), abs=2e-3)]
    assert all(c.sufficiency == "necessary_only" for c in adm)  # N = 7


def test_intervals_example3(plants):
    adm = admissible_intervals(plants[3], H)
    assert [(c.Z, c.sufficiency) for c in adm] == [(3, "necessary_and_sufficient"),
                                                   (4, "necessary_and_sufficient")]
    got = [(c.lo, c.hi) for c in adm]
    assert got[0] == pytest.approx((-1.8708, -1.5556), abs=2e-3)
    assert got[1] == pytest.approx((0.3157, 0.5333), abs=2e-3)


def test_example4_empty(plants):
    assert admissible_intervals(plants[4], H) == []


def test_example5_empty(plants):
    assert admissible_intervals(plants[5], S) == []
    assert max(c.Z for c in cells(plants[5], S)) == 2


def test_example1_strip(plants):
    union = merge_intervals(admissible_intervals(plants[1], S))
    assert union == [pytest.approx((-0.52236, 0.00290), abs=2e-3)]


@pytest.mark.parametrize("k", [2, 3, 6])
def test_z_constant_inside_cells(plants, k):
    rng = np.random.default_rng(k)
    for c in cells(plants[k], H):
        width = c.hi - c.lo
        for r3 in c.lo + width * rng.uniform(0.01, 0.99, 20):
            assert count_singular_frequencies(plants[k], H, float(r3)) == c.Z


@pytest.mark.parametrize("k", [2, 3])
def test_midpoint_necessity(plants, k):
    for c in cells(plants[k], H):
        n = len(compute_slice(plants[k], H, c.mid).stable_polygons)
        if c.admissible:
            assert n >= 1
        else:
            assert n == 0


def test_example6_slices_around_peak(plants):
    assert len(compute_slice(plants[6], H, -9.0).stable_polygons) >= 1
    assert compute_slice(plants[6], H, -10.0).stable_polygons == []


def test_example6_peak(plants):
    peaks = stability_peaks(plants[6], (-11.5726, 0.0))
    real = [p for p in peaks if p.is_peak]
    assert len(real) == 1
    p = real[0]
    assert p.kP == pytest.approx(-9.0023, abs=1e-2)
    assert (p.kI, p.kD) == pytest.approx((3.0195, 21.4958), rel=1e-2)
    assert p.omegas == pytest.approx((0.2581, 0.44261, 9.7621), rel=1e-2)


def test_example2_has_no_closing_peak(plants):
    for c in admissible_intervals(plants[2], H):
        assert not any(p.is_peak for p in stability_peaks(plants[2], c))


def test_peaks_not_needed_for_low_order(plants):
    with pytest.raises(NotApplicable):
        stability_peaks(plants[3], (0.3157, 0.5333))
