import math

import numpy as np
import pytest

from pidregion import GammaRegion, PlantModel, QuasiPlant, verify_point
from pidregion.delay import (CUTOFF_CAP, _same_polygons, amp_phase, compute_delay_slice,
                             delay_admissible_intervals, delay_boundary_line,
                             delay_required_Z, delay_singular_frequencies,
                             infinity_root_boundaries, quasi_stability_check,
                             relevant_frequency_range, resolve_delta, z_cutoff)
from pidregion.errors import DegreeError, DeltaInvalid
from pidregion.kp_analysis import merge_intervals

H = GammaRegion.hurwitz()
FIRST_ORDER = QuasiPlant([1], [0, 1, 1], 1.0)


def test_amp_phase_trivial():
    p = QuasiPlant([1], [0, 0, 2], 0.1)  # B/A = 2 s^2
    amp, ph = amp_phase(p, np.array([0.5, 1.0, 2.0]))
    assert amp == pytest.approx([0.5, 2.0, 8.0])
    assert np.allclose(np.cos(ph), -1.0)
    a1, p1 = amp_phase(p, 1.0)
    assert (a1, math.cos(p1)) == pytest.approx((2.0, -1.0))


def test_amp_phase_is_continuous():
    p = QuasiPlant([1, 1], [1, 2, 3, 1], 0.2)
    _, ph = amp_phase(p, np.linspace(0.01, 50, 4000))
    assert np.max(np.abs(np.diff(ph))) < 0.1


def test_principal_term_required():
    with pytest.raises(DegreeError, match="principal term"):
        QuasiPlant([1, 1, 1], [0, 1, 1], 0.1)


def test_example7_frequencies_tend_to_asymptote(plants):
    p = plants[7]
    fc = delay_singular_frequencies(p, 0.0, 40 * math.pi / p.delay)
    ws = np.array(fc.all)
    assert ws[0] == 0.0 and len(ws) > 30
    k = np.round(ws[-5:] * p.delay / math.pi - 0.5)
    assert ws[-5:] == pytest.approx((k + 0.5) * math.pi / p.delay, rel=1e-2)
    assert fc.even_set[0] == 0.0 and set(fc.odd_set).isdisjoint(fc.even_set)


def test_example7_lines_alternate_and_diverge(plants):
    p = plants[7]
    ws = delay_singular_frequencies(p, 0.0, 40 * math.pi / p.delay).all
    lines = [delay_boundary_line(p, w, 0.0) for w in ws]
    e = [ln.e1 for ln in lines[1:]]
    assert all(a == -b for a, b in zip(e[:-1], e[1:]))
    intercepts = [-ln.h0 / ln.h2 for ln in lines[1:]]
    tail = intercepts[-8:]
    assert all(a * b < 0 for a, b in zip(tail[:-1], tail[1:]))
    assert abs(tail[-1]) > abs(tail[-3]) > abs(tail[-5])


def test_infinity_root_boundaries():
    assert infinity_root_boundaries(QuasiPlant([1], [0, 0, 1], 0.3)) == (-1.0, 1.0)
    assert infinity_root_boundaries(QuasiPlant([2], [0, 1, 0, 3], 0.3)) is None


def test_thresholds(plants):
    p = plants[7]
    assert delay_required_Z(p) == 5
    for q in (p, FIRST_ORDER, QuasiPlant([1, 2], [1, 0, 1, 1], 0.4)):
        assert delay_required_Z(q, 2) - delay_required_Z(q, 1) == 2
    assert z_cutoff(p) == pytest.approx(3 * math.pi / p.delay)


def test_delta_validation():
    p = QuasiPlant([1], [0, 0, 1], 0.5)  # principal phase pi at infinity
    with pytest.raises(DeltaInvalid):
        resolve_delta(p, 0.0)
    assert resolve_delta(p, 1.0) == 1.0
    assert math.sin(resolve_delta(p) + math.pi) != 0


def test_example7_union(plants):
    union = merge_intervals(delay_admissible_intervals(plants[7]))
    assert len(union) == 1
    assert union[0] == pytest.approx((-24.0, 6.0693), rel=5e-3)


def test_first_order_relevant_range():
    adm = delay_admissible_intervals(FIRST_ORDER)
    assert len(adm) == 1 and adm[0].Z == adm[0].required_Z == 3
    cut = relevant_frequency_range(FIRST_ORDER, adm[0].mid)
    sl = compute_delay_slice(FIRST_ORDER, adm[0].mid, omega_max=cut)
    assert len([f for f in sl.frequencies if np.isfinite(f.param)]) == 2
    assert len(sl.stable_polygons) == 1


def test_relevant_range_is_capped(plants):
    p = plants[7]
    assert relevant_frequency_range(p, 0.0, tighten=False) <= CUTOFF_CAP / p.delay
    assert relevant_frequency_range(p, 0.0) <= relevant_frequency_range(p, 0.0, tighten=False)


def test_zero_delay_check_matches_roots():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.uniform(-3, 3, 3)
        b = rng.uniform(-3, 3, 5)
        ki, kp, kd = rng.uniform(-3, 3, 3)
        q = QuasiPlant(a, b, 0.0)
        c = verify_point(PlantModel(a, b), H, ki, kd, kp)
        assert quasi_stability_check(q, ki, kp, kd).unstable_roots == c.outside + c.on_boundary


def test_example7_points(plants):
    p = plants[7]
    sl = compute_delay_slice(p, 0.0)
    assert len(sl.stable_polygons) >= 1
    x, y = sl.stable_polygons[0].point
    assert quasi_stability_check(p, x, 0.0, y).stable
    assert not quasi_stability_check(p, 100.0, 0.0, 0.1).stable


@pytest.mark.parametrize("kp", [-20.0, -10.0, -2.0, 4.0, 6.0])
def test_cutoff_doubling_keeps_vertices(plants, kp):
    p = plants[7]
    cut = relevant_frequency_range(p, kp)
    base = compute_delay_slice(p, kp, omega_max=cut)
    wide = compute_delay_slice(p, kp, omega_max=2 * cut, box=base.box)
    assert len(base.stable_polygons) >= 1
    assert _same_polygons(base, wide, tol=1e-6)
