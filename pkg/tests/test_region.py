import json

import numpy as np
import pytest

import pidregion.region as region_mod
from pidregion import GammaRegion, compute_slice
from pidregion.errors import DegenerateSlice, PidRegionError
from pidregion.geometry import polygon_area
from pidregion.io import export_region
from pidregion.kp_analysis import admissible_intervals
from pidregion.region import SCHEMA, Region3D, build_region
from pidregion.svg import slice_svg

H, S = GammaRegion.hurwitz(), GammaRegion.schur()


@pytest.fixture(scope="module")
def ex2_region(plants):
    return build_region(plants[2], per_interval_count=6, refine_depth=1, peaks=False)


def area(sl):
    return sum(abs(polygon_area(f.vertices)) for f in sl.stable_polygons)


@pytest.mark.parametrize("kp", [-20.0, -2.0, 5.0])
def test_example2_nonempty_probes(plants, kp):
    assert compute_slice(plants[2], H, kp).stable_polygons


def test_region_slices_sit_in_intervals(ex2_region):
    cells = ex2_region.intervals
    assert ex2_region.slices and not ex2_region.failures
    for s in ex2_region.slices:
        assert any(c.lo < s.r3 < c.hi for c in cells)
        assert s.stable_polygons


def test_json_round_trip_is_exact(ex2_region):
    text = ex2_region.to_json()
    again = Region3D.from_json(text)
    assert again.to_json() == text
    d = json.loads(text)
    assert d["version"] == SCHEMA
    assert [s["r3"] for s in d["slices"]] == sorted(s["r3"] for s in d["slices"])
    line = d["slices"][0]["lines"][0]
    assert {"h1", "h2", "h0", "e1", "e2", "omega"} <= set(line)
    poly = d["slices"][0]["polygons"][0]
    assert poly["verified"] is True and poly["census"]["inside"] == 7


def test_workers_do_not_change_output(plants, ex2_region):
    par = build_region(plants[2], per_interval_count=6, refine_depth=1, peaks=False, workers=2)
    assert par.to_json() == ex2_region.to_json()


def test_rejects_unknown_version(ex2_region):
    d = ex2_region.to_dict()
    d["version"] = "pidregion/0"
    with pytest.raises(PidRegionError):
        Region3D.from_dict(d)


def test_empty_region_is_valid_json(plants):
    reg = build_region(plants[4], per_interval_count=5, refine_depth=1)
    d = json.loads(reg.to_json())
    assert d["intervals"] == [] and d["slices"] == []


def test_example6_area_vanishes_at_peak(plants):
    peak = -9.002376
    areas = [area(compute_slice(plants[6], H, peak + d)) for d in (0.5, 0.1, 0.01, 0.001)]
    assert all(a > b for a, b in zip(areas[:-1], areas[1:]))
    assert areas[-1] < 1e-5 * areas[0]


def test_example6_refinement_reaches_peak(plants):
    reg = build_region(plants[6], per_interval_count=4, refine_depth=2)
    assert any(p.is_peak for p in reg.peaks)
    kp = next(p.kP for p in reg.peaks if p.is_peak)
    assert min(abs(s.r3 - kp) for s in reg.slices) < 1.0


def test_slices_vary_continuously(plants):
    base = compute_slice(plants[3], H, 0.4)
    near = compute_slice(plants[3], H, 0.4 + 1e-6)
    assert len(base.stable_polygons) == len(near.stable_polygons) == 1
    a, b = np.array(base.stable_polygons[0].vertices), np.array(near.stable_polygons[0].vertices)
    assert a.shape == b.shape
    assert min(np.max(np.abs(np.roll(a, k, axis=0) - b)) for k in range(len(a))) < 1e-4


def test_failed_slice_is_isolated(plants, monkeypatch):
    real = region_mod.compute_slice
    calls = []

    def flaky(p, region, r3):
        calls.append(r3)
        if len(calls) == 2:
            raise DegenerateSlice("injected")
        return real(p, region, r3)

    monkeypatch.setattr(region_mod, "compute_slice", flaky)
    reg = build_region(plants[3], per_interval_count=4, refine_depth=0)
    assert len(reg.failures) == 1 and "injected" in reg.failures[0].error
    assert len(reg.slices) == len(calls) - 1
    d = json.loads(reg.to_json())
    assert sum(1 for s in d["slices"] if s.get("failed")) == 1
    assert d["meta"]["failed_count"] == 1


def test_example1_svg(plants, tmp_path):
    sl = compute_slice(plants[1], S, -0.26118)
    svg = slice_svg(sl, S)
    assert svg.count('class="stable"') == 1
    assert svg.count('class="boundary"') >= 3
    assert "r1" in svg and "c = T r" in svg


def test_export_formats(ex2_region, tmp_path):
    js = export_region(ex2_region, tmp_path, "json")
    svgs = export_region(ex2_region, tmp_path, "svg-slices")
    assert js[0].read_text() == ex2_region.to_json()
    assert len(svgs) == len(ex2_region.slices)
    assert all(p.read_text().startswith("<svg") for p in svgs)
    with pytest.raises(ValueError):
        export_region(ex2_region, tmp_path, "png")


def test_grid_slices_move_by_order_of_step(ex2_region):
    cells = ex2_region.intervals
    for c in cells:
        run = [s for s in ex2_region.slices if c.lo < s.r3 < c.hi]
        for s, t in zip(run[:-1], run[1:]):
            if len(s.stable_polygons) != len(t.stable_polygons):
                continue
            dr = t.r3 - s.r3
            for f in s.stable_polygons:
                g = min(t.stable_polygons, key=lambda g: np.hypot(g.point[0] - f.point[0],
                                                                   g.point[1] - f.point[1]))
                va, vb = np.array(f.vertices), np.array(g.vertices)
                scale = max(1.0, np.abs(va).max(), np.abs(vb).max())
                d = np.hypot(va[:, None, 0] - vb[None, :, 0], va[:, None, 1] - vb[None, :, 1])
                hausdorff = max(d.min(axis=1).max(), d.min(axis=0).max())
                assert hausdorff <= 50 * dr * scale


@pytest.mark.parametrize("k,end,side", [(3, -1.8708, 1), (3, 0.3157, 1), (3, 0.5333, -1),
                                        (2, 6.1565, -1)])
def test_area_closes_at_extremum_endpoints(plants, k, end, side):
    ends = [x for c in admissible_intervals(plants[k], H) for x in (c.lo, c.hi)]
    end = min(ends, key=lambda x: abs(x - end))
    areas = [area(compute_slice(plants[k], H, end + side * d)) for d in (1e-2, 1e-3, 1e-4)]
    assert areas[0] > areas[1] > areas[2] > 0
