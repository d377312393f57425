"""Assemble the 3-D stabilizing set from slices and serialize it as JSON."""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import NotApplicable, PidRegionError
from .gamma import GammaRegion
from .kp_analysis import KpInterval, StabilityPeak, stability_peaks
from .plant import PlantModel
from .polynomial import RootCensus
from .robust import PlantFamily, _as_family, robust_intervals, robust_slice_record
from .slicing import BoundaryLine, Slice, SingularFrequency, SliceFace, compute_slice

SCHEMA = "pidregion/1"


@dataclass
class SliceFailure:
    r3: float
    error: str


@dataclass
class Region3D:
    slices: list[Slice]
    intervals: list[KpInterval]
    peaks: list[StabilityPeak]
    meta: dict
    family: PlantFamily | None = None
    failures: list[SliceFailure] = field(default_factory=list)

    @property
    def truncated(self) -> bool:
        return any(s.truncated for s in self.slices)

    def to_dict(self) -> dict:
        fam = self.family
        entries = [(s.r3, _slice_dict(s)) for s in self.slices]
        entries += [(f.r3, {"r3": f.r3, "failed": True, "error": f.error}) for f in self.failures]
        entries.sort(key=lambda e: e[0])
        return {
            "version": SCHEMA,
            "plants": [m.to_dict() for m in fam.members] if fam else [],
            "region": fam.region.to_dict() if fam else None,
            "intervals": [c.to_dict() for c in self.intervals],
            "peaks": [p.to_dict() for p in self.peaks],
            "slices": [e[1] for e in entries],
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Region3D":
        if d.get("version") != SCHEMA:
            raise PidRegionError(f"unsupported region file version {d.get('version')!r}")
        region = GammaRegion.from_dict(d["region"]) if d.get("region") else None
        fam = PlantFamily([PlantModel.from_dict(p) for p in d["plants"]], region) if d.get("plants") else None
        slices, failures = [], []
        for s in d["slices"]:
            if s.get("failed"):
                failures.append(SliceFailure(s["r3"], s["error"]))
            else:
                slices.append(_slice_from_dict(s, fam))
        return cls(slices=slices,
                   intervals=[KpInterval(**c) for c in d["intervals"]],
                   peaks=[StabilityPeak(p["kP"], p["kI"], p["kD"], tuple(p["omegas"]),
                                        p["remainder_stable"], p["collapsing"]) for p in d["peaks"]],
                   meta=d.get("meta", {}), family=fam, failures=failures)

    @classmethod
    def from_json(cls, text: str) -> "Region3D":
        return cls.from_dict(json.loads(text))


def _num(x: float):
    return float(x) if np.isfinite(x) else ("inf" if x > 0 else "-inf")


def _unnum(x) -> float:
    return float(x)  # also parses "inf" / "-inf"


def _slice_dict(s: Slice) -> dict:
    polys = []
    for f in s.stable_polygons:
        if f.census is not None:
            census = f.census.to_dict()
        else:
            census = {"inside": f.inside}
        polys.append({"vertices": [[float(x), float(y)] for x, y in f.vertices],
                      "point": [float(f.point[0]), float(f.point[1])],
                      "verified": True, "truncated": bool(f.truncated), "census": census})
    return {
        "r3": float(s.r3),
        "order": s.order,
        "box": [float(v) for v in s.box],
        "frequencies": [_num(f.param) for f in s.frequencies],
        "lines": [{"h1": float(ln.h1), "h2": float(ln.h2), "h0": float(ln.h0),
                   "e1": ln.e1, "e2": ln.e2, "omega": _num(ln.source.param),
                   "crossing_size": ln.crossing_size, "gain": ln.gain} for ln in s.lines],
        "polygons": polys,
    }


def _freq(param: float, region: GammaRegion | None) -> SingularFrequency:
    if not np.isfinite(param):
        return SingularFrequency(param, complex(np.inf), True, at_infinity=True)
    region = region or GammaRegion.hurwitz()
    return SingularFrequency(param, region.boundary_point(param), param in region.real_axis_params())


def _slice_from_dict(s: dict, fam: PlantFamily | None) -> Slice:
    region = fam.region if fam else None
    freqs = [_freq(_unnum(p), region) for p in s["frequencies"]]
    lines = [BoundaryLine(ln["h1"], ln["h2"], ln["h0"], _freq(_unnum(ln["omega"]), region),
                          ln["e1"], ln["e2"], ln["crossing_size"], ln["gain"]) for ln in s["lines"]]
    faces = []
    for p in s["polygons"]:
        c = p["census"]
        census = RootCensus(c["inside"], c["on_boundary"], c["outside"]) if "outside" in c else None
        faces.append(SliceFace([tuple(v) for v in p["vertices"]], tuple(p["point"]), c["inside"],
                               census, True, p["truncated"]))
    return Slice(s["r3"], freqs, lines, faces, tuple(s["box"]), s["order"])


# --- building ----------------------------------------------------------------------

def _slice_job(args):
    family, r3 = args
    try:
        if len(family) == 1:
            return compute_slice(family.members[0], family.region, r3)
        return robust_slice_record(family, r3)
    except (PidRegionError, ArithmeticError, ValueError) as exc:
        return SliceFailure(float(r3), f"{type(exc).__name__}: {exc}")


def _signature(s) -> tuple:
    if isinstance(s, SliceFailure):
        return ("failed",)
    return (len(s.stable_polygons), tuple(sorted(len(f.vertices) for f in s.stable_polygons)))


def _fingerprint(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def build_region(target, region: GammaRegion | None = None, per_interval_count: int = 30,
                 refine_depth: int = 2, search_range=None, workers: int | None = None,
                 peaks: bool = True) -> Region3D:
    """Slices over every admissible interval, refined where the polygon structure changes.

    Slices sit at ``lo + (hi - lo) * (i + 1) / (n + 1)``. Each refinement round
    halves the gap to both endpoints, the gaps around each peak, and every gap
    whose neighbors differ in polygon count or vertex counts. With ``workers``
    the slices are computed in a process pool; the output does not depend on it.
    """
    if per_interval_count < 3:
        raise ValueError("per_interval_count must be at least 3")
    family = _as_family(target, region)
    cells = robust_intervals(family, search_range)
    peak_list: list[StabilityPeak] = []
    single = family.members[0] if len(family) == 1 else None
    if peaks and single is not None and not single.is_delay and not family.region.is_circle:
        for c in cells:
            try:
                peak_list += stability_peaks(single, c, family.region)
            except NotApplicable:
                break
    results: dict[float, object] = {}

    def run(r3s):
        todo = sorted({float(r) for r in r3s} - set(results))
        jobs = [(family, r) for r in todo]
        if workers and workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                out = list(pool.map(_slice_job, jobs))
        else:
            out = [_slice_job(j) for j in jobs]
        results.update(zip(todo, out))

    n = per_interval_count
    run([c.lo + (c.hi - c.lo) * (i + 1) / (n + 1) for c in cells for i in range(n)])
    for _ in range(refine_depth):
        extra = []
        for c in cells:
            pts = sorted(r for r in results if c.lo < r < c.hi)
            if not pts:
                continue
            extra += [0.5 * (c.lo + pts[0]), 0.5 * (pts[-1] + c.hi)]
            for a, b in zip(pts[:-1], pts[1:]):
                if _signature(results[a]) != _signature(results[b]):
                    extra.append(0.5 * (a + b))
            for p in peak_list:
                if p.is_peak and c.lo < p.kP < c.hi:
                    left = [r for r in pts if r < p.kP]
                    right = [r for r in pts if r > p.kP]
                    if left:
                        extra.append(0.5 * (left[-1] + p.kP))
                    if right:
                        extra.append(0.5 * (p.kP + right[0]))
        run(extra)
    slices = [results[r] for r in sorted(results) if isinstance(results[r], Slice)]
    failures = [results[r] for r in sorted(results) if isinstance(results[r], SliceFailure)]
    config = {"per_interval_count": per_interval_count, "refine_depth": refine_depth,
              "search_range": list(search_range) if search_range else None}
    meta = dict(config, fingerprint=_fingerprint({"family": family.to_dict(), "config": config}),
                slice_count=len(slices), failed_count=len(failures),
                truncated=any(s.truncated for s in slices))
    return Region3D(slices, cells, peak_list, meta, family, failures)
