"""One controller for several plants: intersect intervals, then polygons."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

from . import geometry
from .errors import ConsistencyError, DomainError
from .gamma import GammaRegion
from .kp_analysis import KpInterval, admissible_intervals
from .plant import PlantModel
from .slicing import Slice, SliceFace, compute_slice, verify_point


@dataclass(frozen=True)
class PlantFamily:
    members: tuple[PlantModel, ...]
    region: GammaRegion

    def __init__(self, members: Sequence[PlantModel], region: GammaRegion | None = None):
        members = tuple(members)
        if not members:
            raise DomainError("a plant family needs at least one member")
        region = region or members[0].default_region()
        discrete = {m.domain == "discrete" for m in members}
        if len(discrete) > 1:
            raise DomainError("members mix discrete and continuous loops")
        if region.is_circle and any(m.is_delay for m in members):
            raise DomainError("delay members need a half-plane region")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "region", region)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def order(self) -> int:
        return max(m.order for m in self.members)

    def to_dict(self) -> dict:
        return {"plants": [m.to_dict() for m in self.members], "region": self.region.to_dict()}


def _as_family(x, region=None) -> PlantFamily:
    if isinstance(x, PlantFamily):
        return x
    return PlantFamily([x], region)


def robust_intervals(family: PlantFamily, search_range=None) -> list[KpInterval]:
    """Cells where every member's Z reaches its threshold.

    Each piece reports the member with the smallest slack Z - required_Z.
    """
    family = _as_family(family)
    per = [admissible_intervals(m, family.region, search_range) for m in family.members]
    pieces = [(c.lo, c.hi, [c]) for c in per[0]]
    for cells in per[1:]:
        nxt = []
        for lo, hi, src in pieces:
            for c in cells:
                a, b = max(lo, c.lo), min(hi, c.hi)
                if b - a > 1e-12 * max(1.0, abs(a), abs(b)):
                    nxt.append((a, b, src + [c]))
        pieces = nxt
    downgrade = any(m.order > 6 or m.is_delay for m in family.members)
    out = []
    for lo, hi, src in sorted(pieces, key=lambda p: p[0]):
        tight = min(src, key=lambda c: c.Z - c.required_Z)
        suff = "necessary_only" if downgrade else tight.sufficiency
        out.append(KpInterval(float(lo), float(hi), tight.Z, tight.required_Z, True, suff))
    return out


@dataclass(frozen=True)
class RobustPolygon:
    vertices: tuple[tuple[float, float], ...]
    point: tuple[float, float]

    @property
    def area(self) -> float:
        return abs(geometry.polygon_area(list(self.vertices)))

    def to_dict(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices], "point": list(self.point)}


def _canonical(vs, tol: float = 1e-12) -> tuple[tuple[float, float], ...]:
    """Counter-clockwise without repeated or collinear vertices, starting at the smallest one."""
    vs = [(float(x), float(y)) for x, y in vs]
    if geometry.polygon_area(vs) < 0:
        vs = vs[::-1]
    scale = max(1.0, max(abs(c) for v in vs for c in v))
    changed = True
    while changed and len(vs) > 3:
        changed = False
        for i in range(len(vs)):
            a, b, c = vs[i - 1], vs[i], vs[(i + 1) % len(vs)]
            cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
            if abs(cr) <= tol * scale * scale:
                del vs[i]
                changed = True
                break
    k = min(range(len(vs)), key=lambda i: vs[i])
    return tuple(vs[k:] + vs[:k])


def member_stable(plant: PlantModel, region: GammaRegion, r1: float, r2: float, r3: float) -> bool:
    if plant.is_delay and plant.delay > 0:
        from .delay import infinity_root_boundaries, quasi_stability_check
        band = infinity_root_boundaries(plant)
        if band is not None and not band[0] < r2 < band[1]:
            return False
        return quasi_stability_check(plant, r1, r3, r2).stable
    c = verify_point(plant, region, r1, r2, r3)
    return c.inside == plant.order


def robust_slice(family: PlantFamily, r3: float, slices: Sequence[Slice] | None = None,
                 area_tol: float = 1e-12) -> list[RobustPolygon]:
    """Convex pieces where every member is stable at this r3."""
    family = _as_family(family)
    if not any(c.lo < r3 < c.hi for c in robust_intervals(family)):
        warnings.warn(f"r3={r3} lies outside every robust interval", stacklevel=2)
    if slices is None:
        slices = [compute_slice(m, family.region, r3) for m in family.members]
    current = [list(f.vertices) for f in slices[0].stable_polygons]
    for sl in slices[1:]:
        scale = max([1.0] + [abs(c) for f in sl.stable_polygons for v in f.vertices for c in v])
        nxt = []
        for a in current:
            for f in sl.stable_polygons:
                clip = geometry.clip_convex(a, list(f.vertices))
                if len(clip) >= 3 and abs(geometry.polygon_area(clip)) > area_tol * scale * scale:
                    nxt.append(clip)
        current = nxt
    out = []
    for vs in current:
        vs = _canonical(vs)
        pt = geometry.representative_point(list(vs))
        for m in family.members:
            if not member_stable(m, family.region, pt[0], pt[1], r3):
                raise ConsistencyError(f"robust piece at {pt} is not stable for member {m.name or m}",
                                       propagated=True, verified=False)
        out.append(RobustPolygon(vs, pt))
    out.sort(key=lambda p: (round(p.point[0], 9), round(p.point[1], 9)))
    return out


def robust_slice_record(family: PlantFamily, r3: float) -> Slice:
    """The robust pieces packed as a :class:`Slice` (lines of all members kept)."""
    family = _as_family(family)
    slices = [compute_slice(m, family.region, r3) for m in family.members]
    if len(slices) == 1:
        return slices[0]
    polys = robust_slice(family, r3, slices)
    lines = [ln for s in slices for ln in s.lines]
    freqs = sorted({f for s in slices for f in s.frequencies}, key=lambda f: f.param)
    faces = [SliceFace(list(p.vertices), p.point, None, None, True, False) for p in polys]
    box = (min(s.box[0] for s in slices), max(s.box[1] for s in slices),
           min(s.box[2] for s in slices), max(s.box[3] for s in slices))
    return Slice(float(r3), freqs, lines, faces, box, family.order)
