"""Fixed-r3 slices: singular frequencies, boundary lines and stable polygons.

For fixed r3 every boundary point where the imaginary part of F = p/(A E)
vanishes contributes a straight line in the (r1, r2) plane. The lines cut the
plane into convex faces on which the number of roots inside the region is
constant; the counts are propagated across lines from one direct root census
and confirmed by a second census on every candidate face.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import geometry
from ._curve import r3_curve
from .errors import (ConsistencyError, DegenerateEigenvalue, DegenerateSlice,
                     SingularCancellation)
from .gamma import GammaRegion, q_basis
from .plant import PlantModel
from .polynomial import RealPoly, RootCensus, eval_complex, root_census

MERGE_TOL = 1e-9


@dataclass(frozen=True)
class SingularFrequency:
    param: float
    location: complex
    is_real_axis: bool
    tangent: bool = False  # r3 sits exactly on an extremum of the r3-plot
    at_infinity: bool = False  # a root leaves through infinity (leading coefficient vanishes)

    @property
    def crossing_size(self) -> int:
        return 1 if self.is_real_axis else 2


@dataclass(frozen=True)
class BoundaryLine:
    h1: float
    h2: float
    h0: float
    source: SingularFrequency
    e1: int
    e2: int
    crossing_size: int
    gain: int | None  # change of the inside count when crossing to the side h > 0

    @property
    def coeffs(self) -> tuple[float, float, float]:
        return (self.h1, self.h2, self.h0)

    def value(self, r1: float, r2: float) -> float:
        return self.h1 * r1 + self.h2 * r2 + self.h0

    def to_dict(self) -> dict:
        return {"h1": self.h1, "h2": self.h2, "h0": self.h0, "param": _num(self.source.param),
                "e1": self.e1, "e2": self.e2, "crossing_size": self.crossing_size, "gain": self.gain}


def _num(x: float):
    return x if np.isfinite(x) else ("inf" if x > 0 else "-inf")


@dataclass
class SliceFace:
    vertices: list[tuple[float, float]]
    point: tuple[float, float]
    inside: int | None  # propagated count
    census: RootCensus | None  # direct census, when computed
    stable: bool
    truncated: bool
    edge_lines: list[int] = field(default_factory=list)

    @property
    def area(self) -> float:
        return abs(geometry.polygon_area(self.vertices))

    def to_dict(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices], "point": list(self.point),
                "inside": self.inside, "stable": self.stable, "truncated": self.truncated}


@dataclass
class Slice:
    r3: float
    frequencies: list[SingularFrequency]
    lines: list[BoundaryLine]
    faces: list[SliceFace]
    box: tuple[float, float, float, float]
    order: int

    @property
    def stable_polygons(self) -> list[SliceFace]:
        return [f for f in self.faces if f.stable]

    @property
    def truncated(self) -> bool:
        return any(f.truncated for f in self.stable_polygons)

    def to_dict(self) -> dict:
        return {
            "r3": self.r3,
            "frequencies": [_num(f.param) for f in self.frequencies],
            "lines": [ln.to_dict() for ln in self.lines],
            "stable_polygons": [f.to_dict() for f in self.stable_polygons],
            "box": list(self.box),
        }


# --- singular frequencies -----------------------------------------------------

def _region(plant: PlantModel, region: GammaRegion | None) -> GammaRegion:
    return plant.default_region() if region is None else region


def _fixed_boundary_roots(plant: PlantModel, region: GammaRegion):
    """Roots of A*E on the boundary; p keeps such a root for every gain if B vanishes too."""
    c = plant.a * RealPoly([-region.m, 1.0]) if region.is_circle else plant.a
    if c.degree < 1:
        return []
    from .polynomial import roots
    out = []
    for r in roots(c):
        if abs(region.signed_distance(r)) <= 1e-9 * max(1.0, abs(r)):
            out.append(r)
    return out


def _check_cancellation(plant: PlantModel, region: GammaRegion):
    bscale = plant.b.scale
    for r in _fixed_boundary_roots(plant, region):
        if abs(eval_complex(plant.b, r)) <= 1e-9 * bscale * max(1.0, abs(r)) ** plant.b.degree:
            raise SingularCancellation(
                f"A*E and B share the boundary root {r:.6g}; it is a closed-loop root for every gain")


def _has_infinity_boundary(plant: PlantModel, region: GammaRegion) -> bool:
    return (not region.is_circle) and plant.n <= plant.m + 2


def singular_frequencies(plant: PlantModel, region: GammaRegion | None, r3: float,
                         theta_max: float | None = None) -> list[SingularFrequency]:
    """Boundary points where Im F vanishes for this r3, conjugates stored once."""
    region = _region(plant, region)
    _check_cancellation(plant, region)
    if plant.is_delay and plant.delay > 0 and theta_max is None:
        from .delay import z_cutoff
        theta_max = z_cutoff(plant)
    curve = r3_curve(plant, region, theta_max)
    probe = np.linspace(0.1, 0.9, 7) * (np.pi if region.is_circle else curve._scale * 5)
    with np.errstate(all="ignore"):
        vals = curve.value(probe)
    if (not curve.critical and np.all(np.abs(vals - r3) <= 1e-10 * max(1.0, abs(r3)))
            and abs(curve.left_limit - r3) <= 1e-10 * max(1.0, abs(r3))):
        raise DegenerateSlice(f"imaginary part vanishes identically on the boundary at r3={r3}")
    out: list[SingularFrequency] = []
    for th in region.real_axis_params():
        z = region.boundary_point(th)
        if abs(eval_complex(curve.a, complex(curve._local(th)))) > 1e-12 * max(curve.a.scale, 1e-300):
            out.append(SingularFrequency(float(th), z, True))
    for th, tangent in curve.solve(r3):
        out.append(SingularFrequency(float(th), region.boundary_point(th), False, tangent=tangent))
    if _has_infinity_boundary(plant, region) and not plant.is_delay:
        out.append(SingularFrequency(float("inf"), complex(region.sigma0, np.inf), True, at_infinity=True))
    out.sort(key=lambda f: f.param)
    return out


# --- boundary lines ------------------------------------------------------------

def _line_coeffs(plant: PlantModel, region: GammaRegion, r3: float, f: SingularFrequency):
    if f.at_infinity:
        return 0.0, plant.a.lead, plant.b.coef(plant.m + 2)
    if region.is_circle:
        th = f.param
        w = f.location - region.m
        g = eval_complex(plant.b, f.location) / (eval_complex(plant.a, f.location) * w)
        return (2.0 * (region.m + region.rho * np.cos(th)), 1.0,
                r3 * np.cos(th) / region.rho + g.real)
    curve = r3_curve(plant, region, None) if not plant.is_delay else None
    u = 1j * f.param
    if curve is not None:
        g = complex(curve.G(u))
    else:
        from .delay import _shifted_g
        g = _shifted_g(plant, region, u)
    return 1.0, -f.param**2, g.real


def _point_on_line(h, k: int = 0):
    h1, h2, h0 = h
    n2 = h1 * h1 + h2 * h2
    base = np.array([-h0 * h1 / n2, -h0 * h2 / n2])
    d = np.array([-h2, h1]) / np.sqrt(n2)
    offsets = [0.0, 1.0, -1.0, 10.0, -10.0, 0.37, -3.1]
    scale = max(1.0, float(np.hypot(*base)))
    return base + offsets[k] * scale * d


def _raw_transitions(plant: PlantModel, region: GammaRegion, r3: float, f: SingularFrequency, h):
    """Real sensitivities (e1, e2) of the crossing root, in the outward direction."""
    if f.at_infinity:
        # the escaping root is real and sits near -c[N-1]/c[N]; it is inside on
        # the side c[N] > 0 exactly when c[N-1] > 0
        r2 = -h[2] / h[1]
        p = plant.char_poly(region, 0.0, r2, r3)
        c_next = p.coef(plant.m + 1)
        if abs(c_next) <= 1e-12 * max(1.0, plant.a.scale, plant.b.scale):
            raise DegenerateEigenvalue("root escapes through infinity with a vanishing second coefficient")
        outward = -1.0 if c_next > 0 else 1.0
        return 0.0, outward * np.sign(h[1])
    basis = q_basis(region)
    z0 = f.location
    nrm = region.outward_normal(z0)
    az = eval_complex(plant.a, z0)
    for k in range(7):
        r1, r2 = _point_on_line(h, k)
        dp, scale = _char_deriv(plant, region, r1, r2, r3, z0)
        if abs(dp) > 1e-9 * scale:
            break
    else:
        raise DegenerateEigenvalue(f"double root on the boundary at {z0:.6g}")
    es = []
    for d in (basis.delta1, basis.delta2):
        mu = -az * eval_complex(d, z0) / dp
        es.append(float((np.conj(mu) * nrm).real))
    return es[0], es[1]


def _char_deriv(plant, region, r1, r2, r3, z0) -> tuple[complex, float]:
    """dp/dz at z0 and a magnitude scale for the degeneracy test."""
    q = q_basis(region).q(r1, r2, r3)
    a, b = plant.a, plant.b
    aq = a * q
    if plant.is_delay and plant.delay:
        L = plant.delay
        ez = np.exp(L * z0)
        dp = eval_complex(aq.deriv(), z0) + (eval_complex(b.deriv(), z0) + L * eval_complex(b, z0)) * ez
        scale = (abs(eval_complex(aq.deriv(), z0)) + abs(eval_complex(b.deriv(), z0) * ez)
                 + L * abs(eval_complex(b, z0) * ez))
        return complex(dp), max(scale, 1e-300)
    p = aq + b
    dp = eval_complex(p.deriv(), z0)
    return dp, max(p.scale * max(1.0, abs(z0)) ** max(p.degree - 1, 0), 1e-300)


def _sgn(x: float) -> int:
    return -1 if x < 0 else 1


def transition_signs(plant: PlantModel, region: GammaRegion | None, r3: float,
                     f: SingularFrequency) -> tuple[int, int]:
    """Signs of the outward velocity of the crossing root per unit r1 and r2."""
    region = _region(plant, region)
    h = _line_coeffs(plant, region, r3, f)
    e1, e2 = _raw_transitions(plant, region, r3, f, h)
    return _sgn(e1), _sgn(e2)


def boundary_line(plant: PlantModel, region: GammaRegion | None, r3: float,
                  f: SingularFrequency) -> BoundaryLine:
    region = _region(plant, region)
    h = _line_coeffs(plant, region, r3, f)
    e1, e2 = _raw_transitions(plant, region, r3, f, h)
    gain = 0 if f.tangent else -_sgn(e1 * h[0] + e2 * h[1]) * f.crossing_size
    return BoundaryLine(float(h[0]), float(h[1]), float(h[2]), f, _sgn(e1), _sgn(e2),
                        f.crossing_size, gain)


def boundary_line_or_unknown(plant, region, r3, f) -> BoundaryLine:
    """Like :func:`boundary_line`, but a degenerate crossing yields ``gain=None``.

    Counts are never propagated across such a line; the faces beyond it get
    their own direct census.
    """
    try:
        return boundary_line(plant, region, r3, f)
    except DegenerateEigenvalue:
        h = _line_coeffs(plant, _region(plant, region), r3, f)
        return BoundaryLine(float(h[0]), float(h[1]), float(h[2]), f, 1, 1, f.crossing_size, None)


def merge_coincident(lines: list[BoundaryLine]) -> list[BoundaryLine]:
    """Fuse lines that coincide: opposite transitions cancel, equal ones add up."""
    norm = [geometry.normalize_line(ln.coeffs) for ln in lines]
    scale = max([1.0] + [abs(h[2]) for h in norm])
    used = [False] * len(lines)
    out = []
    for i, ln in enumerate(lines):
        if used[i]:
            continue
        used[i] = True
        if ln.gain is None:
            out.append(ln)
            continue
        gain, size = ln.gain, ln.crossing_size
        hi = norm[i]
        for j in range(i + 1, len(lines)):
            if used[j] or lines[j].gain is None:
                continue
            hj = norm[j]
            for s in (1.0, -1.0):
                if (abs(hi[0] - s * hj[0]) <= MERGE_TOL and abs(hi[1] - s * hj[1]) <= MERGE_TOL
                        and abs(hi[2] - s * hj[2]) <= MERGE_TOL * scale):
                    used[j] = True
                    gain += lines[j].gain if s > 0 else -lines[j].gain
                    size += lines[j].crossing_size
                    break
        if gain == 0 and size != ln.crossing_size:
            continue  # the pair closes up: no net transition
        out.append(BoundaryLine(ln.h1, ln.h2, ln.h0, ln.source, ln.e1, ln.e2, size, gain))
    return out


# --- arrangement and census propagation ----------------------------------------

def arrangement_faces(lines, bounding_box=None):
    coeffs = [ln.coeffs if isinstance(ln, BoundaryLine) else tuple(ln) for ln in lines]
    return geometry.arrangement(coeffs, bounding_box)


def assemble_slice(r3: float, freqs, lines: list[BoundaryLine], order: int,
                   count_fn: Callable[[float, float], int], stable_count: int,
                   sign: int = 1, box=None, verify_all: bool = False,
                   census_fn: Callable[[float, float], RootCensus] | None = None,
                   lenient: bool = False) -> Slice:
    """Arrange ``lines``, propagate counts and verify candidate faces.

    ``count_fn`` returns the tracked count at a point; crossing a line to its
    positive side changes it by ``sign * gain``. Faces with propagated count
    ``stable_count`` are verified directly. With ``lenient`` (truncated line
    sets) inner polygons are verified too and a failed verification only
    demotes the face instead of raising.
    """
    coeffs = [ln.coeffs for ln in lines]
    norm = [geometry.normalize_line(h) for h in coeffs]
    if box is None:
        box = geometry.bounding_box(norm)
    faces = geometry.arrangement(coeffs, box)
    counts: list[int | None] = [None] * len(faces)
    direct: dict[int, int] = {}
    censuses: dict[int, RootCensus] = {}

    def measure(i):
        if i not in direct:
            x, y = faces[i].point
            if census_fn is not None:
                c = census_fn(x, y)
                censuses[i] = c
                direct[i] = c.inside
            else:
                direct[i] = count_fn(x, y)
        return direct[i]

    def depth(i):
        p = faces[i].point
        return min([abs(geometry.line_value(h, p)) for h in norm] or [np.inf])

    order_idx = sorted(range(len(faces)), key=lambda i: (faces[i].truncated, -depth(i)))
    for seed in order_idx:
        if counts[seed] is not None:
            continue
        if measure(seed) < 0:
            continue  # unclassifiable face: do not seed from it
        counts[seed] = measure(seed)
        queue = deque([seed])
        while queue:
            i = queue.popleft()
            for j, lab in faces[i].neighbors:
                g = lines[lab].gain
                if g is None:
                    continue
                step = g if faces[i].signs[lab] < 0 else -g
                val = counts[i] + sign * step
                if counts[j] is None:
                    counts[j] = val
                    queue.append(j)
                elif counts[j] != val:
                    raise ConsistencyError(
                        f"face {j} reached with counts {counts[j]} and {val}", counts[j], val)
    out = []
    for i, f in enumerate(faces):
        cand = counts[i] == stable_count
        if lenient and not cand and _is_inner(f, lines, sign):
            cand = True
        stable = False
        if cand or verify_all:
            v = measure(i)
            if v != counts[i]:
                if not lenient:
                    raise ConsistencyError(
                        f"face at {f.point}: propagated {counts[i]}, verified {v}", counts[i], v)
                counts[i] = v
            stable = v == stable_count
        out.append(SliceFace(list(f.vertices), f.point, counts[i], censuses.get(i), stable,
                             f.truncated, list(f.edge_lines)))
    return Slice(float(r3), list(freqs), list(lines), out, tuple(box), order)


def _is_inner(face, lines, sign: int) -> bool:
    """Every bounding line with a known transition is crossed into the face favorably."""
    seen = False
    for lab in set(face.edge_lines):
        if lab < 0 or lines[lab].gain in (None, 0):
            continue
        seen = True
        # moving into the face changes the inside count by gain * side
        if lines[lab].gain * face.signs[lab] < 0:
            return False
    return seen


def compute_slice(plant: PlantModel, region: GammaRegion | None, r3: float, *,
                  box=None, verify_all: bool = False) -> Slice:
    """Faces of the (r1, r2) plane at fixed r3 with their root counts and stable polygons."""
    region = _region(plant, region)
    if plant.is_delay and plant.delay > 0:
        from .delay import compute_delay_slice
        return compute_delay_slice(plant, r3, region=region, box=box, verify_all=verify_all)
    freqs = singular_frequencies(plant, region, r3)
    lines = merge_coincident([boundary_line_or_unknown(plant, region, r3, f) for f in freqs])
    order = plant.order

    def census(x, y):
        return verify_point(plant, region, x, y, r3)

    return assemble_slice(r3, freqs, lines, order, None, order, box=box,
                          verify_all=verify_all, census_fn=census)


def verify_point(plant: PlantModel, region: GammaRegion | None, r1: float, r2: float,
                 r3: float) -> RootCensus:
    """Direct root census of p = A Q + B at one parameter point."""
    region = _region(plant, region)
    return root_census(plant.char_poly(region, r1, r2, r3), region)
