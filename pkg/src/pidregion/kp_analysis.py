"""Which r3 values can host stable polygons at all.

The count Z of positive singular frequencies changes only at extrema and
limits of the r3-plot. Comparing Z against a threshold derived from the
root distribution of A (and the decoupling factor) rules out whole r3
intervals before any polygon is computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._curve import r3_curve
from .errors import DomainError, NotApplicable
from .gamma import GammaRegion, decoupling_function
from .plant import PlantModel
from .polynomial import RealPoly, cluster_roots, roots
from .slicing import _region, boundary_line_or_unknown, singular_frequencies

DEFAULT_RANGE = (-100.0, 100.0)
SUFFICIENT_ORDER = 6


def even_floor(n: int) -> int:
    if n < 0:
        raise DomainError(f"even_floor needs n >= 0, got {n}")
    return n - (n % 2)


# --- the plot ------------------------------------------------------------------

@dataclass
class KpPlot:
    branches: list[np.ndarray]  # each an (k, 2) array of (param, r3), params increasing
    extrema: list[tuple[float, float]]
    poles: list[float]
    limit_low: float  # r3 as the parameter tends to 0+
    limit_high: float  # r3 at the far end (omega -> inf, alpha -> pi, or the scan cap)

    @property
    def samples(self) -> list[tuple[float, float]]:
        return [tuple(row) for b in self.branches for row in b]


def _default_param_range(curve) -> tuple[float, float]:
    if curve.region.is_circle:
        return (1e-4, np.pi - 1e-4)
    ts = [c.theta for c in curve.critical]
    top = 3.0 * max(ts) if ts else 10.0 * curve._scale
    if np.isfinite(curve.theta_max):
        top = curve.theta_max
    return (min(1e-3 * curve._scale, top * 1e-3), top)


def kp_plot(plant: PlantModel, region: GammaRegion | None = None, param_range=None,
            samples: int = 400, omega_max: float | None = None) -> KpPlot:
    """Sample r3(param) per monotone-between-poles branch, extrema included exactly."""
    region = _region(plant, region)
    curve = r3_curve(plant, region, omega_max)
    lo, hi = param_range if param_range is not None else _default_param_range(curve)
    if region.is_circle or np.isfinite(curve.theta_max):
        grid = np.linspace(lo, hi, samples)
    else:
        grid = np.geomspace(lo, hi, samples)
    ext = [(c.theta, c.value) for c in curve.critical if c.kind == "extremum"]
    grid = np.union1d(grid, [t for t, _ in ext if lo <= t <= hi])
    cuts = [p for p in curve.poles if lo < p < hi]
    branches = []
    edges = [lo] + cuts + [hi]
    for a, b in zip(edges[:-1], edges[1:]):
        g = grid[(grid > a) & (grid < b)] if a in cuts or b in cuts else grid[(grid >= a) & (grid <= b)]
        if len(g) == 0:
            continue
        with np.errstate(all="ignore"):
            v = curve.value(g)
        ok = np.isfinite(v)
        branches.append(np.column_stack([g[ok], v[ok]]))
    return KpPlot(branches, ext, list(curve.poles), curve.left_limit, curve.right_limit)


# --- counting --------------------------------------------------------------------

def count_singular_frequencies(plant: PlantModel, region: GammaRegion | None, r3: float,
                               omega_max: float | None = None) -> int:
    """Number of singular frequencies with positive parameter (conjugate pairs once).

    For circles the real-axis points are left out; for half-planes a root
    escaping through infinity (leading coefficient cancelling) counts as one.
    """
    region = _region(plant, region)
    freqs = singular_frequencies(plant, region, r3, omega_max)
    if region.is_circle:
        return sum(1 for f in freqs if not f.is_real_axis)
    return sum(1 for f in freqs if f.param > 0)


def _on_count(rs, pred):
    return sum(m for c, m in cluster_roots(rs) if pred(c))


def required_Z(plant: PlantModel, region: GammaRegion | None = None,
               decoupling: str | None = None) -> tuple[int, dict]:
    """Minimal Z compatible with stability, with the root census it came from."""
    region = _region(plant, region)
    N = plant.order
    if region.is_circle:
        c = plant.a * decoupling_function(region, decoupling)
        rs = roots(c) if c.degree >= 1 else []
        tol = 1e-7

        def dist(z):
            return abs(z - region.m) - region.rho

        R = _on_count(rs, lambda z: dist(z) < -tol)
        J = _on_count(rs, lambda z: abs(dist(z)) <= tol)
        jp = _on_count(rs, lambda z: abs(z - (region.m + region.rho)) <= tol)
        jm = _on_count(rs, lambda z: abs(z - (region.m - region.rho)) <= tol)
        thr = math.ceil(N - R - (J + even_floor(jp) + even_floor(jm) + 2) / 2)
        return max(thr, 0), {"N": N, "R": R, "J": J, "J+": jp, "J-": jm}
    a = plant.a.shift(region.sigma0)
    rs = roots(a) if a.degree >= 1 else []
    tol = 1e-7
    M = plant.m
    P = _on_count(rs, lambda z: z.real > tol * max(1.0, abs(z)))
    J = _on_count(rs, lambda z: abs(z.real) <= tol * max(1.0, abs(z)))
    J0 = _on_count(rs, lambda z: abs(z) <= tol)
    base = even_floor(max(N - M + 2 * P - J - 1, 0))
    thr = (base - even_floor(J0)) // 2 if J0 else base // 2
    escape = int(plant.n <= plant.m + 2)
    return thr + escape, {"N": N, "M": M, "P": P, "J": J, "J0": J0, "escape": escape}


# --- admissible intervals ---------------------------------------------------------

@dataclass(frozen=True)
class KpInterval:
    lo: float
    hi: float
    Z: int
    required_Z: int
    admissible: bool
    sufficiency: str  # "necessary_only" | "necessary_and_sufficient"

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "Z": self.Z, "required_Z": self.required_Z,
                "admissible": self.admissible, "sufficiency": self.sufficiency}


def default_search_range(plant: PlantModel, region: GammaRegion | None = None,
                         omega_max: float | None = None) -> tuple[float, float]:
    region = _region(plant, region)
    crit = r3_curve(plant, region, omega_max).critical_values()
    if region.is_circle:
        if not crit:
            return (-1.0, 1.0)
        lo, hi = min(crit), max(crit)
        pad = 0.2 * max(hi - lo, 1e-3 * max(1.0, abs(lo), abs(hi)))
        return (lo - pad, hi + pad)
    lo, hi = DEFAULT_RANGE
    if crit:
        span = max(crit) - min(crit)
        lo = min(lo, min(crit) - 0.2 * span)
        hi = max(hi, max(crit) + 0.2 * span)
    return (lo, hi)


def interval_cells(plant: PlantModel, region: GammaRegion | None, search_range,
                   omega_max: float | None = None,
                   count_fn=None, threshold: int | None = None) -> list[KpInterval]:
    """Cut ``search_range`` at the critical values and label every cell."""
    region = _region(plant, region)
    lo, hi = search_range
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise DomainError("search_range must be a finite interval")
    curve = r3_curve(plant, region, omega_max)
    cuts = sorted({v for v in curve.critical_values() if lo < v < hi})
    edges = [lo] + cuts + [hi]
    if threshold is None:
        threshold, _ = required_Z(plant, region)
    count_fn = count_fn or (lambda r: count_singular_frequencies(plant, region, r, omega_max))
    suff = "necessary_and_sufficient" if plant.order <= SUFFICIENT_ORDER and not plant.is_delay \
        else "necessary_only"
    out = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 1e-12 * max(1.0, abs(a)):
            continue
        z = count_fn(0.5 * (a + b))
        out.append(KpInterval(float(a), float(b), z, threshold, z >= threshold, suff))
    return out


def admissible_intervals(plant: PlantModel, region: GammaRegion | None = None,
                         search_range=None, omega_max: float | None = None) -> list[KpInterval]:
    """Admissible cells of the r3 partition (adjacent cells are not merged)."""
    region = _region(plant, region)
    if plant.is_delay and plant.delay > 0:
        from .delay import delay_admissible_intervals
        return delay_admissible_intervals(plant, search_range=search_range, omega_max=omega_max)
    if search_range is None:
        search_range = default_search_range(plant, region, omega_max)
    return [c for c in interval_cells(plant, region, search_range, omega_max) if c.admissible]


def merge_intervals(cells: list[KpInterval]) -> list[tuple[float, float]]:
    """Union of touching cells as (lo, hi) pairs."""
    out: list[list[float]] = []
    for c in sorted(cells, key=lambda c: c.lo):
        if out and abs(c.lo - out[-1][1]) <= 1e-12 * max(1.0, abs(c.lo)):
            out[-1][1] = c.hi
        else:
            out.append([c.lo, c.hi])
    return [(a, b) for a, b in out]


# --- stability peaks --------------------------------------------------------------

@dataclass(frozen=True)
class StabilityPeak:
    kP: float
    kI: float
    kD: float
    omegas: tuple[float, float, float]
    remainder_stable: bool
    collapsing: bool  # the cell entered across all three lines shrinks to the vertex

    @property
    def is_peak(self) -> bool:
        """A stable polygon closes at this vertex."""
        return self.remainder_stable and self.collapsing

    def to_dict(self) -> dict:
        return {"kP": self.kP, "kI": self.kI, "kD": self.kD, "omegas": list(self.omegas),
                "remainder_stable": self.remainder_stable, "collapsing": self.collapsing}


def _positive_lines(plant, region, kp, with_gain=False):
    freqs = [f for f in singular_frequencies(plant, region, kp)
             if 0 < f.param < np.inf and not f.tangent]
    lines = [boundary_line_or_unknown(plant, region, kp, f) for f in freqs]
    h = np.array([_unit(ln.coeffs) for ln in lines]).reshape(-1, 3)
    if with_gain:
        return [f.param for f in freqs], h, [ln.gain for ln in lines]
    return [f.param for f in freqs], h


def _unit(h):
    n = math.hypot(h[0], h[1])
    return (h[0] / n, h[1] / n, h[2] / n)


def _triple_dets(lines: np.ndarray, triples) -> np.ndarray:
    return np.array([np.linalg.det(lines[list(t)]) for t in triples])


def stability_peaks(plant: PlantModel, interval, region: GammaRegion | None = None,
                    samples: int = 2001, tol: float = 1e-8) -> list[StabilityPeak]:
    """Concurrency points of three boundary lines inside one constant-Z cell.

    Frequencies are matched across kP by rank, which is valid because their
    number does not change inside the cell.
    """
    region = _region(plant, region)
    if region.is_circle or plant.is_delay:
        raise NotApplicable("stability peaks are computed for delay-free half-plane regions")
    if plant.order <= SUFFICIENT_ORDER:
        raise NotApplicable(f"N = {plant.order} <= {SUFFICIENT_ORDER}: the interval test is already sufficient")
    lo, hi = (interval.lo, interval.hi) if hasattr(interval, "lo") else interval
    pad = 1e-6 * max(1.0, hi - lo)
    grid = np.linspace(lo + pad, hi - pad, samples)
    rows = [_positive_lines(plant, region, k) for k in grid]
    n = min(len(r[0]) for r in rows)
    if n < 3:
        return []
    triples = list(combinations(range(n), 3))
    dets = np.array([_triple_dets(r[1][:n], triples) for r in rows])
    peaks = []
    for ti, t in enumerate(triples):
        d = dets[:, ti]
        for i in np.nonzero(np.sign(d[:-1]) * np.sign(d[1:]) < 0)[0]:
            a, b, da = grid[i], grid[i + 1], d[i]
            while b - a > tol:
                c = 0.5 * (a + b)
                dc = _triple_dets(_positive_lines(plant, region, c)[1][:n], [t])[0]
                if np.sign(dc) == np.sign(da):
                    a, da = c, dc
                else:
                    b = c
            kp = 0.5 * (a + b)
            peaks.append(_peak_at(plant, region, kp, t))
    peaks.sort(key=lambda p: p.kP)
    return peaks


def _peak_at(plant, region, kp, triple) -> StabilityPeak:
    ws, lines, gains = _positive_lines(plant, region, kp, with_gain=True)
    h = lines[list(triple)]
    # normals pointing to the side where the crossing roots enter
    v = [h[k, :2] * (1 if (gains[i] or 0) > 0 else -1) for k, i in enumerate(triple)]
    lam = [_cross(v[1], v[2]), _cross(v[2], v[0]), _cross(v[0], v[1])]
    collapsing = all(x > 0 for x in lam) or all(x < 0 for x in lam)
    # least-squares vertex of the (nearly) concurrent lines
    sol, *_ = np.linalg.lstsq(h[:, :2], -h[:, 2], rcond=None)
    ki, kd = float(sol[0]), float(sol[1])
    om = tuple(float(ws[i]) for i in triple)
    return StabilityPeak(float(kp), ki, kd, om, _remainder_stable(plant, region, kp, ki, kd, om),
                         collapsing)


def _cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def _remainder_stable(plant, region, kp, ki, kd, omegas) -> bool:
    p = plant.char_poly(region, ki, kd, kp)
    f = RealPoly([1.0])
    s0 = region.sigma0
    for w in omegas:
        f = f * RealPoly([s0 * s0 + w * w, -2.0 * s0, 1.0])
    rem, _ = p.divmod(f)
    if rem.degree < 1:
        return rem.degree == 0
    return all(r.real < s0 for r in roots(rem))
