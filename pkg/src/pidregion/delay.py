"""PID loops with an input/output delay: p(s) = A(s) Q(s) + B(s) e^{Ls}.

On s = jw the delay term only rotates B/A, so the r3-plot becomes
kP(w) = -amp(w) sin(wL + phase(w)) / w with infinitely many branches. Slices
keep the boundary lines below a cutoff frequency; faces are classified with
an argument-principle count instead of polynomial roots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._curve import r3_curve
from .errors import DeltaInvalid, Inconclusive, PoleOnAxis
from .gamma import GammaRegion
from .kp_analysis import KpInterval, default_search_range, even_floor, interval_cells
from .plant import PlantModel, QuasiPlant
from .polynomial import RealPoly, cluster_roots, eval_complex, roots
from .slicing import (BoundaryLine, SingularFrequency, Slice, assemble_slice,
                      boundary_line_or_unknown, merge_coincident, singular_frequencies)

CUTOFF_CAP = 1e6  # relevant range never exceeds CUTOFF_CAP / L
UNSTABLE_FOREVER = 10**6  # count reported where infinitely many roots sit to the right
MAX_SAMPLES = 2_000_000


def _check(plant: PlantModel) -> QuasiPlant:
    if not plant.is_delay:
        raise TypeError("a delay plant (domain='delay') is required")
    return plant


def _shifted_g(plant: PlantModel, region: GammaRegion, u: complex) -> complex:
    """B e^{Ls} / A at s = sigma0 + u."""
    s = region.sigma0 + u
    a = eval_complex(plant.a, s)
    return complex(eval_complex(plant.b, s) * np.exp(plant.delay * s) / a)


# --- amplitude and phase ------------------------------------------------------------

def amp_phase(plant: PlantModel, omega):
    """Modulus and continuous argument of B(jw)/A(jw).

    The phase is unwrapped along increasing w starting at 0+, so it is a
    continuous function; scalar inputs are unwrapped on an internal grid.
    """
    w = np.atleast_1d(np.asarray(omega, float))
    scalar = np.ndim(omega) == 0
    top = float(np.max(w))
    grid = np.union1d(np.linspace(0.0, top, 2049)[1:], w) if top > 0 else w
    grid = grid[grid > 0] if top > 0 else grid
    ga, gb = plant.a(1j * grid), plant.b(1j * grid)
    if np.any(np.abs(ga) <= 1e-14 * max(plant.a.scale, 1e-300)):
        raise PoleOnAxis("A(jw) vanishes on the evaluation grid")
    ra, ia, rb, ib = ga.real, ga.imag, gb.real, gb.imag
    phase = np.unwrap(np.arctan2(ra * ib - ia * rb, ra * rb + ia * ib))
    # anchor the branch at 0+: the principal value of the first sample
    amp = np.abs(gb) / np.abs(ga)
    idx = np.searchsorted(grid, w)
    out_a, out_p = amp[idx], phase[idx]
    if scalar:
        return float(out_a[0]), float(out_p[0])
    return out_a, out_p


# --- singular frequencies -----------------------------------------------------------

@dataclass(frozen=True)
class FrequencyClass:
    odd_set: tuple[float, ...]
    even_set: tuple[float, ...]  # includes w = 0

    @property
    def all(self) -> tuple[float, ...]:
        return tuple(sorted(self.odd_set + self.even_set))


def delay_singular_frequencies(plant: PlantModel, kP: float, omega_max: float,
                               region: GammaRegion | None = None) -> FrequencyClass:
    """Solutions of kP(w) = kP on (0, omega_max], split by index parity (w0 = 0 is even)."""
    _check(plant)
    if not omega_max > 0:
        raise ValueError("omega_max must be positive")
    region = region or GammaRegion.hurwitz()
    ws = [f.param for f in singular_frequencies(plant, region, kP, omega_max) if f.param > 0]
    seq = [0.0] + ws
    return FrequencyClass(tuple(seq[1::2]), tuple(seq[0::2]))


def delay_boundary_line(plant: PlantModel, omega: float, kP: float,
                        region: GammaRegion | None = None) -> BoundaryLine:
    """Line kI - w^2 kD = -Re(B e^{jwL} / A) with its transition data."""
    _check(plant)
    region = region or GammaRegion.hurwitz()
    f = SingularFrequency(float(omega), complex(region.sigma0, omega), omega == 0.0)
    return boundary_line_or_unknown(plant, region, kP, f)


def infinity_root_boundaries(plant: PlantModel) -> tuple[float, float] | None:
    """The kD band (-|b_n/a_m|, |b_n/a_m|) of a neutral plant; None when retarded."""
    _check(plant)
    if plant.n != plant.m + 2:
        return None
    c = abs(plant.b.lead / plant.a.lead)
    return (-c, c)


# --- Z threshold -------------------------------------------------------------------------

def _phase_at_infinity(plant: PlantModel) -> float:
    return math.atan2(0.0, plant.b.lead / plant.a.lead) + (plant.n - plant.m) * math.pi / 2


def _delta_ok(plant: PlantModel, delta: float) -> bool:
    return abs(math.sin(delta + _phase_at_infinity(plant))) > 1e-9


def resolve_delta(plant: PlantModel, delta: float | None = None) -> float:
    """Validated delta; the default pi falls back to a scan of (0, 2pi) in pi/8 steps."""
    if delta is not None:
        if not _delta_ok(plant, delta):
            raise DeltaInvalid(f"the principal term vanishes at delta = {delta}")
        return float(delta)
    for k in [8] + [k for k in range(1, 16) if k != 8]:
        d = k * math.pi / 8
        if _delta_ok(plant, d):
            return d
    raise DeltaInvalid("no admissible delta found")


def z_cutoff(plant: PlantModel, l: int = 1, delta: float | None = None) -> float:
    """Upper end (2 l pi + delta) / L of the counting window."""
    return (2 * l * math.pi + resolve_delta(plant, delta)) / plant.delay


def delay_required_Z(plant: PlantModel, l: int = 1, delta: float | None = None) -> int:
    """Minimal count of singular frequencies in (0, (2 l pi + delta)/L) for stability."""
    _check(plant)
    if l < 1:
        raise ValueError("l must be >= 1")
    d = resolve_delta(plant, delta)
    N, M = plant.order, plant.m
    rs = roots(plant.a) if plant.a.degree >= 1 else []
    cl = cluster_roots(rs)
    tol = 1e-7
    P = sum(m for c, m in cl if c.real > tol * max(1.0, abs(c)))
    J = sum(m for c, m in cl if abs(c.real) <= tol * max(1.0, abs(c)))
    J0 = sum(m for c, m in cl if abs(c) <= tol)
    return math.ceil((N - M + 2 * P - J) / 2 + 2 * l + d / math.pi) - 1 + even_floor(J0) // 2


def delay_admissible_intervals(plant: PlantModel, l: int = 1, delta: float | None = None,
                               search_range=None, omega_max: float | None = None) -> list[KpInterval]:
    _check(plant)
    region = GammaRegion.hurwitz()
    cap = z_cutoff(plant, l, delta) if omega_max is None else float(omega_max)
    thr = delay_required_Z(plant, l, delta)
    if search_range is None:
        search_range = default_search_range(plant, region, cap)
    cells = interval_cells(plant, region, search_range, cap, threshold=thr)
    return [c for c in cells if c.admissible]


# --- stability check ---------------------------------------------------------------------

@dataclass(frozen=True)
class QuasiCheck:
    stable: bool
    unstable_roots: int
    margin: float

    def __bool__(self) -> bool:
        return self.stable


def _dominant(plant: PlantModel, kI: float, kP: float, kD: float):
    """p~ = B + A Q e^{-Ls} and its dominant monomial c s^d in the right half-plane."""
    q = RealPoly([kI, kP, kD])
    aq = plant.a * q
    L = plant.delay
    if L == 0:
        p = aq + plant.b
        return aq, plant.b, p.lead, p.degree
    return aq, plant.b, plant.b.lead, plant.b.degree


def quasi_stability_check(plant: PlantModel, kI: float, kP: float, kD: float,
                          omega_max: float | None = None) -> QuasiCheck:
    """Number of roots of p in Re s >= 0 by the argument principle.

    With p~(s) = B(s) + A(s) Q(s) e^{-Ls} (same zeros as p) and a dominant
    monomial c s^d, the count on a right half-disc of radius R is
    [d pi/2 + arg(p~(jR) / (c (jR)^d)) - change of arg p~(jw) on 0..R] / pi,
    valid once |p~/(c s^d) - 1| < 1 on the arc.
    """
    L = plant.delay
    aq, b, c, d = _dominant(plant, kI, kP, kD)
    if L > 0 and plant.n == plant.m + 2:
        ratio = abs(kD * plant.a.lead / plant.b.lead)
        if ratio > 1 + 1e-12:
            return QuasiCheck(False, UNSTABLE_FOREVER, 0.0)
        if ratio > 1 - 1e-9:
            raise Inconclusive("on an infinity root boundary", 0.0)
        bound = 0.5 * (1 + ratio)
    else:
        bound = 0.5

    def ptilde(s):
        s = np.asarray(s, complex)
        e = np.exp(-L * s) if L else 1.0
        return b(s) + aq(s) * e

    def arc_ok(R):
        th = np.linspace(-np.pi / 2, np.pi / 2, 257)
        s = R * np.exp(1j * th)
        dom = c * s**d
        if L:
            rest = np.abs(b(s) - dom) + np.abs(aq(s))  # |e^{-Ls}| <= 1 on Re s >= 0
        else:
            rest = np.abs(ptilde(s) - dom)
        return bool(np.all(rest < bound * np.abs(dom)))

    mags = [abs(r) for p in (aq, b) if p.degree >= 1 for r in roots(p)]
    R = max([1.0] + mags) * 2.0
    if omega_max:
        R = max(R, float(omega_max))
    for _ in range(200):
        if arc_ok(R):
            break
        R *= 1.5
    else:
        raise Inconclusive("no radius found where the dominant term controls the arc", 0.0)

    step = min(np.pi / (8 * L) if L else np.inf, R / 4000)
    if R / step > MAX_SAMPLES:
        raise Inconclusive(f"radius {R:.3g} needs more than {MAX_SAMPLES} axis samples", 0.0)
    w = np.union1d(np.arange(0.0, R, step), np.geomspace(1e-9 * R, R, 2000))
    w = np.union1d(w, [0.0, R])
    vals = ptilde(1j * w)
    for _ in range(30):
        jumps = np.abs(np.angle(vals[1:] / vals[:-1]))
        bad = np.nonzero(jumps > np.pi / 4)[0]
        if len(bad) == 0:
            break
        extra = np.concatenate([np.linspace(w[i], w[i + 1], 10)[1:-1] for i in bad])
        w = np.union1d(w, extra)
        vals = ptilde(1j * w)
    scale = np.abs(b(1j * w)) + np.abs(aq(1j * w))
    margin = float(np.min(np.abs(vals) / np.maximum(scale, 1e-300)))
    if margin < 1e-9:
        raise Inconclusive(f"p(jw) passes within {margin:.3g} of zero", margin)
    dphase = float(np.sum(np.angle(vals[1:] / vals[:-1])))
    end = complex(vals[-1] / (c * (1j * R) ** d))
    u = (d * np.pi / 2 + np.angle(end) - dphase) / np.pi
    k = int(round(u))
    if abs(u - k) > 0.05:
        raise Inconclusive(f"winding count {u:.3f} is not an integer", margin)
    return QuasiCheck(k == 0, k, margin)


# --- relevant range and slices ------------------------------------------------------------

def _settled_frequency(plant: PlantModel, scan_top: float) -> float:
    """Frequency above which kP(w) repeats with period within 5% of 2pi/L for three periods."""
    L = plant.delay
    period = 2 * np.pi / L
    curve = r3_curve(plant, GammaRegion.hurwitz(), scan_top)
    maxima = [c.theta for c in curve.critical
              if c.kind == "extremum" and curve.deriv(c.theta * (1 - 1e-6)) > 0]
    for i in range(len(maxima) - 3):
        gaps = np.diff(maxima[i:i + 4])
        if np.all(np.abs(gaps - period) <= 0.05 * period):
            return float(maxima[i])
    return float(scan_top)


def _heuristic_cutoff(plant: PlantModel) -> float:
    L = plant.delay
    cap = CUTOFF_CAP / L
    base = max(z_cutoff(plant), 40 * np.pi / L)
    top = min(base, cap)
    settle = _settled_frequency(plant, top)
    # frequencies of the extrema that bound admissible kP cells
    curve = r3_curve(plant, GammaRegion.hurwitz(), z_cutoff(plant))
    ends = {x for c in delay_admissible_intervals(plant) for x in (c.lo, c.hi)}
    bounding = [c.theta for c in curve.critical if c.kind == "extremum"
                and any(abs(c.value - e) <= 1e-9 * max(1.0, abs(e)) for e in ends)]
    return float(min(max([settle] + bounding) + 2 * np.pi / L, cap))


def _same_polygons(a: Slice, b: Slice, tol: float = 1e-6) -> bool:
    pa, pb = a.stable_polygons, b.stable_polygons
    if len(pa) != len(pb):
        return False
    key = lambda f: (round(f.point[0], 3), round(f.point[1], 3))
    for fa, fb in zip(sorted(pa, key=key), sorted(pb, key=key)):
        va, vb = np.asarray(fa.vertices), np.asarray(fb.vertices)
        if va.shape != vb.shape:
            return False
        # vertex lists may start at different corners
        if not any(np.max(np.abs(np.roll(va, k, axis=0) - vb)) <= tol * max(1.0, np.max(np.abs(vb)))
                   for k in range(len(va))):
            return False
    return True


def relevant_frequency_range(plant: PlantModel, kP: float, tighten: bool = True) -> float:
    """Cutoff frequency for the boundary lines that shape the stable polygons.

    The rule-of-thumb cutoff (settled oscillation of kP(w), frequencies of
    the extrema bounding admissible kP cells, plus two half-periods) is an
    upper bound; ``tighten`` then drops the longest tail of lines whose
    removal leaves the stable polygons unchanged.
    """
    _check(plant)
    upper = _heuristic_cutoff(plant)
    if not tighten:
        return upper
    ref = compute_delay_slice(plant, kP, omega_max=upper)
    ws = sorted(f.param for f in ref.frequencies if 0 < f.param < np.inf)
    for k in range(1, len(ws) + 1):
        cut = 0.5 * (ws[k - 1] + ws[k]) if k < len(ws) else upper
        if cut >= upper:
            return upper
        try:
            trial = compute_delay_slice(plant, kP, omega_max=cut, box=ref.box)
        except (Inconclusive, ArithmeticError):
            continue
        if _same_polygons(trial, ref):
            return float(cut)
    return upper


def compute_delay_slice(plant: PlantModel, kP: float, region: GammaRegion | None = None,
                        omega_max: float | None = None, box=None,
                        verify_all: bool = False) -> Slice:
    """Stable (kI, kD) polygons at fixed kP from the lines below ``omega_max``."""
    _check(plant)
    region = region or GammaRegion.hurwitz()
    if region.sigma0 != 0.0:
        raise PoleOnAxis("delay slices are computed for the imaginary axis only")
    if omega_max is None:
        omega_max = relevant_frequency_range(plant, kP)
    freqs = singular_frequencies(plant, region, kP, omega_max)
    lines = merge_coincident([boundary_line_or_unknown(plant, region, kP, f) for f in freqs])
    band = infinity_root_boundaries(plant)
    if band is not None:
        for sgn, c in ((-1.0, band[0]), (1.0, band[1])):
            src = SingularFrequency(float("inf"), complex(0.0, np.inf), False, at_infinity=True)
            lines.append(BoundaryLine(0.0, 1.0, -c, src, 1, int(sgn), 0, None))

    def count(x, y):
        if band is not None and not band[0] < y < band[1]:
            return UNSTABLE_FOREVER
        try:
            return quasi_stability_check(plant, x, kP, y, omega_max).unstable_roots
        except Inconclusive:
            return -1  # never equals a propagated count: the face is left unclassified

    return assemble_slice(kP, freqs, lines, plant.order, count, 0, sign=-1, box=box,
                          verify_all=verify_all, lenient=True)
