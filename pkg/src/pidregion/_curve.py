"""The r3-plot: r3 as a function of the boundary parameter.

On the boundary the imaginary part of F = p/(A E) depends on r3 alone, so
each boundary point theta (omega for half-planes, alpha for circles) has one
r3 value at which it is a singular frequency. Between consecutive extrema and
poles that function is monotone, which makes "all singular frequencies for a
given r3" a bracketing problem with at most one root per branch.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.optimize import brentq

from .errors import PoleOnAxis
from .gamma import GammaRegion
from .plant import PlantModel
from .polynomial import RealPoly, roots

_IMAG_TOL = 1e-6


@dataclass(frozen=True)
class Critical:
    theta: float
    kind: str  # "extremum" | "pole"
    value: float  # r3 at an extremum; nan for poles


def _cpoly_mul(a, b):
    return npoly.polymul(a, b)


def _homogenize(coeffs, num, den, d):
    """sum_k c_k num^k den^(d-k) as a complex polynomial."""
    out = np.zeros(1, dtype=complex)
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        term = np.array([c], dtype=complex)
        for _ in range(k):
            term = _cpoly_mul(term, num)
        for _ in range(d - k):
            term = _cpoly_mul(term, den)
        out = npoly.polyadd(out, term)
    return out


class R3Curve:
    """r3(theta) for one plant on one boundary.

    ``theta_max`` caps the half-plane parameter for delay plants (the
    quasi-polynomial has infinitely many singular frequencies).
    """

    def __init__(self, plant: PlantModel, region: GammaRegion, theta_max: float | None = None):
        self.plant = plant
        self.region = region
        self.L = plant.delay if plant.is_delay else 0.0
        if region.is_circle:
            if self.L:
                raise PoleOnAxis("delay plants are only supported on half-plane regions")
            self.a = plant.a * RealPoly([-region.m, 1.0])  # A * E
            self.b = plant.b
        else:
            self.a = plant.a.shift(region.sigma0)
            self.b = plant.b.shift(region.sigma0) * float(np.exp(self.L * region.sigma0))
        self.da = self.a.deriv()
        self.db = self.b.deriv()
        self.theta_max = region.param_max if theta_max is None else float(theta_max)
        self._scale = self._freq_scale()
        self.poles = self._boundary_poles()
        self.critical = self._find_critical()
        self.left_limit = self._limit_left()
        self.right_limit = self._limit_right()

    # --- evaluation -----------------------------------------------------
    def _local(self, theta):
        """Point u at which G is evaluated (shifted s or native z)."""
        if self.region.is_circle:
            return self.region.m + self.region.rho * np.exp(1j * np.asarray(theta, float))
        return 1j * np.asarray(theta, float)

    def G(self, u):
        g = self.b(u) / self.a(u)
        if self.L:
            g = g * np.exp(self.L * u)
        return g

    def dG(self, u):
        a, b = self.a(u), self.b(u)
        num = (self.db(u) + self.L * b) * a - b * self.da(u)
        g = num / a**2
        if self.L:
            g = g * np.exp(self.L * u)
        return g

    def value(self, theta):
        theta = np.asarray(theta, float)
        u = self._local(theta)
        g = self.G(u)
        if self.region.is_circle:
            return self.region.rho * np.imag(g) / np.sin(theta)
        return -np.imag(g) / theta

    __call__ = value

    def deriv(self, theta):
        theta = np.asarray(theta, float)
        u = self._local(theta)
        g, dg = self.G(u), self.dG(u)
        if self.region.is_circle:
            rho = self.region.rho
            du = 1j * rho * np.exp(1j * theta)
            s, c = np.sin(theta), np.cos(theta)
            return rho * (np.imag(dg * du) * s - np.imag(g) * c) / s**2
        return -np.real(dg) / theta + np.imag(g) / theta**2

    # --- structure ------------------------------------------------------
    def _freq_scale(self) -> float:
        if self.region.is_circle:
            return 1.0
        mags = []
        for p in (self.a, self.b):
            if p.degree >= 1:
                mags += [abs(r) for r in roots(p) if abs(r) > 1e-12]
        s = float(np.median(mags)) if mags else 1.0
        if self.L:
            s = min(s, np.pi / self.L) if s > 0 else np.pi / self.L
        return max(s, 1e-6)

    def _boundary_poles(self) -> list[float]:
        if self.a.degree < 1:
            return []
        out = []
        for r in roots(self.a):
            if self.region.is_circle:
                w = r - self.region.m
                if abs(abs(w) - self.region.rho) <= 1e-9 * max(1.0, self.region.rho):
                    th = float(np.angle(w))
                    if 1e-12 < th < np.pi - 1e-12:
                        out.append(th)
            else:
                if abs(r.real) <= 1e-9 * max(1.0, abs(r)) and r.imag > 1e-12:
                    if r.imag < self.theta_max:
                        out.append(float(r.imag))
        return sorted(set(out))

    def _rational(self):
        """N(x), D(x) with r3 = N/D, x = omega (half-plane) or tan(alpha/2)."""
        if self.region.is_circle:
            m, rho = self.region.m, self.region.rho
            d = max(self.a.degree, self.b.degree)
            num = np.array([m + rho, 1j * (rho - m)])
            den = np.array([1.0, -1j])
            ah = _homogenize(self.a.coeffs, num, den, d)
            bh = _homogenize(self.b.coeffs, num, den, d)
        else:
            ah = np.array([c * 1j**k for k, c in enumerate(self.a.coeffs)])
            bh = np.array([c * 1j**k for k, c in enumerate(self.b.coeffs)])
        cr, ci = ah.real, ah.imag
        br, bi = bh.real, bh.imag
        i_part = npoly.polysub(npoly.polymul(bi, cr), npoly.polymul(br, ci))
        i1 = i_part[1:] if len(i_part) > 1 else np.zeros(1)
        dpoly = npoly.polyadd(npoly.polymul(cr, cr), npoly.polymul(ci, ci))
        if self.region.is_circle:
            npol = 0.5 * self.region.rho * npoly.polymul([1.0, 0.0, 1.0], i1)
        else:
            npol = -i1
        return RealPoly(npol), RealPoly(dpoly)

    def _x_to_theta(self, x):
        return 2.0 * np.arctan(x) if self.region.is_circle else x

    def _candidate_thetas(self) -> list[float]:
        cands = []
        if not self.L:
            npol, dpol = self._rational()
            k = npol.deriv() * dpol - npol * dpol.deriv()
            if k.degree >= 1:
                for r in roots(k):
                    if abs(r.imag) <= _IMAG_TOL * (1 + abs(r)) and r.real > 0:
                        cands.append(float(self._x_to_theta(r.real)))
        return cands

    def _grid(self) -> np.ndarray:
        if self.region.is_circle:
            g = np.concatenate([np.linspace(0, np.pi, 4001)[1:-1],
                                np.geomspace(1e-7, 1e-2, 200), np.pi - np.geomspace(1e-7, 1e-2, 200)])
        else:
            s = self._scale
            top = min(self.theta_max, 1e5 * s) if self.L == 0 else self.theta_max
            g = np.geomspace(1e-5 * s, top, 4000)
            if self.L:
                step = np.pi / (32 * self.L)
                g = np.concatenate([g, np.arange(step, self.theta_max, step), [self.theta_max]])
        g = np.unique(g[(g > 0) & (g <= self.theta_max)])
        for p in self.poles:
            g = g[np.abs(g - p) > 1e-9 * max(1.0, p)]
        return g

    def _bracket_root(self, f, lo, hi):
        try:
            return brentq(f, lo, hi, xtol=1e-14, rtol=1e-13, maxiter=200)
        except ValueError:
            return None

    def _find_critical(self) -> list[Critical]:
        grid = self._grid()
        with np.errstate(all="ignore"):
            dv = self.deriv(grid)
        ext = []
        finite = np.isfinite(dv)
        sgn = np.sign(dv)
        for i in range(len(grid) - 1):
            if not (finite[i] and finite[i + 1]) or sgn[i] == 0 or sgn[i] == sgn[i + 1]:
                continue
            lo, hi = grid[i], grid[i + 1]
            if any(lo < p < hi for p in self.poles):
                continue
            r = self._bracket_root(lambda t: float(self.deriv(t)), lo, hi)
            if r is not None:
                ext.append(r)
        for c in self._candidate_thetas():
            if not 0 < c < self.theta_max:
                continue
            if any(abs(c - e) <= 1e-7 * max(1.0, c) for e in ext):
                continue
            for h in (1e-9, 1e-7, 1e-5, 1e-3):
                lo, hi = c * (1 - h), min(c * (1 + h), self.theta_max * (1 - 1e-15))
                with np.errstate(all="ignore"):
                    dl, dh = float(self.deriv(lo)), float(self.deriv(hi))
                if np.isfinite(dl) and np.isfinite(dh) and dl * dh < 0:
                    r = self._bracket_root(lambda t: float(self.deriv(t)), lo, hi)
                    if r is not None and not any(abs(r - e) <= 1e-9 * max(1.0, r) for e in ext):
                        ext.append(r)
                    break
        ext = sorted(ext)
        merged = []
        for e in ext:
            if merged and abs(e - merged[-1]) <= 1e-10 * max(1.0, e):
                continue
            merged.append(e)
        merged = [e for e in merged if self._is_genuine_extremum(e)]
        crit = [Critical(e, "extremum", float(self.value(e))) for e in merged]
        crit += [Critical(p, "pole", float("nan")) for p in self.poles]
        return sorted(crit, key=lambda c: c.theta)

    def _is_genuine_extremum(self, c: float) -> bool:
        """Reject derivative sign flips caused by rounding on flat stretches."""
        h = 1e-3 * min(c, abs(self.theta_max - c) if np.isfinite(self.theta_max) else c)
        with np.errstate(all="ignore"):
            v = float(self.value(c))
            dl = v - float(self.value(c - h))
            dr = v - float(self.value(c + h))
        floor = 1e-13 * max(1.0, abs(v))
        return bool(dl * dr > 0 and min(abs(dl), abs(dr)) > floor)

    def _limit_at(self, theta0: float, side: int) -> float:
        """r3 limit at a real-axis boundary point (theta0 = 0 or pi)."""
        u0 = complex(self._local(theta0))
        a0 = complex(self.a(u0))
        scale = max(self.a.scale, 1e-300) * max(1.0, abs(u0)) ** max(self.a.degree, 0)
        if abs(a0) > 1e-10 * scale:
            gp = complex(self.dG(u0))
            v = self.region.rho**2 * gp.real if self.region.is_circle else -gp.real
            return 0.0 if abs(v) < 1e-12 else float(v)
        # pole of G at a real boundary point: sign from a nearby sample
        probe = theta0 + side * 1e-6 * (1.0 if self.region.is_circle else self._scale)
        v = float(self.value(probe))
        return float(np.sign(v) * np.inf) if v != 0 else 0.0

    def _limit_right(self) -> float:
        if self.region.is_circle:
            return self._limit_at(np.pi, -1)
        if np.isfinite(self.theta_max):
            return float(self.value(self.theta_max))
        npol, dpol = self._rational()
        if npol.is_zero:
            return 0.0
        if npol.degree < dpol.degree:
            return 0.0
        if npol.degree == dpol.degree:
            return npol.lead / dpol.lead
        return float(np.sign(npol.lead / dpol.lead) * np.inf)

    def _limit_left(self) -> float:
        return self._limit_at(0.0, +1)

    # --- queries ----------------------------------------------------------
    def branches(self):
        """Monotone pieces as (theta_lo, theta_hi, r3_lo, r3_hi) tuples."""
        pts = [(0.0, self.left_limit, "end")]
        for c in self.critical:
            if c.kind == "extremum":
                pts.append((c.theta, c.value, "extremum"))
            else:
                pts.append((c.theta, None, "pole"))
        pts.append((self.theta_max, self.right_limit, "end"))
        out = []
        for (t0, v0, k0), (t1, v1, k1) in zip(pts[:-1], pts[1:]):
            if k0 == "pole":
                v0 = self._pole_side(t0, +1)
            if k1 == "pole":
                v1 = self._pole_side(t1, -1)
            out.append((t0, t1, v0, v1))
        return out

    def _pole_side(self, tp: float, side: int) -> float:
        v = float(self.value(tp + side * 1e-7 * max(1.0, tp)))
        return float(np.sign(v) * np.inf)

    def critical_values(self) -> list[float]:
        """Finite r3 values at which the number of singular frequencies may change."""
        vals = [c.value for c in self.critical if c.kind == "extremum"]
        vals += [self.left_limit, self.right_limit]
        return sorted(v for v in vals if np.isfinite(v))

    def solve(self, r3: float, tol: float = 1e-10) -> list[tuple[float, bool]]:
        """All theta in (0, theta_max) with r3(theta) = r3, as (theta, tangent) pairs."""
        out: list[tuple[float, bool]] = []
        for c in self.critical:
            if c.kind == "extremum" and abs(c.value - r3) <= tol * max(1.0, abs(r3)):
                out.append((c.theta, True))
        for t0, t1, v0, v1 in self.branches():
            lo_v, hi_v = min(v0, v1), max(v0, v1)
            band = tol * max(1.0, abs(r3))
            if not (lo_v + band < r3 < hi_v - band):
                continue
            th = self._solve_branch(r3, t0, t1, v0, v1)
            if th is not None:
                out.append((th, False))
        out.sort()
        return out

    def _solve_branch(self, r3, t0, t1, v0, v1):
        f = lambda t: float(self.value(t)) - r3
        s0 = np.sign(v0 - r3)
        s1 = np.sign(v1 - r3)
        lo = self._inner(f, t0, t1, s0, +1)
        hi = self._inner(f, t1, t0, s1, -1)
        if lo is None or hi is None or lo >= hi:
            return None
        r = self._bracket_root(f, lo, hi)
        return r

    def _inner(self, f, t_end, t_other, want, direction):
        """A point just inside the branch next to ``t_end`` where sign(f) == want."""
        if not np.isfinite(t_end):
            x = max(t_other * 2.0, self._scale)
            for _ in range(200):
                with np.errstate(all="ignore"):
                    v = f(x)
                if np.isfinite(v) and np.sign(v) == want:
                    return x
                x *= 2.0
            return None
        width = abs(t_other - (t_end if np.isfinite(t_end) else t_other))
        if not np.isfinite(t_other):
            width = max(t_end, self._scale)
        for k in range(1, 16):
            x = t_end + direction * width * (1e-3 if k == 1 else 10.0 ** (-(k + 2)))
            if direction > 0 and x <= t_end or direction < 0 and x >= t_end:
                break
            if x <= 0:
                continue
            with np.errstate(all="ignore"):
                v = f(x)
            if np.isfinite(v) and np.sign(v) == want:
                return x
        # the value at the end itself (finite extremum or domain end)
        if 0 < t_end and (np.isfinite(self.theta_max) and t_end <= self.theta_max):
            with np.errstate(all="ignore"):
                v = f(t_end)
            if np.isfinite(v) and np.sign(v) == want:
                return t_end
        return None


@lru_cache(maxsize=256)
def r3_curve(plant: PlantModel, region: GammaRegion, theta_max: float | None = None) -> R3Curve:
    return R3Curve(plant, region, theta_max)
