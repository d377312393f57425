"""Real-coefficient polynomials, root finding and root census.

Coefficients are stored in ascending order: ``coeffs[k]`` multiplies ``x**k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegreeError

TRIM_RTOL = 1e-12
CLUSTER_RTOL = 1e-6
RESIDUAL_TOL = 1e-8


def _trim(coeffs: Sequence[float]) -> tuple[float, ...]:
    c = [float(x) for x in coeffs]
    if not c:
        return ()
    scale = max(abs(x) for x in c)
    if scale == 0.0:
        return ()
    cut = TRIM_RTOL * scale
    while c and abs(c[-1]) < cut:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RealPoly:
    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float] = ()):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @classmethod
    def from_roots(cls, roots: Sequence[complex], lead: float = 1.0) -> "RealPoly":
        c = npoly.polyfromroots(list(roots))
        return cls(np.real(c) * lead)

    @classmethod
    def monomial(cls, k: int, c: float = 1.0) -> "RealPoly":
        return cls([0.0] * k + [c])

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree of the polynomial; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> float:
        return self.coeffs[-1] if self.coeffs else 0.0

    def coef(self, k: int) -> float:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0.0

    @property
    def scale(self) -> float:
        return max((abs(c) for c in self.coeffs), default=0.0)

    def __call__(self, z):
        if not self.coeffs:
            return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0.0
        return npoly.polyval(z, self.coeffs)

    def __add__(self, other: "RealPoly") -> "RealPoly":
        return RealPoly(npoly.polyadd(self.coeffs or (0.0,), other.coeffs or (0.0,)))

    def __sub__(self, other: "RealPoly") -> "RealPoly":
        return RealPoly(npoly.polysub(self.coeffs or (0.0,), other.coeffs or (0.0,)))

    def __mul__(self, other) -> "RealPoly":
        if isinstance(other, RealPoly):
            if self.is_zero or other.is_zero:
                return RealPoly(())
            return RealPoly(npoly.polymul(self.coeffs, other.coeffs))
        return RealPoly([c * float(other) for c in self.coeffs])

    __rmul__ = __mul__

    def __neg__(self) -> "RealPoly":
        return self * -1.0

    def deriv(self) -> "RealPoly":
        if self.degree < 1:
            return RealPoly(())
        return RealPoly(npoly.polyder(self.coeffs))

    def divmod(self, other: "RealPoly") -> tuple["RealPoly", "RealPoly"]:
        q, r = npoly.polydiv(self.coeffs, other.coeffs)
        return RealPoly(q), RealPoly(r)

    def shift(self, a: float) -> "RealPoly":
        """Return q with q(x) = p(x + a)."""
        out = np.zeros(1)
        for c in reversed(self.coeffs):
            out = npoly.polyadd(npoly.polymul(out, [a, 1.0]), [c])
        return RealPoly(out)

    def __repr__(self) -> str:
        return f"RealPoly({list(self.coeffs)})"


def eval_complex(p: RealPoly, z: complex) -> complex:
    """Horner evaluation of ``p`` at a complex point."""
    acc = 0j
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return complex(acc)


def _polish(p: RealPoly, dp: RealPoly, r: complex) -> complex:
    best, best_res = r, abs(eval_complex(p, r))
    for _ in range(4):
        d = eval_complex(dp, best)
        if d == 0:
            break
        cand = best - eval_complex(p, best) / d
        res = abs(eval_complex(p, cand))
        if not res < best_res:  # also rejects nan from overflowing steps
            break
        best, best_res = cand, res
    return best


def roots(p: RealPoly) -> list[complex]:
    """All ``p.degree`` roots, conjugate-paired.

    Companion-matrix eigenvalues followed by a guarded Newton polish.
    """
    if p.degree < 1:
        raise DegreeError(f"roots() needs degree >= 1, got {p.degree}")
    raw = np.roots(p.coeffs[::-1])
    dp = p.deriv()
    polished = [_polish(p, dp, complex(r)) for r in raw]
    out: list[complex] = []
    used = [False] * len(polished)
    order = sorted(range(len(polished)), key=lambda i: (polished[i].real, polished[i].imag))
    for i in order:
        if used[i]:
            continue
        r = polished[i]
        used[i] = True
        if abs(r.imag) <= 1e-10 * max(1.0, abs(r)):
            out.append(complex(r.real, 0.0))
            continue
        # pair with the nearest unused conjugate
        j_best, d_best = None, np.inf
        for j in order:
            if not used[j]:
                d = abs(polished[j] - r.conjugate())
                if d < d_best:
                    j_best, d_best = j, d
        if j_best is not None and d_best <= 1e-6 * max(1.0, abs(r)):
            used[j_best] = True
            mid = 0.5 * (r + polished[j_best].conjugate())
            out.extend([mid, mid.conjugate()])
        else:
            out.append(r)
    out.sort(key=lambda z: (z.real, z.imag))
    return out


def residual_ok(p: RealPoly, r: complex, tol: float = RESIDUAL_TOL) -> bool:
    return abs(eval_complex(p, r)) <= tol * p.scale * max(1.0, abs(r)) ** p.degree


def cluster_roots(rs: Sequence[complex], rtol: float = CLUSTER_RTOL) -> list[tuple[complex, int]]:
    """Group roots closer than ``rtol`` (relative) into (mean, multiplicity) pairs."""
    clusters: list[list[complex]] = []
    for r in rs:
        for cl in clusters:
            c0 = cl[0]
            if abs(r - c0) <= rtol * max(1.0, abs(c0)):
                cl.append(r)
                break
        else:
            clusters.append([r])
    return [(complex(np.mean(cl)), len(cl)) for cl in clusters]


@dataclass(frozen=True)
class RootCensus:
    inside: int
    on_boundary: int
    outside: int
    roots: tuple[complex, ...] = field(default=(), repr=False)
    clusters: tuple[tuple[complex, int], ...] = field(default=(), repr=False)

    @property
    def degree(self) -> int:
        return self.inside + self.on_boundary + self.outside

    @property
    def stable(self) -> bool:
        return self.on_boundary == 0 and self.outside == 0 and self.inside > 0

    def to_dict(self) -> dict:
        return {"inside": self.inside, "on_boundary": self.on_boundary, "outside": self.outside}


def root_census(p: RealPoly, region, boundary_tol: float = 1e-9) -> RootCensus:
    """Classify the roots of ``p`` as inside / on / outside ``region``.

    ``region`` is anything with a ``signed_distance(z)`` method (negative inside).
    """
    if p.is_zero:
        raise DegreeError("root census of the zero polynomial")
    if p.degree == 0:
        return RootCensus(0, 0, 0)
    rs = roots(p)
    clusters = cluster_roots(rs)
    inside = on = outside = 0
    for c, mult in clusters:
        d = region.signed_distance(c)
        if abs(d) <= boundary_tol:
            on += mult
        elif d < 0:
            inside += mult
        else:
            outside += mult
    return RootCensus(inside, on, outside, tuple(rs), tuple(clusters))
