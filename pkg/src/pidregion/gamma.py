"""Stability regions, their Q-polynomial bases and decoupling functions.

Parameters are always handled as ``(r1, r2, r3)`` with ``r3`` the swept
scalar. For the Hurwitz half-plane the roles are fixed once here:
``(r1, r2, r3) = (kI, kD, kP)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotApplicable
from .polynomial import RealPoly


@dataclass(frozen=True)
class GammaRegion:
    kind: str  # "hurwitz" | "circle"
    sigma0: float = 0.0
    m: float = 0.0
    rho: float = 1.0

    def __post_init__(self):
        if self.kind not in ("hurwitz", "circle"):
            raise DomainError(f"unknown region kind {self.kind!r}")
        if self.kind == "circle" and not self.rho > 0:
            raise DomainError("circle radius must be positive")

    @classmethod
    def hurwitz(cls, sigma0: float = 0.0) -> "GammaRegion":
        return cls("hurwitz", sigma0=float(sigma0))

    @classmethod
    def circle(cls, m: float, rho: float) -> "GammaRegion":
        return cls("circle", m=float(m), rho=float(rho))

    @classmethod
    def schur(cls) -> "GammaRegion":
        return cls("circle", m=0.0, rho=1.0)

    @property
    def is_circle(self) -> bool:
        return self.kind == "circle"

    @property
    def is_schur(self) -> bool:
        return self.is_circle and self.m == 0.0 and self.rho == 1.0

    @property
    def param_max(self) -> float:
        return np.pi if self.is_circle else np.inf

    def signed_distance(self, z: complex) -> float:
        """Distance to the boundary, negative inside the region."""
        if self.is_circle:
            return abs(z - self.m) - self.rho
        return z.real - self.sigma0

    def boundary_point(self, theta: float) -> complex:
        if self.is_circle:
            return self.m + self.rho * complex(np.cos(theta), np.sin(theta))
        return complex(self.sigma0, theta)

    def outward_normal(self, z: complex) -> complex:
        if self.is_circle:
            return (z - self.m) / self.rho
        return 1.0 + 0j

    def real_axis_params(self) -> tuple[float, ...]:
        return (0.0, np.pi) if self.is_circle else (0.0,)

    def to_dict(self) -> dict:
        if self.is_circle:
            return {"kind": "circle", "m": self.m, "rho": self.rho}
        return {"kind": "hurwitz", "sigma0": self.sigma0}

    @classmethod
    def from_dict(cls, d: dict) -> "GammaRegion":
        kind = d.get("kind", "hurwitz")
        if kind == "schur":
            return cls.schur()
        if kind == "circle":
            return cls.circle(d.get("m", 0.0), d.get("rho", 1.0))
        if kind == "hurwitz":
            return cls.hurwitz(d.get("sigma0", 0.0))
        raise DomainError(f"unknown region kind {kind!r}")


@dataclass(frozen=True)
class QBasis:
    """Q = delta1*r1 + delta2*r2 + delta3*r3."""

    delta1: RealPoly
    delta2: RealPoly
    delta3: RealPoly
    roles: tuple[str, str, str] = ("r1", "r2", "r3")

    @property
    def deltas(self) -> tuple[RealPoly, RealPoly, RealPoly]:
        return (self.delta1, self.delta2, self.delta3)

    def by_role(self) -> dict[str, RealPoly]:
        return dict(zip(self.roles, self.deltas))

    def q(self, r1: float, r2: float, r3: float) -> RealPoly:
        return self.delta1 * r1 + self.delta2 * r2 + self.delta3 * r3


HURWITZ_ROLES = ("kI", "kD", "kP")


def q_basis(region: GammaRegion) -> QBasis:
    if region.is_circle:
        m, rho = region.m, region.rho
        return QBasis(RealPoly([rho**2 - m**2, 0.0, 1.0]), RealPoly([-m, 1.0]), RealPoly([1.0]))
    # shifted gains: Q = r1 + r2 (s - sigma0)^2 + r3 (s - sigma0)
    s0 = region.sigma0
    return QBasis(
        RealPoly([1.0]),
        RealPoly([s0**2, -2.0 * s0, 1.0]),
        RealPoly([-s0, 1.0]),
        roles=HURWITZ_ROLES,
    )


def transform_matrix(region: GammaRegion) -> np.ndarray:
    """Matrix T with c = T r, c holding the coefficients of 1, z, z^2 in Q."""
    if not region.is_circle and region.sigma0 == 0.0:
        raise NotApplicable("continuous PID on the imaginary axis uses k-parameters directly")
    basis = q_basis(region)
    T = np.zeros((3, 3))
    for j, d in enumerate(basis.deltas):
        for k in range(3):
            T[k, j] = d.coef(k)
    return T


def decoupling_function(region: GammaRegion, choice: str | None = None) -> RealPoly:
    if region.is_circle:
        choice = choice or "linear"
        if choice == "linear":
            return RealPoly([-region.m, 1.0])
        if choice == "quadratic":
            return q_basis(region).delta1
    else:
        choice = choice or "constant"
        if choice == "constant":
            return RealPoly([1.0])
    raise DomainError(f"decoupling choice {choice!r} not available for {region.kind}")


def boundary_samples(region: GammaRegion, samples: int) -> np.ndarray:
    if region.is_circle:
        a = np.linspace(-np.pi, np.pi, samples, endpoint=False)
        return region.m + region.rho * np.exp(1j * a)
    u = (np.arange(samples) + 0.5) / samples
    w = np.tan(np.pi * (u - 0.5))
    return region.sigma0 + 1j * w


def check_rank_condition(region: GammaRegion, basis: QBasis, samples: int = 256,
                         a_poly: RealPoly | None = None) -> bool:
    """True iff d(H, G)/d(r1, r2) has rank one at every sampled boundary point.

    ``a_poly`` optionally multiplies both columns by a plant denominator; the
    outcome is the same whenever A does not vanish at the samples.
    """
    if samples < 16:
        raise DomainError("rank check needs at least 16 samples")
    z = boundary_samples(region, samples)
    c1 = basis.delta1(z)
    c2 = basis.delta2(z)
    if a_poly is not None:
        az = a_poly(z)
        c1, c2 = c1 * az, c2 * az
    det = np.imag(np.conj(c1) * c2)
    scale = np.abs(c1) * np.abs(c2)
    nonzero = (np.abs(c1) > 0) | (np.abs(c2) > 0)
    return bool(np.all(np.abs(det) <= 1e-9 * np.maximum(scale, 1e-300)) and np.all(nonzero))
