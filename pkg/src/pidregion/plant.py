"""Plant representants: the polynomial pair (A, B) of p = A*Q + B."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import DegreeError, DomainError
from .gamma import GammaRegion, q_basis
from .polynomial import RealPoly

DOMAINS = ("continuous", "discrete", "delay")


def _poly(x) -> RealPoly:
    return x if isinstance(x, RealPoly) else RealPoly(x)


@dataclass(frozen=True)
class PlantModel:
    """One feedback loop p = A(z) Q(z) + B(z) (times e^{Ls} on B for delays)."""

    a: RealPoly
    b: RealPoly
    domain: str = "continuous"
    delay: float = 0.0
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "a", _poly(self.a))
        object.__setattr__(self, "b", _poly(self.b))
        if self.domain not in DOMAINS:
            raise DomainError(f"unknown domain {self.domain!r}")
        if self.a.is_zero:
            raise DegreeError("A must be a nonzero polynomial")
        if self.b.is_zero:
            raise DegreeError("B must be a nonzero polynomial")
        if self.delay < 0:
            raise DomainError("delay must be nonnegative")
        if self.delay > 0 and self.domain != "delay":
            raise DomainError("a positive delay requires domain='delay'")

    @property
    def m(self) -> int:
        return self.a.degree

    @property
    def n(self) -> int:
        return self.b.degree

    @property
    def is_delay(self) -> bool:
        return self.domain == "delay"

    @property
    def order(self) -> int:
        """Nominal degree N of the closed-loop polynomial."""
        return max(self.m + 2, self.n)

    def default_region(self) -> GammaRegion:
        return GammaRegion.schur() if self.domain == "discrete" else GammaRegion.hurwitz()

    def char_poly(self, region: GammaRegion, r1: float, r2: float, r3: float) -> RealPoly:
        """p = A*Q + B for the given r-parameters (delay term ignored)."""
        return self.a * q_basis(region).q(r1, r2, r3) + self.b

    def to_dict(self) -> dict:
        d = {"a": list(self.a.coeffs), "b": list(self.b.coeffs), "domain": self.domain}
        if self.delay:
            d["delay"] = self.delay
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PlantModel":
        delay = float(d.get("delay", 0.0) or 0.0)
        domain = d.get("domain", "delay" if delay > 0 else "continuous")
        if domain == "delay":
            return QuasiPlant(RealPoly(d["a"]), RealPoly(d["b"]), delay=delay, name=d.get("name", ""))
        return cls(RealPoly(d["a"]), RealPoly(d["b"]), domain=domain, name=d.get("name", ""))

    @classmethod
    def from_tf(cls, num: Sequence[float], den: Sequence[float], domain: str = "continuous",
                z1: float = 0.0, delay: float = 0.0) -> "PlantModel":
        """Unity-feedback PID loop for G = num/den (ascending coefficients).

        Continuous and delay: C = (kI + kP s + kD s^2)/s, so A = num and
        B = s*den. Discrete: C = Q(z)/((z + z1)(z - 1)), so B = den*(z+z1)(z-1).
        """
        num, den = RealPoly(num), RealPoly(den)
        if domain == "discrete":
            b = den * RealPoly([z1, 1.0]) * RealPoly([-1.0, 1.0])
            return cls(num, b, domain="discrete")
        b = den * RealPoly([0.0, 1.0])
        if domain == "delay":
            return QuasiPlant(num, b, delay=delay)
        return cls(num, b, domain=domain)


@dataclass(frozen=True)
class QuasiPlant(PlantModel):
    """p = A(s)(kI + kP s + kD s^2) + B(s) e^{Ls} with n >= m + 2."""

    domain: str = "delay"

    def __init__(self, a, b, delay: float, name: str = ""):
        object.__setattr__(self, "a", _poly(a))
        object.__setattr__(self, "b", _poly(b))
        object.__setattr__(self, "domain", "delay")
        object.__setattr__(self, "delay", float(delay))
        object.__setattr__(self, "name", name)
        if self.a.is_zero or self.b.is_zero:
            raise DegreeError("A and B must be nonzero")
        if self.delay < 0:
            raise DomainError("delay must be nonnegative")
        if self.n < self.m + 2:
            raise DegreeError(
                f"no principal term: e^(Ls) must multiply the highest power in s "
                f"(need deg B >= deg A + 2, got {self.n} < {self.m + 2})")

    @property
    def L(self) -> float:
        return self.delay

    @property
    def neutral(self) -> bool:
        return self.n == self.m + 2

    @property
    def retarded(self) -> bool:
        return self.n > self.m + 2
