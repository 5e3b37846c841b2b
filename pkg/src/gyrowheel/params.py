"""Physical parameters of the wheel robot and the derived reduced coefficients.

The robot is a rolling disk with an internal spinning flywheel. Three angles
describe its attitude: the steering angle alpha (heading of the contact line),
the lean angle beta (pi/2 is upright), and the rolling angle gamma. The
parameters below feed every dynamics evaluation in the package.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RobotParams:
    """Physical constants of the wheel.

    Attributes:
        m: total mass in kg.
        R: wheel radius in m.
        Ix: transverse moment of inertia in kg m^2.
        g: gravitational acceleration in m/s^2.
        M22: lean-axis inertia in kg m^2. Defaults to Ix + m R^2, the
            lean inertia of a thin rolling disk about the contact line.
            Only the ratios Gm, Im, Jm depend on it.
    """

    m: float = 1.0
    R: float = 1.0
    Ix: float = 0.5
    g: float = 9.8
    M22: float | None = None

    def __post_init__(self) -> None:
        for name in ("m", "R", "Ix", "g"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.M22 is None:
            object.__setattr__(self, "M22", self.Ix + self.m * self.R**2)
        elif self.M22 <= 0.0:
            raise ValueError(f"M22 must be positive, got {self.M22}")

    @property
    def Gm(self) -> float:
        """Gravity coefficient of the reduced lean dynamics, 1/s^2."""
        return self.m * self.g * self.R / self.M22

    @property
    def Im(self) -> float:
        """Centrifugal coefficient of the reduced lean dynamics, dimensionless."""
        return (self.Ix + self.m * self.R**2) / self.M22

    @property
    def Jm(self) -> float:
        """Gyroscopic coupling coefficient of the reduced lean dynamics."""
        return (2.0 * self.Ix + self.m * self.R**2) / self.M22

    def reduced(self) -> tuple[float, float, float]:
        """Return (Gm, Im, Jm)."""
        return (self.Gm, self.Im, self.Jm)


@dataclass(frozen=True)
class FrictionParams:
    """Joint friction model coefficients.

    Each coefficient is a 3-vector over the (steering, lean, rolling) axes.
    mu_v is viscous (N m s/rad), mu_d and mu_s are dynamic and static levels
    (N m), and D is the rate scale (rad/s) of the exponential transition from
    static to dynamic friction.
    """

    mu_v: tuple[float, float, float] = (0.17, 0.15, 0.09)
    mu_d: tuple[float, float, float] = (0.1, 0.1, 0.07)
    mu_s: tuple[float, float, float] = (0.3, 0.25, 0.1)
    D: float = 0.05

    def __post_init__(self) -> None:
        if self.D <= 0.0:
            raise ValueError(f"D must be positive, got {self.D}")
        for v, d, s in zip(self.mu_v, self.mu_d, self.mu_s):
            if v < 0.0 or d < 0.0:
                raise ValueError("friction coefficients must be non-negative")
            if s < d:
                raise ValueError("static level must be at least the dynamic level")
