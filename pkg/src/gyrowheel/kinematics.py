"""Rolling kinematics, contact-point geometry, and tracking coordinates.

The wheel rolls without slipping, so the velocity of its center projection
(X, Y) is tied to the angle rates. The ground contact point A = (x_a, y_a)
sits offset from the center by the lean; remarkably its own velocity is
pure heading motion,

    x_a_dot = R * gamma_dot * cos(alpha)
    y_a_dot = R * gamma_dot * sin(alpha)

which is what makes A the natural point for all tracking geometry. The
error-polar chart (e, theta, psi) expresses A relative to a target point;
the line chart expresses A relative to a directed segment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import GeneralizedState
from .params import RobotParams

__all__ = [
    "DegenerateLineError",
    "ContactPoint",
    "PolarView",
    "LineGeometry",
    "wrap_to_pi",
    "rolling_velocity",
    "contact_point",
    "contact_velocity",
    "polar_view",
    "polar_rates",
    "line_geometry",
]

# Below this target distance the polar chart degenerates (1/e blows up);
# we switch to the convention e = 0, psi = 0.
EPS_DISTANCE = 1e-6

# Below this distance from the segment start the bearing theta is undefined;
# the convention theta = phi keeps the switching product well defined.
EPS_RADIUS = 1e-9


class DegenerateLineError(ValueError):
    """Raised when a tracking segment has coincident endpoints."""


@dataclass(frozen=True)
class ContactPoint:
    """Ground coordinates of the wheel's contact point (m)."""

    x_a: float
    y_a: float


@dataclass(frozen=True)
class PolarView:
    """Error-polar coordinates of the contact point relative to a target.

    e: distance from contact point to target, >= 0.
    theta: inertial bearing of the contact point as seen from the target.
    psi: theta - alpha, wrapped to (-pi, pi]. psi = 0 means the wheel points
        straight away from the target, so backward rolling approaches it.
    At e = 0 the chart is replaced by the convention theta = alpha, psi = 0.
    """

    e: float
    theta: float
    psi: float


@dataclass(frozen=True)
class LineGeometry:
    """Geometry of the contact point relative to a directed segment.

    r: distance from segment start to the contact point.
    e: unsigned distance to the infinite line carrying the segment (e <= r).
    d: distance from the contact point to the segment end.
    theta: bearing of the contact point from the segment start.
    phi: bearing of the segment end from the segment start.
    p: heading-projection overshoot, r*cos(theta - alpha) -
       ell*cos(phi - alpha): how far the contact point sits past the
       segment end when both are projected onto the current heading.
    ell: segment length.
    """

    r: float
    e: float
    d: float
    theta: float
    phi: float
    p: float
    ell: float


def wrap_to_pi(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    return math.pi - (math.pi - angle) % (2.0 * math.pi)


def rolling_velocity(
    state: GeneralizedState, params: RobotParams
) -> tuple[float, float]:
    """Ground velocity (X_dot, Y_dot) of the wheel-center projection.

    These are the first-order rolling constraints: linear in the rates,
    mixing the rolling, steering, and lean motions.
    """
    R = params.R
    sa, ca = math.sin(state.alpha), math.cos(state.alpha)
    sb, cb = math.sin(state.beta), math.cos(state.beta)
    ad, bd, gd = state.alpha_dot, state.beta_dot, state.gamma_dot
    x_dot = R * (gd * ca + ad * ca * cb - bd * sa * sb)
    y_dot = R * (gd * sa + ad * sa * cb + bd * ca * sb)
    return (x_dot, y_dot)


def contact_point(
    X: float, Y: float, alpha: float, beta: float, params: RobotParams
) -> ContactPoint:
    """Contact point beneath the wheel given the center projection.

    The offsets are R*cos(beta) resolved along the heading normal; the two
    components carry opposite signs so that differentiating this map under
    the rolling constraints collapses to the pure-heading contact velocity.
    An upright wheel (beta = pi/2) has its contact directly under the center.
    """
    R = params.R
    cb = math.cos(beta)
    x_a = X - R * math.sin(alpha) * cb
    y_a = Y + R * math.cos(alpha) * cb
    return ContactPoint(x_a=x_a, y_a=y_a)


def contact_velocity(
    alpha: float, gamma_dot: float, params: RobotParams
) -> tuple[float, float]:
    """Velocity of the contact point: speed R*|gamma_dot| along the heading."""
    v = params.R * gamma_dot
    return (v * math.cos(alpha), v * math.sin(alpha))


def polar_view(
    a: ContactPoint, alpha: float, target: tuple[float, float] = (0.0, 0.0)
) -> PolarView:
    """Error-polar chart of the contact point about a target point."""
    dx = a.x_a - target[0]
    dy = a.y_a - target[1]
    e = math.hypot(dx, dy)
    if e < EPS_DISTANCE:
        return PolarView(e=0.0, theta=wrap_to_pi(alpha), psi=0.0)
    theta = math.atan2(dy, dx)
    return PolarView(e=e, theta=theta, psi=wrap_to_pi(theta - alpha))


def polar_rates(
    pv: PolarView, u_alpha: float, u_gamma: float, params: RobotParams
) -> tuple[float, float]:
    """Time derivatives (e_dot, psi_dot) under rates (u_alpha, u_gamma).

    e_dot = R*u_gamma*cos(psi); psi_dot = -u_alpha - R*u_gamma*sin(psi)/e.
    At the chart floor the 1/e term is dropped per the e = 0 convention.
    """
    R = params.R
    e_dot = R * u_gamma * math.cos(pv.psi)
    if pv.e < EPS_DISTANCE:
        return (e_dot, -u_alpha)
    psi_dot = -u_alpha - R * u_gamma * math.sin(pv.psi) / pv.e
    return (e_dot, psi_dot)


def line_geometry(
    a: ContactPoint,
    alpha: float,
    second_point: tuple[float, float],
    origin: tuple[float, float] = (0.0, 0.0),
) -> LineGeometry:
    """Geometry of the contact point relative to the segment origin -> second_point.

    All quantities are evaluated in the global frame; chained segments just
    pass a different origin rather than re-basing coordinates. Raises
    DegenerateLineError when the segment endpoints coincide.
    """
    ex = second_point[0] - origin[0]
    ey = second_point[1] - origin[1]
    ell = math.hypot(ex, ey)
    if ell < EPS_RADIUS:
        raise DegenerateLineError(
            f"segment endpoints {origin} and {second_point} coincide"
        )
    phi = math.atan2(ey, ex)
    rx = a.x_a - origin[0]
    ry = a.y_a - origin[1]
    r = math.hypot(rx, ry)
    theta = math.atan2(ry, rx) if r > EPS_RADIUS else phi
    e = r * abs(math.sin(phi - theta))
    d = math.hypot(a.x_a - second_point[0], a.y_a - second_point[1])
    p = r * math.cos(theta - alpha) - ell * math.cos(phi - alpha)
    return LineGeometry(r=r, e=e, d=d, theta=theta, phi=phi, p=p, ell=ell)
