"""Equations of motion for the wheel robot.

The configuration is the angle triple q = (alpha, beta, gamma): steering,
lean, rolling. The model exists in three equivalent layers:

* full form: M(q) q_ddot = N(q, q_dot) + B u, with the 3x3 inertia matrix M,
  generalized-force vector N, and motor torques u = (u1, u2) acting on the
  steering and rolling axes (the lean axis is unactuated),
* cancelled form: torques (u3, u4) after the nonlinear steering/rolling
  force terms N1, N3 are cancelled,
* decoupled form: commanded accelerations (u5, u6) with alpha_ddot = u5 and
  gamma_ddot = u6 exactly.

The lean equation is the same in all layers because lean is unactuated:

    beta_ddot = -Gm*cos(beta) - Im*cos(beta)*sin(beta)*alpha_dot**2
                - Jm*sin(beta)*alpha_dot*gamma_dot

with the reduced coefficients (Gm, Im, Jm) from RobotParams. This is a
second-order nonholonomic constraint: it restricts accelerations and cannot
be integrated into a configuration constraint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .params import FrictionParams, RobotParams

__all__ = [
    "DegenerateLeanError",
    "GeneralizedState",
    "InertiaEntries",
    "TorqueInput",
    "inertia_matrix",
    "nonlinear_terms",
    "reduced_params",
    "cancel_and_decouple",
    "recover_decoupled",
    "reduced_accel",
    "lean_accel",
    "beta_jerk_coeffs",
    "beta_jerk_coeffs_variant",
    "friction_torque",
    "full_accel",
]


class DegenerateLeanError(ValueError):
    """Raised when the lean angle sits on the flat-wheel boundary {0, pi}.

    There the steering/rolling inertia block is singular (its determinant
    carries a sin(beta)**2 factor) and the decoupling maps do not exist.
    """


@dataclass(frozen=True)
class GeneralizedState:
    """Angles, rates, and the cached lean acceleration.

    beta_ddot is not an independent coordinate: whenever present it must
    equal lean_accel(beta, alpha_dot, gamma_dot, params). It is cached
    because the balance law and the balance certificate both consume it.
    """

    alpha: float = 0.0
    beta: float = math.pi / 2
    gamma: float = 0.0
    alpha_dot: float = 0.0
    beta_dot: float = 0.0
    gamma_dot: float = 0.0
    beta_ddot: float | None = None


@dataclass(frozen=True)
class InertiaEntries:
    """Nonzero entries of the symmetric inertia matrix plus its key minor.

    M_rho = M11*M33 - M13**2 is the determinant of the steering/rolling
    block; it must stay positive for the decoupling maps to exist.
    """

    M11: float
    M13: float
    M22: float
    M33: float
    M_rho: float


@dataclass(frozen=True)
class TorqueInput:
    """One control input expressed in up to three torque layers.

    Layers: motor torques (u1, u2), cancelled torques (u3, u4), decoupled
    accelerations (u5, u6). Any populated layer determines the others at a
    given state; `completed` fills them in explicitly so the layer maps can
    be round-trip tested.
    """

    u1: float | None = None
    u2: float | None = None
    u3: float | None = None
    u4: float | None = None
    u5: float | None = None
    u6: float | None = None

    @classmethod
    def from_decoupled(cls, u5: float, u6: float) -> "TorqueInput":
        return cls(u5=u5, u6=u6)

    @classmethod
    def from_motor(cls, u1: float, u2: float) -> "TorqueInput":
        return cls(u1=u1, u2=u2)

    def completed(self, state: GeneralizedState, params: RobotParams) -> "TorqueInput":
        """Return a copy with all three layers populated.

        Exactly one layer must be present; the others are derived from the
        inertia entries and nonlinear terms at `state`.
        """
        ent = inertia_matrix(state, params)
        n1, _, n3 = nonlinear_terms(state, params)
        have_motor = self.u1 is not None and self.u2 is not None
        have_cancelled = self.u3 is not None and self.u4 is not None
        have_decoupled = self.u5 is not None and self.u6 is not None
        if have_decoupled:
            u3 = ent.M11 * self.u5 + ent.M13 * self.u6
            u4 = ent.M13 * self.u5 + ent.M33 * self.u6
            return replace(self, u1=u3 - n1, u2=u4 - n3, u3=u3, u4=u4)
        if have_motor:
            u3 = self.u1 + n1
            u4 = self.u2 + n3
        elif have_cancelled:
            u3, u4 = self.u3, self.u4
        else:
            raise ValueError("TorqueInput has no fully populated layer")
        u5 = (ent.M33 * u3 - ent.M13 * u4) / ent.M_rho
        u6 = (-ent.M13 * u3 + ent.M11 * u4) / ent.M_rho
        return replace(self, u1=u3 - n1, u2=u4 - n3, u3=u3, u4=u4, u5=u5, u6=u6)


def _require_open_lean(beta: float) -> None:
    if not 0.0 < beta < math.pi:
        raise DegenerateLeanError(
            f"lean angle {beta} outside (0, pi): wheel is flat on the ground"
        )


def inertia_matrix(state: GeneralizedState, params: RobotParams) -> InertiaEntries:
    """Evaluate the inertia entries at the state's lean angle.

    Only beta enters. M31 equals M13 by symmetry and is not stored.
    """
    _require_open_lean(state.beta)
    m, R, Ix = params.m, params.R, params.Ix
    sb, cb = math.sin(state.beta), math.cos(state.beta)
    big = 2.0 * Ix + m * R**2
    M11 = Ix * sb**2 + big * cb**2
    M13 = big * cb
    M33 = big
    M_rho = M11 * M33 - M13**2
    return InertiaEntries(M11=M11, M13=M13, M22=params.M22, M33=M33, M_rho=M_rho)


def nonlinear_terms(
    state: GeneralizedState, params: RobotParams
) -> tuple[float, float, float]:
    """Generalized forces on the right-hand side of M q_ddot = N + B u.

    N2 bundles gravity, the gyroscopic steering/rolling coupling, and the
    centrifugal term (quadratic in the steering rate). N1 and N3 are not
    the plain Lagrangian Coriolis terms: the rolling contact reshuffles
    them, but the combination still conserves energy when u = 0.
    """
    m, R, Ix, g = params.m, params.R, params.Ix, params.g
    sb, cb = math.sin(state.beta), math.cos(state.beta)
    s2b = math.sin(2.0 * state.beta)
    ad, bd, gd = state.alpha_dot, state.beta_dot, state.gamma_dot
    disk = Ix + m * R**2
    big = 2.0 * Ix + m * R**2
    n1 = disk * s2b * ad * bd + 2.0 * Ix * sb * bd * gd
    n2 = -m * g * R * cb - big * sb * ad * gd - disk * cb * sb * ad**2
    n3 = 2.0 * disk * sb * ad * bd
    return (n1, n2, n3)


def reduced_params(params: RobotParams) -> tuple[float, float, float]:
    """Return the reduced lean-dynamics coefficients (Gm, Im, Jm)."""
    return params.reduced()


def cancel_and_decouple(
    u5: float, u6: float, state: GeneralizedState, params: RobotParams
) -> tuple[float, float]:
    """Map commanded accelerations (u5, u6) to motor torques (u1, u2).

    Applying the result through full_accel at the same state reproduces
    alpha_ddot = u5 and gamma_ddot = u6 exactly.
    """
    filled = TorqueInput.from_decoupled(u5, u6).completed(state, params)
    return (filled.u1, filled.u2)


def recover_decoupled(
    u1: float, u2: float, state: GeneralizedState, params: RobotParams
) -> tuple[float, float]:
    """Inverse of cancel_and_decouple at the same state."""
    filled = TorqueInput.from_motor(u1, u2).completed(state, params)
    return (filled.u5, filled.u6)


def lean_accel(
    beta: float, alpha_dot: float, gamma_dot: float, params: RobotParams
) -> float:
    """Lean acceleration as a function of lean angle and the two rates.

    Valid in every layer and in both simulation modes; in velocity mode the
    rates are the commanded values.
    """
    Gm, Im, Jm = params.reduced()
    sb, cb = math.sin(beta), math.cos(beta)
    return -Gm * cb - Im * cb * sb * alpha_dot**2 - Jm * sb * alpha_dot * gamma_dot


def reduced_accel(
    state: GeneralizedState, u5: float, u6: float, params: RobotParams
) -> tuple[float, float, float]:
    """Accelerations in the decoupled layer: (u5, lean_accel, u6)."""
    _require_open_lean(state.beta)
    bdd = lean_accel(state.beta, state.alpha_dot, state.gamma_dot, params)
    return (u5, bdd, u6)


def beta_jerk_coeffs(
    state: GeneralizedState, params: RobotParams
) -> tuple[float, float, float]:
    """Coefficients (h1, h2, h3) of the lean jerk.

    Differentiating the lean equation in time and substituting
    alpha_ddot = u5, gamma_ddot = u6 gives

        beta_jerk = h1*beta_dot + h2*u5 + h3*u6

    so h1, h2, h3 are the partials of lean_accel with respect to beta,
    alpha_dot, gamma_dot. h3 vanishes with the steering rate, which is why
    the balance law needs alpha_dot bounded away from zero.
    """
    _require_open_lean(state.beta)
    Gm, Im, Jm = params.reduced()
    sb, cb = math.sin(state.beta), math.cos(state.beta)
    s2b, c2b = math.sin(2.0 * state.beta), math.cos(2.0 * state.beta)
    ad, gd = state.alpha_dot, state.gamma_dot
    h1 = Gm * sb - Im * c2b * ad**2 - Jm * cb * ad * gd
    h2 = -Im * s2b * ad - Jm * sb * gd
    h3 = -Jm * sb * ad
    return (h1, h2, h3)


def beta_jerk_coeffs_variant(
    state: GeneralizedState, params: RobotParams
) -> tuple[float, float, float]:
    """Deliberately wrong jerk coefficients kept as a negative control.

    Relative to beta_jerk_coeffs this drops the gyroscopic term from h1 and
    squares the steering rate in h3. The finite-difference validation in
    the test suite must reject these coefficients while accepting the
    correct ones; a validation too loose to tell them apart would be
    meaningless.
    """
    _require_open_lean(state.beta)
    Gm, Im, Jm = params.reduced()
    sb = math.sin(state.beta)
    s2b, c2b = math.sin(2.0 * state.beta), math.cos(2.0 * state.beta)
    ad, gd = state.alpha_dot, state.gamma_dot
    h1 = Gm * sb - Im * c2b * ad**2
    h2 = -Im * s2b * ad - Jm * sb * gd
    h3 = -Jm * sb * ad**2
    return (h1, h2, h3)


def friction_torque(
    q_dot: tuple[float, float, float], fp: FrictionParams
) -> tuple[float, float, float]:
    """Joint friction torque for each axis at the given rates.

    Viscous term plus a dynamic level that relaxes exponentially from the
    static level as the rate grows. sgn(0) is taken as 0 so the model is
    quiescent at rest; this is the resistive magnitude, the simulator
    subtracts it from the motor torques.
    """
    out = []
    for v, mv, md, ms in zip(q_dot, fp.mu_v, fp.mu_d, fp.mu_s):
        if v > 0.0:
            s = 1.0
        elif v < 0.0:
            s = -1.0
        else:
            s = 0.0
        level = md + (ms - md) * math.exp(-abs(v) / fp.D)
        out.append(mv * v + level * s)
    return (out[0], out[1], out[2])


def full_accel(
    state: GeneralizedState,
    u1: float,
    u2: float,
    params: RobotParams,
    friction: FrictionParams | None = None,
) -> tuple[float, float, float]:
    """Solve the full equations of motion for (alpha_ddot, beta_ddot, gamma_ddot).

    u1 and u2 are motor torques on the steering and rolling axes. Friction,
    when given, is subtracted from those two motor torques only: it models
    the actuated joints, and the unactuated lean axis has no joint to rub.
    """
    ent = inertia_matrix(state, params)
    n1, n2, n3 = nonlinear_terms(state, params)
    if friction is not None:
        f = friction_torque((state.alpha_dot, state.beta_dot, state.gamma_dot), friction)
        u1 = u1 - f[0]
        u2 = u2 - f[2]
    rhs1 = n1 + u1
    rhs3 = n3 + u2
    alpha_ddot = (ent.M33 * rhs1 - ent.M13 * rhs3) / ent.M_rho
    gamma_ddot = (-ent.M13 * rhs1 + ent.M11 * rhs3) / ent.M_rho
    beta_ddot = n2 / ent.M22
    return (alpha_ddot, beta_ddot, gamma_ddot)
