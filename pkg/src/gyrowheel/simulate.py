"""Deterministic fixed-step simulation of the wheel's closed loops.

One integrator, two modes:

* torque mode: the state carries all three angle rates and the command is
  the decoupled acceleration pair (u5, u6). With friction disabled the
  decoupling is taken as exact and the integrator works directly at the
  acceleration layer. With friction enabled the command is converted to
  motor torques at the start of each step and the full inertia/force
  equations are integrated, friction subtracted on the motor axes.
* velocity mode: the command is the rate pair (u_alpha, u_gamma), applied
  instantaneously (or through an optional first-order actuator lag); the
  integrated state is (angles, lean rate, contact point).

Commands are held constant across each RK4 step (zero-order hold), computed
from the state at the step start. Every step boundary emits one trajectory
row; terminal events truncate the run at the row where they fire, so the
last row's time is the event time. Runs are bitwise deterministic: there is
no randomness, no wall-clock coupling, and no platform-dependent branching
in the numeric path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .controllers import (
    DEFAULT_ALPHA_DOT_FLOOR,
    BalanceController,
    BalanceGains,
    LineController,
    LineGains,
    PositionController,
    PositionGains,
    sigma,
)
from .dynamics import GeneralizedState, cancel_and_decouple, full_accel, lean_accel
from .kinematics import EPS_DISTANCE, ContactPoint, line_geometry
from .lyapunov import lean_tracking_value
from .params import FrictionParams, RobotParams

__all__ = [
    "InadmissibleStateError",
    "NonFiniteStateError",
    "UnknownChannelError",
    "WheelState",
    "ControlCommand",
    "Thresholds",
    "SimConfig",
    "Event",
    "Trajectory",
    "CHANNEL_INFO",
    "rk4_step",
    "step",
    "detect_events",
    "run_closed_loop",
    "run_lean_subsystem",
    "KINDS",
    "MODES",
]

KINDS = ("balance", "point_to_point", "line", "corridor")
MODES = ("torque", "velocity")

# Channel registry: name -> (unit, description). Which channels a run emits
# depends on its kind; see Trajectory.names.
CHANNEL_INFO = {
    "t": ("s", "simulation time"),
    "alpha": ("rad", "steering angle (heading of the contact line)"),
    "beta": ("rad", "lean angle; pi/2 is upright"),
    "gamma": ("rad", "rolling angle"),
    "alpha_dot": ("rad/s", "steering rate"),
    "beta_dot": ("rad/s", "lean rate"),
    "gamma_dot": ("rad/s", "rolling rate"),
    "beta_ddot": ("rad/s^2", "lean acceleration, recomputed from the dynamics"),
    "x_a": ("m", "contact point x"),
    "y_a": ("m", "contact point y"),
    "u_steer": ("rad/s^2 | rad/s", "steering command: u5 (torque mode) or u_alpha (velocity mode)"),
    "u_drive": ("rad/s^2 | rad/s", "rolling command: u6 (torque mode) or u_gamma (velocity mode)"),
    "V": ("-", "certificate of the active controller"),
    "V1": ("-", "lean-tracking certificate (tracking runs)"),
    "e": ("m", "distance to the target point (point-to-point) or to the tracked line (line runs)"),
    "psi": ("rad", "heading error theta - alpha (point-to-point runs)"),
    "d": ("m", "distance to the active segment end (line runs)"),
    "p": ("m", "heading-projection overshoot past the segment end (line runs)"),
    "segment": ("-", "active segment index (line runs)"),
}

_BASE_CHANNELS = (
    "t", "alpha", "beta", "gamma", "alpha_dot", "beta_dot", "gamma_dot",
    "beta_ddot", "x_a", "y_a", "u_steer", "u_drive", "V",
)
_KIND_CHANNELS = {
    "balance": _BASE_CHANNELS,
    "point_to_point": _BASE_CHANNELS + ("V1", "e", "psi"),
    "line": _BASE_CHANNELS + ("V1", "e", "d", "p", "segment"),
    "corridor": _BASE_CHANNELS + ("V1", "e", "d", "p", "segment"),
}


class InadmissibleStateError(ValueError):
    """Initial state violates the active controller's admissibility predicate."""


class NonFiniteStateError(RuntimeError):
    """Integration produced a NaN or infinity."""


class UnknownChannelError(KeyError):
    """Requested trajectory channel does not exist in this run."""

    def __init__(self, name: str, valid: tuple[str, ...]):
        super().__init__(name)
        self.name = name
        self.valid = valid

    def __str__(self) -> str:
        return f"unknown channel {self.name!r}; valid channels: {', '.join(self.valid)}"


@dataclass(frozen=True)
class WheelState(GeneralizedState):
    """Generalized state plus the ground contact point.

    In velocity mode alpha_dot and gamma_dot hold the rate commands in
    effect from this sample onward.
    """

    x_a: float = 0.0
    y_a: float = 0.0

    def contact(self) -> ContactPoint:
        return ContactPoint(x_a=self.x_a, y_a=self.y_a)


@dataclass(frozen=True)
class ControlCommand:
    """A held command: (u5, u6) in torque mode, (u_alpha, u_gamma) in velocity mode."""

    mode: str
    steer: float
    drive: float

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")


@dataclass(frozen=True)
class Thresholds:
    """Event thresholds. All are engineering choices, overridable per scenario."""

    topple_margin: float = 0.01
    alpha_dot_floor: float = DEFAULT_ALPHA_DOT_FLOOR
    lean: float = 1e-4
    lean_rate: float = 1e-4
    steer_rate: float = 1e-3
    roll_rate: float = 1e-3
    distance: float = 0.05
    line_offset: float = 0.02
    advance_radius: float = 0.05
    start_radius: float = 0.5
    start_lean: float = 0.3

    def __post_init__(self) -> None:
        for name in (
            "topple_margin", "lean", "lean_rate", "steer_rate", "roll_rate",
            "distance", "line_offset", "advance_radius", "start_radius", "start_lean",
        ):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"threshold {name} must be positive")
        if self.alpha_dot_floor < 0.0:
            raise ValueError("alpha_dot_floor must be non-negative")
        if self.topple_margin >= math.pi / 2:
            raise ValueError("topple_margin must be below pi/2")


@dataclass(frozen=True)
class Event:
    kind: str
    time: float
    detail: str = ""


@dataclass(frozen=True)
class SimConfig:
    """Everything one closed-loop run needs.

    kind selects the controller family; mode is the actuation layer and is
    dictated by the kind (balance works at the torque layer, the tracking
    controllers command rates).
    """

    kind: str
    dt: float
    t_end: float
    initial: WheelState
    gains: object
    mode: str = ""
    params: RobotParams = RobotParams()
    target: tuple[float, float] = (0.0, 0.0)
    waypoints: tuple[tuple[float, float], ...] = ()
    friction: FrictionParams | None = None
    thresholds: Thresholds = Thresholds()
    stop_on_converged: bool = True
    actuator_lag: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        required_mode = "torque" if self.kind == "balance" else "velocity"
        if self.mode == "":
            object.__setattr__(self, "mode", required_mode)
        elif self.mode != required_mode:
            raise ValueError(
                f"kind {self.kind!r} runs in {required_mode} mode, got {self.mode!r}"
            )
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < self.dt:
            raise ValueError(f"t_end must be at least dt, got {self.t_end}")
        expected_gains = {
            "balance": BalanceGains,
            "point_to_point": PositionGains,
            "line": LineGains,
            "corridor": LineGains,
        }[self.kind]
        if not isinstance(self.gains, expected_gains):
            raise ValueError(
                f"kind {self.kind!r} needs {expected_gains.__name__}, "
                f"got {type(self.gains).__name__}"
            )
        if self.kind in ("line", "corridor") and len(self.waypoints) < 2:
            raise ValueError("line and corridor runs need at least two waypoints")
        if self.friction is not None and self.mode != "torque":
            raise ValueError("friction is a joint-torque effect; torque mode only")
        if self.actuator_lag < 0.0:
            raise ValueError("actuator_lag must be non-negative")
        if self.actuator_lag > 0.0 and self.mode != "velocity":
            raise ValueError("actuator lag applies to velocity mode only")

    @property
    def n_steps(self) -> int:
        # small slack so t_end = k*dt is not lost to representation error
        return int(math.floor(self.t_end / self.dt + 1e-9))


class Trajectory:
    """Columnar record of one run: channel arrays, events, final state.

    Built by run_closed_loop and treated as immutable afterwards.
    """

    def __init__(self, kind: str, mode: str):
        self.kind = kind
        self.mode = mode
        self.names: tuple[str, ...] = _KIND_CHANNELS[kind]
        self.channels: dict[str, list[float]] = {n: [] for n in self.names}
        self.events: list[Event] = []
        self.final_state: WheelState | None = None

    @property
    def row_count(self) -> int:
        return len(self.channels["t"])

    @property
    def times(self) -> list[float]:
        return self.channels["t"]

    def channel(self, name: str) -> list[float]:
        try:
            return self.channels[name]
        except KeyError:
            raise UnknownChannelError(name, self.names) from None

    @property
    def terminal_event(self) -> Event | None:
        return self.events[-1] if self.events else None

    @property
    def converged(self) -> bool:
        return any(ev.kind == "Converged" for ev in self.events)


def _finite(values) -> bool:
    return all(map(math.isfinite, values))


def _rhs_torque_reduced(y, u5, u6, params):
    a, b, g, ad, bd, gd, xa, ya = y
    R = params.R
    return (
        ad, bd, gd,
        u5,
        lean_accel(b, ad, gd, params),
        u6,
        R * gd * math.cos(a),
        R * gd * math.sin(a),
    )


def _rhs_torque_full(y, u1, u2, params, friction):
    a, b, g, ad, bd, gd, xa, ya = y
    R = params.R
    gs = GeneralizedState(
        alpha=a, beta=b, gamma=g, alpha_dot=ad, beta_dot=bd, gamma_dot=gd
    )
    add, bdd, gdd = full_accel(gs, u1, u2, params, friction)
    return (
        ad, bd, gd,
        add, bdd, gdd,
        R * gd * math.cos(a),
        R * gd * math.sin(a),
    )


def _rhs_velocity(y, ua, ug, params):
    a, b, g, bd, xa, ya = y
    R = params.R
    return (
        ua, bd, ug,
        lean_accel(b, ua, ug, params),
        R * ug * math.cos(a),
        R * ug * math.sin(a),
    )


def _rhs_velocity_lag(y, ua, ug, tau, params):
    a, b, g, bd, xa, ya, za, zg = y
    R = params.R
    return (
        za, bd, zg,
        lean_accel(b, za, zg, params),
        R * zg * math.cos(a),
        R * zg * math.sin(a),
        (ua - za) / tau,
        (ug - zg) / tau,
    )


def _rk4(y, f, dt):
    k1 = f(y)
    y2 = tuple(yi + 0.5 * dt * ki for yi, ki in zip(y, k1))
    k2 = f(y2)
    y3 = tuple(yi + 0.5 * dt * ki for yi, ki in zip(y, k2))
    k3 = f(y3)
    y4 = tuple(yi + dt * ki for yi, ki in zip(y, k3))
    k4 = f(y4)
    return tuple(
        yi + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    )


def rk4_step(
    state: WheelState,
    command: ControlCommand,
    params: RobotParams,
    dt: float,
    friction: FrictionParams | None = None,
) -> WheelState:
    """Advance one RK4 step with the command held constant.

    dt may be negative (backward integration, used by finite-difference
    oracles). Raises NonFiniteStateError if the step produces a NaN or
    infinity.
    """
    if command.mode == "torque":
        y = (
            state.alpha, state.beta, state.gamma,
            state.alpha_dot, state.beta_dot, state.gamma_dot,
            state.x_a, state.y_a,
        )
        if friction is None:
            f = lambda yy: _rhs_torque_reduced(yy, command.steer, command.drive, params)
        else:
            u1, u2 = cancel_and_decouple(command.steer, command.drive, state, params)
            f = lambda yy: _rhs_torque_full(yy, u1, u2, params, friction)
        out = _rk4(y, f, dt)
        if not _finite(out):
            raise NonFiniteStateError(f"non-finite state after step from t-state {y}")
        a, b, g, ad, bd, gd, xa, ya = out
        return WheelState(
            alpha=a, beta=b, gamma=g, alpha_dot=ad, beta_dot=bd, gamma_dot=gd,
            beta_ddot=lean_accel(b, ad, gd, params), x_a=xa, y_a=ya,
        )
    # velocity mode: rates are the held command
    ua, ug = command.steer, command.drive
    y = (state.alpha, state.beta, state.gamma, state.beta_dot, state.x_a, state.y_a)
    out = _rk4(y, lambda yy: _rhs_velocity(yy, ua, ug, params), dt)
    if not _finite(out):
        raise NonFiniteStateError(f"non-finite state after step from t-state {y}")
    a, b, g, bd, xa, ya = out
    return WheelState(
        alpha=a, beta=b, gamma=g, alpha_dot=ua, beta_dot=bd, gamma_dot=ug,
        beta_ddot=lean_accel(b, ua, ug, params), x_a=xa, y_a=ya,
    )


def step(state: WheelState, command: ControlCommand, cfg: SimConfig) -> WheelState:
    """One zero-order-hold RK4 step under a config (its dt, params, friction)."""
    if command.mode != cfg.mode:
        raise ValueError(f"command mode {command.mode!r} does not match run mode {cfg.mode!r}")
    friction = cfg.friction if cfg.mode == "torque" else None
    return rk4_step(state, command, cfg.params, cfg.dt, friction)


def _build_controller(cfg: SimConfig):
    if cfg.kind == "balance":
        return BalanceController(
            cfg.gains, cfg.params, cfg.initial.alpha_dot,
            alpha_dot_floor=cfg.thresholds.alpha_dot_floor,
        )
    if cfg.kind == "point_to_point":
        return PositionController(cfg.gains, cfg.params, cfg.target)
    return LineController(cfg.gains, cfg.params, cfg.waypoints)


def _admissibility_violation(cfg: SimConfig, state: WheelState | None = None) -> str | None:
    """Name the violated initial-domain predicate, or None if admissible."""
    st = cfg.initial if state is None else state
    thr = cfg.thresholds
    if _toppled(st.beta, thr):
        return (
            f"initial lean {st.beta:.6f} rad outside the topple margin window "
            f"({thr.topple_margin}, pi - {thr.topple_margin})"
        )
    if cfg.kind == "balance":
        a = st.beta - math.pi / 2.0
        b = st.beta_dot
        c = lean_accel(st.beta, st.alpha_dot, st.gamma_dot, cfg.params)
        s = sigma(a, b, c)
        if s >= math.pi / 2.0:
            return (
                f"sigma(a, b, c) = {s:.6f} >= pi/2 for initial lean data "
                f"({a:.6f}, {b:.6f}, {c:.6f})"
            )
        if abs(st.alpha_dot) < thr.alpha_dot_floor:
            return (
                f"initial |alpha_dot| = {abs(st.alpha_dot):.3e} below the "
                f"singularity floor {thr.alpha_dot_floor:.3e}"
            )
        return None
    if cfg.kind == "point_to_point":
        e0 = math.hypot(st.x_a - cfg.target[0], st.y_a - cfg.target[1])
        if e0 <= EPS_DISTANCE:
            return f"initial target distance e = {e0:.3e} is not positive"
        v1 = lean_tracking_value(st.beta, st.beta_dot)
        if math.sqrt(v1) >= math.pi / 2.0:
            return (
                f"initial lean data outside the tracking domain: "
                f"sqrt(V1) = {math.sqrt(v1):.6f} >= pi/2"
            )
        return None
    # line / corridor
    x0, y0 = cfg.waypoints[0]
    r0 = math.hypot(st.x_a - x0, st.y_a - y0)
    if r0 > thr.start_radius:
        return (
            f"initial distance {r0:.4f} m from the segment start exceeds "
            f"the admissible radius {thr.start_radius} m"
        )
    if abs(st.beta - math.pi / 2.0) > thr.start_lean:
        return (
            f"initial lean offset {abs(st.beta - math.pi / 2.0):.4f} rad exceeds "
            f"the admissible lean {thr.start_lean} rad"
        )
    return None


def _toppled(beta: float, thr: Thresholds) -> bool:
    return not thr.topple_margin < beta < math.pi - thr.topple_margin


def _converged_detail(cfg: SimConfig, state: WheelState, segment: int) -> str | None:
    """Convergence predicate; returns a detail string when satisfied."""
    thr = cfg.thresholds
    if cfg.kind == "balance":
        ok = (
            abs(state.beta - math.pi / 2.0) <= thr.lean
            and abs(state.beta_dot) <= thr.lean_rate
            and abs(state.alpha_dot) <= thr.steer_rate
            and abs(state.gamma_dot) <= thr.roll_rate
        )
        if ok:
            return "lean, lean rate, steering rate, rolling rate all within thresholds"
        return None
    if cfg.kind == "point_to_point":
        e = math.hypot(state.x_a - cfg.target[0], state.y_a - cfg.target[1])
        if e < thr.distance:
            return f"e = {e:.4f} m < {thr.distance} m"
        return None
    # line / corridor: only the last segment can converge the run
    if segment != len(cfg.waypoints) - 2:
        return None
    lg = line_geometry(
        state.contact(), state.alpha, cfg.waypoints[segment + 1],
        origin=cfg.waypoints[segment],
    )
    if lg.d < thr.distance and lg.e < thr.line_offset:
        return f"d = {lg.d:.4f} m and line distance e = {lg.e:.4f} m within thresholds"
    return None


def detect_events(state: WheelState, cfg: SimConfig, t: float = 0.0, segment: int = 0) -> list[Event]:
    """Evaluate all event predicates at one state. Pure and idempotent."""
    events: list[Event] = []
    if _toppled(state.beta, cfg.thresholds):
        events.append(Event("Toppled", t, f"beta = {state.beta:.6f} rad"))
    detail = _converged_detail(cfg, state, segment)
    if detail is not None:
        events.append(Event("Converged", t, detail))
    if cfg.mode == "torque" and abs(state.alpha_dot) < cfg.thresholds.alpha_dot_floor:
        events.append(
            Event(
                "SingularSteering", t,
                f"|alpha_dot| = {abs(state.alpha_dot):.3e} below floor "
                f"{cfg.thresholds.alpha_dot_floor:.3e}",
            )
        )
    violated = _admissibility_violation(cfg, state)
    if violated is not None:
        events.append(Event("DomainExit", t, violated))
    return events


def run_closed_loop(cfg: SimConfig) -> Trajectory:
    """Integrate the configured closed loop and record every step.

    Raises InadmissibleStateError before any integration if the initial
    state violates the controller's domain predicate. Terminal events
    (Toppled, SingularSteering, and Converged when stop_on_converged is
    set) truncate the run; otherwise it ends at the horizon.
    """
    violated = _admissibility_violation(cfg)
    if violated is not None:
        raise InadmissibleStateError(violated)

    controller = _build_controller(cfg)
    params = cfg.params
    thr = cfg.thresholds
    dt = cfg.dt
    n = cfg.n_steps
    traj = Trajectory(cfg.kind, cfg.mode)
    ch = traj.channels
    col_t = ch["t"]

    state = cfg.initial
    if cfg.mode == "torque":
        state = replace(
            state,
            beta_ddot=lean_accel(state.beta, state.alpha_dot, state.gamma_dot, params),
        )
    lag = None
    if cfg.actuator_lag > 0.0:
        lag = (state.alpha_dot, state.gamma_dot)

    segment = 0
    last_segment = len(cfg.waypoints) - 2 if cfg.waypoints else 0
    converged_seen = False

    def emit(t, st, cmd, extra):
        col_t.append(t)
        ch["alpha"].append(st.alpha)
        ch["beta"].append(st.beta)
        ch["gamma"].append(st.gamma)
        ch["alpha_dot"].append(st.alpha_dot)
        ch["beta_dot"].append(st.beta_dot)
        ch["gamma_dot"].append(st.gamma_dot)
        ch["beta_ddot"].append(st.beta_ddot)
        ch["x_a"].append(st.x_a)
        ch["y_a"].append(st.y_a)
        ch["u_steer"].append(cmd[0] if cmd else math.nan)
        ch["u_drive"].append(cmd[1] if cmd else math.nan)
        for name, value in extra.items():
            ch[name].append(value)

    for i in range(n + 1):
        t = i * dt
        # terminal checks that must precede command evaluation
        if _toppled(state.beta, thr):
            emit(t, state, None, _passive_channels(cfg, controller, state, segment))
            traj.events.append(Event("Toppled", t, f"beta = {state.beta:.6f} rad"))
            break
        if cfg.mode == "torque" and abs(state.alpha_dot) < thr.alpha_dot_floor:
            emit(t, state, None, _passive_channels(cfg, controller, state, segment))
            traj.events.append(
                Event(
                    "SingularSteering", t,
                    f"|alpha_dot| = {abs(state.alpha_dot):.3e} below floor "
                    f"{thr.alpha_dot_floor:.3e}",
                )
            )
            break

        # advance the corridor before computing the command for this row
        if cfg.kind in ("line", "corridor") and segment < last_segment:
            lg = line_geometry(
                state.contact(), state.alpha, cfg.waypoints[segment + 1],
                origin=cfg.waypoints[segment],
            )
            if lg.d < thr.advance_radius:
                segment += 1

        cmd, state = _command_and_state(cfg, controller, state, segment, lag)
        emit(t, state, cmd, _certificate_channels(cfg, controller, state, segment))

        detail = _converged_detail(cfg, state, segment)
        if detail is not None and not converged_seen:
            converged_seen = True
            traj.events.append(Event("Converged", t, detail))
            if cfg.stop_on_converged:
                break
        if i == n:
            break

        state, lag = _advance(cfg, state, cmd, lag)

    traj.final_state = state
    return traj


def _command_and_state(cfg, controller, state, segment, lag):
    """Compute the held command; in velocity mode also refresh the state's rates."""
    if cfg.kind == "balance":
        return controller.command(state), state
    if cfg.kind == "point_to_point":
        cmd = controller.command(state, state.contact())
    else:
        cmd = controller.command(state, state.contact(), segment)
    if lag is None:
        ua, ug = cmd
        state = replace(
            state,
            alpha_dot=ua,
            gamma_dot=ug,
            beta_ddot=lean_accel(state.beta, ua, ug, cfg.params),
        )
    else:
        za, zg = lag
        state = replace(
            state,
            alpha_dot=za,
            gamma_dot=zg,
            beta_ddot=lean_accel(state.beta, za, zg, cfg.params),
        )
    return cmd, state


def _certificate_channels(cfg, controller, state, segment) -> dict:
    if cfg.kind == "balance":
        return {"V": controller.certificate(state)}
    v1 = lean_tracking_value(state.beta, state.beta_dot)
    if cfg.kind == "point_to_point":
        pv = controller.view(state, state.contact())
        return {"V": v1 + 0.5 * pv.e**2, "V1": v1, "e": pv.e, "psi": pv.psi}
    lg = controller.geometry(state, state.contact(), segment)
    return {
        "V": v1 + 0.5 * (lg.e**2 + lg.d**2),
        "V1": v1,
        "e": lg.e,
        "d": lg.d,
        "p": lg.p,
        "segment": float(segment),
    }


def _passive_channels(cfg, controller, state, segment) -> dict:
    """Certificate channels for rows where no command was computed."""
    try:
        return _certificate_channels(cfg, controller, state, segment)
    except Exception:
        nan = math.nan
        names = set(_KIND_CHANNELS[cfg.kind]) - set(_BASE_CHANNELS)
        out = {name: nan for name in names}
        out["V"] = nan
        return out


def _advance(cfg, state, cmd, lag):
    """One integration step; returns the new state and actuator-lag filter state."""
    if lag is not None:
        tau = cfg.actuator_lag
        ua, ug = cmd
        y = (
            state.alpha, state.beta, state.gamma, state.beta_dot,
            state.x_a, state.y_a, lag[0], lag[1],
        )
        out = _rk4(y, lambda yy: _rhs_velocity_lag(yy, ua, ug, tau, cfg.params), cfg.dt)
        if not _finite(out):
            raise NonFiniteStateError("non-finite state during lagged velocity step")
        a, b, g, bd, xa, ya, za, zg = out
        new = WheelState(
            alpha=a, beta=b, gamma=g, alpha_dot=za, beta_dot=bd, gamma_dot=zg,
            beta_ddot=lean_accel(b, za, zg, cfg.params), x_a=xa, y_a=ya,
        )
        return new, (za, zg)
    mode_cmd = ControlCommand(cfg.mode, cmd[0], cmd[1])
    friction = cfg.friction if cfg.mode == "torque" else None
    return rk4_step(state, mode_cmd, cfg.params, cfg.dt, friction), None


def run_lean_subsystem(
    a: float,
    b: float,
    c: float,
    k1: float = 1.0,
    dt: float = 1e-3,
    t_end: float = 10.0,
) -> tuple[list[float], list[float], list[float], list[float]]:
    """Integrate the closed-loop lean-jerk subsystem x''' = -((2+k1)x + (3+2k1)x' + (2+k1)x'').

    This is the linear system the balance law imposes on the lean offset
    x = beta - pi/2; (a, b, c) are the initial (x, x', x''). Returns
    (times, x, x_dot, x_ddot). Used as the closed-form oracle target and
    for integrator order checks.
    """
    c0 = 2.0 + k1
    c1 = 3.0 + 2.0 * k1

    def f(y):
        x, xd, xdd = y
        return (xd, xdd, -(c0 * x + c1 * xd + c0 * xdd))

    n = int(math.floor(t_end / dt + 1e-9))
    times = [0.0]
    xs, xds, xdds = [a], [b], [c]
    y = (a, b, c)
    for i in range(n):
        y = _rk4(y, f, dt)
        times.append((i + 1) * dt)
        xs.append(y[0])
        xds.append(y[1])
        xdds.append(y[2])
    return times, xs, xds, xdds
