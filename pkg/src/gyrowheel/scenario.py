"""Scenario files: a strict YAML schema mapped onto SimConfig.

The schema is deliberately rigid. Unknown keys are rejected at every level
and gain constraints fail at parse time, so a typo'd experiment dies with a
diagnostic instead of silently running something else. parse and serialize
round-trip exactly: every number passes through untouched.

Top-level keys::

    name              optional str, defaults to the file stem
    kind              balance | point_to_point | line | corridor
    mode              optional; must match the kind (balance -> torque,
                      tracking kinds -> velocity)
    dt                step size, default 0.001
    t_end             horizon, required
    stop_on_converged optional bool, default true
    params            optional robot parameter overrides (m, R, Ix, g, M22)
    initial           initial state block, see below
    gains             gain block, see below
    target            {x, y}, point_to_point only
    waypoints         list of [x, y], line and corridor only (>= 2 entries)
    friction          optional {mu_v, mu_d, mu_s, D}, balance (torque) only
    thresholds        optional overrides of event thresholds
    actuator_lag      optional first-order lag time constant, velocity kinds
    rate_limits       optional {alpha_dot_max, gamma_dot_max} capability gates
    plot_channels     optional list of channel names for plot_<channel>.csv

The balance initial block takes either lean data (lean_offset, lean_rate,
lean_accel) with the rolling rate derived to realize the requested lean
acceleration, or the raw state (beta, beta_dot, gamma_dot); alpha_dot is
required either way. Tracking initial blocks take pose data (x_a, y_a,
alpha) with optional beta, beta_dot, gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import yaml

from .controllers import BalanceGains, LineGains, PositionGains, Smoothing
from .params import FrictionParams, RobotParams
from .simulate import _KIND_CHANNELS, KINDS, SimConfig, Thresholds, WheelState

__all__ = [
    "ScenarioError",
    "Scenario",
    "parse_scenario",
    "scenario_from_mapping",
    "scenario_to_mapping",
    "serialize_scenario",
]

_TOP_KEYS = (
    "name", "kind", "mode", "dt", "t_end", "stop_on_converged", "params",
    "initial", "gains", "target", "waypoints", "friction", "thresholds",
    "actuator_lag", "rate_limits", "plot_channels",
)
_PARAM_KEYS = ("m", "R", "Ix", "g", "M22")
_FRICTION_KEYS = ("mu_v", "mu_d", "mu_s", "D")
_THRESHOLD_KEYS = (
    "topple_margin", "alpha_dot_floor", "lean", "lean_rate", "steer_rate",
    "roll_rate", "distance", "line_offset", "advance_radius", "start_radius",
    "start_lean",
)
_BALANCE_LEAN_KEYS = ("lean_offset", "lean_rate", "lean_accel")
_BALANCE_RAW_KEYS = ("beta", "beta_dot", "gamma_dot")
_BALANCE_COMMON_KEYS = ("alpha", "gamma", "alpha_dot", "x_a", "y_a")
_TRACKING_INITIAL_KEYS = ("x_a", "y_a", "alpha", "beta", "beta_dot", "gamma")
_GAIN_KEYS = {
    "balance": ("k1", "k2"),
    "point_to_point": ("k3", "k4", "k6", "k7", "hard_switching"),
    "line": ("k3", "k5", "k6", "k7", "hard_switching"),
    "corridor": ("k3", "k5", "k6", "k7", "hard_switching"),
}
_RATE_LIMIT_KEYS = ("alpha_dot_max", "gamma_dot_max")

_DEFAULT_PLOTS = {
    "balance": ("beta", "alpha_dot", "gamma_dot", "V"),
    "point_to_point": ("e", "psi", "beta", "V1"),
    "line": ("e", "d", "beta", "segment"),
    "corridor": ("e", "d", "beta", "segment"),
}


class ScenarioError(ValueError):
    """Scenario file is malformed or violates a schema constraint."""


@dataclass(frozen=True)
class Scenario:
    name: str
    config: SimConfig
    plot_channels: tuple[str, ...]
    rate_limits: tuple[float, float] | None = None


def _check_keys(block: dict, allowed, where: str) -> None:
    for key in block:
        if key not in allowed:
            raise ScenarioError(f"{where or 'scenario'}: unknown key {key!r}")


def _require_mapping(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ScenarioError(f"{where}: expected a mapping")
    return value


def _num(block: dict, key: str, where: str, default=None) -> float:
    if key not in block:
        if default is None:
            raise ScenarioError(f"{where}: missing required key {key!r}")
        return default
    value = block[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{where}.{key}: expected a number, got {value!r}")
    return float(value)

def _opt_num(block: dict, key: str, where: str, default: float = 0.0) -> float:
    return _num(block, key, where, default=default)


def _bool(block: dict, key: str, where: str, default: bool) -> bool:
    if key not in block:
        return default
    value = block[key]
    if not isinstance(value, bool):
        raise ScenarioError(f"{where}.{key}: expected true/false, got {value!r}")
    return value


def _triple(block: dict, key: str, where: str) -> tuple[float, float, float]:
    value = block.get(key)
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ScenarioError(f"{where}.{key}: expected a list of three numbers")
    out = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ScenarioError(f"{where}.{key}[{i}]: expected a number, got {item!r}")
        out.append(float(item))
    return tuple(out)


def _point(value, where: str) -> tuple[float, float]:
    if isinstance(value, dict):
        _check_keys(value, ("x", "y"), where)
        return (_num(value, "x", where), _num(value, "y", where))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        out = []
        for i, item in enumerate(value):
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise ScenarioError(f"{where}[{i}]: expected a number, got {item!r}")
            out.append(float(item))
        return tuple(out)
    raise ScenarioError(f"{where}: expected {{x, y}} or [x, y]")


def _parse_params(data: dict) -> RobotParams:
    block = _require_mapping(data.get("params", {}), "params")
    _check_keys(block, _PARAM_KEYS, "params")
    kwargs = {}
    for key in _PARAM_KEYS:
        if key in block:
            kwargs[key] = _num(block, key, "params")
    try:
        return RobotParams(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"params: {exc}") from None


def _parse_friction(data: dict, kind: str) -> FrictionParams | None:
    if "friction" not in data:
        return None
    if kind != "balance":
        raise ScenarioError(
            "friction: joint friction applies in torque mode (balance runs) only"
        )
    block = _require_mapping(data["friction"], "friction")
    _check_keys(block, _FRICTION_KEYS, "friction")
    kwargs = {}
    for key in ("mu_v", "mu_d", "mu_s"):
        if key in block:
            kwargs[key] = _triple(block, key, "friction")
    if "D" in block:
        kwargs["D"] = _num(block, "D", "friction")
    try:
        return FrictionParams(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"friction: {exc}") from None


def _parse_thresholds(data: dict) -> Thresholds:
    block = _require_mapping(data.get("thresholds", {}), "thresholds")
    _check_keys(block, _THRESHOLD_KEYS, "thresholds")
    kwargs = {key: _num(block, key, "thresholds") for key in block}
    try:
        return Thresholds(**kwargs)
    except ValueError as exc:
        raise ScenarioError(f"thresholds: {exc}") from None


def _gate(where: str, key: str, value: float, ok: bool, constraint: str) -> float:
    if not ok:
        raise ScenarioError(f"{where}.{key}: constraint {constraint} violated (got {value})")
    return value


def _parse_smoothing(block: dict, where: str) -> Smoothing | None:
    hard = _bool(block, "hard_switching", where, default=False)
    if hard:
        if "k6" in block or "k7" in block:
            raise ScenarioError(f"{where}: hard_switching excludes k6/k7")
        return None
    k6 = _opt_num(block, "k6", where, 20.0)
    _gate(where, "k6", k6, k6 > 0.0, "k6 > 0")
    k7 = _opt_num(block, "k7", where, 20.0)
    _gate(where, "k7", k7, k7 > 0.0, "k7 > 0")
    return Smoothing(k6=k6, k7=k7)


def _parse_gains(data: dict, kind: str):
    block = _require_mapping(data.get("gains", {}), "gains")
    _check_keys(block, _GAIN_KEYS[kind], "gains")
    if kind == "balance":
        k1 = _opt_num(block, "k1", "gains", 1.0)
        _gate("gains", "k1", k1, k1 >= 0.0, "k1 >= 0")
        k2 = _opt_num(block, "k2", "gains", 1.0)
        _gate("gains", "k2", k2, k2 > 0.0, "k2 > 0")
        return BalanceGains(k2=k2, k1=k1)
    smoothing = _parse_smoothing(block, "gains")
    k3 = _opt_num(block, "k3", "gains", 3.0)
    _gate("gains", "k3", k3, k3 > 2.0, "k3 > 2")
    if kind == "point_to_point":
        k4 = _opt_num(block, "k4", "gains", 1.0)
        _gate("gains", "k4", k4, 0.0 < k4 < k3 - 1.0, "0 < k4 < k3 - 1")
        return PositionGains(k3=k3, k4=k4, smoothing=smoothing)
    k5 = _opt_num(block, "k5", "gains", 1.0)
    _gate("gains", "k5", k5, k5 > 0.0, "k5 > 0")
    return LineGains(k3=k3, k5=k5, smoothing=smoothing)


def _parse_initial(data: dict, kind: str, params: RobotParams) -> WheelState:
    block = _require_mapping(data.get("initial"), "initial")
    if kind == "balance":
        raw = [k for k in _BALANCE_RAW_KEYS if k in block]
        lean = [k for k in _BALANCE_LEAN_KEYS if k in block]
        if raw and lean:
            raise ScenarioError(
                f"initial: mixes raw state key {raw[0]!r} with lean data key {lean[0]!r}"
            )
        allowed = _BALANCE_COMMON_KEYS + (_BALANCE_RAW_KEYS if raw else _BALANCE_LEAN_KEYS)
        _check_keys(block, allowed, "initial")
        alpha_dot = _num(block, "alpha_dot", "initial")
        alpha = _opt_num(block, "alpha", "initial")
        gamma = _opt_num(block, "gamma", "initial")
        x_a = _opt_num(block, "x_a", "initial")
        y_a = _opt_num(block, "y_a", "initial")
        if raw:
            beta = _num(block, "beta", "initial")
            beta_dot = _opt_num(block, "beta_dot", "initial")
            gamma_dot = _opt_num(block, "gamma_dot", "initial")
        else:
            a = _opt_num(block, "lean_offset", "initial")
            b = _opt_num(block, "lean_rate", "initial")
            c = _opt_num(block, "lean_accel", "initial")
            beta = math.pi / 2.0 + a
            beta_dot = b
            # invert the lean dynamics for the rolling rate that realizes c
            Gm, Im, Jm = params.reduced()
            sb, cb = math.sin(beta), math.cos(beta)
            denom = Jm * sb * alpha_dot
            if denom == 0.0:
                raise ScenarioError(
                    "initial: alpha_dot must be nonzero (and beta away from 0, pi) "
                    "to realize the requested lean_accel"
                )
            gamma_dot = -(c + Gm * cb + Im * cb * sb * alpha_dot**2) / denom
        return WheelState(
            alpha=alpha, beta=beta, gamma=gamma,
            alpha_dot=alpha_dot, beta_dot=beta_dot, gamma_dot=gamma_dot,
            x_a=x_a, y_a=y_a,
        )
    _check_keys(block, _TRACKING_INITIAL_KEYS, "initial")
    return WheelState(
        alpha=_num(block, "alpha", "initial"),
        beta=_opt_num(block, "beta", "initial", math.pi / 2.0),
        gamma=_opt_num(block, "gamma", "initial"),
        alpha_dot=0.0,
        beta_dot=_opt_num(block, "beta_dot", "initial"),
        gamma_dot=0.0,
        x_a=_num(block, "x_a", "initial"),
        y_a=_num(block, "y_a", "initial"),
    )


def _parse_rate_limits(data: dict, kind: str, gains, initial: WheelState, target):
    if "rate_limits" not in data:
        return None
    if kind == "balance":
        raise ScenarioError("rate_limits: applies to velocity (tracking) kinds only")
    block = _require_mapping(data["rate_limits"], "rate_limits")
    _check_keys(block, _RATE_LIMIT_KEYS, "rate_limits")
    a_max = _num(block, "alpha_dot_max", "rate_limits")
    g_max = _num(block, "gamma_dot_max", "rate_limits")
    _gate("rate_limits", "alpha_dot_max", a_max, a_max > 0.0, "alpha_dot_max > 0")
    _gate("rate_limits", "gamma_dot_max", g_max, g_max > 0.0, "gamma_dot_max > 0")
    # the steering command is bounded by k3; the drive bound is checked where known
    if gains.k3 >= a_max:
        raise ScenarioError(
            f"rate_limits.alpha_dot_max: steering commands reach k3 = {gains.k3}, "
            f"which exceeds alpha_dot_max = {a_max}"
        )
    if kind == "point_to_point":
        e0 = math.hypot(initial.x_a - target[0], initial.y_a - target[1])
        if gains.k4 * e0 >= g_max:
            raise ScenarioError(
                f"rate_limits.gamma_dot_max: initial drive demand k4*e(0) = "
                f"{gains.k4 * e0} exceeds gamma_dot_max = {g_max}"
            )
    elif gains.k5 >= g_max:
        raise ScenarioError(
            f"rate_limits.gamma_dot_max: drive commands reach k5 = {gains.k5}, "
            f"which exceeds gamma_dot_max = {g_max}"
        )
    return (a_max, g_max)


def _parse_plot_channels(data: dict, kind: str) -> tuple[str, ...]:
    if "plot_channels" not in data:
        return _DEFAULT_PLOTS[kind]
    value = data["plot_channels"]
    if not isinstance(value, (list, tuple)) or not value:
        raise ScenarioError("plot_channels: expected a non-empty list of channel names")
    valid = _KIND_CHANNELS[kind]
    out = []
    for item in value:
        if not isinstance(item, str):
            raise ScenarioError(f"plot_channels: expected a name, got {item!r}")
        if item not in valid:
            raise ScenarioError(
                f"plot_channels: unknown channel {item!r} for kind {kind!r}; "
                f"valid channels: {', '.join(valid)}"
            )
        out.append(item)
    return tuple(out)


def scenario_from_mapping(data: dict, default_name: str = "scenario") -> Scenario:
    """Validate a parsed mapping and build the Scenario. Strict: unknown keys fail."""
    data = _require_mapping(data, "scenario")
    _check_keys(data, _TOP_KEYS, "")

    name = data.get("name", default_name)
    if not isinstance(name, str) or not name:
        raise ScenarioError(f"name: expected a non-empty string, got {name!r}")

    kind = data.get("kind")
    if kind not in KINDS:
        raise ScenarioError(f"kind: expected one of {', '.join(KINDS)}, got {kind!r}")

    required_mode = "torque" if kind == "balance" else "velocity"
    mode = data.get("mode", required_mode)
    if mode != required_mode:
        raise ScenarioError(
            f"mode: kind {kind!r} runs in {required_mode!r} mode, got {mode!r}"
        )

    dt = _num(data, "dt", "scenario", default=1e-3)
    if dt <= 0.0:
        raise ScenarioError(f"dt: must be positive, got {dt}")
    t_end = _num(data, "t_end", "scenario")
    if t_end < dt:
        raise ScenarioError(f"t_end: must be at least dt, got {t_end}")

    params = _parse_params(data)
    gains = _parse_gains(data, kind)
    if "initial" not in data:
        raise ScenarioError("scenario: missing required key 'initial'")
    initial = _parse_initial(data, kind, params)

    target = (0.0, 0.0)
    if kind == "point_to_point":
        if "target" not in data:
            raise ScenarioError("scenario: missing required key 'target'")
        target = _point(data["target"], "target")
    elif "target" in data:
        raise ScenarioError(f"target: not used by kind {kind!r}")

    waypoints: tuple = ()
    if kind in ("line", "corridor"):
        wp = data.get("waypoints")
        if not isinstance(wp, (list, tuple)) or len(wp) < 2:
            raise ScenarioError("waypoints: expected a list of at least two [x, y] points")
        waypoints = tuple(_point(item, f"waypoints[{i}]") for i, item in enumerate(wp))
        for i in range(len(waypoints) - 1):
            a, b = waypoints[i], waypoints[i + 1]
            if math.hypot(b[0] - a[0], b[1] - a[1]) <= 1e-9:
                raise ScenarioError(f"waypoints[{i + 1}]: coincides with waypoints[{i}]")
    elif "waypoints" in data:
        raise ScenarioError(f"waypoints: not used by kind {kind!r}")

    friction = _parse_friction(data, kind)
    thresholds = _parse_thresholds(data)
    stop_on_converged = _bool(data, "stop_on_converged", "scenario", default=True)

    actuator_lag = _num(data, "actuator_lag", "scenario", default=0.0)
    if actuator_lag < 0.0:
        raise ScenarioError(f"actuator_lag: must be non-negative, got {actuator_lag}")
    if actuator_lag > 0.0 and kind == "balance":
        raise ScenarioError("actuator_lag: applies to velocity (tracking) kinds only")

    rate_limits = _parse_rate_limits(data, kind, gains, initial, target)
    plot_channels = _parse_plot_channels(data, kind)

    try:
        config = SimConfig(
            kind=kind,
            dt=dt,
            t_end=t_end,
            initial=initial,
            gains=gains,
            params=params,
            target=target,
            waypoints=waypoints,
            friction=friction,
            thresholds=thresholds,
            stop_on_converged=stop_on_converged,
            actuator_lag=actuator_lag,
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from None
    return Scenario(
        name=name, config=config, plot_channels=plot_channels, rate_limits=rate_limits
    )


def parse_scenario(path) -> Scenario:
    """Load and validate one scenario file."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {p}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{p}: malformed scenario file: {exc}") from None
    if data is None:
        raise ScenarioError(f"{p}: empty scenario file")
    if not isinstance(data, dict):
        raise ScenarioError(f"{p}: top level must be a mapping")
    return scenario_from_mapping(data, default_name=p.stem)


def scenario_to_mapping(sc: Scenario) -> dict:
    """Canonical mapping form; parse(serialize) round-trips exactly."""
    cfg = sc.config
    st = cfg.initial
    out: dict = {"name": sc.name, "kind": cfg.kind, "dt": cfg.dt, "t_end": cfg.t_end,
                 "stop_on_converged": cfg.stop_on_converged}
    p = cfg.params
    out["params"] = {"m": p.m, "R": p.R, "Ix": p.Ix, "g": p.g, "M22": p.M22}
    if cfg.kind == "balance":
        out["initial"] = {
            "alpha": st.alpha, "gamma": st.gamma, "alpha_dot": st.alpha_dot,
            "x_a": st.x_a, "y_a": st.y_a,
            "beta": st.beta, "beta_dot": st.beta_dot, "gamma_dot": st.gamma_dot,
        }
        out["gains"] = {"k1": cfg.gains.k1, "k2": cfg.gains.k2}
    else:
        out["initial"] = {
            "x_a": st.x_a, "y_a": st.y_a, "alpha": st.alpha,
            "beta": st.beta, "beta_dot": st.beta_dot, "gamma": st.gamma,
        }
        g = cfg.gains
        gains: dict = {"k3": g.k3}
        if cfg.kind == "point_to_point":
            gains["k4"] = g.k4
        else:
            gains["k5"] = g.k5
        if g.smoothing is None:
            gains["hard_switching"] = True
        else:
            gains["k6"] = g.smoothing.k6
            gains["k7"] = g.smoothing.k7
        out["gains"] = gains
    if cfg.kind == "point_to_point":
        out["target"] = {"x": cfg.target[0], "y": cfg.target[1]}
    if cfg.kind in ("line", "corridor"):
        out["waypoints"] = [[x, y] for x, y in cfg.waypoints]
    if cfg.friction is not None:
        f = cfg.friction
        out["friction"] = {
            "mu_v": list(f.mu_v), "mu_d": list(f.mu_d), "mu_s": list(f.mu_s), "D": f.D,
        }
    thr = cfg.thresholds
    out["thresholds"] = {key: getattr(thr, key) for key in _THRESHOLD_KEYS}
    if cfg.actuator_lag > 0.0:
        out["actuator_lag"] = cfg.actuator_lag
    if sc.rate_limits is not None:
        out["rate_limits"] = {
            "alpha_dot_max": sc.rate_limits[0], "gamma_dot_max": sc.rate_limits[1],
        }
    out["plot_channels"] = list(sc.plot_channels)
    return out


def serialize_scenario(sc: Scenario) -> str:
    """YAML text whose parse equals sc."""
    return yaml.safe_dump(scenario_to_mapping(sc), sort_keys=False)
