"""Switching functions used by the controllers.

Two hard switches and their saturating replacements:

    hard_sign(x)  = +1 if x >= 0 else -1          (bipolar)
    hard_step(x)  = 1 if x >= 0 else 0            (unipolar)
    smooth_sign(x, k) = (1 - exp(-k*x)) / (1 + exp(-k*x))
    smooth_step(x, k) = 1 / (1 + exp(-k*x))

The smooth forms converge pointwise to the hard forms as k grows (for
x != 0) and exist because hard switching chatters under fixed-step
discretization. Note both hard functions return their upper value at
exactly 0; the friction model's sign convention (0 at 0) is different and
lives with the friction code.
"""

from __future__ import annotations

import math

__all__ = ["hard_sign", "hard_step", "smooth_sign", "smooth_step", "switching"]


def hard_sign(x: float) -> float:
    return 1.0 if x >= 0.0 else -1.0


def hard_step(x: float) -> float:
    return 1.0 if x >= 0.0 else 0.0


def smooth_sign(x: float, k: float) -> float:
    # identical to (1 - exp(-k x)) / (1 + exp(-k x)), without overflow
    return math.tanh(0.5 * k * x)


def smooth_step(x: float, k: float) -> float:
    kx = k * x
    if kx >= 0.0:
        return 1.0 / (1.0 + math.exp(-kx))
    ex = math.exp(kx)
    return ex / (1.0 + ex)


def switching(x: float, kind: str, k: float | None = None) -> float:
    """Evaluate one member of the switching family by name.

    kind is one of 'sgn', 'theta', 'tanh', 'uanh'; the last two require the
    slope parameter k > 0.
    """
    if kind == "sgn":
        return hard_sign(x)
    if kind == "theta":
        return hard_step(x)
    if kind in ("tanh", "uanh"):
        if k is None or k <= 0.0:
            raise ValueError(f"kind {kind!r} requires a positive slope k")
        return smooth_sign(x, k) if kind == "tanh" else smooth_step(x, k)
    raise ValueError(f"unknown switching kind {kind!r}")
