"""Fixed-step classical Runge-Kutta integration."""

from __future__ import annotations

from typing import Callable

import numpy as np


def rk4(f: Callable, y0, t0: float, t1: float, steps: int) -> np.ndarray:
    """Integrate y' = f(t, y) from t0 to t1 with `steps` equal RK4 steps."""
    y = np.array(y0, dtype=float)
    if steps <= 0:
        raise ValueError("steps must be positive")
    h = (t1 - t0) / steps
    t = t0
    for i in range(steps):
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t = t0 + (i + 1) * h
    return y
