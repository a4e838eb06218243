"""Scalar minimization helpers."""
from __future__ import annotations

import math
from typing import Callable

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0
_INVPHI2 = (3.0 - math.sqrt(5.0)) / 2.0


def golden_section(f: Callable[[float], float], a: float, b: float,
                   xtol: float = 1e-12, max_iter: int = 500) -> float:
    """Locate the minimizer of a unimodal function on [a, b].

    Returns the midpoint of the final bracket, which is within xtol of the
    true minimizer. The function is evaluated roughly log(|b-a|/xtol)/log(phi)
    times.
    """
    if not (math.isfinite(a) and math.isfinite(b) and b >= a):
        raise ValueError(f"invalid bracket [{a}, {b}]")
    if xtol <= 0:
        raise ValueError(f"xtol must be positive, got {xtol}")
    h = b - a
    if h <= xtol:
        return 0.5 * (a + b)
    c = a + _INVPHI2 * h
    d = a + _INVPHI * h
    yc = f(c)
    yd = f(d)
    for _ in range(max_iter):
        if h <= xtol:
            break
        if yc < yd:
            b, d, yd = d, c, yc
            h = b - a
            c = a + _INVPHI2 * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h = b - a
            d = a + _INVPHI * h
            yd = f(d)
    return 0.5 * (a + b)
