"""Vectorized double-double arithmetic on numpy arrays.

A value is a pair ``(hi, lo)`` of float64 arrays with ``|lo| <= ulp(hi)/2``.
Only the handful of operations needed by the real series summation are
provided (error-free sum/product, add, multiply, divide).  Without an fma
the exact product uses Dekker's splitting.
"""

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    e = (a - (s - bb)) + (b - bb)
    return s, e


def quick_two_sum(a, b):
    s = a + b
    e = b - (s - a)
    return s, e


def split(a):
    t = _SPLITTER * a
    hi = t - (t - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def add(xh, xl, yh, yl):
    s, e = two_sum(xh, yh)
    t, f = two_sum(xl, yl)
    e = e + t
    s, e = quick_two_sum(s, e)
    e = e + f
    return quick_two_sum(s, e)


def mul(xh, xl, yh, yl):
    p, e = two_prod(xh, yh)
    e = e + (xh * yl + xl * yh)
    return quick_two_sum(p, e)


def div(xh, xl, yh, yl):
    q1 = xh / yh
    ph, pl = mul(q1, 0.0 * q1, yh, yl)
    rh, rl = add(xh, xl, -ph, -pl)
    q2 = rh / yh
    ph, pl = mul(q2, 0.0 * q2, yh, yl)
    rh, rl = add(rh, rl, -ph, -pl)
    q3 = rh / yh
    q1, q2 = quick_two_sum(q1, q2)
    return add(q1, q2, q3, 0.0 * q3)


def from_float(x):
    x = np.asarray(x, dtype=float)
    return x, np.zeros_like(x)


def scalar_sum(a: float, b: float) -> tuple[float, float]:
    """Exact sum of two Python floats as a double-double pair."""
    s, e = two_sum(np.float64(a), np.float64(b))
    return float(s), float(e)
