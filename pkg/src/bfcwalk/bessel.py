"""Integer-order Bessel functions of the first kind, J_n(delta).

A phase modulator of depth ``delta`` moves a photon from mode ``m`` to mode
``m + n`` with amplitude ``J_n(delta)``, so every quantity in the package is
built from whole rows ``J_{n_min}(delta) .. J_{n_max}(delta)`` at a fixed
argument. Rows are produced by Miller's backward recurrence, normalised with
``J_0 + 2 * sum_k J_{2k} = 1``, which is stable for every order and costs one
pass per row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "DELTA_MAX",
    "DEFAULT_EPSILON",
    "BesselRow",
    "bessel_j",
    "bessel_row",
    "truncation_order",
]

DELTA_MAX = 1.0e4
DEFAULT_EPSILON = 1.0e-12

_RESCALE_AT = 1.0e250
# below this the recurrence coefficient 2n/delta can overflow; the ascending
# series needs only a handful of terms there
_SERIES_BELOW = 1.0e-3


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not math.isfinite(delta) or delta < 0.0:
        raise ValueError(f"delta must be finite and >= 0, got {delta!r}")
    if delta > DELTA_MAX:
        raise ValueError(f"delta must be <= {DELTA_MAX:g}, got {delta!r}")
    return delta


def _start_order(delta: float, n_top: int) -> int:
    # Far enough above the turnover n ~ delta that the truncation error of the
    # recurrence is below double precision (cf. Numerical Recipes' bessj).
    top = max(n_top, math.ceil(delta))
    start = top + int(math.sqrt(40.0 * (top + 1))) + 20
    return start + (start % 2)


def _small_argument_row(delta: float, n_top: int) -> np.ndarray:
    half = 0.5 * delta
    q = half * half
    out = np.zeros(n_top + 1)
    lead = 1.0
    for n in range(n_top + 1):
        if n:
            lead *= half / n
        if lead == 0.0:
            break
        term, total = lead, lead
        for k in range(1, 6):
            term *= -q / (k * (n + k))
            total += term
        out[n] = total
    return out


@lru_cache(maxsize=256)
def _nonnegative_row(delta: float, n_top: int) -> np.ndarray:
    """J_0 .. J_{n_top} at ``delta`` (read-only array)."""
    out = np.zeros(n_top + 1)
    if delta == 0.0:
        out[0] = 1.0
        out.flags.writeable = False
        return out

    if delta < _SERIES_BELOW:
        out[:] = _small_argument_row(delta, n_top)
        out.flags.writeable = False
        return out

    start = _start_order(delta, n_top)
    vals = np.zeros(start + 2)
    two_over_x = 2.0 / delta
    j_next, j_cur = 0.0, 1.0e-30
    vals[start] = j_cur
    for n in range(start, 0, -1):
        j_prev = n * two_over_x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        vals[n - 1] = j_cur
        if abs(j_cur) > _RESCALE_AT:
            vals[n - 1 :] /= _RESCALE_AT
            j_next /= _RESCALE_AT
            j_cur /= _RESCALE_AT

    norm = vals[0] + 2.0 * math.fsum(vals[2::2])
    out[:] = vals[: n_top + 1] / norm
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class BesselRow:
    """``values[i] == J_{n_min + i}(delta)``."""

    delta: float
    n_min: int
    n_max: int
    values: np.ndarray

    def __getitem__(self, n: int) -> float:
        if not self.n_min <= n <= self.n_max:
            raise IndexError(f"order {n} outside [{self.n_min}, {self.n_max}]")
        return float(self.values[n - self.n_min])

    @property
    def orders(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)


def bessel_row(delta: float, n_min: int, n_max: int) -> BesselRow:
    """Evaluate J_n(delta) for every integer n in [n_min, n_max].

    Negative orders are obtained by reflection, J_{-n} = (-1)^n J_n, so the
    symmetry holds exactly in the returned values.
    """
    delta = _check_delta(delta)
    n_min, n_max = int(n_min), int(n_max)
    if n_min > n_max:
        raise ValueError(f"empty order range [{n_min}, {n_max}]")

    n_top = max(abs(n_min), abs(n_max))
    base = _nonnegative_row(delta, n_top)
    orders = np.arange(n_min, n_max + 1)
    mags = base[np.abs(orders)]
    signs = np.where((orders < 0) & (orders % 2 == 1), -1.0, 1.0)
    values = signs * mags
    values.flags.writeable = False
    return BesselRow(delta=delta, n_min=n_min, n_max=n_max, values=values)


def bessel_j(n: int, delta: float) -> float:
    """J_n(delta) for integer ``n`` and real ``delta >= 0``."""
    delta = _check_delta(delta)
    n = int(n)
    if abs(n) > 10 * (delta + 50):
        raise ValueError(f"order {n} is out of range for delta={delta}")
    return bessel_row(delta, n, n)[n]


def truncation_order(delta: float, epsilon: float = DEFAULT_EPSILON) -> int:
    """Smallest N with ``sum_{|n| <= N} J_n(delta)**2 >= 1 - epsilon``.

    The result is never below ``ceil(delta)``. If rounding keeps the partial
    sums from reaching ``1 - epsilon`` the order at which the row's total
    mass is attained is returned instead.
    """
    delta = _check_delta(delta)
    epsilon = float(epsilon)
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    floor = math.ceil(delta)
    if delta == 0.0:
        return 0

    n_top = _start_order(delta, floor)
    row = _nonnegative_row(delta, n_top)
    sq = row * row
    mass = np.cumsum(np.concatenate(([sq[0]], 2.0 * sq[1:])))
    target = min(1.0 - epsilon, mass[-1])
    n = int(np.argmax(mass >= target))
    return max(n, floor)
