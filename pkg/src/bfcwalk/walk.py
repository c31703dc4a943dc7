"""Frequency-domain quantum walk of one photon or a photon pair.

The modulator scatters every photon from mode ``p`` to ``p + n`` with
amplitude ``J_n(delta)``. For the pair state ``sum_m c_m |m, -m>`` the
coincidence probability between signal mode ``j`` and idler mode ``k`` is

    C[j, k] = | sum_m c_m J_{j-m}(delta) J_{k+m}(delta) |**2

The sideband phases ``i**n`` of the modulator expansion multiply every term
of a given cell by the same ``i**(j+k)`` and are therefore dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .bessel import DEFAULT_EPSILON, DELTA_MAX, bessel_row, truncation_order
from .state import DEFAULT_FSR_HZ, BfcState

__all__ = [
    "ConfigurationError",
    "ModulatorConfig",
    "JsiMatrix",
    "SingleWalk",
    "single_photon_distribution",
    "biphoton_jsi",
    "fermionic_antidiagonal_closed_form",
    "incoherent_jsi",
    "symmetrized_display",
]


class ConfigurationError(ValueError):
    """Modulator and state are not compatible."""


@dataclass(frozen=True)
class ModulatorConfig:
    delta: float
    epsilon_trunc: float = DEFAULT_EPSILON
    mod_freq_hz: float = DEFAULT_FSR_HZ

    def __post_init__(self) -> None:
        delta = float(self.delta)
        if not math.isfinite(delta) or delta < 0.0 or delta > DELTA_MAX:
            raise ConfigurationError(f"delta must be finite and in [0, {DELTA_MAX:g}], got {self.delta!r}")
        if not 0.0 < self.epsilon_trunc < 1.0:
            raise ConfigurationError(f"epsilon_trunc must lie in (0, 1), got {self.epsilon_trunc!r}")
        object.__setattr__(self, "delta", delta)

    @property
    def window(self) -> int:
        return truncation_order(self.delta, self.epsilon_trunc)

    def check_resonance(self, state: BfcState) -> None:
        if not math.isclose(self.mod_freq_hz, state.fsr_hz, rel_tol=1e-12):
            raise ConfigurationError(
                f"modulation frequency {self.mod_freq_hz:g} Hz does not match "
                f"comb spacing {state.fsr_hz:g} Hz"
            )


@dataclass(frozen=True, eq=False)
class JsiMatrix:
    """Coincidence probabilities; ``values[j - j_min, k - k_min] = C[j, k]``."""

    j_min: int
    j_max: int
    k_min: int
    k_max: int
    values: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        shape = (self.j_max - self.j_min + 1, self.k_max - self.k_min + 1)
        if self.values.shape != shape:
            raise ValueError(f"values has shape {self.values.shape}, window needs {shape}")

    @property
    def j_axis(self) -> np.ndarray:
        return np.arange(self.j_min, self.j_max + 1)

    @property
    def k_axis(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    def at(self, j: int, k: int) -> float:
        if self.j_min <= j <= self.j_max and self.k_min <= k <= self.k_max:
            return float(self.values[j - self.j_min, k - self.k_min])
        return 0.0

    def total(self) -> float:
        return math.fsum(self.values.ravel())

    def normalization_residual(self) -> float:
        return abs(self.total() - 1.0)

    def to_csv(self) -> str:
        lines = ["j\\k," + ",".join(str(k) for k in self.k_axis)]
        for j, row in zip(self.j_axis, self.values):
            lines.append(f"{j}," + ",".join(f"{x:.11e}" for x in row))
        return "\n".join(lines) + "\n"

    def to_pgm(self) -> bytes:
        """8-bit binary PGM, rows are signal modes, linear scale with max -> 255."""
        vals = np.asarray(self.values, dtype=float)
        peak = vals.max() if vals.size else 0.0
        if peak > 0:
            pix = np.rint(np.clip(vals, 0.0, None) / peak * 255.0).astype(np.uint8)
        else:
            pix = np.zeros(vals.shape, dtype=np.uint8)
        h, w = pix.shape
        return f"P5\n{w} {h}\n255\n".encode("ascii") + pix.tobytes()


@dataclass(frozen=True)
class SingleWalk:
    """Output distribution ``probs[i] = J_{i-N}(delta)**2`` of one photon over n in [-N, N]."""

    n_max: int
    probs: np.ndarray

    @property
    def orders(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def to_csv(self) -> str:
        lines = ["n,P"]
        lines += [f"{n},{p:.11e}" for n, p in zip(self.orders, self.probs)]
        return "\n".join(lines) + "\n"


def single_photon_distribution(config: ModulatorConfig) -> SingleWalk:
    n = config.window
    row = bessel_row(config.delta, -n, n)
    return SingleWalk(n_max=n, probs=row.values * row.values)


def _mode_tables(d: int, config: ModulatorConfig):
    """Signal/idler Bessel tables over the output window.

    ``sig[a, m-1] = J_{j_a - m}`` and ``idl[b, m-1] = J_{k_b + m}``.
    """
    n = config.window
    j_axis = np.arange(1 - n, d + n + 1)
    k_axis = np.arange(-d - n, n)
    reach = d + 2 * n
    row = bessel_row(config.delta, -reach, reach)
    m = np.arange(1, d + 1)
    sig = row.values[(j_axis[:, None] - m[None, :]) + reach]
    idl = row.values[(k_axis[:, None] + m[None, :]) + reach]
    return j_axis, k_axis, sig, idl


def _jsi_meta(d: int, config: ModulatorConfig, description: str) -> dict[str, Any]:
    return {
        "d": d,
        "delta": config.delta,
        "epsilon_trunc": config.epsilon_trunc,
        "window": config.window,
        "profile": description,
    }


def biphoton_jsi(state: BfcState, config: ModulatorConfig) -> JsiMatrix:
    """Joint spectral intensity of ``state`` after the modulator.

    Window: ``j in [1-N, d+N]``, ``k in [-d-N, N-1]`` with ``N`` the
    truncation order of ``config``. Pairs are accumulated in a fixed order,
    so the result does not depend on threading.
    """
    config.check_resonance(state)
    j_axis, k_axis, sig, idl = _mode_tables(state.d, config)
    amp = np.zeros((j_axis.size, k_axis.size), dtype=complex)
    for idx, c in enumerate(state.amplitudes):
        if c == 0:
            continue
        amp += c * np.outer(sig[:, idx], idl[:, idx])
    values = amp.real * amp.real + amp.imag * amp.imag
    if state.profile is not None:
        description = state.profile.describe()
    else:
        description = "explicit amplitudes"
    return JsiMatrix(
        j_min=int(j_axis[0]),
        j_max=int(j_axis[-1]),
        k_min=int(k_axis[0]),
        k_max=int(k_axis[-1]),
        values=values,
        meta=_jsi_meta(state.d, config, description),
    )


def fermionic_antidiagonal_closed_form(d: int, config: ModulatorConfig, j: int) -> float:
    """C[j, -j] for the fermionic profile: ``(sum_m J_{j-m}**2)**2 / d``.

    With ``theta_m = m*pi`` every term of the pair sum carries the same sign,
    so the relative phases cancel and only squared Bessel values remain.
    """
    if d < 1:
        raise ValueError(f"dimension d must be >= 1, got {d}")
    orders = int(j) - np.arange(1, d + 1)
    lo, hi = int(orders.min()), int(orders.max())
    row = bessel_row(config.delta, lo, hi)
    vals = row.values[orders - lo]
    s = float(np.sum(vals * vals))
    return s * s / d


def incoherent_jsi(d: int, config: ModulatorConfig) -> JsiMatrix:
    """JSI of the equal mixture of the pairs ``|m, -m>``, m = 1..d."""
    if d < 1:
        raise ValueError(f"dimension d must be >= 1, got {d}")
    j_axis, k_axis, sig, idl = _mode_tables(d, config)
    sig2 = sig * sig
    idl2 = idl * idl
    values = np.zeros((j_axis.size, k_axis.size))
    for idx in range(d):
        values += np.outer(sig2[:, idx], idl2[:, idx])
    values /= d
    return JsiMatrix(
        j_min=int(j_axis[0]),
        j_max=int(j_axis[-1]),
        k_min=int(k_axis[0]),
        k_max=int(k_axis[-1]),
        values=values,
        meta=_jsi_meta(d, config, "incoherent mixture"),
    )


def symmetrized_display(jsi: JsiMatrix) -> JsiMatrix:
    """Square matrix ``D[a, b] = C[a, b] + C[b, a]`` over a symmetric mode axis.

    Each unordered detection event appears twice, so ``D`` sums to twice
    the JSI.
    """
    half = max(abs(jsi.j_min), abs(jsi.j_max), abs(jsi.k_min), abs(jsi.k_max))
    size = 2 * half + 1
    full = np.zeros((size, size))
    full[
        jsi.j_min + half : jsi.j_max + half + 1,
        jsi.k_min + half : jsi.k_max + half + 1,
    ] = jsi.values
    meta = dict(jsi.meta)
    meta["display"] = "symmetrized"
    return JsiMatrix(-half, half, -half, half, full + full.T, meta)
