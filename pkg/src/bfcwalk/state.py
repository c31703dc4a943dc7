"""Biphoton frequency-comb input states.

A d-dimensional comb state is ``sum_m c_m |m, -m>`` with the signal photon in
mode ``+m`` and the idler in ``-m`` for ``m = 1..d``. Built-in constructors
only produce maximally entangled states, ``c_m = exp(i theta_m) / sqrt(d)``,
where the per-pair phase comes from a :class:`SpectralPhaseProfile`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

__all__ = [
    "PROFILE_KINDS",
    "DEFAULT_FSR_HZ",
    "SpectralPhaseProfile",
    "BfcState",
    "PhaseValue",
    "eval_phase",
    "make_maximal_state",
    "canonical_phase",
]

PROFILE_KINDS = ("constant", "linear", "quadratic", "custom")
DEFAULT_FSR_HZ = 25.0e9
TWO_PI = 2.0 * math.pi


def canonical_phase(theta: float) -> float:
    """Map an angle onto (-pi, pi]."""
    r = math.remainder(theta, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


@dataclass(frozen=True)
class SpectralPhaseProfile:
    """Per-pair phase rule ``theta_m = theta0 + slope_a*m + curv_b*m**2``.

    ``kind="custom"`` takes the phases from ``custom_thetas`` (one per pair,
    ``m = 1..d``) and ignores the coefficients.
    """

    kind: str = "constant"
    theta0: float = 0.0
    slope_a: float = 0.0
    curv_b: float = 0.0
    custom_thetas: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.kind not in PROFILE_KINDS:
            raise ValueError(f"unknown profile kind {self.kind!r}; expected one of {PROFILE_KINDS}")
        if self.kind == "custom":
            if not self.custom_thetas:
                raise ValueError("custom profile needs a non-empty custom_thetas")
            object.__setattr__(self, "custom_thetas", tuple(float(t) for t in self.custom_thetas))
        elif self.custom_thetas is not None:
            raise ValueError(f"custom_thetas given for a {self.kind!r} profile")
        for name in ("theta0", "slope_a", "curv_b"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)

    @classmethod
    def bosonic(cls) -> SpectralPhaseProfile:
        return cls("constant")

    @classmethod
    def fermionic(cls) -> SpectralPhaseProfile:
        return cls("linear", slope_a=math.pi)

    @classmethod
    def anyonic(cls) -> SpectralPhaseProfile:
        return cls("linear", slope_a=math.pi / 2)

    @classmethod
    def quadratic(cls, curv_b: float, slope_a: float = 0.0, theta0: float = 0.0) -> SpectralPhaseProfile:
        return cls("quadratic", theta0=theta0, slope_a=slope_a, curv_b=curv_b)

    @classmethod
    def custom(cls, thetas: Sequence[float]) -> SpectralPhaseProfile:
        return cls("custom", custom_thetas=tuple(thetas))

    def describe(self) -> str:
        if self.kind == "custom":
            return "custom(" + ", ".join(f"{t:.6g}" for t in self.custom_thetas) + ")"
        return f"{self.kind}(theta0={self.theta0:.6g}, a={self.slope_a:.6g}, b={self.curv_b:.6g})"

    def relative_phase(self, m: int) -> float:
        """Phase of pair ``m`` without ``theta0``, with coefficients reduced mod 2*pi.

        Reducing the coefficients first makes slopes that differ by whole
        turns give bit-identical amplitudes.
        """
        if self.kind == "custom":
            return self._custom(m)
        a = math.fmod(self.slope_a, TWO_PI)
        b = math.fmod(self.curv_b, TWO_PI)
        return a * m + b * m * m

    def _custom(self, m: int) -> float:
        thetas = self.custom_thetas
        if not 1 <= m <= len(thetas):
            raise ValueError(f"mode {m} outside 1..{len(thetas)} for custom profile")
        return thetas[m - 1]

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "theta0": self.theta0,
            "slope_a": self.slope_a,
            "curv_b": self.curv_b,
            "custom_thetas": list(self.custom_thetas) if self.custom_thetas is not None else None,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SpectralPhaseProfile:
        thetas = data.get("custom_thetas")
        return cls(
            kind=data.get("kind", "constant"),
            theta0=data.get("theta0", 0.0),
            slope_a=data.get("slope_a", 0.0),
            curv_b=data.get("curv_b", 0.0),
            custom_thetas=tuple(thetas) if thetas is not None else None,
        )


NAMED_PROFILES = {
    "bosonic": SpectralPhaseProfile.bosonic,
    "fermionic": SpectralPhaseProfile.fermionic,
    "anyonic": SpectralPhaseProfile.anyonic,
}


@dataclass(frozen=True)
class PhaseValue:
    raw: float
    canonical: float


def eval_phase(profile: SpectralPhaseProfile, m: int) -> PhaseValue:
    """theta_m for pair ``m``, both as accumulated and as (-pi, pi] value."""
    m = int(m)
    if profile.kind == "custom":
        raw = profile._custom(m)
    else:
        raw = profile.theta0 + profile.slope_a * m + profile.curv_b * m * m
    return PhaseValue(raw=raw, canonical=canonical_phase(raw))


@dataclass(frozen=True, eq=False)
class BfcState:
    """Two-photon comb state ``exp(i*global_phase) * sum_m amplitudes[m-1] |m, -m>``.

    The common phase is held apart from the per-pair amplitudes so that it can
    never leak into a computed probability.
    """

    d: int
    amplitudes: np.ndarray
    fsr_hz: float = DEFAULT_FSR_HZ
    global_phase: float = 0.0
    profile: SpectralPhaseProfile | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        d = int(self.d)
        if d < 1:
            raise ValueError(f"dimension d must be >= 1, got {self.d}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape != (d,):
            raise ValueError(f"expected {d} amplitudes, got {amps.size}")
        norm = float(np.sum(amps.real**2 + amps.imag**2))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"state is not normalised: sum |c_m|^2 = {norm!r}")
        if not (math.isfinite(self.fsr_hz) and self.fsr_hz > 0):
            raise ValueError("fsr_hz must be positive")
        amps.flags.writeable = False
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "fsr_hz", float(self.fsr_hz))
        object.__setattr__(self, "global_phase", float(self.global_phase))

    @property
    def coefficients(self) -> np.ndarray:
        """c_m including the common phase factor."""
        return np.exp(1j * self.global_phase) * self.amplitudes

    @property
    def signal_modes(self) -> np.ndarray:
        return np.arange(1, self.d + 1)

    @property
    def idler_modes(self) -> np.ndarray:
        return -np.arange(1, self.d + 1)

    def to_dict(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "amplitudes": [[float(c.real), float(c.imag)] for c in self.amplitudes],
            "fsr_hz": self.fsr_hz,
            "global_phase": self.global_phase,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> BfcState:
        amps = [complex(re, im) for re, im in data["amplitudes"]]
        return cls(
            d=data["d"],
            amplitudes=np.array(amps),
            fsr_hz=data.get("fsr_hz", DEFAULT_FSR_HZ),
            global_phase=data.get("global_phase", 0.0),
        )


def make_maximal_state(
    d: int, profile: SpectralPhaseProfile | None = None, fsr_hz: float = DEFAULT_FSR_HZ
) -> BfcState:
    """Maximally entangled state with ``c_m = exp(i*theta_m)/sqrt(d)``."""
    if int(d) != d or d < 1:
        raise ValueError(f"dimension d must be an integer >= 1, got {d!r}")
    d = int(d)
    profile = profile or SpectralPhaseProfile.bosonic()
    if profile.kind == "custom" and len(profile.custom_thetas) != d:
        raise ValueError(f"custom profile has {len(profile.custom_thetas)} phases, state has d={d}")

    phases = np.array([profile.relative_phase(m) for m in range(1, d + 1)])
    amps = np.exp(1j * phases) / math.sqrt(d)
    theta0 = 0.0 if profile.kind == "custom" else profile.theta0
    return BfcState(d=d, amplitudes=amps, fsr_hz=fsr_hz, global_phase=theta0, profile=profile)
