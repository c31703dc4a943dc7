"""Energy-transport statistics of walked photon pairs.

The net energy taken from the modulator by a pair detected in ``(j, k)`` is
``u = j + k`` quanta of h*nu; ``v = j - k`` measures the spread along the
diagonal. Everything here is a re-binning or a moment of a JSI.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .state import SpectralPhaseProfile, make_maximal_state
from .walk import JsiMatrix, ModulatorConfig, SingleWalk, biphoton_jsi, single_photon_distribution

__all__ = [
    "PLANCK_H",
    "TransferDistribution",
    "SweepTable",
    "Confinement",
    "transfer_distribution",
    "single_photon_transfer",
    "moments",
    "confinement_metrics",
    "sweep_depth",
    "sweep_dimension",
    "poisson_sample",
    "slope_through_origin",
    "resolve_workers",
    "counts_to_csv",
    "single_walk_sigma",
]

PLANCK_H = 6.62607015e-34


@dataclass(frozen=True, eq=False)
class TransferDistribution:
    """``probs[i] = P(u = u_min + i)``, u in units of h*nu."""

    u_min: int
    u_max: int
    probs: np.ndarray
    nu_hz: float = 25.0e9

    @property
    def u_axis(self) -> np.ndarray:
        return np.arange(self.u_min, self.u_max + 1)

    @property
    def quantum_joules(self) -> float:
        return PLANCK_H * self.nu_hz

    def p(self, u: int) -> float:
        if self.u_min <= u <= self.u_max:
            return float(self.probs[u - self.u_min])
        return 0.0

    def to_csv(self) -> str:
        lines = ["u,P"]
        lines += [f"{u},{p:.11e}" for u, p in zip(self.u_axis, self.probs)]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class SweepTable:
    axis: str
    values: np.ndarray
    mean: np.ndarray
    sigma: np.ndarray
    sigma_single: np.ndarray | None = None
    residual: np.ndarray | None = None

    def to_csv(self) -> str:
        header = [self.axis, "mean", "sigma"]
        if self.sigma_single is not None:
            header.append("sigma_single")
        lines = [",".join(header)]
        for i, x in enumerate(self.values):
            x_text = str(int(x)) if self.axis == "dimension" else f"{x:.11e}"
            row = [x_text, f"{self.mean[i]:.11e}", f"{self.sigma[i]:.11e}"]
            if self.sigma_single is not None:
                row.append(f"{self.sigma_single[i]:.11e}")
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Confinement:
    antidiag_mass: float
    sigma_u: float
    sigma_v: float


def _rebin(jsi: JsiMatrix, sign: int) -> tuple[int, np.ndarray]:
    j = jsi.j_axis[:, None]
    k = jsi.k_axis[None, :]
    key = j + sign * k
    lo = int(key.min())
    probs = np.bincount((key - lo).ravel(), weights=jsi.values.ravel())
    return lo, probs


def transfer_distribution(jsi: JsiMatrix) -> TransferDistribution:
    """P(u) = sum of C[j, k] over j + k = u."""
    lo, probs = _rebin(jsi, +1)
    return TransferDistribution(lo, lo + probs.size - 1, probs)


def single_photon_transfer(walk: SingleWalk) -> TransferDistribution:
    """Single-photon output as a transfer distribution (u = n)."""
    return TransferDistribution(-walk.n_max, walk.n_max, walk.probs)


def _mean_sigma(lo: int, probs: np.ndarray) -> tuple[float, float]:
    axis = np.arange(lo, lo + probs.size)
    # Pair +u with -u so an exactly symmetric distribution has mean exactly 0.
    top = max(abs(lo), abs(lo + probs.size - 1))
    padded = np.zeros(2 * top + 1)
    padded[lo + top : lo + top + probs.size] = probs
    pos = np.arange(1, top + 1)
    mean = float(np.sum(pos * (padded[top + 1 :] - padded[top - 1 :: -1])))
    var = float(np.sum((axis - mean) ** 2 * probs))
    return mean, math.sqrt(max(var, 0.0))


def moments(dist: TransferDistribution) -> tuple[float, float]:
    """(mean, standard deviation) of u."""
    return _mean_sigma(dist.u_min, dist.probs)


def confinement_metrics(jsi: JsiMatrix) -> Confinement:
    u_lo, pu = _rebin(jsi, +1)
    v_lo, pv = _rebin(jsi, -1)
    mass = float(pu[-u_lo]) if u_lo <= 0 < u_lo + pu.size else 0.0
    return Confinement(
        antidiag_mass=mass,
        sigma_u=_mean_sigma(u_lo, pu)[1],
        sigma_v=_mean_sigma(v_lo, pv)[1],
    )


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit value, else ``BFC_WALK_THREADS``, 0 meaning auto."""
    if workers is None:
        env = os.environ.get("BFC_WALK_THREADS", "0").strip() or "0"
        try:
            workers = int(env)
        except ValueError:
            raise ValueError(f"BFC_WALK_THREADS must be an integer, got {env!r}") from None
    if workers < 0:
        raise ValueError("worker count must be >= 0")
    if workers == 0:
        workers = min(8, os.cpu_count() or 1)
    return workers


def _ordered_map(fn, items, workers: int | None):
    n = resolve_workers(workers)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _two_photon_moments(profile: SpectralPhaseProfile, d: int, delta: float, epsilon: float):
    jsi = biphoton_jsi(make_maximal_state(d, profile), ModulatorConfig(delta, epsilon))
    mean, sigma = moments(transfer_distribution(jsi))
    return mean, sigma, jsi.normalization_residual()


def sweep_depth(
    profile: SpectralPhaseProfile,
    d: int,
    deltas: Sequence[float],
    *,
    epsilon: float = 1e-12,
    workers: int | None = None,
) -> SweepTable:
    """Energy-transfer mean and sigma against modulation depth.

    ``sigma_single`` holds the single-photon reference ``delta / sqrt(2)``.
    """
    deltas = np.asarray(deltas, dtype=float)
    if np.any(deltas < 0):
        raise ValueError("modulation depths must be >= 0")
    rows = _ordered_map(lambda x: _two_photon_moments(profile, d, x, epsilon), list(deltas), workers)
    return SweepTable(
        axis="delta",
        values=deltas,
        mean=np.array([r[0] for r in rows]),
        sigma=np.array([r[1] for r in rows]),
        sigma_single=deltas / math.sqrt(2.0),
        residual=np.array([r[2] for r in rows]),
    )


def sweep_dimension(
    profile: SpectralPhaseProfile,
    delta: float,
    dims: Sequence[int],
    *,
    epsilon: float = 1e-12,
    workers: int | None = None,
) -> SweepTable:
    dims = [int(x) for x in dims]
    if any(x < 1 for x in dims):
        raise ValueError("dimensions must be >= 1")
    if profile.kind == "custom":
        raise ValueError("a custom profile fixes d and cannot be swept")
    rows = _ordered_map(lambda x: _two_photon_moments(profile, x, delta, epsilon), dims, workers)
    return SweepTable(
        axis="dimension",
        values=np.array(dims, dtype=float),
        mean=np.array([r[0] for r in rows]),
        sigma=np.array([r[1] for r in rows]),
        residual=np.array([r[2] for r in rows]),
    )


def slope_through_origin(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of ``y = s * x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(x @ y / (x @ x))


def poisson_sample(jsi: JsiMatrix, total_counts: float, seed: int) -> np.ndarray:
    """Independent Poisson counts per cell with mean ``total_counts * C[j, k]``.

    Every signal row draws from its own stream keyed by ``(seed, j)``, so a
    cell's count depends only on the seed, its row and the matrix.
    """
    if not (math.isfinite(total_counts) and total_counts > 0):
        raise ValueError(f"total_counts must be positive, got {total_counts!r}")
    lam = np.clip(jsi.values, 0.0, None) * float(total_counts)
    out = np.empty(lam.shape, dtype=np.int64)
    if int(seed) < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    for row, j in enumerate(jsi.j_axis):
        child = np.random.SeedSequence(int(seed), spawn_key=(int(j) + 2**31,))
        out[row] = np.random.default_rng(child).poisson(lam[row])
    return out


def counts_to_csv(jsi: JsiMatrix, counts: np.ndarray) -> str:
    lines = ["j\\k," + ",".join(str(k) for k in jsi.k_axis)]
    for j, row in zip(jsi.j_axis, counts):
        lines.append(f"{j}," + ",".join(str(int(c)) for c in row))
    return "\n".join(lines) + "\n"


def single_walk_sigma(delta: float, epsilon: float = 1e-12) -> float:
    return moments(single_photon_transfer(single_photon_distribution(ModulatorConfig(delta, epsilon))))[1]
