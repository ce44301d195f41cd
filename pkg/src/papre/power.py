"""Power-amplifier consumption model and the power metrics derived from a precoder.

The PA efficiency follows a square-root back-off law, so the total consumed
power is proportional to the L2,1 norm of the precoding matrix (sum over
antennas of the per-antenna amplitude sqrt(p_m)), not to the transmit power.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import as_channel_array

DEFAULT_ACTIVE_THRESHOLD = 1e-6


@dataclass(frozen=True)
class PaModel:
    """Power amplifier parameters: saturation power and peak efficiency."""

    p_max: float = 1.0
    eta_max: float = 0.785

    def __post_init__(self):
        if self.p_max <= 0:
            raise ValueError("p_max must be positive")
        if not 0 < self.eta_max <= 1:
            raise ValueError("eta_max must lie in (0, 1]")

    @property
    def prefactor(self) -> float:
        """sqrt(p_max)/eta_max, the scale linking the L2,1 norm to consumed power."""
        return np.sqrt(self.p_max) / self.eta_max


@dataclass(frozen=True)
class PowerReport:
    per_antenna: np.ndarray  # p_m, power units
    p_tx: float
    p_cons: float  # with the sqrt(p_max)/eta_max prefactor
    p_cons_normalized: float  # L2,1 norm of W
    active_count: int
    active_mask: np.ndarray


def pa_efficiency(p_m: float, pa: PaModel) -> float:
    """Efficiency of one PA at output power p_m: eta_max * sqrt(p_m / p_max).

    Output powers above saturation are a modeling violation and raise.
    """
    if p_m < 0:
        raise ValueError("output power must be non-negative")
    if p_m > pa.p_max:
        raise ValueError(f"PA overdriven: p_m={p_m} exceeds saturation p_max={pa.p_max}")
    return pa.eta_max * np.sqrt(p_m / pa.p_max)


def per_antenna_power(W) -> np.ndarray:
    """p_m = sum_k |w_{k,m}|^2 for each antenna m."""
    Wa = as_channel_array(W)
    return np.sum(np.abs(Wa) ** 2, axis=0)


def transmit_power(W) -> float:
    """Total transmit power, the squared Frobenius norm of W."""
    return float(np.sum(per_antenna_power(W)))


def l21_norm(W) -> float:
    """Sum over antennas of the per-antenna amplitude sqrt(p_m)."""
    return float(np.sum(np.sqrt(per_antenna_power(W))))


def consumed_power(W, pa: PaModel) -> float:
    """Total PA consumed power: (sqrt(p_max)/eta_max) * ||W||_{2,1}."""
    return pa.prefactor * l21_norm(W)


def active_antennas(W, rel_threshold: float = DEFAULT_ACTIVE_THRESHOLD):
    """Count antennas whose power exceeds rel_threshold times the largest p_m.

    Returns (count, boolean mask). An all-zero precoder has no active antennas.
    """
    if not 0 < rel_threshold < 1:
        raise ValueError("rel_threshold must lie in (0, 1)")
    p = per_antenna_power(W)
    peak = p.max() if p.size else 0.0
    if peak == 0.0:
        return 0, np.zeros_like(p, dtype=bool)
    mask = p > rel_threshold * peak
    return int(mask.sum()), mask


def power_report(W, pa: Optional[PaModel] = None,
                 rel_threshold: float = DEFAULT_ACTIVE_THRESHOLD) -> PowerReport:
    """Bundle all power metrics of a precoder into one report."""
    pa = pa or PaModel()
    p = per_antenna_power(W)
    count, mask = active_antennas(W, rel_threshold) if p.max(initial=0.0) > 0 else (0, np.zeros_like(p, dtype=bool))
    norm21 = float(np.sum(np.sqrt(p)))
    return PowerReport(
        per_antenna=p,
        p_tx=float(p.sum()),
        p_cons=pa.prefactor * norm21,
        p_cons_normalized=norm21,
        active_count=count,
        active_mask=mask,
    )


def pcg_single_user(h) -> float:
    """Single-user power consumption gain of the efficient MRT over plain MRT.

    Equals ||h||_inf * ||h||_1 / ||h||_2^2, which is 1 exactly when all
    non-zero gains are equal (e.g. LOS steering rows).
    """
    hv = np.asarray(h, dtype=complex).ravel()
    a = np.abs(hv)
    denom = np.sum(a**2)
    if denom == 0.0:
        raise ValueError("channel vector is all zero")
    return float(a.max() * a.sum() / denom)


def pcg_ratio(W_conventional, W_efficient) -> float:
    """Consumed-power ratio conventional / efficient; the PA prefactor cancels."""
    Wc = as_channel_array(W_conventional)
    We = as_channel_array(W_efficient)
    if Wc.shape != We.shape:
        raise ValueError(f"precoder shapes differ: {Wc.shape} vs {We.shape}")
    denom = l21_norm(We)
    if denom == 0.0:
        raise ValueError("efficient precoder is all zero")
    return l21_norm(Wc) / denom
