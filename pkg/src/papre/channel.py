"""Channel generation and link-quality evaluation for a multi-user MIMO downlink.

Conventions: the channel matrix ``H`` is K x M (rows = users, columns = base
station antennas) and the precoding matrix ``W`` is K x M, row k holding the
weights of user k across antennas. All powers and SINRs are computed
analytically from ``H`` and ``W``; no symbol-level signals are drawn.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np


@dataclass(frozen=True)
class LosProvenance:
    angles: tuple  # user angles theta_k in radians, open interval (0, pi)


@dataclass(frozen=True)
class NlosProvenance:
    seed: int


@dataclass(frozen=True)
class ChannelMatrix:
    """Complex K x M channel with a record of how it was generated."""

    entries: np.ndarray
    provenance: Union[LosProvenance, NlosProvenance, None] = None

    def __post_init__(self):
        entries = np.asarray(self.entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] < 1 or entries.shape[1] < 1:
            raise ValueError(f"channel must be a K x M matrix with K, M >= 1, got shape {entries.shape}")
        object.__setattr__(self, "entries", entries)
        entries.setflags(write=False)

    @property
    def n_users(self) -> int:
        return self.entries.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.entries.shape[1]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


@dataclass(frozen=True)
class TargetSpec:
    """Per-user linear SINR targets, noise level, and optional per-antenna cap."""

    gammas: np.ndarray  # linear SINR targets, length K
    sigma_nu: float = 1.0
    p_max_cap: float | None = None  # absent = unconstrained

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gammas, dtype=float))
        if g.ndim != 1 or np.any(g < 0):
            raise ValueError("SINR targets must be a 1-D list of non-negative values")
        object.__setattr__(self, "gammas", g)
        if self.sigma_nu <= 0:
            raise ValueError("sigma_nu must be positive")
        if self.p_max_cap is not None and self.p_max_cap <= 0:
            raise ValueError("p_max_cap must be positive when present")

    @property
    def n_users(self) -> int:
        return self.gammas.size

    def rhs_matrix(self) -> np.ndarray:
        """D_gamma^{1/2} * sigma_nu, the K x K right-hand side of the ZF constraint."""
        return np.diag(np.sqrt(self.gammas)) * self.sigma_nu


def db_to_linear(x_db: float) -> float:
    return float(10.0 ** (x_db / 10.0))


def as_channel_array(H) -> np.ndarray:
    """Coerce a ChannelMatrix or array-like to a complex 2-D ndarray (1-D -> one row)."""
    A = np.asarray(H.entries if isinstance(H, ChannelMatrix) else H, dtype=complex)
    if A.ndim == 1:
        A = A[np.newaxis, :]
    if A.ndim != 2:
        raise ValueError(f"expected a channel vector or matrix, got ndim={A.ndim}")
    return A


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent per-trial random stream derived from (seed, trial index).

    Uses a spawned SeedSequence so that parallel Monte Carlo trials get
    statistically independent, reproducible streams.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def gen_los(M: int, angles: Sequence[float]) -> ChannelMatrix:
    """Line-of-sight channel of a half-wavelength uniform linear array.

    Entry (k, m) is exp(-j * pi * cos(theta_k) * m), so every entry has unit
    modulus. Angles are in radians and must lie strictly inside (0, pi);
    endfire directions are rejected.
    """
    if M < 1:
        raise ValueError("antenna count M must be >= 1")
    theta = np.asarray(angles, dtype=float)
    if theta.ndim != 1 or theta.size == 0:
        raise ValueError("angles must be a non-empty 1-D sequence")
    if np.any(theta <= 0.0) or np.any(theta >= np.pi):
        raise ValueError("angles must lie in the open interval (0, pi)")
    m = np.arange(M)
    H = np.exp(-1j * np.pi * np.cos(theta)[:, None] * m[None, :])
    return ChannelMatrix(H, LosProvenance(tuple(theta.tolist())))


def gen_nlos(M: int, K: int, rng: Union[int, np.random.Generator]) -> ChannelMatrix:
    """i.i.d. Rayleigh-fading channel, entries ~ CN(0, 1).

    Each entry is (a + j*b)/sqrt(2) with a, b independent standard normals
    drawn from ``rng`` (real parts first, then imaginary parts), so a given
    seed reproduces the ensemble bit-exactly.
    """
    if M < 1 or K < 1:
        raise ValueError("M and K must be >= 1")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    gen = np.random.default_rng(rng) if seed is not None else rng
    re = gen.standard_normal((K, M))
    im = gen.standard_normal((K, M))
    H = (re + 1j * im) / np.sqrt(2.0)
    return ChannelMatrix(H, NlosProvenance(int(seed)) if seed is not None else None)


def evaluate_sinr(H, W, sigma_nu: float) -> np.ndarray:
    """Per-user SINR of precoder W over channel H.

    SINR_k = |[H W^T]_{k,k}|^2 / (sum_{k' != k} |[H W^T]_{k,k'}|^2 + sigma_nu^2).
    For K = 1 this is the SNR |h . w|^2 / sigma_nu^2.
    """
    Ha = as_channel_array(H)
    Wa = as_channel_array(W)
    if Ha.shape != Wa.shape:
        raise ValueError(f"H and W dimensions differ: {Ha.shape} vs {Wa.shape}")
    A = Ha @ Wa.T  # (k, k') = response of user k to the weights of user k'
    gains = np.abs(A) ** 2
    signal = np.diag(gains)
    interference = gains.sum(axis=1) - signal
    return signal / (interference + sigma_nu**2)
