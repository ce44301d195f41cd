"""Closed-form precoders: MRT, consumption-efficient MRT, ZF, and RZF.

Single-user precoders take and return 1-D vectors of length M; multi-user
precoders work on K x M matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .channel import TargetSpec, as_channel_array

FEASIBILITY_RTOL = 1e-12


class InfeasibleTargetError(ValueError):
    """Raised when the requested SNR cannot be met even with every antenna saturated."""


@dataclass(frozen=True)
class GreedyAllocation:
    """Support of the efficient-MRT solution: saturated, marginal, and inactive antennas."""

    saturated_set: np.ndarray  # the L-1 strongest-gain antenna indices
    marginal_index: int
    marginal_amplitude: float
    inactive_set: np.ndarray


@dataclass(frozen=True)
class RzfSlack:
    xi: float
    eigenvalues: np.ndarray  # eigenvalues of H H^dagger, ascending


def mrt(h, gamma: float, sigma_nu: float) -> np.ndarray:
    """Maximum ratio transmission meeting the SNR target gamma with equality.

    w = sqrt(p_tx) * h^* / ||h||_2 with p_tx = gamma * sigma_nu^2 / ||h||_2^2.
    """
    hv = np.asarray(h, dtype=complex).ravel()
    norm = np.linalg.norm(hv)
    if norm == 0.0:
        raise ValueError("channel vector is all zero")
    if gamma < 0:
        raise ValueError("SNR target must be non-negative")
    p_tx = gamma * sigma_nu**2 / norm**2
    return np.sqrt(p_tx) * hv.conj() / norm


def _gain_order(gains: np.ndarray) -> np.ndarray:
    # descending gain, ties broken by lowest antenna index
    return np.lexsort((np.arange(gains.size), -gains))


def mrt_efficient(h, gamma: float, sigma_nu: float,
                  p_max: Optional[float] = None) -> Tuple[np.ndarray, GreedyAllocation]:
    """Consumption-efficient MRT: saturate the strongest-gain antennas greedily.

    With a per-antenna cap, antennas are filled to sqrt(p_max) in decreasing
    gain order until the target amplitude gamma^{1/2} sigma_nu is reached; the
    last (marginal) antenna gets the remainder. Without a cap all power goes to
    the single strongest antenna. Raises InfeasibleTargetError when saturating
    every antenna still falls short of the target.
    """
    hv = np.asarray(h, dtype=complex).ravel()
    gains = np.abs(hv)
    if not np.any(gains > 0):
        raise ValueError("channel vector is all zero")
    if gamma < 0:
        raise ValueError("SNR target must be non-negative")
    target = np.sqrt(gamma) * sigma_nu
    order = _gain_order(gains)
    w = np.zeros_like(hv)
    phases = np.exp(-1j * np.angle(hv))

    if target == 0.0:
        alloc = GreedyAllocation(order[:0], int(order[0]), 0.0, order[1:].copy())
        return w, alloc

    if p_max is None:
        m_hat = int(order[0])
        amp = target / gains[m_hat]
        w[m_hat] = phases[m_hat] * amp
        return w, GreedyAllocation(order[:0], m_hat, float(amp), order[1:].copy())

    amp_cap = np.sqrt(p_max)
    reach = amp_cap * np.cumsum(gains[order])  # achievable amplitude with the top-L antennas
    max_reach = reach[-1]
    if target > max_reach * (1.0 + FEASIBILITY_RTOL):
        raise InfeasibleTargetError(
            f"target amplitude {target:.6g} exceeds the saturated maximum {max_reach:.6g}")
    L = int(np.searchsorted(reach, target * (1.0 - FEASIBILITY_RTOL)) + 1)
    L = min(L, gains.size)
    saturated = order[: L - 1]
    m_tilde = int(order[L - 1])
    zeta = amp_cap * gains[saturated].sum()
    amp = min((target - zeta) / gains[m_tilde], amp_cap)
    w[saturated] = phases[saturated] * amp_cap
    w[m_tilde] = phases[m_tilde] * amp
    return w, GreedyAllocation(saturated.copy(), m_tilde, float(amp), order[L:].copy())


def zf(H, targets: TargetSpec) -> np.ndarray:
    """Zero-forcing precoder: W^T = H^dag (H H^dag)^{-1} D_gamma^{1/2} sigma_nu."""
    Ha = as_channel_array(H)
    K, M = Ha.shape
    if targets.n_users != K:
        raise ValueError("targets and channel user counts differ")
    if K > M:
        raise ValueError(f"zero forcing requires K <= M, got K={K}, M={M}")
    G = Ha @ Ha.conj().T
    cond = np.linalg.cond(G)
    if not np.isfinite(cond) or cond > 1e12:
        raise np.linalg.LinAlgError("channel matrix is rank deficient")
    Wt = Ha.conj().T @ np.linalg.solve(G, targets.rhs_matrix())
    return Wt.T


def rzf(H, targets: TargetSpec) -> np.ndarray:
    """Regularized ZF: W^T = H^dag (H H^dag + sigma_nu^2 I)^{-1} D_gamma^{1/2} sigma_nu."""
    Ha = as_channel_array(H)
    K, M = Ha.shape
    if targets.n_users != K:
        raise ValueError("targets and channel user counts differ")
    if K > M:
        raise ValueError(f"RZF requires K <= M, got K={K}, M={M}")
    G = Ha @ Ha.conj().T + targets.sigma_nu**2 * np.eye(K)
    Wt = Ha.conj().T @ np.linalg.solve(G, targets.rhs_matrix())
    return Wt.T


def rzf_slack(H, targets: TargetSpec) -> RzfSlack:
    """Interference-leakage budget xi that makes the RZF closed form optimal.

    xi = sigma_nu^2 * tr[D_gamma ((1/sigma_nu^2) H H^dag + I)^{-2}], evaluated
    with the full matrix inverse so it equals the RZF residual for any targets.
    """
    Ha = as_channel_array(H)
    K, M = Ha.shape
    if targets.n_users != K:
        raise ValueError("targets and channel user counts differ")
    if K > M:
        raise ValueError(f"RZF requires K <= M, got K={K}, M={M}")
    G = Ha @ Ha.conj().T
    lam, U = np.linalg.eigh(G)
    inv2 = U @ np.diag(1.0 / (lam / targets.sigma_nu**2 + 1.0) ** 2) @ U.conj().T
    xi = targets.sigma_nu**2 * np.trace(np.diag(targets.gammas) @ inv2).real
    return RzfSlack(xi=float(max(xi, 0.0)), eigenvalues=lam)
