"""Builders mapping each precoder design program onto a ConvexProblem.

All SINR / SNR targets here are linear; dB values are converted at the CLI /
estimator boundary.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from .channel import TargetSpec, as_channel_array
from .closed_form import rzf_slack
from .solver import (
    AffineEquality,
    ConvexProblem,
    FrobeniusBall,
    HalfSpace,
    PerAntennaBall,
    SocSinr,
)


def build_mrt_eff(h, gamma: float, sigma_nu: float,
                  p_max: Optional[float] = None) -> ConvexProblem:
    """Single-user consumed-power minimization under an SNR target and optional cap.

    The useful term is rotated real (a receiver-side phasor), so the SNR
    constraint becomes the half-space Re(h . w^T) >= gamma^{1/2} sigma_nu.
    """
    hv = np.asarray(h, dtype=complex).ravel()
    constraints = [HalfSpace(hv, np.sqrt(gamma) * sigma_nu)]
    if p_max is not None:
        constraints.append(PerAntennaBall(p_max))
    return ConvexProblem(shape=(1, hv.size), objective="l1", constraints=constraints)


def build_sinr_eff(H, targets: TargetSpec) -> ConvexProblem:
    """Multi-user consumed-power minimization under per-user SINR targets."""
    Ha = as_channel_array(H)
    K, M = Ha.shape
    if targets.n_users != K:
        raise ValueError("targets and channel user counts differ")
    constraints = [
        SocSinr(Ha[k], k, targets.gammas[k], targets.sigma_nu) for k in range(K)
    ]
    if targets.p_max_cap is not None:
        constraints.append(PerAntennaBall(targets.p_max_cap))
    return ConvexProblem(shape=(K, M), objective="group_l21", constraints=constraints)


def build_zf_eff(H, targets: TargetSpec) -> ConvexProblem:
    """Consumed-power minimization with hard zero-interference equality constraints."""
    Ha = as_channel_array(H)
    K, M = Ha.shape
    if targets.n_users != K:
        raise ValueError("targets and channel user counts differ")
    if K > M:
        raise ValueError(f"zero forcing requires K <= M, got K={K}, M={M}")
    constraints = [AffineEquality(Ha, targets.rhs_matrix())]
    if targets.p_max_cap is not None:
        constraints.append(PerAntennaBall(targets.p_max_cap))
    return ConvexProblem(shape=(K, M), objective="group_l21", constraints=constraints)


def build_rzf_eff(H, targets: TargetSpec,
                  xi: Optional[float] = None) -> ConvexProblem:
    """Consumed-power minimization inside the RZF interference-leakage ball.

    The ball radius is sqrt(xi) with xi chosen so the conventional RZF closed
    form sits exactly on the boundary (feasible reference point).
    """
    Ha = as_channel_array(H)
    K, M = Ha.shape
    if targets.n_users != K:
        raise ValueError("targets and channel user counts differ")
    if K > M:
        raise ValueError(f"RZF requires K <= M, got K={K}, M={M}")
    if xi is None:
        xi = rzf_slack(Ha, targets).xi
    constraints = [FrobeniusBall(Ha, targets.rhs_matrix(), np.sqrt(xi))]
    if targets.p_max_cap is not None:
        constraints.append(PerAntennaBall(targets.p_max_cap))
    return ConvexProblem(shape=(K, M), objective="group_l21", constraints=constraints)


def build_sinr_conventional(H, targets: TargetSpec) -> ConvexProblem:
    """Transmit-power minimization under the same SINR cones, for cross-checks."""
    problem = build_sinr_eff(H, targets)
    problem.objective = "frobenius_sq"
    return problem
