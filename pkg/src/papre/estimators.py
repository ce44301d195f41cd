"""Scikit-learn style precoder estimators.

Each precoder is an estimator whose ``fit(H)`` designs the precoding matrix
for a channel (K x M complex array or ChannelMatrix). After fitting, ``W_``
holds the K x M precoder, ``report_`` its power metrics, and ``sinr_`` the
achieved per-user SINRs. ``transform(S)`` maps a batch of user-symbol vectors
(n x K) to antenna signals (n x M). Targets are given in dB at this boundary
and converted to linear once.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator

from . import closed_form, problems
from .channel import TargetSpec, as_channel_array, db_to_linear, evaluate_sinr
from .power import PaModel, power_report
from .solver import SolverConfig, solve


class PrecoderBase(BaseEstimator):
    """Common fit/transform machinery; subclasses implement _design(H, targets)."""

    def __init__(self, gamma_db=10.0, sigma_nu=1.0, p_max_cap=None,
                 pa_p_max=1.0, pa_eta_max=0.785):
        self.gamma_db = gamma_db
        self.sigma_nu = sigma_nu
        self.p_max_cap = p_max_cap
        self.pa_p_max = pa_p_max
        self.pa_eta_max = pa_eta_max

    requires_single_user = False

    def _targets(self, n_users: int) -> TargetSpec:
        gammas = np.full(n_users, db_to_linear(self.gamma_db))
        return TargetSpec(gammas=gammas, sigma_nu=self.sigma_nu, p_max_cap=self.p_max_cap)

    def _design(self, H: np.ndarray, targets: TargetSpec) -> np.ndarray:
        raise NotImplementedError

    def fit(self, H, y=None):
        Ha = as_channel_array(H)
        K, M = Ha.shape
        if self.requires_single_user and K != 1:
            raise ValueError(f"{type(self).__name__} is single-user only, got K={K}")
        targets = self._targets(K)
        W = self._design(Ha, targets)
        self.W_ = np.atleast_2d(W)
        self.n_users_ = K
        self.n_antennas_ = M
        self.report_ = power_report(self.W_, PaModel(self.pa_p_max, self.pa_eta_max))
        self.sinr_ = evaluate_sinr(Ha, self.W_, self.sigma_nu)
        return self

    def transform(self, S):
        S = np.asarray(S)
        if S.ndim == 1:
            S = S[np.newaxis, :]
        if S.shape[1] != self.W_.shape[0]:
            raise ValueError(f"expected {self.W_.shape[0]} user symbols, got {S.shape[1]}")
        return S @ self.W_


class MrtPrecoder(PrecoderBase):
    """Conventional maximum ratio transmission (single user)."""

    requires_single_user = True

    def _design(self, H, targets):
        return closed_form.mrt(H[0], targets.gammas[0], targets.sigma_nu)


class MrtEfficientPrecoder(PrecoderBase):
    """Consumption-efficient MRT via the greedy saturation closed form."""

    requires_single_user = True

    def _design(self, H, targets):
        w, alloc = closed_form.mrt_efficient(
            H[0], targets.gammas[0], targets.sigma_nu, targets.p_max_cap)
        self.allocation_ = alloc
        return w


class ZfPrecoder(PrecoderBase):
    """Conventional zero-forcing."""

    def _design(self, H, targets):
        return closed_form.zf(H, targets)


class RzfPrecoder(PrecoderBase):
    """Conventional regularized zero-forcing."""

    def _design(self, H, targets):
        self.slack_ = closed_form.rzf_slack(H, targets)
        return closed_form.rzf(H, targets)


class _SolverPrecoder(PrecoderBase):
    """Base for precoders obtained by solving a convex program with ADMM."""

    def __init__(self, gamma_db=10.0, sigma_nu=1.0, p_max_cap=None,
                 pa_p_max=1.0, pa_eta_max=0.785,
                 rho=1.0, eps_abs=1e-8, eps_rel=1e-6, max_iters=50_000,
                 over_relaxation=1.6):
        super().__init__(gamma_db, sigma_nu, p_max_cap, pa_p_max, pa_eta_max)
        self.rho = rho
        self.eps_abs = eps_abs
        self.eps_rel = eps_rel
        self.max_iters = max_iters
        self.over_relaxation = over_relaxation

    def _solver_config(self) -> SolverConfig:
        return SolverConfig(rho=self.rho, eps_abs=self.eps_abs, eps_rel=self.eps_rel,
                            max_iters=self.max_iters, over_relaxation=self.over_relaxation)

    def _build(self, H, targets):
        raise NotImplementedError

    def _design(self, H, targets):
        report = solve(self._build(H, targets), self._solver_config())
        self.solve_report_ = report
        if report.status == "infeasible":
            raise closed_form.InfeasibleTargetError("target constraints are infeasible")
        return report.solution


class ZfEfficientPrecoder(_SolverPrecoder):
    """Consumption-efficient ZF (group-sparse objective, hard interference nulls)."""

    def _build(self, H, targets):
        return problems.build_zf_eff(H, targets)


class RzfEfficientPrecoder(_SolverPrecoder):
    """Consumption-efficient RZF (group-sparse objective, leakage ball)."""

    def _build(self, H, targets):
        return problems.build_rzf_eff(H, targets)


class SinrEfficientPrecoder(_SolverPrecoder):
    """Consumption-efficient precoder under per-user SINR cone constraints."""

    def _build(self, H, targets):
        return problems.build_sinr_eff(H, targets)


class MrtEfficientSolverPrecoder(_SolverPrecoder):
    """Single-user efficient MRT solved numerically; oracle twin of the closed form."""

    requires_single_user = True

    def _build(self, H, targets):
        return problems.build_mrt_eff(H[0], targets.gammas[0], targets.sigma_nu,
                                      targets.p_max_cap)

    def _design(self, H, targets):
        # the closed-form feasibility test is exact; use it before iterating
        if targets.p_max_cap is not None:
            closed_form.mrt_efficient(H[0], targets.gammas[0], targets.sigma_nu,
                                      targets.p_max_cap)
        return super()._design(H, targets)
