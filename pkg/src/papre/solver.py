"""Consensus ADMM for group-sparse precoder programs.

The solver minimizes an L2,1 (or L1, or squared-Frobenius) objective over an
intersection of constraint sets, keeping one copy of the K x M complex
variable per set plus one for the objective prox. Every supported set admits
an exact Euclidean projection, so each ADMM block update is closed form (up
to a scalar root find for the ball and SINR-cone sets).

Complex variables are handled directly in complex arithmetic; the Euclidean
geometry is that of the stacked real/imaginary parts, and the column groups
of the L2,1 objective bind both parts of each antenna column together.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq


# ---------------------------------------------------------------------------
# proximal / projection primitives
# ---------------------------------------------------------------------------

def group_soft_threshold(W: np.ndarray, lam: float) -> np.ndarray:
    """Block soft-thresholding: scale column m by max(0, 1 - lam/||w_m||)."""
    if lam < 0:
        raise ValueError("threshold must be non-negative")
    W = np.asarray(W)
    norms = np.linalg.norm(W, axis=0)
    scale = np.zeros_like(norms)
    nz = norms > 0
    scale[nz] = np.maximum(0.0, 1.0 - lam / norms[nz])
    return W * scale[np.newaxis, :]


def project_soc(x: np.ndarray, t: float) -> Tuple[np.ndarray, float]:
    """Euclidean projection onto the second-order cone {(x, t): ||x||_2 <= t}."""
    x = np.asarray(x)
    nx = np.linalg.norm(x)
    if nx <= t:
        return x.copy(), float(t)
    if nx <= -t:
        return np.zeros_like(x), 0.0
    c = 0.5 * (1.0 + t / nx)
    return c * x, float(c * nx)


def _project_scaled_offset_cone(x: np.ndarray, t: float, alpha: float,
                                offset: float) -> Tuple[np.ndarray, float]:
    """Project (x, t) onto {(x, t): alpha * sqrt(||x||^2 + offset^2) <= t}.

    With offset = 0 and alpha = 1 this is the plain SOC. The projection keeps
    x on the ray through the input (x -> beta * x, beta in [0, 1]) and reduces
    to a scalar root find.
    """
    x = np.asarray(x)
    r = np.linalg.norm(x)
    if t >= alpha * np.hypot(r, offset):
        return x.copy(), float(t)
    if alpha == 0.0 or r == 0.0:
        return x.copy(), float(max(t, alpha * offset))
    if offset == 0.0:
        if t <= -r / alpha:
            return np.zeros_like(x), 0.0
        beta = (1.0 + alpha * t / r) / (alpha**2 + 1.0)
        return beta * x, float(alpha * beta * r)

    def stationarity(beta):
        s = np.hypot(beta * r, offset)
        return s * ((alpha**2 + 1.0) * beta - 1.0) / (alpha * beta) - t

    lo = 1e-12
    while stationarity(lo) > 0:  # root can sit below lo for extremely negative t
        lo *= 1e-6
    beta = brentq(stationarity, lo, 1.0, xtol=1e-15, rtol=8.9e-16)
    return beta * x, float(alpha * np.hypot(beta * r, offset))


# ---------------------------------------------------------------------------
# constraint sets
# ---------------------------------------------------------------------------

class Constraint:
    """A convex set of K x M complex matrices with an exact projection."""

    def project(self, W: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def violation(self, W: np.ndarray) -> float:
        """Non-negative feasibility gap, zero on the set."""
        raise NotImplementedError

    def check_shape(self, shape: Tuple[int, int]) -> None:
        pass


class AffineEquality(Constraint):
    """{W : A W^T = B}, projected through the pseudo-inverse of A."""

    def __init__(self, A: np.ndarray, B: np.ndarray):
        self.A = np.atleast_2d(np.asarray(A, dtype=complex))
        self.B = np.atleast_2d(np.asarray(B, dtype=complex))
        G = self.A @ self.A.conj().T
        cond = np.linalg.cond(G)
        if not np.isfinite(cond) or cond > 1e12:
            raise np.linalg.LinAlgError("affine constraint matrix is rank deficient")
        # A^dag (A A^dag)^{-1}, cached; applying it to the residual is the projection step
        self._lsq = self.A.conj().T @ np.linalg.inv(G)

    def project(self, W):
        Wt = W.T
        return (Wt - self._lsq @ (self.A @ Wt - self.B)).T

    def violation(self, W):
        scale = max(np.linalg.norm(self.B), 1.0)
        return float(np.linalg.norm(self.A @ W.T - self.B) / scale)

    def check_shape(self, shape):
        K, M = shape
        if self.A.shape[1] != M or self.B.shape != (self.A.shape[0], K):
            raise ValueError("affine constraint dimensions inconsistent with variable shape")


class FrobeniusBall(Constraint):
    """{W : ||A W^T - B||_F <= radius}.

    The projection shrinks the residual through the eigenbasis of A A^dag; the
    shrinkage parameter solves a scalar secular equation.
    """

    def __init__(self, A: np.ndarray, B: np.ndarray, radius: float):
        if radius < 0:
            raise ValueError("radius must be non-negative")
        self.A = np.atleast_2d(np.asarray(A, dtype=complex))
        self.B = np.atleast_2d(np.asarray(B, dtype=complex))
        self.radius = float(radius)
        self._lam, self._U = np.linalg.eigh(self.A @ self.A.conj().T)
        self._Ad = self.A.conj().T

    def project(self, W):
        Wt = W.T
        E = self.A @ Wt - self.B
        if np.linalg.norm(E) <= self.radius:
            return W.copy()
        Et = self._U.conj().T @ E
        row_sq = np.sum(np.abs(Et) ** 2, axis=1)
        r2 = self.radius**2

        def excess(mu):
            return float(np.sum(row_sq / (1.0 + mu * self._lam) ** 2) - r2)

        hi = 1.0
        while excess(hi) > 0:
            hi *= 4.0
            if hi > 1e30:
                raise RuntimeError("ball projection failed to bracket the shrinkage parameter")
        mu = brentq(excess, 0.0, hi, xtol=1e-300, rtol=8.9e-16, maxiter=200)
        R = self._U @ (Et / (1.0 + mu * self._lam)[:, None])
        return (Wt - mu * (self._Ad @ R)).T

    def violation(self, W):
        scale = max(self.radius, np.linalg.norm(self.B), 1.0)
        gap = np.linalg.norm(self.A @ W.T - self.B) - self.radius
        return float(max(gap, 0.0) / scale)

    def check_shape(self, shape):
        K, M = shape
        if self.A.shape[1] != M or self.B.shape != (self.A.shape[0], K):
            raise ValueError("ball constraint dimensions inconsistent with variable shape")


class PerAntennaBall(Constraint):
    """{W : sum_k |w_{k,m}|^2 <= cap for every antenna m}."""

    def __init__(self, cap: float):
        if cap <= 0:
            raise ValueError("cap must be positive")
        self.cap = float(cap)

    def project(self, W):
        norms = np.linalg.norm(W, axis=0)
        amp = np.sqrt(self.cap)
        scale = np.ones_like(norms)
        over = norms > amp
        scale[over] = amp / norms[over]
        return W * scale[np.newaxis, :]

    def violation(self, W):
        p = np.sum(np.abs(W) ** 2, axis=0)
        return float(max(p.max() - self.cap, 0.0) / self.cap)


class HalfSpace(Constraint):
    """{W : Re(c . w^T) >= t} for a single-user (1 x M) variable."""

    def __init__(self, c: np.ndarray, t: float):
        self.c = np.asarray(c, dtype=complex).ravel()
        if not np.any(np.abs(self.c) > 0):
            raise ValueError("half-space normal is all zero")
        self.t = float(t)
        self._c_sq = float(np.sum(np.abs(self.c) ** 2))

    def project(self, W):
        w = W.ravel()
        val = float(np.real(self.c @ w))
        if val >= self.t:
            return W.copy()
        w = w + ((self.t - val) / self._c_sq) * self.c.conj()
        return w.reshape(W.shape)

    def violation(self, W):
        scale = max(abs(self.t), 1.0)
        return float(max(self.t - np.real(self.c @ W.ravel()), 0.0) / scale)

    def check_shape(self, shape):
        K, M = shape
        if K != 1 or self.c.size != M:
            raise ValueError("half-space constraint requires a 1 x M variable of matching M")


class SocSinr(Constraint):
    """SINR-target cone of one user, in second-order-cone form.

    With y_{k'} = h_k . w_{k'}^T the set is
    Re(y_k) >= sqrt(gamma_k) * ||(y_{k'} for k' != k; sigma_nu)||_2.
    The map from W to y is an isometry (up to a common factor ||h_k||) on the
    relevant subspace, so the projection happens in y-space and is pushed back
    along h_k^*.
    """

    def __init__(self, h: np.ndarray, user_index: int, gamma: float, sigma_nu: float):
        self.h = np.asarray(h, dtype=complex).ravel()
        self.user_index = int(user_index)
        if gamma < 0:
            raise ValueError("SINR target must be non-negative")
        self.gamma = float(gamma)
        self.sigma_nu = float(sigma_nu)
        self._h_sq = float(np.sum(np.abs(self.h) ** 2))
        if self._h_sq == 0.0:
            raise ValueError("user channel is all zero")

    def _split(self, y: np.ndarray):
        k = self.user_index
        others = np.delete(np.arange(y.size), k)
        return k, others

    def project(self, W):
        y = W @ self.h  # y_{k'} = h . w_{k'}
        k, others = self._split(y)
        alpha = np.sqrt(self.gamma)
        # real/imag coordinates: Im(y_k) is unconstrained and kept as is
        x = np.concatenate([y[others].real, y[others].imag])
        x_new, t_new = _project_scaled_offset_cone(x, float(y[k].real), alpha, self.sigma_nu)
        y_new = y.copy()
        n = others.size
        y_new[others] = x_new[:n] + 1j * x_new[n:]
        y_new[k] = t_new + 1j * y[k].imag
        return W + np.outer(y_new - y, self.h.conj()) / self._h_sq

    def violation(self, W):
        y = W @ self.h
        k, others = self._split(y)
        need = np.sqrt(self.gamma) * np.hypot(np.linalg.norm(y[others]), self.sigma_nu)
        return float(max(need - y[k].real, 0.0) / max(need, 1.0))

    def check_shape(self, shape):
        K, M = shape
        if self.h.size != M or not 0 <= self.user_index < K:
            raise ValueError("SINR constraint dimensions inconsistent with variable shape")


# ---------------------------------------------------------------------------
# problem description and solver
# ---------------------------------------------------------------------------

OBJECTIVES = ("group_l21", "l1", "frobenius_sq")


@dataclass
class ConvexProblem:
    shape: Tuple[int, int]
    objective: str
    constraints: List[Constraint]

    def validate(self) -> None:
        K, M = self.shape
        if K < 1 or M < 1:
            raise ValueError("variable shape must be at least 1 x 1")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"unknown objective {self.objective!r}")
        if not self.constraints:
            raise ValueError("problem needs at least one constraint")
        for c in self.constraints:
            c.check_shape(self.shape)

    def objective_value(self, W: np.ndarray) -> float:
        if self.objective == "frobenius_sq":
            return float(np.sum(np.abs(W) ** 2))
        return float(np.sum(np.linalg.norm(W, axis=0)))

    def max_violation(self, W: np.ndarray) -> float:
        return max(c.violation(W) for c in self.constraints)


@dataclass
class SolverConfig:
    rho: float = 1.0
    eps_abs: float = 1e-8
    eps_rel: float = 1e-6
    max_iters: int = 50_000
    over_relaxation: float = 1.6
    stall_window: int = 2_000

    def __post_init__(self):
        if self.rho <= 0 or self.eps_abs <= 0 or self.eps_rel <= 0:
            raise ValueError("rho and tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 1.0 <= self.over_relaxation <= 1.8:
            raise ValueError("over_relaxation must lie in [1, 1.8]")


@dataclass
class SolveReport:
    solution: np.ndarray
    iterations: int
    primal_residual: float
    dual_residual: float
    status: str  # "optimal" | "max_iters" | "infeasible"
    objective: float


def _objective_prox(kind: str, V: np.ndarray, rho: float) -> np.ndarray:
    if kind == "frobenius_sq":
        return V * (rho / (rho + 2.0))
    return group_soft_threshold(V, 1.0 / rho)


def solve(problem: ConvexProblem, config: Optional[SolverConfig] = None) -> SolveReport:
    """Consensus ADMM over the objective prox and one projection per constraint."""
    config = config or SolverConfig()
    problem.validate()
    K, M = problem.shape
    rho = config.rho
    alpha = config.over_relaxation
    n_blocks = len(problem.constraints) + 1
    dim = 2 * K * M * n_blocks  # real dimension of the stacked consensus variable

    Z = np.zeros((K, M), dtype=complex)
    X = [np.zeros_like(Z) for _ in range(n_blocks)]
    U = [np.zeros_like(Z) for _ in range(n_blocks)]

    status = "max_iters"
    r_norm = s_norm = np.inf
    window_best_r = np.inf
    window_u_scale = 0.0
    iters = 0

    for iters in range(1, config.max_iters + 1):
        Z_prev = Z
        X[0] = _objective_prox(problem.objective, Z - U[0], rho)
        for i, cons in enumerate(problem.constraints, start=1):
            X[i] = cons.project(Z - U[i])
        # over-relaxation mixes the new block iterates with the previous consensus
        Xh = [alpha * Xi + (1.0 - alpha) * Z_prev for Xi in X]
        Z = sum(Xh[i] + U[i] for i in range(n_blocks)) / n_blocks
        for i in range(n_blocks):
            U[i] = U[i] + Xh[i] - Z

        r_norm = np.sqrt(sum(np.linalg.norm(Xi - Z) ** 2 for Xi in X))
        s_norm = rho * np.sqrt(n_blocks) * np.linalg.norm(Z - Z_prev)
        x_scale = np.sqrt(sum(np.linalg.norm(Xi) ** 2 for Xi in X))
        z_scale = np.sqrt(n_blocks) * np.linalg.norm(Z)
        u_scale = rho * np.sqrt(sum(np.linalg.norm(Ui) ** 2 for Ui in U))
        eps_pri = np.sqrt(dim) * config.eps_abs + config.eps_rel * max(x_scale, z_scale)
        eps_dual = np.sqrt(dim) * config.eps_abs + config.eps_rel * u_scale

        if r_norm <= eps_pri and s_norm <= eps_dual:
            status = "optimal"
            break

        if iters % config.stall_window == 0:
            # disjoint sets leave the primal residual stuck at the inter-set gap
            # while the scaled duals grow without bound; needs a previous window
            # as a baseline, so it can fire from the second window on only
            stalled = r_norm > 0.99 * window_best_r
            diverging = window_u_scale > 0.0 and u_scale > 1.5 * window_u_scale
            if stalled and diverging and r_norm > eps_pri:
                status = "infeasible"
                break
            window_best_r = r_norm
            window_u_scale = u_scale
        window_best_r = min(window_best_r, r_norm)

    return SolveReport(
        solution=Z,
        iterations=iters,
        primal_residual=float(r_norm),
        dual_residual=float(s_norm),
        status=status,
        objective=problem.objective_value(Z),
    )
