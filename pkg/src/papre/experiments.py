"""Seeded Monte Carlo experiment runner for the power-consumption-gain studies.

Scenarios: ``single_user_pcg`` (closed-form PCG averaged over fading draws),
``multi_user_pcg`` (conventional vs solver-based efficient precoder, PCG ratio
per trial), and ``antenna_profile`` (per-antenna power of one realization).
Trials run in parallel with per-trial derived seeds; results are aggregated in
trial order, so outputs are independent of worker scheduling. The worker count
comes from the PAPRE_WORKERS environment variable (default 1 = serial).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from . import closed_form
from .channel import TargetSpec, db_to_linear, gen_los, gen_nlos, trial_rng
from .power import active_antennas, pcg_ratio, pcg_single_user, per_antenna_power
from .problems import build_rzf_eff, build_zf_eff
from .solver import SolverConfig, solve

SCENARIOS = ("single_user_pcg", "multi_user_pcg", "antenna_profile")
CHANNELS = ("los", "nlos")
PAIRS = ("mrt", "zf", "rzf")
WORKERS_ENV = "PAPRE_WORKERS"

# LOS user angles are drawn uniformly from this interval (radians); the
# endpoints keep clear of the degenerate endfire directions
LOS_ANGLE_LOW = np.pi / 36
LOS_ANGLE_HIGH = 35 * np.pi / 36

MAX_FAILURE_FRACTION = 0.01


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    channel: str = "nlos"
    m_list: Tuple[int, ...] = (64,)
    k: int = 1
    gamma_db: float = 10.0
    sigma_nu: float = 1.0
    p_max_cap: Optional[float] = None
    trials: int = 1000
    seed: int = 0
    pair: str = "zf"  # conventional/efficient precoder family

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.channel not in CHANNELS:
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.pair not in PAIRS:
            raise ValueError(f"unknown precoder pair {self.pair!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.m_list or any(m < 1 for m in self.m_list):
            raise ValueError("m_list must contain positive antenna counts")
        if any(self.k > m for m in self.m_list):
            raise ValueError(f"user count k={self.k} exceeds an antenna count in {self.m_list}")

    def targets(self) -> TargetSpec:
        gammas = np.full(self.k, db_to_linear(self.gamma_db))
        return TargetSpec(gammas=gammas, sigma_nu=self.sigma_nu, p_max_cap=self.p_max_cap)


@dataclass(frozen=True)
class SweepRow:
    m: int
    mean_pcg: float
    stderr: float
    trials: int
    failures: int


@dataclass(frozen=True)
class SweepResult:
    rows: List[SweepRow]
    config: ExperimentConfig


def _n_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def _draw_channel(cfg: ExperimentConfig, M: int, trial: int) -> np.ndarray:
    rng = trial_rng(cfg.seed, trial)
    if cfg.channel == "los":
        angles = rng.uniform(LOS_ANGLE_LOW, LOS_ANGLE_HIGH, size=cfg.k)
        return gen_los(M, angles).entries
    return gen_nlos(M, cfg.k, rng).entries


def _conventional(cfg: ExperimentConfig, H: np.ndarray, targets: TargetSpec) -> np.ndarray:
    if cfg.pair == "zf":
        return closed_form.zf(H, targets)
    if cfg.pair == "rzf":
        return closed_form.rzf(H, targets)
    return closed_form.mrt(H[0], targets.gammas[0], targets.sigma_nu)[np.newaxis, :]


def _efficient_problem(cfg: ExperimentConfig, H: np.ndarray, targets: TargetSpec):
    if cfg.pair == "rzf":
        return build_rzf_eff(H, targets)
    return build_zf_eff(H, targets)


def run_single_user_pcg(cfg: ExperimentConfig) -> SweepResult:
    """Closed-form single-user PCG, averaged per antenna count."""
    if cfg.scenario != "single_user_pcg":
        raise ValueError("config scenario is not single_user_pcg")
    if cfg.k != 1:
        raise ValueError("single-user sweep requires k = 1")
    rows = []
    for m_idx, M in enumerate(cfg.m_list):
        # one derived stream per (antenna count, trial); vectorized over trials
        rng = trial_rng(cfg.seed, m_idx)
        if cfg.channel == "los":
            pcgs = np.ones(cfg.trials)
        else:
            re = rng.standard_normal((cfg.trials, M))
            im = rng.standard_normal((cfg.trials, M))
            a = np.abs(re + 1j * im) / np.sqrt(2.0)
            pcgs = a.max(axis=1) * a.sum(axis=1) / np.sum(a**2, axis=1)
        rows.append(SweepRow(
            m=M,
            mean_pcg=float(pcgs.mean()),
            stderr=float(pcgs.std(ddof=1) / np.sqrt(cfg.trials)) if cfg.trials > 1 else 0.0,
            trials=cfg.trials,
            failures=0,
        ))
    return SweepResult(rows=rows, config=cfg)


def _multi_user_trial(cfg: ExperimentConfig, M: int, trial: int,
                      solver: SolverConfig) -> Optional[float]:
    H = _draw_channel(cfg, M, trial)
    targets = cfg.targets()
    W_conv = _conventional(cfg, H, targets)
    report = solve(_efficient_problem(cfg, H, targets), solver)
    if report.status != "optimal":
        return None
    return pcg_ratio(W_conv, report.solution)


def run_multi_user_pcg(cfg: ExperimentConfig,
                       solver: Optional[SolverConfig] = None) -> SweepResult:
    """Conventional vs efficient precoder PCG per trial, aggregated per M."""
    if cfg.scenario != "multi_user_pcg":
        raise ValueError("config scenario is not multi_user_pcg")
    if cfg.pair == "mrt":
        raise ValueError("multi-user sweep requires the zf or rzf pair")
    solver = solver or SolverConfig()
    runner = Parallel(n_jobs=_n_workers())
    rows = []
    base = 0
    for M in cfg.m_list:
        pcgs = runner(
            delayed(_multi_user_trial)(cfg, M, base + t, solver) for t in range(cfg.trials))
        base += cfg.trials  # disjoint trial indices per antenna count
        ok = np.array([p for p in pcgs if p is not None])
        failures = cfg.trials - ok.size
        if failures > MAX_FAILURE_FRACTION * cfg.trials:
            raise RuntimeError(
                f"{failures}/{cfg.trials} non-converged solves at M={M}; results unreliable")
        rows.append(SweepRow(
            m=M,
            mean_pcg=float(ok.mean()),
            stderr=float(ok.std(ddof=1) / np.sqrt(ok.size)) if ok.size > 1 else 0.0,
            trials=int(ok.size),
            failures=int(failures),
        ))
    return SweepResult(rows=rows, config=cfg)


@dataclass(frozen=True)
class ProfileResult:
    per_antenna_conventional: np.ndarray
    per_antenna_efficient: np.ndarray
    active_conventional: int
    active_efficient: int
    config: ExperimentConfig


def run_antenna_profile(cfg: ExperimentConfig,
                        solver: Optional[SolverConfig] = None,
                        trial: int = 0) -> ProfileResult:
    """Per-antenna transmit power of one channel realization, both precoders."""
    if cfg.scenario != "antenna_profile":
        raise ValueError("config scenario is not antenna_profile")
    if cfg.pair == "mrt" and cfg.k != 1:
        raise ValueError("mrt profile requires k = 1")
    M = cfg.m_list[0]
    H = _draw_channel(cfg, M, trial)
    targets = cfg.targets()
    W_conv = _conventional(cfg, H, targets)
    if cfg.pair == "mrt":
        W_eff, _ = closed_form.mrt_efficient(
            H[0], targets.gammas[0], targets.sigma_nu, targets.p_max_cap)
        W_eff = W_eff[np.newaxis, :]
    else:
        report = solve(_efficient_problem(cfg, H, targets), solver or SolverConfig())
        if report.status != "optimal":
            raise RuntimeError(f"efficient precoder solve failed: status {report.status} "
                               f"after {report.iterations} iterations")
        W_eff = report.solution
    return ProfileResult(
        per_antenna_conventional=per_antenna_power(W_conv),
        per_antenna_efficient=per_antenna_power(W_eff),
        active_conventional=active_antennas(W_conv)[0],
        active_efficient=active_antennas(W_eff)[0],
        config=cfg,
    )


# ---------------------------------------------------------------------------
# config-file and CSV plumbing
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.12g}"


def parse_config(path) -> ExperimentConfig:
    """Read a flat ``key = value`` config file into an ExperimentConfig."""
    fields = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        fields[key] = value
    return config_from_fields(fields, source=str(path))


def config_from_fields(fields: dict, source: str = "<config>") -> ExperimentConfig:
    known = {
        "scenario": str, "channel": str, "pair": str,
        "k": int, "trials": int, "seed": int,
        "gamma_db": float, "sigma_nu": float, "p_max_cap": float,
    }
    kwargs = {}
    for key, value in fields.items():
        if key == "m_list":
            kwargs["m_list"] = tuple(int(tok) for tok in value.split())
        elif key in known:
            kwargs[key] = known[key](value)
        else:
            raise ValueError(f"{source}: unknown config key {key!r}")
    if "scenario" not in kwargs:
        raise ValueError(f"{source}: missing required key 'scenario'")
    return ExperimentConfig(**kwargs)


def sweep_csv(result: SweepResult) -> str:
    cfg = result.config
    lines = [
        f"# scenario={cfg.scenario} channel={cfg.channel} pair={cfg.pair} "
        f"k={cfg.k} gamma_db={_fmt(cfg.gamma_db)} sigma_nu={_fmt(cfg.sigma_nu)} "
        f"p_max_cap={'none' if cfg.p_max_cap is None else _fmt(cfg.p_max_cap)} seed={cfg.seed}",
    ]
    if cfg.channel == "los":
        lines.append(f"# los_angles=uniform({_fmt(LOS_ANGLE_LOW)},{_fmt(LOS_ANGLE_HIGH)})")
    lines.append("M,mean_pcg,stderr,trials,failures")
    for row in result.rows:
        lines.append(f"{row.m},{_fmt(row.mean_pcg)},{_fmt(row.stderr)},{row.trials},{row.failures}")
    return "\n".join(lines) + "\n"


def profile_csv(result: ProfileResult) -> str:
    cfg = result.config
    lines = [
        f"# scenario={cfg.scenario} channel={cfg.channel} pair={cfg.pair} "
        f"k={cfg.k} M={cfg.m_list[0]} gamma_db={_fmt(cfg.gamma_db)} "
        f"sigma_nu={_fmt(cfg.sigma_nu)} seed={cfg.seed}",
        f"# active_conventional={result.active_conventional} "
        f"active_efficient={result.active_efficient}",
        "antenna,p_conventional,p_efficient",
    ]
    for m, (pc, pe) in enumerate(zip(result.per_antenna_conventional,
                                     result.per_antenna_efficient)):
        lines.append(f"{m},{_fmt(pc)},{_fmt(pe)}")
    return "\n".join(lines) + "\n"
