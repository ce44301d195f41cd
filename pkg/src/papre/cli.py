"""Command-line interface: single-instance precoding, PCG sweeps, antenna profiles."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

import numpy as np

from . import closed_form
from .channel import evaluate_sinr
from .closed_form import InfeasibleTargetError
from .experiments import (
    ExperimentConfig,
    _conventional,
    _draw_channel,
    _efficient_problem,
    parse_config,
    profile_csv,
    run_antenna_profile,
    run_multi_user_pcg,
    run_single_user_pcg,
    sweep_csv,
)
from .power import power_report
from .solver import SolverConfig, solve


def _precoder_record(name: str, W: np.ndarray, H: np.ndarray, sigma_nu: float) -> dict:
    rep = power_report(W)
    return {
        "precoder": name,
        "W_real": np.asarray(W).real.tolist(),
        "W_imag": np.asarray(W).imag.tolist(),
        "p_m": rep.per_antenna.tolist(),
        "p_tx": rep.p_tx,
        "p_cons_normalized": rep.p_cons_normalized,
        "active_count": rep.active_count,
        "sinr": evaluate_sinr(H, W, sigma_nu).tolist(),
    }


def _cmd_precode(cfg: ExperimentConfig, out) -> int:
    H = _draw_channel(cfg, cfg.m_list[0], trial=0)
    targets = cfg.targets()
    W_conv = _conventional(cfg, H, targets)
    if cfg.pair == "mrt":
        W_eff, _ = closed_form.mrt_efficient(
            H[0], targets.gammas[0], targets.sigma_nu, targets.p_max_cap)
        W_eff = W_eff[np.newaxis, :]
    else:
        report = solve(_efficient_problem(cfg, H, targets))
        if report.status == "infeasible":
            raise InfeasibleTargetError("efficient precoder program is infeasible")
        if report.status != "optimal":
            raise RuntimeError(f"solver did not converge (status {report.status})")
        W_eff = report.solution
    records = [
        _precoder_record(cfg.pair, W_conv, H, cfg.sigma_nu),
        _precoder_record(cfg.pair + "-eff", W_eff, H, cfg.sigma_nu),
    ]
    out.write(json.dumps(records, indent=2) + "\n")
    return 0


def _cmd_sweep(cfg: ExperimentConfig, out) -> int:
    if cfg.scenario == "single_user_pcg":
        result = run_single_user_pcg(cfg)
    else:
        result = run_multi_user_pcg(cfg)
    out.write(sweep_csv(result))
    return 0


def _cmd_profile(cfg: ExperimentConfig, out) -> int:
    out.write(profile_csv(run_antenna_profile(cfg)))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="papre",
        description="Power-amplifier-aware precoder design and experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("precode", "design one instance and emit precoder matrices as JSON"),
        ("sweep", "run a PCG sweep and emit CSV"),
        ("profile", "emit the per-antenna power profile of one realization as CSV"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="flat key=value config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--trials", type=int, default=None, help="override the trial count")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
    return parser


def main(argv: Optional[list] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.seed is not None:
            cfg = ExperimentConfig(**{**cfg.__dict__, "seed": args.seed})
        if args.trials is not None:
            cfg = ExperimentConfig(**{**cfg.__dict__, "trials": args.trials})
    except (OSError, ValueError) as exc:
        print(f"papre: config error: {exc}", file=sys.stderr)
        return 2

    handler = {"precode": _cmd_precode, "sweep": _cmd_sweep, "profile": _cmd_profile}[args.command]
    try:
        if args.out is None:
            return handler(cfg, sys.stdout)
        with open(args.out, "w", encoding="utf-8") as fh:
            return handler(cfg, fh)
    except (InfeasibleTargetError, RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"papre: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
