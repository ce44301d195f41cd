import numpy as np
import pytest

from papre.experiments import (
    ExperimentConfig,
    config_from_fields,
    parse_config,
    profile_csv,
    run_antenna_profile,
    run_multi_user_pcg,
    run_single_user_pcg,
    sweep_csv,
)


def cfg_single(**kw):
    base = dict(scenario="single_user_pcg", channel="nlos", pair="mrt",
                m_list=(16, 32), k=1, trials=500, seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


def cfg_multi(**kw):
    base = dict(scenario="multi_user_pcg", channel="nlos", pair="zf",
                m_list=(16,), k=2, trials=10, seed=8)
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            cfg_single(scenario="bogus")
        with pytest.raises(ValueError):
            cfg_single(trials=0)
        with pytest.raises(ValueError):
            cfg_multi(k=20)  # exceeds every antenna count
        with pytest.raises(ValueError):
            cfg_single(channel="rice")

    def test_parse_roundtrip(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text(
            "# comment\n"
            "scenario = multi_user_pcg\n"
            "channel = los\n"
            "pair = rzf\n"
            "m_list = 8 16\n"
            "k = 2\n"
            "gamma_db = 7.5\n"
            "trials = 3\n"
            "seed = 42\n")
        cfg = parse_config(path)
        assert cfg.pair == "rzf" and cfg.m_list == (8, 16)
        assert cfg.gamma_db == 7.5 and cfg.seed == 42

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError, match="unknown config key"):
            config_from_fields({"scenario": "single_user_pcg", "wat": "1"})

    def test_missing_scenario_rejected(self):
        with pytest.raises(ValueError, match="scenario"):
            config_from_fields({"k": "1"})


class TestSingleUserSweep:
    def test_deterministic(self):
        r1 = run_single_user_pcg(cfg_single())
        r2 = run_single_user_pcg(cfg_single())
        assert sweep_csv(r1) == sweep_csv(r2)

    def test_pcg_grows_with_antennas(self):
        rows = run_single_user_pcg(cfg_single(trials=2000)).rows
        assert rows[1].mean_pcg > rows[0].mean_pcg > 1.0

    def test_m_equal_one_is_exactly_one(self):
        rows = run_single_user_pcg(cfg_single(m_list=(1,))).rows
        assert rows[0].mean_pcg == 1.0 and rows[0].stderr == 0.0

    def test_los_is_exactly_one(self):
        rows = run_single_user_pcg(cfg_single(channel="los")).rows
        assert all(r.mean_pcg == 1.0 for r in rows)

    def test_stderr_definition(self):
        row = run_single_user_pcg(cfg_single(m_list=(8,))).rows[0]
        assert row.trials == 500 and row.failures == 0
        assert 0 < row.stderr < 0.1


class TestMultiUserSweep:
    def test_runs_and_reports(self):
        rows = run_multi_user_pcg(cfg_multi()).rows
        assert rows[0].failures == 0
        assert rows[0].mean_pcg >= 1.0 - 1e-4

    def test_per_trial_pcg_at_least_one(self):
        rows = run_multi_user_pcg(cfg_multi(pair="rzf", trials=5)).rows
        assert rows[0].mean_pcg >= 1.0 - 1e-4

    def test_deterministic(self):
        a = sweep_csv(run_multi_user_pcg(cfg_multi()))
        b = sweep_csv(run_multi_user_pcg(cfg_multi()))
        assert a == b

    def test_mrt_pair_rejected(self):
        with pytest.raises(ValueError):
            run_multi_user_pcg(cfg_multi(pair="mrt", k=1))

    def test_workers_env_does_not_change_results(self, monkeypatch):
        serial = sweep_csv(run_multi_user_pcg(cfg_multi()))
        monkeypatch.setenv("PAPRE_WORKERS", "2")
        parallel = sweep_csv(run_multi_user_pcg(cfg_multi()))
        assert serial == parallel


class TestAntennaProfile:
    def test_power_bookkeeping(self):
        cfg = ExperimentConfig(scenario="antenna_profile", pair="zf",
                               m_list=(16,), k=2, trials=1, seed=9)
        res = run_antenna_profile(cfg)
        assert res.per_antenna_conventional.shape == (16,)
        # sum of per-antenna powers is the total transmit power of each precoder
        assert res.per_antenna_conventional.sum() > 0
        assert res.active_efficient <= res.active_conventional

    def test_mrt_profile_single_user(self):
        cfg = ExperimentConfig(scenario="antenna_profile", pair="mrt",
                               m_list=(16,), k=1, trials=1, seed=9)
        res = run_antenna_profile(cfg)
        # unconstrained efficient MRT concentrates on a single antenna
        assert res.active_efficient == 1

    def test_csv_format(self):
        cfg = ExperimentConfig(scenario="antenna_profile", pair="zf",
                               m_list=(8,), k=2, trials=1, seed=9)
        text = profile_csv(run_antenna_profile(cfg))
        lines = text.strip().splitlines()
        assert lines[2] == "antenna,p_conventional,p_efficient"
        assert len(lines) == 3 + 8
        first = lines[3].split(",")
        assert first[0] == "0" and len(first) == 3


class TestSweepCsv:
    def test_header_contract(self):
        text = sweep_csv(run_single_user_pcg(cfg_single(m_list=(8,), trials=10)))
        lines = text.splitlines()
        assert lines[0].startswith("#")
        assert lines[1] == "M,mean_pcg,stderr,trials,failures"
        assert lines[2].split(",")[0] == "8"

    def test_los_metadata_recorded(self):
        text = sweep_csv(run_single_user_pcg(cfg_single(channel="los", m_list=(8,), trials=10)))
        assert "los_angles=uniform" in text
