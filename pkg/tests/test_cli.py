import json

import numpy as np
import pytest

from papre.cli import main

JSON_KEYS = {"precoder", "W_real", "W_imag", "p_m", "p_tx",
             "p_cons_normalized", "active_count", "sinr"}


def write_cfg(tmp_path, name="exp.cfg", **fields):
    base = {"scenario": "antenna_profile", "channel": "nlos", "pair": "zf",
            "m_list": "8", "k": "2", "gamma_db": "10", "sigma_nu": "1",
            "trials": "1", "seed": "5"}
    base.update({k: str(v) for k, v in fields.items()})
    path = tmp_path / name
    path.write_text("".join(f"{k} = {v}\n" for k, v in base.items()))
    return path


def test_precode_json_contract(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    assert main(["precode", "--config", str(cfg)]) == 0
    records = json.loads(capsys.readouterr().out)
    assert [r["precoder"] for r in records] == ["zf", "zf-eff"]
    for rec in records:
        assert set(rec) == JSON_KEYS
        W = np.array(rec["W_real"]) + 1j * np.array(rec["W_imag"])
        assert W.shape == (2, 8)
        assert rec["p_tx"] == pytest.approx(np.sum(np.abs(W) ** 2))
        assert len(rec["p_m"]) == 8 and len(rec["sinr"]) == 2
    assert records[1]["p_cons_normalized"] <= records[0]["p_cons_normalized"] + 1e-6


def test_precode_dimension_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, k="9", m_list="8")
    code = main(["precode", "--config", str(cfg)])
    assert code != 0
    err = capsys.readouterr().err
    assert "antenna" in err and "9" in err


def test_sweep_csv_contract(tmp_path):
    cfg = write_cfg(tmp_path, scenario="single_user_pcg", pair="mrt",
                    k="1", m_list="8 16", trials="50")
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    header_idx = next(i for i, l in enumerate(lines) if not l.startswith("#"))
    assert lines[header_idx] == "M,mean_pcg,stderr,trials,failures"
    assert len(lines) == header_idx + 3


def test_profile_deterministic(tmp_path):
    cfg = write_cfg(tmp_path)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["profile", "--config", str(cfg), "--seed", "7", "--out", str(out1)]) == 0
    assert main(["profile", "--config", str(cfg), "--seed", "7", "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_seed_override_changes_output(tmp_path):
    cfg = write_cfg(tmp_path)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["profile", "--config", str(cfg), "--seed", "1", "--out", str(out1)])
    main(["profile", "--config", str(cfg), "--seed", "2", "--out", str(out2)])
    assert out1.read_text() != out2.read_text()


def test_trials_override(tmp_path):
    cfg = write_cfg(tmp_path, scenario="single_user_pcg", pair="mrt",
                    k="1", m_list="8", trials="50")
    out = tmp_path / "sweep.csv"
    main(["sweep", "--config", str(cfg), "--trials", "9", "--out", str(out)])
    assert out.read_text().strip().splitlines()[-1].split(",")[3] == "9"


def test_missing_config_file(tmp_path, capsys):
    assert main(["sweep", "--config", str(tmp_path / "nope.cfg")]) == 2
    assert "config error" in capsys.readouterr().err


def test_malformed_config(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("scenario antenna_profile\n")
    assert main(["sweep", "--config", str(path)]) == 2
    assert "key = value" in capsys.readouterr().err


def test_unknown_key(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("scenario = single_user_pcg\nbogus = 1\n")
    assert main(["sweep", "--config", str(path)]) == 2


def test_unknown_flag(tmp_path):
    with pytest.raises(SystemExit):
        main(["sweep", "--config", "x", "--frobnicate"])
