import json

import numpy as np
import pytest

from sketchuq.cli import main

from conftest import FIXTURE_BETA0, FIXTURE_X, FIXTURE_Y


@pytest.fixture
def files(write_csv):
    return {
        "x": write_csv("x.csv", FIXTURE_X),
        "y": write_csv("y.csv", FIXTURE_Y),
        "b": write_csv("b.csv", FIXTURE_BETA0),
    }


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if code == 0 else None), err


def test_solve(capsys, files):
    code, out, _ = run(capsys, "solve", "--x", files["x"], "--y", files["y"])
    assert code == 0
    assert out["betaHat"] == [1.0, 2.0]
    assert out["residualNorm"] == pytest.approx(3.0)
    assert out["cosTheta"] == pytest.approx(np.sqrt(5 / 14))


def test_solve_in_range(capsys, files, write_csv):
    y = write_csv("y0.csv", [1.0, 2.0, 0.0])
    code, out, _ = run(capsys, "solve", "--x", files["x"], "--y", y)
    assert out["residualNorm"] == pytest.approx(0, abs=1e-14)


def test_solve_malformed_csv(capsys, files, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,0\n0,oops\n0,0\n")
    code, _, err = run(capsys, "solve", "--x", bad, "--y", files["y"])
    assert code == 3
    assert "row 2, column 2" in err


def test_solve_rank_deficient(capsys, files, write_csv):
    x = write_csv("x1.csv", [[1.0, 1.0], [1.0, 1.0], [2.0, 2.0]])
    code, _, err = run(capsys, "solve", "--x", x, "--y", files["y"])
    assert code == 2 and "RankDeficientDesign" in err


def test_sketch_r1_loses_rank(capsys, files):
    code, out, _ = run(capsys, "sketch", "--x", files["x"], "--y", files["y"], "--scheme", "unif", "--r", 1, "--seed", 4)
    assert code == 0 and out["rankPreserved"] is False


def test_sketch_full_unif_matches_solve_when_rank_kept(capsys, files):
    # sampling n rows with replacement reproduces beta_hat whenever rows 1 and 2 are both drawn
    hits = 0
    for seed in range(20):
        code, out, _ = run(capsys, "sketch", "--x", files["x"], "--y", files["y"], "--scheme", "unif", "--r", 3, "--seed", seed)
        assert code == 0
        if out["rankPreserved"]:
            assert np.allclose(out["betaTilde"], out["betaHat"])
            hits += 1
    assert hits > 0


def test_sketch_reproducible(capsys, files):
    args = ["sketch", "--x", files["x"], "--y", files["y"], "--scheme", "norm", "--r", 2, "--seed", 8, "--deterministic"]
    main([str(a) for a in args])
    first = capsys.readouterr().out
    main([str(a) for a in args])
    assert capsys.readouterr().out == first


def test_seed_required(capsys, files):
    code, _, err = run(capsys, "sketch", "--x", files["x"], "--y", files["y"], "--scheme", "unif", "--r", 2)
    assert code == 2 and "--seed" in err
    code, out, _ = run(capsys, "sketch", "--x", files["x"], "--y", files["y"], "--scheme", "unif", "--r", 2, "--seed-from-entropy")
    assert code == 0 and isinstance(out["seed"], int)


def test_unknown_flag_rejected(files):
    with pytest.raises(SystemExit) as info:
        main(["solve", "--x", files["x"], "--y", files["y"], "--bogus"])
    assert info.value.code == 2


def test_diagnose(capsys, files):
    code, out, _ = run(capsys, "diagnose", "--x", files["x"], "--y", files["y"], "--scheme", "unif", "--r", 2, "--replicates", 900, "--seed", 1)
    assert code == 0
    assert abs(out["prRankPreserved"] - 2 / 9) < 3 * np.sqrt(2 / 9 * 7 / 9 / 900)


def test_uq_identity_has_no_excess(capsys, files):
    code, out, _ = run(capsys, "uq", "--x", files["x"], "--beta0", files["b"], "--sigma2", 1, "--scheme", "identity", "--r", 3, "--draws", 5, "--seed", 0)
    assert code == 0
    rep = out["report"]
    assert rep["mse_excess"] == pytest.approx(0, abs=1e-12)
    assert rep["mse_total"] == pytest.approx(2.0)


def test_uq_with_oracle(capsys, files):
    code, out, _ = run(
        capsys, "uq", "--x", files["x"], "--beta0", files["b"], "--sigma2", 1, "--scheme", "unif", "--r", 2,
        "--draws", 1000, "--seed", 3, "--oracle", 50, "--oracle-draws", 400,
    )
    assert code == 0
    assert max(out["agreement_z"].values()) <= 3.0


def test_uq_requires_beta0(capsys, files):
    code, _, err = run(capsys, "uq", "--x", files["x"], "--sigma2", 1, "--scheme", "unif", "--r", 2, "--seed", 0)
    assert code == 2 and "beta0" in err


def test_uq_rank_conditioned_r_below_p(capsys, files):
    code, _, err = run(
        capsys, "uq", "--x", files["x"], "--beta0", files["b"], "--sigma2", 1, "--scheme", "unif", "--r", 1,
        "--draws", 50, "--seed", 0, "--rank-conditioned",
    )
    assert code == 2 and "AllDrawsRankDeficient" in err


def test_uq_help_mentions_simulation(capsys):
    with pytest.raises(SystemExit):
        main(["uq", "--help"])
    assert "simulation-grade" in capsys.readouterr().out


def test_experiment_flags(capsys, tmp_path):
    rec = tmp_path / "r.csv"
    summ = tmp_path / "s.csv"
    argv = [
        "experiment", "--schemes", "unif,norm", "--r-grid", "3:9:3", "--replicates", 5, "--n", 100, "--p", 4,
        "--coherence", 0.5, "--out", rec, "--summary", summ, "--seed", 2, "--deterministic", "--threads", 1,
    ]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out["config"]["r_grid"] == [3, 6, 9]
    assert rec.exists() and summ.exists()
    first = rec.read_bytes()
    run(capsys, *argv)
    assert rec.read_bytes() == first


def test_experiment_config_file(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "schemes": ["lev"], "r_grid": [4, 8], "n_replicates": 4, "master_seed": 1,
        "data": {"kind": "synthetic", "n": 80, "p": 4, "coherence": 0.3},
        "outputs": {"summary": str(tmp_path / "s.csv")},
    }))
    code, out, _ = run(capsys, "experiment", "--config", cfg, "--deterministic")
    assert code == 0 and out["config"]["master_seed"] == 1
    assert len(out["summary"]) == 2


def test_experiment_bad_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schemes": ["nope"]}))
    code, _, _ = run(capsys, "experiment", "--config", cfg)
    assert code == 2


def test_threads_env_fallback(capsys, files, monkeypatch):
    monkeypatch.setenv("SKETCHUQ_THREADS", "2")
    code, out, _ = run(capsys, "uq", "--x", files["x"], "--beta0", files["b"], "--sigma2", 1, "--scheme", "unif", "--r", 2, "--draws", 20, "--seed", 0)
    assert code == 0
