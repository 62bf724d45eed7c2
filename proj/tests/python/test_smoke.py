import math

import numpy as np
import pytest

import fsl


def test_registry_lists_every_experiment():
    ids = [e["id"] for e in fsl.list_experiments()]
    assert "verify_alibaud" in ids
    assert len(ids) == len(set(ids))
    info = fsl.describe("alibaud")
    assert info["id"] == "verify_alibaud"
    assert info["defaults"]["points"] > 0


def test_lambda_of_cosine():
    n, half_width = 64, math.pi
    x = -half_width + np.arange(n) * (2 * half_width / n)
    out = fsl.apply_lambda(np.cos(3 * x), half_width)
    assert np.allclose(out, 3 * np.cos(3 * x), atol=1e-12)


def test_poisson_semigroup_preserves_mass():
    n, half_width = 256, 32.0
    x = -half_width + np.arange(n) * (2 * half_width / n)
    bump = np.exp(-x * x)
    out = fsl.heat_semigroup(bump, half_width, 0.5)
    assert out.max() < bump.max()
    assert out.sum() == pytest.approx(bump.sum(), rel=1e-12)


def test_bad_config_raises_config_error():
    with pytest.raises(fsl.ConfigError, match="unknown key 'foo'"):
        fsl.resolved_config("experiment = decay_rates\nfoo = 1\n")
    assert issubclass(fsl.ConfigError, fsl.FslError)


def test_run_writes_a_content_addressed_directory(tmp_path):
    text = "experiment = linear_exactness\n[grid]\nN = 256\nX = 16\n"
    first = fsl.run(text, output=str(tmp_path))
    assert first["exit_code"] == 0
    assert first["report"]["verdict"] == "pass"
    again = fsl.run(text, output=str(tmp_path))
    assert again["reused"] and again["directory"] == first["directory"]
    snap = fsl.read_snapshot(first["directory"] + "/snapshots/final.fsl")
    assert snap["values"].shape == (256,)
    assert snap["half_width"] == 16.0
