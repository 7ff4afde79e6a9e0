import json
import math

import numpy as np
import pytest

import tripletforge as tf

CONFIG = {
    "fiber": {"radius_um": 0.3951848, "length_cm": 1.0},
    "pump": {"kind": "pulsed", "lambda_nm": 532.0, "sigma_rad_per_ps": 4.7, "power_mW": 200.0, "rep_rate_MHz": 10.0},
    "grid": {"jsi_points": 16, "output_points": 256, "curve_points": 512},
}


def sellmeier(lam_um):
    b = (0.6961663, 0.4079426, 0.8974794)
    c = (0.0684043, 0.1162414, 9.896161)
    l2 = lam_um * lam_um
    return math.sqrt(1 + sum(bi * l2 / (l2 - ci * ci) for bi, ci in zip(b, c)))


@pytest.fixture(scope="module")
def source():
    return tf.build_source(CONFIG)


def test_material_index_matches_sellmeier():
    for lam in (0.532, 1.596):
        assert tf.material_index(lam * 1e-6) == pytest.approx(sellmeier(lam), rel=1e-12)


def test_material_index_outside_window():
    with pytest.raises(tf.ValidationError):
        tf.material_index(-1e-6)


def test_unknown_key_rejected():
    bad = json.loads(json.dumps(CONFIG))
    bad["pump"]["power_mw"] = 1.0
    with pytest.raises(tf.ValidationError, match="pump.power_mw"):
        tf.validate_config(bad)


def test_config_hash_is_stable():
    assert tf.validate_config(CONFIG) == tf.validate_config(json.loads(json.dumps(CONFIG)))


def test_jsi_normalised_and_symmetric(source):
    jsi, w = tf.jsi(source, points=16)
    h = w[1] - w[0]
    assert jsi.shape == (16, 16, 16)
    assert jsi.sum() * h**3 == pytest.approx(1.0, abs=1e-3)
    assert np.array_equal(jsi, jsi.transpose(1, 0, 2))
    assert np.array_equal(jsi, jsi.transpose(2, 1, 0))


def test_seeded_flux_linear_in_power(source):
    seed = {"kind": "cw", "lambda_nm": 1596.0, "power_mW": 10.0}
    a = tf.throughput(source, [seed], output_points=256)
    seed2 = dict(seed, power_mW=20.0)
    b = tf.throughput(source, [seed2], output_points=256)
    assert b["n1"] == pytest.approx(2.0 * a["n1"], rel=1e-12)
    assert b["n2"] == pytest.approx(4.0 * a["n2"], rel=1e-12)
    assert a["n0"] < 10.0


def test_run_command_writes_outputs(tmp_path):
    summary = tf.run_command("jsi", CONFIG, str(tmp_path))
    assert summary["normalisation_integral"] == pytest.approx(1.0, abs=1e-3)
    assert (tmp_path / "manifest.json").exists()
    assert (tmp_path / "jsi.bin").stat().st_size == 16**3 * 8
