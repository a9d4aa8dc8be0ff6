"""Experiment file parsing: defaults, overrides, strict validation."""

from __future__ import annotations

import dataclasses

import pytest

from riskmeans.config import ConfigError, ExperimentConfig, load_config


def _write(tmp_path, text, name="exp.ini"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


FULL = """\
[data]
path = data/toy.csv
schema = data/toy.schema
name = toy
subsample = 40      ; rows per class

[preprocess]
scale = false

[rfe]
enabled = true
target_k = 7
step = 2

[scanner]
windows = 4,6
stride = 2
estimators = 3

[kmeans]
k = 3
k_max = 8
restarts = 6
tol = 1e-5
max_iters = 200
init = uniform

[cv]
folds = 4
seed = 17

[output]
dir = out
"""


def test_full_file_round_trip(tmp_path):
    cfg = load_config(_write(tmp_path, FULL))
    assert cfg.data_path == "data/toy.csv"
    assert cfg.schema_path == "data/toy.schema"
    assert cfg.dataset_name == "toy"
    assert cfg.subsample == 40
    assert cfg.scale is False
    assert cfg.rfe_target_k == 7 and cfg.rfe_step == 2
    assert cfg.scanner_windows == (4, 6)
    assert cfg.scanner_stride == 2 and cfg.scanner_estimators == 3
    assert cfg.kmeans_k == 3 and cfg.kmeans_k_max == 8
    assert cfg.kmeans_restarts == 6 and cfg.kmeans_tol == 1e-5
    assert cfg.kmeans_max_iters == 200 and cfg.kmeans_init == "uniform"
    assert cfg.cv_folds == 4 and cfg.cv_seed == 17
    assert cfg.output_dir == "out"


def test_empty_file_gives_defaults(tmp_path):
    cfg = load_config(_write(tmp_path, ""))
    assert cfg == ExperimentConfig()
    assert cfg.kmeans_k is None and cfg.rfe_target_k is None
    assert cfg.cv_folds == 5 and cfg.kmeans_restarts == 10


def test_auto_means_unset(tmp_path):
    cfg = load_config(_write(tmp_path, "[kmeans]\nk = auto\n\n[rfe]\ntarget_k = AUTO\n"))
    assert cfg.kmeans_k is None
    assert cfg.rfe_target_k is None


def test_unknown_section_rejected(tmp_path):
    p = _write(tmp_path, "[clustering]\nk = 3\n")
    with pytest.raises(ConfigError, match=r"unknown section \[clustering\]"):
        load_config(p)


def test_unknown_key_rejected(tmp_path):
    p = _write(tmp_path, "[kmeans]\nsprocket = 3\n")
    with pytest.raises(ConfigError, match=r"\[kmeans\] unknown key 'sprocket'"):
        load_config(p)


def test_bad_int_names_file_section_key(tmp_path):
    p = _write(tmp_path, "[cv]\nfolds = five\n")
    with pytest.raises(ConfigError, match=r"exp\.ini: \[cv\] folds"):
        load_config(p)


def test_bad_bool_rejected(tmp_path):
    p = _write(tmp_path, "[preprocess]\nscale = sometimes\n")
    with pytest.raises(ConfigError, match=r"\[preprocess\] scale: expected a boolean"):
        load_config(p)


def test_bad_float_rejected(tmp_path):
    p = _write(tmp_path, "[kmeans]\ntol = tiny\n")
    with pytest.raises(ConfigError, match=r"\[kmeans\] tol: expected a number"):
        load_config(p)


def test_bad_init_rejected(tmp_path):
    p = _write(tmp_path, "[kmeans]\ninit = random\n")
    with pytest.raises(ConfigError, match="kmeanspp"):
        load_config(p)


def test_bad_window_list_rejected(tmp_path):
    p = _write(tmp_path, "[scanner]\nwindows = 4,six\n")
    with pytest.raises(ConfigError, match="comma-separated integers"):
        load_config(p)


def test_folds_floor_enforced(tmp_path):
    p = _write(tmp_path, "[cv]\nfolds = 1\n")
    with pytest.raises(ConfigError, match="folds must be >= 2"):
        load_config(p)


def test_negative_subsample_rejected(tmp_path):
    p = _write(tmp_path, "[data]\nsubsample = -5\n")
    with pytest.raises(ConfigError, match="subsample must be >= 0"):
        load_config(p)


def test_missing_file_raises_file_not_found(tmp_path):
    with pytest.raises(FileNotFoundError, match="nope.ini"):
        load_config(tmp_path / "nope.ini")


def test_fingerprint_hash_tracks_content():
    a = ExperimentConfig()
    b = ExperimentConfig()
    c = dataclasses.replace(a, cv_seed=1)
    assert a.fingerprint_hash() == b.fingerprint_hash()
    assert a.fingerprint_hash() != c.fingerprint_hash()
    assert len(a.fingerprint_hash()) == 16
    int(a.fingerprint_hash(), 16)


def test_pipeline_mapping(tmp_path):
    cfg = load_config(_write(tmp_path, FULL))
    p = cfg.pipeline("lr", seed=99)
    assert p.method == "lr"
    assert p.seed == 99
    assert p.folds == 4
    assert p.scale is False
    assert p.rfe_target_k == 7 and p.rfe_step == 2
    assert p.kmeans_k == 3 and p.kmeans_restarts == 6
    assert p.kmeans_init == "uniform"
    default_seed = cfg.pipeline("kmeans")
    assert default_seed.seed == 17
