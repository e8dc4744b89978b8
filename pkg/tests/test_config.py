import json
from pathlib import Path

import pytest

from dunkl_riesz import ConfigError, RunConfig, Thresholds
from dunkl_riesz.config import CALIBRATION_PROVENANCE, from_dict, load

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_default_config_validates_and_roundtrips():
    cfg = RunConfig().validate()
    again = from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again.to_dict() == cfg.to_dict()


@pytest.mark.parametrize("path", sorted(CONFIGS.iterdir()), ids=lambda p: p.name)
def test_shipped_configs_load(path):
    cfg = load(path)
    assert cfg.out.startswith("artifacts/")


@pytest.mark.parametrize(
    "data, field",
    [
        ({"group": {"kappa": -1}}, "group.kappa"),
        ({"group": {"kappa": [1.0, float("nan")]}}, "group.kappa"),
        ({"group": {"preset": "e8"}}, "group.preset"),
        ({"group": {"dimension": 4}}, "group.dimension"),
        ({"grid": {"cells": 7}}, "grid.cells"),
        ({"commutator": {"p": 1.0}}, "commutator.p"),
        ({"commutator": {"j": 2}}, "commutator.j"),
        ({"kernel": {"route": "fourier"}}, "kernel.route"),
        ({"family": {"r_min": 2.0}}, "family.r_min"),
        ({"seed": -1}, "seed"),
        ({"grid": {"spacing": 1.0}}, "grid.spacing"),
        ({"bogus": 1}, "bogus"),
    ],
)
def test_validation_names_the_field(data, field):
    with pytest.raises(ConfigError) as exc:
        from_dict(data)
    assert exc.value.field == field
    assert str(exc.value).startswith(field)


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        load(tmp_path / "missing.toml")
    bad = tmp_path / "bad.toml"
    bad.write_text("group = [")
    with pytest.raises(ConfigError):
        load(bad)


def test_toml_and_json_agree(tmp_path):
    (tmp_path / "a.toml").write_text('seed = 5\n[group]\nkappa = 0.5\n')
    (tmp_path / "a.json").write_text('{"seed": 5, "group": {"kappa": 0.5}}')
    assert load(tmp_path / "a.toml").to_dict() == load(tmp_path / "a.json").to_dict()


def test_thresholds_are_calibrated_multiples():
    th = Thresholds.default()
    assert th.size_ceiling(1) == pytest.approx(10 * 2 / 3.141592653589793, rel=1e-9)
    assert th.lower_floor(2) == pytest.approx(0.010204081638483964 / 10)
    with pytest.raises(ConfigError):
        th.heat_ceiling(3)
    assert "kappa = 0" in CALIBRATION_PROVENANCE
    custom = from_dict({"thresholds": {"factor": 5.0, "size": {"1": 1.0}}})
    assert custom.thresholds.size_ceiling(1) == 5.0
