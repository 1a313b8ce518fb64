""" Tests for schattencheck.cli. """

import json

import pytest

from schattencheck import cli
from schattencheck import config


def test_read_args_defaults():
    """Test that unspecified options leave the configuration alone."""
    args = cli.read_args([])

    assert args.experiment == "all"
    assert args.config is None
    assert args.seed is None
    assert args.plots is None
    assert args.verbose == 0


def test_read_args_rejects_unknown_experiments():
    """Test that only known experiments can be chosen."""
    with pytest.raises(SystemExit):
        cli.read_args(["-e", "everything"])


def test_build_config_with_overrides(tmp_path):
    """Test that command-line options override the configuration file."""
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"seed": 1, "levels": [2]}), encoding="utf-8")
    out = str(tmp_path / "out")
    args = cli.read_args(["-c", str(path), "--seed", "9", "-o", out, "-vv"])

    cfg = cli.build_config(args)

    assert cfg.seed == 9
    assert cfg.levels == (2,)
    assert cfg.out == str(tmp_path / "out")
    assert args.verbose == 2


def test_build_config_without_a_file():
    """Test that the defaults apply when no file is given."""
    cfg = cli.build_config(cli.read_args(["--workers", "2", "--plots"]))

    assert cfg.workers == 2
    assert cfg.plots is True
    assert cfg.levels == config.ExperimentConfig().levels
