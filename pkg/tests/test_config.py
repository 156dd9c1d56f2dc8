"""Tests for experiment configuration."""

import json

import pytest
from pathlib import Path

from src.errors import ConfigError
from src.utils.config import DcConfig, PowerSpec, load_config, parse_config


def minimal(**overrides):
    data = {"nt": 3, "nb": 4, "ne": 3, "power": {"value": 20, "unit": "dB"}}
    data.update(overrides)
    return data


class TestPowerSpec:
    """Tests for power budgets with units."""

    def test_decibels(self):
        """Test dB to linear conversion."""
        assert PowerSpec(value=20.0).linear == pytest.approx(100.0)
        assert PowerSpec(value=0.0, unit="dB").linear == pytest.approx(1.0)

    def test_linear(self):
        """Test that linear values pass through."""
        assert PowerSpec(value=7.5, unit="linear").linear == 7.5

    def test_non_positive_linear(self):
        """Test that a zero linear budget is rejected."""
        with pytest.raises(ValueError):
            PowerSpec(value=0.0, unit="linear")

    def test_unknown_unit(self):
        """Test that units other than dB and linear are rejected."""
        with pytest.raises(ValueError):
            PowerSpec(value=1.0, unit="W")


class TestParseConfig:
    """Tests for configuration validation."""

    def test_defaults(self):
        """Test the defaults of a minimal configuration."""
        cfg = parse_config(minimal())
        assert cfg.delta == 0.1
        assert cfg.trials == 1
        assert cfg.channel_source == "generated"
        assert cfg.dc == DcConfig()
        assert cfg.power_linear == pytest.approx(100.0)

    def test_dc_defaults(self):
        """Test the solver defaults."""
        dc = DcConfig()
        assert dc.epsilon == 1e-6
        assert dc.max_dc_iters == 100
        assert dc.mu == 10.0
        assert dc.gap == 1e-9
        assert dc.grid_points == 400

    def test_power_linear_is_dumped(self):
        """Test that the linear budget is written with the configuration."""
        dumped = parse_config(minimal()).model_dump()
        assert dumped["power_linear"] == pytest.approx(100.0)

    def test_missing_field(self):
        """Test that a missing required field is named in the error."""
        data = minimal()
        del data["nb"]
        with pytest.raises(ConfigError, match="nb"):
            parse_config(data)

    def test_unknown_field(self):
        """Test that misspelled keys are rejected."""
        with pytest.raises(ConfigError, match="detla"):
            parse_config(minimal(detla=0.2))

    @pytest.mark.parametrize(
        "overrides",
        [
            {"delta": 0.0},
            {"nt": 0},
            {"seed": -1},
            {"seed": 2**64},
            {"trials": 0},
            {"dc": {"mu": 1.0}},
        ],
    )
    def test_out_of_range(self, overrides):
        """Test that out-of-range values are rejected."""
        with pytest.raises(ConfigError):
            parse_config(minimal(**overrides))

    def test_inline_channels(self):
        """Test inline channels that match the dimensions."""
        channels = {"h1": [[[1.0, 0.0]]], "h2": [[[0.5, 0.5]]]}
        cfg = parse_config(minimal(nt=1, nb=1, ne=1, channels=channels))
        assert cfg.channels.h2[0][0] == [0.5, 0.5]

    def test_inline_channel_shape_mismatch(self):
        """Test that inline channels must match nb, ne and nt."""
        channels = {"h1": [[[1.0, 0.0]]], "h2": [[[0.5, 0.5]]]}
        with pytest.raises(ConfigError):
            parse_config(minimal(nt=2, nb=1, ne=1, channels=channels))

    def test_inline_channel_bad_entry(self):
        """Test that complex entries need two numbers."""
        channels = {"h1": [[[1.0]]], "h2": [[[0.5, 0.5]]]}
        with pytest.raises(ConfigError):
            parse_config(minimal(nt=1, nb=1, ne=1, channels=channels))

    def test_channel_file_source(self):
        """Test that a non-generated source becomes a path."""
        cfg = parse_config(minimal(channel_source="data/h.txt"))
        assert cfg.channel_source == Path("data/h.txt")


class TestLoadConfig:
    """Tests for loading configuration files."""

    def test_load(self, tmp_path):
        """Test loading a valid file."""
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(minimal(seed=7)))
        assert load_config(path).seed == 7

    def test_missing_file(self, tmp_path):
        """Test that a missing file is a configuration error."""
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "none.json")

    def test_malformed_json(self, tmp_path):
        """Test that the JSON error position is reported."""
        path = tmp_path / "cfg.json"
        path.write_text('{"nt": 3,\n "nb": }')
        with pytest.raises(ConfigError, match="line 2"):
            load_config(path)

    def test_not_an_object(self, tmp_path):
        """Test that a top-level list is rejected."""
        path = tmp_path / "cfg.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(path)
