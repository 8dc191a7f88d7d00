"""
Unit tests for configuration loading and RunConfig validation
"""

import pytest
import yaml

from bhconstruct.config import Config
from bhconstruct.constants import ConfigKeys, EnvVar
from bhconstruct.core.pipeline import RunConfig
from bhconstruct.errors import InputError


class TestConfig:
    """Test the YAML-backed Config"""

    def test_defaults_without_file(self, tmp_path):
        """Test the built-in defaults"""
        config = Config(tmp_path / "absent.yaml")
        assert config.get(ConfigKeys.Precision.BITS) == 53
        assert config.get(ConfigKeys.Tolerance.CONJ) == 1e-9
        assert config.get(ConfigKeys.Search.N_MAX_SCAN) == 256
        assert config.get("no.such.key", "fallback") == "fallback"

    def test_file_overrides_defaults(self, tmp_path):
        """Test that a partial file is layered over the defaults"""
        path = tmp_path / "config.yaml"
        path.write_text(yaml.safe_dump({"precision": {"bits": 128}, "search": {"workers": 2}}))
        config = Config(path)
        assert config.get(ConfigKeys.Precision.BITS) == 128
        assert config.get(ConfigKeys.Precision.MAX_BITS) == 1024
        assert config.get(ConfigKeys.Search.WORKERS) == 2

    def test_set_and_save(self, tmp_path):
        """Test dot-notation set and a save/load cycle"""
        path = tmp_path / "nested" / "config.yaml"
        config = Config(path)
        config.set(ConfigKeys.Tolerance.SIGN, 1e-10)
        assert config.save()
        assert Config(path).get(ConfigKeys.Tolerance.SIGN) == 1e-10

    def test_invalid_yaml_falls_back(self, tmp_path):
        """Test a malformed file"""
        path = tmp_path / "config.yaml"
        path.write_text("precision: [unclosed\n")
        assert Config(path).get(ConfigKeys.Precision.BITS) == 53

    def test_non_mapping_ignored(self, tmp_path):
        """Test a file whose top level is a list"""
        path = tmp_path / "config.yaml"
        path.write_text("- 1\n- 2\n")
        assert Config(path).get(ConfigKeys.Precision.BITS) == 53


class TestRunConfig:
    """Test RunConfig layering and validation"""

    def test_from_config_defaults(self, tmp_path):
        """Test a config built from defaults only"""
        run = RunConfig.from_config(Config(tmp_path / "absent.yaml"), environ={})
        assert run.precision_bits == 53
        assert run.workers == 4
        assert run.power_sum_horizon == 100_000

    def test_horizon_from_file(self, tmp_path):
        """Test search.power_sum_horizon read from YAML"""
        path = tmp_path / "config.yaml"
        path.write_text(yaml.safe_dump({"search": {"power_sum_horizon": 500}}))
        run = RunConfig.from_config(Config(path), environ={})
        assert run.power_sum_horizon == 500
        assert run.n_max_scan == 256

    def test_environment_override(self, tmp_path):
        """Test BH_PRECISION_BITS"""
        run = RunConfig.from_config(Config(tmp_path / "absent.yaml"),
                                    environ={EnvVar.PRECISION_BITS: "128"})
        assert run.precision_bits == 128

    def test_cli_beats_environment(self, tmp_path):
        """Test that explicit overrides win"""
        run = RunConfig.from_config(Config(tmp_path / "absent.yaml"),
                                    environ={EnvVar.PRECISION_BITS: "128"}, precision_bits=256)
        assert run.precision_bits == 256

    def test_none_overrides_ignored(self, tmp_path):
        """Test that unset CLI flags keep config values"""
        run = RunConfig.from_config(Config(tmp_path / "absent.yaml"), environ={}, precision_bits=None)
        assert run.precision_bits == 53

    def test_bad_environment_value(self, tmp_path):
        """Test a non-integer BH_PRECISION_BITS"""
        with pytest.raises(InputError):
            RunConfig.from_config(Config(tmp_path / "absent.yaml"),
                                  environ={EnvVar.PRECISION_BITS: "lots"})

    @pytest.mark.parametrize("kwargs", [
        {"precision_bits": 60},
        {"precision_bits": 2048},
        {"max_bits": 64, "precision_bits": 128},
        {"tol_conj": 0.0},
        {"tol_sign": 1e-2},
        {"tol_feas": -1e-12},
        {"workers": 0},
        {"power_sum_horizon": 0},
    ])
    def test_invalid_values(self, kwargs):
        """Test out-of-range settings"""
        with pytest.raises(InputError):
            RunConfig(**kwargs)

    def test_unknown_key(self, tmp_path):
        """Test an override that RunConfig does not know"""
        with pytest.raises(InputError):
            RunConfig.from_config(Config(tmp_path / "absent.yaml"), environ={}, colour="blue")
