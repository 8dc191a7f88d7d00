"""
Configuration management for bhconstruct
"""

import copy
import logging
from pathlib import Path
from typing import Any, Optional

import yaml

from bhconstruct.constants import (
    BoundLimits,
    PathPattern,
    Precision,
    Search,
    Tolerance,
    Verification,
)

logger = logging.getLogger(__name__)


class Config:
    """Application configuration manager"""

    def __init__(self, config_file: Optional[Path] = None):
        if config_file is None:
            config_file = Path.home() / PathPattern.CONFIG_DIR / PathPattern.CONFIG_FILE
        self.config_file = Path(config_file)
        self._config = self._load_config()

    def _load_config(self) -> dict:
        """Load configuration from file, layered over the defaults"""
        config = self._default_config()
        if not self.config_file.exists():
            return config
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                loaded = yaml.safe_load(f) or {}
        except (OSError, yaml.YAMLError) as e:
            logger.warning(f"Failed to load config {self.config_file}: {e}")
            return config
        if not isinstance(loaded, dict):
            logger.warning(f"Ignoring config {self.config_file}: top level is not a mapping")
            return config
        self._merge(config, loaded)
        return config

    @staticmethod
    def _merge(base: dict, overrides: dict) -> None:
        for key, value in overrides.items():
            if isinstance(value, dict) and isinstance(base.get(key), dict):
                Config._merge(base[key], value)
            else:
                base[key] = value

    def _default_config(self) -> dict:
        """Return default configuration"""
        return copy.deepcopy({
            'precision': {
                'bits': Precision.HARDWARE_BITS,
                'max_bits': Precision.MAX_BITS,  # escalation cap for sign decisions
            },
            'tolerance': {
                'conj': Tolerance.CONJ,
                'sign': Tolerance.SIGN,
                'feas': Tolerance.FEAS,
                'root': Tolerance.ROOT,
            },
            'search': {
                'n_max_scan': Search.N_MAX_SCAN,
                'workers': Search.WORKERS,  # 1 = sequential scan
                'power_sum_horizon': Search.POWER_SUM_HORIZON,
            },
            'verify': {
                'k_verify': Verification.K_VERIFY,
                'charpoly_max_dim': Verification.CHARPOLY_MAX_DIM,
                'det_max_dim': Verification.DET_MAX_DIM,
                'trace_tol': Verification.TRACE_TOL,
                'charpoly_tol': Verification.CHARPOLY_TOL,
            },
            'bound': {
                'saturation_log10': BoundLimits.SATURATION_LOG10,
            },
            'logging': {
                'enable_file': False,
            },
        })

    def save(self) -> bool:
        """Save configuration to file"""
        try:
            self.config_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.config_file, 'w', encoding='utf-8') as f:
                yaml.safe_dump(self._config, f, default_flow_style=False, sort_keys=True)
            return True
        except OSError as e:
            logger.error(f"Failed to save config: {e}")
            return False

    def get(self, key: str, default: Optional[Any] = None) -> Any:
        """Get configuration value using dot notation"""
        keys = key.split('.')
        value = self._config
        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
            else:
                return default
        return value if value is not None else default

    def set(self, key: str, value: Any) -> None:
        """Set configuration value using dot notation"""
        keys = key.split('.')
        config = self._config
        for k in keys[:-1]:
            if k not in config:
                config[k] = {}
            config = config[k]
        config[keys[-1]] = value
