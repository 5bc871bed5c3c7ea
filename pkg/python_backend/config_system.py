#!/usr/bin/env python3
"""
Mean-Type Mapping Toolkit - Configuration System
Numerical defaults for every analysis, with validation and runtime overrides
"""

from dataclasses import dataclass, asdict
from typing import Any, Dict, List, Tuple
import logging

logger = logging.getLogger(__name__)

VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


@dataclass
class AnalysisConfig:
    """Analysis configuration data structure"""
    # Gauss iteration
    tol: float = 1e-12
    max_iter: int = 1_000_000
    cycle_window: int = 64

    # Contractivity
    weak_n_max: int = 64

    # Extremal invariant means (tail of the shuffled sequence)
    extremal_n_max: int = 10_000
    extremal_tail: int = 200

    # Oracles and root search
    quad_points: int = 2048
    bisection_max_iter: int = 200
    precondition_probes: int = 100
    precondition_seed: int = 0

    # Sampling
    probe_anchors: int = 17
    probe_values_per_side: int = 8
    sampling_margin: float = 1e-6
    unbounded_span: float = 10.0
    grid_resolution: Tuple[int, int] = (20, 20)
    random_samples: int = 100

    # Runtime
    workers: int = 1
    log_level: str = "WARNING"


DEFAULTS = AnalysisConfig()


class ConfigManager:
    """Manages one analysis configuration"""

    def __init__(self, overrides: Dict[str, Any] = None):
        self.config = AnalysisConfig()
        if overrides:
            self.update_config(overrides)

    def get_config(self) -> AnalysisConfig:
        """Get current configuration"""
        return self.config

    def update_config(self, updates: Dict[str, Any]) -> bool:
        """Update configuration with new values; returns False if the result is invalid"""
        for key, value in updates.items():
            if value is None:
                continue
            if hasattr(self.config, key):
                setattr(self.config, key, value)
            else:
                logger.warning(f"Unknown configuration key: {key}")

        issues = self.validate_config()
        for issue in issues:
            logger.error(f"Invalid configuration: {issue}")
        return not issues

    def reset_to_defaults(self) -> None:
        """Reset configuration to default values"""
        self.config = AnalysisConfig()

    def as_dict(self) -> Dict[str, Any]:
        return asdict(self.config)

    def validate_config(self) -> List[str]:
        """Validate configuration and return list of issues"""
        issues = []
        cfg = self.config

        if not isinstance(cfg.tol, (int, float)) or not cfg.tol > 0:
            issues.append("Invalid tol: must be a positive number")
        if not isinstance(cfg.sampling_margin, (int, float)) or not 0 <= cfg.sampling_margin < 0.5:
            issues.append("Invalid sampling_margin: must be in [0, 0.5)")
        if not isinstance(cfg.unbounded_span, (int, float)) or not cfg.unbounded_span > 0:
            issues.append("Invalid unbounded_span: must be a positive number")

        # Counts that must be at least one
        for name in ["max_iter", "cycle_window", "weak_n_max", "extremal_n_max", "extremal_tail",
                     "quad_points", "bisection_max_iter", "precondition_probes",
                     "probe_values_per_side", "random_samples", "workers"]:
            value = getattr(cfg, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                issues.append(f"Invalid {name}: must be a positive integer")

        if not isinstance(cfg.probe_anchors, int) or cfg.probe_anchors < 2:
            issues.append("Invalid probe_anchors: need at least 2 anchors")

        if (isinstance(cfg.extremal_tail, int) and isinstance(cfg.extremal_n_max, int)
                and cfg.extremal_tail > 2 * cfg.extremal_n_max + 2):
            issues.append("Invalid extremal_tail: must not exceed 2 * extremal_n_max + 2")

        res = cfg.grid_resolution
        if (not isinstance(res, (tuple, list)) or len(res) != 2
                or any(not isinstance(r, int) or r < 2 for r in res)):
            issues.append("Invalid grid_resolution: need two integers >= 2")

        if cfg.log_level not in VALID_LOG_LEVELS:
            issues.append(f"Unsupported log_level: {cfg.log_level}")

        return issues
