"""Wirelessly powered crowd sensing over wearables: a system-level simulator."""

from .engine import ScenarioConfig, run, run_replications, run_variants

__version__ = "0.1.0"
__all__ = ["ScenarioConfig", "run", "run_replications", "run_variants"]
