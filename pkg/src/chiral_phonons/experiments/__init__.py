from .config import ConfigError, ScenarioConfig, build_config, load_config
from .fitting import SaturatingFit, fit_saturating, saturating
from .report import emit_report
from .scenarios import Fig2Result, SweepResult, SweepSeries, run_fig2, run_fig4

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "build_config",
    "load_config",
    "SaturatingFit",
    "fit_saturating",
    "saturating",
    "emit_report",
    "Fig2Result",
    "SweepResult",
    "SweepSeries",
    "run_fig2",
    "run_fig4",
]
