"""Market-model event studies: abnormal returns, CAR tests, and cross-sectional regressions."""

import json as _json

from ._core import (
    EventStudyError,
    __version__,
    car_t_test,
    cumulative_abnormal_return,
    format_p_value,
    generate_scenario,
    market_model,
    monte_carlo,
    ols_fit,
    render_coefficient_cell,
    significance_stars,
)
from ._core import render_report as _render_report
from ._core import run_study as _run_study


def run_study(config, base_dir=""):
    """Run a study from a config dict (or JSON string) and return the report dict."""
    if not isinstance(config, str):
        config = _json.dumps(config)
    return _run_study(config, str(base_dir))


def render_report(report, format="markdown"):
    if not isinstance(report, str):
        report = _json.dumps(report)
    return _render_report(report, format)


__all__ = [
    "EventStudyError",
    "car_t_test",
    "cumulative_abnormal_return",
    "format_p_value",
    "generate_scenario",
    "market_model",
    "monte_carlo",
    "ols_fit",
    "render_coefficient_cell",
    "render_report",
    "run_study",
    "significance_stars",
]
