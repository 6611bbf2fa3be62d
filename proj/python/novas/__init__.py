"""NoVaS volatility forecasting."""

from ._core import (
    CalibrationError,
    ConfigError,
    DegenerateDataError,
    DegenerateTestError,
    FormatError,
    __version__,
    calibrate,
    coefficients,
    cw_test,
    evaluate,
    fit_garch,
    forecast,
    forward_transform,
    garch_forecast,
    log_returns,
    simulate,
)

__all__ = [
    "CalibrationError",
    "ConfigError",
    "DegenerateDataError",
    "DegenerateTestError",
    "FormatError",
    "__version__",
    "calibrate",
    "coefficients",
    "cw_test",
    "evaluate",
    "fit_garch",
    "forecast",
    "forward_transform",
    "garch_forecast",
    "log_returns",
    "simulate",
]
