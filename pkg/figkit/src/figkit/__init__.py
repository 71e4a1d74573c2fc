"""Figure generation from aifgames trace/ensemble CSVs and summary JSON.

The kit is a pure reader of the documented file schemas; it performs no
simulation and does not import the simulation package.
"""

from .io import SchemaError, read_ensemble_csv, read_summary_json, read_trace_csv
from .plots import COOPERATE_COLOR, DEFECT_COLOR, gaussian_kde, plot_ensemble, plot_timeseries

__all__ = [
    "SchemaError",
    "read_trace_csv",
    "read_ensemble_csv",
    "read_summary_json",
    "gaussian_kde",
    "plot_timeseries",
    "plot_ensemble",
    "COOPERATE_COLOR",
    "DEFECT_COLOR",
]
