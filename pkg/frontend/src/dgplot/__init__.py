"""Static figure generation for DG benchmark CSV files."""

from .csvdata import REQUIRED_COLUMNS, CsvError, Runs, read_runs
from .plots import plot_convergence, plot_penalty_condition

__all__ = [
    "REQUIRED_COLUMNS",
    "CsvError",
    "Runs",
    "read_runs",
    "plot_convergence",
    "plot_penalty_condition",
]
__version__ = "0.1.0"
