"""Cross-validation sweeps over loss functions and model families."""
from .cv import CvPeriod, data_time_range, make_periods, period_count, split_stations
from .metrics import PairedT, mean_se, paired_t, rmse
from .sweep import (
    EvalRecord, SweepResult, driest_losses, driest_period, evaluate_period, paired_tests,
    run_sweep, summarize, window_means,
)
from .synth import SynthConfig, synth_generate

__all__ = [
    "CvPeriod", "EvalRecord", "PairedT", "SweepResult", "SynthConfig", "data_time_range",
    "driest_losses", "driest_period", "evaluate_period", "make_periods", "mean_se",
    "paired_t", "paired_tests", "period_count", "rmse", "run_sweep", "split_stations",
    "summarize", "synth_generate", "window_means",
]
