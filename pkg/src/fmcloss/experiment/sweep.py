"""Loss x model sweeps over cross-validation periods, plus their summaries."""
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..fire import RosContext, ros
from ..loss import LossSpec, omega_grid, weights
from ..models import FAMILIES, fit_boost, fit_forest
from ..models.linear import fit_linear
from ..models.tree import presort
from .cv import make_periods
from .metrics import mean_se, paired_t, rmse

log = logging.getLogger(__name__)

RECORD_COLUMNS = ("period", "replicate", "model", "loss", "rmse_fmc", "rmse_ros", "n_test")


@dataclass(frozen=True)
class EvalRecord:
    period: int
    replicate: int
    model: str
    loss: str
    rmse_fmc: float
    rmse_ros: float
    n_test: int

    @property
    def key(self):
        return self.period, self.replicate, self.model


@dataclass
class SweepResult:
    records: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (period, replicate, reason)
    n_clamped: int = 0  # negative FMC predictions clamped to 0 before the ROS transform

    def extend(self, other):
        self.records.extend(other.records)
        self.skipped.extend(other.skipped)
        self.n_clamped += other.n_clamped


def driest_losses(ctx=None):
    return [LossSpec.uniform(), LossSpec.exponential(omega_grid()[1]), LossSpec.ros_curve(ctx)]


def evaluate_period(data, period, losses, models=FAMILIES, ros_ctx=None, seed=0,
                    forest_params=None, boost_params=None):
    """Fit every (model, loss) on one period's training rows and score the test rows."""
    ros_ctx = ros_ctx or RosContext()
    out = SweepResult()
    train = data.take(period.train_mask(data))
    test = data.take(period.test_mask(data))
    if len(test) == 0 or len(train) == 0:
        out.skipped.append((period.index, period.replicate,
                            "empty test set" if len(test) == 0 else "empty training set"))
        return out
    sorted_rows = presort(train.X)
    ros_obs = ros(test.y, ros_ctx)
    for fi, family in enumerate(models):
        model_seed = [seed, period.index, period.replicate, fi]
        for loss in losses:
            w = weights(loss, train.y)
            if family == "linear":
                model = fit_linear(train.X, train.y, w, drop_collinear=True)
            elif family == "forest":
                model = fit_forest(train.X, train.y, w, model_seed, forest_params, sorted_rows)
            elif family == "boost":
                model = fit_boost(train.X, train.y, w, model_seed, boost_params, sorted_rows)
            else:
                raise ValueError(f"unknown model family {family!r}")
            pred = model.predict(test.X)
            neg = pred < 0
            out.n_clamped += int(neg.sum())
            ros_pred = ros(np.where(neg, 0.0, pred), ros_ctx)
            out.records.append(EvalRecord(
                period.index, period.replicate, family, loss.name,
                rmse(test.y, pred), rmse(ros_obs, ros_pred), len(test)))
    return out


_WORKER_ARGS = None


def _init_worker(args):
    global _WORKER_ARGS
    _WORKER_ARGS = args


def _run_one(period):
    data, losses, models, ros_ctx, seed, fp, bp = _WORKER_ARGS
    return evaluate_period(data, period, losses, models, ros_ctx, seed, fp, bp)


def run_sweep(data, losses, periods, models=FAMILIES, ros_ctx=None, seed=0, threads=1,
              forest_params=None, boost_params=None):
    """Evaluate all periods; records come back in (period order, model, loss) order.

    Periods are independent work units and may run in ``threads`` worker
    processes; every random stream is keyed by (seed, period, replicate, model)
    so the output does not depend on the worker count.
    """
    names = [loss.name for loss in losses]
    if len(set(names)) != len(names):
        raise ValueError("loss names must be unique")
    args = (data, list(losses), tuple(models), ros_ctx or RosContext(), seed,
            forest_params, boost_params)
    result = SweepResult()
    threads = max(1, int(threads or 1))
    if threads == 1 or len(periods) <= 1:
        _init_worker(args)
        parts = map(_run_one, periods)
        for part in parts:
            result.extend(part)
    else:
        with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker,
                                 initargs=(args,)) as pool:
            for part in pool.map(_run_one, periods, chunksize=1):
                result.extend(part)
    for p, r, reason in result.skipped:
        log.warning("period %d replicate %d skipped: %s", p, r, reason)
    return result


# --- summaries ------------------------------------------------------------------

def summarize(records, metric="rmse_ros", by_model=False):
    """Per-loss (optionally per-model) mean, min, max, standard error and count.

    Rows follow the order in which losses (and models) first appear.
    """
    groups = {}
    for r in records:
        key = (r.loss, r.model) if by_model else (r.loss,)
        groups.setdefault(key, []).append(getattr(r, metric))
    rows = []
    for key, vals in groups.items():
        mean, se = mean_se(vals)
        row = {"loss": key[0]}
        if by_model:
            row["model"] = key[1]
        row.update(mean=mean, min=float(np.min(vals)), max=float(np.max(vals)), se=se,
                   n=len(vals))
        rows.append(row)
    return rows


def paired_tests(records, metric="rmse_ros", baseline="MSE"):
    """Paired t-test of every loss against ``baseline`` on matched (period, replicate, model)."""
    base = {r.key: getattr(r, metric) for r in records if r.loss == baseline}
    losses = []
    for r in records:
        if r.loss != baseline and r.loss not in losses:
            losses.append(r.loss)
    rows = []
    for name in losses:
        pairs = [(getattr(r, metric), base[r.key]) for r in records
                 if r.loss == name and r.key in base]
        if len(pairs) < 2:
            continue
        a, b = zip(*pairs)
        res = paired_t(a, b)
        rows.append({"loss": name, "t": res.t, "p": res.p, "mean_diff": res.mean_diff,
                     "n": res.n})
    return rows


# --- driest period --------------------------------------------------------------

@dataclass
class DriestResult:
    period_index: int
    window_start: np.datetime64
    window_end: np.datetime64
    mean_fmc: float
    mean_ros: float
    sweep: SweepResult


def window_means(data, time_range, step_hours=48, window_days=30, ros_ctx=None):
    """Mean observed FMC and ROS in every sliding window: list of (start, fmc, ros)."""
    ros_ctx = ros_ctx or RosContext()
    start, end = (np.datetime64(t, "s") for t in time_range)
    step = np.timedelta64(int(step_hours), "h")
    window = np.timedelta64(int(window_days * 24), "h")
    obs_ros = ros(data.y, ros_ctx)
    out = []
    t0 = start
    while t0 + window <= end:
        m = (data.time >= t0) & (data.time < t0 + window)
        if m.any():
            out.append((t0, float(data.y[m].mean()), float(obs_ros[m].mean())))
        t0 = t0 + step
    return out


def driest_period(data, time_range, losses=None, replicates=10, seed=0, ros_ctx=None,
                  threads=1, step_hours=48, window_days=30, train_days=28,
                  test_fraction=0.2, models=FAMILIES, forest_params=None, boost_params=None):
    """Rerun the reduced sweep on the window with the lowest mean observed FMC."""
    ros_ctx = ros_ctx or RosContext()
    losses = losses or driest_losses(ros_ctx)
    means = window_means(data, time_range, step_hours, window_days, ros_ctx)
    if not means:
        raise ValueError("data does not cover a full window")
    k, (t0, fmc_mean, ros_mean) = min(enumerate(means), key=lambda kv: (kv[1][1], kv[0]))
    start = np.datetime64(time_range[0], "s")
    index = int((t0 - start) // np.timedelta64(int(step_hours), "h"))
    window = np.timedelta64(int(window_days * 24), "h")
    periods = make_periods((t0, t0 + window), data.stations, step_hours, window_days,
                           train_days, replicates, seed, test_fraction, first_index=index)
    sweep = run_sweep(data, losses, periods, models, ros_ctx, seed, threads,
                      forest_params, boost_params)
    return DriestResult(index, t0, t0 + window, fmc_mean, ros_mean, sweep)


def default_threads():
    return os.cpu_count() or 1
