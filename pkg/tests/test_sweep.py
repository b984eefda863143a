import numpy as np
import pytest

from fmcloss.experiment import (
    EvalRecord, data_time_range, driest_period, make_periods, paired_tests, run_sweep, summarize,
    window_means,
)
from fmcloss.experiment import SynthConfig, synth_generate
from fmcloss.features import ModelDataset, assemble
from fmcloss.loss import LossSpec
from fmcloss.models import BoostParams, ForestParams

FP = ForestParams(n_estimators=4, max_depth=4)
BP = BoostParams(n_estimators=6, max_depth=3)
LOSSES = [LossSpec.uniform(), LossSpec.exponential(0.0), LossSpec.exponential(0.1),
          LossSpec.ros_curve()]


def sweep(data, periods, losses=LOSSES, **kw):
    return run_sweep(data, losses, periods, forest_params=FP, boost_params=BP, seed=5, **kw)


@pytest.fixture(scope="module")
def periods(small_dataset):
    return make_periods(data_time_range(small_dataset), small_dataset.stations, seed=5)[:2]


@pytest.fixture(scope="module")
def result(small_dataset, periods):
    return sweep(small_dataset, periods)


def test_record_count_and_order(result, periods):
    assert len(result.records) == len(periods) * 3 * len(LOSSES)
    first = result.records[:12]
    assert [r.model for r in first] == ["linear"] * 4 + ["forest"] * 4 + ["boost"] * 4
    assert [r.loss for r in first[:4]] == ["MSE", "exp_0", "exp_0.1", "ROS"]
    assert all(r.n_test > 0 and r.rmse_fmc >= 0 and r.rmse_ros >= 0 for r in result.records)


def test_exp_zero_scores_equal_mse(result):
    by = {(r.key, r.loss): r for r in result.records}
    for r in result.records:
        if r.loss == "MSE":
            twin = by[(r.key, "exp_0")]
            assert twin.rmse_ros == r.rmse_ros
            if r.model == "linear":
                assert twin.rmse_fmc == pytest.approx(r.rmse_fmc, abs=1e-12)
            else:
                assert twin.rmse_fmc == r.rmse_fmc


def test_thread_count_does_not_change_records(small_dataset, periods, result):
    assert sweep(small_dataset, periods, threads=2).records == result.records


def test_station_relabel_invariance(small_dataset, periods, result):
    # an order-preserving relabel yields the same station splits and fits
    ids = np.array(["Z" + s for s in small_dataset.station_id], dtype=object)
    relabelled = ModelDataset(ids, small_dataset.time, small_dataset.X, small_dataset.y)
    moved = make_periods(data_time_range(relabelled), relabelled.stations, seed=5)[:2]
    assert sweep(relabelled, moved).records == result.records


def test_duplicate_loss_names_rejected(small_dataset, periods):
    with pytest.raises(ValueError):
        sweep(small_dataset, periods, losses=[LossSpec.uniform(), LossSpec.uniform()])


def test_empty_test_set_skipped(small_dataset, periods):
    far = [p.__class__(p.index, p.replicate, p.train_start, p.test_start + np.timedelta64(900, "D"),
                       p.test_end + np.timedelta64(900, "D"), p.train_stations, p.test_stations)
           for p in periods[:1]]
    res = sweep(small_dataset, far)
    assert res.records == [] and res.skipped == [(0, 0, "empty test set")]


def rec(period, loss, value, model="linear", rep=0):
    return EvalRecord(period, rep, model, loss, value, value, 10)


def test_summarize_by_hand():
    records = [rec(0, "MSE", 1.0), rec(1, "MSE", 3.0), rec(0, "ROS", 2.0), rec(1, "ROS", 2.0)]
    rows = summarize(records, "rmse_ros")
    assert rows[0] == {"loss": "MSE", "mean": 2.0, "min": 1.0, "max": 3.0,
                       "se": pytest.approx(1.0), "n": 2}
    assert rows[1]["se"] == 0.0
    assert [r["model"] for r in summarize(records, "rmse_fmc", by_model=True)] == ["linear"] * 2


def test_paired_tests_match_on_key():
    records = [rec(0, "MSE", 1.0), rec(1, "MSE", 2.0), rec(2, "MSE", 4.0),
               rec(2, "ROS", 3.0), rec(0, "ROS", 0.0), rec(1, "ROS", 1.5),
               rec(9, "ROS", 100.0)]  # no baseline partner: ignored
    (row,) = paired_tests(records)
    assert row["loss"] == "ROS" and row["n"] == 3
    assert row["mean_diff"] == pytest.approx(np.mean([-1.0, -0.5, -1.0]))


def test_window_means_and_driest_choice():
    cfg = SynthConfig(n_stations=5, span_days=60, seed=4, dry_window=(40, 20))
    data = assemble(synth_generate(cfg))
    tr = data_time_range(data)
    means = window_means(data, tr)
    assert len(means) == 16
    best = min(range(16), key=lambda k: means[k][1])
    assert best == 15
    t0, fmc, _ = means[0]
    m = (data.time >= t0) & (data.time < t0 + np.timedelta64(30, "D"))
    assert fmc == pytest.approx(data.y[m].mean())


def test_driest_period_runs_reduced_sweep(small_dataset):
    tr = data_time_range(small_dataset)
    res = driest_period(small_dataset, tr, replicates=2, seed=1, forest_params=FP,
                        boost_params=BP)
    means = window_means(small_dataset, tr)
    assert res.mean_fmc == min(m[1] for m in means)
    assert res.window_end - res.window_start == np.timedelta64(30, "D")
    recs = res.sweep.records
    assert len(recs) == 2 * 3 * 3
    assert {r.loss for r in recs} == {"MSE", "exp_0.0367", "ROS"}
    assert {r.period for r in recs} == {res.period_index}
    assert {r.replicate for r in recs} == {0, 1}
