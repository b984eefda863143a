"""Acceptance suite: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed after the pytest summary (see the
terminal-summary hook in conftest). Criterion 8 runs the full synthetic study
and takes several minutes on one core.
"""
import math
import os
import time

import numpy as np
import pytest
import scipy.optimize

from fmcloss.cli import EXIT_OK, cmd_run
from fmcloss.config import RunConfig, from_dict
from fmcloss.experiment import make_periods, paired_t, period_count, summarize
from fmcloss.experiment.cv import DAY, HOUR
from fmcloss.features import equilibrium
from fmcloss.fire import RosContext, ros
from fmcloss.loss import LossSpec, grad_hess, weighted_mse, weights
from fmcloss.models import BoostParams, fit_boost, fit_linear, fit_model
from fmcloss.report import read_records

from conftest import regression_data


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_criterion_1_equilibrium_oracle(record_property):
    rh = np.linspace(0, 100, 101)
    t = np.linspace(250, 330, 17)
    RH, T = (a.ravel() for a in np.meshgrid(rh, t))

    def run():
        return equilibrium(RH, T)

    (wet, dry), secs = timed(run)
    worst = 0.0
    for i in range(len(RH)):
        h, k = float(RH[i]), float(T[i])
        third = 0.18 * (21.1 + 273.15 - k) * (1 - math.exp(-0.115 * h))
        w0 = 0.924 * h ** 0.679 + 0.000499 * math.exp(0.1 * h) + third
        d0 = 0.618 * h ** 0.753 + 0.000454 * math.exp(0.1 * h) + third
        worst = max(worst, abs(wet[i] - w0), abs(dry[i] - d0))
    record_property("detail", f"max abs err {worst:.2e}, {secs * 1e3:.1f} ms")
    assert worst <= 1e-9
    assert np.all(wet[RH > 0] > dry[RH > 0])
    assert secs < 1.0


def test_criterion_2_weighted_least_squares(record_property):
    def run():
        worst_obj, worst_ols = 0.0, 0.0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            X, y = regression_data(rng, 50, 9)
            w = weights(LossSpec.exponential(0.1), y)
            m = fit_linear(X, y, w)

            def objective(beta):
                return weighted_mse(y, beta[0] + X @ beta[1:], w)

            ref = scipy.optimize.minimize(objective, np.zeros(10), method="BFGS",
                                          options={"gtol": 1e-12, "maxiter": 20000})
            ours = objective(np.r_[m.intercept, m.coefficients])
            worst_obj = max(worst_obj, abs(ours - ref.fun))

            u = fit_linear(X, y, np.ones(50))
            ols = np.linalg.lstsq(np.column_stack([np.ones(50), X]), y, rcond=None)[0]
            worst_ols = max(worst_ols, abs(u.intercept - ols[0]),
                            float(np.max(np.abs(u.coefficients - ols[1:]))))
        return worst_obj, worst_ols

    (worst_obj, worst_ols), secs = timed(run)
    record_property("detail", f"objective gap {worst_obj:.1e}, OLS gap {worst_ols:.1e}, "
                              f"{secs:.1f} s")
    assert worst_obj <= 1e-6
    assert worst_ols <= 1e-10
    assert secs < 10.0


def test_criterion_3_boosting_gradients(record_property):
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 30))
        y = rng.uniform(0, 40, n)
        yhat = y + rng.normal(0, 5, n)
        w = weights(LossSpec.exponential(rng.uniform(0, 0.25)), y)
        g, h = grad_hess(y, yhat, w)
        for i in range(n):
            # the loss is quadratic in yhat_i: any step is exact, a wide one limits cancellation
            step = 1e-2 * max(1.0, abs(yhat[i]))
            up, dn = yhat.copy(), yhat.copy()
            up[i] += step
            dn[i] -= step
            # the summed loss n * weighted_mse is what the gradient differentiates
            fd = n * (weighted_mse(y, up, w) - weighted_mse(y, dn, w)) / (up[i] - dn[i])
            worst = max(worst, abs(g[i] - fd) / max(abs(fd), 1e-8))
            assert h[i] == 2 * w[i]
    X, y = regression_data(np.random.default_rng(4), 400, 9)
    w = weights(LossSpec.exponential(0.1), y)
    m = fit_boost(X, y, w, seed=1, record_loss=True,
                  params=BoostParams(subsample=1.0, colsample_bytree=1.0))
    hist = np.array(m.history)
    rises = int(np.sum(np.diff(hist) > 0))
    record_property("detail", f"max rel FD err {worst:.1e}, loss {hist[0]:.3f} -> "
                              f"{hist[-1]:.3f} over {len(hist) - 1} rounds")
    assert worst <= 1e-6
    assert len(hist) == 121 and rises == 0


def test_criterion_4_weight_identity(small_dataset, record_property):
    data = small_dataset
    y = data.y
    w_mse = weights(LossSpec.uniform(), y)
    w_exp0 = weights(LossSpec.exponential(0.0), y)
    gaps = {}
    for family in ("linear", "forest", "boost"):
        a = fit_model(family, data.X, y, w_mse, seed=[7, 0, 0, 1]).predict(data.X)
        b = fit_model(family, data.X, y, w_exp0, seed=[7, 0, 0, 1]).predict(data.X)
        gaps[family] = float(np.max(np.abs(a - b)))
    record_property("detail", ", ".join(f"{k} {v:.1e}" for k, v in gaps.items()))
    assert gaps["linear"] <= 1e-12
    assert gaps["forest"] == 0.0 and gaps["boost"] == 0.0


def test_criterion_5_ros_shape(record_property):
    ctx = RosContext(wind=3.0)
    assert np.all(ros(np.arange(30.0, 100.0, 0.1), ctx) == 0.0)
    r = ros(np.round(np.arange(0, 60.0001, 0.1), 10), ctx)
    assert np.all(np.diff(r) <= 0)
    wind = [ros(8.0, ctx.with_(wind=v)) for v in np.linspace(0, 10, 101)]
    slope = [ros(8.0, ctx.with_(slope_tan=s)) for s in np.linspace(0, 1.5, 76)]
    assert all(b > a for a, b in zip(wind, wind[1:]))
    assert all(b > a for a, b in zip(slope, slope[1:]))
    below = np.round(np.arange(0, 29.95, 0.1), 10)
    assert np.all(ros(below, ctx) > ros(below, ctx.with_(wind=0.0)))
    record_property("detail", f"ros(8%)={ros(8.0, ctx):.4f} m/s at 3 m/s, "
                              f"{ros(8.0, ctx.with_(wind=0.0)):.5f} m/s calm")


def test_criterion_6_no_leakage_cv(record_property):
    t0 = np.datetime64("2023-05-17T00:00:00")

    def run():
        rng = np.random.default_rng(6)
        checked = 0
        while checked < 1000:
            days = int(rng.integers(30, 45))
            n_st = int(rng.integers(2, 50))
            step = int(rng.integers(1, 97))
            train = int(rng.integers(1, 30))
            stations = [f"s{i}" for i in range(n_st)]
            ps = make_periods((t0, t0 + days * DAY), stations, step_hours=step,
                              train_days=train, seed=int(rng.integers(2**31)),
                              test_fraction=float(rng.uniform(0.05, 0.95)),
                              replicates=int(rng.integers(1, 3)))
            per_rep = period_count(days * DAY, 30 * DAY, step * HOUR)
            assert per_rep == (days * 24 - 720) // step + 1
            assert len(ps) % per_rep == 0
            for p in ps:
                assert not p.train_stations & p.test_stations
                assert p.train_stations | p.test_stations == set(stations)
                assert p.train_start < p.test_start < p.test_end
                checked += 1
        return checked

    checked, secs = timed(run)
    assert period_count(60 * DAY, 30 * DAY, 48 * HOUR) == 16
    assert len(make_periods((t0, t0 + 60 * DAY), ["a", "b", "c"])) == 16
    record_property("detail", f"{checked} periods in {secs:.2f} s")
    assert secs < 5.0


def test_criterion_7_paired_t(record_property):
    hand = paired_t([2, 4, 6, 8], [1, 2, 3, 4])  # differences 1, 2, 3, 4
    assert round(hand.t, 3) == 3.873
    assert abs(hand.p - 0.0305) < 5e-4
    # Student's sleep data as analysed by R's t.test(paired = TRUE): t = -4.0621, p = 0.002833
    sleep = paired_t([0.7, -1.6, -0.2, -1.2, -0.1, 3.4, 3.7, 0.8, 0.0, 2.0],
                     [1.9, 0.8, 1.1, 0.1, -0.1, 4.4, 5.5, 1.6, 4.6, 3.4])
    assert round(sleep.t, 4) == -4.0621
    assert round(sleep.p, 4) == 0.0028
    record_property("detail", f"hand t={hand.t:.3f} p={hand.p:.4f}; "
                              f"sleep t={sleep.t:.4f} p={sleep.p:.6f}")


@pytest.fixture(scope="module")
def synthetic_study(tmp_path_factory):
    out = tmp_path_factory.mktemp("study")
    cfg = RunConfig(out=str(out), threads=os.cpu_count() or 1)
    assert cfg.synth.n_stations >= 40 and cfg.synth.span_days >= 120
    code, secs = timed(lambda: cmd_run(cfg, "synth"))
    assert code == EXIT_OK
    return out, secs


def test_criterion_8_synthetic_reproduction(synthetic_study, record_property):
    out, secs = synthetic_study
    records = read_records(out / "records.csv")
    driest = read_records(out / "driest_records.csv")
    notes = [f"{secs / 60:.1f} min"]

    # (a) interior minimum of mean RMSE_ros over omega (omega = 0 is the MSE loss)
    ros_mean = {r["loss"]: r["mean"] for r in summarize(records, "rmse_ros")}
    exp_names = [k for k in ros_mean if k.startswith("exp_")]
    assert len(ros_mean) == 12 and len(exp_names) == 10
    interior = [k for k in exp_names[:-1]
                if ros_mean[k] < ros_mean["MSE"] and ros_mean[k] < ros_mean["exp_0.25"]]
    best = min(exp_names, key=ros_mean.get)
    notes.append(f"(a) MSE {ros_mean['MSE'] * 1e3:.4f}, {best} {ros_mean[best] * 1e3:.4f}, "
                 f"exp_0.25 {ros_mean['exp_0.25'] * 1e3:.4f} x1e-3")
    ok_a = bool(interior)

    # (b) forced dry regime: ROS-weighted and exponential losses beat MSE significantly
    base = {r.key: r.rmse_ros for r in driest if r.loss == "MSE"}
    ok_b = True
    for name in ("ROS", next(r.loss for r in driest if r.loss.startswith("exp_"))):
        pairs = [(r.rmse_ros, base[r.key]) for r in driest if r.loss == name]
        a, b = map(np.array, zip(*pairs))
        res = paired_t(a, b)
        notes.append(f"(b) {name} {a.mean() * 1e3:.4f} vs {b.mean() * 1e3:.4f}, p={res.p:.2g}")
        ok_b = ok_b and a.mean() <= b.mean() and res.p < 0.05

    # (c) MSE stays within a factor of two of the best loss on RMSE_fmc
    fmc_mean = {r["loss"]: r["mean"] for r in summarize(records, "rmse_fmc")}
    ratio = fmc_mean["MSE"] / min(fmc_mean.values())
    notes.append(f"(c) ratio {ratio:.3f}")
    ok_c = ratio <= 2.0

    record_property("detail", "; ".join(notes))
    assert ok_a, "no interior minimum of RMSE_ros over omega"
    assert ok_b, "dry-regime losses did not beat MSE at p < 0.05"
    assert ok_c
    assert secs < 15 * 60


def test_criterion_9_determinism(tmp_path, record_property):
    small = {
        "forest": {"n_estimators": 5, "max_depth": 5},
        "boost": {"n_estimators": 10},
        "cv": {"replicates": 1, "driest_replicates": 2},
        "synth": {"n_stations": 10, "span_days": 36, "dry_window": [20, 10], "seed": 9},
        "seed": 21,
    }
    outputs = []
    for i, threads in enumerate((1, 1, 2)):
        cfg = from_dict(dict(small, out=str(tmp_path / f"run{i}"), threads=threads))
        assert cmd_run(cfg, "synth") == EXIT_OK
        outputs.append(tuple((tmp_path / f"run{i}" / name).read_bytes()
                             for name in ("records.csv", "driest_records.csv")))
    n = outputs[0][0].count(b"\n") - 1
    record_property("detail", f"{n} records identical over 3 runs (threads 1, 1, 2)")
    assert outputs[0] == outputs[1] == outputs[2]
