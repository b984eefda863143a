"""CSV tables and SVG figures for sweep results."""
import csv
import os

import numpy as np

from .experiment.sweep import RECORD_COLUMNS, EvalRecord, paired_tests, summarize
from .fire import ros_curve, ros_sensitivity
from .loss import weights
from .svg import Chart

METRICS = {"rmse_fmc": ("fmc", "RMSE FMC (%)"), "rmse_ros": ("ros", "RMSE ROS (m/s)")}


def _num(v):
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def write_records(path, records):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_COLUMNS)
        for r in records:
            w.writerow([r.period, r.replicate, r.model, r.loss, repr(float(r.rmse_fmc)),
                        repr(float(r.rmse_ros)), r.n_test])


def read_records(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RECORD_COLUMNS:
            raise ValueError(f"{path}: expected columns {','.join(RECORD_COLUMNS)}")
        return [EvalRecord(int(r["period"]), int(r["replicate"]), r["model"], r["loss"],
                           float(r["rmse_fmc"]), float(r["rmse_ros"]), int(r["n_test"]))
                for r in reader]


def write_summary(path, rows, by_model=False):
    cols = ["loss"] + (["model"] if by_model else []) + ["mean", "min", "max", "se", "n"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_num(r[c]) for c in cols])


def write_tests(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["loss", "t", "p", "mean_diff", "n"])
        for r in rows:
            w.writerow([r["loss"], _num(r["t"]), _num(r["p"]), _num(r["mean_diff"]), r["n"]])


def plot_by_loss(path, rows, ylabel, title):
    """Mean RMSE per loss with standard-error bars, losses in sweep order."""
    chart = Chart(title, "loss", ylabel, categories=[r["loss"] for r in rows])
    chart.add("all models", range(len(rows)), [r["mean"] for r in rows],
              [r["se"] for r in rows])
    chart.save(path)


def plot_by_model(path, rows, ylabel, title):
    losses = []
    for r in rows:
        if r["loss"] not in losses:
            losses.append(r["loss"])
    chart = Chart(title, "loss", ylabel, categories=losses)
    models = []
    for r in rows:
        if r["model"] not in models:
            models.append(r["model"])
    for m in models:
        sub = [r for r in rows if r["model"] == m]
        chart.add(m, [losses.index(r["loss"]) for r in sub], [r["mean"] for r in sub],
                  [r["se"] for r in sub])
    chart.save(path)


def plot_ros_curves(path, ctx, fmc_max=35.0):
    grid = np.linspace(0.0, fmc_max, 351)
    chart = Chart("Rate of spread vs fuel moisture", "FMC (%)", "ROS (m/s)")
    for wind in sorted({0.0, ctx.wind}):
        pairs = ros_curve(ctx.with_(wind=wind), grid)
        chart.add(f"wind {wind:g} m/s", [p[0] for p in pairs], [p[1] for p in pairs],
                  markers=False)
    chart.save(path)


def plot_ros_sensitivity(path, ctx, vary, fmc=8.0):
    if vary == "wind":
        pairs = ros_sensitivity(ctx, "wind", np.linspace(0, 10, 41), fmc)
        chart = Chart(f"ROS vs wind at {fmc:g}% FMC", "wind (m/s)", "ROS (m/s)")
    else:
        pairs = ros_sensitivity(ctx.with_(wind=0.0), "slope", np.linspace(0, 1, 41), fmc)
        chart = Chart(f"ROS vs slope at {fmc:g}% FMC, no wind", "slope (rise/run)", "ROS (m/s)")
    chart.add(vary, [x for x, _ in pairs], [r for _, r in pairs], markers=False)
    chart.save(path)


def plot_weights(path, losses, fmc_max=35.0):
    """Weight curves of every loss, each scaled to a maximum of 1."""
    grid = np.linspace(0.0, fmc_max, 351)
    chart = Chart("Loss weights vs observed FMC", "FMC (%)", "relative weight")
    for spec in losses:
        w = weights(spec, grid)
        top = float(w.max())
        chart.add(spec.name, grid, w / top if top > 0 else w, markers=False)
    chart.save(path)


def write_tables(out_dir, records, prefix=""):
    """Summary, per-model and t-test CSVs for both metrics; returns written paths."""
    written = []
    for metric, (tag, _) in METRICS.items():
        for by_model, kind in ((False, "summary"), (True, "by_model")):
            path = os.path.join(out_dir, f"{prefix}{kind}_{tag}.csv")
            write_summary(path, summarize(records, metric, by_model), by_model)
            written.append(path)
        path = os.path.join(out_dir, f"{prefix}ttest_{tag}.csv")
        write_tests(path, paired_tests(records, metric))
        written.append(path)
    return written


def write_figures(out_dir, records, losses, ctx, prefix=""):
    written = []
    for metric, (tag, label) in METRICS.items():
        path = os.path.join(out_dir, f"{prefix}rmse_{tag}_by_loss.svg")
        plot_by_loss(path, summarize(records, metric), label, f"{label} by loss")
        written.append(path)
        path = os.path.join(out_dir, f"{prefix}rmse_{tag}_by_model.svg")
        plot_by_model(path, summarize(records, metric, True), label,
                      f"{label} by loss and model")
        written.append(path)
    figures = (
        ("ros_curves.svg", lambda p: plot_ros_curves(p, ctx)),
        ("ros_wind.svg", lambda p: plot_ros_sensitivity(p, ctx, "wind")),
        ("ros_slope.svg", lambda p: plot_ros_sensitivity(p, ctx, "slope")),
        ("weights.svg", lambda p: plot_weights(p, losses)),
    )
    for name, draw in figures:
        path = os.path.join(out_dir, f"{prefix}{name}")
        draw(path)
        written.append(path)
    return written

