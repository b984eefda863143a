"""Command-line entry point: ``fmcloss {ingest,synth,run,driest,report}``."""
import argparse
import json
import logging
import os
import sys
from dataclasses import replace

from . import report
from .config import ConfigError, SourceConfig, dump_config, load_config
from .experiment import (
    data_time_range, driest_losses, driest_period, make_periods, run_sweep, synth_generate,
)
from .features import assemble, read_dataset_csv, write_dataset_csv
from .ingest import IngestError, load_stations, write_qc_report
from .models import SingularDesignError

log = logging.getLogger("fmcloss")

EXIT_OK, EXIT_FAIL, EXIT_SOURCE, EXIT_USAGE = 0, 1, 2, 64


class Artifacts:
    """Tracks requested outputs so a run can report exactly what is missing."""

    def __init__(self, out_dir):
        self.out_dir = out_dir
        self.expected = []
        os.makedirs(out_dir, exist_ok=True)

    def path(self, name):
        p = os.path.join(self.out_dir, name)
        self.expected.append(p)
        return p

    def extend(self, paths):
        self.expected.extend(paths)

    def missing(self):
        return [p for p in self.expected if not os.path.isfile(p)]

    def finish(self):
        manifest = os.path.join(self.out_dir, "manifest.json")
        files = sorted(os.path.relpath(p, self.out_dir) for p in self.expected)
        missing = self.missing()
        with open(manifest, "w") as fh:
            json.dump({"artifacts": files,
                       "missing": sorted(os.path.relpath(p, self.out_dir) for p in missing)},
                      fh, indent=2)
            fh.write("\n")
        if missing:
            for p in missing:
                print(f"fmcloss: missing artifact {p}", file=sys.stderr)
            return EXIT_FAIL
        return EXIT_OK


def _config(args):
    cfg = load_config(args.config)
    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.threads is not None:
        kw["threads"] = args.threads
    if args.out is not None:
        kw["out"] = args.out
    if getattr(args, "dataset", None):
        kw["dataset"] = args.dataset
    if args.source is not None:
        if args.source == "api":
            kw["source"] = replace(cfg.source, kind="api")
        else:
            kw["source"] = SourceConfig(kind="file", path=args.source)
    if getattr(args, "wind", None) is not None:
        kw["ros"] = replace(cfg.ros, wind=args.wind)
    return cfg.with_(**kw) if kw else cfg


def cmd_ingest(cfg):
    arts = Artifacts(cfg.out)
    reports = []
    stations = load_stations(cfg.source.build(), cfg.bbox, cfg.time_range, cfg.clean, reports)
    data = assemble(stations)
    write_dataset_csv(_tracked(arts, cfg.dataset_path), data)
    write_qc_report(arts.path("qc_report.csv"), reports)
    with open(arts.path("qc_summary.txt"), "w") as fh:
        for r in reports:
            fh.write(r.summary + "\n")
    log.info("ingested %d rows from %d stations", len(data), len(stations))
    return arts.finish()


def _tracked(arts, path):
    arts.expected.append(path)
    return path


def cmd_synth(cfg):
    arts = Artifacts(cfg.out)
    data = assemble(synth_generate(cfg.synth))
    write_dataset_csv(_tracked(arts, cfg.dataset_path), data)
    log.info("synthesised %d rows from %d stations", len(data), len(data.stations))
    return arts.finish()


def _sweep_artifacts(arts, cfg, result, losses, prefix, extra=None):
    report.write_records(arts.path(f"{prefix}records.csv"), result.records)
    arts.extend(report.write_tables(cfg.out, result.records, prefix))
    arts.extend(report.write_figures(cfg.out, result.records, losses, cfg.ros_context(), prefix))
    info = {"n_records": len(result.records), "n_clamped_predictions": result.n_clamped,
            "skipped": [list(s) for s in result.skipped]}
    info.update(extra or {})
    with open(arts.path(f"{prefix}run_info.json"), "w") as fh:
        json.dump(info, fh, indent=2, default=str)
        fh.write("\n")


def _full(cfg, arts, data, replicates, prefix=""):
    losses = cfg.losses()
    periods = make_periods(data_time_range(data), data.stations, cfg.cv.step_hours,
                           cfg.cv.window_days, cfg.cv.train_days, replicates, cfg.seed,
                           cfg.cv.test_fraction)
    log.info("sweep: %d losses x %d models x %d periods", len(losses), len(cfg.models),
             len(periods))
    result = run_sweep(data, losses, periods, cfg.models, cfg.ros_context(), cfg.seed,
                       cfg.threads, cfg.forest, cfg.boost)
    _sweep_artifacts(arts, cfg, result, losses, prefix, {"n_periods": len(periods)})


def _driest(cfg, arts, data, prefix="driest_"):
    ctx = cfg.ros_context()
    res = driest_period(data, data_time_range(data), None, cfg.cv.driest_replicates, cfg.seed,
                        ctx, cfg.threads, cfg.cv.step_hours, cfg.cv.window_days,
                        cfg.cv.train_days, cfg.cv.test_fraction, cfg.models, cfg.forest,
                        cfg.boost)
    log.info("driest window %s .. %s, mean FMC %.3f", res.window_start, res.window_end,
             res.mean_fmc)
    losses = driest_losses(ctx)
    _sweep_artifacts(arts, cfg, res.sweep, losses, prefix, {
        "period_index": res.period_index, "window_start": str(res.window_start),
        "window_end": str(res.window_end), "mean_fmc": res.mean_fmc, "mean_ros": res.mean_ros,
    })


def cmd_run(cfg, mode):
    arts = Artifacts(cfg.out)
    dump_config(cfg, arts.path("config_used.yaml"))
    if mode == "synth":
        data = assemble(synth_generate(cfg.synth))
        write_dataset_csv(arts.path("synth_dataset.csv"), data)
        _full(cfg, arts, data, cfg.synth_replicates)
        _driest(cfg, arts, data)
    else:
        if not os.path.isfile(cfg.dataset_path):
            raise FileNotFoundError(f"dataset {cfg.dataset_path} not found; run 'fmcloss ingest'")
        data = read_dataset_csv(cfg.dataset_path)
        if mode == "full":
            _full(cfg, arts, data, cfg.cv.replicates)
        elif mode == "driest":
            _driest(cfg, arts, data)
        else:
            raise ValueError(f"unknown mode {mode!r}")
    return arts.finish()


def cmd_report(cfg, prefix=""):
    arts = Artifacts(cfg.out)
    records = report.read_records(os.path.join(cfg.out, f"{prefix}records.csv"))
    losses = []
    for spec in cfg.losses() + driest_losses(cfg.ros_context()):
        if spec.name in {r.loss for r in records} and spec.name not in [s.name for s in losses]:
            losses.append(spec)
    arts.extend(report.write_tables(cfg.out, records, prefix))
    arts.extend(report.write_figures(cfg.out, records, losses, cfg.ros_context(), prefix))
    return arts.finish()


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML run configuration")
    common.add_argument("--seed", type=int, help="master random seed")
    common.add_argument("--threads", type=int, help="worker processes for the sweep")
    common.add_argument("--source", help="'api', or a path to a raw JSON/CSV file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--dataset", help="model-ready dataset CSV (default <out>/dataset.csv)")
    common.add_argument("--wind", type=float, help="wind speed (m/s) for the ROS transform")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="fmcloss", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="fetch, clean and assemble station data")
    sub.add_parser("synth", parents=[common], help="write a synthetic dataset")
    run = sub.add_parser("run", parents=[common], help="run the loss x model sweep")
    run.add_argument("--mode", choices=("full", "driest", "synth"), default="full")
    sub.add_parser("driest", parents=[common], help="driest-window supplement")
    rep = sub.add_parser("report", parents=[common], help="rebuild tables and figures")
    rep.add_argument("--prefix", default="", help="records file prefix, e.g. 'driest_'")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "synth":
            return cmd_synth(cfg)
        if args.command == "run":
            return cmd_run(cfg, args.mode)
        if args.command == "driest":
            return cmd_run(cfg, "driest")
        return cmd_report(cfg, args.prefix)
    except IngestError as exc:
        print(f"fmcloss: data source error: {exc}", file=sys.stderr)
        return EXIT_SOURCE
    except ConfigError as exc:
        print(f"fmcloss: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ValueError, SingularDesignError) as exc:
        print(f"fmcloss: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
