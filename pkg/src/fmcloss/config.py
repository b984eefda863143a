"""Run configuration read from a YAML file.

Every key is optional; a bare file (or no file) gives the default study setup:
12 losses, the three model families with their published hyperparameters,
30-day blocked CV windows every 48 hours, and ROS at 3 m/s wind on flat ground.
"""
import os
from dataclasses import asdict, dataclass, field, fields, replace

import yaml

from .experiment.synth import SynthConfig
from .fire import FUEL_MODELS, RosContext, load_fuel_table
from .ingest import DEFAULT_API_URL, TOKEN_ENV, ApiSource, CleanConfig, FileSource
from .loss import LossSpec, omega_grid
from .models import FAMILIES, BoostParams, ForestParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SourceConfig:
    kind: str = "file"  # file | api
    path: str = "data/raw.json"
    url: str = DEFAULT_API_URL
    token_env: str = TOKEN_ENV
    timeout: float = 60.0

    def build(self):
        if self.kind == "file":
            return FileSource(self.path)
        if self.kind == "api":
            return ApiSource(url=self.url, token=os.environ.get(self.token_env, ""),
                             timeout=self.timeout)
        raise ConfigError(f"source kind must be 'file' or 'api', not {self.kind!r}")


@dataclass(frozen=True)
class LossConfig:
    omega_min: float = 0.01
    omega_max: float = 0.25
    n_omega: int = 10
    omegas: tuple = ()  # explicit list; overrides the evenly spaced grid
    include_mse: bool = True
    include_ros: bool = True

    def omega_values(self):
        if self.omegas:
            return [float(w) for w in self.omegas]
        return omega_grid(self.omega_min, self.omega_max, self.n_omega).tolist()

    def build(self, ctx):
        out = [LossSpec.uniform()] if self.include_mse else []
        try:
            out += [LossSpec.exponential(w) for w in self.omega_values()]
        except ValueError as exc:
            raise ConfigError(f"invalid loss grid: {exc}") from exc
        if self.include_ros:
            out.append(LossSpec.ros_curve(ctx))
        names = [s.name for s in out]
        if not out:
            raise ConfigError("loss grid is empty")
        if len(set(names)) != len(names):
            raise ConfigError(f"loss grid has duplicate names: {names}")
        return out


@dataclass(frozen=True)
class RosConfig:
    wind: float = 3.0
    slope_tan: float = 0.0
    wind_adjustment: float = 1.0
    fuel_category: int = 8
    fuel_table: str = ""

    def build(self):
        table = load_fuel_table(self.fuel_table) if self.fuel_table else FUEL_MODELS
        try:
            fuel = table[self.fuel_category]
        except KeyError:
            raise ConfigError(f"fuel category {self.fuel_category} not in table") from None
        return RosContext(self.wind, self.slope_tan, fuel, self.wind_adjustment)


@dataclass(frozen=True)
class CvConfig:
    window_days: int = 30
    step_hours: float = 48.0
    train_days: int = 28
    test_fraction: float = 0.2
    replicates: int = 5
    driest_replicates: int = 10


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    threads: int = 1
    out: str = "results"
    dataset: str = ""  # defaults to <out>/dataset.csv
    bbox: tuple = (37.0, -111.0, 46.0, -95.0)
    time_range: tuple = ("2023-05-17T02:22:00Z", "2024-06-17T00:00:00Z")
    source: SourceConfig = field(default_factory=SourceConfig)
    clean: CleanConfig = field(default_factory=CleanConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    ros: RosConfig = field(default_factory=RosConfig)
    models: tuple = FAMILIES
    forest: ForestParams = field(default_factory=ForestParams)
    boost: BoostParams = field(default_factory=BoostParams)
    cv: CvConfig = field(default_factory=CvConfig)
    synth: SynthConfig = field(default_factory=lambda: SynthConfig(dry_window=(60, 30)))
    synth_replicates: int = 1

    def __post_init__(self):
        if not 0 < self.cv.test_fraction < 1:
            raise ConfigError("cv.test_fraction must lie in (0, 1)")
        if self.cv.replicates < 1 or self.cv.driest_replicates < 1 or self.synth_replicates < 1:
            raise ConfigError("replicates must be at least 1")
        if not 0 < self.cv.train_days < self.cv.window_days:
            raise ConfigError("cv.train_days must be positive and shorter than the window")
        if self.threads < 1:
            raise ConfigError("threads must be at least 1")
        bad = [m for m in self.models if m not in FAMILIES]
        if bad or not self.models:
            raise ConfigError(f"models must be a non-empty subset of {FAMILIES}")
        if len(self.bbox) != 4 or len(self.time_range) != 2:
            raise ConfigError("bbox needs 4 numbers and time_range 2 timestamps")

    @property
    def dataset_path(self):
        return self.dataset or os.path.join(self.out, "dataset.csv")

    def ros_context(self):
        return self.ros.build()

    def losses(self):
        return self.loss.build(self.ros_context())

    def with_(self, **kw):
        return replace(self, **kw)


_SECTIONS = {
    "source": SourceConfig, "clean": CleanConfig, "loss": LossConfig, "ros": RosConfig,
    "forest": ForestParams, "boost": BoostParams, "cv": CvConfig, "synth": SynthConfig,
}
_TUPLES = {"bbox", "time_range", "models", "omegas", "exclude", "dry_window"}


def _section(cls, data, name):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in {name!r}: {', '.join(unknown)}")
    kw = {k: tuple(v) if k in _TUPLES and v is not None else v for k, v in data.items()}
    if cls is SynthConfig and "dry_window" not in kw:
        kw["dry_window"] = (60, 30)
    try:
        return cls(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"section {name!r}: {exc}") from exc


def from_dict(data):
    data = dict(data or {})
    kw = {}
    for name, cls in _SECTIONS.items():
        if name in data:
            kw[name] = _section(cls, data.pop(name), name)
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    for k, v in data.items():
        kw[k] = tuple(v) if k in _TUPLES else v
    try:
        return RunConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path=None):
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return from_dict(data)


def to_dict(cfg):
    """Plain-data form of ``cfg`` (tuples become lists), suitable for YAML."""
    def plain(v):
        if isinstance(v, dict):
            return {k: plain(x) for k, x in v.items()}
        if isinstance(v, (list, tuple)):
            return [plain(x) for x in v]
        return v
    return plain(asdict(cfg))


def dump_config(cfg, path):
    with open(path, "w") as fh:
        yaml.safe_dump(to_dict(cfg), fh, sort_keys=False)
