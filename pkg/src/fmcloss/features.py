"""Derived predictors and model-ready dataset assembly."""
import csv
from dataclasses import dataclass

import numpy as np

from .ingest import format_time, to_datetime64

FEATURES = (
    "eq_drying", "precip_rate", "wind", "solar", "elevation_ft", "hour", "doy", "lat", "lon",
)
N_FEATURES = len(FEATURES)


def equilibrium(rh, temp_k):
    """Wetting and drying equilibrium moisture (percent).

    ``rh`` in percent, ``temp_k`` in Kelvin; scalars or arrays. The temperature
    term is not clamped, so it goes negative above 294.25 K.
    """
    rh = np.asarray(rh, dtype=np.float64)
    temp_k = np.asarray(temp_k, dtype=np.float64)
    with np.errstate(invalid="ignore"):
        if np.any((rh < 0) | (rh > 100)):
            raise ValueError("relative humidity must lie in [0, 100] percent")
        if np.any(temp_k <= 0):
            raise ValueError("temperature must be positive Kelvin")
    temp_term = 0.18 * (21.1 + 273.15 - temp_k) * (1.0 - np.exp(-0.115 * rh))
    wetting = 0.924 * rh ** 0.679 + 0.000499 * np.exp(0.1 * rh) + temp_term
    drying = 0.618 * rh ** 0.753 + 0.000454 * np.exp(0.1 * rh) + temp_term
    if wetting.ndim == 0:
        return float(wetting), float(drying)
    return wetting, drying


def time_features(t):
    """UTC hour (0-23) and day of year (1-366) of a timestamp or datetime64 array."""
    arr = np.asarray(t, dtype="datetime64[s]")
    hour = (arr - arr.astype("datetime64[D]")).astype("timedelta64[h]").astype(np.int64)
    doy = (arr.astype("datetime64[D]") - arr.astype("datetime64[Y]")).astype(np.int64) + 1
    if arr.ndim == 0:
        return int(hour), int(doy)
    return hour, doy


@dataclass(frozen=True, eq=False)
class ModelDataset:
    """Feature matrix and response with each row's station and time."""

    station_id: np.ndarray
    time: np.ndarray
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        n = len(self.y)
        if self.X.shape != (n, N_FEATURES) or len(self.station_id) != n or len(self.time) != n:
            raise ValueError("dataset columns have inconsistent shapes")
        if np.isnan(self.X).any() or np.isnan(self.y).any():
            raise ValueError("dataset rows must be complete")
        for arr in (self.station_id, self.time, self.X, self.y):
            arr.setflags(write=False)

    def __len__(self):
        return len(self.y)

    def take(self, index):
        return ModelDataset(self.station_id[index], self.time[index], self.X[index], self.y[index])

    @property
    def stations(self):
        return sorted(set(self.station_id.tolist()))


def assemble(stations):
    """One row per station-hour with every predictor and the response present."""
    parts = []
    for s in stations:
        n = len(s)
        if n == 0:
            continue
        with np.errstate(invalid="ignore"):
            ok_rh = (s.rh >= 0) & (s.rh <= 100) & (s.temp_k > 0)
        rh = np.where(ok_rh, s.rh, np.nan)
        temp = np.where(ok_rh, s.temp_k, np.nan)
        _, drying = equilibrium(np.nan_to_num(rh, nan=0.0), np.nan_to_num(temp, nan=300.0))
        drying = np.where(ok_rh, drying, np.nan)
        hour, doy = time_features(s.time)
        X = np.column_stack([
            drying, s.precip_rate, s.wind, s.solar, np.full(n, s.elevation_ft),
            hour.astype(float), doy.astype(float), np.full(n, s.lat), np.full(n, s.lon),
        ])
        keep = ~np.isnan(X).any(axis=1) & ~np.isnan(s.fmc)
        parts.append((np.full(keep.sum(), s.station_id, dtype=object), s.time[keep], X[keep],
                      np.asarray(s.fmc)[keep]))
    if not parts or sum(len(p[3]) for p in parts) == 0:
        raise ValueError("no complete rows to assemble")
    sid = np.concatenate([p[0] for p in parts])
    time = np.concatenate([p[1] for p in parts]).astype("datetime64[s]")
    key = np.rec.fromarrays([sid.astype(str), time.astype(np.int64)])
    if len(np.unique(key)) != len(key):
        raise ValueError("duplicate (station_id, time) rows")
    return ModelDataset(sid, time, np.concatenate([p[2] for p in parts]),
                        np.concatenate([p[3] for p in parts]))


def write_dataset_csv(path, data):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["station_id", "time_utc", *FEATURES, "fmc"])
        for i in range(len(data)):
            t = format_time(data.time[i].astype(object))
            w.writerow([data.station_id[i], t, *(repr(float(v)) for v in data.X[i]),
                        repr(float(data.y[i]))])


def read_dataset_csv(path):
    sid, time, X, y = [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            sid.append(row["station_id"])
            time.append(to_datetime64(row["time_utc"]))
            X.append([float(row[f]) for f in FEATURES])
            y.append(float(row["fmc"]))
    if not y:
        raise ValueError(f"{path}: empty dataset")
    return ModelDataset(np.array(sid, dtype=object), np.array(time, dtype="datetime64[s]"),
                        np.array(X, dtype=np.float64), np.array(y, dtype=np.float64))
