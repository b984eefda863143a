"""Station observation loading, unit conversion and quality control.

Sources are a local file (Synoptic-style JSON or flat CSV) or the Synoptic
timeseries HTTP API. Everything is converted to per-station
:class:`StationSeries` with missing values stored as NaN.
"""
import csv
import json
import logging
import math
import os
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "station_id", "time_utc", "fmc", "temp_c", "rh", "accum_precip_mm",
    "wind_ms", "solar_wm2", "elevation_ft", "lat", "lon",
)
# Synoptic variable names -> RawObservation fields
API_VARIABLES = {
    "fuel_moisture_set_1": "fmc",
    "air_temp_set_1": "temp_c",
    "relative_humidity_set_1": "rh",
    "precip_accum_set_1": "accum_precip",
    "wind_speed_set_1": "wind",
    "solar_radiation_set_1": "solar",
}
TOKEN_ENV = "SYNOPTIC_TOKEN"
DEFAULT_API_URL = "https://api.synopticdata.com/v2/stations/timeseries"
KELVIN_OFFSET = 273.15


class IngestError(Exception):
    """Base class for loading failures."""


class SourceError(IngestError):
    """The source could not be reached or read."""


class MalformedPayloadError(IngestError):
    """The source returned data that does not follow the expected schema."""


class NoDataError(IngestError):
    """The query succeeded but matched no usable observations."""


def parse_time(value):
    """Parse an ISO-8601 or Synoptic timestamp into an aware UTC datetime."""
    if isinstance(value, datetime):
        t = value
    else:
        s = str(value).strip()
        if s.endswith("Z"):
            s = s[:-1] + "+00:00"
        try:
            t = datetime.fromisoformat(s)
        except ValueError as exc:
            raise MalformedPayloadError(f"bad timestamp {value!r}") from exc
    if t.tzinfo is None:
        return t.replace(tzinfo=timezone.utc)
    return t.astimezone(timezone.utc)


def format_time(t):
    return parse_time(t).strftime("%Y-%m-%dT%H:%M:%SZ")


def to_datetime64(t):
    return np.datetime64(parse_time(t).replace(tzinfo=None), "s")


def _num(v):
    if v is None or v == "":
        return math.nan
    try:
        return float(v)
    except (TypeError, ValueError) as exc:
        raise MalformedPayloadError(f"non-numeric value {v!r}") from exc


@dataclass(frozen=True)
class RawObservation:
    station_id: str
    time: datetime
    fmc: float = math.nan
    temp_c: float = math.nan
    rh: float = math.nan
    accum_precip: float = math.nan
    wind: float = math.nan
    solar: float = math.nan
    elevation: float = math.nan
    lat: float = math.nan
    lon: float = math.nan


@dataclass(frozen=True)
class CleanRecord:
    time: np.datetime64
    fmc: float
    temp_k: float
    rh: float
    precip_rate: float
    wind: float
    solar: float


_SERIES_FIELDS = ("time", "fmc", "temp_k", "rh", "precip_rate", "wind", "solar")


@dataclass(frozen=True, eq=False)
class StationSeries:
    """Cleaned hourly observations for one station, stored column-wise."""

    station_id: str
    lat: float
    lon: float
    elevation_ft: float
    time: np.ndarray
    fmc: np.ndarray
    temp_k: np.ndarray
    rh: np.ndarray
    precip_rate: np.ndarray
    wind: np.ndarray
    solar: np.ndarray

    def __post_init__(self):
        n = len(self.time)
        for name in _SERIES_FIELDS:
            arr = getattr(self, name)
            if len(arr) != n:
                raise ValueError(f"column {name} has length {len(arr)}, expected {n}")
            arr.setflags(write=False)

    def __len__(self):
        return len(self.time)

    @property
    def records(self):
        return [CleanRecord(*(getattr(self, f)[i] for f in _SERIES_FIELDS)) for i in range(len(self))]

    def as_raw(self):
        """Round-trip to raw observations (accumulated precipitation rebuilt from rates).

        Missing rates are encoded as a drop in the gauge reading so they come
        back as missing when cleaned again.
        """
        out = []
        accum = 0.0
        for i in range(len(self)):
            rate = self.precip_rate[i]
            if i > 0:
                accum = accum - 1.0 if math.isnan(rate) else accum + rate
            out.append(RawObservation(
                station_id=self.station_id,
                time=datetime.fromtimestamp(int(self.time[i].astype("int64")), tz=timezone.utc),
                fmc=float(self.fmc[i]), temp_c=float(self.temp_k[i] - KELVIN_OFFSET),
                rh=float(self.rh[i]), accum_precip=accum, wind=float(self.wind[i]),
                solar=float(self.solar[i]), elevation=self.elevation_ft,
                lat=self.lat, lon=self.lon,
            ))
        return out


@dataclass(frozen=True)
class CleanConfig:
    min_fmc: float = 1.0
    max_precip_rate: float = 50.0
    constant_run_hours: int = 24
    exclude: tuple = ("SAWC2",)


@dataclass
class QCReport:
    station_id: str
    n_records: int = 0
    fmc_below_min: int = 0
    fmc_constant_run: int = 0
    precip_out_of_range: int = 0
    rh_out_of_range: int = 0
    removed: bool = False
    reason: str = ""

    @property
    def summary(self):
        if self.removed:
            return f"{self.station_id}: removed"
        return (f"{self.station_id}: {self.n_records} records, fmc<min {self.fmc_below_min}, "
                f"constant fmc {self.fmc_constant_run}, precip out of range "
                f"{self.precip_out_of_range}, rh out of range {self.rh_out_of_range}")


def precip_rate_from_accumulated(accum, max_rate=50.0):
    """Hourly rate from gauge accumulation by first differencing.

    The first entry and any difference outside ``[0, max_rate]`` become NaN.
    """
    acc = np.asarray(accum, dtype=np.float64)
    if acc.ndim != 1 or acc.size < 1:
        raise ValueError("accumulation must be a non-empty 1-d sequence")
    rate = np.full(acc.shape, np.nan)
    d = acc[1:] - acc[:-1]
    with np.errstate(invalid="ignore"):
        ok = (d >= 0) & (d <= max_rate)
    rate[1:] = np.where(ok, d, np.nan)
    return rate


def constant_runs(values, min_run):
    """Mask of entries belonging to a run with at least ``min_run`` zero first differences.

    NaN breaks a run.
    """
    v = np.asarray(values, dtype=np.float64)
    flag = np.zeros(v.shape, dtype=bool)
    start = 0
    n = len(v)
    while start < n:
        end = start + 1
        if not math.isnan(v[start]):
            while end < n and v[end] == v[start]:
                end += 1
            if end - start - 1 >= min_run:
                flag[start:end] = True
        start = end
    return flag


def clean_series(raw, config=None):
    """Clean one station's raw observations.

    Returns ``(series, report)``; ``series`` is None when the station is on the
    exclusion list. Raises ``ValueError`` if times are not strictly increasing.
    """
    config = config or CleanConfig()
    raw = list(raw)
    if not raw:
        raise ValueError("no observations")
    sid = raw[0].station_id
    report = QCReport(sid, n_records=len(raw))
    if any(r.station_id != sid for r in raw):
        raise ValueError("observations from more than one station")
    times = np.array([to_datetime64(r.time) for r in raw], dtype="datetime64[s]")
    if np.any(times[1:] <= times[:-1]):
        raise ValueError(f"{sid}: observation times are not strictly increasing")
    if sid in config.exclude:
        report.removed = True
        report.reason = "exclusion list"
        return None, report

    col = lambda name: np.array([getattr(r, name) for r in raw], dtype=np.float64)  # noqa: E731
    fmc = col("fmc")
    with np.errstate(invalid="ignore"):
        low = fmc < config.min_fmc
    report.fmc_below_min = int(low.sum())
    fmc[low] = np.nan
    const = constant_runs(fmc, config.constant_run_hours)
    report.fmc_constant_run = int(const.sum())
    fmc[const] = np.nan

    rh = col("rh")
    with np.errstate(invalid="ignore"):
        bad_rh = (rh < 0) | (rh > 100)
    report.rh_out_of_range = int(bad_rh.sum())
    rh[bad_rh] = np.nan

    accum = col("accum_precip")
    rate = precip_rate_from_accumulated(accum, config.max_precip_rate)
    d = accum[1:] - accum[:-1]
    with np.errstate(invalid="ignore"):
        report.precip_out_of_range = int(((d < 0) | (d > config.max_precip_rate)).sum())

    first = raw[0]
    series = StationSeries(
        station_id=sid, lat=float(first.lat), lon=float(first.lon),
        elevation_ft=float(first.elevation), time=times, fmc=fmc,
        temp_k=col("temp_c") + KELVIN_OFFSET, rh=rh, precip_rate=rate,
        wind=col("wind"), solar=col("solar"),
    )
    return series, report


# --- sources -----------------------------------------------------------------

@dataclass(frozen=True)
class FileSource:
    path: str


@dataclass(frozen=True)
class ApiSource:
    url: str = DEFAULT_API_URL
    token: str = field(default="", repr=False)
    timeout: float = 60.0

    @classmethod
    def from_env(cls, url=DEFAULT_API_URL, **kw):
        return cls(url=url, token=os.environ.get(TOKEN_ENV, ""), **kw)


def _stations_from_json(doc):
    """Group a Synoptic-style timeseries document into raw observation lists."""
    if not isinstance(doc, dict):
        raise MalformedPayloadError("top-level JSON must be an object")
    summary = doc.get("SUMMARY", {})
    code = summary.get("RESPONSE_CODE", 1)
    if code == 2:
        raise NoDataError(summary.get("RESPONSE_MESSAGE", "no data"))
    if code != 1:
        raise SourceError(f"API error {code}: {summary.get('RESPONSE_MESSAGE', '')}")
    stations = doc.get("STATION")
    if not isinstance(stations, list):
        raise MalformedPayloadError("missing STATION list")
    out = {}
    for st in stations:
        try:
            sid = str(st["STID"])
            obs = st["OBSERVATIONS"]
            times = obs["date_time"]
        except (KeyError, TypeError) as exc:
            raise MalformedPayloadError(f"station entry lacks {exc}") from exc
        meta = dict(elevation=_num(st.get("ELEVATION")), lat=_num(st.get("LATITUDE")),
                    lon=_num(st.get("LONGITUDE")))
        cols = {}
        for key, name in API_VARIABLES.items():
            arr = obs.get(key)
            if arr is None:
                arr = [None] * len(times)
            if len(arr) != len(times):
                raise MalformedPayloadError(f"{sid}: {key} length differs from date_time")
            cols[name] = arr
        out[sid] = [
            RawObservation(sid, parse_time(t), **{k: _num(cols[k][i]) for k in cols}, **meta)
            for i, t in enumerate(times)
        ]
    return out


def _stations_from_csv(path):
    out = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_COLUMNS) - set(reader.fieldnames or ())
        if missing:
            raise MalformedPayloadError(f"CSV lacks columns {sorted(missing)}")
        for row in reader:
            sid = row["station_id"]
            out.setdefault(sid, []).append(RawObservation(
                station_id=sid, time=parse_time(row["time_utc"]), fmc=_num(row["fmc"]),
                temp_c=_num(row["temp_c"]), rh=_num(row["rh"]),
                accum_precip=_num(row["accum_precip_mm"]), wind=_num(row["wind_ms"]),
                solar=_num(row["solar_wm2"]), elevation=_num(row["elevation_ft"]),
                lat=_num(row["lat"]), lon=_num(row["lon"]),
            ))
    return out


def fetch_api(source, bbox, time_range):
    """GET the timeseries document for ``bbox`` and ``time_range`` from the API."""
    min_lat, min_lon, max_lat, max_lon = bbox
    start, end = (parse_time(t) for t in time_range)
    params = {
        # the service orders the box lon/lat
        "bbox": f"{min_lon},{min_lat},{max_lon},{max_lat}",
        "start": start.strftime("%Y%m%d%H%M"),
        "end": end.strftime("%Y%m%d%H%M"),
        "vars": ",".join(k.replace("_set_1", "") for k in API_VARIABLES),
        "units": "metric,height|ft",
        "obtimezone": "UTC",
        "token": source.token,
    }
    url = f"{source.url}?{urllib.parse.urlencode(params)}"
    try:
        with urllib.request.urlopen(url, timeout=source.timeout) as resp:
            body = resp.read().decode("utf-8")
    except (urllib.error.URLError, OSError) as exc:
        raise SourceError(f"cannot reach {source.url}: {exc}") from exc
    try:
        return json.loads(body)
    except json.JSONDecodeError as exc:
        raise MalformedPayloadError(f"API returned invalid JSON: {exc}") from exc


def read_raw(source, bbox=None, time_range=None):
    """Raw observations grouped by station id, before any filtering."""
    if isinstance(source, (str, os.PathLike)):
        source = FileSource(os.fspath(source))
    if isinstance(source, FileSource):
        if not os.path.exists(source.path):
            raise SourceError(f"no such file: {source.path}")
        if source.path.lower().endswith(".csv"):
            return _stations_from_csv(source.path)
        try:
            with open(source.path) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedPayloadError(f"{source.path}: invalid JSON: {exc}") from exc
        return _stations_from_json(doc)
    if isinstance(source, ApiSource):
        if bbox is None or time_range is None:
            raise ValueError("API queries need bbox and time_range")
        return _stations_from_json(fetch_api(source, bbox, time_range))
    raise TypeError(f"unsupported source {source!r}")


def load_stations(source, bbox, time_range, config=None, reports=None):
    """Load, spatially/temporally subset, and clean station series.

    ``bbox`` is ``[min_lat, min_lon, max_lat, max_lon]``; ``time_range`` is an
    inclusive ``[start, end]``. QC reports are appended to ``reports`` when a
    list is given. Raises :class:`NoDataError` if nothing survives.
    """
    start, end = (to_datetime64(t) for t in time_range)
    if not start < end:
        raise ValueError("time range start must precede end")
    min_lat, min_lon, max_lat, max_lon = bbox
    grouped = read_raw(source, bbox, time_range)
    out = []
    for sid in sorted(grouped):
        obs = grouped[sid]
        lat, lon = obs[0].lat, obs[0].lon
        if not (min_lat <= lat <= max_lat and min_lon <= lon <= max_lon):
            continue
        by_time = {}
        for r in obs:
            t = to_datetime64(r.time)
            if start <= t <= end:
                by_time.setdefault(t, r)  # duplicate timestamps: first wins
        if not by_time:
            continue
        series, report = clean_series([by_time[t] for t in sorted(by_time)], config)
        if reports is not None:
            reports.append(report)
        if series is not None:
            out.append(series)
        else:
            log.info("%s removed (%s)", sid, report.reason)
    if not out:
        raise NoDataError("no stations with data inside the bounding box and time range")
    return out


def write_qc_report(path, reports):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["station_id", "n_records", "fmc_below_min", "fmc_constant_run",
                    "precip_out_of_range", "rh_out_of_range", "status"])
        for r in reports:
            w.writerow([r.station_id, r.n_records, r.fmc_below_min, r.fmc_constant_run,
                        r.precip_out_of_range, r.rh_out_of_range,
                        "removed" if r.removed else "kept"])


def write_raw_csv(path, observations):
    """Write raw observations in the flat CSV input schema."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in observations:
            w.writerow([r.station_id, format_time(r.time)] + [
                "" if math.isnan(v) else repr(float(v))
                for v in (r.fmc, r.temp_c, r.rh, r.accum_precip, r.wind, r.solar,
                          r.elevation, r.lat, r.lon)
            ])
