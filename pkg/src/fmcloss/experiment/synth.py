"""Synthetic station data with 10-hour fuel lag dynamics.

Weather follows diurnal and seasonal cycles with AR(1) synoptic anomalies and
Poisson rain events. Fuel moisture relaxes toward the drying equilibrium with
time constant ``lag_hours``, jumps with rain, and carries process noise:

    fm[t+1] = fm[t] + (E[t] - fm[t]) * (1 - exp(-1/lag)) + absorb * rain[t] + noise
"""
import math
from dataclasses import dataclass

import numpy as np

from ..features import equilibrium
from ..ingest import KELVIN_OFFSET, StationSeries


@dataclass(frozen=True)
class SynthConfig:
    n_stations: int = 40
    span_days: int = 120
    lag_hours: float = 10.0
    rain_event_rate: float = 0.12  # events per station-day
    noise_sd: float = 0.3
    seed: int = 0
    start: str = "2023-05-17T00:00:00"
    rain_absorption: float = 1.5  # percent FMC per mm
    rain_mean_mm: float = 1.5
    rain_hours_mean: float = 4.0
    rh_base: float = 50.0
    dry_window: tuple = ()  # (first day, n days) with less rain and drier air
    dry_rh_drop: float = 25.0
    dry_rain_factor: float = 0.3  # fraction of rain events kept inside the dry window
    bbox: tuple = (37.0, -111.0, 46.0, -95.0)

    def __post_init__(self):
        for name in ("n_stations", "span_days", "lag_hours"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.rain_event_rate < 0 or self.noise_sd < 0:
            raise ValueError("rain_event_rate and noise_sd must be non-negative")


def relax(fm0, eq, rain, lag_hours, absorption, noise, floor=1.0):
    """Integrate the lag-relaxation recursion; returns moisture at every hour."""
    n = len(eq)
    out = np.empty(n)
    decay = 1.0 - math.exp(-1.0 / lag_hours)
    fm = fm0
    for t in range(n):
        out[t] = fm
        fm = fm + (eq[t] - fm) * decay + absorption * rain[t] + noise[t]
        if fm < floor:
            fm = floor
    return out


def _ar1(rng, n, rho, sd):
    e = rng.normal(0.0, sd * math.sqrt(1 - rho * rho), n)
    out = np.empty(n)
    acc = rng.normal(0.0, sd)
    for i in range(n):
        acc = rho * acc + e[i]
        out[i] = acc
    return out


def _station(cfg, rng, sid, time):
    n = len(time)
    min_lat, min_lon, max_lat, max_lon = cfg.bbox
    lat = float(rng.uniform(min_lat, max_lat))
    lon = float(rng.uniform(min_lon, max_lon))
    elev = float(rng.uniform(1000.0, 11555.0))
    hours = (time - time[0]).astype("timedelta64[h]").astype(np.int64)
    utc_hour = (time - time.astype("datetime64[D]")).astype("timedelta64[h]").astype(np.int64)
    doy = (time.astype("datetime64[D]") - time.astype("datetime64[Y]")).astype(np.int64) + 1
    local = (utc_hour + lon / 15.0) % 24.0
    day_index = hours // 24

    dry = np.zeros(n, dtype=bool)
    if cfg.dry_window:
        d0, nd = cfg.dry_window
        dry = (day_index >= d0) & (day_index < d0 + nd)

    diurnal = np.sin(2 * np.pi * (local - 9.0) / 24.0)  # peaks mid-afternoon
    season = np.cos(2 * np.pi * (doy - 200) / 365.0)
    temp_c = (14.0 - 0.0035 * (elev - 5000.0) + 10.0 * season + 8.0 * diurnal
              + _ar1(rng, n, 0.98, 3.0))

    # rain: Poisson event starts, geometric durations, exponential intensities
    rain = np.zeros(n)
    starts = np.nonzero(rng.random(n) < cfg.rain_event_rate / 24.0)[0]
    keep = rng.random(len(starts))
    for s, u in zip(starts, keep):
        dur = int(rng.geometric(1.0 / cfg.rain_hours_mean))
        amount = rng.exponential(cfg.rain_mean_mm, size=len(rain[s:s + dur]))
        if dry[s] and u >= cfg.dry_rain_factor:
            continue
        rain[s:s + dur] += amount
    wet = np.convolve(rain > 0, np.ones(6), mode="full")[:n] > 0  # humid for a few hours after

    rh = cfg.rh_base - 22.0 * diurnal + _ar1(rng, n, 0.97, 10.0) + 0.001 * (elev - 6000.0)
    rh = np.where(wet, np.maximum(rh, 85.0) + rng.uniform(0, 10, n), rh)
    rh = np.where(dry, rh - cfg.dry_rh_drop, rh)
    rh = np.clip(rh, 3.0, 100.0)
    temp_c = np.where(wet, temp_c - 4.0, temp_c)
    temp_k = temp_c + KELVIN_OFFSET

    _, eq = equilibrium(rh, temp_k)
    noise = rng.normal(0.0, cfg.noise_sd, n)
    fmc = relax(float(eq[0]), eq, rain, cfg.lag_hours, cfg.rain_absorption, noise)

    wind = rng.gamma(2.0, 1.2, n) * (1.0 + 0.4 * diurnal)
    decl = np.radians(23.44) * np.sin(2 * np.pi * (284 + doy) / 365.0)
    phi = math.radians(lat)
    hour_angle = np.radians(15.0 * (local - 12.0))
    sin_el = math.sin(phi) * np.sin(decl) + math.cos(phi) * np.cos(decl) * np.cos(hour_angle)
    cloud = np.where(wet, 0.3, 1.0) * rng.uniform(0.75, 1.0, n)
    solar = 1100.0 * np.clip(sin_el, 0.0, None) * cloud

    return StationSeries(
        station_id=sid, lat=lat, lon=lon, elevation_ft=elev, time=time.copy(),
        fmc=fmc, temp_k=temp_k, rh=rh, precip_rate=rain, wind=np.maximum(wind, 0.0),
        solar=solar,
    )


def synth_generate(cfg=None):
    """Simulated cleaned station series, deterministic in ``cfg.seed``."""
    cfg = cfg or SynthConfig()
    start = np.datetime64(cfg.start, "s")
    time = start + np.arange(cfg.span_days * 24) * np.timedelta64(1, "h")
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.n_stations)
    return [_station(cfg, np.random.default_rng(s), f"SYN{i:03d}", time)
            for i, s in enumerate(streams)]
