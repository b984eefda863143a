"""Blocked spatiotemporal cross-validation periods.

Each period is a fixed window sliding forward in time: the first part trains,
the remainder tests, and a random subset of stations is held out so the test
rows are both later in time and at unseen locations.
"""
from dataclasses import dataclass

import numpy as np

HOUR = np.timedelta64(1, "h")
DAY = np.timedelta64(24, "h")


@dataclass(frozen=True)
class CvPeriod:
    index: int
    replicate: int
    train_start: np.datetime64
    test_start: np.datetime64
    test_end: np.datetime64
    train_stations: frozenset
    test_stations: frozenset

    @property
    def train_window(self):
        return self.train_start, self.test_start

    @property
    def test_window(self):
        return self.test_start, self.test_end

    def train_mask(self, data):
        return (_in_window(data.time, *self.train_window)
                & np.isin(data.station_id, list(self.train_stations)))

    def test_mask(self, data):
        return (_in_window(data.time, *self.test_window)
                & np.isin(data.station_id, list(self.test_stations)))


def _in_window(t, lo, hi):
    return (t >= lo) & (t < hi)


def _as_td(x):
    return x if isinstance(x, np.timedelta64) else np.timedelta64(int(round(x * 3600)), "s")


def period_count(span, window, step):
    return int((span - window) // step) + 1


def split_stations(stations, test_fraction, rng):
    """Random station holdout of ``round(test_fraction * n)`` (at least one each side)."""
    stations = sorted(stations)
    n = len(stations)
    if n < 2:
        raise ValueError("need at least two stations to hold some out")
    n_test = min(n - 1, max(1, int(round(test_fraction * n))))
    pick = rng.choice(n, size=n_test, replace=False)
    test = frozenset(stations[i] for i in pick)
    return frozenset(stations) - test, test


def make_periods(time_range, stations, step_hours=48, window_days=30, train_days=28,
                 replicates=1, seed=0, test_fraction=0.2, first_index=0):
    """All CV periods over ``time_range = (start, end)``, for every replicate.

    Period ``k`` starts ``k * step`` after ``start``; there are
    ``floor((span - window) / step) + 1`` per replicate. Station splits are drawn
    independently for every (replicate, period).
    """
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must lie in (0, 1)")
    if replicates < 1:
        raise ValueError("replicates must be at least 1")
    if not 0 < train_days < window_days:
        raise ValueError("train_days must be positive and shorter than the window")
    start, end = (np.datetime64(t, "s") for t in time_range)
    step = _as_td(step_hours)
    window = window_days * DAY
    train = train_days * DAY
    if end - start < window:
        raise ValueError("time range is shorter than one window")
    count = period_count(end - start, window, step)
    out = []
    for rep in range(replicates):
        for k in range(count):
            rng = np.random.default_rng([seed, rep, first_index + k])
            train_st, test_st = split_stations(stations, test_fraction, rng)
            t0 = start + k * step
            out.append(CvPeriod(first_index + k, rep, t0, t0 + train, t0 + window,
                                train_st, test_st))
    return out


def data_time_range(data):
    """``(first, last + 1h)``: the span covered by hourly rows."""
    return data.time.min(), data.time.max() + HOUR
