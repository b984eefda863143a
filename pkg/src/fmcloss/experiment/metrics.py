"""Accuracy metrics and matched-pair significance tests."""
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats


def rmse(y, yhat):
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.shape != yhat.shape:
        raise ValueError("length mismatch")
    if y.size == 0:
        raise ValueError("RMSE of an empty sample")
    r = y - yhat
    return float(np.sqrt(np.mean(r * r)))


@dataclass(frozen=True)
class PairedT:
    t: float
    p: float
    mean_diff: float
    n: int
    # differences had zero spread; t is 0 or +/-inf and p is exact
    degenerate: bool = False

    @property
    def df(self):
        return self.n - 1


def paired_t(a, b):
    """Two-sided paired t-test on ``a - b`` with ``n - 1`` degrees of freedom."""
    d = np.asarray(a, dtype=np.float64) - np.asarray(b, dtype=np.float64)
    n = d.size
    if n < 2:
        raise ValueError("paired t-test needs at least two pairs")
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return PairedT(0.0, 1.0, 0.0, n, True)
        return PairedT(math.copysign(math.inf, mean), 0.0, mean, n, True)
    t = mean / (sd / math.sqrt(n))
    p = float(2.0 * stats.t.sf(abs(t), n - 1))
    return PairedT(t, p, mean, n)


def mean_se(values):
    """Mean and standard error ``sd / sqrt(n)``."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        return math.nan, math.nan
    se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(v.mean()), se
