"""Per-sample weighting rules and the weighted squared-error family.

Weights are always computed from observed responses, never predictions:
uniform (plain MSE), ``exp(-omega * y)``, or the rate of spread at ``y``.
"""
from dataclasses import dataclass, field

import numpy as np

from .fire import RosContext, ros


def format_omega(omega):
    return f"{round(float(omega), 4):g}"


@dataclass(frozen=True)
class LossSpec:
    kind: str = "uniform"
    omega: float = 0.0
    ctx: RosContext = field(default_factory=RosContext)
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("uniform", "exponential", "ros"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind == "exponential" and not self.omega >= 0:
            raise ValueError("omega must be non-negative")

    @classmethod
    def uniform(cls):
        return cls("uniform")

    @classmethod
    def exponential(cls, omega):
        return cls("exponential", omega=float(omega))

    @classmethod
    def ros_curve(cls, ctx=None):
        return cls("ros", ctx=ctx or RosContext())

    @property
    def name(self):
        if self.label:
            return self.label
        if self.kind == "uniform":
            return "MSE"
        if self.kind == "exponential":
            return f"exp_{format_omega(self.omega)}"
        return "ROS"

    def to_dict(self):
        if self.kind == "uniform":
            d = {"kind": "uniform"}
        elif self.kind == "exponential":
            d = {"kind": "exponential", "omega": self.omega}
        else:
            d = {"kind": "ros", "wind": self.ctx.wind, "slope_tan": self.ctx.slope_tan,
                 "wind_adjustment": self.ctx.wind_adjustment}
        if self.label:
            d["name"] = self.label
        return d

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kind", "uniform")
        label = d.get("name", "")
        if kind == "exponential":
            return cls("exponential", omega=float(d["omega"]), label=label)
        if kind == "ros":
            ctx = RosContext(wind=float(d.get("wind", 3.0)),
                             slope_tan=float(d.get("slope_tan", 0.0)),
                             wind_adjustment=float(d.get("wind_adjustment", 1.0)))
            return cls("ros", ctx=ctx, label=label)
        if kind == "uniform":
            return cls("uniform", label=label)
        raise ValueError(f"unknown loss kind {kind!r}")


def omega_grid(lo=0.01, hi=0.25, n=10):
    return np.linspace(lo, hi, n)


def default_losses(ctx=None):
    """MSE, ten exponential weightings and the ROS weighting."""
    return ([LossSpec.uniform()]
            + [LossSpec.exponential(w) for w in omega_grid()]
            + [LossSpec.ros_curve(ctx)])


def weights(spec, y):
    y = np.asarray(y, dtype=np.float64)
    if not np.all(np.isfinite(y)):
        raise ValueError("responses must be finite")
    if spec.kind == "uniform":
        return np.ones_like(y)
    if spec.kind == "exponential":
        return np.exp(-spec.omega * y)
    return np.atleast_1d(ros(np.maximum(y, 0.0), spec.ctx)).astype(np.float64)


def _check(y, yhat, w):
    y, yhat, w = (np.asarray(v, dtype=np.float64) for v in (y, yhat, w))
    if not (y.shape == yhat.shape == w.shape) or y.ndim != 1:
        raise ValueError("y, yhat and w must be 1-d with equal length")
    return y, yhat, w


def weighted_mse(y, yhat, w):
    """(1/N) * sum w_i (y_i - yhat_i)^2."""
    y, yhat, w = _check(y, yhat, w)
    if y.size == 0:
        raise ValueError("weighted MSE of an empty sample")
    r = y - yhat
    return float(np.mean(w * r * r))


def grad_hess(y, yhat, w):
    """Per-sample first and second derivatives of ``w*(y - yhat)^2`` in ``yhat``."""
    y, yhat, w = _check(y, yhat, w)
    return 2.0 * w * (yhat - y), 2.0 * w
