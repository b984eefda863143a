"""Surface fire rate of spread as a function of dead fuel moisture.

Rothermel's (1972) surface spread model for a dead-only fuel bed with several
size classes, weighted by surface area. Parameters are carried in imperial
units as tabulated; only the final rate is converted to m/s.

The default fuel is Anderson category 8 (closed timber litter). Every dead
class receives the same moisture value, since only one 10-hour fuel moisture
series is observed.
"""
import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

FT_PER_MIN_TO_M_PER_S = 0.3048 / 60.0
M_PER_S_TO_FT_PER_MIN = 60.0 / 0.3048


@dataclass(frozen=True)
class FuelModel:
    """Rothermel parameter bundle for one fuel category.

    Loads are oven-dry lb/ft^2, surface-area-to-volume ratios 1/ft, depth ft,
    heat content BTU/lb, extinction moisture in percent.
    """

    name: str
    dead_1h_load: float
    dead_10h_load: float
    moisture_of_extinction: float
    sav_1h: float = 2000.0
    sav_10h: float = 109.0
    depth: float = 0.2
    heat_content: float = 8000.0
    particle_density: float = 32.0
    total_mineral: float = 0.0555
    effective_mineral: float = 0.010

    def __post_init__(self):
        if self.dead_1h_load < 0 or self.dead_10h_load < 0:
            raise ValueError("fuel loads must be non-negative")
        if self.dead_1h_load + self.dead_10h_load <= 0:
            raise ValueError("fuel bed has no load")
        if not 0 < self.moisture_of_extinction < 100:
            raise ValueError("moisture of extinction must lie in (0, 100) percent")
        if self.depth <= 0 or self.sav_1h <= 0 or self.sav_10h <= 0:
            raise ValueError("depth and surface-area-to-volume ratios must be positive")

    @property
    def loads(self):
        return np.array([self.dead_1h_load, self.dead_10h_load])

    @property
    def savs(self):
        return np.array([self.sav_1h, self.sav_10h])


ANDERSON_8 = FuelModel(
    name="closed timber litter",
    dead_1h_load=0.046,
    dead_10h_load=0.115,
    moisture_of_extinction=30.0,
)

FUEL_MODELS = {8: ANDERSON_8}


def load_fuel_table(path):
    """Read fuel categories from a CSV with one row per category.

    Required columns: ``category``, ``name``, ``dead_1h_load``, ``dead_10h_load``,
    ``moisture_of_extinction``; any other :class:`FuelModel` field may be given.
    """
    numeric = {f for f in FuelModel.__dataclass_fields__ if f != "name"}
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            cat = int(row.pop("category"))
            kwargs = {k: (float(v) if k in numeric else v) for k, v in row.items() if v != ""}
            out[cat] = FuelModel(**kwargs)
    return out


@dataclass(frozen=True)
class RosContext:
    """Environment for the spread calculation.

    ``wind`` is in m/s and is multiplied by ``wind_adjustment`` to obtain the
    midflame speed; ``slope_tan`` is the tangent of the slope angle.
    """

    wind: float = 3.0
    slope_tan: float = 0.0
    fuel: FuelModel = field(default=ANDERSON_8)
    wind_adjustment: float = 1.0

    def __post_init__(self):
        if self.wind < 0 or self.slope_tan < 0:
            raise ValueError("wind and slope_tan must be non-negative")
        if self.wind_adjustment <= 0:
            raise ValueError("wind_adjustment must be positive")

    def with_(self, **kw):
        return replace(self, **kw)


def _fuel_bed(fuel):
    """Moisture-independent bed properties."""
    w0 = fuel.loads
    sigma_i = fuel.savs
    area = sigma_i * w0 / fuel.particle_density
    f = area / area.sum()
    sigma = float((f * sigma_i).sum())
    rho_b = float(w0.sum()) / fuel.depth
    beta = rho_b / fuel.particle_density
    beta_op = 3.348 * sigma ** -0.8189
    ratio = beta / beta_op
    s15 = sigma ** 1.5
    gamma_max = s15 / (495.0 + 0.0594 * s15)
    A = 1.0 / (4.77 * sigma ** 0.1 - 7.27)
    gamma = gamma_max * ratio ** A * math.exp(A * (1.0 - ratio))
    net_load = float((f * w0 * (1.0 - fuel.total_mineral)).sum())
    eta_s = min(0.174 * fuel.effective_mineral ** -0.19, 1.0)
    xi = math.exp((0.792 + 0.681 * sigma ** 0.5) * (beta + 0.1)) / (192.0 + 0.2595 * sigma)
    eps = np.exp(-138.0 / sigma_i)
    C = 7.47 * math.exp(-0.133 * sigma ** 0.55)
    B = 0.02526 * sigma ** 0.54
    E = 0.715 * math.exp(-3.59e-4 * sigma)
    return {
        "f": f, "rho_b": rho_b, "beta": beta, "ratio": ratio, "gamma": gamma,
        "net_load": net_load, "eta_s": eta_s, "xi": xi, "eps": eps,
        "C": C, "B": B, "E": E,
    }


def ros(fmc, ctx=None):
    """Rate of spread in m/s for fuel moisture ``fmc`` (percent).

    Accepts a scalar or array. Zero at and above the moisture of extinction;
    raises ``ValueError`` on negative moisture.
    """
    ctx = ctx or RosContext()
    fmc_arr = np.asarray(fmc, dtype=np.float64)
    if np.any(np.isnan(fmc_arr)):
        raise ValueError("fuel moisture must not be NaN")
    if np.any(fmc_arr < 0):
        raise ValueError("fuel moisture must be non-negative")
    fuel = ctx.fuel
    bed = _fuel_bed(fuel)
    M = fmc_arr / 100.0
    rm = np.minimum(fmc_arr / fuel.moisture_of_extinction, 1.0)
    eta_m = 1.0 - 2.59 * rm + 5.11 * rm ** 2 - 3.52 * rm ** 3
    # cubic is zero at rm == 1 only up to rounding
    eta_m = np.where(rm >= 1.0, 0.0, np.maximum(eta_m, 0.0))
    reaction = bed["gamma"] * bed["net_load"] * fuel.heat_content * eta_m * bed["eta_s"]
    q_ig = 250.0 + 1116.0 * M
    heat_sink = bed["rho_b"] * np.multiply.outer(q_ig, bed["f"] * bed["eps"]).sum(axis=-1)
    r0 = reaction * bed["xi"] / heat_sink
    u = ctx.wind * ctx.wind_adjustment * M_PER_S_TO_FT_PER_MIN
    phi_w = bed["C"] * u ** bed["B"] * bed["ratio"] ** -bed["E"] if u > 0 else 0.0
    phi_s = 5.275 * bed["beta"] ** -0.3 * ctx.slope_tan ** 2
    out = r0 * (1.0 + phi_w + phi_s) * FT_PER_MIN_TO_M_PER_S
    if out.ndim == 0:
        return float(out)
    return out


def ros_curve(ctx, fmc_grid):
    """Pairs ``(fmc, ros)`` over an ascending moisture grid."""
    grid = np.asarray(list(fmc_grid), dtype=np.float64)
    if grid.size == 0:
        return []
    if np.any(np.diff(grid) < 0):
        raise ValueError("fmc grid must be sorted ascending")
    return list(zip(grid.tolist(), np.atleast_1d(ros(grid, ctx)).tolist()))


def ros_sensitivity(ctx, vary, grid, fmc=8.0):
    """ROS at fixed ``fmc`` as wind (m/s) or slope tangent varies along ``grid``."""
    if vary not in ("wind", "slope"):
        raise ValueError("vary must be 'wind' or 'slope'")
    xs = [float(x) for x in grid]
    if any(x < 0 for x in xs) or any(b < a for a, b in zip(xs, xs[1:])):
        raise ValueError("grid must be non-negative and ascending")
    key = "wind" if vary == "wind" else "slope_tan"
    return [(x, ros(fmc, ctx.with_(**{key: x}))) for x in xs]


def write_curve_csv(path, pairs):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["fmc", "ros"])
        for x, r in pairs:
            w.writerow([repr(float(x)), repr(float(r))])
