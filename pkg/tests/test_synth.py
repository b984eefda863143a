import numpy as np
import pytest

from fmcloss.experiment import SynthConfig, synth_generate
from fmcloss.experiment.synth import relax
from fmcloss.features import assemble


def test_relax_converges_to_constant_equilibrium():
    n = 101
    out = relax(30.0, np.full(n, 8.0), np.zeros(n), 10.0, 1.5, np.zeros(n))
    # exp(-100/10) of the initial gap remains
    assert abs(out[100] - 8.0) / 8.0 < 1e-3
    assert out[100] - 8.0 == pytest.approx(22.0 * np.exp(-10.0), rel=1e-9)
    assert np.all(np.diff(out) < 0)


def test_relax_rain_spike_and_floor():
    rain = np.zeros(20)
    rain[5] = 4.0
    out = relax(10.0, np.full(20, 10.0), rain, 10.0, 1.5, np.zeros(20))
    assert out[6] == pytest.approx(16.0) and out[5] == 10.0
    low = relax(1.2, np.zeros(5), np.zeros(5), 1.0, 0.0, np.full(5, -1.0))
    assert np.all(low[1:] == 1.0)


def test_deterministic_and_seed_sensitive():
    cfg = SynthConfig(n_stations=3, span_days=5, seed=11)
    a, b = synth_generate(cfg), synth_generate(cfg)
    assert all(np.array_equal(x.fmc, y.fmc) for x, y in zip(a, b))
    c = synth_generate(SynthConfig(n_stations=3, span_days=5, seed=12))
    assert not np.array_equal(a[0].fmc, c[0].fmc)


def test_shapes_and_ranges():
    series = synth_generate(SynthConfig(n_stations=4, span_days=10, seed=1))
    assert [s.station_id for s in series] == ["SYN000", "SYN001", "SYN002", "SYN003"]
    for s in series:
        assert len(s) == 240
        assert 37 <= s.lat <= 46 and -111 <= s.lon <= -95
        assert np.all((s.rh >= 3) & (s.rh <= 100)) and np.all(s.fmc >= 1.0)
        assert np.all(s.precip_rate >= 0) and np.all(s.solar >= 0) and np.all(s.wind >= 0)
    assert len(assemble(series)) == 960


def test_dry_window_is_drier():
    cfg = SynthConfig(n_stations=6, span_days=40, seed=2, dry_window=(20, 10))
    data = assemble(synth_generate(cfg))
    day = ((data.time - data.time.min()) // np.timedelta64(24, "h")).astype(int)
    inside = (day >= 20) & (day < 30)
    assert data.y[inside].mean() < data.y[~inside].mean() - 2.0
    rain = data.X[:, 1]
    assert (rain[inside] > 0).mean() < (rain[~inside] > 0).mean()


@pytest.mark.parametrize("kw", [dict(n_stations=0), dict(span_days=0), dict(lag_hours=0),
                                dict(noise_sd=-1)])
def test_invalid_config(kw):
    with pytest.raises(ValueError):
        SynthConfig(**kw)
