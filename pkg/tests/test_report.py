import xml.etree.ElementTree as ET

import pytest

from fmcloss.experiment import EvalRecord
from fmcloss.fire import RosContext
from fmcloss.loss import default_losses
from fmcloss.report import read_records, write_figures, write_records, write_tables
from fmcloss.svg import Chart, _nice_ticks

SVG = "{http://www.w3.org/2000/svg}"


def records():
    out = []
    for period in range(3):
        for model in ("linear", "forest"):
            for i, loss in enumerate(("MSE", "exp_0.01", "ROS")):
                v = 1.0 + 0.1 * period + 0.01 * i + (0.5 if model == "forest" else 0.0)
                out.append(EvalRecord(period, 0, model, loss, v, v / 1000, 50))
    return out


def test_records_round_trip_exact(tmp_path):
    recs = records() + [EvalRecord(9, 1, "boost", "MSE", 0.1 + 0.2, 1e-17, 3)]
    path = tmp_path / "r.csv"
    write_records(path, recs)
    assert read_records(path) == recs
    assert path.read_text().splitlines()[0] == "period,replicate,model,loss,rmse_fmc,rmse_ros,n_test"


def test_read_records_rejects_wrong_header(tmp_path):
    path = tmp_path / "r.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        read_records(path)


def test_tables(tmp_path):
    paths = write_tables(str(tmp_path), records(), "x_")
    names = sorted(p.rsplit("/", 1)[-1] for p in paths)
    assert names == ["x_by_model_fmc.csv", "x_by_model_ros.csv", "x_summary_fmc.csv",
                     "x_summary_ros.csv", "x_ttest_fmc.csv", "x_ttest_ros.csv"]
    summary = (tmp_path / "x_summary_fmc.csv").read_text().splitlines()
    assert summary[0] == "loss,mean,min,max,se,n" and len(summary) == 4
    loss, mean, lo, hi, se, n = summary[1].split(",")
    assert loss == "MSE" and float(mean) == pytest.approx(1.35) and (lo, hi, n) == ("1.0", "1.7", "6")
    ttest = (tmp_path / "x_ttest_ros.csv").read_text().splitlines()
    assert [line.split(",")[0] for line in ttest] == ["loss", "exp_0.01", "ROS"]
    assert len((tmp_path / "x_by_model_fmc.csv").read_text().splitlines()) == 7


def test_figures_are_valid_svg(tmp_path):
    ctx = RosContext()
    paths = write_figures(str(tmp_path), records(), default_losses(ctx), ctx)
    assert len(paths) == 8
    for p in paths:
        root = ET.parse(p).getroot()
        assert root.tag == f"{SVG}svg"
        assert root.find(f"{SVG}text") is not None
    legend = ET.parse(tmp_path / "weights.svg").getroot()
    texts = {t.text for t in legend.iter(f"{SVG}text")}
    assert {"MSE", "exp_0.25", "ROS"} <= texts


def test_chart_edge_cases(tmp_path):
    chart = Chart("t & <title>", "x", "y")
    chart.add("flat", [0, 1, 2], [5.0, 5.0, 5.0])
    root = ET.fromstring(chart.render())
    assert any(t.text == "t & <title>" for t in root.iter(f"{SVG}text"))
    empty = Chart("empty", "x", "y")
    ET.fromstring(empty.render())


@pytest.mark.parametrize("lo,hi", [(0.0, 1.0), (0.0023, 0.0031), (-5.0, 17.0), (3.0, 3.0)])
def test_nice_ticks_cover_range(lo, hi):
    ticks = _nice_ticks(lo, hi)
    assert ticks[0] <= lo and ticks[-1] >= hi and len(ticks) >= 2
    assert all(b > a for a, b in zip(ticks, ticks[1:]))
