import math
import xml.etree.ElementTree as ET

from src.cli.plots import (
    PlotKind,
    PlotSeries,
    PlotSpec,
    ReferenceLine,
    eigen_plot,
    emit_svg,
    sweep_plot,
    trace_plot,
)
from src.models.circle import ScanRecord, SweepRecord

SVG_NS = "{http://www.w3.org/2000/svg}"


def element_ids(path):
    root = ET.parse(path).getroot()
    return {el.get("id") for el in root.iter() if el.get("id")}


class TestEmit:
    def test_valid_svg_with_series_and_reference(self, tmp_path):
        spec = PlotSpec(
            kind=PlotKind.LINE,
            series=[PlotSeries(label="a", x=[0.0, 1.0, 2.0], y=[0.5, 0.0, -0.5])],
            references=[ReferenceLine(y=-1.0, label="boundary")],
        )
        summary = emit_svg(spec, tmp_path / "plot.svg")
        root = ET.parse(tmp_path / "plot.svg").getroot()
        assert root.tag == f"{SVG_NS}svg"
        ids = element_ids(tmp_path / "plot.svg")
        assert {"series-0", "reference-0"} <= ids
        assert summary.points_drawn == 3
        assert summary.points_dropped == 0

    def test_empty_series(self, tmp_path):
        summary = emit_svg(PlotSpec(series=[PlotSeries()]), tmp_path / "empty.svg")
        assert summary.points_drawn == 0
        ET.parse(tmp_path / "empty.svg")

    def test_non_finite_points_dropped(self, tmp_path):
        spec = PlotSpec(series=[PlotSeries(x=[0.0, 1.0, 2.0, 3.0],
                                           y=[1.0, math.nan, math.inf, 2.0])])
        summary = emit_svg(spec, tmp_path / "nan.svg")
        assert (summary.points_drawn, summary.points_dropped) == (2, 2)

    def test_log_axis_drops_non_positive(self, tmp_path):
        spec = PlotSpec(kind=PlotKind.LINE, log_y=True,
                        series=[PlotSeries(x=[1.0, 2.0, 3.0], y=[1e-3, 0.0, 1e-6])])
        summary = emit_svg(spec, tmp_path / "log.svg")
        assert (summary.points_drawn, summary.points_dropped) == (2, 1)

    def test_byte_identical(self, tmp_path):
        spec = PlotSpec(title="repeat", series=[PlotSeries(x=[0.0, 1.0], y=[1.0, 2.0])],
                        references=[ReferenceLine(y=0.0)])
        emit_svg(spec, tmp_path / "a.svg")
        emit_svg(spec, tmp_path / "b.svg")
        assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


class TestBuilders:
    def test_sweep_plot_counts_every_point(self, tmp_path):
        records = [
            SweepRecord(kappa=float(k), t=t, j=j, angle=0.1 * j + 0.01 * t, trial_seed=0)
            for k in range(10) for t in range(81, 101) for j in range(4)
        ]
        records.append(SweepRecord(kappa=3.0, t=-1, j=-1, angle=math.nan, trial_seed=0,
                                   error="failed"))
        summary = emit_svg(sweep_plot(records, 4), tmp_path / "sweep.svg")
        assert summary.points_drawn == 800
        assert summary.points_dropped == 0

    def test_sweep_plot_separates_alternating_columns(self):
        records = [
            SweepRecord(kappa=float(k), t=t, j=j, angle=0.5 * j + 0.1 * k * (t % 2),
                        trial_seed=0, alternating=(k == 2))
            for k in range(3) for t in (11, 12) for j in range(3)
        ]
        spec = sweep_plot(records, 3)
        assert [s.label for s in spec.series] == ["settled", "alternating (rotated copies)"]
        assert set(spec.series[1].x) == {2.0}
        assert len(spec.series[0].x) == 12

    def test_sweep_plot_single_series_without_alternation(self):
        records = [SweepRecord(kappa=0.0, t=5, j=j, angle=float(j), trial_seed=0) for j in range(3)]
        spec = sweep_plot(records, 3)
        assert len(spec.series) == 1 and spec.series[0].label == ""

    def test_eigen_plot_references(self):
        records = [ScanRecord(kappa=k, lambda_min=0.0, F=0.5, bound=1.0) for k in (0.0, 1.0)]
        spec = eigen_plot(records, 4)
        assert [r.y for r in spec.references] == [-1.0, 1.0]
        assert spec.series[0].x == [0.0, 1.0]

    def test_trace_plot_is_logarithmic(self):
        spec = trace_plot([{"t": 1, "residual": 1e-2}, {"t": 2, "residual": 1e-4}])
        assert spec.log_y
        assert spec.series[0].x == [1.0, 2.0]
