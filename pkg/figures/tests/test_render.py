import numpy as np
import pandas as pd
import pytest
from matplotlib import colormaps
from PIL import Image

from nff_figures import (
    FIGURE_KINDS,
    EmptyInputError,
    FigureError,
    FigureJob,
    SchemaMismatchError,
    render,
)
from nff_figures.cli import main
from nff_figures.render import SCHEMAS


class TestJobValidation:
    def test_unknown_kind(self, tmp_path):
        with pytest.raises(FigureError, match="unknown figure kind"):
            FigureJob("bar-chart", (tmp_path / "a.csv",), tmp_path / "o.png")

    def test_no_inputs(self, tmp_path):
        with pytest.raises(FigureError, match="at least one"):
            FigureJob("gain-scan", (), tmp_path / "o.png")

    @pytest.mark.parametrize("kind", ["field-map", "nf-ff"])
    def test_single_input_kinds(self, kind, tmp_path):
        with pytest.raises(FigureError, match="exactly one"):
            FigureJob(kind, (tmp_path / "a.csv", tmp_path / "b.csv"), tmp_path / "o.png")


class TestInputErrors:
    def test_missing_file(self, tmp_path):
        job = FigureJob("gain-scan", (tmp_path / "absent.csv",), tmp_path / "o.png")
        with pytest.raises(FigureError, match="not found"):
            render(job)
        assert not (tmp_path / "o.png").exists()

    def test_schema_mismatch_writes_nothing(self, tmp_path, golden):
        # an sll CSV is not a gain CSV
        job = FigureJob("gain-scan", (golden["sll-scan"][0],), tmp_path / "o.png")
        with pytest.raises(SchemaMismatchError, match="does not match"):
            render(job)
        assert not (tmp_path / "o.png").exists()

    def test_empty_csv_writes_nothing(self, tmp_path):
        csv = tmp_path / "empty.csv"
        csv.write_text(",".join(SCHEMAS["gain-scan"]) + "\n")
        job = FigureJob("gain-scan", (csv,), tmp_path / "o.png")
        with pytest.raises(EmptyInputError, match="no data rows"):
            render(job)
        assert not (tmp_path / "o.png").exists()

    def test_one_bad_input_among_many(self, tmp_path, golden):
        bad = tmp_path / "empty.csv"
        bad.write_text(",".join(SCHEMAS["gain-scan"]) + "\n")
        job = FigureJob("gain-scan", (golden["gain-scan"][0], bad), tmp_path / "o.png")
        with pytest.raises(EmptyInputError):
            render(job)
        assert not (tmp_path / "o.png").exists()


class TestRendering:
    @pytest.mark.parametrize("kind", FIGURE_KINDS)
    def test_every_kind_renders(self, kind, tmp_path, golden):
        out = tmp_path / f"{kind}.png"
        result = render(FigureJob(kind, tuple(golden[kind]), out))
        assert result.path == out
        assert out.exists() and out.stat().st_size > 0
        assert result.plotted

    def test_gain_scan_multi_series(self, tmp_path, golden):
        result = render(
            FigureJob("gain-scan", tuple(golden["gain-scan"]), tmp_path / "o.png")
        )
        assert len(result.plotted) == 3  # one series per radius

    def test_plotted_data_matches_csv(self, tmp_path, golden):
        csv = golden["gain-scan"][0]
        result = render(FigureJob("gain-scan", (csv,), tmp_path / "o.png"))
        expected = pd.read_csv(csv)["gain_db"].to_numpy()
        np.testing.assert_array_equal(result.plotted["gain_db"], expected)

    def test_width_scan_drops_unresolvable_rows(self, tmp_path, golden):
        csv = golden["width-scan"][0]
        df = pd.read_csv(csv)
        result = render(FigureJob("width-scan", (csv,), tmp_path / "o.png"))
        n_ok = int(df["resolvable"].sum())
        assert len(result.plotted["width_x_lambda"]) == n_ok

    def test_repeat_render_is_identical(self, tmp_path, golden):
        job_a = FigureJob("sll-scan", tuple(golden["sll-scan"]), tmp_path / "a.png")
        job_b = FigureJob("sll-scan", tuple(golden["sll-scan"]), tmp_path / "b.png")
        ra, rb = render(job_a), render(job_b)
        for key in ra.plotted:
            np.testing.assert_array_equal(ra.plotted[key], rb.plotted[key])
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


class TestFieldMap:
    def test_masked_cells_plotted_at_zero(self, tmp_path, golden):
        csv = golden["field-map"][0]
        result = render(FigureJob("field-map", (csv,), tmp_path / "o.png"))
        df = pd.read_csv(csv)
        grid = result.plotted["grid"]
        masked = df.pivot(index="y_m", columns="x_m", values="valid").to_numpy()
        assert not masked.all()
        assert np.all(grid[~masked] == 0.0)
        assert grid.max() == 1.0

    def test_zero_color_present_in_image(self, tmp_path, golden):
        out = tmp_path / "map.png"
        render(FigureJob("field-map", tuple(golden["field-map"]), out))
        img = np.asarray(Image.open(out).convert("RGB"))
        zero_rgb = np.round(np.array(colormaps["viridis"](0.0)[:3]) * 255)
        hit = np.all(np.abs(img.astype(float) - zero_rgb) <= 1, axis=-1)
        # the masked annulus is a large region, not a stray pixel
        assert int(hit.sum()) > 500


class TestCli:
    def test_success_prints_path(self, tmp_path, golden, capsys):
        out = tmp_path / "o.png"
        rc = main(["--kind", "nf-ff", "--in", str(golden["nf-ff"][0]), "--out", str(out)])
        assert rc == 0
        assert str(out) in capsys.readouterr().out
        assert out.exists()

    def test_schema_error_exit_code(self, tmp_path, golden, capsys):
        rc = main(
            ["--kind", "gain-scan", "--in", str(golden["nf-ff"][0]),
             "--out", str(tmp_path / "o.png")]
        )
        assert rc == 2
        assert "does not match" in capsys.readouterr().err
        assert not (tmp_path / "o.png").exists()
