"""Unit tests for PlotSpec and render on synthetic sweep CSVs.

The CSVs follow the shadowlab sweep schema and encode exact power laws, so
every fitted slope has a known closed-form value.
"""

import csv
import math

import pytest

from plotkit import KINDS, PlotSpec, render

COLUMNS = (
    "ensemble",
    "n",
    "M",
    "K",
    "param",
    "observable",
    "trials",
    "mean_estimate",
    "empirical_variance",
    "predicted_variance",
    "stderr_variance",
    "seed",
)

M_VALUES = (8, 16, 32, 64, 128, 256, 512, 1024)
K_VALUES = (1, 2, 4, 8, 16, 32, 64)


def write_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    return str(path)


def base_row(**kw):
    row = {
        "ensemble": "pauli",
        "n": 5,
        "M": 32,
        "K": 8,
        "param": 2,
        "observable": "pauli:ZZIII",
        "trials": 10000,
        "mean_estimate": 1.0,
        "empirical_variance": 0.25,
        "predicted_variance": "",
        "stderr_variance": 0.01,
        "seed": 101,
    }
    row.update(kw)
    return row


def grid_rows(observable, var_of):
    return [
        base_row(M=m, K=k, observable=observable, empirical_variance=var_of(m, k))
        for m in M_VALUES
        for k in K_VALUES
    ]


def weight_rows():
    # variance 3^w / 4096: log2(std) has slope log2(3)/2 = 0.792 in w
    return [
        base_row(
            n=8,
            M=64,
            K=64,
            param=w,
            observable="pauli:" + "Z" * w + "I" * (8 - w),
            empirical_variance=3.0 ** w / 4096.0,
            predicted_variance=3.0 ** w / 4096.0,
        )
        for w in (2, 4, 6, 8)
    ]


def scaling_rows():
    # projector rows flat, padded-ZZ rows with variance 2^n / 1024 (slope 1/2)
    rows = []
    for n in range(2, 9):
        rows.append(
            base_row(
                ensemble="clifford", n=n, M=32, K=32, param=0.0,
                observable=f"ghz_proj:n={n}", empirical_variance=0.5,
            )
        )
        rows.append(
            base_row(
                ensemble="clifford", n=n, M=32, K=32, param=0.0,
                observable="pauli:ZZ" + "I" * (n - 2),
                empirical_variance=2.0 ** n / 1024.0,
            )
        )
    return rows


def slope_of(report, label):
    for line in report.splitlines():
        if line.startswith(f"SLOPE {label}: "):
            return float(line.rsplit(" ", 1)[1])
    raise AssertionError(f"no SLOPE line for {label!r} in {report!r}")


class TestPlotSpec:
    def test_kinds_tuple(self):
        assert KINDS == ("heatmap_MK", "line_vs_w", "line_vs_n", "line_vs_K")

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError, match="kind must be one of"):
            PlotSpec("rows.csv", "scatter", "out.png")

    def test_rejects_bad_extension(self):
        with pytest.raises(ValueError, match="must end in .png or .svg"):
            PlotSpec("rows.csv", "heatmap_MK", "out.pdf")


class TestLinePlots:
    def test_k_slope_minus_half(self, tmp_path):
        path = write_csv(tmp_path / "xx.csv", grid_rows("pauli:XXIII", lambda m, k: 9.0 / (m * k)))
        report = render(PlotSpec(path, "line_vs_K", tmp_path / "xx.png"))
        for m in M_VALUES:
            assert slope_of(report, f"pauli:XXIII M={m}") == pytest.approx(-0.5, abs=5e-4)
        assert (tmp_path / "xx.png").stat().st_size > 0

    def test_k_slope_zero_when_variance_flat_in_k(self, tmp_path):
        path = write_csv(tmp_path / "zz.csv", grid_rows("pauli:ZZIII", lambda m, k: 8.0 / m))
        report = render(PlotSpec(path, "line_vs_K", tmp_path / "zz.png"))
        for m in M_VALUES:
            assert slope_of(report, f"pauli:ZZIII M={m}") == pytest.approx(0.0, abs=5e-4)

    def test_w_slope_is_half_log2_three(self, tmp_path):
        path = write_csv(tmp_path / "w.csv", weight_rows())
        report = render(PlotSpec(path, "line_vs_w", tmp_path / "w.png"))
        assert slope_of(report, "Z M=64 K=64") == pytest.approx(math.log2(3.0) / 2.0, abs=5e-4)
        assert "SLOPE Z M=64 K=64: 0.792" in report

    def test_n_slopes_split_by_observable_family(self, tmp_path):
        path = write_csv(tmp_path / "n.csv", scaling_rows())
        report = render(PlotSpec(path, "line_vs_n", tmp_path / "n.svg"))
        assert slope_of(report, "ghz_proj M=32 K=32") == pytest.approx(0.0, abs=5e-4)
        assert slope_of(report, "pauli:ZZ M=32 K=32") == pytest.approx(0.5, abs=5e-4)
        assert (tmp_path / "n.svg").stat().st_size > 0

    def test_report_is_deterministic(self, tmp_path):
        path = write_csv(tmp_path / "w.csv", weight_rows())
        first = render(PlotSpec(path, "line_vs_w", tmp_path / "a.png"))
        second = render(PlotSpec(path, "line_vs_w", tmp_path / "b.png"))
        assert first == second

    def test_overlay_tolerates_empty_predicted_cells(self, tmp_path):
        rows = scaling_rows()  # predicted_variance empty on every row
        rows[1]["predicted_variance"] = rows[1]["empirical_variance"]
        path = write_csv(tmp_path / "n.csv", rows)
        report = render(PlotSpec(path, "line_vs_n", tmp_path / "n.png", overlay_predicted=True))
        assert "SLOPE" in report

    def test_overlay_requires_predicted_column(self, tmp_path):
        rows = [{k: v for k, v in row.items() if k != "predicted_variance"} for row in weight_rows()]
        path = tmp_path / "w.csv"
        with open(path, "w", newline="") as fh:
            cols = [c for c in COLUMNS if c != "predicted_variance"]
            writer = csv.DictWriter(fh, fieldnames=cols)
            writer.writeheader()
            writer.writerows(rows)
        with pytest.raises(ValueError, match="missing column.s.: predicted_variance"):
            render(PlotSpec(path, "line_vs_w", tmp_path / "w.png", overlay_predicted=True))

    def test_single_x_group_is_an_empty_selection(self, tmp_path):
        path = write_csv(tmp_path / "one.csv", [base_row()])
        with pytest.raises(ValueError, match="empty selection: group"):
            render(PlotSpec(path, "line_vs_K", tmp_path / "one.png"))


class TestHeatmap:
    def test_renders_full_grid(self, tmp_path):
        path = write_csv(tmp_path / "zz.csv", grid_rows("pauli:ZZIII", lambda m, k: 8.0 / m))
        report = render(PlotSpec(path, "heatmap_MK", tmp_path / "zz.png"))
        assert report == "HEATMAP pauli:ZZIII: 8x7 cells"
        assert (tmp_path / "zz.png").stat().st_size > 0

    def test_rejects_mixed_observables(self, tmp_path):
        rows = grid_rows("pauli:ZZIII", lambda m, k: 8.0 / m) + [base_row(observable="pauli:XXIII", empirical_variance=1.0)]
        path = write_csv(tmp_path / "mixed.csv", rows)
        with pytest.raises(ValueError, match="single observable"):
            render(PlotSpec(path, "heatmap_MK", tmp_path / "mixed.png"))

    def test_rejects_duplicate_cells(self, tmp_path):
        path = write_csv(tmp_path / "dup.csv", [base_row(), base_row()])
        with pytest.raises(ValueError, match="duplicate cell M=32 K=8"):
            render(PlotSpec(path, "heatmap_MK", tmp_path / "dup.png"))


class TestInputValidation:
    def test_missing_columns_are_named(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("ensemble,n,M\npauli,5,8\n")
        with pytest.raises(ValueError, match="missing column.s.: observable, K, empirical_variance"):
            render(PlotSpec(path, "heatmap_MK", tmp_path / "bad.png"))

    def test_header_only_file_is_empty_selection(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text(",".join(COLUMNS) + "\n")
        with pytest.raises(ValueError, match="empty selection: no data rows"):
            render(PlotSpec(path, "line_vs_K", tmp_path / "empty.png"))

    def test_zero_variance_rejected_on_log_axis(self, tmp_path):
        path = write_csv(tmp_path / "zero.csv", [base_row(empirical_variance=0.0), base_row(K=16)])
        with pytest.raises(ValueError, match="positive empirical_variance"):
            render(PlotSpec(path, "line_vs_K", tmp_path / "zero.png"))
