import io
import math

import pytest

from relay_aloha import (
    SimOverrides,
    SweepSpec,
    SystemParams,
    columns_for,
    delta_star_k2,
    figure_table,
    optimize_delta,
    run_sweep,
    s_star_k2,
)
from relay_aloha.sweep import format_cell, sweep_comments, write_csv

FIXED = SystemParams(1.0, 1, 0.0, 0.0, 1.0)


class TestSweepSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            SweepSpec(axis="load", values=(1.0,), fixed=FIXED)
        with pytest.raises(ValueError):
            SweepSpec(axis="g", values=(), fixed=FIXED)
        with pytest.raises(ValueError):
            SweepSpec(axis="g", values=(1.0, 1.0), fixed=FIXED)
        with pytest.raises(ValueError):
            SweepSpec(axis="g", values=(2.0, 1.0), fixed=FIXED)
        with pytest.raises(ValueError):
            SweepSpec(axis="g", values=(1.0,), fixed=FIXED, outputs=("s",))

    def test_columns_are_a_pure_function_of_the_spec(self):
        spec = SweepSpec(axis="g", values=(0.5, 1.0), fixed=FIXED,
                         outputs=("analytic", "bound"))
        assert columns_for(spec) == columns_for(spec)
        assert columns_for(spec) == [
            "g", "k", "eps_u", "eps_d", "delta",
            "analytic", "analytic_err", "bound", "bound_err", "error",
        ]
        sim_spec = SweepSpec(axis="g", values=(0.5,), fixed=FIXED,
                             outputs=("simulated",))
        assert "seed" in columns_for(sim_spec)
        assert "n_slots" in columns_for(sim_spec)


class TestRunSweep:
    def test_delta_axis_monotone_for_single_relay(self):
        spec = SweepSpec(axis="delta", values=(0.0, 0.5, 1.0), fixed=FIXED)
        rows = run_sweep(spec)
        vals = [r["analytic"] for r in rows]
        assert vals == sorted(vals)
        assert vals[0] == 0.0

    def test_eps_axis_sets_both_erasure_rates(self):
        spec = SweepSpec(axis="eps", values=(0.1, 0.4), fixed=FIXED)
        rows = run_sweep(spec)
        for row, eps in zip(rows, (0.1, 0.4)):
            assert row["eps_u"] == eps
            assert row["eps_d"] == eps

    def test_k_axis(self):
        spec = SweepSpec(
            axis="k", values=(1, 2, 4),
            fixed=SystemParams(1.4, 1, 0.3, 0.3, 1.0),
        )
        rows = run_sweep(spec)
        assert [r["k"] for r in rows] == [1, 2, 4]

    def test_failing_output_fills_the_error_cell(self):
        spec = SweepSpec(
            axis="eps_u", values=(0.0, 0.3), fixed=FIXED, outputs=("closed",)
        )
        rows = run_sweep(spec)
        assert rows[0]["closed"] == ""
        assert "singular" in rows[0]["error"]
        assert rows[1]["error"] == ""
        assert 0.0 <= rows[1]["closed"] <= 1.0

    def test_every_present_numeric_cell_is_finite(self):
        spec = SweepSpec(
            axis="g", values=(0.0, 1.0, 4.0),
            fixed=SystemParams(1.0, 2, 0.3, 0.3, 0.7),
            outputs=("analytic", "series", "bound", "delta_star", "s_star"),
        )
        for row in run_sweep(spec):
            assert row["error"] == ""
            for key, v in row.items():
                if isinstance(v, float):
                    assert math.isfinite(v)

    def test_star_columns_optimize_at_the_row_parameters(self):
        spec = SweepSpec(
            axis="eps", values=(0.2, 0.5),
            fixed=SystemParams(1.0, 2, 0.0, 0.0, 1.0),
            outputs=("delta_star", "s_star"),
        )
        rows = run_sweep(spec)
        for row, eps in zip(rows, (0.2, 0.5)):
            ref = optimize_delta(1.0, 2, eps, eps)
            assert row["delta_star"] == ref.arg_star
            assert row["s_star"] == ref.value_star

    def test_k_axis_star_column_peaks_at_four_relays(self):
        eps = 0.5
        spec = SweepSpec(
            axis="k", values=tuple(range(1, 11)),
            fixed=SystemParams(2.0, 1, eps, eps, 1.0),
            outputs=("s_star",),
        )
        rows = run_sweep(spec)
        best = max(rows, key=lambda r: r["s_star"])
        assert best["k"] == 4

    def test_star_columns_at_peak_load_match_the_closed_forms(self):
        eps = 0.3
        spec = SweepSpec(
            axis="eps", values=(eps,),
            fixed=SystemParams(1 / (1 - eps), 2, 0.0, 0.0, 1.0),
            outputs=("delta_star", "s_star"),
        )
        (row,) = run_sweep(spec)
        assert row["delta_star"] == delta_star_k2(eps, eps)
        assert row["s_star"] == pytest.approx(s_star_k2(eps, eps), abs=1e-12)

    def test_simulated_output_is_deterministic_and_annotated(self):
        spec = SweepSpec(
            axis="g", values=(0.5, 1.0),
            fixed=SystemParams(1.0, 2, 0.2, 0.2, 1.0),
            outputs=("analytic", "simulated"),
            sim=SimOverrides(n_slots=20_000, seed=5),
        )
        rows_a = run_sweep(spec)
        rows_b = run_sweep(spec)
        assert rows_a == rows_b
        for row in rows_a:
            assert row["seed"] == 5
            assert row["n_slots"] == 20_000
            assert abs(row["simulated"] - row["analytic"]) <= 5 * row["simulated_err"]

    def test_rows_track_values_in_order(self):
        spec = SweepSpec(axis="g", values=(0.25, 0.5, 2.0), fixed=FIXED)
        rows = run_sweep(spec)
        assert [r["g"] for r in rows] == [0.25, 0.5, 2.0]


class TestCsvWriting:
    def test_ten_significant_digits(self):
        assert format_cell(math.exp(-1)) == "0.3678794412"
        assert format_cell(0.15000000000000002) == "0.15"
        assert format_cell(3) == "3"
        assert format_cell("") == ""

    def test_byte_identical_output(self):
        spec = SweepSpec(
            axis="eps", values=(0.1, 0.3, 0.5),
            fixed=SystemParams(1.0, 2, 0.0, 0.0, 1.0),
            outputs=("analytic", "bound"),
        )
        outs = []
        for _ in range(2):
            buf = io.StringIO()
            write_csv(buf, columns_for(spec), run_sweep(spec),
                      sweep_comments(spec))
            outs.append(buf.getvalue())
        assert outs[0] == outs[1]
        lines = outs[0].split("\n")
        assert lines[0].startswith("# relay-aloha")
        header = next(l for l in lines if not l.startswith("#"))
        assert header.split(",")[0] == "g"
        assert "\r" not in outs[0]


class TestFigureTables:
    def test_fig2_shape_and_interior_peak(self):
        _, cols, rows = figure_table("fig2")
        assert cols == ["eps", "g", "s", "s_bound"]
        assert len(rows) == 3 * 101
        curve = [r["s"] for r in rows if r["eps"] == 0.3]
        peak = max(curve)
        assert peak > curve[0] and peak > curve[-1]
        assert all(r["s"] <= r["s_bound"] + 1e-12 for r in rows)

    def test_fig3_clean_channel_row(self):
        _, _, rows = figure_table("fig3")
        assert len(rows) == 99
        first = rows[0]
        assert first["eps"] == 0.0
        assert first["delta_star"] == 0.5
        assert first["s_star"] == pytest.approx(1 / (2 * math.e), rel=1e-14)
        assert first["s_single_relay"] == pytest.approx(
            math.exp(-1), rel=1e-14
        )

    def test_fig3_single_relay_column_is_exact(self):
        _, _, rows = figure_table("fig3")
        for r in rows:
            assert r["s_single_relay"] == (1.0 - r["eps"]) * math.exp(-1.0)

    def test_fig3_optimum_rises_then_falls(self):
        _, _, rows = figure_table("fig3")
        vals = [r["s_star"] for r in rows]
        peak = max(range(len(vals)), key=lambda i: vals[i])
        assert 0 < peak < len(vals) - 1
        assert all(a <= b + 1e-15 for a, b in zip(vals[:peak], vals[1:peak + 1]))
        assert all(a >= b - 1e-15 for a, b in zip(vals[peak:], vals[peak + 1:]))

    def test_fig4_monotone_in_each_erasure_rate(self):
        _, _, rows = figure_table("fig4")
        assert len(rows) == 400
        table = {(r["eps_u"], r["eps_d"]): r["s_star"] for r in rows}
        eus = sorted({u for u, _ in table})
        eds = sorted({d for _, d in table})
        for d in eds:
            col = [table[(u, d)] for u in eus]
            assert all(b >= a - 1e-12 for a, b in zip(col, col[1:]))
        for u in eus:
            row = [table[(u, d)] for d in eds]
            assert all(b <= a + 1e-12 for a, b in zip(row, row[1:]))

    def test_fig5_argmax_relay_counts(self):
        _, _, rows = figure_table("fig5")
        for eps, expected in ((0.1, 1), (0.3, 2), (0.5, 4)):
            curve = [(r["k"], r["s_star"]) for r in rows if r["eps"] == eps]
            best_k = max(curve, key=lambda kv: kv[1])[0]
            assert best_k == expected

    def test_unknown_figure(self):
        with pytest.raises(ValueError):
            figure_table("fig9")
