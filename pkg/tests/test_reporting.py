import pytest

from iadet.reporting import (
    ab_table,
    append_mean,
    box_filter_mean,
    format_ab_csv,
    format_ab_markdown,
    format_curve_csv,
    format_summary_markdown,
    summarize,
    summary_row_from_values,
    truncate_percent,
)
from iadet.simulator import SimulationConfig, simulate
from iadet.synth import make_uniform_records

# published per-class ratio column the mean row is checked against
TABLE1_RATIOS = [0.676, 0.747, 0.729, 0.864, 0.868, 0.709, 0.668, 0.602, 0.790, 0.783, 0.784]

# published final-AP rows: (A, N, B) with printed A/N percentages
TABLE2_ROWS = [
    ("0", 0.868, 0.915, 0.922),
    ("1", 0.917, 0.936, 0.934),
    ("2", 0.824, 0.859, 0.859),
]
TABLE2_PRINTED_PERCENTS = [94.8, 97.9, 95.9]
TABLE2_PRINTED_MEAN = 96.2


class TestSummarize:
    def test_single_run_ratio_improvement(self):
        row = summary_row_from_values("sheep", 421, 2007.0, 2558.0)
        assert row.ratio == pytest.approx(0.7845, abs=5e-4)
        assert 21.5 <= row.improvement_percent <= 21.6

    def test_rounded_ratio_gives_band_improvement(self):
        row = summary_row_from_values("sheep", 421, 0.784, 1.0)
        assert 21.5 <= round(row.improvement_percent, 1) <= 21.6

    def test_mean_of_published_ratio_column(self):
        rows = [summary_row_from_values(str(i), 1, r, 1.0) for i, r in enumerate(TABLE1_RATIOS)]
        mean = append_mean(rows)[-1]
        assert round(mean.ratio, 3) == 0.747

    def test_mean_of_equal_ratios(self):
        rows = [summary_row_from_values(n, 1, 0.6, 1.0) for n in "ab"]
        assert append_mean(rows)[-1].ratio == pytest.approx(0.6)

    def test_order_invariant_mean(self):
        rows = [summary_row_from_values(str(i), 1, r, 1.0) for i, r in enumerate(TABLE1_RATIOS)]
        fwd = append_mean(rows)[-1]
        rev = append_mean(list(reversed(rows)))[-1]
        assert fwd.ratio == pytest.approx(rev.ratio, rel=1e-12)

    def test_summarize_runs_end_to_end(self):
        records = make_uniform_records(10, 2)
        reports = [simulate(records, SimulationConfig(detector="perfect", seed=s)) for s in (0, 1)]
        rows = summarize(reports, ["a", "b"])
        assert [r.name for r in rows] == ["a", "b", "mean"]
        assert rows[-1].ratio == pytest.approx(rows[0].ratio)
        md = format_summary_markdown(rows)
        assert "| a |" in md and "| mean |" in md


class TestBoxFilterMean:
    def test_constant_curve_unchanged(self):
        assert box_filter_mean([[2.0] * 10], 3) == [2.0] * 10

    def test_window_one_is_pointwise_mean(self):
        got = box_filter_mean([[0, 1, 2], [2, 3, 4]], 1)
        assert got == [1.0, 2.0, 3.0]

    def test_impulse_hand_computed(self):
        # centered 3-window over [0,0,1,0,0]; edges use truncated windows
        got = box_filter_mean([[0, 0, 1, 0, 0]], 3)
        assert got == [0.0, pytest.approx(1 / 3), pytest.approx(1 / 3), pytest.approx(1 / 3), 0.0]

    def test_commutes_with_constant_shift(self):
        base = [[0.2, 0.9, 0.1, 0.7, 0.5, 0.3, 0.8]]
        shifted = [[v + 2.5 for v in base[0]]]
        a = box_filter_mean(base, 3)
        b = box_filter_mean(shifted, 3)
        assert all(y == pytest.approx(x + 2.5) for x, y in zip(a, b))

    def test_window_validation(self):
        with pytest.raises(ValueError):
            box_filter_mean([[1, 2, 3]], 2)
        with pytest.raises(ValueError):
            box_filter_mean([[1, 2, 3]], 5)
        with pytest.raises(ValueError):
            box_filter_mean([[1, 2], [1, 2, 3]], 1)


class TestAbTable:
    def test_published_percent_column(self):
        rows = ab_table(TABLE2_ROWS)
        printed = [truncate_percent(r.a_over_n_percent) for r in rows[:-1]]
        assert printed == TABLE2_PRINTED_PERCENTS
        assert truncate_percent(rows[-1].a_over_n_percent) == TABLE2_PRINTED_MEAN

    def test_published_mean_aps(self):
        mean = ab_table(TABLE2_ROWS)[-1]
        assert round(mean.ap_during, 3) == 0.870
        assert round(mean.ap_after_unassisted, 3) == 0.903
        assert round(mean.ap_bootstrapped, 3) == 0.905

    def test_equal_aps_give_hundred(self):
        rows = ab_table([("x", 0.5, 0.5, 0.5)])
        assert rows[0].a_over_n_percent == pytest.approx(100.0)

    def test_zero_reference_flagged(self):
        rows = ab_table([("x", 0.5, 0.0, 0.5)])
        assert rows[0].a_over_n_percent is None
        assert rows[-1].a_over_n_percent is None
        assert "undefined" in format_ab_markdown(rows)

    def test_ap_range_validated(self):
        with pytest.raises(ValueError):
            ab_table([("x", 1.2, 0.5, 0.5)])

    def test_csv_emitter(self):
        csv = format_ab_csv(ab_table(TABLE2_ROWS))
        assert csv.splitlines()[0] == "name,ap_during,ap_after_unassisted,ap_bootstrapped,a_over_n_percent"
        assert "94.8" in csv


def test_curve_csv():
    out = format_curve_csv([(0.0, 1.0), (1.5, 0.5)])
    assert out == "t,value\n0.0,1.0\n1.5,0.5\n"
