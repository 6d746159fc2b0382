"""Summary tables and curve post-processing in the published formats.

Display rounding: ratios get 3 decimals; percentage columns derived from
AP ratios are truncated (not rounded) to 1 decimal, which is what the
reference tables print.
"""
from __future__ import annotations

import io
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from typing import Sequence

from .simulator import RunReport

DEFAULT_BOX_FILTER_WINDOW = 9


@dataclass(frozen=True)
class SummaryRow:
    name: str
    image_count: int
    t_assisted: float
    t_unassisted: float
    ratio: float
    improvement_percent: float


@dataclass(frozen=True)
class AbRow:
    name: str
    ap_during: float  # A: trained while annotating
    ap_after_unassisted: float  # N: trained after unassisted annotation
    ap_bootstrapped: float  # B: trained after assisted annotation, init from A
    a_over_n_percent: float | None  # None when N == 0 (undefined)


def append_mean(rows: list[SummaryRow]) -> list[SummaryRow]:
    """Append the unweighted mean of ratio and improvement across rows."""
    if not rows:
        raise ValueError("need at least one row")
    mean_ratio = sum(r.ratio for r in rows) / len(rows)
    mean_improvement = sum(r.improvement_percent for r in rows) / len(rows)
    return rows + [
        SummaryRow(
            name="mean",
            image_count=sum(r.image_count for r in rows),
            t_assisted=sum(r.t_assisted for r in rows),
            t_unassisted=sum(r.t_unassisted for r in rows),
            ratio=mean_ratio,
            improvement_percent=mean_improvement,
        )
    ]


def summarize(reports: Sequence[RunReport], names: Sequence[str]) -> list[SummaryRow]:
    """One row per run plus an unweighted mean row."""
    if not reports:
        raise ValueError("need at least one report")
    if len(reports) != len(names):
        raise ValueError("reports and names must align")
    rows = [
        SummaryRow(
            name=name,
            image_count=len(r.rows),
            t_assisted=r.t_assisted,
            t_unassisted=r.t_unassisted,
            ratio=r.ratio,
            improvement_percent=r.improvement_percent,
        )
        for r, name in zip(reports, names)
    ]
    return append_mean(rows)


def summary_row_from_values(
    name: str, image_count: int, t_assisted: float, t_unassisted: float
) -> SummaryRow:
    ratio = t_assisted / t_unassisted
    return SummaryRow(
        name=name,
        image_count=image_count,
        t_assisted=t_assisted,
        t_unassisted=t_unassisted,
        ratio=ratio,
        improvement_percent=(1.0 - ratio) * 100.0,
    )


def box_filter_mean(curves: Sequence[Sequence[float]], window: int) -> list[float]:
    """Pointwise mean of curves followed by a centered moving average.

    All curves must share one sample grid; the window must be odd and no
    longer than the series. Edges use truncated windows.
    """
    if not curves:
        raise ValueError("need at least one curve")
    n = len(curves[0])
    if any(len(c) != n for c in curves):
        raise ValueError("curves must share a common grid")
    if window % 2 != 1:
        raise ValueError("window must be odd")
    if window > n:
        raise ValueError(f"window {window} exceeds series length {n}")
    mean = [sum(c[i] for c in curves) / len(curves) for i in range(n)]
    half = window // 2
    out = []
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        out.append(sum(mean[lo:hi]) / (hi - lo))
    return out


def ab_table(entries: Sequence[tuple[str, float, float, float]]) -> list[AbRow]:
    """Rows of final APs for runs A/N/B plus 100*A/N, with a mean row.

    A zero reference AP flags the row (and the mean's percent) undefined.
    """
    if not entries:
        raise ValueError("need at least one entry")
    rows = []
    for name, a, n, b in entries:
        for v in (a, n, b):
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"AP values must be in [0, 1], got {v}")
        percent = 100.0 * a / n if n > 0 else None
        rows.append(AbRow(name, a, n, b, percent))
    mean_percent_values = [r.a_over_n_percent for r in rows]
    mean_percent = (
        sum(mean_percent_values) / len(rows)
        if all(p is not None for p in mean_percent_values)
        else None
    )
    rows.append(
        AbRow(
            name="mean",
            ap_during=sum(r.ap_during for r in rows) / len(rows),
            ap_after_unassisted=sum(r.ap_after_unassisted for r in rows) / len(rows),
            ap_bootstrapped=sum(r.ap_bootstrapped for r in rows) / len(rows),
            a_over_n_percent=mean_percent,
        )
    )
    return rows


# -- display formatting -------------------------------------------------------


def truncate_percent(value: float, places: int = 1) -> float:
    """Truncate toward zero at the given decimal place (table convention)."""
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(value)).quantize(q, rounding=ROUND_DOWN))


def format_summary_markdown(rows: Sequence[SummaryRow]) -> str:
    out = io.StringIO()
    out.write("| Class | # Images | t_A (s) | t_N (s) | t_A / t_N | % Improvement |\n")
    out.write("|---|---|---|---|---|---|\n")
    for r in rows:
        out.write(
            f"| {r.name} | {r.image_count} | {r.t_assisted:.0f} | {r.t_unassisted:.0f} "
            f"| {r.ratio:.3f} | {r.improvement_percent:.1f} |\n"
        )
    return out.getvalue()


def format_summary_csv(rows: Sequence[SummaryRow]) -> str:
    out = io.StringIO()
    out.write("class,images,t_assisted,t_unassisted,ratio,improvement_percent\n")
    for r in rows:
        out.write(
            f"{r.name},{r.image_count},{r.t_assisted},{r.t_unassisted},"
            f"{r.ratio},{r.improvement_percent}\n"
        )
    return out.getvalue()


def format_ab_markdown(rows: Sequence[AbRow]) -> str:
    out = io.StringIO()
    out.write("| Index | A | N | B | A/N (%) |\n|---|---|---|---|---|\n")
    for r in rows:
        percent = (
            f"{truncate_percent(r.a_over_n_percent):.1f}"
            if r.a_over_n_percent is not None
            else "undefined"
        )
        out.write(
            f"| {r.name} | {r.ap_during:.3f} | {r.ap_after_unassisted:.3f} "
            f"| {r.ap_bootstrapped:.3f} | {percent} |\n"
        )
    return out.getvalue()


def format_ab_csv(rows: Sequence[AbRow]) -> str:
    out = io.StringIO()
    out.write("name,ap_during,ap_after_unassisted,ap_bootstrapped,a_over_n_percent\n")
    for r in rows:
        percent = (
            f"{truncate_percent(r.a_over_n_percent):.1f}"
            if r.a_over_n_percent is not None
            else ""
        )
        out.write(
            f"{r.name},{r.ap_during},{r.ap_after_unassisted},{r.ap_bootstrapped},{percent}\n"
        )
    return out.getvalue()


def format_curve_csv(curve: Sequence[tuple[float, float]]) -> str:
    out = io.StringIO()
    out.write("t,value\n")
    for t, v in curve:
        out.write(f"{t},{v}\n")
    return out.getvalue()
