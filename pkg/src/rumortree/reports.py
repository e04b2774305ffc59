"""Plot-ready reproductions of the survival curve, range-bound grid and critical table.

Each report is a CSV table plus a JSON summary.  Summaries are computed from
the rounded cell values, so re-reading the CSV and calling the same summary
function reproduces the JSON exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .config import DEFAULTS
from .laws import Binomial
from .output import rounded
from .rumor_range import expected_range_bounds
from .spreader import build
from .survival import binom3_closed_form, binomial_poisson_limit_table, survival

CURVE_STEP = 0.005
RANGE_GRID = tuple(round(0.05 * k, 2) for k in range(1, 16)) + (0.78, 0.7875)
CRITICAL_N = (3, 4, 5, 10, 25, 50, 100, 150)


@dataclass(frozen=True)
class Report:
    name: str
    header: tuple[str, ...]
    rows: list[list]
    summarize: Callable[[list[list]], dict]

    def summary(self) -> dict:
        return self.summarize(self.rows)


def _grid(step: float) -> list[float]:
    n = round(1.0 / step)
    return [round(k * step, 10) for k in range(n + 1)]


def summarize_fig2(rows: list[list]) -> dict:
    alive = [r[0] for r in rows if r[1] > 0.0]
    return {
        "points": len(rows),
        "firstPositiveP": alive[0] if alive else None,
        "thetaAtOne": rows[-1][1],
        "maxAbsDiff": max(abs(r[1] - r[2]) for r in rows),
    }


def fig2(step: float = CURVE_STEP, tol: float = DEFAULTS.tol, eps: float = DEFAULTS.eps) -> Report:
    """Survival probability theta(3, p): solver and closed form."""
    rows = []
    for p in _grid(step):
        theta = survival(Binomial(3, p), eps, tol).theta
        rows.append(rounded([p, theta, binom3_closed_form(p)]))
    return Report("fig2", ("p", "theta", "thetaClosedForm"), rows, summarize_fig2)


def summarize_fig5(rows: list[list]) -> dict:
    return {
        "points": len(rows),
        "maxWidth": max(r[3] - r[1] for r in rows),
        "exactInside": all(r[1] <= r[2] <= r[3] for r in rows),
    }


def fig5(grid=RANGE_GRID, m_max: int = DEFAULTS.m_max, eps: float = DEFAULTS.eps) -> Report:
    """Interval for E(R) and its exact value under Binomial(3, p)."""
    rows = []
    for p in grid:
        rb = expected_range_bounds(build(Binomial(3, p), eps), m_max)
        rows.append(rounded([p, rb.expected_range[0], rb.expected_range_exact, rb.expected_range[1]]))
    return Report("fig5", ("p", "eLower", "eExact", "eUpper"), rows, summarize_fig5)


def summarize_table1(rows: list[list]) -> dict:
    finite = [r for r in rows if r[0] != "inf"]
    scaled = [r[2] for r in finite]
    return {
        "rows": len(finite),
        "scaledIncreasing": all(a < b for a, b in zip(scaled, scaled[1:])),
        "limit": [r[2] for r in rows if r[0] == "inf"][0],
        "gapToLimit": [r[2] for r in rows if r[0] == "inf"][0] - scaled[-1],
    }


def table1(n_values=CRITICAL_N, tol: float = DEFAULTS.tol, eps: float = DEFAULTS.eps) -> Report:
    """Critical p_c(n) of Binomial(n, p), n p_c(n) and the Poisson limit."""
    table = binomial_poisson_limit_table(n_values, tol=tol, eps=eps)
    rows = [rounded([r["n"], r["p_c"], r["n_p_c"]]) for r in table]
    return Report("table1", ("n", "p_c", "n_p_c"), rows, summarize_table1)


REPORTS = {"fig2": fig2, "fig5": fig5, "table1": table1}
SUMMARIES = {"fig2": summarize_fig2, "fig5": summarize_fig5, "table1": summarize_table1}


def parse_rows(name: str, rows: list[list[str]]) -> list[list]:
    """Inverse of the CSV rendering for a report table."""
    out = []
    for r in rows:
        first = r[0] if (name == "table1" and r[0] == "inf") else (int(r[0]) if name == "table1" else float(r[0]))
        out.append([first] + [float(x) for x in r[1:]])
    return out
