"""Distribution of the rumor range R and fractional-linear bounds on it.

R + 1 is the extinction time of the embedded branching process, so

    P(R > m) = 1 - G^{(m+1)}(0)

with G the spreader p.g.f.  For a subcritical law with mean mu the tail is
sandwiched between B(l, m) and B(u, m), where

    B(x, m) = (x - 1) mu^{m+1} / (x - mu^{m+1}).

B is increasing in x, so the two constants cannot be assigned to fixed sides
a priori; the bounds are reported as (min, max) over the two constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS
from .errors import BoundsNotApplicable
from .spreader import SpreaderLaw, pgf, pgf_derivative

MAX_SERIES_TERMS = 20_000_000


@dataclass(frozen=True)
class FlgfConstants:
    mu: float
    ell: float
    u: float
    condition_holds: bool
    second_moment: float      # G''(1)
    q0: float                 # G(0) = E(1/(xi+1))
    c_lower: float
    c_upper: float

    def record(self) -> dict:
        return {"mu": self.mu, "ell": self.ell, "u": self.u,
                "conditionHolds": self.condition_holds,
                "cLower": self.c_lower, "cUpper": self.c_upper}


@dataclass(frozen=True)
class TailRow:
    m: int
    lower: float
    exact: float
    upper: float


@dataclass(frozen=True)
class RangeBounds:
    mu: float
    ell: float | None
    u: float | None
    condition_holds: bool
    per_m: list[TailRow] = field(repr=False)
    expected_range: tuple[float, float]
    expected_range_exact: float

    def record(self) -> dict:
        return {"mu": self.mu, "ell": self.ell, "u": self.u,
                "conditionHolds": self.condition_holds,
                "eLower": self.expected_range[0], "eExact": self.expected_range_exact,
                "eUpper": self.expected_range[1]}


def condition_holds(sl: SpreaderLaw, grid: int = DEFAULTS.condition_grid,
                    slack: float = DEFAULTS.condition_slack) -> bool:
    """mu G''(s) - G'(s) G''(1) >= 0 on a uniform grid of [0, 1]."""
    q = sl.pmf_table
    d1 = np.polynomial.polynomial.polyder(q, 1)
    d2 = np.polynomial.polynomial.polyder(q, 2)
    if d2.size == 0:
        return False
    s = np.linspace(0.0, 1.0, grid)
    mu = pgf_derivative(sl, 1.0, 1)
    g2 = pgf_derivative(sl, 1.0, 2)
    vals = mu * np.polynomial.polynomial.polyval(s, d2) - np.polynomial.polynomial.polyval(s, d1) * g2
    return bool(np.all(vals >= -slack))


def flgf_constants(sl: SpreaderLaw) -> FlgfConstants:
    mu = pgf_derivative(sl, 1.0, 1)
    g2 = pgf_derivative(sl, 1.0, 2)
    if not g2 > 0.0:
        raise BoundsNotApplicable("G''(1) = 0: X takes at most the values 0 and 1, "
                                  "no fractional-linear bounds")
    q0 = pgf(sl, 0.0)
    ell = 1.0 - 2.0 * mu * (mu - 1.0) / g2
    denom = mu + q0 - 1.0
    u = mu * q0 / denom if denom > 0.0 else math.inf
    return FlgfConstants(mu, ell, u, condition_holds(sl), g2, q0,
                         g2 / (2.0 * mu + g2), denom / mu if mu else math.nan)


def flgf_tail(x: float, mu: float, m: int) -> float:
    """B(x, m) = (x-1) mu^{m+1} / (x - mu^{m+1})."""
    a = mu ** (m + 1)
    return (x - 1.0) * a / (x - a)


def exact_tails(sl: SpreaderLaw, m_max: int) -> np.ndarray:
    """P(R > m) for m = 0..m_max.

    Iterates t -> 1 - G(1 - t) in complemented form so that small tails keep
    their relative accuracy.  Mass dropped by truncation counts as X = 0.
    """
    q = sl.pmf_table
    out = np.empty(m_max + 1)
    if m_max < 0:
        return out
    out[0] = 1.0 - pgf(sl, 0.0)
    idx = np.arange(1, q.size)
    w = q[1:]
    t = out[0]
    for m in range(1, m_max + 1):
        if t <= 0.0:
            out[m:] = 0.0
            break
        log_keep = math.log1p(-t) if t < 1.0 else -math.inf
        t = float(np.dot(w, -np.expm1(idx * log_keep)))
        out[m] = t
    return out


def exact_tail(sl: SpreaderLaw, m: int) -> float:
    if m < 0:
        raise ValueError("m must be nonnegative")
    return float(exact_tails(sl, m)[m])


def _require_applicable(c: FlgfConstants, m: int | None = None, check_condition: bool = True):
    if not c.mu < 1.0:
        raise BoundsNotApplicable(f"mu = {c.mu!r} >= 1: the range is infinite with positive probability")
    if check_condition and not c.condition_holds:
        raise BoundsNotApplicable("mu G''(s) - G'(s) G''(1) >= 0 fails on [0, 1]")
    if not (c.ell > 1.0 and c.u > 1.0):
        raise BoundsNotApplicable(f"constants not above 1 (ell={c.ell!r}, u={c.u!r})")
    if m is not None and not c.mu ** (m + 1) < min(c.ell, c.u):
        raise BoundsNotApplicable("mu^(m+1) >= min(ell, u)")


def tail_bounds(sl: SpreaderLaw, m: int, check_condition: bool = True) -> tuple[float, float]:
    """(min, max) of B(ell, m) and B(u, m).

    ``check_condition=False`` skips the convexity-type condition on G and
    evaluates the bounds outside their proven range (for experiments only).
    """
    c = flgf_constants(sl)
    _require_applicable(c, m, check_condition)
    a, b = flgf_tail(c.ell, c.mu, m), flgf_tail(c.u, c.mu, m)
    return min(a, b), max(a, b)


def _remainder(x: float, mu: float, last: int) -> float:
    # sum_{m > last} B(x, m) <= (x-1)/(x - mu^{last+2}) * mu^{last+2} / (1 - mu)
    a = mu ** (last + 2)
    return (x - 1.0) / (x - a) * a / (1.0 - mu)


def _series_terms(mu: float, m_max: int, rel: float = 1e-17) -> int:
    """Index of the last term needed before the geometric tail drops below ``rel``."""
    if not 0.0 < mu < 1.0:
        return m_max
    need = math.log(rel * (1.0 - mu)) / math.log(mu)
    return int(min(max(m_max, math.ceil(need)), MAX_SERIES_TERMS))


def expected_range_exact(sl: SpreaderLaw, rel: float = 1e-16,
                         max_terms: int = MAX_SERIES_TERMS) -> float:
    """E(R) = sum_m P(R > m), iterated until the geometric remainder is below ``rel``.

    Infinite when mu >= 1: the tails then decay no faster than 1/m.
    """
    q = sl.pmf_table.tolist()
    mu = pgf_derivative(sl, 1.0, 1)
    if mu >= 1.0:
        return math.inf
    terms = [(i, qi) for i, qi in enumerate(q) if i and qi]
    t = 1.0 - pgf(sl, 0.0)
    acc = []
    total = 0.0
    for _ in range(max_terms):
        if t <= 0.0:
            break
        acc.append(t)
        total += t
        if mu < 1.0 and t <= rel * total * (1.0 - mu):
            break
        log_keep = math.log1p(-t) if t < 1.0 else -math.inf
        t = math.fsum(-qi * math.expm1(i * log_keep) for i, qi in terms)
    return math.fsum(acc)


def expected_range_bounds(sl: SpreaderLaw, m_max: int = DEFAULTS.m_max) -> RangeBounds:
    """Per-m tail sandwich for m <= m_max and the resulting interval for E(R).

    The bound series are summed until their geometric tail is negligible, plus
    the certified remainder on the upper side; ``m_max`` only sets how many
    per-m rows are reported.
    """
    if m_max < 0:
        raise ValueError("m_max must be nonnegative")
    mu = pgf_derivative(sl, 1.0, 1)
    exact = exact_tails(sl, m_max)
    if mu == 0.0:
        rows = [TailRow(m, 0.0, float(exact[m]), 0.0) for m in range(m_max + 1)]
        return RangeBounds(0.0, None, None, True, rows, (0.0, 0.0), 0.0)
    c = flgf_constants(sl)
    _require_applicable(c)
    e_exact = expected_range_exact(sl)
    last = _series_terms(c.mu, m_max)
    ms = np.arange(last + 1)
    a = c.mu ** (ms + 1)
    b_ell = (c.ell - 1.0) * a / (c.ell - a)
    b_u = (c.u - 1.0) * a / (c.u - a)
    lo, hi = np.minimum(b_ell, b_u), np.maximum(b_ell, b_u)
    x_hi = c.ell if b_ell[0] >= b_u[0] else c.u
    rows = [TailRow(m, float(lo[m]), float(exact[m]), float(hi[m])) for m in range(m_max + 1)]
    e_lo = math.fsum(lo)
    e_hi = math.fsum(hi) + _remainder(x_hi, c.mu, last)
    return RangeBounds(c.mu, c.ell, c.u, c.condition_holds, rows, (e_lo, e_hi), e_exact)
