"""Extinction and survival probabilities and critical-parameter location.

The rumor survives exactly when the embedded branching process with offspring
law X(xi) survives, so the extinction probability is the smallest fixed point
of its p.g.f. and survival is possible iff E(X(xi)) > 1.  Criticality is
always decided on the certified mean interval, never on the solver output.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULTS
from .errors import ConvergenceError, NumericalError
from .laws import Binomial, Geometric, OffspringLaw, Poisson
from .spreader import SpreaderLaw, build, mean_with_bounds


@dataclass(frozen=True)
class SurvivalResult:
    psi: float
    theta: float
    mean: tuple[float, float]
    iterations: int
    residual: float

    def record(self) -> dict:
        return {"psi": self.psi, "theta": self.theta,
                "meanLower": self.mean[0], "meanUpper": self.mean[1],
                "iterations": self.iterations, "residual": self.residual}


def extinction_probability(sl: SpreaderLaw, tol: float = DEFAULTS.tol,
                           max_iter: int = DEFAULTS.max_iter,
                           aitken_after: int = DEFAULTS.aitken_after) -> SurvivalResult:
    """Smallest fixed point of the spreader p.g.f. by monotone iteration from 0.

    Stops once the geometric estimate of the remaining distance to the fixed
    point drops below ``tol``.  After ``aitken_after`` plain steps an Aitken
    extrapolate is tried each step and kept only if it stays on the left of
    the fixed point (where G(s) >= s).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = sl.pmf_table
    G = np.polynomial.Polynomial(q)
    mean = sl.mean_interval
    if mean[1] <= 1.0:
        return SurvivalResult(1.0, 0.0, mean, 0, abs(float(G(1.0)) - 1.0))

    s, prev_inc, it = 0.0, None, 0
    while it < max_iter:
        nxt = float(G(s))
        it += 1
        inc = nxt - s
        if inc < -1e-15 or nxt > 1.0 + 1e-15:
            raise NumericalError(f"iteration left the monotone regime at s={s!r}")
        s = max(s, min(nxt, 1.0))
        if inc <= 0.0:
            break
        if prev_inc:
            rho = inc / prev_inc
            remaining = inc * rho / (1.0 - rho) if rho < 1.0 else math.inf
            if inc < tol and remaining < tol:
                break
            if it >= aitken_after:
                x1 = float(G(s))
                denom = x1 - 2 * s + (s - inc)
                if denom < 0.0:
                    cand = x1 - (x1 - s) ** 2 / denom
                    if s < cand < 1.0 and float(G(cand)) >= cand:
                        s, prev_inc = cand, None
                        continue
        prev_inc = inc
    else:
        raise ConvergenceError(
            f"no convergence after {max_iter} iterations (near-critical law?)")
    psi = s
    return SurvivalResult(psi, 1.0 - psi, mean, it, abs(float(G(psi)) - psi))


def survival(law: OffspringLaw, eps: float = DEFAULTS.eps, tol: float = DEFAULTS.tol,
             **kw) -> SurvivalResult:
    return extinction_probability(build(law, eps), tol, **kw)


def cayley_survival(d: int, tol: float = DEFAULTS.tol) -> float:
    """Survival on the homogeneous tree whose root has d+1 successors: 1 - psi^2."""
    if d < 1:
        raise ValueError("d must be >= 1")
    from .laws import Fixed
    psi = extinction_probability(build(Fixed(d)), tol).psi
    return 1.0 - psi * psi


def binom3_threshold(p: float) -> float:
    return 5 * p ** 3 - 32 * p ** 2 + 144 * p - 96


def binom3_closed_form(p: float) -> float:
    """Closed-form survival probability for Binomial(3, p) offspring."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if binom3_threshold(p) <= 0.0:
        return 0.0
    root = math.sqrt(p * (-5 * p ** 3 - 8 * p ** 2 - 68 * p + 216))
    return (-5 * p ** 2 + 32 * p - 2 * root) / (9 * p ** 2)


def binom3_critical_p() -> float:
    """Real root of 5p^3 - 32p^2 + 144p - 96 in (0, 1)."""
    x = 45 * math.sqrt(5689) - 2407
    return 2 / 15 * (16 - 142 * 2 ** (2 / 3) / x ** (1 / 3) + (2 * x) ** (1 / 3))


# --- critical parameters ---------------------------------------------------

SURVIVAL_ABOVE = "survival-above"
SURVIVAL_BELOW = "survival-below"


@dataclass(frozen=True)
class CriticalBracket:
    parameter: str
    lower: float
    upper: float
    direction: str
    tolerance: float
    eps: float
    resolved: bool = True     # False: stopped on an ambiguous classification

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def record(self) -> dict:
        out = asdict(self)
        out["midpoint"] = self.midpoint
        return out


def classify(law: OffspringLaw, eps: float) -> int:
    """+1 if certainly supercritical, -1 if certainly subcritical, 0 if unsure."""
    lo, hi = mean_with_bounds(law, eps)
    if lo > 1.0:
        return 1
    if hi < 1.0:
        return -1
    return 0


def critical_parameter(make_law: Callable[[float], OffspringLaw], lo: float, hi: float,
                       tol: float = DEFAULTS.tol, eps: float = DEFAULTS.eps,
                       name: str = "p", grid: int = 9, min_eps: float = 1e-16) -> CriticalBracket:
    """Bisect the family parameter on which E(X(xi)) crosses 1."""
    if not lo < hi:
        raise ValueError("empty parameter range")
    pts = np.linspace(lo, hi, grid)
    mids = [sum(mean_with_bounds(make_law(float(x)), eps)) / 2 for x in pts]
    steps = np.diff(mids)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise NumericalError(f"mean is not monotone in {name} on [{lo}, {hi}]")

    c_lo, c_hi = classify(make_law(lo), eps), classify(make_law(hi), eps)
    if c_lo * c_hi != -1:
        raise NumericalError(f"[{lo}, {hi}] does not certainly straddle the critical point")
    direction = SURVIVAL_ABOVE if c_hi == 1 else SURVIVAL_BELOW

    resolved = True
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        c = classify(make_law(mid), eps)
        while c == 0 and eps > min_eps:
            eps = max(eps * 1e-3, min_eps)
            c = classify(make_law(mid), eps)
        if c == 0:
            resolved = False
            break
        if c == c_lo:
            lo = mid
        else:
            hi = mid
    return CriticalBracket(name, lo, hi, direction, tol, eps, resolved)


FAMILY_DEFAULT_RANGES = {
    "binomial": (0.0, 1.0),
    "poisson": (1.0, 4.0),
    "geometric": (0.1, 0.9),
}


def family_template(family: str, n: int | None = None) -> tuple[Callable[[float], OffspringLaw], str]:
    """One-parameter family maker plus the parameter's name."""
    if family == "binomial":
        if n is None or n < 1:
            raise ValueError("binomial family needs n >= 1")
        return (lambda p: Binomial(n, p)), "p"
    if family == "poisson":
        return Poisson, "lambda"
    if family == "geometric":
        return Geometric, "p"
    raise ValueError(f"no one-parameter template for family {family!r}")


def binomial_poisson_limit_table(n_values: Sequence[int] = (3, 4, 5, 10, 25, 50, 100, 150),
                                 lambda_range: tuple[float, float] = (2.0, 3.0),
                                 tol: float = DEFAULTS.tol,
                                 eps: float = DEFAULTS.eps) -> list[dict]:
    """Rows (n, p_c(n), n p_c(n)) followed by the Poisson limit row."""
    rows = []
    for n in n_values:
        if n < 3:
            raise ValueError("n must be >= 3")
        make, name = family_template("binomial", n)
        br = critical_parameter(make, 0.0, 1.0, tol, eps, name)
        rows.append({"n": n, "p_c": br.midpoint, "n_p_c": n * br.midpoint})
    br = critical_parameter(Poisson, *lambda_range, tol=tol, eps=eps, name="lambda")
    rows.append({"n": "inf", "p_c": 0.0, "n_p_c": br.midpoint})
    return rows


def theta_grid(make_law: Callable[[float], OffspringLaw], params: Sequence[float],
               eps: float = DEFAULTS.eps, tol: float = DEFAULTS.tol) -> list[SurvivalResult]:
    return [survival(make_law(float(x)), eps, tol) for x in params]


__all__ = [
    "SurvivalResult", "CriticalBracket", "extinction_probability", "survival",
    "cayley_survival", "binom3_closed_form", "binom3_critical_p", "critical_parameter",
    "family_template", "binomial_poisson_limit_table", "classify", "theta_grid",
]
