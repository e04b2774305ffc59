"""Random subcritical offspring laws shared by the range tests and the acceptance suite."""

import numpy as np

from rumortree.laws import Binomial, Custom, Fixed, Geometric, Poisson
from rumortree.rumor_range import condition_holds
from rumortree.spreader import build, pgf_derivative

FAMILIES = ("fixed", "binomial", "poisson", "geometric", "custom")


def _candidate(family, rng):
    if family == "fixed":
        return Fixed(2)  # the only fixed law with 0 < mu < 1 and G''(1) > 0
    if family == "binomial":
        return Binomial(int(rng.integers(2, 21)), float(rng.uniform(0.02, 0.98)))
    if family == "poisson":
        return Poisson(float(rng.uniform(0.05, 2.49)))
    if family == "geometric":
        return Geometric(float(rng.uniform(0.27, 0.98)))
    k = int(rng.integers(2, 7))
    return Custom(tuple(rng.dirichlet(np.ones(k + 1)).tolist()))


def subcritical_law(family, rng, require_condition=False):
    """A law from ``family`` with E(X) < 1 and G''(1) > 0, by rejection.

    With ``require_condition`` the law must also satisfy the convexity-type
    condition of the range bounds; no geometric law does.
    """
    if require_condition and family == "geometric":
        raise ValueError("no geometric law satisfies the range-bound condition")
    while True:
        law = _candidate(family, rng)
        sl = build(law)
        if not (sl.mean_interval[1] < 0.98 and pgf_derivative(sl, 1.0, 2) > 1e-6):
            continue
        if require_condition and not condition_holds(sl):
            continue
        return law, sl
