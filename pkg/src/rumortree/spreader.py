"""Law of X(xi), the number of spreaders one spreader generates.

A spreader with d ignorant children and one informed parent contacts its
d+1 neighbors uniformly at random, informing each new child it meets, and
stops at its first contact with an informed neighbor.  Hence

    P(X = i | xi = d) = (i+1) * d!/(d-i)! / (d+1)^(i+1),   0 <= i <= d,

and the unconditional law mixes this over the offspring law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as P

from .config import DEFAULTS
from .laws import FLUSH, OffspringLaw, TruncatedPMF
from .special import spreader_term

MAX_ENUMERATION_D = 12


def conditional_pmf(i: int, d: int) -> float:
    """P(X = i | xi = d) via the product (d!/(d-i)!) (i+1) / (d+1)^(i+1)."""
    if i < 0 or d < 0 or i > d:
        return 0.0
    r = 1.0
    for j in range(i):
        r *= (d - j) / (d + 1)
    value = r * (i + 1) / (d + 1)
    return value if value >= FLUSH else 0.0


def conditional_table(d: int) -> np.ndarray:
    """The whole row i = 0..d of :func:`conditional_pmf`."""
    falling = np.ones(d + 1)
    if d > 0:
        falling[1:] = np.cumprod((d - np.arange(d)) / (d + 1))
    row = falling * np.arange(1, d + 2) / (d + 1)
    row[row < FLUSH] = 0.0
    return row


@dataclass(frozen=True, eq=False)
class SpreaderLaw:
    source: OffspringLaw
    truncation: TruncatedPMF
    pmf_table: np.ndarray
    mean_interval: tuple[float, float]

    @property
    def tail_mass(self) -> float:
        return self.truncation.tail_mass

    def rows(self):
        return [(i, float(q)) for i, q in enumerate(self.pmf_table)]


def mean_with_bounds(law: OffspringLaw, eps: float = DEFAULTS.eps,
                     truncation: TruncatedPMF | None = None) -> tuple[float, float]:
    """Certified interval for E(X(xi)).

    The kept part sum_{d<=D} (term(d)-1) P(xi=d) is the lower end; since
    E(X | xi=d) <= d, the discarded part is at most the tail first moment.
    """
    tr = truncation if truncation is not None else law.truncate(eps)
    p = tr.probabilities
    lower = math.fsum((spreader_term(d) - 1.0) * p[d] for d in range(1, tr.cutoff + 1))
    return lower, lower + tr.tail_mean


def build(law: OffspringLaw, eps: float = DEFAULTS.eps) -> SpreaderLaw:
    tr = law.truncate(eps)
    q = np.zeros(tr.cutoff + 1)
    for d, pd in enumerate(tr.probabilities):
        if pd:
            q[: d + 1] += pd * conditional_table(d)
    q[q < FLUSH] = 0.0
    return SpreaderLaw(law, tr, q, mean_with_bounds(law, truncation=tr))


def pgf(sl: SpreaderLaw, s: float) -> float:
    return float(P.polyval(s, sl.pmf_table))


def pgf_derivative(sl: SpreaderLaw, s: float, order: int = 1) -> float:
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    coef = P.polyder(sl.pmf_table, order)
    return float(P.polyval(s, coef)) if coef.size else 0.0


def oracle_conditional_pmf(d: int, mode: str = "exact", n: int = 100_000,
                           rng: np.random.Generator | None = None) -> list[float]:
    """Distribution of children informed before the first repeated contact.

    ``exact`` walks every contact sequence, merging sequences that reach the
    same set of informed children, with rational weights.  ``monte-carlo``
    replays ``n`` random contact sequences.
    """
    if d < 0:
        raise ValueError("d must be nonnegative")
    if mode == "exact":
        if d > MAX_ENUMERATION_D:
            raise ValueError(f"exact enumeration refused for d > {MAX_ENUMERATION_D}")
        return [float(x) for x in _enumerate_contacts(d)]
    if mode == "monte-carlo":
        rng = rng if rng is not None else np.random.default_rng()
        counts = np.zeros(d + 1, dtype=np.int64)
        for _ in range(n):
            informed = {0}          # neighbor 0 is the parent
            while True:
                target = int(rng.integers(d + 1))
                if target in informed:
                    break
                informed.add(target)
            counts[len(informed) - 1] += 1
        return list(counts / n)
    raise ValueError(f"unknown oracle mode {mode!r}")


def _enumerate_contacts(d: int) -> list[Fraction]:
    # neighbors: bit 0 is the parent, bits 1..d the children
    weight = Fraction(1, d + 1)
    layer = {1: Fraction(1)}
    stopped = [Fraction(0)] * (d + 1)
    for k in range(d + 1):
        nxt: dict[int, Fraction] = {}
        for mask, prob in layer.items():
            for nb in range(d + 1):
                bit = 1 << nb
                if mask & bit:
                    stopped[k] += prob * weight
                else:
                    nxt[mask | bit] = nxt.get(mask | bit, Fraction(0)) + prob * weight
        layer = nxt
    return stopped
