"""Integer-argument upper incomplete gamma and the spreader-mean kernel.

For integer k >= 1,

    Gamma(k, x) = (k-1)! e^{-x} sum_{i<k} x^i / i!

and the kernel ``term(d) = e^{d+1} Gamma(d+1, d+1) / (d+1)^d`` equals
``1 + E(X | xi = d)``.  The quotient form multiplies a huge and a tiny
factor, so :func:`spreader_term` uses the equivalent positive sum

    term(d) = sum_{j=0}^{d} d! / ((d-j)! (d+1)^j)

whose summands are a ratio recurrence in (0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


@dataclass(frozen=True)
class LogValue:
    """A real number stored as sign * exp(log_magnitude)."""

    log_magnitude: float
    sign: int = 1

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError("sign must be -1, 0 or +1")
        if self.sign == 0 and self.log_magnitude != -math.inf:
            raise ValueError("zero must carry log_magnitude = -inf")

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(-math.inf, 0)

    @classmethod
    def from_float(cls, x: float) -> "LogValue":
        if x == 0.0:
            return cls.zero()
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)

    def __mul__(self, other: "LogValue") -> "LogValue":
        if self.sign == 0 or other.sign == 0:
            return LogValue.zero()
        return LogValue(self.log_magnitude + other.log_magnitude, self.sign * other.sign)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if other.sign == 0:
            raise ZeroDivisionError("LogValue division by zero")
        if self.sign == 0:
            return LogValue.zero()
        return LogValue(self.log_magnitude - other.log_magnitude, self.sign * other.sign)


def _log_exp_partial_sum(k: int, x: float) -> float:
    """log of sum_{i<k} x^i/i!, accumulated with a running ratio."""
    if x == 0.0:
        return 0.0
    # factor out the largest summand so the rescaled terms stay in (0, 1]
    peak = min(k - 1, int(x))
    log_peak = peak * math.log(x) - math.lgamma(peak + 1)
    total = 1.0
    t = 1.0
    for i in range(peak, 0, -1):          # downwards from the peak
        t *= i / x
        total += t
        if t < 1e-17 * total:
            break
    t = 1.0
    for i in range(peak + 1, k):          # upwards from the peak
        t *= x / i
        total += t
        if t < 1e-17 * total:
            break
    return log_peak + math.log(total)


def incomplete_gamma_int(k: int, x: float) -> LogValue:
    """Upper incomplete gamma Gamma(k, x) for integer ``k >= 1``, in log form."""
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k}")
    if x < 0:
        raise ValueError(f"x must be nonnegative, got {x}")
    return LogValue(math.lgamma(k) - x + _log_exp_partial_sum(k, x), 1)


@lru_cache(maxsize=None)
def spreader_term(d: int) -> float:
    """``1 + E(X | xi = d)`` via the cancellation-free finite sum."""
    if d < 0:
        raise ValueError(f"d must be nonnegative, got {d}")
    r = 1.0
    terms = [1.0]
    for j in range(1, d + 1):
        r *= (d - j + 1) / (d + 1)
        if r < 1e-300:
            break
        terms.append(r)
    return math.fsum(terms)


def spreader_term_gamma(d: int) -> float:
    """The same kernel evaluated through the incomplete gamma quotient."""
    g = incomplete_gamma_int(d + 1, float(d + 1))
    return math.exp(d + 1 + g.log_magnitude - d * math.log(d + 1))
