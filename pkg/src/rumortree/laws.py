"""Offspring laws: the distribution of the number of successors per vertex.

Five families are supported, matching the CLI grammar

    fixed:d   binomial:n,p   poisson:lambda   geometric:p   custom:@path.csv

Geometric laws live on {0, 1, 2, ...} with P(xi = d) = p (1 - p)^d.

Each law can be truncated to a finite table with a certified upper bound on
the discarded mass and on the discarded first moment.  Probabilities are
evaluated in log domain and exponentiated once.
"""

from __future__ import annotations

import abc
import csv
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LawError

GRAMMAR = "fixed:d | binomial:n,p | poisson:lambda | geometric:p | custom:@path.csv"

# probabilities below this are not representable with any useful significance
FLUSH = 1e-300


@dataclass(frozen=True, eq=False)
class TruncatedPMF:
    """Probabilities p_0..p_D plus certified bounds on what lies beyond D."""

    cutoff: int
    probabilities: np.ndarray
    tail_mass: float        # >= P(xi > D)
    tail_mean: float        # >= sum_{d > D} d P(xi = d)

    def __len__(self) -> int:
        return self.cutoff + 1


class OffspringLaw(abc.ABC):
    """A nonnegative-integer law for the number of successors of a vertex."""

    family: str = ""

    @abc.abstractmethod
    def logpmf(self, d: int) -> float:
        """log P(xi = d); ``-inf`` outside the support."""

    @abc.abstractmethod
    def mean(self) -> float:
        ...

    @abc.abstractmethod
    def tail_bounds(self, cutoff: int) -> tuple[float, float]:
        """Upper bounds on (P(xi > D), sum_{d>D} d P(xi=d)) for D = cutoff."""

    @abc.abstractmethod
    def sample_many(self, rng: np.random.Generator, size: int) -> np.ndarray:
        ...

    @property
    @abc.abstractmethod
    def spec(self) -> str:
        """The distribution in CLI grammar form."""

    @property
    def support_max(self) -> int | None:
        """Largest support point, or ``None`` for unbounded laws."""
        return None

    def _search_start(self) -> int:
        return 0

    def pmf(self, d: int) -> float:
        if d < 0:
            return 0.0
        lp = self.logpmf(d)
        if lp == -math.inf:
            return 0.0
        value = math.exp(lp)
        return value if value >= FLUSH else 0.0

    def pmf_array(self, cutoff: int) -> np.ndarray:
        return np.array([self.pmf(d) for d in range(cutoff + 1)])

    def truncate(self, eps: float) -> TruncatedPMF:
        """Smallest cutoff D whose certified tail mass is at most ``eps``."""
        if not 0.0 < eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {eps}")
        d = self._search_start()
        while True:
            mass, tail_mean = self.tail_bounds(d)
            if mass <= eps:
                break
            d += 1
            if d > 10_000_000:
                raise LawError(f"cannot certify a tail bound for {self.spec}")
        return TruncatedPMF(d, self.pmf_array(d), mass, tail_mean)

    def sample(self, rng: np.random.Generator) -> int:
        return int(self.sample_many(rng, 1)[0])

    def tail_table(self, cutoff: int) -> tuple[np.ndarray, np.ndarray]:
        """Support points above ``cutoff`` and their normalized conditional pmf."""
        top = self.support_max
        values, probs = [], []
        d = cutoff + 1
        first = None
        while top is None or d <= top:
            pd = self.pmf(d)
            if first is None:
                first = pd
            if top is None and (pd == 0.0 or (pd < 1e-18 * first and d > self.mean())):
                break
            values.append(d)
            probs.append(pd)
            d += 1
        probs = np.asarray(probs, dtype=float)
        if probs.size == 0 or probs.sum() == 0.0:
            return np.array([cutoff + 1]), np.array([1.0])
        return np.asarray(values), probs / probs.sum()

    def sample_tail(self, rng: np.random.Generator, cutoff: int, size: int) -> np.ndarray:
        """Draws from the law of xi conditioned on xi > cutoff."""
        values, probs = self.tail_table(cutoff)
        return values[rng.choice(len(values), size=size, p=probs)]

    @property
    def slug(self) -> str:
        return re.sub(r"[^A-Za-z0-9.]+", "_", self.spec).strip("_")

    def __repr__(self) -> str:
        return f"OffspringLaw({self.spec})"


def _suffix_bounds(pmf: np.ndarray, cutoff: int) -> tuple[float, float]:
    rest = pmf[cutoff + 1:]
    if rest.size == 0:
        return 0.0, 0.0
    idx = np.arange(cutoff + 1, cutoff + 1 + rest.size)
    return math.fsum(rest), math.fsum(idx * rest)


@dataclass(frozen=True, repr=False)
class Fixed(OffspringLaw):
    d: int
    family = "fixed"

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 0:
            raise LawError(f"fixed:d needs an integer d >= 0, got {self.d}")

    def logpmf(self, d):
        return 0.0 if d == self.d else -math.inf

    def mean(self):
        return float(self.d)

    def tail_bounds(self, cutoff):
        return (0.0, 0.0) if cutoff >= self.d else (1.0, float(self.d))

    def _search_start(self):
        return self.d

    def sample_many(self, rng, size):
        return np.full(size, self.d, dtype=np.int64)

    @property
    def support_max(self):
        return self.d

    @property
    def spec(self):
        return f"fixed:{self.d}"


@dataclass(frozen=True, repr=False)
class Binomial(OffspringLaw):
    n: int
    p: float
    family = "binomial"
    _pmf: np.ndarray = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise LawError(f"binomial:n,p needs an integer n >= 0, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise LawError(f"binomial:n,p needs 0 <= p <= 1, got {self.p}")
        object.__setattr__(self, "_pmf", np.array([super(Binomial, self).pmf(d) for d in range(self.n + 1)]))

    def logpmf(self, d):
        n, p = self.n, self.p
        if d > n:
            return -math.inf
        if p == 0.0:
            return 0.0 if d == 0 else -math.inf
        if p == 1.0:
            return 0.0 if d == n else -math.inf
        return (math.lgamma(n + 1) - math.lgamma(d + 1) - math.lgamma(n - d + 1)
                + d * math.log(p) + (n - d) * math.log1p(-p))

    def mean(self):
        return self.n * self.p

    def tail_bounds(self, cutoff):
        return _suffix_bounds(self._pmf, cutoff)

    def sample_many(self, rng, size):
        return rng.binomial(self.n, self.p, size=size)

    @property
    def support_max(self):
        return self.n

    @property
    def spec(self):
        return f"binomial:{self.n},{self.p!r}"


@dataclass(frozen=True, repr=False)
class Poisson(OffspringLaw):
    lam: float
    family = "poisson"

    def __post_init__(self):
        if not (self.lam > 0.0 and math.isfinite(self.lam)):
            raise LawError(f"poisson:lambda needs lambda > 0, got {self.lam}")

    def logpmf(self, d):
        return d * math.log(self.lam) - self.lam - math.lgamma(d + 1)

    def mean(self):
        return self.lam

    def _ratio_tail(self, start: int) -> float:
        # sum_{d >= start} pmf(d) <= pmf(start) / (1 - lam/(start+1)), valid once start+1 > lam
        if start + 1 <= self.lam:
            return 1.0
        return min(1.0, self.pmf(start) / (1.0 - self.lam / (start + 1)))

    def tail_bounds(self, cutoff):
        return self._ratio_tail(cutoff + 1), self.lam * self._ratio_tail(cutoff)

    def _search_start(self):
        return int(self.lam)

    def sample_many(self, rng, size):
        return rng.poisson(self.lam, size=size)

    @property
    def spec(self):
        return f"poisson:{self.lam!r}"


@dataclass(frozen=True, repr=False)
class Geometric(OffspringLaw):
    p: float
    family = "geometric"

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise LawError(f"geometric:p needs 0 < p <= 1, got {self.p}")

    def logpmf(self, d):
        if self.p == 1.0:
            return 0.0 if d == 0 else -math.inf
        return math.log(self.p) + d * math.log1p(-self.p)

    def mean(self):
        return (1.0 - self.p) / self.p

    def tail_bounds(self, cutoff):
        q = 1.0 - self.p
        mass = q ** (cutoff + 1)
        return mass, mass * (cutoff + 1 + q / self.p)

    def sample_many(self, rng, size):
        # numpy's geometric counts trials, so it starts at 1
        return rng.geometric(self.p, size=size) - 1

    def sample_tail(self, rng, cutoff, size):
        return cutoff + 1 + self.sample_many(rng, size)

    @property
    def spec(self):
        return f"geometric:{self.p!r}"


@dataclass(frozen=True, repr=False)
class Custom(OffspringLaw):
    """Finite table i -> P(xi = i), indices 0..len(table)-1."""

    table: tuple[float, ...]
    source: str = ""
    family = "custom"

    def __post_init__(self):
        table = tuple(float(x) for x in self.table)
        if not table:
            raise LawError("custom table is empty")
        if any(x < 0.0 or x > 1.0 or not math.isfinite(x) for x in table):
            raise LawError("custom probabilities must lie in [0, 1]")
        total = math.fsum(table)
        if abs(total - 1.0) > 1e-9:
            raise LawError(f"custom table sums to {total!r}, not 1")
        if total != 1.0:
            table = tuple(x / total for x in table)
        while len(table) > 1 and table[-1] == 0.0:
            table = table[:-1]
        object.__setattr__(self, "table", table)

    @classmethod
    def from_csv(cls, path: str | Path) -> "Custom":
        """Read a two-column (index, probability) CSV; a header row is allowed."""
        entries: dict[int, float] = {}
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or not "".join(row).strip():
                    continue
                if len(row) < 2:
                    raise LawError(f"{path}: expected two columns, got {row}")
                try:
                    i, prob = int(row[0]), float(row[1])
                except ValueError:
                    if entries:
                        raise LawError(f"{path}: bad row {row}") from None
                    continue  # header
                if i < 0 or i in entries:
                    raise LawError(f"{path}: bad or duplicate index {i}")
                entries[i] = prob
        if not entries:
            raise LawError(f"{path}: no rows")
        table = [0.0] * (max(entries) + 1)
        for i, prob in entries.items():
            table[i] = prob
        return cls(tuple(table), source=str(path))

    def logpmf(self, d):
        if d >= len(self.table) or self.table[d] == 0.0:
            return -math.inf
        return math.log(self.table[d])

    def pmf(self, d):
        return self.table[d] if 0 <= d < len(self.table) else 0.0

    def mean(self):
        return math.fsum(i * x for i, x in enumerate(self.table))

    def tail_bounds(self, cutoff):
        return _suffix_bounds(np.asarray(self.table), cutoff)

    def sample_many(self, rng, size):
        return rng.choice(len(self.table), size=size, p=np.asarray(self.table))

    @property
    def support_max(self):
        return len(self.table) - 1

    @property
    def spec(self):
        if self.source:
            return f"custom:@{self.source}"
        return "custom:" + ",".join(repr(x) for x in self.table)


def _number(text: str, kind=float):
    try:
        value = kind(text)
    except ValueError:
        raise LawError(f"bad number {text!r}; grammar: {GRAMMAR}") from None
    return value


def parse_law(text: str) -> OffspringLaw:
    """Parse a distribution spec such as ``binomial:3,0.5``."""
    name, sep, args = text.strip().partition(":")
    name = name.lower()
    if not sep:
        raise LawError(f"unknown distribution spec {text!r}; grammar: {GRAMMAR}")
    if name == "custom":
        if not args.startswith("@"):
            raise LawError("custom law must reference a file: custom:@path.csv")
        try:
            return Custom.from_csv(args[1:])
        except OSError as exc:
            raise LawError(f"cannot read custom table: {exc}") from None
    parts = [a.strip() for a in args.split(",")] if args else []
    arity = {"fixed": 1, "binomial": 2, "poisson": 1, "geometric": 1}
    if name not in arity or len(parts) != arity[name]:
        raise LawError(f"unknown distribution spec {text!r}; grammar: {GRAMMAR}")
    if name == "fixed":
        return Fixed(_number(parts[0], int))
    if name == "binomial":
        return Binomial(_number(parts[0], int), _number(parts[1]))
    if name == "poisson":
        return Poisson(_number(parts[0]))
    return Geometric(_number(parts[0]))
