"""Monte Carlo ground truth for the rumor on a lazily grown Galton-Watson tree.

Two engines share one outcome type:

``ctmc``
    Event-driven continuous-time dynamics.  Every spreader carries one
    exponential contact clock of rate deg(v) and contacts a uniformly chosen
    neighbor; an ignorant target becomes a spreader, an informed one (spreader
    or stifler) turns the caller into a stifler.  Ignorants carry no clocks:
    their 0 -> 1 rate is the sum of the contact rates aimed at them.  The
    extra source vertex s is attached to the root and both start as spreaders.
    Children are sampled only when a vertex is informed.

``generation``
    The embedded branching process Z_{n+1} = sum_i X_i: offspring counts are
    drawn per generation and every spreader's X is produced by the sequential
    contact reduction (stop with probability (k+1)/(d+1) after k new children),
    applied to all spreaders of equal degree at once by binomial thinning.

Vertices at depth ``max_depth`` are marked informed but never act, so the
reached depth is capped at ``max_depth`` in both engines.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.stats import binomtest

from .config import DEFAULTS
from .laws import Fixed, OffspringLaw
from .streams import StreamFactory, replica_stream

ENGINES = ("generation", "ctmc")
IGNORANT, SPREADER, STIFLER = 0, 1, 2


@dataclass(frozen=True)
class SimConfig:
    law: OffspringLaw
    engine: str = "generation"
    max_depth: int = DEFAULTS.depth
    replicas: int = DEFAULTS.replicas
    seed: int = DEFAULTS.seed
    max_events: int = DEFAULTS.max_events
    survival_depth: int | None = None
    eps: float = DEFAULTS.eps

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"engine must be one of {ENGINES}")
        if self.replicas < 1 or self.max_depth < 1 or self.max_events < 1:
            raise ValueError("replicas, max_depth and max_events must be >= 1")
        if self.survival_depth is None:
            object.__setattr__(self, "survival_depth", self.max_depth)
        if not 0 <= self.survival_depth <= self.max_depth:
            raise ValueError("survival_depth must lie in [0, max_depth]")


@dataclass(frozen=True)
class ReplicaOutcome:
    reached_depth: int
    survived_proxy: bool
    generation_counts: tuple[int, ...]
    events_processed: int
    truncated: bool = False

    @property
    def root_spreaders(self) -> int:
        return self.generation_counts[0] if self.generation_counts else 0


# --- generation engine ------------------------------------------------------

class _OffspringCounter:
    """Splits z vertices into groups of equal offspring count."""

    def __init__(self, law: OffspringLaw, eps: float):
        self.law = law
        self.fixed = law.d if isinstance(law, Fixed) else None
        if self.fixed is None:
            tr = law.truncate(eps)
            p = tr.probabilities
            tail = max(0.0, 1.0 - math.fsum(p))
            pvals = np.append(p, tail)
            self.pvals = pvals / pvals.sum()
            self.cutoff = tr.cutoff

    def groups(self, rng: np.random.Generator, z: int) -> list[tuple[int, int]]:
        if self.fixed is not None:
            return [(self.fixed, z)]
        counts = rng.multinomial(z, self.pvals).tolist()
        out = [(d, c) for d, c in enumerate(counts[:-1]) if c]
        if counts[-1]:
            extra = self.law.sample_tail(rng, self.cutoff, counts[-1])
            values, freq = np.unique(extra, return_counts=True)
            out.extend(zip(values.tolist(), freq.tolist()))
        return out


@lru_cache(maxsize=64)
def _counter(law: OffspringLaw, eps: float) -> _OffspringCounter:
    return _OffspringCounter(law, eps)


def contact_reduction(rng: np.random.Generator, d: int, n: int) -> int:
    """Total children informed by ``n`` spreaders that each have ``d`` children."""
    binomial = rng.binomial
    d1 = d + 1
    total, active, k = 0, n, 0
    while active:
        if k == d:
            return total + k * active
        stop = binomial(active, (k + 1) / d1)
        total += k * stop
        active -= stop
        k += 1
    return total


def simulate_generation(cfg: SimConfig, replica_index: int,
                        rng: np.random.Generator | None = None) -> ReplicaOutcome:
    rng = rng if rng is not None else replica_stream(cfg.seed, replica_index)
    counter = _counter(cfg.law, cfg.eps)
    counts: list[int] = []
    z, events = 1, 0
    while len(counts) < cfg.max_depth:
        events += z
        z = sum(contact_reduction(rng, d, c) for d, c in counter.groups(rng, z))
        if z == 0:
            break
        counts.append(z)
    reached = len(counts)
    return ReplicaOutcome(reached, reached >= cfg.survival_depth, tuple(counts), events)


# --- continuous-time engine -------------------------------------------------

def _buffered(draw, block: int = 64):
    while True:
        yield from draw(block).tolist()


def simulate_ctmc(cfg: SimConfig, replica_index: int,
                  rng: np.random.Generator | None = None) -> ReplicaOutcome:
    rng = rng if rng is not None else replica_stream(cfg.seed, replica_index)
    law, max_depth = cfg.law, cfg.max_depth
    uniform = _buffered(rng.random).__next__
    if isinstance(law, Fixed):
        next_xi = lambda: law.d  # noqa: E731
    else:
        next_xi = _buffered(lambda n: law.sample_many(rng, n)).__next__

    # vertex 0 is the source s, vertex 1 the root
    state = [SPREADER, SPREADER]
    parent = [-1, 0]
    depth = [-1, 0]
    first_child = [1, -1]
    n_children = [1, 0]
    informed_children = [0, 0]
    per_depth = [0] * (max_depth + 1)

    def materialize(v: int) -> None:
        k = next_xi()
        first_child[v] = len(state)
        n_children[v] = k
        dv = depth[v] + 1
        state.extend([IGNORANT] * k)
        parent.extend([v] * k)
        depth.extend([dv] * k)
        first_child.extend([-1] * k)
        n_children.extend([0] * k)
        informed_children.extend([0] * k)

    materialize(1)
    heap: list[tuple[float, int]] = []
    for v in (0, 1):
        deg = n_children[v] + (parent[v] >= 0)
        heapq.heappush(heap, (-math.log1p(-uniform()) / deg, v))

    events, truncated = 0, False
    while heap:
        t, v = heapq.heappop(heap)
        if state[v] != SPREADER:
            continue
        events += 1
        has_parent = parent[v] >= 0
        deg = n_children[v] + has_parent
        j = int(uniform() * deg)
        if has_parent:
            w = parent[v] if j == 0 else first_child[v] + j - 1
        else:
            w = first_child[v] + j
        if state[w] == IGNORANT:
            # on a tree the informer is the only informed neighbor an ignorant can have
            assert parent[w] == v and first_child[w] == -1, "ignorant with two informed neighbors"
            state[w] = SPREADER
            informed_children[v] += 1
            dw = depth[w]
            per_depth[dw] += 1
            if dw < max_depth:
                materialize(w)
                deg_w = n_children[w] + 1
                heapq.heappush(heap, (t - math.log1p(-uniform()) / deg_w, w))
            heapq.heappush(heap, (t - math.log1p(-uniform()) / deg, v))
        else:
            state[v] = STIFLER
        if events >= cfg.max_events:
            truncated = bool(heap)
            break

    counts = per_depth[1:]
    while counts and counts[-1] == 0:
        counts.pop()
    _check_branching(depth, informed_children, state, counts)
    reached = len(counts)
    return ReplicaOutcome(reached, reached >= cfg.survival_depth, tuple(counts), events, truncated)


def _check_branching(depth, informed_children, state, counts) -> None:
    # generation n+1 is exactly the children informed by generation n
    sums = [0] * (len(counts) + 1)
    for v in range(1, len(depth)):
        dv = depth[v]
        if state[v] != IGNORANT and dv <= len(counts):
            sums[dv] += informed_children[v]
    expected = list(counts) + [0]
    assert sums == expected, "generation counts break the branching recursion"


SIMULATORS = {"generation": simulate_generation, "ctmc": simulate_ctmc}


def simulate(cfg: SimConfig, replica_index: int,
             rng: np.random.Generator | None = None) -> ReplicaOutcome:
    return SIMULATORS[cfg.engine](cfg, replica_index, rng)


# --- aggregation ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SimSummary:
    config: SimConfig
    reached: np.ndarray = field(repr=False)
    root_spreaders: np.ndarray = field(repr=False)
    truncated_count: int
    events: int

    @property
    def replicas(self) -> int:
        return int(self.reached.size)

    @property
    def survivors(self) -> int:
        return int(np.count_nonzero(self.reached >= self.config.survival_depth))

    @property
    def survival_estimate(self) -> float:
        return self.survivors / self.replicas

    def survival_ci(self, level: float = 0.95) -> tuple[float, float]:
        ci = binomtest(self.survivors, self.replicas).proportion_ci(level, method="wilson")
        return float(ci.low), float(ci.high)

    @property
    def mean_range(self) -> float:
        return float(self.reached.mean())

    @property
    def se_range(self) -> float:
        if self.replicas < 2:
            return math.nan
        return float(self.reached.std(ddof=1) / math.sqrt(self.replicas))

    def range_pmf(self) -> np.ndarray:
        return np.bincount(self.reached, minlength=self.config.max_depth + 1) / self.replicas

    def range_tail(self) -> np.ndarray:
        """Empirical P(R > m) for m = 0..max_depth-1."""
        pmf = self.range_pmf()
        return np.array([pmf[m + 1:].sum() for m in range(self.config.max_depth)])

    def record(self) -> dict:
        lo, hi = self.survival_ci()
        cfg = self.config
        return {
            "dist": cfg.law.spec, "engine": cfg.engine, "seed": cfg.seed,
            "replicas": self.replicas, "maxDepth": cfg.max_depth,
            "survivalDepth": cfg.survival_depth,
            "survivalEstimate": self.survival_estimate, "ciLow": lo, "ciHigh": hi,
            "meanRange": self.mean_range, "seRange": self.se_range,
            "truncatedCount": self.truncated_count,
        }


def _run_chunk(cfg: SimConfig, start: int, stop: int):
    factory = StreamFactory(cfg.seed)
    run = SIMULATORS[cfg.engine]
    n = stop - start
    reached = np.empty(n, dtype=np.int64)
    root = np.empty(n, dtype=np.int64)
    truncated = 0
    events = 0
    for k, i in enumerate(range(start, stop)):
        out = run(cfg, i, factory.stream(i))
        reached[k] = out.reached_depth
        root[k] = out.root_spreaders
        truncated += out.truncated
        events += out.events_processed
    return reached, root, truncated, events


def estimate(cfg: SimConfig, workers: int = 1) -> SimSummary:
    """Run all replicas; the result depends only on ``cfg``, not on ``workers``."""
    n = cfg.replicas
    if workers <= 1:
        parts = [_run_chunk(cfg, 0, n)]
    else:
        bounds = np.linspace(0, n, workers * 4 + 1).astype(int)
        spans = [(a, b) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, cfg, a, b) for a, b in spans]
            parts = [f.result() for f in futures]
    reached = np.concatenate([p[0] for p in parts])
    root = np.concatenate([p[1] for p in parts])
    return SimSummary(cfg, reached, root, sum(p[2] for p in parts), sum(p[3] for p in parts))
