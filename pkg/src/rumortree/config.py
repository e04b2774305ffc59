"""Central record of numerical and simulation defaults.

Every CLI flag falls back to a field of :data:`DEFAULTS`; nothing is read
from the environment, so a run is fully described by its argv.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Defaults:
    eps: float = 1e-12            # truncation mass of the offspring law
    tol: float = 1e-10            # fixed-point / bisection tolerance
    max_iter: int = 10_000_000    # fixed-point iteration cap
    aitken_after: int = 10_000    # plain iterations before Aitken extrapolation
    m_max: int = 512              # per-m range rows reported; E(R) sums run to convergence
    condition_grid: int = 1024
    condition_slack: float = 1e-12
    depth: int = 60
    replicas: int = 100_000
    seed: int = 20191014
    max_events: int = 10_000_000
    sig_digits: int = 12


DEFAULTS = Defaults()
