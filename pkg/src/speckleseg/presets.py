"""Ready-made solver configurations.

``default_config`` carries the per-algorithm library defaults, which suit
low-contrast 8-bit SAR scenes. The synthetic phantom suite (8-bit
two-value phantoms, 4:1 contrast, 4-look speckle) sits in a different
data-force regime, so the suite runs use the parameter sets below; they are
what the bundled benchmarks and the acceptance suite use.
"""

from __future__ import annotations

from .solvers import SolverConfig, default_config

#: per-algorithm overrides for the synthetic speckled-phantom suite
PHANTOM_SUITE = {
    "rdls": dict(mu=0.3, dt1=0.005, dt2=0.05, beta=0.01, max_iter=2000),
    "sbrd": dict(mu=0.01, lam=5.0, alpha=1.0, beta=0.01, max_iter=2000),
    "fprd1": dict(mu=0.01, beta=0.01, max_iter=2000),
    "fprd2": dict(mu=0.01, beta=0.01, max_iter=2000),
}


def phantom_suite_config(algorithm: str, **overrides) -> SolverConfig:
    """Suite configuration for one algorithm, with optional extra overrides."""
    merged = dict(PHANTOM_SUITE[algorithm])
    merged.update(overrides)
    return default_config(algorithm, **merged)
