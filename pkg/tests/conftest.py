import numpy as np
import pytest

from photonic_ldpc import EnsembleConfig, SimParams, TannerGraph, run_ensemble

# Hand-built (n=8, l=3, k=4) code whose check 0 is {0, 2, 3, 5}; small
# enough for exhaustive oracles.
DEMO_CHECKS = [
    [0, 2, 3, 5],
    [1, 4, 6, 7],
    [0, 1, 2, 4],
    [3, 5, 6, 7],
    [0, 1, 3, 6],
    [2, 4, 5, 7],
]


@pytest.fixture(scope="session")
def demo_graph():
    return TannerGraph(8, 3, 4, np.array(DEMO_CHECKS))


@pytest.fixture(scope="session")
def bench_ensemble():
    """The reference benchmark: (n=1000, l=5, k=10) code, 30 random errors,
    gamma=0.01, feedback 1, probe 1e5, no component noise, 500 trajectories.
    Shared session-wide because several tests read different statistics off
    the same run."""
    cfg = EnsembleConfig(
        n=1000,
        l=5,
        k=10,
        code_seed=101,
        error_count=30,
        error_seed=7,
        params=SimParams(
            probe_power=1e5,
            feedback_power=1.0,
            gamma=0.01,
            eta=0.0,
            t_max=1e6,
            seed=42,
        ),
        trajectories=500,
        grid_t_min=1e-3,
        grid_t_max=1e6,
        grid_points=200,
    )
    return cfg, run_ensemble(cfg)
