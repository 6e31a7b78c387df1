import time

import pytest

from softik import (
    DEFAULT_GEOMETRY,
    DEFAULT_LEVELS,
    DEFAULT_TRAIN_P1_LEVELS,
    NoiseModel,
    PressureNet,
    pressure_grid,
    simulate_platform,
    split_dataset,
)


@pytest.fixture(scope="session")
def geo():
    return DEFAULT_GEOMETRY


@pytest.fixture(scope="session")
def noiseless_dataset(geo):
    grid = pressure_grid(DEFAULT_LEVELS, p_max=geo.p_max)
    ds = simulate_platform(grid, geo, NoiseModel(sigma=0.0, replicates=1), seed=0)
    return split_dataset(ds, DEFAULT_TRAIN_P1_LEVELS)


@pytest.fixture(scope="session")
def reference_net(noiseless_dataset):
    """The long-budget network shared by the learning-quality and trajectory
    acceptance checks: 3-13-3, eta 0.01, full 5000 epochs (threshold out of
    reach), seed 0. Returns (estimator, wall seconds)."""
    est = PressureNet(hidden_size=13, eta=0.01, n_t=5000, n_p=1e-6, seed=0)
    t0 = time.perf_counter()
    est.fit(noiseless_dataset.train_inputs, noiseless_dataset.train_targets)
    return est, time.perf_counter() - t0
