"""Benchmark experiments: TSC curve fitting and digit classification.

These are the building blocks behind the command-line driver and the
acceptance suite.  Defaults follow the reference settings: J=300 hidden
units, Beta(50, 3), delta=15, ridge lambda=0.01, Adam at lr=0.001.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import LabeledDataset, MnistSet, codebook_targets, equidistant_dataset, tsc
from .lattice import LatticeConfig
from .network import (ShallowNet, TrainConfig, error_rate_metric, net_from_fit,
                      random_codebook, random_init, train)
from .regression import design_matrix, linear_fit, ridge_fit
from .sampling import Algorithm, SamplerConfig, sample_hidden

ALGORITHMS = {"1": Algorithm.BASIC, "2": Algorithm.MAGNITUDE_A, "3": Algorithm.INTERCEPT_B}


def tsc_dataset(N: int = 200) -> LabeledDataset:
    return equidistant_dataset(tsc, N)


def fine_lattice_config() -> LatticeConfig:
    """The reference grids: x in [-1,1) step 0.01, a and b in [-300,300) step 0.1."""
    return LatticeConfig()


def coarse_lattice_config(step: float = 0.5) -> LatticeConfig:
    """Faster default grids for interactive runs; same ranges, coarser (a, b)."""
    return LatticeConfig(da=step, db=step)


def sample_and_fit(ds: LabeledDataset, algorithm: Algorithm, seed: int,
                   J: int = 300, alpha: float = 50.0, beta: float = 3.0,
                   delta: float = 15.0, lam: float = 0.01):
    """Sample hidden units, fit the output layer, and assemble the network."""
    cfg = SamplerConfig(algorithm=algorithm, alpha=alpha, beta=beta,
                        delta=delta, J=J, seed=seed)
    hidden = sample_hidden(ds, cfg)
    D = design_matrix(hidden, ds.xs)
    fit = ridge_fit(D, ds.ys, lam) if lam > 0 else linear_fit(D, ds.ys)
    return net_from_fit(hidden, fit), hidden


def initialize(ds: LabeledDataset, init: str, seed: int, J: int = 300,
               lam: float = 0.01, alg1_linear: bool = False) -> ShallowNet:
    """Build a network by one of the sampling algorithms or random N(0,1) init."""
    if init == "random":
        return random_init(J, ds.m, ds.k, np.random.default_rng(seed))
    algorithm = ALGORITHMS[init.removeprefix("alg")]
    use_lam = 0.0 if (alg1_linear and algorithm is Algorithm.BASIC) else lam
    net, _ = sample_and_fit(ds, algorithm, seed, J=J, lam=use_lam)
    return net


def train_compare_tsc(init: str, seeds, steps: int = 2000, J: int = 300,
                      lr: float = 0.001, eval_every: int = 10):
    """One training history per seed for the TSC task (full-batch MSE)."""
    ds = tsc_dataset()
    histories = []
    for seed in seeds:
        net = initialize(ds, init, seed, J=J)
        cfg = TrainConfig(loss="mse", lr=lr, steps=steps, batch=None,
                          seed=seed, eval_every=eval_every)
        _, history = train(net, ds.xs, ds.ys, cfg)
        histories.append(history)
    return histories


def train_compare_digits(init: str, seeds, train_set: MnistSet, test_set: MnistSet,
                         codebook: np.ndarray, steps: int = 1000, J: int = 300,
                         lr: float = 0.001, batch: int = 128, eval_every: int = 50):
    """One training history per seed for the digit task.

    Training minimizes softmax cross entropy against the codebook label
    vectors; the recorded metric is the finalized classification error
    rate.  The basic sampler's output layer is fitted by plain linear
    regression, the others by ridge.
    """
    targets = codebook_targets(train_set.labels, codebook)
    ds = LabeledDataset(xs=train_set.images, ys=targets)
    metric = error_rate_metric(codebook)
    histories = []
    for seed in seeds:
        net = initialize(ds, init, seed, J=J, alg1_linear=True)
        cfg = TrainConfig(loss="cross_entropy", lr=lr, steps=steps, batch=batch,
                          seed=seed, eval_every=eval_every)
        _, history = train(net, ds.xs, ds.ys, cfg, metric=metric,
                           metric_train=(train_set.images, train_set.labels),
                           metric_test=(test_set.images, test_set.labels))
        histories.append(history)
    return histories


def aggregate_histories(histories):
    """Per-step mean and std of train/test metrics across runs.

    Returns (steps, train_mean, train_std, test_mean, test_std).
    """
    arr = np.array(histories, dtype=float)  # (runs, rows, 3)
    steps = arr[0, :, 0].astype(int)
    if not np.all(arr[:, :, 0] == steps):
        raise ValueError("histories have mismatched step grids")
    return (steps,
            arr[:, :, 1].mean(axis=0), arr[:, :, 1].std(axis=0),
            arr[:, :, 2].mean(axis=0), arr[:, :, 2].std(axis=0))


def band_rmse(xs: np.ndarray, pred: np.ndarray, truth: np.ndarray, band) -> float:
    """RMSE restricted to the points where band(x) is true."""
    mask = band(np.asarray(xs))
    res = np.asarray(pred)[mask] - np.asarray(truth)[mask]
    return float(np.sqrt(np.mean(res * res)))
