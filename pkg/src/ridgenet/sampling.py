"""Hidden-parameter samplers: mixture weights and the three sampling algorithms.

Every algorithm draws a dataset index n by the mixture weights, a restriction
value z = (-1)^gamma * zeta with zeta ~ Beta(alpha, beta), and then builds
(a, b) so that a . x_n - b = z holds exactly:

  * basic:        |a| = 1 / ||x_n - x_m|| for a second weighted index m,
                  a parallel to x_n, b = a . x_n - z.
  * magnitude_a:  signed magnitude kappa ~ Normal(0, delta), a = kappa x_n/||x_n||.
  * intercept_b:  b ~ Normal(0, delta), a = (b + z)/(x_n . x_n) * x_n.

Normal(0, delta) uses delta as the standard deviation.
"""

from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .datasets import LabeledDataset

MAX_RETRIES = 100


class DegenerateDataError(ValueError):
    """Dataset cannot support the requested draw (zero targets/inputs, ties)."""


class Algorithm(enum.Enum):
    BASIC = "basic"
    MAGNITUDE_A = "magnitude_a"
    INTERCEPT_B = "intercept_b"


@dataclass(frozen=True)
class DrawRecord:
    """Internal values of one draw, kept for invariant checks."""

    n: int
    z: float
    m: int | None = None


@dataclass(frozen=True)
class HiddenParam:
    """One hidden unit: weight vector a and intercept b."""

    a: np.ndarray
    b: float
    draw: DrawRecord | None = None

    def __post_init__(self):
        if not (np.all(np.isfinite(self.a)) and np.isfinite(self.b)):
            raise ValueError("hidden parameters must be finite")


@dataclass(frozen=True)
class SamplerConfig:
    algorithm: Algorithm = Algorithm.BASIC
    alpha: float = 50.0
    beta: float = 3.0
    delta: float = 15.0
    J: int = 300
    seed: int = 0

    def __post_init__(self):
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError(f"Beta parameters must be positive: {self.alpha}, {self.beta}")
        if self.delta <= 0:
            raise ValueError(f"delta must be positive: {self.delta}")
        if self.J < 1:
            raise ValueError(f"J must be >= 1: {self.J}")


def mixture_weights(ds: LabeledDataset) -> np.ndarray:
    """Normalized weights proportional to |y_n| (Euclidean norm for vector y)."""
    mags = np.linalg.norm(ds.ys, axis=1)
    total = mags.sum()
    if total == 0:
        raise DegenerateDataError("all targets are zero; mixture weights undefined")
    return mags / total


def sample_z(alpha: float, beta: float, rng: np.random.Generator) -> float:
    """(-1)^gamma * zeta with zeta ~ Beta(alpha, beta), gamma ~ Bernoulli(1/2)."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("Beta parameters must be positive")
    zeta = rng.beta(alpha, beta)
    gamma = rng.integers(0, 2)
    return float((-1.0) ** gamma * zeta)


def _choose_nonzero_index(weights, xs, rng) -> int:
    for _ in range(MAX_RETRIES):
        n = int(rng.choice(len(weights), p=weights))
        if np.any(xs[n] != 0):
            return n
    raise DegenerateDataError(f"no nonzero input found in {MAX_RETRIES} index draws")


def _basic_from_draw(x_n: np.ndarray, x_m: np.ndarray, z: float) -> tuple:
    magnitude = 1.0 / np.linalg.norm(x_n - x_m)
    a = magnitude * x_n / np.linalg.norm(x_n)
    b = float(a @ x_n - z)
    return a, b


def _magnitude_from_draw(x_n: np.ndarray, kappa: float, z: float) -> tuple:
    a = kappa * x_n / np.linalg.norm(x_n)
    b = float(a @ x_n - z)
    return a, b


def _intercept_from_draw(x_n: np.ndarray, b: float, z: float) -> tuple:
    r = (b + z) / (x_n @ x_n)
    return r * x_n, float(b)


def algorithm1_sample(ds: LabeledDataset, cfg: SamplerConfig,
                      rng: np.random.Generator) -> HiddenParam:
    """Basic sampler: |a| from the distance between two weighted data points."""
    if ds.N < 2:
        raise DegenerateDataError("basic sampler needs at least 2 data points")
    w = mixture_weights(ds)
    n = _choose_nonzero_index(w, ds.xs, rng)
    for _ in range(MAX_RETRIES):
        m = int(rng.choice(ds.N, p=w))
        if m != n and np.any(ds.xs[m] != ds.xs[n]):
            break
    else:
        raise DegenerateDataError(
            f"could not find x_m != x_n in {MAX_RETRIES} draws (index n={n})")
    z = sample_z(cfg.alpha, cfg.beta, rng)
    a, b = _basic_from_draw(ds.xs[n], ds.xs[m], z)
    return HiddenParam(a=a, b=b, draw=DrawRecord(n=n, z=z, m=m))


def algorithm2_sample(ds: LabeledDataset, cfg: SamplerConfig,
                      rng: np.random.Generator) -> HiddenParam:
    """Magnitude sampler: signed |a| drawn from Normal(0, delta)."""
    w = mixture_weights(ds)
    n = _choose_nonzero_index(w, ds.xs, rng)
    z = sample_z(cfg.alpha, cfg.beta, rng)
    kappa = rng.normal(0.0, cfg.delta)
    a, b = _magnitude_from_draw(ds.xs[n], kappa, z)
    return HiddenParam(a=a, b=b, draw=DrawRecord(n=n, z=z))


def algorithm3_sample(ds: LabeledDataset, cfg: SamplerConfig,
                      rng: np.random.Generator) -> HiddenParam:
    """Intercept sampler: b drawn from Normal(0, delta), a solved from the restriction."""
    w = mixture_weights(ds)
    n = _choose_nonzero_index(w, ds.xs, rng)
    z = sample_z(cfg.alpha, cfg.beta, rng)
    b = rng.normal(0.0, cfg.delta)
    a, b = _intercept_from_draw(ds.xs[n], b, z)
    return HiddenParam(a=a, b=b, draw=DrawRecord(n=n, z=z))


_SAMPLERS = {
    Algorithm.BASIC: algorithm1_sample,
    Algorithm.MAGNITUDE_A: algorithm2_sample,
    Algorithm.INTERCEPT_B: algorithm3_sample,
}


def sample_hidden(ds: LabeledDataset, cfg: SamplerConfig) -> list[HiddenParam]:
    """Draw cfg.J hidden units, one RNG substream per draw index.

    The substream scheme makes the output independent of evaluation order,
    so a parallel implementation reproduces the serial result.
    """
    sampler = _SAMPLERS[cfg.algorithm]
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.J)
    out = []
    for j, stream in enumerate(streams):
        try:
            out.append(sampler(ds, cfg, np.random.default_rng(stream)))
        except (ValueError, DegenerateDataError) as exc:
            raise DegenerateDataError(f"draw {j} failed: {exc}") from exc
    return out


def save_hidden_csv(path, hidden: list[HiddenParam], cfg: SamplerConfig):
    """Write sampled parameters as CSV plus a JSON sidecar with the config."""
    path = Path(path)
    m = len(hidden[0].a)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "b"] + [f"a_{i + 1}" for i in range(m)])
        for j, h in enumerate(hidden):
            writer.writerow([j, repr(float(h.b))] + [repr(float(v)) for v in h.a])
    sidecar = path.with_suffix(path.suffix + ".json")
    with open(sidecar, "w") as fh:
        json.dump({"algorithm": cfg.algorithm.value, "alpha": cfg.alpha,
                   "beta": cfg.beta, "delta": cfg.delta, "J": cfg.J,
                   "seed": cfg.seed}, fh, indent=2)


def load_hidden_csv(path) -> tuple[list[HiddenParam], SamplerConfig]:
    """Inverse of save_hidden_csv."""
    path = Path(path)
    hidden = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["index", "b"]:
            raise ValueError(f"{path}: unexpected header {header[:2]}")
        for row in reader:
            hidden.append(HiddenParam(a=np.array([float(v) for v in row[2:]]),
                                      b=float(row[1])))
    with open(path.with_suffix(path.suffix + ".json")) as fh:
        raw = json.load(fh)
    cfg = SamplerConfig(algorithm=Algorithm(raw["algorithm"]), alpha=raw["alpha"],
                        beta=raw["beta"], delta=raw["delta"], J=raw["J"],
                        seed=raw["seed"])
    return hidden, cfg
