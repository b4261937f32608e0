"""Regression-free network construction via importance sampling.

The ridgelet transform is estimated as a Monte Carlo sum over the dataset
reweighted by the input density rho1; output coefficients reweight that
estimate by the proposal density rho2 the hidden parameters were drawn
from.  No least-squares step is involved and the output intercept is zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .activations import ActivationPair, default_pair
from .datasets import LabeledDataset
from .sampling import HiddenParam


@dataclass(frozen=True)
class InputDensity:
    """Density over the input space; must be positive at every data point."""

    density: Callable


@dataclass(frozen=True)
class ProposalDensity:
    """Density over (a, b) with a matching sampler rng -> (a, b)."""

    density: Callable
    sampler: Callable


def uniform_input_density(lo: float = -1.0, hi: float = 1.0) -> InputDensity:
    height = 1.0 / (hi - lo)

    def density(x):
        x = np.asarray(x, dtype=float)
        inside = np.all((x >= lo) & (x <= hi), axis=-1) if x.ndim else (lo <= x <= hi)
        return np.where(inside, height, 0.0)

    return InputDensity(density=density)


def gaussian_proposal(std_a: float = 10.0, std_b: float = 10.0, m: int = 1) -> ProposalDensity:
    """Independent zero-mean normals on each component of (a, b).

    std 10 per axis corresponds to covariance diag(100, 100) for m = 1.
    """

    def density(a, b):
        a = np.atleast_1d(np.asarray(a, dtype=float))
        quad = (a @ a) / std_a**2 + (b / std_b) ** 2
        norm = (2 * np.pi) ** ((len(a) + 1) / 2) * std_a ** len(a) * std_b
        return float(np.exp(-0.5 * quad) / norm)

    def sampler(rng):
        return rng.normal(0.0, std_a, size=m), float(rng.normal(0.0, std_b))

    return ProposalDensity(density=density, sampler=sampler)


def sample_proposal(rho2: ProposalDensity, J: int, seed: int) -> list[HiddenParam]:
    """Draw J hidden units from the proposal, one substream per index."""
    out = []
    for stream in np.random.SeedSequence(seed).spawn(J):
        a, b = rho2.sampler(np.random.default_rng(stream))
        out.append(HiddenParam(a=np.atleast_1d(np.asarray(a, dtype=float)), b=b))
    return out


def mc_ridgelet(ds: LabeledDataset, rho1: InputDensity, a, b: float,
                pair: ActivationPair | None = None) -> float:
    """Monte Carlo ridgelet value (1/N) sum_n y_n psi(a . x_n - b) / rho1(x_n)."""
    pair = pair or default_pair()
    if ds.k != 1:
        raise ValueError("Monte Carlo ridgelet is defined for scalar targets")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    dens = np.array([rho1.density(x) for x in ds.xs], dtype=float)
    zero = np.nonzero(dens <= 0)[0]
    if zero.size:
        raise ValueError(f"input density vanishes at dataset index {zero[0]}")
    vals = pair.psi(ds.xs @ a - b)
    return float(np.mean(ds.ys[:, 0] * vals / dens))


def is_output_weights(hidden: list[HiddenParam], ds: LabeledDataset,
                      rho1: InputDensity, rho2: ProposalDensity, K: float,
                      pair: ActivationPair | None = None) -> np.ndarray:
    """c_j = mc_ridgelet(a_j, b_j) / (K * J * rho2(a_j, b_j))."""
    if K == 0:
        raise ValueError("admissibility constant K must be nonzero")
    J = len(hidden)
    out = np.empty(J)
    for j, h in enumerate(hidden):
        dens = rho2.density(h.a, h.b)
        if dens <= 0:
            raise ValueError(f"proposal density vanishes at hidden unit {j}")
        out[j] = mc_ridgelet(ds, rho1, h.a, h.b, pair) / (K * J * dens)
    return out


def is_reconstruct(hidden: list[HiddenParam], c: np.ndarray, query_xs,
                   pair: ActivationPair | None = None) -> np.ndarray:
    """Prediction sum_j c_j eta(a_j . x - b_j); no intercept term."""
    pair = pair or default_pair()
    c = np.asarray(c, dtype=float)
    if len(c) != len(hidden):
        raise ValueError(f"{len(c)} coefficients for {len(hidden)} hidden units")
    xs = np.asarray(query_xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    A = np.stack([h.a for h in hidden])
    b = np.array([h.b for h in hidden])
    return pair.eta(xs @ A.T - b) @ c
