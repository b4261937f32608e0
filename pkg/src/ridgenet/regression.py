"""Output-layer fitting: hidden-feature design matrix and closed-form ridge."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .activations import ActivationPair, default_pair
from .sampling import HiddenParam


class RankDeficiencyError(np.linalg.LinAlgError):
    """Unpenalized normal equations are singular; retry with lambda > 0."""


@dataclass(frozen=True)
class RidgeSolution:
    """Fitted output weights c (J,) or (J, k), intercept c0 (k,), and the
    residual of the regularized normal equations (relative Frobenius norm)."""

    c: np.ndarray
    c0: np.ndarray
    lam: float
    residual: float


def design_matrix(hidden: list[HiddenParam], xs: np.ndarray,
                  pair: ActivationPair | None = None) -> np.ndarray:
    """N x (J+1) matrix: column j is eta(a_j . x_n - b_j), last column ones."""
    pair = pair or default_pair()
    xs = np.asarray(xs, dtype=float)
    if xs.ndim == 1:
        xs = xs[:, None]
    A = np.stack([h.a for h in hidden])  # (J, m)
    b = np.array([h.b for h in hidden])
    if xs.shape[1] != A.shape[1]:
        raise ValueError(f"inputs have dim {xs.shape[1]} but hidden weights dim {A.shape[1]}")
    features = pair.eta(xs @ A.T - b)
    return np.hstack([features, np.ones((len(xs), 1))])


def ridge_fit(D: np.ndarray, Y: np.ndarray, lam: float,
              has_intercept: bool = True) -> RidgeSolution:
    """Minimize ||D C - Y||^2 + lam ||C||^2 over the feature coefficients.

    With has_intercept the last column of D is the (unpenalized) intercept;
    otherwise every column is penalized and c0 is zero.  Vector targets
    (N, k) share one factorization.  At lam = 0 the system must be full rank.
    """
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    D = np.asarray(D, dtype=float)
    Y = np.asarray(Y, dtype=float)
    single = Y.ndim == 1
    if single:
        Y = Y[:, None]
    if len(D) != len(Y):
        raise ValueError(f"{len(D)} rows in D but {len(Y)} targets")

    p = D.shape[1]
    penalty = np.full(p, lam)
    if has_intercept:
        penalty[-1] = 0.0
    G = D.T @ D + np.diag(penalty)
    rhs = D.T @ Y
    if lam == 0:
        if len(D) < p or np.linalg.matrix_rank(D) < p:
            raise RankDeficiencyError(
                f"design matrix rank < {p} with lambda=0; use lambda > 0")
        C = np.linalg.lstsq(D, Y, rcond=None)[0]
    else:
        C = scipy.linalg.cho_solve(scipy.linalg.cho_factor(G), rhs)

    residual = np.linalg.norm(G @ C - rhs) / max(np.linalg.norm(rhs), 1e-300)
    if has_intercept:
        c, c0 = C[:-1], C[-1]
    else:
        c, c0 = C, np.zeros(C.shape[1])
    if single:
        c = c[:, 0]
    return RidgeSolution(c=c, c0=np.atleast_1d(c0).astype(float), lam=float(lam),
                         residual=float(residual))


def linear_fit(D: np.ndarray, Y: np.ndarray, has_intercept: bool = True) -> RidgeSolution:
    """Plain least squares (ridge with lambda = 0)."""
    return ridge_fit(D, Y, 0.0, has_intercept=has_intercept)
