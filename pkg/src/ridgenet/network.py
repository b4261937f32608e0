"""Shallow network, analytic gradients, Adam, and classification finalization.

The network is g(x) = C eta(A x - b) + c0 with the Gaussian activation.
Losses:

  * "mse": mean of squared residuals over all batch entries and output
    components; the reported regression metric is its square root.
  * "cross_entropy": softmax cross entropy of the k outputs against target
    vectors.  Targets may be one-hot rows or the (unnormalized) binary
    label-codebook rows used for the digit experiments; the loss is
    -sum_i t_i log softmax_i averaged over the batch.

Classification error rates are computed through ``mnist_finalize``:
standardize each output component across the batch, squash with a logistic
sigmoid, and pick the nearest codebook vector (ties to the smaller digit).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .regression import RidgeSolution
from .sampling import HiddenParam


class TrainingDivergedError(FloatingPointError):
    """Loss became non-finite during training."""

    def __init__(self, step: int, value: float):
        super().__init__(f"training diverged at step {step} (loss {value})")
        self.step = step


@dataclass(frozen=True)
class ShallowNet:
    A: np.ndarray   # (J, m) hidden weights
    b: np.ndarray   # (J,) hidden intercepts
    C: np.ndarray   # (k, J) output weights
    c0: np.ndarray  # (k,) output intercepts

    def __post_init__(self):
        J, _ = self.A.shape
        k = self.C.shape[0]
        if self.b.shape != (J,) or self.C.shape != (k, J) or self.c0.shape != (k,):
            raise ValueError("inconsistent network dimensions")
        for block in (self.A, self.b, self.C, self.c0):
            if not np.all(np.isfinite(block)):
                raise ValueError("network parameters must be finite")


@dataclass(frozen=True)
class TrainConfig:
    loss: str = "mse"            # "mse" | "cross_entropy"
    lr: float = 0.001
    steps: int = 2000
    batch: int | None = None     # None = full batch
    seed: int = 0
    eval_every: int = 10

    def __post_init__(self):
        if self.loss not in ("mse", "cross_entropy"):
            raise ValueError(f"unknown loss {self.loss!r}")
        if self.lr <= 0 or self.steps < 0 or self.eval_every < 1:
            raise ValueError("invalid training configuration")
        if self.batch is not None and self.batch < 1:
            raise ValueError("batch size must be positive")


def forward(net: ShallowNet, x: np.ndarray) -> np.ndarray:
    """C eta(A x - b) + c0 for a single input (m,) or a batch (N, m)."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.shape[1] != net.A.shape[1]:
        raise ValueError(f"input dim {X.shape[1]} != network dim {net.A.shape[1]}")
    H = np.exp(-0.5 * (X @ net.A.T - net.b) ** 2)
    out = H @ net.C.T + net.c0
    return out[0] if single else out


def net_from_fit(hidden: list[HiddenParam], fit: RidgeSolution) -> ShallowNet:
    """Assemble a network from sampled hidden units and a regression solution."""
    A = np.stack([h.a for h in hidden])
    b = np.array([h.b for h in hidden])
    c = fit.c[:, None].T if fit.c.ndim == 1 else fit.c.T  # (k, J)
    return ShallowNet(A=A, b=b, C=c, c0=np.atleast_1d(fit.c0).astype(float))


def random_init(J: int, m: int, k: int, rng: np.random.Generator) -> ShallowNet:
    """All parameter blocks drawn from the standard normal."""
    return ShallowNet(A=rng.normal(size=(J, m)), b=rng.normal(size=J),
                      C=rng.normal(size=(k, J)), c0=rng.normal(size=k))


def loss_and_grads(net: ShallowNet, X: np.ndarray, Y: np.ndarray, loss: str):
    """Mean loss over the batch and its analytic gradients per parameter block.

    Y has shape (N, k): residual targets for "mse", target vectors (one-hot
    or codebook rows) for "cross_entropy".
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if len(X) == 0:
        raise ValueError("batch must be non-empty")
    N = len(X)
    Z = X @ net.A.T - net.b
    H = np.exp(-0.5 * Z * Z)
    out = H @ net.C.T + net.c0
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite forward values")

    if loss == "mse":
        res = out - Y
        value = float(np.mean(res * res))
        G = 2.0 * res / res.size  # dL/d out
    elif loss == "cross_entropy":
        shifted = out - out.max(axis=1, keepdims=True)
        expo = np.exp(shifted)
        log_p = shifted - np.log(expo.sum(axis=1, keepdims=True))
        value = float(-np.sum(Y * log_p) / N)
        P = expo / expo.sum(axis=1, keepdims=True)
        G = (Y.sum(axis=1, keepdims=True) * P - Y) / N
    else:
        raise ValueError(f"unknown loss {loss!r}")

    gC = G.T @ H
    gc0 = G.sum(axis=0)
    dH = G @ net.C          # (N, J)
    dZ = dH * (-Z) * H      # eta'(z) = -z eta(z)
    gA = dZ.T @ X
    gb = -dZ.sum(axis=0)
    return value, {"A": gA, "b": gb, "C": gC, "c0": gc0}


@dataclass
class AdamState:
    m: dict
    v: dict
    t: int = 0

    @classmethod
    def zeros_like(cls, net: ShallowNet) -> "AdamState":
        blocks = {"A": net.A, "b": net.b, "C": net.C, "c0": net.c0}
        return cls(m={k: np.zeros_like(v) for k, v in blocks.items()},
                   v={k: np.zeros_like(v) for k, v in blocks.items()})


def adam_step(net: ShallowNet, grads: dict, state: AdamState, lr: float,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
    """One bias-corrected Adam update; returns the updated network."""
    state.t += 1
    new = {}
    for key in ("A", "b", "C", "c0"):
        g = grads[key]
        if not np.all(np.isfinite(g)):
            raise FloatingPointError(f"non-finite gradient for {key}")
        state.m[key] = beta1 * state.m[key] + (1 - beta1) * g
        state.v[key] = beta2 * state.v[key] + (1 - beta2) * g * g
        m_hat = state.m[key] / (1 - beta1 ** state.t)
        v_hat = state.v[key] / (1 - beta2 ** state.t)
        new[key] = getattr(net, key) - lr * m_hat / (np.sqrt(v_hat) + eps)
    return replace(net, **new)


def rmse_metric(net: ShallowNet, X: np.ndarray, Y: np.ndarray) -> float:
    res = forward(net, X) - Y
    return float(np.sqrt(np.mean(res * res)))


def random_codebook(rng: np.random.Generator) -> np.ndarray:
    """Ten pairwise-distinct binary label vectors of length 10, fair i.i.d. bits."""
    while True:
        cb = rng.integers(0, 2, size=(10, 10)).astype(float)
        if len({tuple(row) for row in cb}) == 10:
            return cb


def mnist_finalize(raw_outputs: np.ndarray, codebook: np.ndarray) -> np.ndarray:
    """Standardize per component across the batch, apply a sigmoid, and pick
    the digit of the nearest codebook vector (ties go to the smaller digit).

    A zero-variance component is standardized with std replaced by 1.
    """
    out = np.asarray(raw_outputs, dtype=float)
    if out.ndim != 2 or len(out) == 0:
        raise ValueError("raw_outputs must be a non-empty (N, k) batch")
    std = out.std(axis=0)
    std[std == 0] = 1.0
    z = (out - out.mean(axis=0)) / std
    v = 1.0 / (1.0 + np.exp(-z))
    dist = ((v[:, None, :] - codebook[None, :, :]) ** 2).sum(axis=2)
    return dist.argmin(axis=1)


def error_rate_metric(codebook: np.ndarray):
    """Metric closure: classification error rate via mnist_finalize."""

    def metric(net: ShallowNet, X: np.ndarray, labels: np.ndarray) -> float:
        pred = mnist_finalize(forward(net, X), codebook)
        return float(np.mean(pred != labels))

    return metric


def train(net: ShallowNet, X: np.ndarray, Y: np.ndarray, cfg: TrainConfig,
          metric=None, metric_train=None, metric_test=None):
    """Run cfg.steps Adam iterations; return (trained net, history).

    History rows are (step, train_metric, test_metric); test_metric is NaN
    when no test set is given.  ``metric`` defaults to RMSE against the
    training targets; metric_train/metric_test override the data the metric
    sees (e.g. integer labels for classification error).
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    metric = metric or rmse_metric
    metric_train = metric_train or (X, Y)
    rng = np.random.default_rng(cfg.seed)
    state = AdamState.zeros_like(net)
    history = []

    def record(step):
        train_m = metric(net, *metric_train)
        test_m = metric(net, *metric_test) if metric_test is not None else float("nan")
        history.append((step, train_m, test_m))

    record(0)
    for step in range(1, cfg.steps + 1):
        if cfg.batch is None or cfg.batch >= len(X):
            Xb, Yb = X, Y
        else:
            idx = rng.choice(len(X), size=cfg.batch, replace=False)
            Xb, Yb = X[idx], Y[idx]
        try:
            value, grads = loss_and_grads(net, Xb, Yb, cfg.loss)
        except FloatingPointError as exc:
            raise TrainingDivergedError(step, float("nan")) from exc
        if not np.isfinite(value):
            raise TrainingDivergedError(step, value)
        net = adam_step(net, grads, state, cfg.lr)
        if step % cfg.eval_every == 0 or step == cfg.steps:
            record(step)
    return net, history
