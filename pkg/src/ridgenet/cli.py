"""Command-line driver for the experiments.

Every run writes its outputs as CSV plus a ``manifest.json`` describing the
command, the effective configuration, wall-clock time, and a SHA-256 digest
of each output file.  The manifest is written even when a run fails, with
the error and its category recorded.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric error,
1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .activations import AdmissibilityError, admissibility_constant, default_pair, psi
from .datasets import IdxFormatError, load_mnist, synthetic_digit_idx, tsc
from .experiments import (aggregate_histories, coarse_lattice_config, fine_lattice_config,
                          sample_and_fit, train_compare_digits, train_compare_tsc,
                          tsc_dataset, ALGORITHMS)
from .importance import (gaussian_proposal, is_output_weights, is_reconstruct,
                         sample_proposal, uniform_input_density)
from .lattice import reconstruct_lattice
from .network import forward, loss_and_grads, random_codebook, random_init
from .regression import RankDeficiencyError
from .sampling import DegenerateDataError, SamplerConfig, sample_hidden, save_hidden_csv

DATA_DIR_ENV = "RIDGENET_DATA_DIR"

DEFAULTS = {
    "alpha": 50.0,
    "beta": 3.0,
    "delta": 15.0,
    "J": 300,
    "lam": 0.01,
    "lr": 0.001,
}


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def _load_config(args) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            overrides = json.load(fh)
        unknown = set(overrides) - set(DEFAULTS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(overrides)
    return cfg


def cmd_lattice_reconstruct(args, out: Path) -> list[Path]:
    cfg = fine_lattice_config() if args.fine_grids else coarse_lattice_config()
    target = tsc if args.target == "tsc" else (lambda x: np.sin(np.pi * x))
    f_vals = target(cfg.x_grid)
    queries = np.linspace(-1.0, 1.0, args.points)
    pred = reconstruct_lattice(f_vals, cfg, queries)
    rows = zip(queries, target(queries), pred)
    return [_write_csv(out / "reconstruction.csv",
                       ["x", "f_true", "f_reconstructed"], rows)]


def cmd_sample_fit(args, out: Path) -> list[Path]:
    cfg = _load_config(args)
    ds = tsc_dataset()
    algorithm = ALGORITHMS[args.algorithm]
    lam = 0.0 if args.linear else cfg["lam"]
    net, hidden = sample_and_fit(ds, algorithm, args.seed, J=cfg["J"],
                                 alpha=cfg["alpha"], beta=cfg["beta"],
                                 delta=cfg["delta"], lam=lam)
    pred = forward(net, ds.xs)[:, 0]
    curve = _write_csv(out / "fit.csv", ["x", "f_true", "fit"],
                       zip(ds.xs[:, 0], ds.ys[:, 0], pred))
    params = out / "hidden_params.csv"
    save_hidden_csv(params, hidden,
                    SamplerConfig(algorithm=algorithm, alpha=cfg["alpha"],
                                  beta=cfg["beta"], delta=cfg["delta"],
                                  J=cfg["J"], seed=args.seed))
    return [curve, params, params.with_suffix(params.suffix + ".json")]


def cmd_is_reconstruct(args, out: Path) -> list[Path]:
    cfg = _load_config(args)
    target = tsc if args.target == "tsc" else np.sin
    xs = np.linspace(-1.0, 1.0, 200)
    from .datasets import LabeledDataset
    ds = LabeledDataset(xs=xs[:, None], ys=np.asarray(target(xs))[:, None])
    rho1 = uniform_input_density(-1.0, 1.0)
    rho2 = gaussian_proposal()
    hidden = sample_proposal(rho2, cfg["J"], args.seed)
    weights = is_output_weights(hidden, ds, rho1, rho2, K=default_pair().K)
    pred = is_reconstruct(hidden, weights, xs)
    return [_write_csv(out / "is_reconstruction.csv", ["x", "prediction"],
                       zip(xs, pred))]


def cmd_train_compare(args, out: Path) -> list[Path]:
    cfg = _load_config(args)
    seeds = [args.seed + r for r in range(args.runs)]
    if args.task == "tsc":
        histories = train_compare_tsc(args.init, seeds, steps=args.steps,
                                      J=cfg["J"], lr=cfg["lr"])
    else:
        data_dir = Path(args.mnist_dir or os.environ.get(DATA_DIR_ENV, "data"))
        train_set = load_mnist(data_dir / "train-images-idx3-ubyte",
                               data_dir / "train-labels-idx1-ubyte")
        test_set = load_mnist(data_dir / "t10k-images-idx3-ubyte",
                              data_dir / "t10k-labels-idx1-ubyte")
        if args.subset:
            from .datasets import MnistSet
            train_set = MnistSet(train_set.images[:args.subset],
                                 train_set.labels[:args.subset])
            test_set = MnistSet(test_set.images[:args.subset // 10 or 1],
                                test_set.labels[:args.subset // 10 or 1])
        codebook = random_codebook(np.random.default_rng(args.codebook_seed))
        histories = train_compare_digits(args.init, seeds, train_set, test_set,
                                         codebook, steps=args.steps,
                                         J=cfg["J"], lr=cfg["lr"])
    steps, tr_mean, tr_std, te_mean, te_std = aggregate_histories(histories)
    rows = zip(steps, tr_mean, tr_std, te_mean, te_std)
    return [_write_csv(out / "history.csv",
                       ["step", "metric_train_mean", "metric_train_std",
                        "metric_test_mean", "metric_test_std"], rows)]


def cmd_check(args, out: Path) -> list[Path]:
    """Quick numeric self-tests: admissibility, psi properties, gradient check."""
    results = []

    K = admissibility_constant(default_pair(), m=1)
    results.append(("admissibility_K_near_1", abs(K - 1.0) < 0.02, f"K={K:.6f}"))

    xs = np.linspace(0.0, 30.0, 301)
    even = float(np.max(np.abs(psi(xs) - psi(-xs))))
    results.append(("psi_even", even < 1e-14, f"max asymmetry {even:.2e}"))
    grid = np.arange(-60.0, 60.0, 1e-3)
    mean = abs(float(psi(grid).sum() * 1e-3))
    results.append(("psi_vanishing_mean", mean < 1e-3, f"|sum| = {mean:.2e}"))

    rng = np.random.default_rng(0)
    net = random_init(3, 2, 1, rng)
    X = rng.normal(size=(4, 2))
    Y = rng.normal(size=(4, 1))
    _, grads = loss_and_grads(net, X, Y, "mse")
    step = 1e-5
    worst = 0.0
    for key in ("A", "b", "C", "c0"):
        block = getattr(net, key)
        for idx in np.ndindex(block.shape):
            hi = block.copy(); hi[idx] += step
            lo = block.copy(); lo[idx] -= step
            f_hi, _ = loss_and_grads(replace(net, **{key: hi}), X, Y, "mse")
            f_lo, _ = loss_and_grads(replace(net, **{key: lo}), X, Y, "mse")
            fd = (f_hi - f_lo) / (2 * step)
            denom = max(abs(fd), abs(grads[key][idx]), 1e-8)
            worst = max(worst, abs(fd - grads[key][idx]) / denom)
    results.append(("gradient_check", worst < 1e-5, f"max rel err {worst:.2e}"))

    ok = all(flag for _, flag, _ in results)
    lines = [f"{'PASS' if flag else 'FAIL'}  {name}: {info}"
             for name, flag, info in results]
    report = out / "check_report.txt"
    report.write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    if not ok:
        raise AdmissibilityError("self-checks failed; see report")
    return [report]


def cmd_make_data(args, out: Path) -> list[Path]:
    files = synthetic_digit_idx(args.data_dir or out, n_train=args.n_train,
                                n_test=args.n_test, seed=args.seed)
    return list(files.values())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ridgenet")
    parser.add_argument("--config", help="JSON file overriding the baked-in defaults")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="runs", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice-reconstruct", help="discrete-lattice reconstruction")
    p.add_argument("--target", choices=["tsc", "sin"], default="tsc")
    p.add_argument("--fine-grids", action="store_true",
                   help="use the reference 0.1-spaced (a, b) grids (slow)")
    p.add_argument("--points", type=int, default=200)
    p.set_defaults(func=cmd_lattice_reconstruct)

    p = sub.add_parser("sample-fit", help="sampling algorithm + output regression")
    p.add_argument("--algorithm", choices=["1", "2", "3"], required=True)
    p.add_argument("--linear", action="store_true", help="plain least squares readout")
    p.set_defaults(func=cmd_sample_fit)

    p = sub.add_parser("is-reconstruct", help="regression-free importance sampling")
    p.add_argument("--target", choices=["tsc", "sin"], default="sin")
    p.set_defaults(func=cmd_is_reconstruct)

    p = sub.add_parser("train-compare", help="training from sampled vs random init")
    p.add_argument("--task", choices=["tsc", "mnist"], default="tsc")
    p.add_argument("--init", choices=["alg1", "alg2", "alg3", "random"], required=True)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--mnist-dir", help=f"IDX file directory (default ${DATA_DIR_ENV})")
    p.add_argument("--subset", type=int, default=0,
                   help="limit to the first N training examples (N/10 test)")
    p.add_argument("--codebook-seed", type=int, default=0)
    p.set_defaults(func=cmd_train_compare)

    p = sub.add_parser("check", help="numeric self-tests")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("make-data", help="write the synthetic digit IDX files")
    p.add_argument("--data-dir", help="target directory (default: the run directory)")
    p.add_argument("--n-train", type=int, default=10000)
    p.add_argument("--n-test", type=int, default=1000)
    p.set_defaults(func=cmd_make_data)
    return parser


_CATEGORIES = (
    (ValueError, "config", 2),
    (DegenerateDataError, "data", 3),
    (IdxFormatError, "data", 3),
    (FileNotFoundError, "data", 3),
    ((AdmissibilityError, RankDeficiencyError, FloatingPointError,
      np.linalg.LinAlgError, MemoryError), "numeric", 4),
)


def _categorize(exc) -> tuple[str, int]:
    # numeric/data categories take precedence over their ValueError base
    for types, name, code in reversed(_CATEGORIES):
        if isinstance(exc, types):
            return name, code
    return "other", 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": [args.command] + list(argv or sys.argv[1:]),
        "config": dict(DEFAULTS),
        "seed": args.seed,
        "version": __version__,
        "outputs": {},
    }
    start = time.time()
    try:
        manifest["config"] = _load_config(args)
        outputs = args.func(args, out)
        manifest["outputs"] = {str(p): _sha256(Path(p)) for p in outputs}
        manifest["status"] = "ok"
        code = 0
    except Exception as exc:  # manifest must record failures too
        category, code = _categorize(exc)
        manifest["status"] = "error"
        manifest["error"] = {"category": category, "message": str(exc),
                             "type": type(exc).__name__}
        print(f"error[{category}]: {exc}", file=sys.stderr)
    manifest["wall_clock_s"] = round(time.time() - start, 3)
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
    return code


if __name__ == "__main__":
    sys.exit(main())
