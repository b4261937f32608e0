"""Target functions, equidistant sampling, and MNIST-format (IDX) ingestion."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


class IdxFormatError(ValueError):
    """Malformed IDX file (bad magic, truncation, or inconsistent counts)."""


@dataclass(frozen=True)
class LabeledDataset:
    """Input points xs (N, m) with targets ys (N, k)."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        if self.xs.ndim != 2 or self.ys.ndim != 2:
            raise ValueError("xs and ys must be 2-D arrays (N, m) and (N, k)")
        if len(self.xs) != len(self.ys):
            raise ValueError(f"{len(self.xs)} inputs but {len(self.ys)} targets")
        if not (np.all(np.isfinite(self.xs)) and np.all(np.isfinite(self.ys))):
            raise ValueError("dataset contains non-finite entries")

    @property
    def N(self) -> int:
        return len(self.xs)

    @property
    def m(self) -> int:
        return self.xs.shape[1]

    @property
    def k(self) -> int:
        return self.ys.shape[1]


@dataclass(frozen=True)
class MnistSet:
    """Flattened images in [0, 1] with integer labels in [0, 9]."""

    images: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        if len(self.images) != len(self.labels):
            raise ValueError("image/label count mismatch")
        if self.images.min(initial=0.0) < 0.0 or self.images.max(initial=0.0) > 1.0:
            raise ValueError("pixel values outside [0, 1]")
        if self.labels.size and (self.labels.min() < 0 or self.labels.max() > 9):
            raise ValueError("labels outside [0, 9]")


def tsc(x):
    """Topologist's sine curve sin(2*pi/x), with tsc(0) = 0."""
    arr = np.asarray(x, dtype=float)
    out = np.zeros_like(arr)
    nz = arr != 0
    out[nz] = np.sin(2.0 * np.pi / arr[nz])
    return out if arr.ndim else float(out)


def equidistant_dataset(f, N: int, lo: float = -1.0, hi: float = 1.0) -> LabeledDataset:
    """N points at equal intervals including both endpoints, with y = f(x)."""
    if N < 2:
        raise ValueError(f"need at least 2 points, got {N}")
    xs = np.linspace(lo, hi, N)
    ys = np.asarray(f(xs), dtype=float)
    return LabeledDataset(xs=xs[:, None], ys=ys[:, None])


def _read_header(data: bytes, path, magic: int, n_dims: int) -> tuple:
    header = 4 * (1 + n_dims)
    if len(data) < header:
        raise IdxFormatError(f"{path}: truncated header ({len(data)} bytes)")
    fields = struct.unpack(f">{1 + n_dims}i", data[:header])
    if fields[0] != magic:
        raise IdxFormatError(
            f"{path}: magic 0x{fields[0]:08x} at offset 0 (expected 0x{magic:08x})")
    return fields[1:]


def load_mnist(image_path, label_path) -> MnistSet:
    """Load an IDX image/label pair (big-endian), scaling pixels to [0, 1]."""
    image_path, label_path = Path(image_path), Path(label_path)
    img_data = image_path.read_bytes()
    n, rows, cols = _read_header(img_data, image_path, IDX_IMAGE_MAGIC, 3)
    payload = img_data[16:]
    if len(payload) != n * rows * cols:
        raise IdxFormatError(
            f"{image_path}: payload {len(payload)} bytes at offset 16, "
            f"expected {n * rows * cols}")

    lbl_data = label_path.read_bytes()
    (n_labels,) = _read_header(lbl_data, label_path, IDX_LABEL_MAGIC, 1)
    if n_labels != n:
        raise IdxFormatError(f"{label_path}: {n_labels} labels for {n} images")
    labels = np.frombuffer(lbl_data[8:], dtype=np.uint8)
    if len(labels) != n_labels:
        raise IdxFormatError(
            f"{label_path}: payload {len(labels)} bytes at offset 8, expected {n_labels}")
    if labels.size and labels.max() > 9:
        bad = int(np.argmax(labels > 9))
        raise IdxFormatError(f"{label_path}: label {labels[bad]} at index {bad}")

    images = np.frombuffer(payload, dtype=np.uint8).reshape(n, rows * cols) / 255.0
    return MnistSet(images=images, labels=labels.astype(np.int64))


def write_idx_images(path, images: np.ndarray):
    """Write uint8 images of shape (N, rows, cols) in IDX format."""
    images = np.ascontiguousarray(images, dtype=np.uint8)
    n, rows, cols = images.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack(">4i", IDX_IMAGE_MAGIC, n, rows, cols))
        fh.write(images.tobytes())


def write_idx_labels(path, labels: np.ndarray):
    """Write uint8 labels of shape (N,) in IDX format."""
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(struct.pack(">2i", IDX_LABEL_MAGIC, len(labels)))
        fh.write(labels.tobytes())


def codebook_targets(labels, codebook: np.ndarray) -> np.ndarray:
    """Row n of the result is codebook[labels[n]]."""
    labels = np.asarray(labels)
    if labels.size and (labels.min() < 0 or labels.max() >= len(codebook)):
        raise ValueError("label out of codebook range")
    return codebook[labels]


def synthetic_digit_idx(out_dir, n_train: int = 10000, n_test: int = 1000,
                        seed: int = 0) -> dict:
    """Write a desk-scale stand-in for MNIST as four IDX files.

    Built from scikit-learn's bundled 8x8 digits, upscaled to 28x28 and
    augmented with random shifts and pixel noise.  Train and test draw
    from disjoint base images.  Returns the four file paths keyed by the
    conventional MNIST file names.
    """
    from sklearn.datasets import load_digits

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    digits = load_digits()
    base = np.stack([np.pad(np.kron(im / 16.0, np.ones((3, 3))), 2)
                     for im in digits.images])
    labels = digits.target
    split = int(0.85 * len(base))

    def build(count, pool):
        sel = rng.choice(pool, count)
        imgs = np.empty((count, 28, 28))
        for i, s in enumerate(sel):
            sx, sy = rng.integers(-4, 5, size=2)
            imgs[i] = np.roll(np.roll(base[s], sx, axis=0), sy, axis=1)
        # heavy augmentation keeps the task hard enough that training has
        # clear headroom over the regression-based initializations
        imgs += rng.normal(0.0, 0.25, imgs.shape)
        imgs = np.clip(imgs, 0.0, 1.0)
        return np.round(imgs * 255).astype(np.uint8), labels[sel].astype(np.uint8)

    files = {}
    for prefix, count, pool in (("train", n_train, np.arange(split)),
                                ("t10k", n_test, np.arange(split, len(base)))):
        imgs, lbls = build(count, pool)
        img_path = out_dir / f"{prefix}-images-idx3-ubyte"
        lbl_path = out_dir / f"{prefix}-labels-idx1-ubyte"
        write_idx_images(img_path, imgs)
        write_idx_labels(lbl_path, lbls)
        files[img_path.name] = img_path
        files[lbl_path.name] = lbl_path
    return files
