import struct

import numpy as np
import pytest

from ridgenet.datasets import (IdxFormatError, LabeledDataset, codebook_targets,
                               equidistant_dataset, load_mnist, tsc, write_idx_images,
                               write_idx_labels)


class TestTsc:
    def test_zero_is_zero(self):
        assert tsc(0.0) == 0.0

    def test_known_values(self):
        assert tsc(1.0) == pytest.approx(0.0, abs=1e-15)
        assert tsc(4.0) == pytest.approx(1.0)
        assert tsc(-4.0) == pytest.approx(-1.0)
        assert tsc(0.8) == pytest.approx(np.sin(2.5 * np.pi), abs=1e-12)

    def test_odd(self):
        xs = np.linspace(0.01, 1.0, 50)
        assert np.allclose(tsc(-xs), -tsc(xs))

    def test_bounded(self):
        xs = np.linspace(-1, 1, 10001)
        assert np.max(np.abs(tsc(xs))) <= 1.0


class TestEquidistant:
    def test_endpoints_and_spacing(self):
        ds = equidistant_dataset(tsc, 200)
        assert ds.N == 200 and ds.m == 1 and ds.k == 1
        assert ds.xs[0, 0] == -1.0 and ds.xs[-1, 0] == 1.0
        gaps = np.diff(ds.xs[:, 0])
        assert np.allclose(gaps, 2 / 199)

    def test_midpoint_hits_zero(self):
        # odd N puts a point exactly at x = 0, where the target is defined as 0
        ds = equidistant_dataset(tsc, 5)
        assert ds.xs[2, 0] == 0.0 and ds.ys[2, 0] == 0.0

    def test_too_few_points(self):
        with pytest.raises(ValueError):
            equidistant_dataset(tsc, 1)

    def test_dataset_validation(self):
        with pytest.raises(ValueError):
            LabeledDataset(xs=np.zeros((3, 1)), ys=np.zeros((2, 1)))
        with pytest.raises(ValueError):
            LabeledDataset(xs=np.array([[np.nan]]), ys=np.zeros((1, 1)))


def write_pair(tmp_path, images, labels):
    img, lbl = tmp_path / "imgs", tmp_path / "lbls"
    write_idx_images(img, images)
    write_idx_labels(lbl, labels)
    return img, lbl


class TestIdx:
    def fixture_arrays(self):
        rng = np.random.default_rng(0)
        images = rng.integers(0, 256, size=(3, 4, 5)).astype(np.uint8)
        labels = np.array([7, 0, 9], dtype=np.uint8)
        return images, labels

    def test_round_trip(self, tmp_path):
        images, labels = self.fixture_arrays()
        img, lbl = write_pair(tmp_path, images, labels)
        ds = load_mnist(img, lbl)
        assert ds.images.shape == (3, 20)
        assert np.allclose(ds.images, images.reshape(3, 20) / 255.0)
        assert np.array_equal(ds.labels, labels)
        assert ds.labels.dtype == np.int64

    def test_bad_magic(self, tmp_path):
        images, labels = self.fixture_arrays()
        img, lbl = write_pair(tmp_path, images, labels)
        raw = bytearray(img.read_bytes())
        raw[3] = 0x99
        img.write_bytes(bytes(raw))
        with pytest.raises(IdxFormatError, match="magic"):
            load_mnist(img, lbl)

    def test_truncated_payload(self, tmp_path):
        images, labels = self.fixture_arrays()
        img, lbl = write_pair(tmp_path, images, labels)
        img.write_bytes(img.read_bytes()[:-5])
        with pytest.raises(IdxFormatError, match="offset 16"):
            load_mnist(img, lbl)

    def test_count_mismatch(self, tmp_path):
        images, labels = self.fixture_arrays()
        img, lbl = write_pair(tmp_path, images, labels[:2])
        with pytest.raises(IdxFormatError, match="2 labels for 3 images"):
            load_mnist(img, lbl)

    def test_label_out_of_range(self, tmp_path):
        images, _ = self.fixture_arrays()
        img, lbl = write_pair(tmp_path, images, np.array([1, 10, 2], dtype=np.uint8))
        with pytest.raises(IdxFormatError, match="label 10 at index 1"):
            load_mnist(img, lbl)

    def test_truncated_header(self, tmp_path):
        img = tmp_path / "short"
        img.write_bytes(struct.pack(">i", 0x803))
        with pytest.raises(IdxFormatError, match="truncated"):
            load_mnist(img, img)


class TestCodebookTargets:
    def test_lookup(self):
        cb = np.eye(10)
        out = codebook_targets(np.array([3, 0, 3]), cb)
        assert np.array_equal(out, cb[[3, 0, 3]])

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            codebook_targets(np.array([10]), np.eye(10))


class TestSyntheticDigits:
    def test_loader_round_trip(self, digit_corpus):
        train, test = digit_corpus
        assert train.images.shape == (400, 784)
        assert test.images.shape == (80, 784)
        assert 0.0 <= train.images.min() and train.images.max() <= 1.0
        assert set(np.unique(train.labels)) <= set(range(10))
        # disjoint base pools should still cover every digit in a corpus
        # this size
        assert len(np.unique(test.labels)) == 10
