import pytest

from ridgenet.datasets import load_mnist, synthetic_digit_idx


def _load_pair(files):
    train = load_mnist(files["train-images-idx3-ubyte"],
                       files["train-labels-idx1-ubyte"])
    test = load_mnist(files["t10k-images-idx3-ubyte"],
                      files["t10k-labels-idx1-ubyte"])
    return train, test


@pytest.fixture(scope="session")
def digit_corpus(tmp_path_factory):
    """Small synthetic digit corpus for unit tests."""
    files = synthetic_digit_idx(tmp_path_factory.mktemp("digits-small"),
                                n_train=400, n_test=80, seed=0)
    return _load_pair(files)


@pytest.fixture(scope="session")
def digit_corpus_full(tmp_path_factory):
    """Full-size synthetic digit corpus (10k train / 1k test)."""
    files = synthetic_digit_idx(tmp_path_factory.mktemp("digits-full"),
                                n_train=10_000, n_test=1_000, seed=0)
    return _load_pair(files)
