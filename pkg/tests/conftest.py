import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

REPO = Path(__file__).resolve().parents[1]
MNIST_DIR = REPO / "data" / "mnist-5k"

# lines appended by test_acceptance.report(), printed after the run
ACCEPTANCE_LINES = []


@pytest.fixture
def mnist_paths():
    images = MNIST_DIR / "images-idx3-ubyte.gz"
    labels = MNIST_DIR / "labels-idx1-ubyte.gz"
    assert images.exists() and labels.exists(), "bundled MNIST subset missing; see tools/make_mnist_subset.py"
    return images, labels


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
