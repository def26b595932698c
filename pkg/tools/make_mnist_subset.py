"""Convert a CSV of MNIST digits into gzip-compressed IDX files.

The repository ships ``data/mnist-5k``: 5000 real MNIST digits (500 per
class) taken from the ``mnist_5k.csv.gz`` file distributed with the mlxtend
package, re-encoded in the standard IDX layout so the regular loader reads
them. Each CSV row is 784 pixel values (0-255) followed by the label.

    python tools/make_mnist_subset.py path/to/mnist_5k.csv.gz data/mnist-5k
"""

import argparse
import gzip
import io
from pathlib import Path

import numpy as np

from fidelity_qnn.dataprep import write_idx_images, write_idx_labels


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("csv")
    ap.add_argument("outdir")
    args = ap.parse_args()

    raw = Path(args.csv).read_bytes()
    if raw[:2] == b"\x1f\x8b":
        raw = gzip.decompress(raw)
    table = np.loadtxt(io.StringIO(raw.decode()), delimiter=",", dtype=np.int64)
    pixels, labels = table[:, :784], table[:, 784]

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    write_idx_images(out / "images-idx3-ubyte.gz", pixels.reshape(-1, 28, 28), compress=True)
    write_idx_labels(out / "labels-idx1-ubyte.gz", labels, compress=True)
    print(f"wrote {len(labels)} digits to {out}")


if __name__ == "__main__":
    main()
