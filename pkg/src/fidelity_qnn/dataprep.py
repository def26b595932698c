"""Dataset loading, PCA, min-max scaling and rotation-angle encoding."""

from __future__ import annotations

import csv
import gzip
import io
import math
import struct
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import DataFormatError, DimensionError, DomainError, ParameterError
from .statevec import CircuitSpec, GateOp

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
ENCODE_MODES = ("2per", "1per")


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    class_names: tuple

    def __post_init__(self):
        X = np.asarray(self.X, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.int64)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise DimensionError(f"features {X.shape} and labels {y.shape} do not line up")
        if y.size and (y.min() < 0 or y.max() >= len(self.class_names)):
            raise DataFormatError("labels must lie in [0, class_count)")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "class_names", tuple(self.class_names))

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def class_count(self) -> int:
        return len(self.class_names)

    def __len__(self):
        return self.X.shape[0]

    def subset(self, idx) -> "Dataset":
        return replace(self, X=self.X[idx], y=self.y[idx])

    def with_features(self, X) -> "Dataset":
        return replace(self, X=X)


# ---------------------------------------------------------------- loaders


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def load_iris(path=None) -> Dataset:
    """Read an Iris-style CSV: four numeric feature columns and a label column.

    A non-numeric first row is treated as a header. Labels may be strings
    (numbered in order of first appearance) or integers (numbered in sorted
    order). With no ``path`` the copy bundled with the package is read.
    """
    if path is None:
        text = resources.files("fidelity_qnn").joinpath("data/iris.csv").read_text()
    else:
        text = Path(path).read_text()

    rows = [(i, r) for i, r in enumerate(csv.reader(io.StringIO(text)), 1) if any(c.strip() for c in r)]
    if rows and not all(_is_number(c) for c in rows[0][1][:4]):
        rows = rows[1:]
    if not rows:
        raise DataFormatError(f"{path or 'iris.csv'}: no data rows")

    features, raw_labels = [], []
    for lineno, row in rows:
        row = [c.strip() for c in row]
        n_numeric = sum(_is_number(c) for c in row[:-1])
        if len(row) != 5:
            if len(row) > 5 and n_numeric == len(row) - 1:
                raise DimensionError(f"line {lineno}: expected 4 feature columns, found {len(row) - 1}")
            raise DataFormatError(f"line {lineno}: expected 5 columns, found {len(row)}")
        try:
            features.append([float(c) for c in row[:4]])
        except ValueError:
            raise DataFormatError(f"line {lineno}: non-numeric feature in {row[:4]}") from None
        if not row[4]:
            raise DataFormatError(f"line {lineno}: missing label")
        raw_labels.append(row[4])

    if all(_is_number(l) and float(l).is_integer() for l in raw_labels):
        ints = [int(float(l)) for l in raw_labels]
        names = sorted(set(ints))
        index = {v: i for i, v in enumerate(names)}
        y = [index[v] for v in ints]
        names = [str(v) for v in names]
    else:
        names = list(dict.fromkeys(raw_labels))
        index = {v: i for i, v in enumerate(names)}
        y = [index[v] for v in raw_labels]
    return Dataset(np.array(features), np.array(y), tuple(names))


def _read_maybe_gzip(path) -> bytes:
    data = Path(path).read_bytes()
    if data[:2] == b"\x1f\x8b":
        try:
            data = gzip.decompress(data)
        except (OSError, EOFError) as exc:
            raise DataFormatError(f"{path}: corrupt gzip stream") from exc
    return data


def read_idx_images(path) -> np.ndarray:
    data = _read_maybe_gzip(path)
    if len(data) < 16:
        raise DataFormatError(f"{path}: truncated IDX header")
    magic, n, rows, cols = struct.unpack(">IIII", data[:16])
    if magic != IDX_IMAGES_MAGIC:
        raise DataFormatError(f"{path}: bad image magic 0x{magic:08x}")
    if len(data) != 16 + n * rows * cols:
        raise DataFormatError(f"{path}: expected {n * rows * cols} pixel bytes, found {len(data) - 16}")
    return np.frombuffer(data, dtype=np.uint8, offset=16).reshape(n, rows, cols)


def read_idx_labels(path) -> np.ndarray:
    data = _read_maybe_gzip(path)
    if len(data) < 8:
        raise DataFormatError(f"{path}: truncated IDX header")
    magic, n = struct.unpack(">II", data[:8])
    if magic != IDX_LABELS_MAGIC:
        raise DataFormatError(f"{path}: bad label magic 0x{magic:08x}")
    if len(data) != 8 + n:
        raise DataFormatError(f"{path}: expected {n} label bytes, found {len(data) - 8}")
    return np.frombuffer(data, dtype=np.uint8, offset=8)


def write_idx_images(path, images: np.ndarray, compress: bool = False) -> None:
    images = np.asarray(images, dtype=np.uint8)
    n, rows, cols = images.shape
    payload = struct.pack(">IIII", IDX_IMAGES_MAGIC, n, rows, cols) + images.tobytes()
    Path(path).write_bytes(gzip.compress(payload, mtime=0) if compress else payload)


def write_idx_labels(path, labels: np.ndarray, compress: bool = False) -> None:
    labels = np.asarray(labels, dtype=np.uint8)
    payload = struct.pack(">II", IDX_LABELS_MAGIC, labels.size) + labels.tobytes()
    Path(path).write_bytes(gzip.compress(payload, mtime=0) if compress else payload)


def load_mnist(images_path, labels_path) -> Dataset:
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise DataFormatError(f"{images.shape[0]} images but {labels.shape[0]} labels")
    if labels.size and labels.max() > 9:
        raise DataFormatError(f"{labels_path}: label {labels.max()} outside 0-9")
    X = images.reshape(images.shape[0], -1) / 255.0
    return Dataset(X, labels.astype(np.int64), tuple(str(i) for i in range(10)))


# ---------------------------------------------------------------- subsetting


def select_classes(data: Dataset, classes) -> Dataset:
    """Keep only ``classes`` (original label ids) and renumber them 0..k-1 in the given order."""
    classes = list(classes)
    if len(set(classes)) != len(classes) or len(classes) < 2:
        raise ParameterError(f"need at least two distinct classes, got {classes}")
    for c in classes:
        if not 0 <= c < data.class_count:
            raise ParameterError(f"class {c} not present (class_count={data.class_count})")
    mask = np.isin(data.y, classes)
    remap = np.full(data.class_count, -1)
    remap[classes] = np.arange(len(classes))
    return Dataset(data.X[mask], remap[data.y[mask]], tuple(data.class_names[c] for c in classes))


def stratified_split(data: Dataset, train_fraction: float = 0.8, seed: int = 0):
    """Per-class shuffled split; returns ``(train, test)``."""
    if not 0 < train_fraction < 1:
        raise ParameterError(f"train_fraction must be in (0, 1), got {train_fraction}")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for c in range(data.class_count):
        idx = rng.permutation(np.flatnonzero(data.y == c))
        cut = int(round(train_fraction * idx.size))
        train_idx.append(idx[:cut])
        test_idx.append(idx[cut:])
    return data.subset(np.sort(np.concatenate(train_idx))), data.subset(np.sort(np.concatenate(test_idx)))


def stratified_subsample(data: Dataset, n_train: int, n_test: int, seed: int = 0):
    """Draw ``n_train`` training and ``n_test`` held-out samples from every class."""
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for c in range(data.class_count):
        idx = rng.permutation(np.flatnonzero(data.y == c))
        if idx.size < n_train + n_test:
            raise ParameterError(
                f"class {data.class_names[c]} has {idx.size} samples, need {n_train + n_test}"
            )
        train_idx.append(idx[:n_train])
        test_idx.append(idx[n_train : n_train + n_test])
    return data.subset(np.sort(np.concatenate(train_idx))), data.subset(np.sort(np.concatenate(test_idx)))


# ---------------------------------------------------------------- PCA


def _features(data):
    return data.X if isinstance(data, Dataset) else np.asarray(data, dtype=np.float64)


def _like(data, X):
    return data.with_features(X) if isinstance(data, Dataset) else X


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (k, d), rows orthonormal, descending eigenvalue
    eigenvalues: np.ndarray
    total_variance: float

    @property
    def k(self) -> int:
        return self.components.shape[0]

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        if self.total_variance == 0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / self.total_variance


def pca_fit(data, k: int) -> PcaModel:
    X = _features(data)
    n, d = X.shape
    if not 1 <= k <= d:
        raise ParameterError(f"k must be in [1, {d}], got {k}")
    if n < 2:
        raise ParameterError("PCA needs at least two samples")
    mean = X.mean(axis=0)
    centered = X - mean
    cov = centered.T @ centered / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:k]
    comps = evecs[:, order].T.copy()
    # sign convention: largest-magnitude entry of every component is positive
    pivots = np.argmax(np.abs(comps), axis=1)
    signs = np.sign(comps[np.arange(k), pivots])
    comps *= signs[:, None]
    evals = np.clip(evals[order], 0.0, None)
    return PcaModel(mean, comps, evals, float(np.clip(np.trace(cov), 0.0, None)))


def pca_transform(model: PcaModel, data):
    X = _features(data)
    if X.shape[1] != model.mean.size:
        raise DimensionError(f"PCA fitted on {model.mean.size} dims, got {X.shape[1]}")
    return _like(data, (X - model.mean) @ model.components.T)


def pca_inverse(model: PcaModel, Z) -> np.ndarray:
    return np.asarray(Z) @ model.components + model.mean


# ---------------------------------------------------------------- scaling


@dataclass(frozen=True)
class NormStats:
    lo: np.ndarray
    hi: np.ndarray


def fit_norm(data) -> NormStats:
    X = _features(data)
    return NormStats(X.min(axis=0), X.max(axis=0))


def normalize(stats: NormStats, data):
    """Map each dimension onto [0, 1] using the fitted range, clamping unseen values.

    A dimension that was constant in the fitting data maps to 0.
    """
    X = _features(data)
    if X.shape[1] != stats.lo.size:
        raise DimensionError(f"scaler fitted on {stats.lo.size} dims, got {X.shape[1]}")
    span = stats.hi - stats.lo
    safe = np.where(span > 0, span, 1.0)
    out = np.where(span > 0, (X - stats.lo) / safe, 0.0)
    return _like(data, np.clip(out, 0.0, 1.0))


# ---------------------------------------------------------------- encoding


@dataclass(frozen=True)
class EncodedSample:
    angles: np.ndarray  # (n_qubits, 2): RY angle, RZ angle
    label: int | None = None

    @property
    def n_qubits(self) -> int:
        return self.angles.shape[0]


def n_data_qubits(d: int, mode: str = "2per") -> int:
    if mode not in ENCODE_MODES:
        raise ParameterError(f"unknown encode mode {mode!r}")
    return math.ceil(d / 2) if mode == "2per" else d


def encode_angles(X, mode: str = "2per") -> np.ndarray:
    """Vectorized encoding of a batch ``(n, d)`` to angles ``(n, n_qubits, 2)``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if np.any(X < 0) or np.any(X > 1) or np.any(np.isnan(X)):
        raise DomainError("encoded features must lie in [0, 1]")
    theta = 2.0 * np.arcsin(np.sqrt(X))
    n, d = theta.shape
    q = n_data_qubits(d, mode)
    angles = np.zeros((n, q, 2))
    if mode == "2per":
        angles[:, :, 0] = theta[:, 0::2]
        angles[:, : d // 2, 1] = theta[:, 1::2]
    else:
        angles[:, :, 0] = theta
    return angles


def encode(x, mode: str = "2per", label: int | None = None) -> EncodedSample:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"encode takes a single feature vector, got shape {x.shape}")
    return EncodedSample(encode_angles(x[None, :], mode)[0], label)


def build_data_circuit(s: EncodedSample, qubit_offset: int = 0, n_qubits: int | None = None) -> CircuitSpec:
    """RY then RZ on every data qubit, starting at ``qubit_offset``."""
    width = qubit_offset + s.n_qubits if n_qubits is None else n_qubits
    circ = CircuitSpec(width)
    for j, (ry, rz) in enumerate(s.angles):
        circ.append(GateOp("RY", (ry,), (qubit_offset + j,)))
        circ.append(GateOp("RZ", (rz,), (qubit_offset + j,)))
    return circ


# ---------------------------------------------------------------- pipeline


@dataclass(frozen=True)
class Preprocessor:
    """Fitted feature pipeline: optional PCA, then min-max scaling, then angle encoding."""

    norm: NormStats
    pca: PcaModel | None = None
    encode_mode: str = "2per"

    @classmethod
    def fit(cls, data, pca_k: int | None = None, encode_mode: str = "2per") -> "Preprocessor":
        if encode_mode not in ENCODE_MODES:
            raise ParameterError(f"unknown encode mode {encode_mode!r}")
        X = _features(data)
        pca = None
        if pca_k:
            pca = pca_fit(X, pca_k)
            X = pca_transform(pca, X)
        return cls(fit_norm(X), pca, encode_mode)

    @property
    def input_dim(self) -> int:
        return self.pca.mean.size if self.pca is not None else self.norm.lo.size

    @property
    def encoded_dim(self) -> int:
        return self.norm.lo.size

    @property
    def n_qubits(self) -> int:
        return n_data_qubits(self.encoded_dim, self.encode_mode)

    def transform(self, data) -> np.ndarray:
        X = np.atleast_2d(_features(data))
        if X.shape[1] != self.input_dim:
            raise DimensionError(f"expected {self.input_dim} features, got {X.shape[1]}")
        if self.pca is not None:
            X = pca_transform(self.pca, X)
        return normalize(self.norm, X)

    def angles(self, data) -> np.ndarray:
        return encode_angles(self.transform(data), self.encode_mode)
