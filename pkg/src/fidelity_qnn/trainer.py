"""Fidelity cost, shifted-difference gradients, coordinate-wise training and softmax inference."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .dataprep import Dataset, EncodedSample, Preprocessor, build_data_circuit
from .errors import ConfigurationError, DimensionError, ParameterError
from .fidelity import clip_for_log, estimate_states
from .model import ClassModel, LayerStack, init_params, learned_state, parse_stack
from .statevec import Statevector, run

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 25
    shots: int | None = None  # None: exact fidelities
    seed: int = 0
    stack: str = "QC-S"
    pairing: str = "chain"
    encode_mode: str = "2per"
    negative_sampling: bool = False
    pca: int | None = None
    synchronous: bool = False
    jobs: int = 1

    def __post_init__(self):
        if not self.learning_rate >= 0:
            raise ConfigurationError(f"learning rate must be non-negative, got {self.learning_rate}")
        if self.epochs < 1:
            raise ConfigurationError(f"epochs must be >= 1, got {self.epochs}")
        if self.shots is not None and self.shots < 1:
            raise ConfigurationError(f"shots must be >= 1, got {self.shots}")
        parse_stack(self.stack)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class EpochRecord:
    epoch: int
    class_loss: list
    train_accuracy: float
    eval_accuracy: float | None = None
    wall_ms: float = 0.0


@dataclass
class TrainedModel:
    class_models: list
    preprocessor: Preprocessor
    class_names: tuple
    config: TrainConfig
    history: list = field(default_factory=list)

    @property
    def stack(self) -> LayerStack:
        return self.class_models[0].stack

    @property
    def n_classes(self) -> int:
        return len(self.class_models)


# ---------------------------------------------------------------- cost and gradient


def sample_loss(fidelity, y: int = 1):
    """Binary cross-entropy of the clamped fidelity against target ``y``."""
    p = clip_for_log(fidelity)
    out = -y * np.log(p) - (1 - y) * np.log1p(-p)
    return float(out) if np.ndim(out) == 0 else out


def shift(epoch: int) -> float:
    """Shift half-width pi / (2 sqrt(epoch)); epochs count from 1."""
    if epoch < 1:
        raise ParameterError(f"epoch is 1-based, got {epoch}")
    return np.pi / (2.0 * np.sqrt(epoch))


def data_state(sample: EncodedSample) -> Statevector:
    return run(build_data_circuit(sample))


def product_states(angles: np.ndarray) -> np.ndarray:
    """Closed-form data states for a batch of encodings ``(n, q, 2)`` -> amplitudes ``(n, 2**q)``.

    Each qubit is RZ(b) RY(a)|0> = (e^{-ib/2} cos(a/2), e^{ib/2} sin(a/2)); qubit 0 is the low bit.
    """
    angles = np.asarray(angles, dtype=np.float64)
    a, b = angles[..., 0] / 2, angles[..., 1] / 2
    qubit = np.stack([np.exp(-1j * b) * np.cos(a), np.exp(1j * b) * np.sin(a)], axis=-1)
    n, q = angles.shape[:2]
    out = qubit[:, 0, :]
    for j in range(1, q):
        out = (qubit[:, j, :, None] * out[:, None, :]).reshape(n, -1)
    return out


def _as_state(sample) -> Statevector:
    return sample if isinstance(sample, Statevector) else data_state(sample)


def sample_cost(stack: LayerStack, theta, phi: Statevector, y: int = 1, shots=None, seed=None) -> float:
    est = estimate_states(phi, learned_state(stack, theta), shots, seed)
    return sample_loss(est.fidelity, y)


def grad_param(
    model: ClassModel,
    sample,
    param_index: int,
    epoch: int,
    y: int = 1,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Half the difference of the cost at theta_i +/- shift(epoch).

    ``sample`` is an EncodedSample or an already prepared data Statevector.
    In shot mode each of the two fidelity estimates draws its own seed from ``rng``.
    """
    theta = model.theta
    if not 0 <= param_index < theta.size:
        raise ParameterError(f"parameter index {param_index} out of range for {theta.size} parameters")
    phi = _as_state(sample)
    s = shift(epoch)
    seeds = (None, None)
    if shots is not None:
        rng = rng if rng is not None else np.random.default_rng()
        seeds = tuple(int(v) for v in rng.integers(0, 2**63, size=2))
    fwd = theta.copy()
    fwd[param_index] += s
    bck = theta.copy()
    bck[param_index] -= s
    c_fwd = sample_cost(model.stack, fwd, phi, y, shots, seeds[0])
    c_bck = sample_cost(model.stack, bck, phi, y, shots, seeds[1])
    return 0.5 * (c_fwd - c_bck)


# ---------------------------------------------------------------- training


def _class_losses(models, states: np.ndarray, labels: np.ndarray) -> list:
    losses = []
    for m in models:
        own = states[labels == m.class_id]
        w = learned_state(m.stack, m.theta).amps
        fid = np.abs(own.conj() @ w) ** 2
        losses.append(float(np.mean(sample_loss(fid, 1))))
    return losses


def _initialize(config: TrainConfig, dataset: Dataset, seq: np.random.SeedSequence) -> TrainedModel:
    if dataset.class_count < 2:
        raise ConfigurationError("training needs at least two classes")
    counts = np.bincount(dataset.y, minlength=dataset.class_count)
    if np.any(counts == 0):
        empty = [dataset.class_names[c] for c in np.flatnonzero(counts == 0)]
        raise ConfigurationError(f"no training samples for class(es) {empty}")

    pre = Preprocessor.fit(dataset, config.pca, config.encode_mode)
    stack = LayerStack(parse_stack(config.stack), pre.n_qubits, config.pairing)
    init_seeds = seq.spawn(dataset.class_count)
    models = [init_params(stack, init_seeds[c], c) for c in range(dataset.class_count)]
    return TrainedModel(models, pre, dataset.class_names, config)


def initialize(config: TrainConfig, dataset: Dataset) -> TrainedModel:
    """Fit the feature pipeline and draw initial parameters exactly as ``train`` would, without training."""
    return _initialize(config, dataset, np.random.SeedSequence(config.seed))


def train(
    config: TrainConfig,
    dataset: Dataset,
    eval_dataset: Dataset | None = None,
    callback=None,
) -> TrainedModel:
    """Fit one learned state per class.

    The feature pipeline (optional PCA, min-max scaling) is fitted on
    ``dataset``. Every epoch visits each class model in turn; for each of
    that class's samples (seeded shuffle) every parameter is nudged by
    ``-learning_rate * grad_param`` immediately, so later parameters see the
    earlier updates. ``synchronous=True`` instead evaluates all gradients of
    a sample at fixed parameters before applying them, which is what
    ``jobs > 1`` parallelizes.
    """
    seq = np.random.SeedSequence(config.seed)
    trained = _initialize(config, dataset, seq)
    models, pre = trained.class_models, trained.preprocessor
    states = product_states(pre.angles(dataset.X))
    phis = [Statevector(pre.n_qubits, s) for s in states]
    order_rng, shot_rng = (np.random.default_rng(s) for s in seq.spawn(2))

    alpha = config.learning_rate
    pool = ThreadPoolExecutor(config.jobs) if config.synchronous and config.jobs > 1 else None
    try:
        for epoch in range(1, config.epochs + 1):
            t0 = time.perf_counter()
            order = order_rng.permutation(len(dataset))
            for m in models:
                if config.negative_sampling:
                    visits = [(i, int(dataset.y[i] == m.class_id)) for i in order]
                else:
                    visits = [(i, 1) for i in order if dataset.y[i] == m.class_id]
                for i, y in visits:
                    if config.synchronous:
                        def g(k, m=m, i=i, y=y, rng=np.random.default_rng(shot_rng.integers(2**63))):
                            return grad_param(m, phis[i], k, epoch, y, config.shots, rng)

                        ks = range(m.theta.size)
                        grads = list(pool.map(g, ks)) if pool else [g(k) for k in ks]
                        m.theta -= alpha * np.asarray(grads)
                    else:
                        for k in range(m.theta.size):
                            m.theta[k] -= alpha * grad_param(m, phis[i], k, epoch, y, config.shots, shot_rng)

            record = EpochRecord(
                epoch=epoch,
                class_loss=_class_losses(models, states, dataset.y),
                train_accuracy=_accuracy_from_states(trained, states, dataset.y),
                eval_accuracy=evaluate(trained, eval_dataset) if eval_dataset is not None else None,
            )
            record.wall_ms = 1000.0 * (time.perf_counter() - t0)
            trained.history.append(record)
            log.info(
                "epoch %d loss %s train acc %.4f",
                epoch,
                " ".join(f"{l:.4f}" for l in record.class_loss),
                record.train_accuracy,
            )
            if callback is not None:
                callback(record)
    finally:
        if pool is not None:
            pool.shutdown()
    return trained


# ---------------------------------------------------------------- inference


def softmax(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64)
    e = np.exp(v - v.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def classify_fidelities(fidelities):
    """Softmax the per-class fidelities; ties go to the lowest class id."""
    probs = softmax(fidelities)
    return int(np.argmax(np.asarray(fidelities))), probs


def _fidelities_from_states(trained: TrainedModel, states: np.ndarray) -> np.ndarray:
    learned = np.stack([learned_state(m.stack, m.theta).amps for m in trained.class_models], axis=1)
    return np.clip(np.abs(states.conj() @ learned) ** 2, 0.0, 1.0)


def class_fidelities(trained: TrainedModel, X) -> np.ndarray:
    """Exact fidelity of every raw sample in ``X`` with every class state, shape ``(n, classes)``."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != trained.preprocessor.input_dim:
        raise DimensionError(f"model expects {trained.preprocessor.input_dim} features, got {X.shape[1]}")
    return _fidelities_from_states(trained, product_states(trained.preprocessor.angles(X)))


def predict(trained: TrainedModel, raw_sample):
    raw_sample = np.asarray(raw_sample, dtype=np.float64)
    if raw_sample.ndim != 1:
        raise DimensionError(f"predict takes one sample, got shape {raw_sample.shape}")
    return classify_fidelities(class_fidelities(trained, raw_sample)[0])


def predict_batch(trained: TrainedModel, X) -> np.ndarray:
    return np.argmax(class_fidelities(trained, X), axis=1)


def _accuracy_from_states(trained, states, labels) -> float:
    pred = np.argmax(_fidelities_from_states(trained, states), axis=1)
    return float(np.mean(pred == labels))


def evaluate(trained: TrainedModel, dataset: Dataset) -> float:
    if len(dataset) == 0:
        raise ParameterError("cannot evaluate on an empty dataset")
    return float(np.mean(predict_batch(trained, dataset.X) == dataset.y))


def confusion(trained: TrainedModel, dataset: Dataset) -> np.ndarray:
    """Counts indexed ``[true class, predicted class]``."""
    k = trained.n_classes
    mat = np.zeros((k, k), dtype=np.int64)
    np.add.at(mat, (dataset.y, predict_batch(trained, dataset.X)), 1)
    return mat
