"""Versioned JSON checkpoints for trained classifiers.

Floats are written with Python's shortest round-trip repr, so reloading
restores every double bit for bit. Wall-clock timings are left out so two
runs with the same seed produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .dataprep import NormStats, PcaModel, Preprocessor
from .errors import CheckpointError, FidelityQNNError
from .model import ClassModel, LayerStack
from .trainer import EpochRecord, TrainConfig, TrainedModel

FORMAT = "fidelity-qnn-checkpoint"
FORMAT_VERSION = 1


def _floats(a) -> list:
    return np.asarray(a, dtype=np.float64).tolist()


def to_dict(trained: TrainedModel, source: dict | None = None) -> dict:
    pre = trained.preprocessor
    stack = trained.stack
    pca = None
    if pre.pca is not None:
        pca = {
            "mean": _floats(pre.pca.mean),
            "components": _floats(pre.pca.components),
            "eigenvalues": _floats(pre.pca.eigenvalues),
            "total_variance": float(pre.pca.total_variance),
        }
    return {
        "format": FORMAT,
        "format_version": FORMAT_VERSION,
        "encode_mode": pre.encode_mode,
        "stack": {"layers": stack.name, "n_qubits": stack.n_qubits, "pairing": stack.pairing},
        "class_names": list(trained.class_names),
        "theta": [_floats(m.theta) for m in trained.class_models],
        "norm": {"lo": _floats(pre.norm.lo), "hi": _floats(pre.norm.hi)},
        "pca": pca,
        "config": trained.config.to_dict(),
        "history": [
            {
                "epoch": r.epoch,
                "class_loss": list(r.class_loss),
                "train_accuracy": r.train_accuracy,
                "eval_accuracy": r.eval_accuracy,
            }
            for r in trained.history
        ],
        "source": source or {},
    }


def dumps(trained: TrainedModel, source: dict | None = None) -> str:
    return json.dumps(to_dict(trained, source), indent=1, sort_keys=True) + "\n"


def save(trained: TrainedModel, path, source: dict | None = None) -> None:
    Path(path).write_text(dumps(trained, source))


def from_dict(doc: dict):
    """Rebuild ``(TrainedModel, source)`` from a parsed checkpoint."""
    if not isinstance(doc, dict) or doc.get("format") != FORMAT:
        raise CheckpointError("not a classifier checkpoint")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"checkpoint format version {version} is incompatible (expected {FORMAT_VERSION})")
    try:
        s = doc["stack"]
        stack = LayerStack(s["layers"], int(s["n_qubits"]), s["pairing"])
        pca = None
        if doc["pca"] is not None:
            p = doc["pca"]
            pca = PcaModel(
                np.array(p["mean"]), np.array(p["components"]), np.array(p["eigenvalues"]), float(p["total_variance"])
            )
        norm = NormStats(np.array(doc["norm"]["lo"]), np.array(doc["norm"]["hi"]))
        pre = Preprocessor(norm, pca, doc["encode_mode"])
        models = [ClassModel(stack, np.array(t), c) for c, t in enumerate(doc["theta"])]
        history = [EpochRecord(**r) for r in doc["history"]]
        config = TrainConfig(**doc["config"])
        trained = TrainedModel(models, pre, tuple(doc["class_names"]), config, history)
    except (KeyError, TypeError, ValueError, FidelityQNNError) as exc:
        raise CheckpointError(f"malformed checkpoint: {exc}") from exc
    if pre.n_qubits != stack.n_qubits or len(models) != len(trained.class_names):
        raise CheckpointError("checkpoint fields are inconsistent with each other")
    return trained, doc.get("source", {})


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"checkpoint is not valid JSON: {exc}") from exc
    return from_dict(doc)


def load(path):
    try:
        text = Path(path).read_text()
    except (OSError, UnicodeDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    return loads(text)
