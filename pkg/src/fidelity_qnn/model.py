"""Trainable layer stacks and the learned-state preparation circuit."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .dataprep import n_data_qubits
from .errors import ConfigurationError
from .statevec import CircuitSpec, GateOp, Statevector, run


class LayerKind(enum.Enum):
    SINGLE = "S"
    DUAL = "D"
    ENTANGLE = "E"


NAMED_STACKS = {
    "QC-S": "S",
    "QC-D": "D",
    "QC-E": "E",
    "QC-SD": "S,D",
    "QC-SDE": "S,D,E",
}
PAIRINGS = ("chain", "all")


def parse_stack(name: str) -> tuple:
    """``'QC-SDE'`` or a comma list such as ``'S,D,E,S'`` -> tuple of LayerKind."""
    spec = NAMED_STACKS.get(name.strip().upper(), name)
    try:
        layers = tuple(LayerKind(tok.strip().upper()) for tok in spec.split(",") if tok.strip())
    except ValueError:
        raise ConfigurationError(
            f"unknown stack {name!r}; use one of {', '.join(NAMED_STACKS)} or a list like S,D,E"
        ) from None
    if not layers:
        raise ConfigurationError("empty layer stack")
    return layers


@dataclass(frozen=True)
class LayerStack:
    layers: tuple
    n_qubits: int
    pairing: str = "chain"

    def __post_init__(self):
        if isinstance(self.layers, str):
            object.__setattr__(self, "layers", parse_stack(self.layers))
        if self.n_qubits < 1:
            raise ConfigurationError("a layer stack needs at least one qubit")
        if self.pairing not in PAIRINGS:
            raise ConfigurationError(f"pairing must be one of {PAIRINGS}, got {self.pairing!r}")
        if self.n_qubits < 2 and any(k is not LayerKind.SINGLE for k in self.layers):
            raise ConfigurationError("dual-qubit and entanglement layers need at least two qubits")

    @property
    def name(self) -> str:
        return ",".join(k.value for k in self.layers)

    def pairs(self) -> list:
        if self.pairing == "chain":
            return [(j, j + 1) for j in range(self.n_qubits - 1)]
        return list(combinations(range(self.n_qubits), 2))


def layer_param_count(kind: LayerKind, stack: LayerStack) -> int:
    if kind is LayerKind.SINGLE:
        return 2 * stack.n_qubits
    return 2 * len(stack.pairs())


def param_count(stack: LayerStack) -> int:
    return sum(layer_param_count(k, stack) for k in stack.layers)


def total_qubits(d: int, encode_mode: str = "2per") -> int:
    """Ancilla plus data register plus learned-state register for ``d`` encoded features."""
    return 1 + 2 * n_data_qubits(d, encode_mode)


@dataclass
class ClassModel:
    stack: LayerStack
    theta: np.ndarray
    class_id: int = 0

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        expected = param_count(self.stack)
        if self.theta.shape != (expected,):
            raise ConfigurationError(f"stack {self.stack.name} needs {expected} parameters, got {self.theta.shape}")


def init_params(stack: LayerStack, seed, class_id: int = 0) -> ClassModel:
    """Uniform angles in [0, pi)."""
    rng = np.random.default_rng(seed)
    return ClassModel(stack, rng.uniform(0.0, np.pi, param_count(stack)), class_id)


def model_ops(stack: LayerStack, theta, offset: int = 0) -> list:
    """Gate list for the learned state; parameters are consumed layer by layer, RY angle before RZ."""
    theta = np.asarray(theta, dtype=np.float64)
    ops = []
    i = 0
    for kind in stack.layers:
        if kind is LayerKind.SINGLE:
            for j in range(stack.n_qubits):
                q = offset + j
                ops.append(GateOp("RY", (theta[i],), (q,)))
                ops.append(GateOp("RZ", (theta[i + 1],), (q,)))
                i += 2
        elif kind is LayerKind.DUAL:
            for a, b in stack.pairs():
                qa, qb = offset + a, offset + b
                ops += [
                    GateOp("RY", (theta[i],), (qa,)),
                    GateOp("RY", (theta[i],), (qb,)),
                    GateOp("RZ", (theta[i + 1],), (qa,)),
                    GateOp("RZ", (theta[i + 1],), (qb,)),
                ]
                i += 2
        else:
            for a, b in stack.pairs():
                ctl, tgt = offset + a, offset + b
                ops.append(GateOp("CRY", (theta[i],), (ctl, tgt)))
                ops.append(GateOp("CRZ", (theta[i + 1],), (ctl, tgt)))
                i += 2
    return ops


def build_model_circuit(m: ClassModel, qubit_offset: int = 0, n_qubits: int | None = None) -> CircuitSpec:
    width = qubit_offset + m.stack.n_qubits if n_qubits is None else n_qubits
    return CircuitSpec(width, model_ops(m.stack, m.theta, qubit_offset))


def learned_state(stack: LayerStack, theta) -> Statevector:
    """The state the stack prepares from ``|0...0>`` on its own register."""
    return run(CircuitSpec(stack.n_qubits, model_ops(stack, theta)))
