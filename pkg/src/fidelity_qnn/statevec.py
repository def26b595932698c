"""Dense statevector simulator.

Qubit 0 is the least-significant bit of the basis index, so the amplitude of
``|q_{n-1} ... q_1 q_0>`` lives at ``sum(q_k << k)``. Multi-qubit gate
matrices use the same rule locally: the first qubit listed in a GateOp is the
least-significant bit of the gate's 2^k-dimensional index. Under that rule the
controlled-SWAP matrix exchanges local basis states 3 and 5.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, DataFormatError, ParameterError, QubitIndexError, ShapeError

MAX_QUBITS = 24

# kind -> (number of angles, number of qubits)
GATE_ARITY = {
    "H": (0, 1),
    "RX": (1, 1),
    "RY": (1, 1),
    "RZ": (1, 1),
    "R": (2, 1),
    "RXX": (1, 2),
    "RYY": (1, 2),
    "RZZ": (1, 2),
    "CRY": (1, 2),
    "CRZ": (1, 2),
    "CSWAP": (0, 3),
}


@dataclass(frozen=True)
class Statevector:
    n_qubits: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise ShapeError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, got shape {amps.shape}"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps) -> "Statevector":
        amps = np.asarray(amps, dtype=np.complex128)
        n = int(round(np.log2(amps.size))) if amps.size else -1
        if n < 0 or (1 << n) != amps.size:
            raise ShapeError(f"amplitude vector length {amps.size} is not a power of two")
        return cls(n, amps)

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@dataclass(frozen=True)
class GateOp:
    kind: str
    params: tuple = ()
    qubits: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", self.kind.upper())
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))


@dataclass
class CircuitSpec:
    n_qubits: int
    ops: list = field(default_factory=list)

    def __post_init__(self):
        for op in self.ops:
            _check_qubits(op.qubits, self.n_qubits)

    def append(self, op: GateOp) -> None:
        _check_qubits(op.qubits, self.n_qubits)
        self.ops.append(op)

    def extend(self, ops: Iterable[GateOp]) -> None:
        for op in ops:
            self.append(op)

    def __len__(self):
        return len(self.ops)

    def qubits_used(self) -> set:
        return {q for op in self.ops for q in op.qubits}

    def to_text(self) -> str:
        """Serialize as one ``KIND angle[,angle] q[,q,q]`` line per op."""
        lines = [f"# qubits {self.n_qubits}"]
        for op in self.ops:
            qubits = ",".join(str(q) for q in op.qubits)
            if op.params:
                angles = ",".join(f"{a:.12g}" for a in op.params)
                lines.append(f"{op.kind} {angles} {qubits}")
            else:
                lines.append(f"{op.kind} {qubits}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CircuitSpec":
        n_qubits = None
        ops = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "qubits":
                    n_qubits = int(parts[1])
                continue
            tokens = line.split()
            try:
                kind = tokens[0].upper()
                n_angles, _ = GATE_ARITY[kind]
                if n_angles and len(tokens) == 3:
                    params = [float(a) for a in tokens[1].split(",")]
                elif not n_angles and len(tokens) == 2:
                    params = []
                else:
                    raise ValueError("wrong token count")
                qubits = [int(q) for q in tokens[-1].split(",")]
            except (KeyError, ValueError, IndexError) as exc:
                raise DataFormatError(f"line {lineno}: cannot parse circuit op {raw!r}") from exc
            ops.append(GateOp(kind, params, qubits))
        if n_qubits is None:
            n_qubits = 1 + max((q for op in ops for q in op.qubits), default=0)
        return cls(n_qubits, ops)


def _check_qubits(qubits: Sequence[int], n_qubits: int) -> None:
    if len(set(qubits)) != len(qubits):
        raise QubitIndexError(f"repeated qubit index in {tuple(qubits)}")
    for q in qubits:
        if not 0 <= q < n_qubits:
            raise QubitIndexError(f"qubit {q} out of range for {n_qubits}-qubit register")


def zero_state(n_qubits: int) -> Statevector:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise CapacityError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


def basis_state(n_qubits: int, index: int) -> Statevector:
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return Statevector(n_qubits, amps)


def _controlled(u: np.ndarray) -> np.ndarray:
    # control is the low bit: local indices 1 and 3 form the controlled block
    m = np.eye(4, dtype=np.complex128)
    m[np.ix_([1, 3], [1, 3])] = u
    return m


def _ry(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _rz(theta):
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=np.complex128)


_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)

_CSWAP = np.eye(8, dtype=np.complex128)
_CSWAP[[3, 5]] = _CSWAP[[5, 3]]


def gate_matrix(g: GateOp) -> np.ndarray:
    try:
        n_angles, n_targets = GATE_ARITY[g.kind]
    except KeyError:
        raise ParameterError(f"unknown gate kind {g.kind!r}") from None
    if len(g.params) != n_angles:
        raise ParameterError(f"{g.kind} takes {n_angles} angle(s), got {len(g.params)}")
    if g.qubits and len(g.qubits) != n_targets:
        raise ParameterError(f"{g.kind} acts on {n_targets} qubit(s), got {len(g.qubits)}")

    kind = g.kind
    if kind == "H":
        return _H.copy()
    if kind == "CSWAP":
        return _CSWAP.copy()
    theta = g.params[0]
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "RY":
        return _ry(theta)
    if kind == "RZ":
        return _rz(theta)
    if kind == "R":
        phi = g.params[1]
        return np.array(
            [[c, -1j * np.exp(-1j * phi) * s], [-1j * np.exp(1j * phi) * s, c]],
            dtype=np.complex128,
        )
    if kind == "RXX":
        m = np.diag([c, c, c, c]).astype(np.complex128)
        m[0, 3] = m[3, 0] = m[1, 2] = m[2, 1] = -1j * s
        return m
    if kind == "RYY":
        m = np.diag([c, c, c, c]).astype(np.complex128)
        m[0, 3] = m[3, 0] = 1j * s
        m[1, 2] = m[2, 1] = -1j * s
        return m
    if kind == "RZZ":
        # even-parity states pick up e^{-i theta/2}, odd-parity e^{+i theta/2}
        a, b = np.exp(-0.5j * theta), np.exp(0.5j * theta)
        return np.diag([a, b, b, a])
    if kind == "CRY":
        return _controlled(_ry(theta))
    if kind == "CRZ":
        return _controlled(_rz(theta))
    raise ParameterError(f"unknown gate kind {kind!r}")  # pragma: no cover


def apply_matrix(amps: np.ndarray, n_qubits: int, matrix: np.ndarray, qubits: Sequence[int]) -> np.ndarray:
    """Apply ``matrix`` to ``qubits`` of a raw amplitude array; returns a new array."""
    k = len(qubits)
    psi = amps.reshape((2,) * n_qubits)
    # tensor axis 0 is the most significant bit, so qubit q is axis n-1-q;
    # the gate tensor's leading axis is its last listed qubit
    axes = [n_qubits - 1 - q for q in reversed(qubits)]
    gate = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(gate, psi, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return np.ascontiguousarray(out).reshape(-1)


def apply(state: Statevector, g: GateOp) -> Statevector:
    _check_qubits(g.qubits, state.n_qubits)
    m = gate_matrix(g)
    return Statevector(state.n_qubits, apply_matrix(state.amps, state.n_qubits, m, g.qubits))


def run(circuit: CircuitSpec, initial: Statevector | None = None) -> Statevector:
    """Simulate ``circuit`` starting from ``initial`` (default ``|0...0>``)."""
    state = initial if initial is not None else zero_state(circuit.n_qubits)
    if state.n_qubits != circuit.n_qubits:
        raise ShapeError(f"circuit has {circuit.n_qubits} qubits, state has {state.n_qubits}")
    amps = np.array(state.amps)
    for op in circuit.ops:
        amps = apply_matrix(amps, circuit.n_qubits, gate_matrix(op), op.qubits)
    return Statevector(circuit.n_qubits, amps)


def prob_of(state: Statevector, qubit: int, outcome: int) -> float:
    _check_qubits([qubit], state.n_qubits)
    if outcome not in (0, 1):
        raise ParameterError(f"outcome must be 0 or 1, got {outcome}")
    probs = state.probabilities().reshape((2,) * state.n_qubits)
    axis = state.n_qubits - 1 - qubit
    return float(np.take(probs, outcome, axis=axis).sum())


def sample_outcome(state: Statevector, qubit: int, shots: int, seed: int | None) -> int:
    """Number of outcome-1 results over ``shots`` terminal measurements of ``qubit``."""
    if shots < 1:
        raise ParameterError(f"shots must be >= 1, got {shots}")
    p = prob_of(state, qubit, 1)
    rng = np.random.default_rng(seed)
    return int(rng.binomial(shots, min(max(p, 0.0), 1.0)))


def inner_product(a: Statevector, b: Statevector) -> complex:
    """<a|b>."""
    if a.n_qubits != b.n_qubits:
        raise ShapeError(f"cannot take inner product of {a.n_qubits}- and {b.n_qubits}-qubit states")
    return complex(np.vdot(a.amps, b.amps))
