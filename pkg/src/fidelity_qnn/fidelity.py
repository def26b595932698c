"""SWAP-test construction and state-fidelity estimation.

The ancilla of a SWAP test returns the MATCH outcome (ancilla reads 0) with
probability 1/2 + F/2, where F = |<phi|omega>|^2. Estimates invert that law,
clamping to [0, 1] because sampled match rates can fall below one half.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LayoutError, ParameterError
from .statevec import CircuitSpec, GateOp, Statevector, inner_product, prob_of, run, sample_outcome

ANCILLA = 0
MATCH_OUTCOME = 0
EPS_CLIP = 1e-9
DEFAULT_SHOTS = 8000


@dataclass(frozen=True)
class FidelityEstimate:
    p_match: float
    fidelity: float
    shots: int | None = None  # None means exact
    seed: int | None = None

    @property
    def mode(self) -> str:
        return "exact" if self.shots is None else f"shots({self.shots}, {self.seed})"


def fidelity_from_match(p_match: float) -> float:
    return min(max(2.0 * p_match - 1.0, 0.0), 1.0)


def clip_for_log(p):
    return np.clip(p, EPS_CLIP, 1.0 - EPS_CLIP)


def build_swap_test(
    data_circ: CircuitSpec,
    model_circ: CircuitSpec,
    n_pairs: int,
    data_offset: int = 1,
    state_offset: int | None = None,
) -> CircuitSpec:
    """H(anc), data prep, learned-state prep, CSWAP(anc, data_j, state_j) for each j, H(anc)."""
    if state_offset is None:
        state_offset = data_offset + n_pairs
    data_range = set(range(data_offset, data_offset + n_pairs))
    state_range = set(range(state_offset, state_offset + n_pairs))
    if ANCILLA in data_range | state_range:
        raise LayoutError("the ancilla (qubit 0) cannot belong to a swapped register")
    if data_range & state_range:
        raise LayoutError(f"data qubits {sorted(data_range)} overlap state qubits {sorted(state_range)}")
    if not data_circ.qubits_used() <= data_range:
        raise LayoutError(f"data circuit touches qubits outside {sorted(data_range)}")
    if not model_circ.qubits_used() <= state_range:
        raise LayoutError(f"model circuit touches qubits outside {sorted(state_range)}")

    width = max(data_range | state_range) + 1
    circ = CircuitSpec(width)
    circ.append(GateOp("H", (), (ANCILLA,)))
    circ.extend(data_circ.ops)
    circ.extend(model_circ.ops)
    for j in range(n_pairs):
        circ.append(GateOp("CSWAP", (), (ANCILLA, data_offset + j, state_offset + j)))
    circ.append(GateOp("H", (), (ANCILLA,)))
    return circ


def match_probability(circuit: CircuitSpec) -> float:
    """Exact probability of the MATCH outcome on the ancilla of a SWAP-test circuit."""
    return prob_of(run(circuit), ANCILLA, MATCH_OUTCOME)


def estimate(circuit: CircuitSpec, shots: int | None = None, seed: int | None = None) -> FidelityEstimate:
    """Fidelity from a full SWAP-test simulation, exact (``shots=None``) or sampled."""
    if shots is None:
        p = match_probability(circuit)
    else:
        if shots < 1:
            raise ParameterError(f"shots must be >= 1, got {shots}")
        ones = sample_outcome(run(circuit), ANCILLA, shots, seed)
        p = (shots - ones) / shots
    return FidelityEstimate(p, fidelity_from_match(p), shots, seed)


def estimate_states(
    phi: Statevector, omega: Statevector, shots: int | None = None, seed: int | None = None
) -> FidelityEstimate:
    """Same estimate as a SWAP test on ``phi`` and ``omega``, using the closed-form ancilla law.

    Avoids simulating the doubled register; shot sampling draws the ancilla
    outcomes from the same binomial the full circuit would produce.
    """
    p = match_probability_from_overlap(abs(inner_product(phi, omega)) ** 2)
    if shots is not None:
        if shots < 1:
            raise ParameterError(f"shots must be >= 1, got {shots}")
        matches = np.random.default_rng(seed).binomial(shots, p)
        p = matches / shots
    return FidelityEstimate(float(p), fidelity_from_match(p), shots, seed)


def match_probability_from_overlap(overlap_sq):
    return 0.5 + 0.5 * np.clip(overlap_sq, 0.0, 1.0)
