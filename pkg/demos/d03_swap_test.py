"""
Fidelity through the SWAP test
==============================

An ancilla, two registers, a Hadamard, controlled swaps and a second
Hadamard. The ancilla reads 0 with probability 1/2 + F/2.
"""

import numpy as np

from fidelity_qnn.fidelity import build_swap_test, estimate
from fidelity_qnn.statevec import CircuitSpec, GateOp

width = 3
for angle in (0.0, np.pi / 2, np.pi):
    data = CircuitSpec(width)
    model = CircuitSpec(width, [GateOp("RY", (angle,), (2,))])
    circ = build_swap_test(data, model, n_pairs=1)
    exact = estimate(circ)
    sampled = estimate(circ, shots=8000, seed=1)
    print(f"RY({angle:.3f}) vs |0>: exact F {exact.fidelity:.4f}, 8000 shots {sampled.fidelity:.4f}")
