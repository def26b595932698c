"""
Statevector simulator basics
============================

Qubit 0 is the least significant bit of the basis index. Gates act by
reshaping the 2^n amplitudes into an n-axis tensor and contracting.
"""

import numpy as np

from fidelity_qnn.statevec import CircuitSpec, GateOp, gate_matrix, prob_of, run

# H then CRY(pi) from qubit 0 to qubit 1 makes the Bell pair (|00> + |11>)/sqrt(2).
circ = CircuitSpec(2)
circ.append(GateOp("H", (), (0,)))
circ.append(GateOp("CRY", (np.pi,), (0, 1)))
state = run(circ)
print("amplitudes:", np.round(state.amps, 4))
print("P(q1 = 1):", prob_of(state, 1, 1))

# CSWAP exchanges basis states |011> and |101> (indices 3 and 5), nothing else.
print(np.real(gate_matrix(GateOp("CSWAP", (), (0, 1, 2)))).astype(int))

# Circuits serialize to a small text format, one gate per line.
print(circ.to_text())
