"""
Encoding classical data as rotation angles
==========================================

Each data qubit carries two normalized features: RY(2 asin sqrt(x0))
followed by RZ(2 asin sqrt(x1)). The probability of reading 1 on that qubit
is then x0.
"""

import numpy as np

from fidelity_qnn.dataprep import Preprocessor, build_data_circuit, encode, load_iris
from fidelity_qnn.statevec import prob_of, run

sample = encode([0.5, 0.25])
print("angles (ry, rz):", sample.angles[0])  # pi/2 and pi/3

state = run(build_data_circuit(sample))
print("P(1) =", prob_of(state, 0, 1))

# On Iris: min-max scale the four measurements, then two qubits suffice.
iris = load_iris()
pre = Preprocessor.fit(iris)
print("qubits per sample:", pre.n_qubits)
print("first flower angles:\n", pre.angles(iris.X[:1])[0])
