"""
Looking at the learned states
=============================

After training, each class state can be read back as amplitudes and
per-qubit probabilities, which is what ``fidelity-qnn inspect`` exports.
"""

import numpy as np

from fidelity_qnn import TrainConfig, load_iris, train
from fidelity_qnn.dataprep import stratified_split
from fidelity_qnn.model import learned_state
from fidelity_qnn.statevec import prob_of

train_set, _ = stratified_split(load_iris(), 0.8, seed=0)
for epochs in (1, 10):
    trained = train(TrainConfig(epochs=epochs, seed=0), train_set)
    print(f"after {epochs} epoch(s)")
    for m, name in zip(trained.class_models, trained.class_names):
        state = learned_state(m.stack, m.theta)
        p1 = [prob_of(state, q, 1) for q in range(state.n_qubits)]
        print(f"  {name:>10}: P(1) per qubit {np.round(p1, 3)}")
