"""
Training the Iris classifier
============================

One learned state per class. Each is pulled toward its own samples by
coordinate-wise steps with a shrinking parameter shift.
"""

from fidelity_qnn import TrainConfig, evaluate, load_iris, train
from fidelity_qnn.dataprep import stratified_split

train_set, test_set = stratified_split(load_iris(), 0.8, seed=0)
config = TrainConfig(learning_rate=0.01, epochs=25, seed=0, stack="QC-S")

trained = train(config, train_set, test_set, callback=lambda r: print(
    f"epoch {r.epoch:2d}  loss {[round(l, 3) for l in r.class_loss]}  eval {r.eval_accuracy:.3f}"))

print("held-out accuracy:", evaluate(trained, test_set))
