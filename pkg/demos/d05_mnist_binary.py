"""
MNIST 3 vs 6 on sixteen principal components
============================================

Pixels go through /255, a 16-component PCA and min-max scaling, giving
eight data qubits. Run from the repository root so the bundled subset in
data/mnist-5k is found.
"""

from fidelity_qnn import TrainConfig, evaluate, load_mnist, train
from fidelity_qnn.dataprep import select_classes, stratified_subsample

digits = load_mnist("data/mnist-5k/images-idx3-ubyte.gz", "data/mnist-5k/labels-idx1-ubyte.gz")
digits = select_classes(digits, [3, 6])
train_set, test_set = stratified_subsample(digits, 200, 100, seed=0)

# a few epochs already separate the two digits well
trained = train(TrainConfig(epochs=5, pca=16, seed=0), train_set)
print("qubits per sample:", trained.preprocessor.n_qubits)
print("test accuracy:", evaluate(trained, test_set))
