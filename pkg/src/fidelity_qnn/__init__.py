"""Multi-class classifier built from SWAP-test state fidelities, simulated on dense statevectors."""

from .dataprep import Dataset, Preprocessor, load_iris, load_mnist
from .model import ClassModel, LayerStack, param_count, total_qubits
from .trainer import TrainConfig, TrainedModel, evaluate, predict, train

__all__ = [
    "ClassModel",
    "Dataset",
    "LayerStack",
    "Preprocessor",
    "TrainConfig",
    "TrainedModel",
    "evaluate",
    "load_iris",
    "load_mnist",
    "param_count",
    "predict",
    "total_qubits",
    "train",
]

__version__ = "0.1.0"
