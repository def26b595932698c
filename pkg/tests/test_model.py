import json

import numpy as np
import pytest

from fidelity_qnn.errors import ConfigurationError
from fidelity_qnn.model import (
    ClassModel,
    LayerKind,
    LayerStack,
    build_model_circuit,
    init_params,
    learned_state,
    param_count,
    parse_stack,
    total_qubits,
)
from fidelity_qnn.statevec import run, zero_state


@pytest.mark.parametrize(
    "name, n, expected",
    [
        ("QC-S", 2, 4),
        ("QC-S", 8, 16),
        ("QC-SDE", 2, 8),
        ("QC-D", 4, 6),
        ("QC-E", 4, 6),
        ("S,D,E,S", 3, 6 + 4 + 4 + 6),
    ],
)
def test_param_count(name, n, expected):
    assert param_count(LayerStack(name, n)) == expected


def test_param_count_all_pairing():
    assert param_count(LayerStack("QC-E", 4, "all")) == 2 * 6


def test_reference_parameter_totals():
    assert 3 * param_count(LayerStack("QC-S", 2)) == 12
    assert 2 * param_count(LayerStack("QC-S", 8)) == 32


@pytest.mark.parametrize("d, expected", [(4, 5), (16, 17), (1, 3)])
def test_total_qubits(d, expected):
    assert total_qubits(d) == expected


def test_parse_stack():
    assert parse_stack("QC-SD") == (LayerKind.SINGLE, LayerKind.DUAL)
    assert parse_stack("s, e") == (LayerKind.SINGLE, LayerKind.ENTANGLE)
    with pytest.raises(ConfigurationError):
        parse_stack("QC-X")


def test_stack_validation():
    with pytest.raises(ConfigurationError):
        LayerStack("QC-D", 1)
    with pytest.raises(ConfigurationError):
        LayerStack("QC-S", 2, "ring")
    with pytest.raises(ConfigurationError):
        ClassModel(LayerStack("QC-S", 2), np.zeros(3))


def test_init_params_range_and_determinism():
    stack = LayerStack("QC-SDE", 4)
    a = init_params(stack, 42)
    assert np.all((a.theta >= 0) & (a.theta < np.pi))
    assert np.array_equal(a.theta, init_params(stack, 42).theta)
    assert not np.array_equal(a.theta, init_params(stack, 43).theta)


def test_single_layer_flip():
    m = ClassModel(LayerStack("QC-S", 1), [np.pi, 0.0])
    assert np.allclose(np.abs(learned_state(m.stack, m.theta).amps), [0, 1], atol=1e-15)


def test_dual_layer_gate_sequence():
    c = build_model_circuit(ClassModel(LayerStack("QC-D", 2), [0.3, 0.7]))
    assert [(o.kind, o.params, o.qubits) for o in c.ops] == [
        ("RY", (0.3,), (0,)),
        ("RY", (0.3,), (1,)),
        ("RZ", (0.7,), (0,)),
        ("RZ", (0.7,), (1,)),
    ]


def test_entangle_layer_gate_sequence_and_identity():
    m = ClassModel(LayerStack("QC-E", 3), [0.1, 0.2, 0.3, 0.4])
    c = build_model_circuit(m, qubit_offset=2)
    assert [(o.kind, o.qubits) for o in c.ops] == [("CRY", (2, 3)), ("CRZ", (2, 3)), ("CRY", (3, 4)), ("CRZ", (3, 4))]
    zero = ClassModel(LayerStack("QC-E", 2), [0.0, 0.0])
    assert np.allclose(learned_state(zero.stack, zero.theta).amps, zero_state(2).amps, atol=1e-12)


def test_parameter_consumption_order():
    stack = LayerStack("S,E", 2)
    theta = np.arange(6) * 0.1
    ops = build_model_circuit(ClassModel(stack, theta)).ops
    assert [o.params[0] for o in ops] == pytest.approx(list(theta))
    assert [o.kind for o in ops] == ["RY", "RZ", "RY", "RZ", "CRY", "CRZ"]


@pytest.mark.parametrize("name", ["QC-S", "QC-D", "QC-E", "QC-SD", "QC-SDE"])
@pytest.mark.parametrize("pairing", ["chain", "all"])
def test_gate_counts_and_purity(name, pairing):
    stack = LayerStack(name, 4, pairing)
    m = init_params(stack, 0)
    ops = build_model_circuit(m).ops
    expected = 0
    for kind in stack.layers:
        if kind is LayerKind.SINGLE:
            expected += 2 * stack.n_qubits
        elif kind is LayerKind.DUAL:
            expected += 4 * len(stack.pairs())
        else:
            expected += 2 * len(stack.pairs())
    assert len(ops) == expected
    assert abs(learned_state(stack, m.theta).norm() - 1) < 1e-10


def test_stack_order_matters():
    theta = np.linspace(0.2, 1.9, 8)
    a = learned_state(LayerStack("S,D", 2), np.r_[theta[:4], theta[4:6]])
    b = learned_state(LayerStack("D,S", 2), np.r_[theta[4:6], theta[:4]])
    assert not np.allclose(a.amps, b.amps)


def test_model_reload_reproduces_circuit():
    # round-trip the parameters through the checkpoint float encoding
    stack = LayerStack("QC-SDE", 3)
    m = init_params(stack, 5)
    back = ClassModel(stack, np.array(json.loads(json.dumps(m.theta.tolist()))))
    assert build_model_circuit(back).ops == build_model_circuit(m).ops
    assert run(build_model_circuit(back)).amps.tobytes() == run(build_model_circuit(m)).amps.tobytes()
