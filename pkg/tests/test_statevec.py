import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fidelity_qnn.errors import CapacityError, DataFormatError, ParameterError, QubitIndexError, ShapeError
from fidelity_qnn.statevec import (
    GATE_ARITY,
    CircuitSpec,
    GateOp,
    Statevector,
    apply,
    basis_state,
    gate_matrix,
    inner_product,
    prob_of,
    run,
    sample_outcome,
    zero_state,
)
from oracles import full_operator, kron_product_state, random_state, ry_state

# CSWAP(q0, q1, q2) reference matrix, rows/columns in basis-index order
PRINTED_CSWAP = np.array(
    [
        [1, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 0, 0, 1],
    ]
)


def random_gate(rng, n_qubits, kind=None):
    kind = kind or rng.choice(sorted(GATE_ARITY))
    n_angles, n_targets = GATE_ARITY[kind]
    params = tuple(rng.uniform(-4 * np.pi, 4 * np.pi, n_angles))
    qubits = tuple(int(q) for q in rng.choice(n_qubits, n_targets, replace=False))
    return GateOp(kind, params, qubits)


def test_zero_state():
    assert np.array_equal(zero_state(1).amps, [1, 0])
    assert np.array_equal(zero_state(2).amps, [1, 0, 0, 0])


@pytest.mark.parametrize("n", [0, 25, -1])
def test_zero_state_capacity(n):
    with pytest.raises(CapacityError):
        zero_state(n)


def test_statevector_shape_checked():
    with pytest.raises(ShapeError):
        Statevector(2, np.ones(3))
    with pytest.raises(ShapeError):
        Statevector.from_amplitudes(np.ones(6))


def test_ry_pi():
    assert np.allclose(gate_matrix(GateOp("RY", (np.pi,))), [[0, -1], [1, 0]], atol=1e-15)


def test_rz_matrix():
    t = 0.37
    assert np.allclose(gate_matrix(GateOp("RZ", (t,))), np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)]))


@pytest.mark.parametrize("theta", [0.0, 0.3, np.pi, -2.1, 7.0])
def test_general_rotation_specializations(theta):
    assert np.allclose(gate_matrix(GateOp("RX", (theta,))), gate_matrix(GateOp("R", (theta, 0.0))), atol=1e-15)
    assert np.allclose(gate_matrix(GateOp("RY", (theta,))), gate_matrix(GateOp("R", (theta, np.pi / 2))), atol=1e-15)


def test_cswap_matches_reference_matrix():
    assert np.array_equal(gate_matrix(GateOp("CSWAP", (), (0, 1, 2))), PRINTED_CSWAP)


def test_rzz_is_entangling_not_global_phase():
    m = gate_matrix(GateOp("RZZ", (0.8,)))
    assert np.allclose(np.diag(m), np.exp(-0.4j * np.array([1, -1, -1, 1])))
    assert not np.allclose(m, m[0, 0] * np.eye(4))


@pytest.mark.parametrize(
    "kind, params",
    [("RY", ()), ("H", (0.1,)), ("R", (0.1,)), ("CSWAP", (1.0,)), ("RZZ", (1.0, 2.0))],
)
def test_wrong_arity(kind, params):
    with pytest.raises(ParameterError):
        gate_matrix(GateOp(kind, params))


def test_unknown_kind():
    with pytest.raises(ParameterError):
        gate_matrix(GateOp("CNOT", (), (0, 1)))


def test_unitarity_random_draws():
    rng = np.random.default_rng(11)
    for _ in range(1000):
        u = gate_matrix(random_gate(rng, 3))
        assert np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) < 1e-12


def test_hadamard_on_ground():
    s = apply(zero_state(1), GateOp("H", (), (0,)))
    assert np.allclose(s.amps, [2**-0.5, 2**-0.5])


def test_ry_pi_flips():
    s = apply(zero_state(1), GateOp("RY", (np.pi,), (0,)))
    assert np.allclose(s.amps, [0, 1], atol=1e-15)


def test_cswap_moves_basis_states():
    # q0=1 (control), q1=1, q2=0 is index 3; swapping q1,q2 gives index 5
    out = apply(basis_state(3, 3), GateOp("CSWAP", (), (0, 1, 2)))
    assert np.allclose(out.probabilities(), np.eye(8)[5])
    # control off: nothing moves
    out = apply(basis_state(3, 6), GateOp("CSWAP", (), (0, 1, 2)))
    assert np.allclose(out.probabilities(), np.eye(8)[6])


def test_apply_rejects_bad_indices():
    with pytest.raises(QubitIndexError):
        apply(zero_state(2), GateOp("RY", (0.1,), (2,)))
    with pytest.raises(QubitIndexError):
        apply(zero_state(3), GateOp("CRY", (0.1,), (1, 1)))


def test_apply_does_not_mutate_input():
    s = zero_state(2)
    apply(s, GateOp("H", (), (1,)))
    assert np.array_equal(s.amps, [1, 0, 0, 0])
    with pytest.raises(ValueError):
        s.amps[0] = 0


def test_apply_matches_full_operator_oracle():
    rng = np.random.default_rng(5)
    for _ in range(150):
        n = int(rng.integers(3, 6))
        psi = random_state(rng, n)
        g = random_gate(rng, n)
        expected = full_operator(g, n) @ psi
        got = apply(Statevector(n, psi), g).amps
        assert np.allclose(got, expected, atol=1e-12)


def test_tensor_consistency_with_product_state():
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(1, 6))
        angles = rng.uniform(0, np.pi, n)
        state = zero_state(n)
        for q, a in enumerate(angles):
            state = apply(state, GateOp("RY", (a,), (q,)))
        assert np.allclose(state.amps, kron_product_state([ry_state(a) for a in angles]), atol=1e-12)


def test_two_qubit_product_ordering():
    # qubit 0 in |1>, qubit 1 in |0>: basis index 1
    s = apply(zero_state(2), GateOp("RY", (np.pi,), (0,)))
    assert np.isclose(abs(s.amps[1]), 1.0)


def test_norm_preservation_random_circuits():
    rng = np.random.default_rng(3)
    for _ in range(40):
        n = int(rng.integers(3, 11))
        circ = CircuitSpec(n, [random_gate(rng, n) for _ in range(50)])
        assert abs(run(circ).norm() - 1.0) < 1e-9


@settings(max_examples=60, deadline=None)
@given(
    kind=st.sampled_from(sorted(GATE_ARITY)),
    angles=st.lists(st.floats(-20, 20), min_size=2, max_size=2),
    seed=st.integers(0, 2**32 - 1),
)
def test_norm_preserved_property(kind, angles, seed):
    rng = np.random.default_rng(seed)
    n_angles, n_targets = GATE_ARITY[kind]
    qubits = tuple(int(q) for q in rng.choice(4, n_targets, replace=False))
    state = Statevector(4, random_state(rng, 4))
    out = apply(state, GateOp(kind, angles[:n_angles], qubits))
    assert abs(out.norm() - 1.0) < 1e-10


def test_prob_of():
    plus = apply(zero_state(1), GateOp("H", (), (0,)))
    assert prob_of(plus, 0, 1) == pytest.approx(0.5, abs=1e-15)
    assert prob_of(zero_state(1), 0, 0) == 1.0
    s = apply(zero_state(1), GateOp("RY", (2 * np.arcsin(np.sqrt(0.3)),), (0,)))
    assert prob_of(s, 0, 1) == pytest.approx(0.3, abs=1e-12)


def test_prob_of_sums_to_one():
    rng = np.random.default_rng(8)
    for _ in range(20):
        s = Statevector(4, random_state(rng, 4))
        for q in range(4):
            brute = sum(abs(s.amps[i]) ** 2 for i in range(16) if (i >> q) & 1)
            assert prob_of(s, q, 1) == pytest.approx(brute, abs=1e-12)
            assert prob_of(s, q, 0) + prob_of(s, q, 1) == pytest.approx(1.0, abs=1e-12)


def test_sample_outcome():
    one = basis_state(1, 1)
    assert sample_outcome(one, 0, 100, 1) == 100
    assert sample_outcome(zero_state(1), 0, 100, 1) == 0
    plus = apply(zero_state(1), GateOp("H", (), (0,)))
    count = sample_outcome(plus, 0, 8000, 1234)
    assert 3800 <= count <= 4200
    assert count == sample_outcome(plus, 0, 8000, 1234)
    with pytest.raises(ParameterError):
        sample_outcome(plus, 0, 0, 1)


def test_inner_product():
    assert inner_product(zero_state(1), basis_state(1, 1)) == 0
    assert inner_product(zero_state(1), zero_state(1)) == 1
    half = apply(zero_state(1), GateOp("RY", (np.pi / 2,), (0,)))
    assert abs(inner_product(zero_state(1), half)) ** 2 == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ShapeError):
        inner_product(zero_state(1), zero_state(2))


def test_circuit_text_round_trip():
    rng = np.random.default_rng(4)
    circ = CircuitSpec(5, [random_gate(rng, 5) for _ in range(30)])
    back = CircuitSpec.from_text(circ.to_text())
    assert back.n_qubits == 5
    assert [(o.kind, o.qubits) for o in back.ops] == [(o.kind, o.qubits) for o in circ.ops]
    for a, b in zip(back.ops, circ.ops):
        assert np.allclose(a.params, b.params, rtol=1e-11, atol=1e-12)


def test_circuit_text_format():
    circ = CircuitSpec(3, [GateOp("H", (), (0,)), GateOp("R", (0.5, 1.25), (1,)), GateOp("CSWAP", (), (0, 1, 2))])
    assert circ.to_text().splitlines()[1:] == ["H 0", "R 0.5,1.25 1", "CSWAP 0,1,2"]


def test_circuit_text_parse_error():
    with pytest.raises(DataFormatError, match="line 2"):
        CircuitSpec.from_text("H 0\nRY 1\n")


def test_circuit_rejects_out_of_range_op():
    with pytest.raises(QubitIndexError):
        CircuitSpec(2, [GateOp("H", (), (2,))])
