import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qarch.errors import ConfigurationError
from qarch.qsim import (GateKind, GateOp, Statevector, apply_circuit, apply_gate, cnot,
                        expectation_z, rx, ry, rz, zero_state)

from oracles import circuit_unitary, random_descs, z_expectation

SQ = np.sqrt(0.5)


def to_ops(descs):
    ops = []
    for d in descs:
        if d[0] == "CNOT":
            ops.append(cnot(d[1], d[2]))
        else:
            ops.append({"RX": rx, "RY": ry, "RZ": rz}[d[0]](d[1], d[2]))
    return ops


@pytest.mark.parametrize("n, expected", [(1, [1, 0]), (2, [1, 0, 0, 0])])
def test_zero_state(n, expected):
    assert np.array_equal(zero_state(n).amplitudes, np.array(expected, dtype=complex))


@pytest.mark.parametrize("n", [0, -1, 15])
def test_zero_state_rejects_bad_counts(n):
    with pytest.raises(ConfigurationError):
        zero_state(n)


def test_rx_pi_on_zero(backend):
    out = apply_gate(zero_state(1), rx(0, np.pi))
    assert np.allclose(out.amplitudes, [0, -1j], atol=1e-15)


def test_cnot_truth_table(backend):
    # |10>: qubit 0 set, which is the most significant bit -> index 2
    state = Statevector(2, [0, 0, 1, 0])
    out = apply_gate(state, cnot(0, 1))
    assert np.allclose(out.amplitudes, [0, 0, 0, 1])
    # control clear: nothing happens
    out = apply_gate(Statevector(2, [0, 1, 0, 0]), cnot(0, 1))
    assert np.allclose(out.amplitudes, [0, 1, 0, 0])


def test_ry_half_pi(backend):
    out = apply_gate(zero_state(1), ry(0, np.pi / 2))
    assert np.allclose(out.amplitudes, [SQ, SQ], atol=1e-15)


def test_bit_convention_qubit0_is_msb(backend):
    out = apply_gate(zero_state(3), rx(0, np.pi))
    assert abs(out.amplitudes[4]) == pytest.approx(1.0)
    out = apply_gate(zero_state(3), rx(2, np.pi))
    assert abs(out.amplitudes[1]) == pytest.approx(1.0)


def test_empty_circuit_is_identity(backend):
    state = apply_circuit(zero_state(2), [ry(0, 0.3), rx(1, 1.1)])
    assert np.array_equal(apply_circuit(state, []).amplitudes, state.amplitudes)


def test_double_rx_pi_is_minus_identity(backend):
    out = apply_circuit(zero_state(1), [rx(0, np.pi), rx(0, np.pi)])
    assert np.allclose(out.amplitudes, [-1, 0], atol=1e-15)
    assert expectation_z(out, 0) == pytest.approx(1.0)


def test_input_not_mutated(backend):
    state = zero_state(2)
    apply_gate(state, rx(0, 0.4))
    assert np.array_equal(state.amplitudes, zero_state(2).amplitudes)


@pytest.mark.parametrize("gate", [rx(2, 0.1), cnot(0, 2), cnot(1, 1), GateOp(GateKind.CNOT, 0)])
def test_invalid_qubits_raise(gate):
    with pytest.raises(IndexError):
        apply_gate(zero_state(2), gate)


def test_expectation_examples(backend):
    assert expectation_z(zero_state(1), 0) == 1.0
    assert expectation_z(apply_gate(zero_state(1), rx(0, np.pi)), 0) == pytest.approx(-1.0)
    assert abs(expectation_z(apply_gate(zero_state(1), ry(0, np.pi / 2)), 0)) < 1e-12
    with pytest.raises(IndexError):
        expectation_z(zero_state(1), 1)


def test_random_circuit_matches_dense_oracle(backend, rng):
    n = 4
    descs = random_descs(rng, n, 10)
    psi0 = rng.normal(size=16) + 1j * rng.normal(size=16)
    psi0 /= np.linalg.norm(psi0)
    expected = circuit_unitary(descs, n) @ psi0
    out = apply_circuit(Statevector(n, psi0), to_ops(descs))
    assert np.max(np.abs(out.amplitudes - expected)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), n_gates=st.integers(0, 12))
def test_norm_and_oracle_property(seed, n, n_gates):
    rng = np.random.default_rng(seed)
    descs = random_descs(rng, n, n_gates)
    out = apply_circuit(zero_state(n), to_ops(descs))
    assert abs(out.norm() - 1.0) <= 1e-9
    expected = circuit_unitary(descs, n)[:, 0]
    assert np.max(np.abs(out.amplitudes - expected)) < 1e-10
    for q in range(n):
        e = expectation_z(out, q)
        assert -1.0 - 1e-12 <= e <= 1.0 + 1e-12
        assert e == pytest.approx(z_expectation(expected, q, n), abs=1e-10)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), kind=st.sampled_from([rx, ry, rz]),
       angle=st.floats(-10, 10, allow_nan=False))
def test_rotation_inverse_restores_state(seed, kind, angle):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    q = int(rng.integers(3))
    out = apply_circuit(Statevector(3, psi), [kind(q, angle), kind(q, -angle)])
    assert np.max(np.abs(out.amplitudes - psi)) < 1e-12


def test_zero_state_expectations_all_plus_one():
    state = zero_state(5)
    assert all(expectation_z(state, q) == 1.0 for q in range(5))
