"""Dense statevector simulation for RX/RY/RZ/CNOT circuits.

Bit convention: qubit 0 is the MOST significant bit of the basis index, so
on two qubits the amplitude order is |00>, |01>, |10>, |11> with the left
digit belonging to qubit 0.

Rotations follow R_A(theta) = exp(-i theta A / 2). Global phase is kept as
computed; every observable used here is phase-invariant.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ConfigurationError

MAX_QUBITS = 14


class GateKind(enum.IntEnum):
    RX = 0
    RY = 1
    RZ = 2
    CNOT = 3

    @property
    def is_rotation(self) -> bool:
        return self is not GateKind.CNOT


@dataclass(frozen=True)
class GateOp:
    """One placed gate.

    For rotations ``target`` is the rotated qubit and ``angle`` is in
    radians. For CNOT ``control`` must be set and ``angle`` is unused.
    """

    kind: GateKind
    target: int
    control: int | None = None
    angle: float = 0.0

    def with_angle(self, angle: float) -> "GateOp":
        return GateOp(self.kind, self.target, self.control, float(angle))

    def validate(self, n_qubits: int) -> None:
        if not 0 <= self.target < n_qubits:
            raise IndexError(f"target qubit {self.target} out of range for {n_qubits} qubits")
        if self.kind is GateKind.CNOT:
            if self.control is None or not 0 <= self.control < n_qubits:
                raise IndexError(f"control qubit {self.control} out of range for {n_qubits} qubits")
            if self.control == self.target:
                raise IndexError("CNOT control and target must differ")


def rx(qubit: int, angle: float) -> GateOp:
    return GateOp(GateKind.RX, qubit, angle=float(angle))


def ry(qubit: int, angle: float) -> GateOp:
    return GateOp(GateKind.RY, qubit, angle=float(angle))


def rz(qubit: int, angle: float) -> GateOp:
    return GateOp(GateKind.RZ, qubit, angle=float(angle))


def cnot(control: int, target: int) -> GateOp:
    return GateOp(GateKind.CNOT, target, control=control)


@dataclass
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.n_qubits,):
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes, got shape {self.amplitudes.shape}")

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amplitudes.copy())


def check_qubit_count(n_qubits: int) -> None:
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ConfigurationError(f"n_qubits must be in [1, {MAX_QUBITS}], got {n_qubits}")


def zero_state(n_qubits: int) -> Statevector:
    check_qubit_count(n_qubits)
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n_qubits, amps)


def gate_arrays(gates: Sequence[GateOp]) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Pack gates into the (kind, q0, q1, angle) arrays the kernels expect.

    q0 is the rotated qubit or the CNOT control; q1 is the CNOT target.
    """
    k = len(gates)
    kinds = np.empty(k, dtype=np.intc)
    q0 = np.zeros(k, dtype=np.intc)
    q1 = np.zeros(k, dtype=np.intc)
    angles = np.zeros(k, dtype=np.float64)
    for i, gate in enumerate(gates):
        kinds[i] = int(gate.kind)
        if gate.kind is GateKind.CNOT:
            q0[i], q1[i] = gate.control, gate.target
        else:
            q0[i] = gate.target
            angles[i] = gate.angle
    return kinds, q0, q1, angles


def apply_gates_batch(states: np.ndarray, n_qubits: int, gates: Sequence[GateOp]) -> np.ndarray:
    """Apply ``gates`` to each row of a (batch, 2**n) array; returns a new array."""
    for gate in gates:
        gate.validate(n_qubits)
    out = np.array(states, dtype=np.complex128, order="C", copy=True)
    if gates:
        kernels.apply_gates(out, n_qubits, *gate_arrays(gates))
    return out


def apply_gate(state: Statevector, gate: GateOp) -> Statevector:
    return apply_circuit(state, [gate])


def apply_circuit(state: Statevector, gates: Iterable[GateOp]) -> Statevector:
    gates = list(gates)
    out = apply_gates_batch(state.amplitudes[None, :], state.n_qubits, gates)
    return Statevector(state.n_qubits, out[0])


def expectation_z(state: Statevector, qubit: int) -> float:
    if not 0 <= qubit < state.n_qubits:
        raise IndexError(f"qubit {qubit} out of range for {state.n_qubits} qubits")
    amps = np.ascontiguousarray(state.amplitudes[None, :])
    return float(kernels.expect_z(amps, state.n_qubits, qubit)[0])
