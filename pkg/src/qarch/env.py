"""Gate-by-gate circuit construction environment.

Each step appends one gate to the variational circuit, retrains the
classifier and rewards test accuracy reached with few gates.

State rows are ``[control, target, rot_qubit, rot_axis]``:

* CNOT(c, t):      ``[c, t, n, 0]``
* rotation(q, A):  ``[n, 0, q, axis]`` with X=1, Y=2, Z=3
* unused:          ``[0, 0, 0, 0]``

``n`` (the qubit count) is the "no gate here" sentinel.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigurationError, UsageError
from .qsim import GateKind, GateOp, check_qubit_count
from .vqc import CircuitSpec, EncodedSet, as_encoded, evaluate_accuracy, train_classifier

AXES = (GateKind.RX, GateKind.RY, GateKind.RZ)
AXIS_CODE = {GateKind.RX: 1, GateKind.RY: 2, GateKind.RZ: 3}
CODE_AXIS = {v: k for k, v in AXIS_CODE.items()}


class Rotation(NamedTuple):
    qubit: int
    axis: GateKind


class Cnot(NamedTuple):
    control: int
    target: int


def build_action_table(n_qubits: int) -> list:
    """All rotations (qubit-major, X/Y/Z minor) then all ordered CNOT pairs (control-major)."""
    if n_qubits < 2:
        raise ConfigurationError("the action table needs at least 2 qubits")
    check_qubit_count(n_qubits)
    table: list = [Rotation(q, axis) for q in range(n_qubits) for axis in AXES]
    table += [Cnot(c, t) for c in range(n_qubits) for t in range(n_qubits) if c != t]
    return table


def decode_action(table, index: int):
    if not 0 <= index < len(table):
        raise IndexError(f"action index {index} outside table of size {len(table)}")
    return table[index]


def encode_gate_row(action, n_qubits: int) -> list[int]:
    if isinstance(action, Cnot):
        return [action.control, action.target, n_qubits, 0]
    if isinstance(action, Rotation):
        return [n_qubits, 0, action.qubit, AXIS_CODE[action.axis]]
    raise TypeError(f"not an action: {action!r}")


def decode_gate_row(row, n_qubits: int):
    c, t, q, a = (int(v) for v in row)
    if q == n_qubits and a == 0 and 0 <= c < n_qubits and 0 <= t < n_qubits and c != t:
        return Cnot(c, t)
    if c == n_qubits and t == 0 and 0 <= q < n_qubits and a in CODE_AXIS:
        return Rotation(q, CODE_AXIS[a])
    raise ValueError(f"malformed state row {list(row)!r}")


def action_to_gate(action) -> GateOp:
    if isinstance(action, Cnot):
        return GateOp(GateKind.CNOT, action.target, action.control)
    return GateOp(action.axis, action.qubit)


def circuit_from_matrix(matrix: np.ndarray, n_qubits: int, readout: int = 0) -> CircuitSpec:
    """Circuit structure described by the filled prefix of a state matrix (angles zero)."""
    circuit = CircuitSpec(n_qubits, readout=readout)
    for row in np.asarray(matrix, dtype=np.int64):
        if not row.any():
            break
        circuit.add_gate(action_to_gate(decode_gate_row(row, n_qubits)))
    return circuit


def compute_reward(y_l: float, y_prev: float, y_target: float, l: int, L: int) -> float:
    """Three-branch reward; the failure branch uses y_target as its threshold."""
    if y_l >= y_target and l < L:
        return 0.2 * (y_l / y_target) * (L - l)
    if y_l < y_target and l == L:
        return -0.2 * ((y_target - y_l) / y_target) * l
    return float(np.clip((y_l - y_prev) / (y_prev + 1e-6) - 0.01 * l, -1.5, 1.5))


def discount_for(max_gates: int) -> float:
    return 0.005 ** (1.0 / max_gates)


@dataclass
class StepResult:
    observation: np.ndarray
    reward: float
    done: bool
    info: dict = field(default_factory=dict)


class QASEnv:
    """Episodic environment over a fixed train/test split.

    ``y_target`` may be changed between episodes (adaptive search); it is
    snapshotted at ``reset``.
    """

    def __init__(self, train_set, test_set, n_qubits: int, max_gates: int,
                 y_target: float, max_epochs: int, readout: int = 0,
                 init_angle: float = 0.0, classifier_lr: float = 0.05):
        check_qubit_count(n_qubits)
        if max_gates < 1:
            raise ConfigurationError("max_gates must be >= 1")
        if not 0.0 < y_target <= 1.0:
            raise ConfigurationError("y_target must be in (0, 1]")
        if max_epochs < 1:
            raise ConfigurationError("max_epochs must be >= 1")
        self.train: EncodedSet = as_encoded(train_set)
        self.test: EncodedSet = as_encoded(test_set)
        if self.train.n_qubits != n_qubits or self.test.n_qubits != n_qubits:
            raise ConfigurationError("dataset feature count must equal n_qubits")
        self.n_qubits = n_qubits
        self.max_gates = max_gates
        self.y_target = float(y_target)
        self.max_epochs = max_epochs
        self.readout = readout
        self.init_angle = init_angle
        self.classifier_lr = classifier_lr
        self.actions = build_action_table(n_qubits)
        self.base_accuracy = evaluate_accuracy(CircuitSpec(n_qubits, readout=readout), self.test)
        self._ready = False
        self.done = True

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def observation_size(self) -> int:
        return 4 * self.max_gates + 1

    def observation(self) -> np.ndarray:
        return np.append(self.matrix.ravel().astype(np.float64), self.accuracy)

    def reset(self, y_target: float | None = None) -> np.ndarray:
        if y_target is not None:
            self.y_target = float(y_target)
        self.matrix = np.zeros((self.max_gates, 4), dtype=np.int64)
        self.circuit = CircuitSpec(self.n_qubits, readout=self.readout)
        self.gate_count = 0
        self.accuracy = self.base_accuracy
        self.train_accuracy = float("nan")
        self.done = False
        self._ready = True
        return self.observation()

    def step(self, action: int) -> StepResult:
        if not self._ready:
            raise UsageError("call reset() before step()")
        if self.done:
            raise UsageError("episode is done; call reset()")
        decoded = decode_action(self.actions, int(action))
        self.circuit.add_gate(action_to_gate(decoded), self.init_angle)
        self.matrix[self.gate_count] = encode_gate_row(decoded, self.n_qubits)
        self.gate_count += 1

        outcome = train_classifier(self.circuit, self.train, self.test, self.max_epochs,
                                   self.y_target, lr=self.classifier_lr)
        y_prev, y_l = self.accuracy, outcome.test_accuracy
        self.accuracy = y_l
        self.train_accuracy = outcome.train_accuracy
        reward = compute_reward(y_l, y_prev, self.y_target, self.gate_count, self.max_gates)
        self.done = y_l >= self.y_target or self.gate_count == self.max_gates
        info = {
            "accuracy": y_l,
            "train_accuracy": outcome.train_accuracy,
            "gates": self.gate_count,
            "y_target": self.y_target,
            "epochs": outcome.epochs_run,
        }
        return StepResult(self.observation(), reward, self.done, info)


TRACE_HEADER = ["episode", "step", "action_index", "y_l", "reward", "done"]


class TraceWriter:
    """Per-step episode trace: ``episode,step,action_index,y_l,reward,done``."""

    def __init__(self, path):
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(TRACE_HEADER)

    def write(self, episode: int, step: int, action: int, y_l: float, reward: float, done: bool):
        self._writer.writerow([episode, step, action, repr(float(y_l)), repr(float(reward)), int(done)])

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
