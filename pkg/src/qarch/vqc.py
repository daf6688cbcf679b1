"""Trainable variational classifier on top of the arctan embedding.

Prediction is y_hat = (1 + <Z_readout>) / 2 and class 1 is assigned when
y_hat >= 0.5. Gradients use the exact parameter-shift rule; rotation
parameters are the only trainable quantities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .embedding import encode_batch
from .qsim import GateKind, GateOp, gate_arrays

LOSS_CLIP = 1e-7
ADAM_LR = 0.05
ADAM_BETAS = (0.9, 0.999)
ADAM_EPS = 1e-8


@dataclass
class CircuitSpec:
    """Variational part of a classifier circuit.

    ``gates`` are templates whose angle field is ignored; rotation ``i`` (in
    circuit order) takes its angle from ``params[i]``.
    """

    n_qubits: int
    gates: list[GateOp] = field(default_factory=list)
    params: np.ndarray = field(default_factory=lambda: np.zeros(0))
    readout: int = 0

    def __post_init__(self):
        self.params = np.asarray(self.params, dtype=np.float64).copy()
        if self.params.size != self.n_rotations:
            raise ValueError(
                f"{self.n_rotations} rotation gates but {self.params.size} parameters")
        for gate in self.gates:
            gate.validate(self.n_qubits)
        if not 0 <= self.readout < self.n_qubits:
            raise IndexError(f"readout qubit {self.readout} out of range")

    @property
    def n_rotations(self) -> int:
        return sum(1 for g in self.gates if g.kind.is_rotation)

    def add_gate(self, gate: GateOp, init_angle: float = 0.0) -> None:
        """Append a gate; a new rotation gets ``init_angle`` and existing params are kept."""
        gate.validate(self.n_qubits)
        self.gates.append(GateOp(gate.kind, gate.target, gate.control))
        if gate.kind.is_rotation:
            self.params = np.append(self.params, float(init_angle))

    def bound_gates(self) -> list[GateOp]:
        out, p = [], 0
        for gate in self.gates:
            if gate.kind.is_rotation:
                out.append(gate.with_angle(self.params[p]))
                p += 1
            else:
                out.append(gate)
        return out

    def copy(self) -> "CircuitSpec":
        return CircuitSpec(self.n_qubits, list(self.gates), self.params.copy(), self.readout)


@dataclass
class EncodedSet:
    """Embedded statevectors plus labels, computed once per dataset."""

    states: np.ndarray
    labels: np.ndarray

    @classmethod
    def from_arrays(cls, features, labels) -> "EncodedSet":
        labels = np.asarray(labels, dtype=np.int64)
        states = encode_batch(features)
        if states.shape[0] != labels.shape[0]:
            raise ValueError("features and labels differ in length")
        return cls(states, labels)

    @property
    def n_qubits(self) -> int:
        return int(self.states.shape[1]).bit_length() - 1

    def __len__(self) -> int:
        return int(self.labels.shape[0])


def as_encoded(data) -> EncodedSet:
    if isinstance(data, EncodedSet):
        return data
    if hasattr(data, "features") and hasattr(data, "labels"):
        return EncodedSet.from_arrays(data.features, data.labels)
    features, labels = data
    return EncodedSet.from_arrays(features, labels)


def _check_dims(circuit: CircuitSpec, data: EncodedSet) -> None:
    if data.n_qubits != circuit.n_qubits:
        raise ValueError(
            f"data encodes {data.n_qubits} qubits but circuit has {circuit.n_qubits}")


def _run(circuit: CircuitSpec, data: EncodedSet) -> np.ndarray:
    states = np.array(data.states, copy=True)
    gates = circuit.bound_gates()
    if gates:
        kernels.apply_gates(states, circuit.n_qubits, *gate_arrays(gates))
    return kernels.expect_z(states, circuit.n_qubits, circuit.readout)


def predict_proba(circuit: CircuitSpec, data) -> np.ndarray:
    """y_hat for every sample of ``data`` (an EncodedSet, Dataset or (X, y))."""
    if not isinstance(data, EncodedSet) and not hasattr(data, "labels") and not isinstance(data, tuple):
        X = np.atleast_2d(np.asarray(data, dtype=np.float64))
        data = EncodedSet(encode_batch(X), np.zeros(X.shape[0], dtype=np.int64))
    data = as_encoded(data)
    _check_dims(circuit, data)
    return np.clip(0.5 * (1.0 + _run(circuit, data)), 0.0, 1.0)


def predict_prob(circuit: CircuitSpec, x) -> float:
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != circuit.n_qubits:
        raise ValueError(f"expected {circuit.n_qubits} features, got {x.size}")
    return float(predict_proba(circuit, x[None, :])[0])


def bce_loss(y_true, y_pred) -> float:
    """Mean binary cross-entropy with predictions clamped to [1e-7, 1 - 1e-7]."""
    y = np.asarray(y_true, dtype=np.float64)
    p = np.clip(np.asarray(y_pred, dtype=np.float64), LOSS_CLIP, 1.0 - LOSS_CLIP)
    losses = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    return float(np.mean(losses))


def threshold(y_pred: np.ndarray) -> np.ndarray:
    return (y_pred >= 0.5).astype(np.int64)


def _loss_grad(circuit: CircuitSpec, data: EncodedSet):
    """(y_hat, mean BCE, dL/dparams) from one parameter-shift sweep."""
    kinds, q0, q1, _ = gate_arrays(circuit.gates)
    angles = np.zeros(len(circuit.gates))
    angles[kinds != int(GateKind.CNOT)] = circuit.params
    expect, dexpect = kernels.expect_and_shift_grad(
        data.states, circuit.n_qubits, kinds, q0, q1, angles, circuit.readout)
    y_hat = np.clip(0.5 * (1.0 + expect), 0.0, 1.0)
    y = data.labels.astype(np.float64)
    p = np.clip(y_hat, LOSS_CLIP, 1.0 - LOSS_CLIP)
    loss = float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))
    dl_dyhat = (-y / p + (1.0 - y) / (1.0 - p))
    # clamped samples carry no gradient
    dl_dyhat[(y_hat < LOSS_CLIP) | (y_hat > 1.0 - LOSS_CLIP)] = 0.0
    grad = (dexpect * (0.5 * dl_dyhat)[None, :]).sum(axis=1) / len(data)
    return y_hat, loss, grad


def param_shift_grad(circuit: CircuitSpec, batch) -> np.ndarray:
    """Gradient of the mean BCE with respect to ``circuit.params``."""
    data = as_encoded(batch)
    if len(data) == 0:
        raise ValueError("empty batch")
    _check_dims(circuit, data)
    return _loss_grad(circuit, data)[2]


def evaluate_accuracy(circuit: CircuitSpec, dataset) -> float:
    data = as_encoded(dataset)
    if len(data) == 0:
        raise ValueError("empty dataset")
    _check_dims(circuit, data)
    return float(np.mean(threshold(predict_proba(circuit, data)) == data.labels))


@dataclass
class TrainOutcome:
    trained_params: np.ndarray
    train_accuracy: float
    test_accuracy: float
    epochs_run: int
    final_loss: float


def train_classifier(circuit: CircuitSpec, train_set, test_set, max_epochs: int,
                     target_acc: float, lr: float = ADAM_LR) -> TrainOutcome:
    """Full-batch Adam on the rotation parameters, updating ``circuit`` in place.

    Training accuracy is checked before each step; the loop stops as soon as
    it reaches ``target_acc``. A fresh Adam state is used on every call.
    """
    if max_epochs < 1:
        raise ValueError("max_epochs must be >= 1")
    train = as_encoded(train_set)
    test = as_encoded(test_set)
    _check_dims(circuit, train)
    y = train.labels

    epochs = 0
    if circuit.n_rotations == 0:
        y_hat = predict_proba(circuit, train)
        loss = bce_loss(y, y_hat)
    else:
        m = np.zeros_like(circuit.params)
        v = np.zeros_like(circuit.params)
        b1, b2 = ADAM_BETAS
        while True:
            y_hat, loss, grad = _loss_grad(circuit, train)
            if np.mean(threshold(y_hat) == y) >= target_acc or epochs >= max_epochs:
                break
            epochs += 1
            m = b1 * m + (1 - b1) * grad
            v = b2 * v + (1 - b2) * grad * grad
            m_hat = m / (1 - b1 ** epochs)
            v_hat = v / (1 - b2 ** epochs)
            circuit.params = circuit.params - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS)

    return TrainOutcome(
        trained_params=circuit.params.copy(),
        train_accuracy=float(np.mean(threshold(y_hat) == y)),
        test_accuracy=evaluate_accuracy(circuit, test),
        epochs_run=epochs,
        final_loss=loss,
    )


# circuit text format ---------------------------------------------------------

_KIND_NAMES = {GateKind.RX: "RX", GateKind.RY: "RY", GateKind.RZ: "RZ", GateKind.CNOT: "CNOT"}
_NAME_KINDS = {v: k for k, v in _KIND_NAMES.items()}


def format_circuit(circuit: CircuitSpec, comments: Sequence[str] = ()) -> str:
    """Text export: header line then one gate per line.

    ``RY 2 0.351700`` is a rotation on qubit 2; ``CNOT 2 0`` has control 2
    and target 0. Extra ``comments`` become additional ``#`` lines.
    """
    lines = [f"# n_qubits={circuit.n_qubits} readout={circuit.readout}"]
    lines += [f"# {c}" for c in comments]
    for gate in circuit.bound_gates():
        if gate.kind is GateKind.CNOT:
            lines.append(f"CNOT {gate.control} {gate.target}")
        else:
            lines.append(f"{_KIND_NAMES[gate.kind]} {gate.target} {gate.angle:.6f}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> CircuitSpec:
    header = None
    gates, params = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is None and "n_qubits=" in line:
                header = dict(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
            continue
        parts = line.split()
        name = parts[0].upper()
        if name not in _NAME_KINDS:
            raise ValueError(f"line {lineno}: unknown gate {parts[0]!r}")
        kind = _NAME_KINDS[name]
        try:
            if kind is GateKind.CNOT:
                control, target = int(parts[1]), int(parts[2])
                gates.append(GateOp(kind, target, control))
            else:
                gates.append(GateOp(kind, int(parts[1])))
                params.append(float(parts[2]))
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: malformed gate line {raw!r}") from exc
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 fields, got {len(parts)}")
    if header is None:
        raise ValueError("missing '# n_qubits=... readout=...' header")
    return CircuitSpec(int(header["n_qubits"]), gates, np.array(params), int(header.get("readout", 0)))
