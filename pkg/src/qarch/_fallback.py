"""Pure numpy versions of the statevector kernels.

Same signatures and gate codes as the compiled ``_kernels`` module. Work is
vectorized over the batch axis instead of looping per sample.
"""

from __future__ import annotations

import numpy as np

RX, RY, RZ, CNOT = 0, 1, 2, 3


def _rotate(states: np.ndarray, n_qubits: int, kind: int, qubit: int, theta: float) -> None:
    view = states.reshape(states.shape[0], 1 << qubit, 2, 1 << (n_qubits - 1 - qubit))
    c, s = np.cos(0.5 * theta), np.sin(0.5 * theta)
    if kind == RZ:
        view[:, :, 0, :] *= complex(c, -s)
        view[:, :, 1, :] *= complex(c, s)
        return
    a = view[:, :, 0, :].copy()
    b = view[:, :, 1, :]
    if kind == RX:
        view[:, :, 0, :] = c * a - 1j * s * b
        view[:, :, 1, :] = -1j * s * a + c * b
    else:
        view[:, :, 0, :] = c * a - s * b
        view[:, :, 1, :] = s * a + c * b


def _cnot(states: np.ndarray, n_qubits: int, control: int, target: int) -> None:
    view = states.reshape((states.shape[0],) + (2,) * n_qubits)
    lo = [slice(None)] * (n_qubits + 1)
    hi = [slice(None)] * (n_qubits + 1)
    lo[control + 1] = hi[control + 1] = 1
    lo[target + 1], hi[target + 1] = 0, 1
    lo, hi = tuple(lo), tuple(hi)
    tmp = view[lo].copy()
    view[lo] = view[hi]
    view[hi] = tmp


def _apply(states, n_qubits, kind, q0, q1, theta):
    if kind == CNOT:
        _cnot(states, n_qubits, q0, q1)
    else:
        _rotate(states, n_qubits, kind, q0, theta)


def apply_gates(states, n_qubits, kinds, q0, q1, angles):
    """Apply a gate list to every row of ``states`` in place."""
    for g in range(len(kinds)):
        _apply(states, n_qubits, int(kinds[g]), int(q0[g]), int(q1[g]), float(angles[g]))


def expect_z(states, n_qubits, qubit):
    probs = (states.real ** 2 + states.imag ** 2).reshape(
        states.shape[0], 1 << qubit, 2, 1 << (n_qubits - 1 - qubit))
    return probs[:, :, 0, :].sum(axis=(1, 2)) - probs[:, :, 1, :].sum(axis=(1, 2))


def expect_and_shift_grad(states, n_qubits, kinds, q0, q1, angles, readout):
    """Readout expectation and parameter-shift derivative for each rotation."""
    kinds = [int(k) for k in kinds]
    positions = [g for g, k in enumerate(kinds) if k != CNOT]
    work = np.array(states, dtype=np.complex128, copy=True)
    prefix = []
    for g, kind in enumerate(kinds):
        if kind != CNOT:
            prefix.append(work.copy())
        _apply(work, n_qubits, kind, int(q0[g]), int(q1[g]), float(angles[g]))
    expect = expect_z(work, n_qubits, readout)

    grad = np.zeros((len(positions), work.shape[0]))
    for p, g in enumerate(positions):
        vals = []
        for shift in (0.5 * np.pi, -0.5 * np.pi):
            shifted = prefix[p].copy()
            _rotate(shifted, n_qubits, kinds[g], int(q0[g]), float(angles[g]) + shift)
            for h in range(g + 1, len(kinds)):
                _apply(shifted, n_qubits, kinds[h], int(q0[h]), int(q1[h]), float(angles[h]))
            vals.append(expect_z(shifted, n_qubits, readout))
        grad[p] = 0.5 * (vals[0] - vals[1])
    return expect, grad
