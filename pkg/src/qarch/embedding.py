"""Arctan angle embedding of classical features."""

from __future__ import annotations

import numpy as np

from .qsim import GateOp, apply_gates_batch, check_qubit_count, ry, rz


def embed_features(features) -> list[GateOp]:
    """RY(arctan f_i) then RZ(arctan f_i**2) on qubit i, qubit-major order."""
    values = np.asarray(features, dtype=np.float64).ravel()
    if not np.all(np.isfinite(values)):
        raise ValueError("features must be finite")
    gates = []
    for i, f in enumerate(values):
        gates.append(ry(i, np.arctan(f)))
        gates.append(rz(i, np.arctan(f * f)))
    return gates


def encode_batch(features: np.ndarray) -> np.ndarray:
    """Embedded statevectors for every row of ``features``.

    The embedding is a product state, so each qubit's 2-vector
    RZ(phi) RY(theta) |0> is formed directly and the rows are combined with
    Kronecker products. Agrees with applying ``embed_features`` gate by gate.
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("features must be a 2-D array (samples x features)")
    if not np.all(np.isfinite(X)):
        raise ValueError("features must be finite")
    n_samples, n_qubits = X.shape
    check_qubit_count(n_qubits)
    theta = np.arctan(X)
    phi = np.arctan(X * X)
    # RY(theta)|0> = (cos, sin); RZ(phi) multiplies by exp(-i phi/2), exp(+i phi/2)
    lo = np.cos(0.5 * theta) * np.exp(-0.5j * phi)
    hi = np.sin(0.5 * theta) * np.exp(0.5j * phi)
    states = np.ones((n_samples, 1), dtype=np.complex128)
    for q in range(n_qubits):
        pair = np.stack([lo[:, q], hi[:, q]], axis=1)
        states = (states[:, :, None] * pair[:, None, :]).reshape(n_samples, -1)
    return np.ascontiguousarray(states)


def encode_batch_gatewise(features: np.ndarray) -> np.ndarray:
    """Reference path for ``encode_batch``: simulate the embedding gates."""
    X = np.asarray(features, dtype=np.float64)
    n_samples, n_qubits = X.shape
    out = np.zeros((n_samples, 1 << n_qubits), dtype=np.complex128)
    out[:, 0] = 1.0
    for i in range(n_samples):
        out[i] = apply_gates_batch(out[i:i + 1], n_qubits, embed_features(X[i]))[0]
    return out
