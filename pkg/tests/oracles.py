"""Independent reference computations used only by the tests.

Nothing here calls into the production simulator: unitaries are built as
full 2**n x 2**n matrices from Kronecker products, and derivatives come
from central finite differences.
"""

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)
PAULI = {"RX": X, "RY": Y, "RZ": Z}


def rotation_matrix(axis: str, theta: float) -> np.ndarray:
    # exp(-i theta A / 2) = cos(theta/2) I - i sin(theta/2) A for Pauli A
    return np.cos(theta / 2) * I2 - 1j * np.sin(theta / 2) * PAULI[axis]


def kron_all(mats):
    out = np.array([[1.0 + 0j]])
    for m in mats:
        out = np.kron(out, m)
    return out


def embed_single(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    """Full-register matrix of a one-qubit operator; qubit 0 is the leftmost factor."""
    return kron_all([op if q == qubit else I2 for q in range(n)])


def cnot_matrix(control: int, target: int, n: int) -> np.ndarray:
    keep = kron_all([P0 if q == control else I2 for q in range(n)])
    flip = kron_all([P1 if q == control else (X if q == target else I2) for q in range(n)])
    return keep + flip


def gate_unitary(desc, n: int) -> np.ndarray:
    """``desc`` is ("RX"|"RY"|"RZ", qubit, angle) or ("CNOT", control, target)."""
    if desc[0] == "CNOT":
        return cnot_matrix(desc[1], desc[2], n)
    return embed_single(rotation_matrix(desc[0], desc[2]), desc[1], n)


def circuit_unitary(descs, n: int) -> np.ndarray:
    u = np.eye(2 ** n, dtype=complex)
    for d in descs:
        u = gate_unitary(d, n) @ u
    return u


def z_expectation(psi: np.ndarray, qubit: int, n: int) -> float:
    return float(np.real(np.conj(psi) @ embed_single(Z, qubit, n) @ psi))


def random_descs(rng, n: int, n_gates: int):
    descs = []
    for _ in range(n_gates):
        kind = rng.integers(0, 4 if n > 1 else 3)
        if kind == 3:
            c, t = rng.choice(n, size=2, replace=False)
            descs.append(("CNOT", int(c), int(t)))
        else:
            descs.append((("RX", "RY", "RZ")[kind], int(rng.integers(n)), float(rng.uniform(-np.pi, np.pi))))
    return descs


def embedding_descs(features):
    out = []
    for i, f in enumerate(features):
        out.append(("RY", i, float(np.arctan(f))))
        out.append(("RZ", i, float(np.arctan(f * f))))
    return out


def dense_prob(features, descs, readout: int = 0) -> float:
    """Classifier output (1 + <Z>)/2 computed with dense matrices."""
    n = len(features)
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1
    psi = circuit_unitary(embedding_descs(features) + list(descs), n) @ psi
    return 0.5 * (1 + z_expectation(psi, readout, n))


def dense_bce(X_, y, descs, readout: int = 0, clip: float = 1e-7) -> float:
    p = np.array([dense_prob(x, descs, readout) for x in X_])
    p = np.clip(p, clip, 1 - clip)
    return float(np.mean(-(y * np.log(p) + (1 - y) * np.log(1 - p))))


def central_diff(f, x: np.ndarray, h: float) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    g = np.zeros_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e.flat[i] = h
        g.flat[i] = (f(x + e) - f(x - e)) / (2 * h)
    return g


def value_iteration(P, R, gamma, terminal, tol=1e-12):
    """Optimal Q for a deterministic MDP: P[s][a] -> s', R[s][a] -> r."""
    n_s, n_a = len(P), len(P[0])
    Q = np.zeros((n_s, n_a))
    while True:
        V = np.where(terminal, 0.0, Q.max(axis=1))
        new = np.array([[R[s][a] + (0.0 if P[s][a] is None else gamma * V[P[s][a]])
                         for a in range(n_a)] for s in range(n_s)])
        if np.max(np.abs(new - Q)) < tol:
            return new
        Q = new
