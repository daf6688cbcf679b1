"""The compiled kernels and the numpy fallback must agree."""

import numpy as np
import pytest

from qarch import _fallback, kernels

_kernels = pytest.importorskip("qarch._kernels")


def random_circuit(rng, n, g):
    kinds = rng.integers(0, 4, g).astype(np.intc)
    q0 = rng.integers(0, n, g).astype(np.intc)
    q1 = ((q0 + 1 + rng.integers(0, n - 1, g)) % n).astype(np.intc)
    return kinds, q0, q1, rng.uniform(-np.pi, np.pi, g)


@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_apply_and_gradient_agree(rng, n):
    states = rng.normal(size=(7, 2 ** n)) + 1j * rng.normal(size=(7, 2 ** n))
    states /= np.linalg.norm(states, axis=1, keepdims=True)
    circuit = random_circuit(rng, n, 15)
    a, b = states.copy(), states.copy()
    _kernels.apply_gates(a, n, *circuit)
    _fallback.apply_gates(b, n, *circuit)
    assert np.max(np.abs(a - b)) < 1e-13
    for q in range(n):
        assert np.allclose(_kernels.expect_z(a, n, q), _fallback.expect_z(b, n, q), atol=1e-13)
    e1, g1 = _kernels.expect_and_shift_grad(states, n, *circuit, n - 1)
    e2, g2 = _fallback.expect_and_shift_grad(states, n, *circuit, n - 1)
    assert np.allclose(e1, e2, atol=1e-13) and np.allclose(g1, g2, atol=1e-13)


def test_gradient_with_no_rotations(rng):
    states = np.zeros((3, 4), dtype=complex)
    states[:, 0] = 1
    kinds = np.array([3], dtype=np.intc)
    for impl in (_kernels, _fallback):
        e, g = impl.expect_and_shift_grad(states, 2, kinds, np.array([0], np.intc),
                                          np.array([1], np.intc), np.zeros(1), 0)
        assert g.shape == (0, 3)
        assert np.allclose(e, 1.0)


def test_backend_flag():
    assert kernels.BACKEND in ("compiled", "python")


def test_pure_python_switch():
    import os
    import subprocess
    import sys

    env = dict(os.environ, QARCH_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import qarch; print(qarch.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
