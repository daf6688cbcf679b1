# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled statevector kernels.

Gate codes: 0 = RX, 1 = RY, 2 = RZ, 3 = CNOT. For rotations ``q0`` is the
target and ``q1`` is ignored; for CNOT ``q0`` is the control and ``q1`` the
target. Qubit 0 is the most significant bit of the basis index.
"""

import numpy as np

from libc.string cimport memcpy

cdef enum:
    RX = 0
    RY = 1
    RZ = 2
    CNOT = 3


cdef inline void _rotation(double complex *state, int n, int kind, int q, double c, double s) noexcept nogil:
    # c, s = cos(theta/2), sin(theta/2); interleaved (re, im) view of the amplitudes
    cdef double *psi = <double *> state
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t stride = 1 << (n - 1 - q)
    cdef double ar, ai, br, bi
    cdef Py_ssize_t blk, k, i, j
    blk = 0
    while blk < dim:
        for k in range(stride):
            i = 2 * (blk + k)
            j = i + 2 * stride
            ar = psi[i]
            ai = psi[i + 1]
            br = psi[j]
            bi = psi[j + 1]
            if kind == RX:
                # [[c, -is], [-is, c]]
                psi[i] = c * ar + s * bi
                psi[i + 1] = c * ai - s * br
                psi[j] = s * ai + c * br
                psi[j + 1] = -s * ar + c * bi
            elif kind == RY:
                psi[i] = c * ar - s * br
                psi[i + 1] = c * ai - s * bi
                psi[j] = s * ar + c * br
                psi[j + 1] = s * ai + c * bi
            else:
                # diag(c - is, c + is)
                psi[i] = c * ar + s * ai
                psi[i + 1] = c * ai - s * ar
                psi[j] = c * br - s * bi
                psi[j + 1] = c * bi + s * br
        blk += 2 * stride


cdef inline void _cnot(double complex *psi, int n, int control, int target) noexcept nogil:
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t cs = 1 << (n - 1 - control)
    cdef Py_ssize_t ts = 1 << (n - 1 - target)
    cdef double complex tmp
    cdef Py_ssize_t i
    for i in range(dim):
        if (i & cs) and not (i & ts):
            tmp = psi[i]
            psi[i] = psi[i | ts]
            psi[i | ts] = tmp


cdef inline void _apply(double complex *psi, int n, int kind, int q0, int q1, double c, double s) noexcept nogil:
    if kind == CNOT:
        _cnot(psi, n, q0, q1)
    else:
        _rotation(psi, n, kind, q0, c, s)


cdef inline double _expect_z(const double complex *state, int n, int q) noexcept nogil:
    cdef const double *psi = <const double *> state
    cdef Py_ssize_t dim = 1 << n
    cdef Py_ssize_t stride = 1 << (n - 1 - q)
    cdef double total = 0.0
    cdef Py_ssize_t blk, k, i
    blk = 0
    while blk < dim:
        for k in range(stride):
            i = 2 * (blk + k)
            total += psi[i] * psi[i] + psi[i + 1] * psi[i + 1]
            i += 2 * stride
            total -= psi[i] * psi[i] + psi[i + 1] * psi[i + 1]
        blk += 2 * stride
    return total


def apply_gates(double complex[:, ::1] states, int n_qubits,
                int[::1] kinds, int[::1] q0, int[::1] q1, double[::1] angles):
    """Apply a gate list to every row of ``states`` in place."""
    cdef Py_ssize_t n_states = states.shape[0]
    cdef Py_ssize_t n_gates = kinds.shape[0]
    cdef Py_ssize_t b, g
    half_c = np.cos(0.5 * np.asarray(angles))
    half_s = np.sin(0.5 * np.asarray(angles))
    cdef double[::1] hc = half_c
    cdef double[::1] hs = half_s
    with nogil:
        for b in range(n_states):
            for g in range(n_gates):
                _apply(&states[b, 0], n_qubits, kinds[g], q0[g], q1[g], hc[g], hs[g])


def expect_z(const double complex[:, ::1] states, int n_qubits, int qubit):
    cdef Py_ssize_t n_states = states.shape[0]
    out = np.empty(n_states, dtype=np.float64)
    cdef double[::1] out_view = out
    cdef Py_ssize_t b
    with nogil:
        for b in range(n_states):
            out_view[b] = _expect_z(&states[b, 0], n_qubits, qubit)
    return out


def expect_and_shift_grad(const double complex[:, ::1] states, int n_qubits,
                          int[::1] kinds, int[::1] q0, int[::1] q1,
                          double[::1] angles, int readout):
    """Readout expectation and its parameter-shift derivative per rotation.

    Returns ``(expect, grad)`` with shapes ``(B,)`` and ``(P, B)`` where P is
    the number of rotation gates, in circuit order. The state entering each
    rotation is cached on the forward pass so each shifted evaluation only
    replays the suffix of the circuit.
    """
    cdef Py_ssize_t n_states = states.shape[0]
    cdef Py_ssize_t dim = states.shape[1]
    cdef Py_ssize_t n_gates = kinds.shape[0]
    cdef Py_ssize_t n_params = 0
    cdef Py_ssize_t g, b, p, h
    cdef int sign
    for g in range(n_gates):
        if kinds[g] != CNOT:
            n_params += 1

    expect = np.empty(n_states, dtype=np.float64)
    grad = np.zeros((n_params, n_states), dtype=np.float64)
    cdef double[::1] e_view = expect
    cdef double[:, ::1] g_view = grad
    positions_arr = np.empty(max(n_params, 1), dtype=np.intp)
    cdef Py_ssize_t[::1] positions = positions_arr
    prefix_arr = np.empty((max(n_params, 1), dim), dtype=np.complex128)
    cdef double complex[:, ::1] prefix = prefix_arr
    work_arr = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] work = work_arr
    shifted_arr = np.empty(dim, dtype=np.complex128)
    cdef double complex[::1] shifted = shifted_arr
    cdef double vals[2]
    cdef size_t nbytes = dim * sizeof(double complex)
    half = 0.5 * np.asarray(angles)
    # shifting theta by +-pi/2 shifts the half angle by +-pi/4
    trig_arr = np.stack([np.cos(half), np.sin(half),
                         np.cos(half + 0.25 * np.pi), np.sin(half + 0.25 * np.pi),
                         np.cos(half - 0.25 * np.pi), np.sin(half - 0.25 * np.pi)])
    cdef double[:, ::1] trig = np.ascontiguousarray(trig_arr)

    p = 0
    for g in range(n_gates):
        if kinds[g] != CNOT:
            positions[p] = g
            p += 1

    with nogil:
        for b in range(n_states):
            memcpy(&work[0], &states[b, 0], nbytes)
            p = 0
            for g in range(n_gates):
                if kinds[g] != CNOT:
                    memcpy(&prefix[p, 0], &work[0], nbytes)
                    p += 1
                _apply(&work[0], n_qubits, kinds[g], q0[g], q1[g], trig[0, g], trig[1, g])
            e_view[b] = _expect_z(&work[0], n_qubits, readout)

            for p in range(n_params):
                g = positions[p]
                for sign in range(2):
                    memcpy(&shifted[0], &prefix[p, 0], nbytes)
                    _rotation(&shifted[0], n_qubits, kinds[g], q0[g],
                              trig[2 + 2 * sign, g], trig[3 + 2 * sign, g])
                    for h in range(g + 1, n_gates):
                        _apply(&shifted[0], n_qubits, kinds[h], q0[h], q1[h], trig[0, h], trig[1, h])
                    vals[sign] = _expect_z(&shifted[0], n_qubits, readout)
                g_view[p, b] = 0.5 * (vals[0] - vals[1])
    return expect, grad
