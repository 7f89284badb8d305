# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled frame assembly kernel; same contract as ``_assembly_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def assemble_arrays(const double[:, ::1] coords, const long long[:, ::1] conn, const double[::1] E, const double[::1] G,
                    const double[::1] alpha, const double[::1] A, const double[::1] I, const double[::1] kappa, double delta_t):
    cdef Py_ssize_t n_dof = 3 * coords.shape[0]
    cdef Py_ssize_t m = conn.shape[0]
    K_arr = np.zeros((n_dof, n_dof))
    F_arr = np.zeros(n_dof)
    cdef double[:, ::1] K = K_arr
    cdef double[::1] F = F_arr
    cdef double kl[6][6]
    cdef double kg[6][6]
    cdef double T[6][6]
    cdef double tmp[6][6]
    cdef Py_ssize_t dofs[6]
    cdef Py_ssize_t e, i, j, q, na, nb
    cdef double dx, dy, l, c, s, phi, ea, b, N, acc

    for e in range(m):
        na = conn[e, 0]
        nb = conn[e, 1]
        dx = coords[nb, 0] - coords[na, 0]
        dy = coords[nb, 1] - coords[na, 1]
        l = sqrt(dx * dx + dy * dy)
        c = dx / l
        s = dy / l
        phi = 12.0 * E[e] * I[e] / (kappa[e] * G[e] * A[e] * l * l)
        ea = E[e] * A[e] / l
        b = E[e] * I[e] / (l * l * l * (1.0 + phi))

        for i in range(6):
            for j in range(6):
                kl[i][j] = 0.0
                T[i][j] = 0.0
        kl[0][0] = ea
        kl[3][3] = ea
        kl[0][3] = -ea
        kl[3][0] = -ea
        kl[1][1] = 12 * b
        kl[1][2] = 6 * l * b
        kl[1][4] = -12 * b
        kl[1][5] = 6 * l * b
        kl[2][2] = (4 + phi) * l * l * b
        kl[2][4] = -6 * l * b
        kl[2][5] = (2 - phi) * l * l * b
        kl[4][4] = 12 * b
        kl[4][5] = -6 * l * b
        kl[5][5] = (4 + phi) * l * l * b
        for i in range(6):
            for j in range(i):
                kl[i][j] = kl[j][i]

        for q in range(0, 6, 3):
            T[q][q] = c
            T[q][q + 1] = s
            T[q + 1][q] = -s
            T[q + 1][q + 1] = c
            T[q + 2][q + 2] = 1.0

        # kg = T^T kl T
        for i in range(6):
            for j in range(6):
                acc = 0.0
                for q in range(6):
                    acc += kl[i][q] * T[q][j]
                tmp[i][j] = acc
        for i in range(6):
            for j in range(6):
                acc = 0.0
                for q in range(6):
                    acc += T[q][i] * tmp[q][j]
                kg[i][j] = acc

        for i in range(3):
            dofs[i] = 3 * na + i
            dofs[i + 3] = 3 * nb + i
        for i in range(6):
            for j in range(6):
                K[dofs[i], dofs[j]] += kg[i][j]

        if delta_t != 0.0:
            N = E[e] * A[e] * alpha[e] * delta_t
            F[dofs[0]] -= N * c
            F[dofs[1]] -= N * s
            F[dofs[3]] += N * c
            F[dofs[4]] += N * s

    return K_arr, F_arr
