"""Vectorised numpy implementation of the frame assembly kernel."""
import numpy as np


def element_matrices(coords, conn, E, G, A, I, kappa):
    """Global-axis 6x6 stiffness for every element, shape (m, 6, 6)."""
    d = coords[conn[:, 1]] - coords[conn[:, 0]]
    length = np.hypot(d[:, 0], d[:, 1])
    c = d[:, 0] / length
    s = d[:, 1] / length
    phi = 12.0 * E * I / (kappa * G * A * length**2)
    ea = E * A / length
    b = E * I / (length**3 * (1.0 + phi))
    l = length

    k = np.zeros((len(l), 6, 6))
    k[:, 0, 0] = k[:, 3, 3] = ea
    k[:, 0, 3] = k[:, 3, 0] = -ea
    bend = np.stack(
        [
            np.stack([12 * b, 6 * l * b, -12 * b, 6 * l * b], -1),
            np.stack([6 * l * b, (4 + phi) * l**2 * b, -6 * l * b, (2 - phi) * l**2 * b], -1),
            np.stack([-12 * b, -6 * l * b, 12 * b, -6 * l * b], -1),
            np.stack([6 * l * b, (2 - phi) * l**2 * b, -6 * l * b, (4 + phi) * l**2 * b], -1),
        ],
        1,
    )
    idx = np.array([1, 2, 4, 5])
    k[:, idx[:, None], idx[None, :]] = bend

    T = np.zeros((len(l), 6, 6))
    for o in (0, 3):
        T[:, o, o] = c
        T[:, o, o + 1] = s
        T[:, o + 1, o] = -s
        T[:, o + 1, o + 1] = c
        T[:, o + 2, o + 2] = 1.0
    return np.einsum("eji,ejk,ekl->eil", T, k, T), c, s


def assemble_arrays(coords, conn, E, G, alpha, A, I, kappa, delta_t):
    n_dof = 3 * coords.shape[0]
    ke, c, s = element_matrices(coords, conn, E, G, A, I, kappa)
    dofs = np.concatenate([3 * conn[:, :1] + np.arange(3), 3 * conn[:, 1:] + np.arange(3)], axis=1)
    K = np.zeros((n_dof, n_dof))
    np.add.at(K, (dofs[:, :, None], dofs[:, None, :]), ke)

    F = np.zeros(n_dof)
    if delta_t != 0.0:
        N = E * A * alpha * delta_t
        fe = np.zeros((len(N), 6))
        fe[:, 0] = -N * c
        fe[:, 1] = -N * s
        fe[:, 3] = N * c
        fe[:, 4] = N * s
        np.add.at(F, dofs, fe)
    return K, F
