"""Locally maximally mixed two-qubit states as points t = (t11, t22, t33).

rho(t) = (I + sum_i t_i sigma_i x sigma_i) / 4. Valid states fill a
tetrahedron with the four Bell states at its corners, separable ones the
octahedron |t1| + |t2| + |t3| <= 1, and CHSH violators lie outside the
three unit cylinders around the coordinate axes.
"""
import numpy as np

from .bases import PAULIS

BOUNDARY_TOL = 1e-12

# corners of the tetrahedron
BELL_T = {
    "psi+": np.array([1.0, 1.0, -1.0]),
    "psi-": np.array([-1.0, -1.0, -1.0]),
    "phi+": np.array([1.0, -1.0, 1.0]),
    "phi-": np.array([-1.0, 1.0, 1.0]),
}


def _t(t):
    t = np.asarray(t, dtype=float).reshape(3)
    if not np.all(np.isfinite(t)):
        raise ValueError("t must be finite")
    return t


def tetra_slacks(t):
    t1, t2, t3 = _t(t)
    return np.array([
        1 + t1 + t2 - t3,
        1 - t1 - t2 - t3,
        1 + t1 - t2 + t3,
        1 - t1 + t2 + t3,
    ])


def tetra_membership(t, tol=BOUNDARY_TOL):
    """(inside, slacks) for the four facet inequalities."""
    s = tetra_slacks(t)
    return bool(np.all(s >= -tol)), s


def octahedron_membership(t, tol=BOUNDARY_TOL):
    return bool(np.abs(_t(t)).sum() <= 1 + tol)


def cylinder_violation(t, tol=BOUNDARY_TOL):
    """(violates CHSH, largest pairwise t_i^2 + t_j^2)."""
    sq = _t(t) ** 2
    m = max(sq[0] + sq[1], sq[0] + sq[2], sq[1] + sq[2])
    return bool(m > 1 + tol), float(m)


def lmm_state(t):
    t = _t(t)
    rho = np.eye(4, dtype=complex)
    for ti, P in zip(t, PAULIS):
        rho = rho + ti * np.kron(P, P)
    return rho / 4


def sample_tetrahedron(n, rng):
    """Uniform points inside the tetrahedron via Dirichlet weights on its corners."""
    corners = np.array(list(BELL_T.values()))
    w = rng.dirichlet(np.ones(4), size=n)
    return w @ corners
