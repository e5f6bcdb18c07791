"""Dense complex linear algebra for small bipartite operators."""
from dataclasses import dataclass

import numpy as np

from .validation import (PSD_TOL, check_dims, check_hermitian, check_matrix,
                         check_same_shape, check_square)


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigen-decomposition of a Hermitian matrix.

    Eigenvalues ascend. Each eigenvector column has its first nonzero
    component rotated to be real and positive, so results are reproducible.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def kron(A, B):
    return np.kron(check_matrix(A, "A"), check_matrix(B, "B"))


def _side(which):
    w = str(which).upper()
    if w not in ("A", "B"):
        raise ValueError(f"subsystem must be 'A' or 'B', got {which!r}")
    return w


def partial_trace(rho, dims=None, which="B"):
    """Trace out one subsystem of a bipartite operator.

    ``which`` names the subsystem that is traced *out*; the reduced operator
    on the other party is returned.
    """
    rho = check_square(rho, "rho")
    dA, dB = check_dims(dims, rho.shape[0])
    t = rho.reshape(dA, dB, dA, dB)
    if _side(which) == "B":
        return np.einsum("ijkj->ik", t)
    return np.einsum("ijil->jl", t)


def partial_transpose(rho, dims=None, which="A"):
    """Partial transpose with <ij|rho|kl> -> <kj|rho^TA|il> (or j<->l for B)."""
    rho = check_square(rho, "rho")
    dA, dB = check_dims(dims, rho.shape[0])
    t = rho.reshape(dA, dB, dA, dB)
    if _side(which) == "A":
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(dA * dB, dA * dB)


def fix_phases(V, tol=1e-12):
    """Rotate each column so its first component above ``tol`` is real positive."""
    V = np.array(V, dtype=complex)
    for j in range(V.shape[1]):
        col = V[:, j]
        idx = np.flatnonzero(np.abs(col) > tol)
        if idx.size:
            z = col[idx[0]]
            V[:, j] = col * (abs(z) / z)
    return V


def hermitian_eigs(H, tol=1e-10):
    H = check_hermitian(H, tol)
    # symmetrise before handing off to LAPACK so tiny asymmetries do not leak
    H = 0.5 * (H + H.conj().T)
    vals, vecs = np.linalg.eigh(H)
    return HermitianSpectrum(vals, fix_phases(vecs))


def hs_inner(A, B):
    A, B = check_same_shape(A, B)
    return complex(np.vdot(A, B))


def hs_norm(A):
    A = check_matrix(A, "A")
    return float(np.sqrt(np.vdot(A, A).real))


def min_eig(H):
    H = check_hermitian(H)
    return float(np.linalg.eigvalsh(0.5 * (H + H.conj().T))[0])


def is_psd(H, tol=PSD_TOL):
    return min_eig(H) >= -tol


def random_unitary(d, rng):
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    Z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def random_density(d, rng, rank=None):
    """Random density matrix; full rank unless ``rank`` is given."""
    rank = d if rank is None else rank
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def random_hermitian(d, rng):
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (G + G.conj().T)


def bisect_root(f, lo, hi, tol=1e-12, max_iter=200):
    """Root of a scalar function with a sign change on [lo, hi] by bisection."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0 or hi - lo < tol:
            return mid
        if np.sign(fm) == np.sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)
