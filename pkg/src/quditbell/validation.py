"""Input validation helpers, in the spirit of ``sklearn.utils.validation``.

Every public entry point that accepts a matrix funnels it through one of the
``check_*`` functions below so that malformed input fails early with a
``ValueError`` instead of producing silently wrong numbers.
"""
import math

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10


def check_matrix(A, name="matrix"):
    """Return ``A`` as a finite 2-D complex ndarray."""
    A = np.asarray(A)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf")
    return A.astype(complex, copy=False)


def check_square(A, name="matrix"):
    A = check_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def check_same_shape(A, B):
    A = check_matrix(A, "A")
    B = check_matrix(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    return A, B


def check_hermitian(H, tol=HERMITIAN_TOL, name="matrix"):
    H = check_square(H, name)
    dev = np.max(np.abs(H - H.conj().T)) if H.size else 0.0
    if dev > tol:
        raise ValueError(f"{name} is not Hermitian (max deviation {dev:.3g})")
    return H


def check_dims(dims, size=None):
    """Validate a bipartite dimension pair against a matrix size.

    ``dims=None`` infers an equal split, which requires ``size`` to be a
    perfect square.
    """
    if dims is None:
        if size is None:
            raise ValueError("dims required when size is unknown")
        d = math.isqrt(size)
        if d * d != size:
            raise ValueError(f"cannot infer equal dims for size {size}")
        return (d, d)
    dims = tuple(int(x) for x in dims)
    if len(dims) != 2 or min(dims) < 1:
        raise ValueError(f"dims must be two positive integers, got {dims}")
    if size is not None and dims[0] * dims[1] != size:
        raise ValueError(f"dims {dims} do not match matrix size {size}")
    return dims


def check_density_matrix(rho, dims=None, tol=1e-8, name="rho"):
    """Check that ``rho`` is a unit-trace PSD Hermitian matrix.

    Returns ``(rho, dims)`` with dims resolved.
    """
    rho = check_hermitian(rho, name=name)
    dims = check_dims(dims, rho.shape[0])
    tr = np.trace(rho).real
    if abs(tr - 1.0) > tol:
        raise ValueError(f"{name} has trace {tr:.6g}, expected 1")
    lo = np.linalg.eigvalsh(rho)[0]
    if lo < -tol:
        raise ValueError(f"{name} is not positive semidefinite (min eig {lo:.3g})")
    return rho, dims


def check_unitary(U, tol=1e-9, name="U"):
    U = check_square(U, name)
    dev = np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0])))
    if dev > tol:
        raise ValueError(f"{name} is not unitary (deviation {dev:.3g})")
    return U


def check_dimension(d, minimum=2, name="d"):
    if int(d) != d or d < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {d}")
    return int(d)


def check_random_state(seed):
    """Turn ``seed`` into a ``np.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
