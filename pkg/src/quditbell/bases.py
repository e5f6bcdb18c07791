"""Operator bases (Pauli, generalized Gell-Mann, Weyl) and Bloch coordinates.

Element orderings are fixed so that coefficient vectors index stably:

* ``pauli``: sigma_x, sigma_y, sigma_z
* ``gellmann``: symmetric block over (j, k) with j < k in lexicographic
  order, then the antisymmetric block in the same order, then the diagonal
  matrices for l = 0 .. d-2
* ``weyl``: W_{k,l} over the (k, l) grid in row-major order, skipping (0, 0)
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .validation import check_dimension, check_square

KINDS = ("pauli", "gellmann", "weyl")

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True)
class OperatorBasis:
    dim: int
    kind: str
    elements: tuple
    labels: tuple = ()

    @property
    def identity(self):
        return np.eye(self.dim, dtype=complex)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def norms_sq(self):
        return np.array([np.vdot(G, G).real for G in self.elements])


@dataclass(frozen=True)
class BlochVector:
    """Coefficients a_i with rho = I/d + sum_i a_i Gamma_i."""
    kind: str
    dim: int
    coefficients: np.ndarray

    def norm(self):
        return float(np.linalg.norm(self.coefficients))

    def weyl_grid(self):
        """Weyl coefficients laid out on a d x d grid, (0, 0) holding 1/d."""
        if self.kind != "weyl":
            raise ValueError("weyl_grid needs a weyl-kind Bloch vector")
        d = self.dim
        g = np.empty(d * d, dtype=complex)
        g[0] = 1.0 / d
        g[1:] = self.coefficients
        return g.reshape(d, d)


@dataclass(frozen=True)
class TwoQubitBloch:
    r: np.ndarray
    s: np.ndarray
    T: np.ndarray

    def total_sq(self):
        return float(self.r @ self.r + self.s @ self.s + np.sum(self.T ** 2))


def pauli_basis():
    return OperatorBasis(2, "pauli", PAULIS, ("x", "y", "z"))


@lru_cache(maxsize=None)
def _gellmann(d):
    sym, asym, labels_s, labels_a = [], [], [], []
    for j in range(d):
        for k in range(j + 1, d):
            S = np.zeros((d, d), dtype=complex)
            S[j, k] = S[k, j] = 1
            A = np.zeros((d, d), dtype=complex)
            A[j, k] = -1j
            A[k, j] = 1j
            sym.append(S)
            asym.append(A)
            labels_s.append(f"s{j}{k}")
            labels_a.append(f"a{j}{k}")
    diag, labels_d = [], []
    for l in range(d - 1):
        v = np.zeros(d)
        v[: l + 1] = 1
        v[l + 1] = -(l + 1)
        diag.append(np.diag(np.sqrt(2.0 / ((l + 1) * (l + 2))) * v).astype(complex))
        labels_d.append(f"d{l}")
    elems = tuple(sym + asym + diag)
    for E in elems:
        E.setflags(write=False)
    return OperatorBasis(d, "gellmann", elems, tuple(labels_s + labels_a + labels_d))


def gellmann_basis(d):
    return _gellmann(check_dimension(d))


def symmetric_gellmann(d, j, k):
    return _gellmann(d).elements[_pair_index(d, j, k)]


def antisymmetric_gellmann(d, j, k):
    return _gellmann(d).elements[d * (d - 1) // 2 + _pair_index(d, j, k)]


def diagonal_gellmann(d, l):
    return _gellmann(d).elements[d * (d - 1) + l]


def _pair_index(d, j, k):
    if not 0 <= j < k < d:
        raise ValueError(f"need 0 <= j < k < d, got j={j}, k={k}")
    # position of (j,k) in the lexicographic list of pairs
    return j * d - j * (j + 1) // 2 + (k - j - 1)


def weyl_operator(d, k, l):
    """W_{k,l} = sum_s w^{s k} |s><s+l| with w = exp(2 pi i / d)."""
    d = check_dimension(d)
    k %= d
    l %= d
    s = np.arange(d)
    W = np.zeros((d, d), dtype=complex)
    W[s, (s + l) % d] = np.exp(2j * np.pi * s * k / d)
    return W


@lru_cache(maxsize=None)
def _weyl(d):
    elems, labels = [], []
    for k in range(d):
        for l in range(d):
            if k == 0 and l == 0:
                continue
            W = weyl_operator(d, k, l)
            W.setflags(write=False)
            elems.append(W)
            labels.append((k, l))
    return OperatorBasis(d, "weyl", tuple(elems), tuple(labels))


def weyl_basis(d):
    return _weyl(check_dimension(d))


def get_basis(kind, d):
    if kind == "pauli":
        if d != 2:
            raise ValueError("pauli basis only exists for d = 2")
        return pauli_basis()
    if kind == "gellmann":
        return gellmann_basis(d)
    if kind == "weyl":
        return weyl_basis(d)
    raise ValueError(f"unknown basis kind {kind!r}")


def bloch_decompose(rho, basis):
    rho = check_square(rho, "rho")
    if rho.shape[0] != basis.dim:
        raise ValueError(f"state dimension {rho.shape[0]} does not match basis dimension {basis.dim}")
    E = np.array(basis.elements)
    # a_i = <G_i, rho> / <G_i, G_i>
    coeffs = np.einsum("nij,ij->n", E.conj(), rho) / basis.norms_sq()
    if basis.kind != "weyl":
        coeffs = coeffs.real
    return BlochVector(basis.kind, basis.dim, coeffs)


def bloch_reconstruct(b, basis=None):
    basis = get_basis(b.kind, b.dim) if basis is None else basis
    E = np.array(basis.elements)
    return np.eye(b.dim, dtype=complex) / b.dim + np.einsum("n,nij->ij", b.coefficients, E)


def weyl_hermiticity_defect(b):
    """Max deviation from b_{-k,-l} = w^{kl} conj(b_{k,l}) over the grid."""
    d = b.dim
    g = b.weyl_grid()
    k, l = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
    lhs = g[(-k) % d, (-l) % d]
    rhs = np.exp(2j * np.pi * k * l / d) * g.conj()
    return float(np.max(np.abs(lhs - rhs)))


def bloch_norm_bound(kind, d):
    """Largest Bloch norm allowed by Tr rho^2 <= 1 for the given basis kind."""
    if kind == "weyl":
        return np.sqrt(d - 1) / d
    return np.sqrt((d - 1) / (2 * d))


def twoqubit_bloch(rho):
    """Local Bloch vectors and correlation matrix of a two-qubit operator.

    r_i = Tr(sigma_i x I rho), s_i = Tr(I x sigma_i rho),
    T_nm = Tr(sigma_n x sigma_m rho).
    """
    rho = check_square(rho, "rho")
    if rho.shape != (4, 4):
        raise ValueError(f"two-qubit operator must be 4x4, got {rho.shape}")
    I2 = np.eye(2)
    r = np.array([np.trace(np.kron(P, I2) @ rho).real for P in PAULIS])
    s = np.array([np.trace(np.kron(I2, P) @ rho).real for P in PAULIS])
    T = np.array([[np.trace(np.kron(P, Q) @ rho).real for Q in PAULIS] for P in PAULIS])
    return TwoQubitBloch(r, s, T)


def twoqubit_from_bloch(b):
    I2 = np.eye(2)
    rho = np.eye(4, dtype=complex)
    for i, P in enumerate(PAULIS):
        rho = rho + b.r[i] * np.kron(P, I2) + b.s[i] * np.kron(I2, P)
        for j, Q in enumerate(PAULIS):
            rho = rho + b.T[i, j] * np.kron(P, Q)
    return rho / 4
