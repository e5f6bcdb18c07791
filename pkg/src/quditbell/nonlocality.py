"""CHSH and CGLMP Bell inequalities.

Measurement bases are stored as unitaries whose columns are the basis
vectors: column k of ``A1`` is the outcome-k eigenvector of Alice's first
measurement.
"""
from dataclasses import dataclass

import numpy as np

from .bases import PAULIS
from .matcore import bisect_root
from .validation import check_dimension, check_square, check_unitary

CHSH_LOCAL_BOUND = 2.0
I_LOCAL_BOUND = 3.0
ID_LOCAL_BOUND = 2.0


# --- CHSH ----------------------------------------------------------------

def _unit3(v, name):
    v = np.asarray(v, dtype=float).reshape(3)
    if abs(np.linalg.norm(v) - 1) > 1e-9:
        raise ValueError(f"{name} must be a unit 3-vector")
    return v


def spin_operator(n):
    """n . sigma"""
    return sum(n[i] * PAULIS[i] for i in range(3))


def chsh_operator(a, a2, b, b2):
    """a.s x (b - b').s + a'.s x (b + b').s"""
    a, a2, b, b2 = (_unit3(v, nm) for v, nm in zip((a, a2, b, b2), ("a", "a'", "b", "b'")))
    return (np.kron(spin_operator(a), spin_operator(b - b2))
            + np.kron(spin_operator(a2), spin_operator(b + b2)))


def chsh_value(rho, a, a2, b, b2):
    rho = check_square(rho, "rho")
    if rho.shape != (4, 4):
        raise ValueError("CHSH needs a two-qubit state")
    return abs(float(np.trace(rho @ chsh_operator(a, a2, b, b2)).real))


def correlation_matrix(rho):
    """T_nm = Tr(rho sigma_n x sigma_m)"""
    rho = check_square(rho, "rho")
    return np.array([[np.trace(rho @ np.kron(P, Q)).real for Q in PAULIS] for P in PAULIS])


def horodecki_max_chsh(rho):
    """Largest CHSH value over all settings: 2 sqrt(l1 + l2) with l1, l2 the top
    eigenvalues of T^T T."""
    T = correlation_matrix(rho)
    lam = np.linalg.eigvalsh(T.T @ T)
    return float(2 * np.sqrt(max(lam[-1] + lam[-2], 0.0)))


def werner_chsh_threshold(tol=1e-12):
    """Singlet weight p above which the qubit Werner state violates CHSH."""
    from .states import werner_qubit
    return bisect_root(lambda p: horodecki_max_chsh(werner_qubit(p).density().matrix) - CHSH_LOCAL_BOUND,
                       0.0, 1.0, tol)


def singlet_correlation(a, b):
    return -float(np.dot(_unit3(a, "a"), _unit3(b, "b")))


def pr_box_table(flip=False):
    """P[x, y, a, b] for the PR box: a + b = x y (mod 2), uniformly random."""
    P = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    target = (x * y + flip) % 2
                    if (a + b) % 2 == target:
                        P[x, y, a, b] = 0.5
    return P


def pr_box_chsh(flip=False):
    P = pr_box_table(flip)
    sign = np.array([[1, -1], [-1, 1]])
    E = np.einsum("xyab,ab->xy", P, sign)
    return float(E[0, 0] + E[0, 1] + E[1, 0] - E[1, 1])


# --- CGLMP ---------------------------------------------------------------

@dataclass(frozen=True)
class MeasurementSettings:
    d: int
    A1: np.ndarray
    A2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray

    def __post_init__(self):
        for name in ("A1", "A2", "B1", "B2"):
            U = check_unitary(getattr(self, name), tol=1e-10, name=name)
            if U.shape != (self.d, self.d):
                raise ValueError(f"{name} must be {self.d}x{self.d}")
            object.__setattr__(self, name, U)

    def alice(self, a):
        return (self.A1, self.A2)[a]

    def bob(self, b):
        return (self.B1, self.B2)[b]

    def as_dict(self):
        out = {"d": self.d}
        for name in ("A1", "A2", "B1", "B2"):
            U = getattr(self, name)
            out[name] = [[[z.real, z.imag] for z in row] for row in U]
        return out


ALICE_PHASES = (0.0, 0.5)
BOB_PHASES = (0.25, -0.25)


def analytic_settings(d):
    """Fourier-type bases: |k>_Aa = sum_s exp(2 pi i s (k + alpha_a) / d) |s> / sqrt(d),
    |l>_Bb = sum_s exp(2 pi i s (-l + beta_b) / d) |s> / sqrt(d)."""
    d = check_dimension(d)
    s = np.arange(d)[:, None]
    k = np.arange(d)[None, :]
    A = [np.exp(2j * np.pi * s * (k + al) / d) / np.sqrt(d) for al in ALICE_PHASES]
    B = [np.exp(2j * np.pi * s * (-k + be) / d) / np.sqrt(d) for be in BOB_PHASES]
    return MeasurementSettings(d, A[0], A[1], B[0], B[1])


def joint_probabilities(rho, settings):
    """P[a, b, k, l] = P(A_a = k, B_b = l)."""
    rho = check_square(rho, "rho")
    d = settings.d
    if rho.shape[0] != d * d:
        raise ValueError("state and settings dimensions differ")
    P = np.empty((2, 2, d, d))
    for a in range(2):
        for b in range(2):
            U = np.kron(settings.alice(a), settings.bob(b))
            P[a, b] = np.real(np.einsum("ij,ik,kj->j", U.conj(), rho, U)).reshape(d, d)
    return P


def cglmp_joint_prob(rho, settings, a, b, k, l):
    d = settings.d
    if a not in (0, 1) or b not in (0, 1) or not (0 <= k < d and 0 <= l < d):
        raise IndexError("measurement or outcome index out of range")
    va = settings.alice(a)[:, k]
    vb = settings.bob(b)[:, l]
    v = np.kron(va, vb)
    return float(np.real(v.conj() @ np.asarray(rho) @ v))


def prob_diff(P, k):
    """P(A = B + k) from a d x d joint table P[A, B]."""
    d = P.shape[0]
    j = np.arange(d)
    return float(P[(j + k) % d, j].sum())


def _terms(probs):
    """Helpers returning P(A_a = B_b + k) and P(B_b = A_a + k)."""
    def pa(a, b, k):
        return prob_diff(probs[a, b], k)

    def pb(b, a, k):
        return prob_diff(probs[a, b].T, k)
    return pa, pb


def cglmp_I_from_probs(probs):
    pa, pb = _terms(probs)
    return pa(0, 0, 0) + pb(0, 1, 1) + pa(1, 1, 0) + pb(1, 0, 0)


def cglmp_Id_from_probs(probs):
    d = probs.shape[-1]
    pa, pb = _terms(probs)
    total = 0.0
    for k in range(d // 2):
        weight = 1 - 2 * k / (d - 1)
        plus = pa(0, 0, k) + pb(0, 1, k + 1) + pa(1, 1, k) + pb(1, 0, k)
        minus = pa(0, 0, -k - 1) + pb(0, 1, -k) + pa(1, 1, -k - 1) + pb(1, 0, -k - 1)
        total += weight * (plus - minus)
    return total


def cglmp_I(rho, settings):
    return cglmp_I_from_probs(joint_probabilities(rho, settings))


def cglmp_Id(rho, settings):
    return cglmp_Id_from_probs(joint_probabilities(rho, settings))


def chsh_from_probs(probs):
    """E(A1,B1) - E(A2,B1) + E(A2,B2) + E(A1,B2) for two-outcome tables,
    with outcome k mapped to (-1)^k."""
    sign = np.array([[1, -1], [-1, 1]])
    E = np.einsum("abkl,kl->ab", probs, sign)
    return float(E[0, 0] - E[1, 0] + E[1, 1] + E[0, 1])


def deterministic_probs(d, A1, A2, B1, B2):
    """Probability tables of the local deterministic strategy with fixed outcomes."""
    P = np.zeros((2, 2, d, d))
    for a, x in enumerate((A1, A2)):
        for b, y in enumerate((B1, B2)):
            P[a, b, x % d, y % d] = 1.0
    return P


def lhv_f(x, d):
    """Per-term contribution of a deterministic strategy to I_d.

    x is a difference of outcomes reduced to [-floor(d/2), floor((d-1)/2)].
    """
    if x >= 0:
        return -2 * x / (d - 1) + 1
    return -2 * x / (d - 1) - (d + 1) / (d - 1)


def centered_mod(x, d):
    """Representative of x mod d in [-floor(d/2), floor((d-1)/2)]."""
    r = x % d
    return r - d if r > (d - 1) // 2 else r


def lhv_Id(d, A1, A2, B1, B2):
    """I_d of a deterministic strategy written as f(r)+f(s)+f(t)+f(u)."""
    r = centered_mod(A1 - B1, d)
    s = centered_mod(B1 - A2 - 1, d)
    t = centered_mod(A2 - B2, d)
    u = centered_mod(B2 - A1, d)
    return sum(lhv_f(x, d) for x in (r, s, t, u))


def omega00_closed_form(d, a, b, k, l):
    """P(A_a=k, B_b=l) for |Omega_00> under the analytic settings."""
    x = np.pi * (k - l + ALICE_PHASES[a] + BOB_PHASES[b]) / d
    return 1.0 / (2 * d ** 3 * np.sin(x) ** 2)


# --- Bell operators ------------------------------------------------------

@dataclass(frozen=True)
class BellOperator:
    d: int
    matrix: np.ndarray
    kind: str

    def expectation(self, rho):
        return float(np.trace(np.asarray(rho) @ self.matrix).real)

    def max_eigen(self):
        vals, vecs = np.linalg.eigh(self.matrix)
        return float(vals[-1]), vecs[:, -1]


def _proj(U, k):
    v = U[:, k]
    return np.outer(v, v.conj())


def bell_operator(settings, kind="I_d"):
    """Operator B with Tr(rho B) equal to the chosen CGLMP score.

    Built from sums of projector products, separately from the
    probability-table route used by :func:`cglmp_Id`.
    """
    d = settings.d
    B = np.zeros((d * d, d * d), dtype=complex)

    def alice_ahead(a, b, k, c):
        # c * sum over outcomes with A_a = B_b + k
        nonlocal B
        for j in range(d):
            B += c * np.kron(_proj(settings.alice(a), (j + k) % d), _proj(settings.bob(b), j))

    def bob_ahead(b, a, k, c):
        nonlocal B
        for j in range(d):
            B += c * np.kron(_proj(settings.alice(a), j), _proj(settings.bob(b), (j + k) % d))

    if kind == "I":
        alice_ahead(0, 0, 0, 1)
        bob_ahead(0, 1, 1, 1)
        alice_ahead(1, 1, 0, 1)
        bob_ahead(1, 0, 0, 1)
    elif kind == "I_d":
        for k in range(d // 2):
            c = 1 - 2 * k / (d - 1)
            alice_ahead(0, 0, k, c)
            bob_ahead(0, 1, k + 1, c)
            alice_ahead(1, 1, k, c)
            bob_ahead(1, 0, k, c)
            alice_ahead(0, 0, -k - 1, -c)
            bob_ahead(0, 1, -k, -c)
            alice_ahead(1, 1, -k - 1, -c)
            bob_ahead(1, 0, -k - 1, -c)
    else:
        raise ValueError(f"unknown Bell operator kind {kind!r}")
    return BellOperator(d, B, kind)


def chsh_bell_operator(a, a2, b, b2):
    return BellOperator(2, chsh_operator(a, a2, b, b2), "CHSH")


def omega00_values(d):
    """(I, I_d) of |Omega_00> under the analytic settings."""
    from .states import bell_projector
    rho = bell_projector(d, 0, 0)
    st = analytic_settings(d)
    P = joint_probabilities(rho, st)
    return cglmp_I_from_probs(P), cglmp_Id_from_probs(P)


def noise_threshold(d, kind="I_d"):
    """Largest white-noise fraction r for which (1-r)|Omega_00><Omega_00| + r I/d^2
    still violates the local bound under the analytic settings."""
    I0, Id0 = omega00_values(d)
    if kind == "I_d":
        # noise contributes 0 to I_d
        return 1 - ID_LOCAL_BOUND / Id0
    if kind == "I":
        # noise contributes 4/d to I
        return (I0 - I_LOCAL_BOUND) / (I0 - 4.0 / d)
    raise ValueError(f"unknown kind {kind!r}")
