"""Entanglement detection criteria.

Covers the partial-transpose (PPT), reduction and realignment criteria for
general bipartite states, the block decomposition of the partial transpose
of Bell-diagonal states, the enclosure and kernel polytopes, and Bell-diagonal
entanglement witnesses.
"""
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import linprog

from .bases import weyl_operator
from .matcore import bisect_root, min_eig, partial_trace, partial_transpose
from .states import SimplexState, bell_projector, complete_lines
from .validation import check_dims, check_square

ENTANGLED = "entangled"
INCONCLUSIVE = "inconclusive"


@dataclass
class DetectionReport:
    ppt_min_eig: float
    reduction_min_eig_A: float
    reduction_min_eig_B: float
    realignment_norm: float
    verdicts: dict = field(default_factory=dict)

    @property
    def entangled(self):
        return any(v == ENTANGLED for v in self.verdicts.values())

    def to_dict(self):
        return asdict(self)


def ppt_report(rho, dims=None):
    """Smallest eigenvalue of the partial transpose; negative means entangled."""
    rho = check_square(rho, "rho")
    return min_eig(partial_transpose(rho, check_dims(dims, rho.shape[0]), "A"))


def reduction_report(rho, dims=None):
    """Min eigenvalues of rho_A x I - rho and I x rho_B - rho."""
    rho = check_square(rho, "rho")
    dA, dB = check_dims(dims, rho.shape[0])
    rA = partial_trace(rho, (dA, dB), "B")
    rB = partial_trace(rho, (dA, dB), "A")
    a = min_eig(np.kron(rA, np.eye(dB)) - rho)
    b = min_eig(np.kron(np.eye(dA), rB) - rho)
    return a, b


def realign(rho, dims=None):
    """R(rho) with R[(i,k),(j,l)] = <ij|rho|kl>."""
    rho = check_square(rho, "rho")
    dA, dB = check_dims(dims, rho.shape[0])
    t = rho.reshape(dA, dB, dA, dB).transpose(0, 2, 1, 3)
    return t.reshape(dA * dA, dB * dB)


def realignment_norm(rho, dims=None):
    """Trace norm (sum of singular values) of the realigned matrix."""
    return float(np.linalg.svd(realign(rho, dims), compute_uv=False).sum())


def detect(rho, dims=None, tol=1e-10):
    rho = np.asarray(rho)
    dims = check_dims(dims if dims is not None else getattr(rho, "dims", None), rho.shape[0])
    ppt = ppt_report(rho, dims)
    ra, rb = reduction_report(rho, dims)
    rn = realignment_norm(rho, dims)
    verdicts = {
        "ppt": ENTANGLED if ppt < -tol else INCONCLUSIVE,
        "reduction": ENTANGLED if min(ra, rb) < -tol else INCONCLUSIVE,
        "realignment": ENTANGLED if rn > 1 + tol else INCONCLUSIVE,
    }
    return DetectionReport(ppt, ra, rb, rn, verdicts)


def detect_many(states, dims=None, tol=1e-10, n_jobs=None):
    """Reports for a sequence of states, in input order."""
    if n_jobs in (None, 1):
        return [detect(r, dims, tol) for r in states]
    from joblib import Parallel, delayed
    return Parallel(n_jobs=n_jobs)(delayed(detect)(r, dims, tol) for r in states)


# --- Bell-diagonal states ------------------------------------------------

def simplex_blocks(s):
    """The d blocks B_m into which the partial transpose of a Bell-diagonal state splits.

    (B_m)_{s,t} = (1/d) sum_k c[k, s+t-m] w^{k(s-t)}
    """
    d = s.d
    w = np.exp(2j * np.pi / d)
    idx = np.arange(d)
    S, T = np.meshgrid(idx, idx, indexing="ij")
    phase = w ** (idx[:, None, None] * (S - T)[None])      # [k, s, t]
    blocks = []
    for m in range(d):
        cols = (S + T - m) % d
        blocks.append(np.einsum("kst,kst->st", s.c[:, cols], phase) / d)
    return blocks


def simplex_ppt_min_eig(s):
    return min(np.linalg.eigvalsh(B)[0] for B in simplex_blocks(s))


def isotropic_ppt_threshold(d, tol=1e-13):
    """Weight alpha at which the isotropic state stops being PPT."""
    from .states import isotropic
    return bisect_root(lambda a: simplex_ppt_min_eig(isotropic(d, a)), 0.0, 1.0, tol)


def detB0_slice2(alpha, beta):
    a, b = alpha, beta
    return -(2 * a + 2 * b + 1) * (8 * a * a + 8 * b * b - 11 * a * b + 2 * a + 2 * b - 1) / 729


def detB0_slice3_line(alpha, beta, gamma):
    a, b, g = alpha, beta, gamma
    quad = (8 * a * a + 8 * b * b + 8 * g * g + 2 * a + 2 * b + 2 * g
            - 11 * a * b - 11 * a * g - 11 * b * g - 1)
    return -(2 * a + 2 * b + 2 * g + 1) * quad / 729


def detB0_slice3_offline(alpha, beta, gamma):
    a, b, g = alpha, beta, gamma
    return (-16 * a ** 3 - 16 * b ** 3 - 16 * g ** 3
            + 6 * b * a * a + 6 * g * a * a + 6 * g * g * a + 6 * b * b * a
            + 6 * b * b * g + 6 * b * g * g
            - 12 * a * a - 12 * b * b - 12 * g * g
            + 3 * b * a + 3 * g * a + 3 * b * g
            - 15 * a * b * g + 1) / 729


def enclosure_check(s, tol=1e-12):
    """True if every weight is at most 1/d (inside the enclosure polytope)."""
    return bool(np.all(s.c <= 1.0 / s.d + tol))


@lru_cache(maxsize=None)
def _line_generators(d):
    G = []
    for pts in complete_lines(d):
        g = np.zeros((d, d))
        for k, l in pts:
            g[k, l] = 1.0 / d
        G.append(g.ravel())
    return np.array(G)


def kernel_membership(s, tol=1e-9):
    """True if the weights are a convex combination of line-state weights.

    Solved as a linear feasibility problem over all complete lines.
    """
    G = _line_generators(s.d)
    n = G.shape[0]
    A_eq = np.vstack([G.T, np.ones((1, n))])
    b_eq = np.concatenate([s.c.ravel(), [1.0]])
    res = linprog(np.zeros(n), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * n,
                  method="highs")
    if res.status != 0:
        return False
    return bool(np.max(np.abs(A_eq @ res.x - b_eq)) <= tol)


# --- witnesses -----------------------------------------------------------

@dataclass(frozen=True)
class WitnessSpec:
    """W = sum_{k,l} kappa[k, l] P_{k,l} with a real weight grid."""
    d: int
    kappa: np.ndarray

    def __post_init__(self):
        kappa = np.array(self.kappa, dtype=float)
        if kappa.shape != (self.d, self.d):
            raise ValueError("kappa must be a d x d real grid")
        object.__setattr__(self, "kappa", kappa)

    def operator(self):
        d = self.d
        return sum(self.kappa[k, l] * bell_projector(d, k, l)
                   for k in range(d) for l in range(d))

    @classmethod
    def isotropic(cls, d, a, point=(0, 0)):
        """a I - d a P_point"""
        kappa = np.full((d, d), float(a))
        kappa[point[0] % d, point[1] % d] -= d * a
        return cls(d, kappa)

    @classmethod
    def normalized(cls, d, lam, extra):
        """lam I / d + sum of extra weights at given points."""
        kappa = np.full((d, d), lam / d)
        for (k, l), v in extra.items():
            kappa[k % d, l % d] += v
        return cls(d, kappa)


def witness_value(rho, w):
    """Tr(W rho). Accepts a density matrix or a SimplexState."""
    if isinstance(rho, SimplexState):
        if rho.d != w.d:
            raise ValueError("witness and state dimensions differ")
        return float(np.sum(w.kappa * rho.c))
    rho = check_square(rho, "rho")
    if rho.shape[0] != w.d ** 2:
        raise ValueError("witness and state dimensions differ")
    return float(np.trace(w.operator() @ rho).real)


def m_phi(w, phi):
    """M_phi = sum kappa[k,l] W_{k,l} |phi><phi| W_{k,l}^dagger."""
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if phi.size != w.d:
        raise ValueError("phi has the wrong dimension")
    if abs(np.linalg.norm(phi) - 1) > 1e-10:
        raise ValueError("phi must be a unit vector")
    M = np.zeros((w.d, w.d), dtype=complex)
    for k in range(w.d):
        for l in range(w.d):
            v = weyl_operator(w.d, k, l) @ phi
            M += w.kappa[k, l] * np.outer(v, v.conj())
    return M


def witness_boundary_slice2(alpha, beta, mirror=False):
    """Optimal-witness boundary polynomial for the two-parameter qutrit slice.

    Positive on the noise side, zero on the boundary, negative where the
    witness detects entanglement. ``mirror`` swaps the roles of alpha and beta.
    """
    a, b = (beta, alpha) if mirror else (alpha, beta)
    return 4 * a * a - 5 * a + 40 * b * b + (17 * a - 14) * b + 1


def witness_boundary_slice3_line(alpha, beta, gamma, special=0):
    """Boundary polynomial for the three-parameter line slice.

    ``special`` selects which parameter plays the distinguished role
    (0 -> alpha, 1 -> beta, 2 -> gamma); the polynomial is symmetric in the
    other two.
    """
    p = [alpha, beta, gamma]
    a = p[special]
    b, g = [p[i] for i in range(3) if i != special]
    return 40 * a * a + (17 * b + 17 * g - 14) * a + 4 * b * b + g * (4 * g - 5) - b * (19 * g + 5) + 1


def slice2_witness_min(alpha, beta):
    return min(witness_boundary_slice2(alpha, beta), witness_boundary_slice2(alpha, beta, True))


def slice3_line_witness_min(alpha, beta, gamma):
    return min(witness_boundary_slice3_line(alpha, beta, gamma, i) for i in range(3))
