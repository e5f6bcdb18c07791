"""Named states, Bell-diagonal (magic simplex) families and phase-space maps.

Bell states of a d x d system are indexed by a point (k, l) of the discrete
phase space Z_d x Z_d:

    |Omega_{k,l}> = (W_{k,l} x I) |Omega_{0,0}>,  |Omega_{0,0}> = sum_s |ss> / sqrt(d)

A Bell-diagonal state is a d x d grid of weights c[k, l] over the projectors
P_{k,l} = |Omega_{k,l}><Omega_{k,l}|.
"""
from dataclasses import dataclass, field
from functools import lru_cache
import itertools
import json
import math

import numpy as np

from .bases import weyl_operator
from .matcore import min_eig, partial_trace
from .validation import check_dimension, check_dims, check_hermitian

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class DensityMatrix:
    """A bipartite (or single-party) density matrix with its dimensions.

    Hermiticity and unit trace are enforced at construction. Positivity is
    only reported (``min_eig``), since scans need points just outside the
    state space.
    """
    matrix: np.ndarray
    dims: tuple = None

    def __post_init__(self):
        m = check_hermitian(self.matrix, name="density matrix")
        if self.dims is None:
            dims = check_dims(None, m.shape[0])
        elif isinstance(self.dims, int):
            dims = (self.dims,)
            if self.dims != m.shape[0]:
                raise ValueError("dims do not match matrix")
        else:
            dims = check_dims(self.dims, m.shape[0])
        tr = np.trace(m).real
        if abs(tr - 1) > 1e-10:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def min_eig(self):
        return min_eig(self.matrix)

    def is_valid(self, tol=1e-10):
        return self.min_eig >= -tol

    def to_json(self):
        return {"dims": list(self.dims),
                "matrix": [[[z.real, z.imag] for z in row] for row in self.matrix]}

    @classmethod
    def from_json(cls, obj):
        m = np.array([[complex(re, im) for re, im in row] for row in obj["matrix"]])
        return cls(m, tuple(obj["dims"]))


@dataclass(frozen=True)
class SimplexState:
    d: int
    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.shape != (self.d, self.d):
            raise ValueError(f"weight grid must be {self.d}x{self.d}, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)

    @property
    def min_weight(self):
        # Bell projectors are orthogonal, so this is also the min eigenvalue
        return float(self.c.min())

    def is_valid(self, tol=WEIGHT_TOL):
        return self.min_weight >= -tol and abs(self.c.sum() - 1) <= tol

    def density(self, strict=True):
        return simplex_to_density(self, strict=strict)


@dataclass(frozen=True)
class SchmidtData:
    coefficients: np.ndarray
    rank: int
    left: np.ndarray
    right: np.ndarray


def bell_qubit(which, vector=False):
    """One of the four two-qubit Bell states, by name (phi+, phi-, psi+, psi-)."""
    key = (str(which).lower().replace("φ", "phi").replace("ψ", "psi")
           .replace("⁺", "+").replace("⁻", "-"))
    r = 1 / np.sqrt(2)
    table = {
        "phi+": [r, 0, 0, r],
        "phi-": [r, 0, 0, -r],
        "psi+": [0, r, r, 0],
        "psi-": [0, r, -r, 0],
    }
    if key not in table:
        raise ValueError(f"unknown Bell state {which!r}")
    v = np.array(table[key], dtype=complex)
    return v if vector else DensityMatrix(np.outer(v, v.conj()), (2, 2))


def bell_vector(d, k, l):
    """|Omega_{k,l}> as a length d^2 vector."""
    omega0 = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return np.kron(weyl_operator(d, k, l), np.eye(d)) @ omega0


@lru_cache(maxsize=None)
def _bell_projectors(d):
    P = np.empty((d, d, d * d, d * d), dtype=complex)
    for k in range(d):
        for l in range(d):
            v = bell_vector(d, k, l)
            P[k, l] = np.outer(v, v.conj())
    P.setflags(write=False)
    return P


def bell_projector(d, k, l):
    return _bell_projectors(check_dimension(d))[k % d, l % d]


def generalized_bell(d, k, l, vector=True):
    d = check_dimension(d)
    if vector:
        return bell_vector(d, k, l)
    return DensityMatrix(bell_projector(d, k, l), (d, d))


def simplex_to_density(s, strict=True):
    if strict and not s.is_valid():
        raise ValueError(f"weights do not form a point of the simplex (min {s.min_weight:.3g}, "
                         f"sum {s.c.sum():.12g})")
    rho = np.einsum("kl,klij->ij", s.c, _bell_projectors(s.d))
    if strict:
        return DensityMatrix(rho, (s.d, s.d))
    return rho


def from_weights(d, points):
    """SimplexState from noise plus weights at grid points.

    ``points`` maps (k, l) -> weight; the rest of the unit mass is spread
    evenly over the whole grid as white noise.
    """
    c = np.full((d, d), (1 - sum(points.values())) / d ** 2)
    for (k, l), w in points.items():
        c[k % d, l % d] += w
    return SimplexState(d, c)


def isotropic(d, alpha):
    """(1 - alpha) I / d^2 + alpha P_{0,0}"""
    return from_weights(check_dimension(d), {(0, 0): alpha})


def werner_qubit(p):
    """p |psi-><psi-| + (1 - p) I / 4. The singlet sits at grid point (1, 1)."""
    return from_weights(2, {(1, 1): p})


def slice2(alpha, beta):
    return from_weights(3, {(0, 0): alpha, (1, 0): beta})


def slice3_line(alpha, beta, gamma):
    return from_weights(3, {(0, 0): alpha, (1, 0): beta, (2, 0): gamma})


def slice3_offline(alpha, beta, gamma):
    return from_weights(3, {(0, 0): alpha, (1, 0): beta, (0, 1): gamma})


def line_points(d, base, direction):
    """The grid points base + x * direction for x = 0 .. d-1.

    Raises if they are not d distinct points.
    """
    k0, l0 = base
    dk, dl = direction
    pts = [((k0 + x * dk) % d, (l0 + x * dl) % d) for x in range(d)]
    if len(set(pts)) != d:
        raise ValueError(f"direction {direction} does not generate a complete line mod {d}")
    return pts


def line_state(d, base=(0, 0), direction=(1, 0)):
    d = check_dimension(d)
    c = np.zeros((d, d))
    for k, l in line_points(d, base, direction):
        c[k, l] = 1.0 / d
    return SimplexState(d, c)


def complete_lines(d):
    """All distinct complete lines of Z_d x Z_d, each a sorted tuple of points."""
    found = set()
    for dk, dl in itertools.product(range(d), repeat=2):
        for k0, l0 in itertools.product(range(d), repeat=2):
            try:
                pts = line_points(d, (k0, l0), (dk, dl))
            except ValueError:
                continue
            found.add(tuple(sorted(pts)))
    return sorted(found)


PSI_MV_GAMMA = (math.sqrt(11) - math.sqrt(3)) / 2


def psi_mv_qutrit():
    """(|00> + g|11> + |22>)/sqrt(2 + g^2), the qutrit state with the largest CGLMP value."""
    v = np.zeros(9, dtype=complex)
    v[0] = v[8] = 1
    v[4] = PSI_MV_GAMMA
    return v / np.sqrt(2 + PSI_MV_GAMMA ** 2)


def schmidt(psi, dims=None):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("Schmidt decomposition needs a unit vector")
    dA, dB = check_dims(dims, psi.size)
    U, s, Vh = np.linalg.svd(psi.reshape(dA, dB), full_matrices=False)
    lam = s ** 2
    rank = int(np.sum(lam > 1e-12))
    return SchmidtData(lam, rank, U, Vh.conj().T)


def purity_separability_test(psi, dims=None, tol=1e-10):
    """True when the reduced state is pure, i.e. the vector is a product."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    rhoA = partial_trace(np.outer(psi, psi.conj()), check_dims(dims, psi.size), "B")
    return abs(np.trace(rhoA @ rhoA).real - 1) < tol


def entanglement_vn(psi, dims=None):
    """Entropy of entanglement in bits."""
    lam = schmidt(psi, dims).coefficients
    lam = lam[lam > 1e-15]
    return float(-np.sum(lam * np.log2(lam)))


@dataclass(frozen=True)
class PhaseSpaceMap:
    """Affine map (k, l) -> M (k, l) + shift on Z_d x Z_d.

    det M = 1 maps are implemented by local unitaries; det M = -1 maps
    include a complex conjugation and only exist at the grid level.
    """
    d: int
    M: tuple = ((1, 0), (0, 1))
    shift: tuple = (0, 0)

    def __post_init__(self):
        M = tuple(tuple(int(x) % self.d for x in row) for row in self.M)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "shift", tuple(int(x) % self.d for x in self.shift))
        if self.det not in {1 % self.d, self.d - 1}:
            raise ValueError(f"det M = {self.det} mod {self.d} is not +-1")

    @property
    def det(self):
        (a, b), (c, e) = self.M
        return (a * e - b * c) % self.d

    @property
    def is_unitary(self):
        return self.det == 1 % self.d

    def __call__(self, k, l):
        (a, b), (c, e) = self.M
        return ((a * k + b * l + self.shift[0]) % self.d,
                (c * k + e * l + self.shift[1]) % self.d)

    def then(self, other):
        """Composite map: apply self first, then other."""
        A = np.array(self.M)
        B = np.array(other.M)
        M = B @ A
        shift = B @ np.array(self.shift) + np.array(other.shift)
        return PhaseSpaceMap(self.d, tuple(map(tuple, M)), tuple(shift))

    @classmethod
    def translation(cls, d, m, n):
        return cls(d, shift=(m, n))

    @classmethod
    def rotation(cls, d):
        # the action actually realised by U_R x conj(U_R): (k, l) -> (l, -k)
        return cls(d, ((0, 1), (-1, 0)))

    @classmethod
    def shear(cls, d):
        return cls(d, ((1, 1), (0, 1)))

    @classmethod
    def reflection(cls, d):
        # complex conjugation of the Bell projectors: (k, l) -> (-k, l)
        return cls(d, ((-1, 0), (0, 1)))


def all_phase_space_maps(d):
    """Every affine map with det M = +-1 mod d."""
    for a, b, c, e in itertools.product(range(d), repeat=4):
        if (a * e - b * c) % d not in {1 % d, d - 1}:
            continue
        for m, n in itertools.product(range(d), repeat=2):
            yield PhaseSpaceMap(d, ((a, b), (c, e)), (m, n))


def phase_space_apply(s, m):
    if m.d != s.d:
        raise ValueError("map and state dimensions differ")
    c = np.empty_like(s.c)
    for k in range(s.d):
        for l in range(s.d):
            c[m(k, l)] = s.c[k, l]
    return SimplexState(s.d, c)


def translation_unitary(d, m, n):
    return np.kron(weyl_operator(d, m, n), np.eye(d))


def rotation_local(d):
    """Discrete Fourier matrix sum_{s,t} w^{-st} |t><s| / sqrt(d)."""
    s = np.arange(d)
    return np.exp(-2j * np.pi * np.outer(s, s) / d) / np.sqrt(d)


def shear_local(d):
    s = np.arange(d)
    return np.diag(np.exp(-1j * np.pi * s * (s + d) / d))


def rotation_unitary(d):
    U = rotation_local(d)
    return np.kron(U, U.conj())


def shear_unitary(d):
    U = shear_local(d)
    return np.kron(U, U.conj())


# --- CLI-facing state lookup ---------------------------------------------

def _floats(args, n, name):
    if len(args) != n:
        raise ValueError(f"{name} takes {n} parameter(s), got {len(args)}")
    return [float(a) for a in args]


def state_from_spec(text):
    """Build a state from ``family:params`` or a JSON file path.

    Returns a :class:`DensityMatrix`. Recognised families::

        isotropic:d,alpha      werner:p          bell:psi-
        gbell:d,k,l            slice2:a,b        slice3-line:a,b,c
        slice3-offline:a,b,c   psi_mv            line:d,k0,l0,dk,dl
    """
    if ":" not in text and text not in ("psi_mv", "psi-mv"):
        with open(text) as fh:
            return DensityMatrix.from_json(json.load(fh))
    fam, _, rest = text.partition(":")
    fam = fam.strip().lower().replace("_", "-")
    args = [a for a in rest.split(",") if a.strip()]
    if fam == "isotropic":
        d, a = _floats(args, 2, fam)
        return isotropic(int(d), a).density(strict=True)
    if fam == "werner":
        return werner_qubit(*_floats(args, 1, fam)).density(strict=True)
    if fam == "bell":
        return bell_qubit(rest.strip())
    if fam == "gbell":
        d, k, l = (int(x) for x in _floats(args, 3, fam))
        return generalized_bell(d, k, l, vector=False)
    if fam == "slice2":
        return slice2(*_floats(args, 2, fam)).density(strict=True)
    if fam == "slice3-line":
        return slice3_line(*_floats(args, 3, fam)).density(strict=True)
    if fam == "slice3-offline":
        return slice3_offline(*_floats(args, 3, fam)).density(strict=True)
    if fam == "psi-mv":
        v = psi_mv_qutrit()
        return DensityMatrix(np.outer(v, v.conj()), (3, 3))
    if fam == "line":
        d, k0, l0, dk, dl = (int(x) for x in _floats(args, 5, fam))
        return line_state(d, (k0, l0), (dk, dl)).density(strict=True)
    raise ValueError(f"unknown state family {fam!r}")
