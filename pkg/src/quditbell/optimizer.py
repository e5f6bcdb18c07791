"""Euler-angle parametrization of SU(d) and a restarted Nelder-Mead maximizer.

The parametrization writes a special unitary as an ordered product of
one-parameter factors exp(i theta lambda_g) where lambda_g is either a
diagonal Gell-Mann matrix (index g = n^2 - 1) or the antisymmetric
Gell-Mann matrix coupling levels 0 and n (index g = n^2 + 1). Generator
indices follow the usual SU(d) numbering, e.g. lambda_2, lambda_3, lambda_5,
lambda_8 for d = 3.
"""
from dataclasses import asdict, dataclass, field, fields, replace
from functools import lru_cache
import json
import math

import numpy as np

from .bases import antisymmetric_gellmann, diagonal_gellmann
from .nonlocality import MeasurementSettings, cglmp_Id_from_probs, correlation_matrix
from .validation import check_dimension, check_square


# --- SU(d) Euler angles --------------------------------------------------

def n_angles(d):
    return d * d - 1


def _generator_kind(index, d):
    n = math.isqrt(index + 1)
    if n * n == index + 1 and 2 <= n <= d:
        return "diag", n - 2          # lambda_{n^2-1} = diagonal GGM number n-2
    n = math.isqrt(index - 1)
    if index > 1 and n * n == index - 1 and 1 <= n <= d - 1:
        return "rot", n               # lambda_{n^2+1} = antisymmetric GGM (0, n)
    raise ValueError(f"generator lambda_{index} is not used by the SU({d}) parametrization")


def generator(index, d):
    kind, p = _generator_kind(index, d)
    if kind == "diag":
        return diagonal_gellmann(d, p)
    return antisymmetric_gellmann(d, 0, p)


def matrix_exp_generator(index, angle, d):
    """exp(i angle lambda_index) in closed form.

    Diagonal generators exponentiate entrywise. exp(i t lambda_{n^2+1}) is a
    real rotation by t in the (0, n) plane.
    """
    d = check_dimension(d)
    kind, p = _generator_kind(index, d)
    if kind == "diag":
        return np.diag(np.exp(1j * angle * np.diag(diagonal_gellmann(d, p)).real))
    U = np.eye(d, dtype=complex)
    c, s = math.cos(angle), math.sin(angle)
    U[0, 0] = U[p, p] = c
    U[0, p] = s
    U[p, 0] = -s
    return U


@lru_cache(maxsize=None)
def euler_sequence(d):
    """Ordered (generator index, angle index) pairs, angle indices 0-based.

    U = [prod_{x=0}^{d-2} prod_{k=2}^{d-x} A(k, j(x))] [prod_{n=2}^{d} exp(i lambda_{n^2-1} a_{d^2-(d+1-n)})]
    A(k, j) = exp(i lambda_3 a_{2k-3+j}) exp(i lambda_{(k-1)^2+1} a_{2(k-1)+j})
    j(0) = 0, j(x) = 2 sum_{l=0}^{x-1} (d - x + l)
    (angle subscripts above are 1-based)
    """
    seq = []
    for x in range(d - 1):
        j = 2 * sum(d - x + l for l in range(x))
        for k in range(2, d - x + 1):
            seq.append((3, 2 * k - 3 + j - 1))
            seq.append(((k - 1) ** 2 + 1, 2 * (k - 1) + j - 1))
    for n in range(2, d + 1):
        seq.append((n * n - 1, d * d - (d + 1 - n) - 1))
    return tuple(seq)


def generator_indices(d):
    return [g for g, _ in euler_sequence(d)]


def su_from_euler(angles, d=None):
    angles = np.asarray(angles, dtype=float).reshape(-1)
    if d is None:
        d = math.isqrt(angles.size + 1)
    if angles.size != n_angles(d):
        raise ValueError(f"SU({d}) needs {n_angles(d)} angles, got {angles.size}")
    U = np.eye(d, dtype=complex)
    for g, a in euler_sequence(d):
        U = U @ matrix_exp_generator(g, angles[a], d)
    return U


@lru_cache(maxsize=None)
def _compiled(d):
    """Index arrays for filling every factor of the product at once."""
    seq = euler_sequence(d)
    template = np.zeros((len(seq), d, d), dtype=complex)
    diag_f, diag_a, diag_v, rot_f, rot_a, rot_p = [], [], [], [], [], []
    for f, (g, a) in enumerate(seq):
        kind, p = _generator_kind(g, d)
        if kind == "diag":
            diag_f.append(f)
            diag_a.append(a)
            diag_v.append(np.diag(diagonal_gellmann(d, p)).real)
        else:
            template[f] = np.eye(d)
            rot_f.append(f)
            rot_a.append(a)
            rot_p.append(p)
    return (template, np.array(diag_f), np.array(diag_a), np.array(diag_v),
            np.array(rot_f), np.array(rot_a), np.array(rot_p))


def su_from_euler_batch(angles, d):
    """Unitaries for a stack of angle vectors, shape (m, d^2-1) -> (m, d, d).

    Same product as :func:`su_from_euler`: all factors are filled in one go
    and multiplied pairwise, keeping their left-to-right order.
    """
    angles = np.asarray(angles, dtype=float)
    m = angles.shape[0]
    template, diag_f, diag_a, diag_v, rot_f, rot_a, rot_p = _compiled(d)
    F = np.repeat(template[None], m, axis=0)
    ar = np.arange(d)
    F[:, diag_f[:, None], ar, ar] = np.exp(1j * angles[:, diag_a, None] * diag_v[None])
    c = np.cos(angles[:, rot_a])
    s = np.sin(angles[:, rot_a])
    F[:, rot_f, 0, 0] = c
    F[:, rot_f, rot_p, rot_p] = c
    F[:, rot_f, 0, rot_p] = s
    F[:, rot_f, rot_p, 0] = -s
    while F.shape[1] > 1:
        n = F.shape[1]
        P = np.matmul(F[:, 0:n - 1:2], F[:, 1:n:2])
        if n % 2:
            P = np.concatenate([P, F[:, -1:]], axis=1)
        F = P
    return F[:, 0]


def settings_from_angles(angles, d):
    """Four unitaries (A1, A2, B1, B2) from a flat vector of 4 (d^2-1) angles."""
    blocks = np.asarray(angles, dtype=float).reshape(4, n_angles(d))
    U = [su_from_euler(b, d) for b in blocks]
    return MeasurementSettings(d, *U)


# --- Nelder-Mead ---------------------------------------------------------

@dataclass(frozen=True)
class NelderMeadConfig:
    reflection: float = 1.6
    expansion: float = 1.6
    contraction: float = 0.8
    shrink: float = 0.8
    restarts: int = 10
    tol_value: float = 1e-8
    tol_point: float = 1e-8
    max_iters: int = 20000
    seed: int = 0
    initial_step: float = 0.5
    cycle_iters: int = 2000

    def __post_init__(self):
        for name in ("reflection", "expansion", "contraction", "shrink"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.restarts < 1 or self.max_iters < 1 or self.cycle_iters < 1:
            raise ValueError("restarts, max_iters and cycle_iters must be >= 1")

    @classmethod
    def from_dict(cls, obj):
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown optimizer config keys: {sorted(unknown)}")
        return cls(**obj)

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def with_(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self):
        return asdict(self)


@dataclass
class NelderMeadResult:
    x: np.ndarray
    value: float
    iterations: int
    converged: bool
    trace: list = field(default_factory=list, repr=False)


def initial_simplex(x0, step=0.5):
    x0 = np.asarray(x0, dtype=float)
    return np.vstack([x0, x0 + step * np.eye(x0.size)])


def nelder_mead(f, start, cfg=NelderMeadConfig(), keep_trace=False, max_iters=None):
    """Maximize ``f`` from the simplex ``start`` (n+1 rows of n coordinates).

    Coefficients follow the usual convention: reflection y0 + a (y0 - w),
    expansion y0 + g (yr - y0), contractions y0 + r (yr - y0) and
    y0 + r (w - y0), shrink y1 + s (yi - y1), with y0 the centroid of all
    but the worst vertex w.

    Vertices are kept sorted best-first with a stable sort. Stops when the
    value spread and the vertex spread around the best point both fall below
    the tolerances, or after ``max_iters`` iterations (default
    ``cfg.max_iters``).
    """
    Y = np.array(start, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1] + 1:
        raise ValueError("start simplex must have shape (n+1, n)")
    max_iters = cfg.max_iters if max_iters is None else max_iters

    def evaluate(y):
        v = float(f(y))
        if not np.isfinite(v):
            raise FloatingPointError(f"objective returned {v} at {y!r}")
        return v

    F = np.array([evaluate(y) for y in Y])
    a, g, r, s = cfg.reflection, cfg.expansion, cfg.contraction, cfg.shrink
    trace = []
    converged = False
    it = 0
    while it < max_iters:
        order = np.argsort(-F, kind="stable")
        Y, F = Y[order], F[order]
        if keep_trace:
            trace.append(F[0])
        if (abs(F[0] - F[-1]) < cfg.tol_value
                and np.max(np.linalg.norm(Y[1:] - Y[0], axis=1)) < cfg.tol_point):
            converged = True
            break
        it += 1
        worst = Y[-1]
        y0 = Y[:-1].mean(axis=0)
        yr = y0 + a * (y0 - worst)
        fr = evaluate(yr)
        if F[0] >= fr > F[-2]:
            Y[-1], F[-1] = yr, fr
            continue
        if fr > F[0]:
            ye = y0 + g * (yr - y0)
            fe = evaluate(ye)
            if fe > fr:
                Y[-1], F[-1] = ye, fe
            else:
                Y[-1], F[-1] = yr, fr
            continue
        if fr > F[-1]:
            # between the second-worst and worst: outside contraction
            yc = y0 + r * (yr - y0)
            fc = evaluate(yc)
            if fc >= fr:
                Y[-1], F[-1] = yc, fc
                continue
        else:
            yc = y0 + r * (worst - y0)
            fc = evaluate(yc)
            if fc >= F[-1]:
                Y[-1], F[-1] = yc, fc
                continue
        Y[1:] = Y[0] + s * (Y[1:] - Y[0])
        F[1:] = [evaluate(y) for y in Y[1:]]
    order = np.argsort(-F, kind="stable")
    Y, F = Y[order], F[order]
    return NelderMeadResult(Y[0].copy(), float(F[0]), it, converged, trace)


@dataclass
class OptimizationResult:
    best_value: float
    best_point: np.ndarray
    values: list
    iterations: list
    converged: list
    d: int = None

    @property
    def best_angles(self):
        """Angle blocks (A1, A2, B1, B2), one row each."""
        return self.best_point.reshape(4, -1)

    @property
    def settings(self):
        return settings_from_angles(self.best_point, self.d)

    def to_dict(self):
        return {
            "best_value": self.best_value,
            "best_point": self.best_point.tolist(),
            "values": list(self.values),
            "iterations": list(self.iterations),
            "converged": list(self.converged),
        }


def restart_seeds(seed, restarts):
    ss = np.random.SeedSequence(seed)
    return [np.random.default_rng(c) for c in ss.spawn(restarts)]


def nelder_mead_cycles(f, x0, cfg=NelderMeadConfig()):
    """Nelder-Mead from ``x0``, re-seeding a fresh simplex at the best point.

    A single simplex in tens of dimensions tends to flatten out and stall
    away from the maximum. Every ``cfg.cycle_iters`` iterations (or on
    convergence) a new simplex is built around the current best point. The
    run stops once a whole cycle improves the best value by less than
    ``cfg.tol_value`` (converged) or after ``cfg.max_iters`` iterations in
    total (not converged).
    """
    x = np.asarray(x0, dtype=float)
    value = -np.inf
    used = 0
    trace = []
    converged = False
    while used < cfg.max_iters:
        res = nelder_mead(f, initial_simplex(x, cfg.initial_step), cfg,
                          max_iters=min(cfg.cycle_iters, cfg.max_iters - used))
        used += res.iterations
        trace.append(res.value)
        gain = res.value - value
        if gain > 0:
            x, value = res.x, res.value
        if gain < cfg.tol_value:
            converged = True
            break
    return NelderMeadResult(x, float(value), used, converged, trace)


def _one_restart(f, n, cfg, rng):
    x0 = rng.uniform(0, 2 * np.pi, n)
    return nelder_mead_cycles(f, x0, cfg)


def maximize(f, n, cfg=NelderMeadConfig(), n_jobs=None):
    """Best of ``cfg.restarts`` Nelder-Mead runs from random starts in [0, 2 pi)^n."""
    rngs = restart_seeds(cfg.seed, cfg.restarts)
    if n_jobs in (None, 1):
        runs = [_one_restart(f, n, cfg, g) for g in rngs]
    else:
        from joblib import Parallel, delayed
        runs = Parallel(n_jobs=n_jobs)(delayed(_one_restart)(f, n, cfg, g) for g in rngs)
    best = max(range(len(runs)), key=lambda i: (runs[i].value, -i))
    return OptimizationResult(
        best_value=runs[best].value,
        best_point=runs[best].x,
        values=[r.value for r in runs],
        iterations=[r.iterations for r in runs],
        converged=[r.converged for r in runs],
    )


# --- objectives ----------------------------------------------------------

@lru_cache(maxsize=None)
def id_coefficients(d):
    """G[a, b, k, l] such that I_d = sum G * P for joint tables P[a, b, k, l]."""
    G = np.zeros((2, 2, d, d))
    for idx in np.ndindex(G.shape):
        E = np.zeros_like(G)
        E[idx] = 1
        G[idx] = cglmp_Id_from_probs(E)
    G.setflags(write=False)
    return G


class CGLMPObjective:
    """I_d of a fixed state as a function of 4 (d^2 - 1) Euler angles.

    The state is stored as weighted amplitude matrices from its spectral
    decomposition, so that P(A_a=k, B_b=l) = sum_n |(U_a^dag Psi_n conj(U_b))[k, l]|^2.
    """

    def __init__(self, rho, d, coefficients=None):
        rho = check_square(rho, "rho")
        if rho.shape[0] != d * d:
            raise ValueError("state dimension does not match d^2")
        self.d = d
        vals, vecs = np.linalg.eigh(0.5 * (rho + rho.conj().T))
        keep = vals > 1e-14
        amps = vecs[:, keep] * np.sqrt(vals[keep])
        self.psi = amps.T.reshape(-1, d, d)
        self.G = id_coefficients(d) if coefficients is None else coefficients
        self.n = 4 * n_angles(d)

    def probabilities(self, x):
        U = su_from_euler_batch(np.asarray(x).reshape(4, -1), self.d)
        UA_h = U[:2].conj().transpose(0, 2, 1)
        UB_c = U[2:].conj()
        X = np.matmul(UA_h[:, None], self.psi[None])            # (2, r, d, d)
        M = np.matmul(X[:, None], UB_c[None, :, None])          # (2, 2, r, d, d)
        return np.sum(M.real ** 2 + M.imag ** 2, axis=2)

    def __call__(self, x):
        return float(np.sum(self.G * self.probabilities(x)))


def maximize_cglmp(rho, d, cfg=NelderMeadConfig(), n_jobs=None):
    obj = CGLMPObjective(rho, d)
    res = maximize(obj, obj.n, cfg, n_jobs=n_jobs)
    res.d = d
    return res


class CHSHObjective:
    """|a.T(b - b') + a'.T(b + b')| over eight spherical angles."""

    def __init__(self, rho):
        self.T = correlation_matrix(rho)
        self.n = 8

    @staticmethod
    def vectors(x):
        """Rows a, a', b, b' as unit vectors."""
        x = np.asarray(x, dtype=float).reshape(4, 2)
        st, ct = np.sin(x[:, 0]), np.cos(x[:, 0])
        return np.stack([st * np.cos(x[:, 1]), st * np.sin(x[:, 1]), ct], axis=1)

    def __call__(self, x):
        a, a2, b, b2 = self.vectors(x)
        TbM = self.T @ (b - b2)
        TbP = self.T @ (b + b2)
        return abs(float(a @ TbM + a2 @ TbP))


def maximize_chsh(rho, cfg=NelderMeadConfig(), n_jobs=None):
    obj = CHSHObjective(rho)
    return maximize(obj, obj.n, cfg, n_jobs=n_jobs)
