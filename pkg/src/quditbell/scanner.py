"""Parameter sweeps over qutrit Bell-diagonal slices and the LMM tetrahedron.

Two grid modes are offered for the slice families:

* ``region``: an equally spaced barycentric grid over the whole positivity
  region (triangle for ``slice2``, tetrahedron for the 3-parameter slices)
* ``boundary``: the same kind of grid restricted to the boundary of the
  positivity region. With ``optimize`` these points are rescaled along the
  ray from white noise onto the boundary of Bell-CGLMP violation.
"""
import csv
import dataclasses
from dataclasses import dataclass
import itertools
import json
import math

import numpy as np

from . import states as st
from .nonlocality import horodecki_max_chsh
from .optimizer import NelderMeadConfig, maximize_cglmp
from .qubit_geometry import (BELL_T, cylinder_violation, lmm_state,
                             octahedron_membership, tetra_membership)
from .separability import (detB0_slice2, detB0_slice3_line, detB0_slice3_offline,
                           enclosure_check, kernel_membership, ppt_report,
                           simplex_ppt_min_eig, witness_boundary_slice2,
                           witness_boundary_slice3_line)

FAMILIES = ("slice2", "slice3-line", "slice3-offline", "tetrahedron")
SQRT3 = math.sqrt(3)


@dataclass
class ScanRecord:
    family: str
    alpha: float
    beta: float
    gamma: float = None
    min_eig: float = None
    ppt_min_eig: float = None
    detB0: float = None
    enclosure: bool = None
    kernel: bool = None
    witness_1: float = None
    witness_2: float = None
    witness_3: float = None
    max_I3: float = None
    alpha_b: float = None
    beta_b: float = None
    gamma_b: float = None


@dataclass
class TetraRecord:
    family: str
    t1: float
    t2: float
    t3: float
    tetra_min_slack: float = None
    octahedron: bool = None
    ppt_min_eig: float = None
    cylinder_max: float = None
    chsh_violation: bool = None
    horodecki_chsh: float = None


@dataclass(frozen=True)
class SphereSpec:
    """Sphere centred on the diagonal alpha = beta = gamma, plus three planes."""
    radius: float = (413 * SQRT3 - 558) / 156
    center: float = (-361 + 186 * SQRT3) / 156
    plane_offset: float = (6 * SQRT3 - 9) / 2


def sphere_residual(alpha, beta, gamma, spec=SphereSpec()):
    """Distance from the sphere centre minus the radius."""
    p = np.array([alpha, beta, gamma], dtype=float) - spec.center
    return float(np.linalg.norm(p) - spec.radius)


def plane_residuals(alpha, beta, gamma, spec=SphereSpec()):
    """x - (y + z + 6 sqrt3 - 9)/2 with x running over gamma, beta, alpha."""
    p = (alpha, beta, gamma)
    out = []
    for i in (2, 1, 0):
        y, z = (p[j] for j in range(3) if j != i)
        out.append(p[i] - (y + z) / 2 - spec.plane_offset)
    return out


def plane_residual(alpha, beta, gamma, spec=SphereSpec()):
    """The plane residual of smallest magnitude (signed)."""
    return min(plane_residuals(alpha, beta, gamma, spec), key=abs)


def fit_residual(alpha, beta, gamma, spec=SphereSpec()):
    """Distance-like misfit to the nearest of the sphere and the three planes."""
    return min(abs(sphere_residual(alpha, beta, gamma, spec)),
               abs(plane_residual(alpha, beta, gamma, spec)))


def boundary_from_scaling(params, max_Id):
    """Scale parameters by 2 / max_Id.

    For rho = (1-a) I/d^2 + a mu the Bell operator is traceless, so the best
    score is a * max_Id(mu) and the local bound 2 is met at a = 2 / max_Id(mu).
    """
    if not max_Id > 0:
        raise ValueError(f"max_Id must be positive, got {max_Id}")
    a = 2.0 / max_Id
    return tuple(a * float(p) for p in params)


# --- grids ---------------------------------------------------------------

def positivity_vertices(family):
    if family == "slice2":
        return np.array([[-1 / 7, -1 / 7], [1.0, 0.0], [0.0, 1.0]])
    if family in ("slice3-line", "slice3-offline"):
        return np.array([[-1 / 6] * 3, [1.0, 0, 0], [0, 1.0, 0], [0, 0, 1.0]])
    if family == "tetrahedron":
        return np.array(list(BELL_T.values()))
    raise ValueError(f"unknown family {family!r}")


def _compositions(n, parts):
    """All tuples of ``parts`` nonnegative ints summing to n, lexicographic."""
    for cut in itertools.combinations(range(n + parts - 1), parts - 1):
        prev = -1
        out = []
        for c in cut + (n + parts - 1,):
            out.append(c - prev - 1)
            prev = c
        yield tuple(out)


def simplex_grid(vertices, n, boundary_only=False):
    """Equally spaced barycentric grid with n subdivisions per edge."""
    if n < 1:
        raise ValueError("grid needs at least one subdivision")
    V = np.asarray(vertices, dtype=float)
    pts = []
    for w in _compositions(n, V.shape[0]):
        if boundary_only and min(w) > 0:
            continue
        pts.append((np.array(w) / n) @ V)
    return np.array(pts)


def grid_points(family, n, mode="region"):
    if mode not in ("region", "boundary"):
        raise ValueError(f"unknown grid mode {mode!r}")
    return simplex_grid(positivity_vertices(family), n, boundary_only=(mode == "boundary"))


# --- per-point evaluation ------------------------------------------------

_CONSTRUCTORS = {
    "slice2": st.slice2,
    "slice3-line": st.slice3_line,
    "slice3-offline": st.slice3_offline,
}
_DET = {
    "slice2": detB0_slice2,
    "slice3-line": detB0_slice3_line,
    "slice3-offline": detB0_slice3_offline,
}


def evaluate_point(family, params, optimize=False, cfg=None):
    if family == "tetrahedron":
        t = np.asarray(params, dtype=float)
        inside, slack = tetra_membership(t)
        rho = lmm_state(t)
        viol, cmax = cylinder_violation(t)
        return TetraRecord(family, *map(float, t), float(slack.min()), octahedron_membership(t),
                           ppt_report(rho, (2, 2)), cmax, viol, horodecki_max_chsh(rho))
    params = [float(p) for p in params]
    s = _CONSTRUCTORS[family](*params)
    rec = ScanRecord(family, params[0], params[1], params[2] if len(params) > 2 else None)
    rec.min_eig = s.min_weight
    rec.ppt_min_eig = float(simplex_ppt_min_eig(s))
    rec.detB0 = float(_DET[family](*params))
    rec.enclosure = enclosure_check(s)
    rec.kernel = kernel_membership(s) if s.is_valid(1e-9) else False
    if family == "slice2":
        rec.witness_1 = witness_boundary_slice2(*params)
        rec.witness_2 = witness_boundary_slice2(*params, mirror=True)
    elif family == "slice3-line":
        rec.witness_1, rec.witness_2, rec.witness_3 = (
            witness_boundary_slice3_line(*params, special=i) for i in range(3))
    if optimize:
        cfg = NelderMeadConfig() if cfg is None else cfg
        res = maximize_cglmp(s.density(strict=False), 3, cfg)
        rec.max_I3 = res.best_value
        if res.best_value > 0:
            scaled = boundary_from_scaling(params, res.best_value)
            rec.alpha_b, rec.beta_b = scaled[0], scaled[1]
            if len(scaled) > 2:
                rec.gamma_b = scaled[2]
    return rec


def scan(family, n, mode="region", optimize=False, cfg=None, n_jobs=None, progress=None):
    """One record per grid point, in grid order.

    Point i is optimized with seed ``cfg.seed ^ i`` so results do not depend
    on evaluation order or parallelism.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    cfg = NelderMeadConfig() if cfg is None else cfg
    pts = grid_points(family, n, mode)
    jobs = [(family, p, optimize, cfg.with_(seed=cfg.seed ^ i)) for i, p in enumerate(pts)]
    if n_jobs in (None, 1):
        out = []
        for i, job in enumerate(jobs):
            out.append(evaluate_point(*job))
            if progress:
                progress(i + 1, len(jobs))
        return out
    from joblib import Parallel, delayed
    return Parallel(n_jobs=n_jobs)(delayed(evaluate_point)(*job) for job in jobs)


# --- output --------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.12g}"
    return str(v)


def _json_value(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (float, np.floating)):
        return float(f"{float(v):.12g}")
    return v


def record_fields(records, family=None):
    if records:
        return [f.name for f in dataclasses.fields(records[0])]
    cls = TetraRecord if family == "tetrahedron" else ScanRecord
    return [f.name for f in dataclasses.fields(cls)]


def emit(records, fmt, path, family=None):
    names = record_fields(records, family)
    try:
        with open(path, "w", newline="") as fh:
            if fmt == "csv":
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(names)
                for r in records:
                    w.writerow([_fmt(getattr(r, n)) for n in names])
            elif fmt == "json":
                json.dump([{n: _json_value(getattr(r, n)) for n in names} for r in records], fh, indent=1)
                fh.write("\n")
            else:
                raise ValueError(f"unknown format {fmt!r}")
    except OSError as exc:
        raise OSError(f"cannot write scan output to {path}: {exc}") from exc


def _parse(text):
    if text == "":
        return None
    if text in ("true", "false"):
        return text == "true"
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path):
    with open(path, newline="") as fh:
        return [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def sphere_check(rows, spec=SphereSpec(), tol=1e-4):
    """Residual statistics for rows carrying boundary-scaled parameters.

    Rows whose optimized score does not exceed the local bound 2 are skipped:
    scaling them by 2 / max_I3 >= 1 moves them away from the violating region
    rather than onto its boundary.
    """
    res, kinds = [], []
    skipped = 0
    for r in rows:
        if r.get("alpha_b") is None:
            continue
        if r.get("max_I3") is not None and r["max_I3"] <= 2:
            skipped += 1
            continue
        p = (r["alpha_b"], r["beta_b"], r.get("gamma_b") or 0.0)
        s = abs(sphere_residual(*p, spec))
        q = abs(plane_residual(*p, spec))
        res.append(min(s, q))
        kinds.append("sphere" if s <= q else "plane")
    res = np.array(res)
    return {
        "n_points": int(res.size),
        "n_skipped": skipped,
        "max_residual": float(res.max()) if res.size else None,
        "mean_residual": float(res.mean()) if res.size else None,
        "n_sphere": kinds.count("sphere"),
        "n_plane": kinds.count("plane"),
        "tolerance": tol,
        "all_within_tolerance": bool(res.size and res.max() < tol),
    }
