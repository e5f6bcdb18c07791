"""Command-line interface.

Run ``quditbell -h`` (or ``python -m quditbell -h``) for the list of
subcommands. Results are printed as JSON on stdout.
"""
import argparse
import json
import os
import sys
import time

import numpy as np

from . import bases, scanner
from .nonlocality import horodecki_max_chsh, noise_threshold, omega00_values
from .optimizer import NelderMeadConfig, maximize_cglmp
from .separability import detect
from .states import state_from_spec

SEED_ENV = "QUDITBELL_SEED"


def _dims(text):
    parts = [int(x) for x in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("dims must look like dA,dB")
    return tuple(parts)


def _print(obj):
    print(json.dumps(obj, indent=2))


def _config(args):
    cfg = NelderMeadConfig()
    env = os.environ.get(SEED_ENV)
    if env is not None:
        cfg = cfg.with_(seed=int(env))
    if getattr(args, "config", None):
        with open(args.config) as fh:
            cfg = NelderMeadConfig.from_dict({**cfg.to_dict(), **json.load(fh)})
    return cfg.with_(seed=getattr(args, "seed", None),
                     restarts=getattr(args, "restarts", None),
                     max_iters=getattr(args, "max_iters", None))


def cmd_bases_check(args):
    d = args.d
    kinds = ["gellmann", "weyl"] + (["pauli"] if d == 2 else [])
    report = {"d": d, "ok": True}
    for kind in kinds:
        B = bases.get_basis(kind, d)
        E = np.array(B.elements)
        gram = np.einsum("aij,bij->ab", E.conj(), E)
        off = gram - np.diag(np.diag(gram))
        trace = np.abs(np.einsum("aii->a", E)).max()
        if kind == "weyl":
            shape_dev = max(np.abs(G.conj().T @ G - np.eye(d)).max() for G in E)
            shape = "unitarity_defect"
        else:
            shape_dev = max(np.abs(G - G.conj().T).max() for G in E)
            shape = "hermiticity_defect"
        ok = off.size == 0 or np.abs(off).max() < 1e-10
        ok = ok and trace < 1e-12 and shape_dev < 1e-10 and len(E) == d * d - 1
        report[kind] = {
            "count": len(E),
            "max_offdiagonal_hs": float(np.abs(off).max()) if off.size else 0.0,
            "max_abs_trace": float(trace),
            shape: float(shape_dev),
            "ok": bool(ok),
        }
        report["ok"] = report["ok"] and bool(ok)
    _print(report)
    return 0 if report["ok"] else 1


def cmd_detect(args):
    rho = state_from_spec(args.state)
    dims = args.dims or rho.dims
    _print(detect(rho.matrix, dims).to_dict())
    return 0


def cmd_chsh(args):
    rho = state_from_spec(args.state)
    if rho.matrix.shape != (4, 4):
        raise SystemExit("chsh needs a two-qubit state")
    v = horodecki_max_chsh(rho.matrix)
    _print({"horodecki_max_chsh": v, "violation": v > 2})
    return 0


def cmd_cglmp_analytic(args):
    rows = []
    for d in args.d:
        I, Id = omega00_values(d)
        rows.append({"d": d, "I": I, "I_d": Id,
                     "r_max_I_percent": 100 * noise_threshold(d, "I"),
                     "r_max_Id_percent": 100 * noise_threshold(d, "I_d")})
    _print(rows[0] if len(rows) == 1 else rows)
    return 0


def cmd_cglmp_maximize(args):
    rho = state_from_spec(args.state)
    d = args.d
    if rho.matrix.shape[0] != d * d:
        raise SystemExit(f"state has size {rho.matrix.shape[0]}, expected {d * d}")
    cfg = _config(args)
    t0 = time.time()
    res = maximize_cglmp(rho.matrix, d, cfg, n_jobs=args.n_jobs)
    out = res.to_dict()
    out.update(d=d, seed=cfg.seed, restarts=cfg.restarts, seconds=time.time() - t0)
    if args.settings:
        out["settings"] = res.settings.as_dict()
    _print(out)
    return 0


def cmd_scan(args):
    cfg = _config(args)

    def progress(i, n):
        if args.verbose:
            print(f"{i}/{n}", file=sys.stderr)
    recs = scanner.scan(args.family, args.grid, mode=args.mode, optimize=args.optimize,
                        cfg=cfg, n_jobs=args.n_jobs, progress=progress)
    scanner.emit(recs, args.format, args.out, family=args.family)
    _print({"family": args.family, "points": len(recs), "out": args.out})
    return 0


def cmd_sphere_check(args):
    rows = scanner.read_csv(args.inp)
    stats = scanner.sphere_check(rows, tol=args.tol)
    _print(stats)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="quditbell", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bases", help="operator basis self-tests")
    bsub = b.add_subparsers(dest="action", required=True)
    bc = bsub.add_parser("check")
    bc.add_argument("--d", type=int, required=True)
    bc.set_defaults(func=cmd_bases_check)

    dt = sub.add_parser("detect", help="entanglement criteria report")
    dt.add_argument("--state", required=True, help="family:params or a JSON state file")
    dt.add_argument("--dims", type=_dims)
    dt.set_defaults(func=cmd_detect)

    ch = sub.add_parser("chsh", help="largest CHSH value of a two-qubit state")
    ch.add_argument("--state", required=True)
    ch.set_defaults(func=cmd_chsh)

    cg = sub.add_parser("cglmp", help="CGLMP values")
    cgsub = cg.add_subparsers(dest="action", required=True)
    an = cgsub.add_parser("analytic", help="I, I_d and noise thresholds of the maximally entangled state")
    an.add_argument("--d", type=int, nargs="+", required=True)
    an.set_defaults(func=cmd_cglmp_analytic)
    mx = cgsub.add_parser("maximize", help="optimize I_d over measurement settings")
    mx.add_argument("--state", required=True)
    mx.add_argument("--d", type=int, required=True)
    mx.add_argument("--seed", type=int)
    mx.add_argument("--config", help="JSON file with optimizer settings")
    mx.add_argument("--restarts", type=int)
    mx.add_argument("--max-iters", dest="max_iters", type=int)
    mx.add_argument("--n-jobs", dest="n_jobs", type=int)
    mx.add_argument("--settings", action="store_true", help="include the best unitaries")
    mx.set_defaults(func=cmd_cglmp_maximize)

    sc = sub.add_parser("scan", help="sweep a state family")
    sc.add_argument("--family", required=True, choices=scanner.FAMILIES)
    sc.add_argument("--grid", type=int, required=True, help="subdivisions per edge")
    sc.add_argument("--mode", choices=("region", "boundary"), default="region")
    sc.add_argument("--optimize", action="store_true")
    sc.add_argument("--seed", type=int)
    sc.add_argument("--config")
    sc.add_argument("--restarts", type=int)
    sc.add_argument("--max-iters", dest="max_iters", type=int)
    sc.add_argument("--n-jobs", dest="n_jobs", type=int)
    sc.add_argument("--out", required=True)
    sc.add_argument("--format", choices=("csv", "json"), default="csv")
    sc.add_argument("-v", "--verbose", action="store_true")
    sc.set_defaults(func=cmd_scan)

    ge = sub.add_parser("geometry", help="closed-form boundary checks")
    gsub = ge.add_subparsers(dest="action", required=True)
    sp = gsub.add_parser("sphere-check")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--tol", type=float, default=1e-4)
    sp.set_defaults(func=cmd_sphere_check)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
