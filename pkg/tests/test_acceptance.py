"""End-to-end acceptance checks, one PASS/FAIL line per criterion.

The boundary-geometry criterion runs the optimizer on 20 and 100 grid points
and takes the better part of an hour on one core; set QUDITBELL_SKIP_LONG=1
to skip those two.
"""
import json
import math
import os
import time

import numpy as np
import pytest

from quditbell import bases, cli, nonlocality as nl, scanner as sc, separability as sp, states as st
from quditbell import qubit_geometry as qg
from quditbell.matcore import random_density, random_unitary
from quditbell.optimizer import NelderMeadConfig, maximize_chsh

SKIP_LONG = os.environ.get("QUDITBELL_SKIP_LONG", "") not in ("", "0")

TABLE_I = {2: 3.41421, 3: 3.31738, 4: 3.28427, 5: 3.26908, 6: 3.26086, 7: 3.25592}
TABLE_ID = {2: 2.82843, 3: 2.87293, 4: 2.89624, 5: 2.91054, 6: 2.92020, 7: 2.92716}
TABLE_R_I = {2: 29.2893, 3: 15.9965, 4: 12.4446, 5: 10.8979, 6: 10.0555, 7: 9.5332}
TABLE_R_ID = {2: 29.2893, 3: 30.3848, 4: 30.9450, 5: 31.2843, 6: 31.5116, 7: 31.6744}
PSI_MV_MAX = 2.9149


@pytest.fixture
def report(capsys):
    def emit(criterion, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}")
        assert ok, detail
    return emit


def cli_json(capsys, *argv):
    assert cli.main(list(argv)) == 0
    return json.loads(capsys.readouterr().out)


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


# 1, 2 ---------------------------------------------------------------------

def test_c1_cglmp_values_of_maximally_entangled_state(capsys, report):
    rows, secs = timed(lambda: cli_json(capsys, "cglmp", "analytic", "--d", *map(str, range(2, 8))))
    err = max(max(abs(r["I"] - TABLE_I[r["d"]]), abs(r["I_d"] - TABLE_ID[r["d"]])) for r in rows)
    report("1 (I, I_d for d=2..7)", err < 5e-5 and secs < 1, f"max |err| = {err:.2e}, {secs:.3f} s")


def test_c2_noise_thresholds(capsys, report):
    rows, secs = timed(lambda: cli_json(capsys, "cglmp", "analytic", "--d", *map(str, range(2, 8))))
    err = max(max(abs(r["r_max_I_percent"] - TABLE_R_I[r["d"]]),
                  abs(r["r_max_Id_percent"] - TABLE_R_ID[r["d"]])) for r in rows)
    report("2 (r_max percentages)", err < 5e-5 and secs < 1, f"max |err| = {err:.2e}, {secs:.3f} s")


# 3, 4 ---------------------------------------------------------------------

@pytest.mark.parametrize("d,budget", [(2, 120), (3, 120), (4, 600)])
def test_c3_optimizer_on_maximally_entangled_state(capsys, report, d, budget):
    out, secs = timed(lambda: cli_json(capsys, "cglmp", "maximize", "--state", f"gbell:{d},0,0",
                                       "--d", str(d), "--seed", "0", "--restarts", "10"))
    ok = out["best_value"] >= TABLE_ID[d] - 1e-3 and secs < budget
    report(f"3 (maximize I_d, d={d})", ok,
           f"best {out['best_value']:.6f} vs table {TABLE_ID[d]}, {secs:.1f} s (budget {budget} s)")


def test_c4_most_violating_qutrit_state(capsys, report):
    out, secs = timed(lambda: cli_json(capsys, "cglmp", "maximize", "--state", "psi_mv",
                                       "--d", "3", "--seed", "0", "--restarts", "10"))
    lam, _ = nl.bell_operator(nl.analytic_settings(3), "I_d").max_eigen()
    ok = abs(out["best_value"] - PSI_MV_MAX) < 1e-3 and abs(lam - PSI_MV_MAX) < 1e-4
    report("4 (psi_mv maximum and operator eigenvalue)", ok,
           f"optimizer {out['best_value']:.6f}, lambda_max {lam:.6f}, {secs:.1f} s")


# 5 ------------------------------------------------------------------------

def test_c5_chsh(report):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for i in range(200):
        rho = random_density(4, rng, rank=int(rng.integers(1, 5)))
        res = maximize_chsh(rho, NelderMeadConfig(restarts=3, seed=i))
        worst = max(worst, abs(res.best_value - nl.horodecki_max_chsh(rho)))
    singlet = nl.horodecki_max_chsh(st.bell_qubit("psi-").matrix)
    p_star = nl.werner_chsh_threshold()
    ok = worst < 1e-3 and abs(singlet - 2 * math.sqrt(2)) < 1e-6 and abs(p_star - 1 / math.sqrt(2)) < 1e-4
    report("5 (CHSH: optimizer vs closed form, singlet, Werner threshold)", ok,
           f"max gap {worst:.2e} over 200 states, singlet {singlet:.9f}, threshold {p_star:.9f}")


# 6 ------------------------------------------------------------------------

def test_c6_determinants_and_roots(report):
    axis = np.linspace(-0.2, 1.0, 20)
    worst = 0.0
    for a in axis:
        for b in axis:
            s = st.slice2(a, b)
            worst = max(worst, abs(np.linalg.det(sp.simplex_blocks(s)[0]).real - sp.detB0_slice2(a, b)))
            for g in axis:
                for fam, closed in ((st.slice3_line, sp.detB0_slice3_line),
                                    (st.slice3_offline, sp.detB0_slice3_offline)):
                    B0 = sp.simplex_blocks(fam(a, b, g))[0]
                    worst = max(worst, abs(np.linalg.det(B0).real - closed(a, b, g)))
    root = sp.isotropic_ppt_threshold(3)
    centre = sp.detB0_slice3_line(1 / 3, 1 / 3, 1 / 3)
    ok = worst < 1e-10 and abs(root - 0.25) < 1e-9 and abs(centre) < 1e-12
    report("6 (det B0 closed forms, isotropic PPT root, line-state zero)", ok,
           f"max det gap {worst:.2e}, root {root:.12f}, centre {centre:.1e}")


# 7 ------------------------------------------------------------------------

def _sphere_run(capsys, tmp_path, grid):
    out = tmp_path / f"boundary_{grid}.csv"
    cli_json(capsys, "scan", "--family", "slice3-line", "--grid", str(grid), "--mode", "boundary",
             "--optimize", "--seed", "0", "--restarts", "10", "--out", str(out), "--format", "csv")
    stats = cli_json(capsys, "geometry", "sphere-check", "--in", str(out))
    return stats, out


@pytest.mark.skipif(SKIP_LONG, reason="QUDITBELL_SKIP_LONG set")
def test_c7_sphere_fit_smoke(capsys, report, tmp_path):
    (stats, _), secs = timed(lambda: _sphere_run(capsys, tmp_path, 3))
    ok = stats["all_within_tolerance"] and secs < 600
    report("7 smoke (20 scan points)", ok,
           f"{stats['n_points']} boundary points ({stats['n_skipped']} with max <= 2 skipped), "
           f"max residual {stats['max_residual']:.2e}, {secs:.0f} s")


@pytest.mark.skipif(SKIP_LONG, reason="QUDITBELL_SKIP_LONG set")
def test_c7_sphere_fit_full(capsys, report, tmp_path):
    (stats, _), secs = timed(lambda: _sphere_run(capsys, tmp_path, 7))
    ok = stats["all_within_tolerance"] and secs < 7200
    report("7 (100 scan points)", ok,
           f"{stats['n_points']} boundary points ({stats['n_skipped']} with max <= 2 skipped), "
           f"max residual {stats['max_residual']:.2e}, {stats['n_sphere']} sphere / "
           f"{stats['n_plane']} plane, {secs:.0f} s")


# 8 ------------------------------------------------------------------------

def test_c8_property_suites(report):
    rng = np.random.default_rng(8)
    t0 = time.perf_counter()
    checks = {}

    w = 0.0
    for d in range(2, 6):
        om = np.exp(2j * np.pi / d)
        for k, l, i, j in np.ndindex(d, d, d, d):
            lhs = bases.weyl_operator(d, k, l) @ bases.weyl_operator(d, i, j)
            w = max(w, np.abs(lhs - om ** (l * i) * bases.weyl_operator(d, k + i, l + j)).max())
        V = np.array([st.bell_vector(d, k, l) for k in range(d) for l in range(d)])
        w = max(w, np.abs(V.conj() @ V.T - np.eye(d * d)).max())
    checks["Weyl relations and Bell orthonormality"] = w < 1e-12

    tr = 0.0
    for d in range(2, 6):
        S = nl.MeasurementSettings(d, *[random_unitary(d, rng) for _ in range(4)])
        tr = max(tr, abs(np.trace(nl.bell_operator(S, "I_d").matrix)))
    checks["Bell operator traceless"] = tr < 1e-12

    gap = 0.0
    for _ in range(50):
        rho = random_density(4, rng)
        P = nl.joint_probabilities(rho, nl.MeasurementSettings(2, *[random_unitary(2, rng) for _ in range(4)]))
        gap = max(gap, abs(nl.cglmp_Id_from_probs(P) - nl.chsh_from_probs(P)))
    checks["qubit I_2 equals CHSH"] = gap < 1e-10

    agree = all(qg.octahedron_membership(t, 1e-9) == (sp.ppt_report(qg.lmm_state(t), (2, 2)) >= -1e-9)
                for t in qg.sample_tetrahedron(500, rng))
    checks["octahedron equals PPT on 500 samples"] = agree

    spread = 0.0
    for d in (3, 5):
        for _ in range(10):
            s = st.SimplexState(d, rng.dirichlet(np.ones(d * d)).reshape(d, d))
            spec = [np.linalg.eigvalsh(B) for B in sp.simplex_blocks(s)]
            spread = max(spread, max(np.abs(x - spec[0]).max() for x in spec))
    checks["blocks isospectral for odd d"] = spread < 1e-12

    worst_ppt = np.inf
    kept = 0
    while kept < 30:
        s = st.SimplexState(3, rng.dirichlet(np.ones(9)).reshape(3, 3))
        if sp.simplex_ppt_min_eig(s) < 0:
            continue
        kept += 1
        A, B = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)) for _ in range(2))
        K = np.kron(A, B)
        out = K @ s.density().matrix @ K.conj().T
        worst_ppt = min(worst_ppt, sp.ppt_report(out / np.trace(out).real, (3, 3)))
    checks["PPT kept under product operations"] = worst_ppt >= -1e-10

    worst_norm = max(sp.realignment_norm(np.kron(random_density(3, rng), random_density(3, rng)), (3, 3))
                     for _ in range(100))
    checks["realignment norm <= 1 on products"] = worst_norm <= 1 + 1e-10

    lin = 0.0
    for _ in range(20):
        mu = st.SimplexState(3, rng.dirichlet(np.ones(9)).reshape(3, 3)).density().matrix
        S = nl.MeasurementSettings(3, *[random_unitary(3, rng) for _ in range(4)])
        base = nl.cglmp_Id(mu, S)
        for a in (0.1, 0.45, 0.8):
            rho_a = (1 - a) * np.eye(9) / 9 + a * mu
            lin = max(lin, abs(nl.cglmp_Id(rho_a, S) - a * base))
    checks["noise scaling is linear"] = lin < 1e-10

    secs = time.perf_counter() - t0
    failed = [k for k, v in checks.items() if not v]
    report("8 (property suites)", not failed and secs < 30,
           f"{len(checks) - len(failed)}/{len(checks)} hold in {secs:.1f} s" + (f"; failed: {failed}" if failed else ""))


# 9 ------------------------------------------------------------------------

def test_c9_witness_polynomials(report):
    at_iso = sp.witness_boundary_slice2(1 / 4, 0)
    recs = sc.scan("slice2", 20)
    hits = [r for r in recs if r.ppt_min_eig >= 0 and min(r.witness_1, r.witness_2) < 0]
    report("9 (slice2 witness polynomial)", at_iso == 0 and len(hits) >= 1,
           f"value at (1/4, 0) = {at_iso!r}, {len(hits)} PPT points with negative polynomial")
