"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or
``python3 tests/test_acceptance.py``.
"""

import time

import numpy as np
import pytest

from finslerium.chern import curvature_bound_estimate, gaussian_curvature_batch, hermitian_hsc_batch, hsc_batch, variational_check
from finslerium.cli import main as cli_main
from finslerium.comparison import (
    JACOBI,
    ModelSpace,
    RadialField,
    comparison_report,
    hessian_closed_form,
    index_form,
    optimal_alpha,
)
from finslerium.kahler import KahlerModel, kahler_identity_checks
from finslerium.maps import embed_map, mobius_map, power_map
from finslerium.metrics import ZOO, SamplePlan, exp_family, make_metric, poincare_disk, sample_jets
from finslerium.schwarz import SchwarzConfig, phi_trace, ratio_batch, schwarz_check
from finslerium.wirtinger import FD, JetPoint

BUDGET = 60.0
_elapsed = {}
P = poincare_disk()


def report(number, title, ok, detail):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    print(line)
    return line


@pytest.fixture(autouse=True)
def _timed(request, capsys):
    t0 = time.perf_counter()
    with capsys.disabled():
        print()
        yield
    _elapsed[request.node.name] = time.perf_counter() - t0


def criterion_1():
    Z, V = sample_jets(P, SamplePlan(50, 0.9, 1))
    K, _ = hsc_batch(P, Z, V)
    Kg = gaussian_curvature_batch(lambda z: (1 - z * np.conj(z)) ** -2, Z[0])
    err = max(np.max(np.abs(K + 4)), np.max(np.abs(Kg + 4)))
    return err <= 1e-6, f"max |K + 4| = {err:.2e} over 50 points (HSC and Gaussian)"


def criterion_2():
    worst_auto = worst_fd = 0.0
    for a, b in ((1, 0.5), (2, -0.3), (0.5, 0.4)):
        m = exp_family(a, b, 1.0, 2)
        Z, V = sample_jets(m, SamplePlan(100, 1.0, 2))
        t = np.sum(np.abs(Z) ** 2, axis=0)
        s = np.abs(np.sum(Z * np.conj(V), axis=0)) ** 2 / np.sum(np.abs(V) ** 2, axis=0)
        oracle = -2 * (a + b) * np.exp(-(a * t + b * s))
        worst_auto = max(worst_auto, float(np.max(np.abs(hsc_batch(m, Z, V)[0] - oracle))))
        worst_fd = max(worst_fd, float(np.max(np.abs(hsc_batch(m, Z, V, FD)[0] - oracle))))
    ok = worst_auto <= 1e-6 and worst_fd <= 1e-4
    return ok, f"auto {worst_auto:.2e} (tol 1e-6), fd {worst_fd:.2e} (tol 1e-4), 3 x 100 jets"


def criterion_3():
    worst = {}
    for name, radius in (("poincare-disk", 0.9), ("fubini-study", 0.9), ("euclidean", 0.9), ("hermpoly", 0.5)):
        m = make_metric(name, 2 if name in ("euclidean", "hermpoly") else None)
        Z, V = sample_jets(m, SamplePlan(100, radius, 3))
        worst[name] = float(np.max(np.abs(hsc_batch(m, Z, V)[0] - hermitian_hsc_batch(m, Z, V))))
    ok = max(worst.values()) <= 1e-5
    return ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items())


def criterion_4():
    slack, quad = np.inf, 0.0
    for K in (0.0, 0.5, 1.0, 2.0):
        space = ModelSpace.of(K)
        for rho in (0.25, 0.5, 1.0, 2.0, 4.0):
            a = optimal_alpha(K, rho)
            jac = index_form(space, rho, JACOBI)
            mid = index_form(space, rho, RadialField(a, rho))
            slack = min(slack, mid - jac, 1 / rho + K - mid)
            quad = max(quad, abs(jac - hessian_closed_form(K, rho)), abs(mid - RadialField(a, rho).closed_form(space)))
    alpha = optimal_alpha(1.0, 1.0)
    ok = slack >= -1e-10 and quad <= 1e-10 and 1.744 <= alpha <= 1.746
    return ok, f"min slack {slack:.3e}, quadrature error {quad:.1e}, optimal_alpha(1,1) = {alpha:.6f}"


def criterion_5():
    worst_bound, worst_id = np.inf, 0.0
    radii = (0.25, 0.5, 1.0, 2.0, 4.0)
    for K in (0.0, 1.0):
        rep = comparison_report(ModelSpace.of(K), radii)
        for r in rep.rows:
            if r.direction in ("rho2-orthogonal", "rho2-radial"):
                worst_bound = min(worst_bound, r.slack)
            if r.direction in ("rho2-orthogonal-ball", "rho2-radial-ball", "gradient-pairing"):
                worst_id = max(worst_id, abs(r.value - r.bound))
    for model in (KahlerModel.flat(1), KahlerModel.disk()):
        res = kahler_identity_checks(model, SamplePlan(100, 2.0 if model.kind == "flat" else 0.9, 0, 0.05)).results
        worst_bound = min(worst_bound, res["hessian_bound"].worst_slack)
        worst_id = max(worst_id, -res["gradient_pairing"].worst_slack)
    ok = worst_bound >= 0 and worst_id <= 1e-7
    return ok, f"H(rho^2) bound min slack {worst_bound:.3e}, identity residual {worst_id:.2e}"


def criterion_6():
    rep = kahler_identity_checks(KahlerModel.disk(), SamplePlan(200, 0.9, 0, 0.05))
    r = rep.results
    resid = max(-r["pairing"].worst_slack, -r["l_operator"].worst_slack, -r["gradient_pairing"].worst_slack)
    slack = min(r["hessian_bound"].worst_slack, r["disk_bound"].worst_slack)
    ok = resid <= 1e-6 and slack >= 0
    return ok, f"identity residual {resid:.2e} (tol 1e-6), inequality min slack {slack:.3e}, 200 points"


def criterion_7():
    rr = np.linspace(0.0, 0.99, 100)
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    Z = (rr[:, None] * np.exp(1j * th)[None, :]).ravel()[None, :]
    maxima = {}
    ok = True
    for f in (power_map(2), power_map(3), mobius_map(0.5), mobius_map(-0.3 + 0.6j, 1.2)):
        u = ratio_batch(f, P, P, Z, np.ones_like(Z))
        rep = schwarz_check(f, P, P, SchwarzConfig(-4, -4, plan=SamplePlan(200, 0.99, 0)))
        top = max(float(u.max()), rep.max_ratio)
        maxima[f.name] = top
        ok &= rep.verdict and top <= 1 + 1e-6 and top >= 0.9
    return ok, ", ".join(f"{k} max {v:.6f}" for k, v in maxima.items())


def criterion_8():
    H = exp_family(1, 0.5, 1, 2)
    rng_est = curvature_bound_estimate(H, SamplePlan(100, 1.0, 2))
    rep = schwarz_check(embed_map([2 ** -0.5, 2 ** -0.5]), P, H, SchwarzConfig(-4, rng_est.sup, plan=SamplePlan(200, 0.99, 0)))
    w = complex(rep.witness_z[0])
    return rep.verdict, (f"K2 = {rng_est.sup:.6f}, bound {rep.bound:.4f}, max ratio {rep.max_ratio:.6f} "
                         f"at z = {w.real:+.4f}{w.imag:+.4f}i")


def criterion_9():
    tr = phi_trace(power_map(2), P, P, 3.0, 3.0, grid=(256, 64), refine_steps=30)
    ok = (tr.maximizer is not None and tr.grad_log < 1e-6 and tr.ddbar_log <= 1e-6 and tr.boundary_ratio < 1e-6)
    return ok, f"|d log Phi| {tr.grad_log:.1e}, ddbar log Phi {tr.ddbar_log:.3f}, ring/max {tr.boundary_ratio:.1e}"


def criterion_10():
    worst = -np.inf
    names = [k for k in sorted(ZOO) if k != "degenerate"]
    for name in names:
        m = make_metric(name)
        Z, V = sample_jets(m, SamplePlan(10, 0.45 if m.domain_closed else 0.8, 4))
        for j in range(Z.shape[1]):
            chk = variational_check(m, JetPoint.of(Z[:, j], V[:, j]), count=50, seed=j)
            worst = max(worst, chk.worst_excess)
    return worst <= 1e-4, f"max (K_curve - K_G) = {worst:.2e} over {len(names)} metrics x 10 jets x 50 curves"


def criterion_11(tmp):
    suites = [
        ["validate", "--metric", "expfam", "--param", "a=1", "--param", "b=0.5", "--dim", "2", "--seed", "7"],
        ["schwarz", "--metric", "poincare", "--map", "power:2", "--k1", "-4", "--k2", "-4", "--seed", "3"],
        ["schwarz", "--metric", "poincare", "--map", "power:2", "--k1", "-4", "--k2", "-4", "--seed", "3", "--format", "csv"],
        ["kahler-check", "--samples", "50", "--seed", "2"],
        ["comparison", "--curvature", "1", "--format", "csv"],
    ]
    same = True
    for i, argv in enumerate(suites):
        blobs = []
        for run in ("a", "b"):
            out = tmp / f"{i}{run}"
            cli_main(argv + ["--out", str(out)])
            blobs.append(sorted((p.name, p.read_bytes()) for p in out.iterdir() if p.name != "manifest.json"))
        same &= blobs[0] == blobs[1] and len(blobs[0]) > 0
    return same, f"{len(suites)} CLI suites run twice, artifacts byte-identical"


CRITERIA = [
    (1, "Poincare curvature", criterion_1),
    (2, "exponential-family oracle", criterion_2),
    (3, "Hermitian reduction", criterion_3),
    (4, "comparison chain", criterion_4),
    (5, "rho^2 corollaries", criterion_5),
    (6, "Kahler identities", criterion_6),
    (7, "Schwarz-Pick reproduction", criterion_7),
    (8, "Finsler-target Schwarz", criterion_8),
    (9, "Phi maximum principle", criterion_9),
    (10, "variational one-sidedness", criterion_10),
    (11, "determinism", criterion_11),
]


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, tmp_path, capsys):
    ok, detail = fn(tmp_path) if number == 11 else fn()
    with capsys.disabled():
        report(number, title, ok, detail)
    assert ok, detail


def test_total_runtime_within_budget(capsys):
    total = sum(v for k, v in _elapsed.items() if k.startswith("test_criterion"))
    with capsys.disabled():
        print(f"acceptance total {total:.1f}s (budget {BUDGET:.0f}s)")
    assert total < BUDGET


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    t0 = time.perf_counter()
    failed = 0
    for number, title, fn in CRITERIA:
        with tempfile.TemporaryDirectory() as d:
            ok, detail = fn(Path(d)) if number == 11 else fn()
        report(number, title, ok, detail)
        failed += not ok
    print(f"acceptance total {time.perf_counter() - t0:.1f}s")
    sys.exit(1 if failed else 0)
