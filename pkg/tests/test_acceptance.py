"""Acceptance criteria, one test each.  Every test records a PASS/FAIL line
(printed at the end of the pytest run, or directly when run as a script)."""

import math
import tempfile
import time

import mpmath
import numpy as np
import pytest
from mpmath import mpf

from quadmix import formulas as F
from quadmix.cuts import exact_face_bottleneck, heuristic_bottleneck
from quadmix.formulas import precision
from quadmix.harness import ExperimentConfig, run_mixing_experiment, pearson
from quadmix.maps import Quadrangulation, validate_map
from quadmix.trees import (enumerate_quadrangulations, quadrangulations_from_codes,
                           sample_quadrangulation)
from quadmix.walks import (face_kernel, relaxation_time, tv_mixing_time, uniform_mixing_time,
                           vertex_kernel)

RESULTS = {}


def record(key, ok, text):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {key}: {text}"
    RESULTS[key] = line
    print(line)
    assert ok, line


def test_criterion_1_enumeration():
    t0 = time.perf_counter()
    counts = [len(enumerate_quadrangulations(n)) for n in (1, 2, 3, 4)]
    dt = time.perf_counter() - t0
    exact = [F.count_quads(n) for n in (1, 2, 3, 4)]
    record("1", counts == [2, 9, 54, 378] == exact and dt < 120,
           f"codes per n=1..4 {counts}, formula {exact}, {dt:.2f}s")


def test_criterion_2_counting():
    same = all(F.count_boundary_quads(n, 1) == F.count_quads(n) for n in range(51))
    with precision():
        n = 10 ** 4
        ratio = mpmath.exp(F.log_count_quads(n) - (mpmath.log(2 / mpmath.sqrt(mpmath.pi))
                                                    - mpf(5) / 2 * mpmath.log(n) + n * mpmath.log(12)))
    ok = same and 0.99 <= ratio <= 1.01
    record("2", ok, f"boundary(n,1)=count(n) for n<=50: {same}; asymptotic ratio at 1e4 = {float(ratio):.6f}")


def test_criterion_3_kappa1():
    with precision():
        err = abs(F.kappa_coeff(1) - 32 / mpmath.sqrt(3 * mpmath.pi))
    record("3", err <= 1e-10, f"|kappa_1 - 32/sqrt(3 pi)| = {mpmath.nstr(err, 3)}")


def test_criterion_4_iterates():
    worst = mpf(0)
    with precision():
        for p in (0.01, 0.1, 0.3, 0.5, 0.7, 0.9):
            for u in (0, 0.2, 0.5, 0.8):
                for r in range(21):
                    d = abs(F.phi_iterate(u, p, r, "closed") - F.phi_iterate(u, p, r, "numeric"))
                    worst = max(worst, d)
        fixed = max(abs(F.phi(1, p) - 1) for p in (0.01, 0.1, 0.3, 0.5, 0.7, 0.9))
    record("4", worst <= 1e-9 and fixed <= 1e-12,
           f"max |closed - numeric| = {mpmath.nstr(worst, 3)}, max |phi(1,p) - 1| = {mpmath.nstr(fixed, 3)}")


def test_criterion_5_mean_hull():
    worst = 0.0
    for r in range(1, 51):
        m = F.mean_hull(r)
        exact = mpf(m.numerator) / m.denominator
        worst = max(worst, float(abs(F.mean_hull_from_laplace(r) / exact - 1)))
    ratio = float(F.mean_hull(200)) / 200 ** 4 / 0.375
    record("5", worst <= 1e-6 and abs(ratio - 1) <= 0.01,
           f"max rel. error of -dL/dlam vs mean_hull over r<=50 = {worst:.2e}; "
           f"mean_hull(200)/200^4 / (3/8) = {ratio:.5f} (needs 1 +- 0.01)")


def test_criterion_6_hull_expansion():
    lams = [float(x) for x in np.logspace(-4, -2, 9)]
    cs = []
    for r in (1, 2, 5, 10):
        for lam in lams:
            _, _, pred = F.lemma12_predict(r, lam)
            cs.append(float(abs(F.lemma12_laplace(r, lam) - pred) / mpf(lam) ** 2))
    per_r = [max(cs[i:i + 9]) / min(cs[i:i + 9]) for i in range(0, len(cs), 9)]
    ok = max(per_r) <= 10 and max(cs) < 100
    record("6", ok, f"residual/lam^2 in [{min(cs):.3g}, {max(cs):.3g}]; "
                    f"max/min per r = {[round(x, 2) for x in per_r]}")


def test_criterion_7_walks():
    for n in (10, 50):
        for seed in range(100):
            q = sample_quadrangulation(n, seed)
            vertex_kernel(q).check_exact()
            face_kernel(q).check_exact()
    path = Quadrangulation(validate_map(4, [1, 0, 3, 2], [0, 2, 1, 3], 0))
    K = vertex_kernel(path)
    tu, tt = uniform_mixing_time(K, 0.5), tv_mixing_time(K, 0.5)
    _, rel = relaxation_time(K)
    ok = (tu, tt) == (2, 1) and abs(rel - 2) < 1e-12
    record("7", ok, f"pi P = pi exact on 2x100 maps; path oracle tau={tu}, tau_tv={tt}, tau_rel={rel!r}")


TARGET_CORR = {  # target, tolerance
    ("tau_vertex_uniform", "tau_vertex_tv"): (0.9638, 0.02),
    ("tau_vertex_uniform", "tau_vertex_rel"): (0.8678, 0.03),
    ("tau_vertex_tv", "tau_vertex_rel"): (0.9576, 0.02),
    ("tau_vertex_uniform", "tau_face_uniform"): (0.5834, 0.05),
}


def _correlation_run(tv_norm):
    with tempfile.TemporaryDirectory() as d:
        cfg = ExperimentConfig([20], 10000, seed=20240607, unit="vertices", out=d, tv_norm=tv_norm)
        t0 = time.perf_counter()
        res = run_mixing_experiment(cfg)
        dt = time.perf_counter() - t0
    recs = res.records[20]
    return {k: pearson(recs, *k) for k in TARGET_CORR}, dt


def test_criterion_8_correlations():
    corr, dt = _correlation_run("half")
    parts, ok = [], dt <= 1800
    for (a, b), (target, tol) in TARGET_CORR.items():
        good = abs(corr[(a, b)] - target) <= tol
        ok &= good
        parts.append(f"{a[4:]}~{b[4:]} {corr[(a, b)]:.4f} (target {target}+-{tol}{'' if good else ' MISS'})")
    record("8", ok, "; ".join(parts) + f"; {dt:.0f}s")


def test_criterion_8_l1_variant_information():
    """Same run with the unnormalised L1 distance in the TV time (not a criterion)."""
    corr, _ = _correlation_run("l1")
    line = "; ".join(f"{a[4:]}~{b[4:]} {v:.4f}" for (a, b), v in corr.items())
    RESULTS["8-l1"] = f"[INFO] criterion 8 with the L1 (no 1/2) distance: {line}"
    print(RESULTS["8-l1"])


def test_criterion_9_trend():
    with tempfile.TemporaryDirectory() as d:
        cfg = ExperimentConfig([10, 20, 40, 80], 5000, seed=8, unit="vertices", out=d,
                               chains=("vertex:uniform",))
        res = run_mixing_experiment(cfg)
    means = []
    for n in cfg.sizes:
        vals = [r.values["tau_vertex_uniform"] / n for r in res.records[n] if not r.error]
        means.append(float(np.mean(vals)))
    ok = all(x < y for x, y in zip(means, means[1:]))
    record("9", ok, "mean tau/n at 10,20,40,80 vertices = " + ", ".join(f"{m:.4f}" for m in means))


def test_criterion_10_bottlenecks():
    enumerated = [q for n in range(1, 5) for q in quadrangulations_from_codes(enumerate_quadrangulations(n))]
    rng = np.random.default_rng(10)
    sampled = [sample_quadrangulation(int(rng.integers(1, 8)), rng) for _ in range(1000)]
    upper, bound, equal, counted = True, True, 0, 0
    for i, q in enumerate(enumerated + sampled):
        n = q.n_faces
        if n == 1:
            continue
        for obj in ("theorem3", "cheeger"):
            e, h = exact_face_bottleneck(q, obj), heuristic_bottleneck(q, obj)
            upper &= h.key >= e.key
            if obj == "theorem3" and i < len(enumerated):
                counted += 1
                equal += h.key == e.key
        hd = float(exact_face_bottleneck(q, "cheeger").key)
        tau = uniform_mixing_time(face_kernel(q), 0.5)
        bound &= tau <= 128 / hd ** 2 * (math.log(8 * n) + math.log(2))
    rate = equal / counted
    record("10", upper and bound and rate >= 0.8,
           f"heuristic >= exact: {upper}; equality rate on enumerated {rate:.3f}; mixing bound from the dual Cheeger constant: {bound}")


def test_criterion_11_boundary_exponent():
    worst, nonpos = mpf(0), True
    with precision():
        for n in range(1, 201):
            for p in range(1, n + 1):
                x = mpf(p - 1) / n
                a = F.lemma8_f(n, x)
                nonpos &= a <= 0
                worst = max(worst, abs(a - F.lemma8_f_convex(n, x)))
    record("11", nonpos and worst <= 1e-12,
           f"f_n((p-1)/n) <= 0 on 1<=p<=n<=200: {nonpos}; two-route gap {mpmath.nstr(worst, 3)}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q"]))
