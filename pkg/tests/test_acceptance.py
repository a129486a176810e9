"""Acceptance criteria; each test prints one PASS/FAIL line (run with ``-s``)."""
import math
import time

import numpy as np
import scipy.linalg

from conejsr import families as fam
from conejsr.bounds import jsr_bracket, slice_jsr_lower, subhomogeneous_sandwich, \
    trajectory_divergence_check
from conejsr.cone import ConeContext, dominance_lower, dominance_upper, hilbert_distance, \
    thompson_distance
from conejsr.maps import Compose, Family, Linear, asymptotic_infinity, asymptotic_zero, \
    log_uniform_point
from conejsr.polytope import run_polytope, verify_certificate
from conejsr.spectral import PowerConfig, collatz_wielandt_bracket, eigencurve, power_iterate


def report(n, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}", flush=True)
    assert ok, detail


def test_criterion_1_linear_pair():
    A1, A2 = fam.LINEAR_PAIR
    P = A1 @ A2
    tr, det = np.trace(P), np.linalg.det(P)
    oracle = math.sqrt((tr + math.sqrt(tr * tr - 4 * det)) / 2)
    t = time.perf_counter()
    cert = run_polytope(fam.linear_pair(), [0, 1])
    dt = time.perf_counter() - t
    err = abs(cert.alpha - oracle)
    ok = cert.certified and err <= 1e-10 and len(cert.vertices) == 4 and dt < 1.0
    report(1, ok, f"status={cert.status} alpha={cert.alpha:.15f} |err|={err:.1e} "
                  f"vertices={len(cert.vertices)} time={dt:.3f}s")


def test_criterion_2_power_mean_pair():
    F = fam.power_mean_pair()
    t = time.perf_counter()
    cert = run_polytope(F, [0, 1])
    ok_v, rep = verify_certificate(F, cert)
    b = jsr_bracket(F, 6)
    dt = time.perf_counter() - t
    a = cert.alpha
    bracketed = b.lower <= a * (1 + 1e-12) and a <= b.upper * (1 + 1e-12)
    ok = cert.certified and cert.rounds <= 4 and ok_v and bracketed and a - b.lower < 1e-4 \
        and dt < 10.0
    report(2, ok, f"status={cert.status} rounds={cert.rounds} verify={ok_v} alpha={a:.12f} "
                  f"L6={b.lower:.12f} U6={b.upper:.6f} alpha-L6={a - b.lower:.1e} time={dt:.2f}s")


def test_criterion_3_perron_oracle():
    rng = np.random.default_rng(2024)
    cfg = PowerConfig(max_iters=20000)
    worst_err = worst_width = 0.0
    for _ in range(100):
        n = int(rng.integers(1, 9))
        A = fam.random_irreducible(rng, n)
        oracle = max(abs(scipy.linalg.eigvals(A)))
        ep = power_iterate(Linear(A), np.ones(n), cfg)
        worst_err = max(worst_err, abs(ep.value - oracle))
        worst_width = max(worst_width, ep.bracket[1] - ep.bracket[0])
    ok = worst_err <= 1e-8 and worst_width <= 1e-8
    report(3, ok, f"100 matrices max|err|={worst_err:.1e} max CW width={worst_width:.1e}")


def test_criterion_4_eigencurve():
    grid = np.logspace(-4, 4, 20)
    pairs, rep = eigencurve(fam.saturating_map(), grid, dim=1)
    err = max(abs(r - 1 / (1 + c)) for r, c in zip(rep.rho, grid))
    e0 = abs(rep.rho_zero_est - 1.0)
    einf = abs(rep.rho_inf_est - 0.0)
    ok = err <= 1e-8 and all(rep.monotone_ok) and all(rep.order_ok) and e0 <= 1e-3 and einf <= 1e-3
    report(4, ok, f"max|rho_c-1/(1+c)|={err:.1e} monotone={all(rep.monotone_ok)} "
                  f"order={all(rep.order_ok)} |rho0-1|={e0:.1e} |rho_inf|={einf:.1e}")


def test_criterion_5_sandwich():
    F = fam.random_ann_family(np.random.default_rng(7), n=3, m=2, activation="tanh")
    ctx = ConeContext(3)
    sw = subhomogeneous_sandwich(F, 4, ctx)
    rows = []
    ok = True
    for c in (1e-3, 1.0, 1e3):
        mid = slice_jsr_lower(F, c, 2, PowerConfig(), ctx)[0]
        good = sw.lower <= mid + 1e-12 and mid <= sw.upper + 1e-6
        ok &= good
        rows.append(f"c={c:g}:{mid:.8f}")
    report(5, ok, f"lower={sw.lower:.8f} upper={sw.upper:.8f} " + " ".join(rows))


def test_criterion_6_harmonic():
    F = fam.harmonic_family()
    f = F.maps[0]
    # lower bound from the boundary eigenvectors, upper bounds from interior points nearing them
    lo = min(collatz_wielandt_bracket(f, e)[0] for e in (np.array([1.0, 0.0]), np.array([0.0, 1.0])))
    hi = min(collatz_wielandt_bracket(f, np.array([t, 1.0]))[1] for t in 10.0 ** np.arange(0, 16))
    a, x2 = 0.5, 2.0
    x = np.array([a * x2, x2])
    y, growth_ok = x.copy(), True
    for k in range(1, 101):
        y = f(y)
        growth_ok &= bool(y[0] >= (a + k * a / (a + 1)) * x2 * (1 - 1e-12))
    traj = trajectory_divergence_check(F, x, radius=0.1, horizon=100, trials=20,
                                       switching=[0] * 100)
    ok = lo == 1.0 and hi - 1.0 <= 1e-12 and growth_ok and not traj.violations
    report(6, ok, f"CW bracket=[{lo}, {hi:.13f}] growth bound k<=100={growth_ok} "
                  f"f^100(x)_1={y[0]:.3f} trajectory violations={len(traj.violations)}")


def test_criterion_7_composition_limit():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(10):
        F = fam.random_ann_family(rng, n=3, m=2, activation="tanh", scale=1.0)
        f1, f2 = F.maps
        for lim, c in ((asymptotic_infinity, 1e14), (asymptotic_zero, 1e-9)):
            lhs = lim(Compose(f1, f2), dim=3)
            g1, g2 = lim(f1, dim=3), lim(f2, dim=3)
            for _ in range(100):
                x = log_uniform_point(rng, 3)
                a, b = lhs(x), g1(g2(x))
                numeric = f1(f2(c * x)) / c
                for ref in (b, numeric):
                    worst = max(worst, float(np.max(np.abs(a - ref) / np.abs(ref))))
    report(7, worst <= 1e-8, f"1000 samples x 2 limits vs composed limits and f(cx)/c, "
                             f"max rel diff={worst:.1e}")


def _catalog():
    rng = np.random.default_rng(5)
    maps = list(fam.linear_pair().maps) + list(fam.power_mean_pair().maps)
    maps += list(fam.harmonic_family().maps) + list(fam.mixing_family(3).maps)
    for act in ("tanh", "relu", "sigmoid", "softplus", "saturating"):
        maps += list(fam.random_ann_family(rng, 2, 1, act, bias=True).maps)
    return maps


def test_criterion_8_property_suites():
    rng = np.random.default_rng(8)
    maps = _catalog()
    counts = dict.fromkeys(("order", "subhomogeneous", "thompson", "reciprocal", "projective"), 0)
    rel = 1e-10
    for _ in range(10_000):
        f = maps[int(rng.integers(len(maps)))]
        x = log_uniform_point(rng, 2)
        y = log_uniform_point(rng, 2)
        lam = float(np.exp(rng.uniform(0, 4)))
        fx, fy = f(x), f(y)
        z = x + y
        if np.any(f(z) < fx * (1 - rel) - 1e-300):
            counts["order"] += 1
        if np.any(f(lam * x) > lam * fx * (1 + rel)):
            counts["subhomogeneous"] += 1
        dx = thompson_distance(x, y)
        if np.all(fx > 0) and np.all(fy > 0) and thompson_distance(fx, fy) > dx * (1 + rel) + 1e-14:
            counts["thompson"] += 1
        if abs(dominance_upper(x, y) * dominance_lower(y, x) - 1) > rel:
            counts["reciprocal"] += 1
        s, t = float(np.exp(rng.uniform(-3, 3))), float(np.exp(rng.uniform(-3, 3)))
        dh = hilbert_distance(x, y)
        if abs(hilbert_distance(s * x, t * y) - dh) > rel * max(1.0, dh) \
                or abs(thompson_distance(s * x, s * y) - dx) > rel * max(1.0, dx):
            counts["projective"] += 1
    ok = not any(counts.values())
    report(8, ok, "10000 tuples, violations " + " ".join(f"{k}={v}" for k, v in counts.items()))


def test_criterion_9_bracket_consistency():
    rng = np.random.default_rng(9)
    families = [("linear_pair", fam.linear_pair(), 6), ("power_mean", fam.power_mean_pair(), 6),
                ("mixing", fam.mixing_family(3), 3)]
    for i in range(3):
        mats = tuple(Linear(fam.random_irreducible(rng, 3)) for _ in range(2))
        families.append((f"random{i}", Family(mats, 3), 5))
    bad_order = bad_fekete = 0
    for name, F, k in families:
        b = jsr_bracket(F, k, cfg=PowerConfig(max_iters=2000))
        L = [r[1] for r in b.rows]
        U = [r[2] for r in b.rows]
        bad_order += sum(lk > uj * (1 + 1e-12) for lk in L for uj in U)
        g = [kk * math.log(u) for kk, u in enumerate(U, start=1)]
        for p in range(1, k + 1):
            for q in range(1, k + 1 - p):
                if g[p + q - 1] > g[p - 1] + g[q - 1] + 1e-9:
                    bad_fekete += 1
    ok = bad_order == 0 and bad_fekete == 0
    report(9, ok, f"{len(families)} families, L_k<=U_j violations={bad_order} "
                  f"Fekete violations={bad_fekete}")
