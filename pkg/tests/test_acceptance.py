"""Exit criteria, each at its stated tolerance and time budget.

Every test records one PASS/FAIL line, repeated in the terminal summary.
"""
import time

import numpy as np
import pytest

from tubetop.hardy import U2, BasisIndex, Truncation, extract_AB, gram_matrix, multiplication_matrix
from tubetop.jordan import DomainFactor, generic_norm_arr, pfaffian, standard_J, triple_product_arr
from tubetop.shilov import sample_boundary_arr
from tubetop.suites import (
    U2_SIZES, block_symbols, factorization_symbols, gk_symbols, laurent_poly,
    random_element_arr,
)
from tubetop.symbols import constant, laurent, norm_pow
from tubetop.toeplitz import block_index, finite_section_index, fredholm_proxy, u2_reduction_check
from tubetop.winding import factorize_check, uniqueness_search, winding_vector

pytestmark = pytest.mark.acceptance

JORDAN_FACTORS = (
    [DomainFactor("I", n) for n in (1, 2, 3, 4)]
    + [DomainFactor("II", m) for m in (2, 4)]
    + [DomainFactor("III", n) for n in (1, 2, 3, 4)]
    + [DomainFactor("IV", n) for n in (3, 4, 5)]
)


def test_c01_jordan_identity(criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for f in JORDAN_FACTORS:
        x, y, z, u, v = (random_element_arr(f, rng, 100) for _ in range(5))
        T = lambda a, b, c: triple_product_arr(f.kind, a, b, c)
        r = T(x, y, T(z, u, v)) + T(z, T(y, x, u), v) - T(T(x, y, z), u, v) - T(z, u, T(x, y, v))
        worst = max(worst, float(np.abs(r).max()))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-10 and dt < 5
    criterion(1, ok, f"Jordan identity: max residual {worst:.1e} over {len(JORDAN_FACTORS)} "
                     f"factors x 100 unit-norm tuples, {dt:.2f} s (< 5 s)")
    assert ok


def test_c02_generic_norm_laws(criterion):
    rng = np.random.default_rng(2)
    hom = uni = 0.0
    for f in JORDAN_FACTORS:
        z = random_element_arr(f, rng, 50)
        lam = rng.standard_normal(50) + 1j * rng.standard_normal(50)
        scaled = lam.reshape((-1,) + (1,) * len(f.shape)) * z
        rhs = lam ** f.rank * generic_norm_arr(f, z)
        hom = max(hom, float(np.max(np.abs(generic_norm_arr(f, scaled) - rhs)
                                    / np.maximum(1, np.abs(rhs)))))
        pts = sample_boundary_arr(f, rng, 1000)
        uni = max(uni, float(np.abs(np.abs(generic_norm_arr(f, pts)) - 1).max()))
    pf = 0.0
    for m in (2, 4, 6, 8):
        for _ in range(50):
            a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
            a = a - a.T
            d = np.linalg.det(a)
            pf = max(pf, abs(pfaffian(a) ** 2 - d) / max(1, abs(d)))
    pfj = all(pfaffian(standard_J(m)) == 1 for m in (2, 4, 6, 8))
    ok = hom <= 1e-10 and uni <= 1e-9 and pf <= 1e-10 and pfj
    criterion(2, ok, f"norm laws: homogeneity {hom:.1e}, ||N|-1| {uni:.1e} on 1000 boundary "
                     f"points/type, Pf^2-det {pf:.1e} (<= 8x8), Pf(J)=1 exactly: {pfj}")
    assert ok


def test_c03_winding_normalization(criterion):
    t0 = time.perf_counter()
    failures = []
    cases = 0
    for f in JORDAN_FACTORS:
        for m in range(-3, 4):
            rep = winding_vector(norm_pow(f.label, [m]), base_points=8, seed=cases)
            cases += 1
            if rep.k != (m,) or rep.raw_windings != (f.rank * m,) or rep.base_point_count != 8:
                failures.append((f.label, m, rep.k))
    dom = "I2xIV3xII4"
    for j in range(3):
        for m in range(-3, 4):
            k = [0, 0, 0]
            k[j] = m
            cases += 1
            if winding_vector(norm_pow(dom, k), base_points=8, seed=cases).k != tuple(k):
                failures.append((dom, k))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 30
    criterion(3, ok, f"winding(N_j^m) = m e_j: {cases - len(failures)}/{cases} cases, "
                     f"8 base points each, {dt:.1f} s (< 30 s)")
    assert ok, failures


def test_c04_factorization_round_trip(criterion):
    syms = factorization_symbols(50, seed=4)
    bad = []
    for i, (phi, k) in enumerate(syms):
        got = winding_vector(phi, base_points=8, seed=i).k
        fc = factorize_check(phi, k, loops=8, seed=i)
        hits = uniqueness_search(phi, (0,) * len(k), radius=3, loops=2, seed=i)
        if got != k or not fc.ok or hits != [k]:
            bad.append((str(phi.domain), k, got.to_json(), fc.ok, hits))
    ok = not bad
    ndom = sorted({len(p.domain) for p, _ in syms})
    criterion(4, ok, f"factorization round trip: {len(syms) - len(bad)}/{len(syms)} symbols on "
                     f"{ndom}-factor domains recover k, pass factorize_check, unique in [-3,3]^n")
    assert ok, bad


def test_c05_hardy_model(criterion):
    t = Truncation(-3, 3, 3)
    g = gram_matrix(t)
    gres = float(np.abs(g - np.eye(len(g))).max())
    op = multiplication_matrix(norm_pow(U2, [1]), t)
    pos = {b: i for i, b in enumerate(op.indices)}
    shift = np.zeros_like(op.matrix)
    for b, c in pos.items():
        if b.l < t.l_max:
            shift[pos[BasisIndex(b.l + 1, b.d, b.j, b.k)], c] = 1
    sres = float(np.abs(op.matrix - shift).max())
    # P_D kills l < 0: the compressed N^-1 annihilates level 0, the identity
    # compresses to the identity on l >= 0 only
    inv = multiplication_matrix(norm_pow(U2, [-1]), t, compress=True)
    lvl0 = inv.positions(lambda b: b.l == 0)
    kill = float(np.abs(inv.matrix[:, lvl0]).max())
    one = multiplication_matrix(constant(U2, 1), t, compress=True)
    proj = float(np.abs(one.matrix - np.eye(len(one.indices))).max())
    only_hardy = all(b.l >= 0 for b in one.indices)
    ok = gres <= 1e-8 and sres <= 1e-8 and kill <= 1e-8 and proj <= 1e-8 and only_hardy
    criterion(5, ok, f"Hardy model U(2), d_max=3, |l|<=3 ({len(g)} functions): gram {gres:.1e}, "
                     f"N shift {sres:.1e}, P_D on l<0 {max(kill, proj):.1e}")
    assert ok


def test_c06_ab_split(criterion):
    t = Truncation(-2, 2, 3)
    us = [np.diag([1, 0]), np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]]),
          np.diag([0, 1])]
    rng = np.random.default_rng(6)
    us += [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(5)]
    leaks, shifts = [], []
    for u in us:
        ab = extract_AB(u, t, raise_on_leak=False)
        leaks.append(ab.leak)
        shifts.append(ab.shift_residual())
    ok = max(leaks) <= 1e-8
    criterion(6, ok, f"A_u/B_u split for E11,E12,E21,E22 + 5 random u: max leak "
                     f"{max(leaks):.1e} (interior degrees), two-level residual {max(shifts):.1e}")
    assert ok


def test_c07_gohberg_krein(criterion):
    t0 = time.perf_counter()
    bad = []
    syms = gk_symbols(30, seed=7)
    for i, (f, k) in enumerate(syms):
        v = finite_section_index(f, sizes=(32, 64, 128, 256), seed=i)
        if not (v.analytic_index == -k and v.topological_index == (k,) and v.match):
            bad.append((i, k, v.analytic_index))
    dt = time.perf_counter() - t0
    ks = sorted({k for _, k in syms})
    ok = not bad and dt < 60
    criterion(7, ok, f"z^k exp(p), k in {ks}: index stable by M=256 and = -k for "
                     f"{len(syms) - len(bad)}/30, {dt:.1f} s (< 60 s)")
    assert ok, bad


def test_c08_u2_reduction(criterion):
    t0 = time.perf_counter()
    t = Truncation(0, 4, 2)
    rng = np.random.default_rng(8)
    fs = [(laurent({1: 1}), 1), (laurent({2: 1, 0: 0.1}), 2), (laurent({-1: 1, 2: 0.2}), -1)]
    fs += [laurent_poly(rng, 3) for _ in range(12)]
    worst, bad = 0.0, []
    for f, lead in fs:
        r = u2_reduction_check(f, t, sizes=U2_SIZES)
        worst = max(worst, r.sector_residual, r.cross_residual)
        if not (r.ok and r.sector_index == -lead):
            bad.append((f.meta, r.sector_index))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and not bad and dt < 120
    criterion(8, ok, f"U(2) reduction, d_max=2, l_max=4, {len(fs)} symbols of degree <= 3: "
                     f"sector residual {worst:.1e}, per-sector index = -k for "
                     f"{len(fs) - len(bad)}/{len(fs)}, {dt:.1f} s (< 120 s)")
    assert ok, bad


def test_c09_block_index(criterion):
    syms = block_symbols(10, seed=9)
    bad = []
    for i, (F, k) in enumerate(syms):
        v = block_index(F, seed=i)
        if not (v.match and v.analytic_index == -k):
            bad.append((i, F.size, k, v.analytic_index))
    ok = not bad
    sizes = sorted({F.size for F, _ in syms})
    criterion(9, ok, f"block symbols ({sizes} x same): index = -winding(det) for "
                     f"{len(syms) - len(bad)}/{len(syms)}")
    assert ok, bad


def test_c10_fredholm_dichotomy(criterion):
    lam = np.exp(2j * np.pi * np.arange(8192) / 8192).reshape(-1, 1, 1)
    vanishing = {"z-1": laurent({1: 1, 0: -1}), "(z-1)^2": laurent({2: 1, 1: -2, 0: 1})}
    parts, ok = [], True
    for name, f in vanishing.items():
        r = fredholm_proxy(f)
        good = r.analytic_index == "unstable" and r.sigma_min[-1] < 1e-3 and r.decaying
        ok &= good
        parts.append(f"{name}: sigma_min(256)={r.sigma_min[-1]:.1e} "
                     f"{'<' if r.sigma_min[-1] < 1e-3 else '>='} 1e-3, "
                     f"index {r.analytic_index}")
    rng = np.random.default_rng(10)
    cands = [f for f, _ in gk_symbols(20, seed=10)] + [laurent_poly(rng, 3, scale=0.1)[0]
                                                       for _ in range(20)]
    lows = []
    for f in cands:
        if np.abs(f.evaluate([lam])).min() >= 0.5:
            lows.append(min(fredholm_proxy(f).sigma_min))
    bounded = len(lows) >= 10 and min(lows) >= 0.1
    ok &= bounded
    parts.append(f"{len(lows)} symbols with min|f|>=0.5: min sigma {min(lows):.2f} >= 0.1")
    criterion(10, ok, "Fredholm dichotomy: " + "; ".join(parts))
    assert ok, parts
