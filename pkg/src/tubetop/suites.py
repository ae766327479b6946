"""Invariant suites run by ``tubetop verify`` and seeded symbol generators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hardy import (
    U2, BasisIndex, Truncation, extract_AB, gram_matrix, multiplication_matrix,
)
from .jordan import (
    DomainFactor, Element, generic_norm_arr, is_maximal_tripotent, pfaffian,
    standard_J, triple_product_arr, trace_inner_product,
)
from .shilov import reduce_phase, sample_boundary, sample_boundary_arr
from .symbols import (
    CIRCLE, MatrixSymbol, constant, exp_poly, laurent, norm_pow,
)
from .toeplitz import block_index, finite_section_index, fredholm_proxy, u2_reduction_check
from .winding import factorize_check, winding_vector

# random degree-3 Laurent symbols can keep kernel tails above 1e-8 up to M = 64
U2_SIZES = (64, 128, 256, 512)

SUITES = ("jordan", "shilov", "winding", "hardy", "index")

FACTORS_SMALL = (
    [DomainFactor("I", n) for n in (1, 2, 3, 4)]
    + [DomainFactor("II", m) for m in (2, 4)]
    + [DomainFactor("III", n) for n in (1, 2, 3, 4)]
    + [DomainFactor("IV", n) for n in (3, 4, 5)]
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"name": self.name, "passed": bool(self.passed), "detail": self.detail}


def random_element_arr(factor: DomainFactor, rng, size: int) -> np.ndarray:
    shape = (size,) + factor.shape
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    if factor.kind == "II":
        z = z - np.swapaxes(z, -1, -2)
    elif factor.kind == "III":
        z = z + np.swapaxes(z, -1, -2)
    norms = np.linalg.norm(z.reshape(size, -1), axis=1)
    return z / norms.reshape((size,) + (1,) * len(factor.shape))


# -- generators ------------------------------------------------------------------

def gk_symbols(count: int, seed: int, max_k: int = 4, scale: float = 0.5):
    """``z**k * exp(p(z, conj z))`` on the circle with seeded ``k`` and small ``p``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        k = int(rng.integers(-max_k, max_k + 1))
        p = exp_poly(CIRCLE, degree=2, scale=scale, seed=int(rng.integers(2**31)))
        out.append((norm_pow(CIRCLE, [k]) * p, k))
    return out


def factorization_symbols(count: int, seed: int, domains=None, max_k: int = 3):
    """``prod_j N_j**k_j * exp(psi)`` on one- and two-factor domains."""
    domains = domains or ["I1", "I2", "II4", "III2", "IV3", "I2xI1", "IV3xIII2",
                          "II4xI2", "I1xIV4"]
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        dom = domains[i % len(domains)]
        ndom = len(dom.split("x"))
        k = [int(x) for x in rng.integers(-max_k, max_k + 1, size=ndom)]
        psi = exp_poly(dom, degree=2, scale=0.6, seed=int(rng.integers(2**31)))
        out.append((norm_pow(dom, k) * psi, tuple(k)))
    return out


def block_symbols(count: int, seed: int):
    """Seeded 2x2 and 3x3 circle matrix symbols ``L * diag(z**k_i) * R * C``.

    ``L``/``R`` are unipotent triangular with small trigonometric entries and
    ``C`` a well-conditioned constant, so ``det = det(C) z**sum(k)``.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        m = 2 + i % 2
        ks = [int(x) for x in rng.integers(-2, 3, size=m)]

        def trig():
            cs = {n: complex(*rng.normal(scale=0.3, size=2)) for n in (-1, 0, 1)}
            return laurent(cs)

        one, zero = constant(CIRCLE, 1.0), constant(CIRCLE, 0.0)
        L = MatrixSymbol([[one if a == b else (trig() if a > b else zero)
                           for b in range(m)] for a in range(m)])
        R = MatrixSymbol([[one if a == b else (trig() if a < b else zero)
                           for b in range(m)] for a in range(m)])
        D = MatrixSymbol.diag([norm_pow(CIRCLE, [k]) for k in ks])
        q, _ = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
        Cm = q @ np.diag(rng.uniform(1.0, 2.0, size=m))
        C = MatrixSymbol([[constant(CIRCLE, Cm[a, b]) for b in range(m)] for a in range(m)])
        out.append((L @ D @ R @ C, sum(ks)))
    return out


def laurent_poly(rng, degree: int = 3, lead: int | None = None, scale: float = 0.05):
    """Random Laurent polynomial of degree <= ``degree`` dominated by one term."""
    lead = int(rng.integers(-degree, degree + 1)) if lead is None else lead
    cs = {n: complex(*rng.normal(scale=scale, size=2)) for n in range(-degree, degree + 1)}
    cs[lead] = 1.0
    return laurent(cs), lead


# -- suites ----------------------------------------------------------------------

def suite_jordan(seed: int = 0, count: int = 100, **_):
    rng = np.random.default_rng(seed)
    checks = []
    for f in FACTORS_SMALL:
        x, y, z, u, v = (random_element_arr(f, rng, count) for _ in range(5))
        T = lambda a, b, c: triple_product_arr(f.kind, a, b, c)
        r = T(x, y, T(z, u, v)) + T(z, T(y, x, u), v) - T(T(x, y, z), u, v) - T(z, u, T(x, y, v))
        res = float(np.abs(r).max())
        checks.append(Check(f"jordan_identity[{f}]", res <= 1e-10, {"residual": res}))
        sym = float(np.abs(T(x, y, z) - T(z, y, x)).max())
        lam = rng.standard_normal() + 1j * rng.standard_normal()
        conj = float(np.abs(T(x, lam * y, z) - np.conj(lam) * T(x, y, z)).max())
        checks.append(Check(f"symmetry_conjlinearity[{f}]", max(sym, conj) <= 1e-12,
                            {"symmetry": sym, "conj_linear": conj}))
        B = f.basis()
        G = np.array([[trace_inner_product(Element(f, a, check=False), Element(f, b, check=False))
                       for b in B] for a in B])
        herm = float(np.abs(G - G.conj().T).max())
        ev = float(np.linalg.eigvalsh(0.5 * (G + G.conj().T)).min())
        checks.append(Check(f"gram_positive[{f}]", herm <= 1e-12 and ev > 0,
                            {"min_eigenvalue": ev, "hermitian_defect": herm}))
        zz = random_element_arr(f, rng, 20)
        lams = rng.standard_normal(20) + 1j * rng.standard_normal(20)
        lhs = generic_norm_arr(f, lams.reshape((-1,) + (1,) * len(f.shape)) * zz)
        rhs = lams ** f.rank * generic_norm_arr(f, zz)
        hom = float(np.abs(lhs - rhs).max() / max(1.0, np.abs(rhs).max()))
        checks.append(Check(f"norm_homogeneity[{f}]", hom <= 1e-10, {"residual": hom}))
        pts = sample_boundary_arr(f, rng, 1000)
        uni = float(np.abs(np.abs(generic_norm_arr(f, pts)) - 1).max())
        checks.append(Check(f"norm_unimodular[{f}]", uni <= 1e-9, {"residual": uni}))
    worst = 0.0
    for m in (2, 4, 6, 8, 10, 12):
        for _ in range(10):
            a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
            a = a - a.T
            d = np.linalg.det(a)
            worst = max(worst, abs(pfaffian(a) ** 2 - d) / max(1.0, abs(d)))
    checks.append(Check("pfaffian_squared_is_det", worst <= 1e-10, {"residual": worst}))
    pfj = [pfaffian(standard_J(m)) for m in (2, 4, 6, 8, 10)]
    checks.append(Check("pfaffian_J_is_one", all(p == 1 for p in pfj), {}))
    f = DomainFactor("I", 3)
    agree = 0
    for u in sample_boundary_arr(f, rng, 100):
        agree += is_maximal_tripotent(Element(f, u))
    for _ in range(100):
        u = sample_boundary_arr(f, rng, 1)[0]
        rk = int(rng.integers(1, 3))
        agree += not is_maximal_tripotent(Element(f, u[:, :rk] @ u[:, :rk].conj().T @ u))
    checks.append(Check("typeI_maximal_iff_unitary", agree == 200, {"agreeing": agree}))
    return checks


def suite_shilov(seed: int = 0, count: int = 1000, **_):
    rng = np.random.default_rng(seed)
    checks = []
    for f in FACTORS_SMALL:
        pts = sample_boundary_arr(f, rng, count)
        e3 = triple_product_arr(f.kind, pts, pts, pts)
        trip = float(np.abs(e3 - pts).max())
        nv = generic_norm_arr(f, pts)
        uni = float(np.abs(np.abs(nv) - 1).max())
        checks.append(Check(f"boundary_points[{f}]", trip <= 1e-9 and uni <= 1e-9,
                            {"tripotent_residual": trip, "norm_residual": uni}))
        e = sample_boundary(f, rng)
        lam = np.exp(2j * np.pi * rng.uniform())
        circ = is_maximal_tripotent(e * lam)
        e0, th = reduce_phase(e)
        e00, th0 = reduce_phase(e0)
        alpha = rng.uniform(0, 2 * np.pi)
        e1, th1 = reduce_phase(e * np.exp(1j * alpha))
        shift = abs(np.angle(np.exp(1j * (th1 - th - f.rank * alpha))))
        ok = (circ and min(th0, 2 * np.pi - th0) <= 1e-9 and shift <= 1e-9
              and abs(complex(generic_norm_arr(f, e1.coords)) - 1) <= 1e-9)
        checks.append(Check(f"phase_reduction[{f}]", ok,
                            {"idempotent_phase": th0, "shift_defect": shift}))
    return checks


def suite_winding(seed: int = 0, count: int = 10, **_):
    checks = []
    for f in FACTORS_SMALL:
        bad = []
        for m in range(-3, 4):
            k = winding_vector(norm_pow(f.label, [m]), base_points=8, seed=seed).k
            if k != (m,):
                bad.append((m, list(k)))
        checks.append(Check(f"norm_power_normalization[{f}]", not bad, {"failures": bad}))
    for phi, k in factorization_symbols(count, seed):
        got = winding_vector(phi, base_points=8, seed=seed).k
        fc = factorize_check(phi, got, loops=4, seed=seed)
        checks.append(Check(f"factorization[{phi.domain}, k={list(k)}]",
                            got == k and fc.ok, {"computed": got.to_json()}))
    return checks


def suite_hardy(seed: int = 0, dmax: int = 2, lmax: int = 3, **_):
    rng = np.random.default_rng(seed)
    checks = []
    t = Truncation(-lmax, lmax, dmax)
    G = gram_matrix(t)
    gres = float(np.abs(G - np.eye(len(G))).max())
    checks.append(Check("gram_identity", gres <= 1e-8, {"residual": gres, "size": len(G)}))
    op = multiplication_matrix(norm_pow(U2, [1]), t)
    pos = {b: i for i, b in enumerate(op.indices)}
    S = np.zeros_like(op.matrix)
    for b, c in pos.items():
        if b.l < t.l_max:
            S[pos[BasisIndex(b.l + 1, b.d, b.j, b.k)], c] = 1
    sres = float(np.abs(op.matrix - S).max())
    checks.append(Check("norm_is_level_shift", sres <= 1e-8, {"residual": sres}))
    opc = multiplication_matrix(norm_pow(U2, [1]).conj(), t)
    adj = float(np.abs(opc.matrix - op.matrix.conj().T).max())
    checks.append(Check("conj_norm_is_adjoint", adj <= 1e-8, {"residual": adj}))
    one = multiplication_matrix(constant(U2, 1.0), t, compress=True)
    hres = float(np.abs(one.matrix - np.eye(len(one.indices))).max())
    killed = all(b.l >= 0 for b in one.indices)
    checks.append(Check("hardy_projection", hres <= 1e-8 and killed, {"residual": hres}))
    us = [np.diag([1, 0]), np.array([[0, 1], [0, 0]]), np.array([[0, 0], [1, 0]]),
          np.diag([0, 1])]
    us += [rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(5)]
    tw = Truncation(-2, 1, dmax)
    for i, u in enumerate(us):
        ab = extract_AB(u, tw, raise_on_leak=False)
        checks.append(Check(f"ab_split[{i}]", ab.leak <= 1e-8 and ab.shift_residual() <= 1e-8,
                            {"leak": ab.leak, "shift_residual": ab.shift_residual()}))
    return checks


def suite_index(seed: int = 0, family: str = "gk", count: int = 30, dmax: int = 2,
                lmax: int = 4, **_):
    checks = []
    fams = ("gk", "block", "u2", "fredholm") if family == "all" else (family,)
    if "gk" in fams:
        for i, (f, k) in enumerate(gk_symbols(count, seed)):
            v = finite_section_index(f, k=[k])
            checks.append(Check(f"gk[{i}] k={k}", v.match and v.analytic_index == -k,
                                {"analytic_index": v.analytic_index}))
    if "block" in fams:
        for i, (F, k) in enumerate(block_symbols(count, seed)):
            v = block_index(F, seed=seed)
            checks.append(Check(f"block[{i}] size={F.size}",
                                v.match and v.analytic_index == -k,
                                {"analytic_index": v.analytic_index,
                                 "k": v.topological_index and v.topological_index.to_json()}))
    if "u2" in fams:
        rng = np.random.default_rng(seed)
        for i in range(count):
            f, lead = laurent_poly(rng, 3)
            r = u2_reduction_check(f, Truncation(0, lmax, dmax), sizes=U2_SIZES, seed=seed)
            checks.append(Check(f"u2_reduction[{i}] lead={lead}", r.ok and r.sector_index == -lead,
                                {"sector_residual": r.sector_residual,
                                 "per_sector_index": r.sector_index}))
    if "fredholm" in fams:
        for name, f, vanishing in [("z-1", laurent({1: 1, 0: -1}), True),
                                   ("(z-1)^2", laurent({2: 1, 1: -2, 0: 1}), True),
                                   ("z-2", laurent({1: 1, 0: -2}), False)]:
            rep = fredholm_proxy(f)
            ok = (rep.analytic_index == "unstable" and rep.decaying) if vanishing \
                else rep.bounded_below
            checks.append(Check(f"fredholm[{name}]", ok, rep.to_json()))
    return checks


RUNNERS = {"jordan": suite_jordan, "shilov": suite_shilov, "winding": suite_winding,
           "hardy": suite_hardy, "index": suite_index}


def run_suite(name: str, **opts) -> list:
    names = SUITES if name == "all" else (name,)
    out = []
    for n in names:
        if n not in RUNNERS:
            raise ValueError(f"unknown suite {n!r}")
        for c in RUNNERS[n](**opts):
            c.name = f"{n}.{c.name}"
            out.append(c)
    return out
