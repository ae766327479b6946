"""Winding vectors of non-vanishing symbols on product Shilov boundaries.

Every non-vanishing continuous ``phi`` factors as
``phi = prod_j N_j(u_j)**k_j * exp(psi)`` for unique integers ``k_j``.
Rotating the ``j``-th coordinate, ``t -> phi(..., exp(it) u_j, ...)``
winds exactly ``r_j * k_j`` times, which is how ``k`` is computed here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

import numpy as np

from . import _backend
from ._parallel import map_ordered
from .jordan import DomainFactor, ProductDomain, generic_norm_arr, parse_domain, standard_J
from .shilov import BoundaryPoint, haar_unitary, sample_product_boundary
from .symbols import Symbol, norm_pow

__all__ = [
    "WindingError", "VanishingSymbolError", "OpenLoopError", "RefinementError",
    "BasePointDisagreement", "DivisibilityError", "LoopResult", "WindingVector",
    "WindingReport", "FactorizationCheck", "loop_winding", "loop_winding_info",
    "winding_vector", "theta_eval", "factorize_check", "uniqueness_search",
]


class WindingError(RuntimeError):
    """Winding could not be determined reliably."""


class VanishingSymbolError(WindingError):
    pass


class OpenLoopError(WindingError):
    pass


class RefinementError(WindingError):
    pass


class BasePointDisagreement(WindingError):
    pass


class DivisibilityError(WindingError):
    pass


@dataclass(frozen=True)
class LoopResult:
    winding: int
    depth: int
    samples: int
    min_abs: float
    max_abs: float


def loop_winding_info(f, n0: int = 128, max_depth: int = 20,
                      max_jump: float = np.pi / 2, min_ratio: float = 1e-7,
                      close_tol: float = 1e-8) -> LoopResult:
    """Unwrapped phase change of ``f`` over ``[0, 2 pi]`` divided by ``2 pi``.

    ``f`` maps an array of parameters to complex values. Intervals whose
    principal phase jump reaches ``max_jump`` are bisected until none remain.
    """
    t = np.linspace(0.0, 2 * np.pi, n0 + 1)
    v = np.asarray(f(t), dtype=np.complex128)
    scale = np.abs(v).max()
    if not scale > 0:
        raise VanishingSymbolError("loop is identically zero")
    if abs(v[-1] - v[0]) > close_tol * scale:
        raise OpenLoopError(f"loop not closed: |f(2pi) - f(0)| = {abs(v[-1] - v[0]):.3e}")
    depth = 0
    while True:
        inc, lo, hi = _backend.phase_increments(v)
        if lo < min_ratio * hi:
            raise VanishingSymbolError(
                f"symbol nearly vanishes on the loop (min |f| / max |f| = {lo / hi:.2e})")
        bad = np.flatnonzero(np.abs(inc) >= max_jump)
        if bad.size == 0:
            break
        depth += 1
        if depth > max_depth:
            raise RefinementError(f"phase jumps persist after {max_depth} bisections")
        tm = 0.5 * (t[bad] + t[bad + 1])
        vm = np.asarray(f(tm), dtype=np.complex128)
        t = np.insert(t, bad + 1, tm)
        v = np.insert(v, bad + 1, vm)
    total = float(inc.sum()) / (2 * np.pi)
    w = int(round(total))
    return LoopResult(w, depth, len(t), lo, hi)


def loop_winding(f, **params) -> int:
    """Integer winding number of the closed loop ``t -> f(t)``, ``t in [0, 2 pi]``."""
    return loop_winding_info(f, **params).winding


@dataclass(frozen=True)
class WindingVector:
    k: tuple

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))

    def __iter__(self):
        return iter(self.k)

    def __len__(self):
        return len(self.k)

    def __getitem__(self, i):
        return self.k[i]

    def __eq__(self, other):
        if isinstance(other, WindingVector):
            return self.k == other.k
        try:
            return self.k == tuple(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.k)

    def to_json(self):
        return list(self.k)


@dataclass(frozen=True)
class WindingReport:
    k: WindingVector
    raw_windings: tuple
    base_point_count: int
    min_abs_symbol: float
    refinement_depth: int

    def to_json(self) -> dict:
        return {"k": self.k.to_json(), "raw_windings": list(self.raw_windings),
                "base_point_count": self.base_point_count,
                "min_abs_symbol": self.min_abs_symbol,
                "refinement_depth": self.refinement_depth}


def _rotated_loop(phi: Symbol, parts, j: int):
    base = [np.asarray(p) for p in parts]
    nd = base[j].ndim - 1

    def f(t):
        t = np.asarray(t)
        arrs = [np.broadcast_to(p, (len(t),) + p.shape[1:]) for p in base]
        arrs[j] = np.exp(1j * t).reshape((-1,) + (1,) * nd) * base[j]
        return phi.evaluate(arrs)

    return f


def _base_points(domain: ProductDomain, count: int, seed):
    rng = np.random.default_rng(seed)
    return [sample_product_boundary(domain, rng) for _ in range(count)]


def winding_vector(phi: Symbol, base_points: int = 8, seed=0, **loop_params) -> WindingReport:
    """Winding vector of ``phi`` from generator loops at random base points."""
    domain = phi.domain
    pts = _base_points(domain, base_points, seed)
    jobs = [(b, j) for b in range(len(pts)) for j in range(len(domain))]

    def run(job):
        b, j = job
        return loop_winding_info(_rotated_loop(phi, pts[b].arrays(), j), **loop_params)

    results = map_ordered(run, jobs)
    raw = []
    for j, rank in enumerate(domain.ranks):
        ws = {results[b * len(domain) + j].winding for b in range(len(pts))}
        if len(ws) != 1:
            raise BasePointDisagreement(
                f"factor {j}: base points give windings {sorted(ws)}")
        w = ws.pop()
        if w % rank:
            raise DivisibilityError(f"factor {j}: winding {w} not divisible by rank {rank}")
        raw.append(w)
    k = WindingVector(w // r for w, r in zip(raw, domain.ranks))
    return WindingReport(k, tuple(raw), len(pts),
                         min(r.min_abs for r in results),
                         max(r.depth for r in results))


def theta_eval(domain, k, p) -> complex:
    """``prod_j N_j(p_j) ** k_j`` at a boundary point."""
    domain = parse_domain(domain)
    out = 1 + 0j
    for f, part, kj in zip(domain.factors, p.parts, k):
        if kj:
            out *= complex(generic_norm_arr(f, part.coords)) ** int(kj)
    return out


# -- composite loops -------------------------------------------------------

def _torus_loop(factor: DomainFactor, rng):
    """A random closed loop in the boundary of ``factor`` and the winding of N along it."""
    n = factor.n
    if factor.kind == "IV":
        a1, a2 = rng.integers(-2, 3, size=2)
        q, _ = np.linalg.qr(rng.standard_normal((n, 2)))
        x, y = q[:, 0], q[:, 1]

        def gamma(t):
            t = t[:, None]
            return np.exp(1j * a1 * t) * (np.cos(a2 * t) * x + np.sin(a2 * t) * y)

        return gamma, 2 * int(a1)
    if factor.kind == "II":
        a = rng.integers(-2, 3, size=n // 2)
        v = haar_unitary(n, rng)
        J2 = standard_J(2)

        def gamma(t):
            blocks = np.zeros((len(t), n, n), dtype=np.complex128)
            for s, a_s in enumerate(a):
                blocks[:, 2 * s:2 * s + 2, 2 * s:2 * s + 2] = (
                    np.exp(1j * a_s * t)[:, None, None] * J2)
            return v @ blocks @ v.T

        return gamma, int(a.sum())
    a = rng.integers(-2, 3, size=n)
    v = haar_unitary(n, rng)
    w = v.T if factor.kind == "III" else haar_unitary(n, rng)

    def gamma(t):
        d = np.exp(1j * np.outer(t, a))
        return (v[None] * d[:, None, :]) @ w

    return gamma, int(a.sum())


def _composite_loop(domain: ProductDomain, rng):
    loops = [_torus_loop(f, rng) for f in domain.factors]
    return [g for g, _ in loops], [w for _, w in loops]


@dataclass
class FactorizationCheck:
    ok: bool
    k: tuple
    generator_residuals: list = field(default_factory=list)
    composite_residuals: list = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "k": list(self.k),
                "generator_residuals": self.generator_residuals,
                "composite_residuals": self.composite_residuals}


def factorize_check(phi: Symbol, k, loops: int = 8, seed=0, **loop_params) -> FactorizationCheck:
    """Check that ``phi / theta_k`` has null winding on random loops.

    Null winding on generator loops at ``loops`` base points and on ``loops``
    random composite torus loops is the numerical certificate that
    ``phi = theta_k * exp(psi)`` with a continuous ``psi``.
    """
    domain = phi.domain
    k = tuple(int(x) for x in k)
    resid = phi * norm_pow(domain, [-x for x in k])
    rng = np.random.default_rng(seed)
    pts = [sample_product_boundary(domain, rng) for _ in range(loops)]
    gen = []
    for p in pts:
        row = []
        for j, rank in enumerate(domain.ranks):
            w = loop_winding(_rotated_loop(resid, p.arrays(), j), **loop_params)
            # report in units of k; non-divisible raw windings are kept as fractions
            row.append(w // rank if w % rank == 0 else w / rank)
        gen.append(row)
    comp = []
    for _ in range(loops):
        gammas, _ = _composite_loop(domain, rng)
        f = (lambda gs: lambda t: resid.evaluate([g(np.asarray(t)) for g in gs]))(gammas)
        comp.append(loop_winding(f, **loop_params))
    ok = all(x == 0 for row in gen for x in row) and all(c == 0 for c in comp)
    return FactorizationCheck(ok, k, gen, comp)


def uniqueness_search(phi: Symbol, center, radius: int = 3, loops: int = 4,
                      seed=0, **loop_params) -> list:
    """All ``k`` in the box ``center +- radius`` passing :func:`factorize_check`."""
    ranges = [range(c - radius, c + radius + 1) for c in center]
    hits = []
    for cand in iproduct(*ranges):
        if factorize_check(phi, cand, loops=loops, seed=seed, **loop_params).ok:
            hits.append(tuple(cand))
    return hits
