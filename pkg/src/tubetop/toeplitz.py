"""Finite sections of Toeplitz operators and numerical index checks.

Square sections of a Toeplitz matrix always have equal kernel and cokernel
dimensions, so defect numbers are read from tall sections instead: the
first ``M`` columns of ``T`` (and of ``T*``) projected onto the first ``2M``
basis vectors. For Fredholm operators with smooth symbols the null counts
of these tall blocks settle to ``dim ker`` and ``dim coker`` and the smallest
non-null singular value settles to a positive limit. When the symbol has a
zero that limit is 0 and the decay of the gap marks the sweep unstable.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._parallel import map_ordered
from .hardy import BasisIndex, Truncation, TruncatedOperator, multiplication_matrix, U2
from .symbols import CIRCLE, MatrixSymbol, Symbol, compose_norm, det_symbol
from .winding import WindingVector, winding_vector

__all__ = [
    "DEFAULT_SIZES", "SectionResult", "SectionSweep", "IndexVerdict",
    "fourier_coefficients", "circle_sections", "block_sections",
    "section_sweep", "finite_section_index", "block_index",
    "u2_reduction_check", "fredholm_proxy", "FredholmReport",
]

DEFAULT_SIZES = (32, 64, 128, 256)
GAP_RATIO = 0.5


def _grid_size(m: int) -> int:
    n = 64
    while n < 8 * m:
        n *= 2
    return n


def fourier_coefficients(f, n_points: int):
    """Fourier coefficients ``c_n`` of a circle symbol (scalar or matrix).

    Returns an array indexed so that ``c[n % n_points]`` is ``c_n``.
    """
    lam = np.exp(2j * np.pi * np.arange(n_points) / n_points)
    vals = f.evaluate([lam.reshape(-1, 1, 1)])
    return np.fft.fft(vals, axis=0) / n_points


def _toeplitz_block(coef, rows: int, cols: int, adjoint: bool = False):
    n = coef.shape[0]
    diff = np.subtract.outer(np.arange(rows), np.arange(cols))
    if adjoint:
        # (T*)[a, b] = conj(c_{b-a}) transposed blockwise
        blocks = coef[(-diff) % n]
        blocks = np.conj(np.swapaxes(blocks, -1, -2)) if blocks.ndim == 4 else np.conj(blocks)
    else:
        blocks = coef[diff % n]
    if blocks.ndim == 2:
        return blocks
    B = blocks.shape[-1]
    return blocks.transpose(0, 2, 1, 3).reshape(rows * B, cols * B)


def _check_circle(f):
    if f.domain != CIRCLE:
        raise ValueError(f"circle sections need a symbol on I1, got {f.domain}")


def circle_sections(f: Symbol, M: int) -> TruncatedOperator:
    """``M x M`` section ``[c_{a-b}]`` of the Toeplitz operator with symbol ``f``."""
    _check_circle(f)
    coef = fourier_coefficients(f, _grid_size(M))
    t = Truncation(0, M - 1, model="circle")
    return TruncatedOperator(t, _toeplitz_block(coef, M, M), t.indices(), True, f.meta)


def block_sections(F: MatrixSymbol, M: int) -> TruncatedOperator:
    """``MB x MB`` block Toeplitz section; block ``(a, b)`` is ``F_hat(a - b)``."""
    _check_circle(F)
    coef = fourier_coefficients(F, _grid_size(M))
    mat = _toeplitz_block(coef, M, M)
    B = F.size
    t = Truncation(0, M - 1, model="circle")
    idx = [BasisIndex(a) for a in range(M) for _ in range(B)]
    return TruncatedOperator(t, mat, idx, True, F.meta)


@dataclass(frozen=True)
class SectionResult:
    size: int
    dim_ker: int
    dim_coker: int
    sigma_min: float
    gap: float
    # smallest singular values of the section and of its adjoint, ascending
    tail_ker: tuple = field(default=(), compare=False, repr=False)
    tail_coker: tuple = field(default=(), compare=False, repr=False)

    @property
    def index(self) -> int:
        return self.dim_ker - self.dim_coker


@dataclass
class SectionSweep:
    sizes: tuple
    svd_threshold: float
    results: list = field(default_factory=list)

    def __post_init__(self):
        self.sizes = tuple(self.sizes)
        if any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ValueError("sweep sizes must be strictly increasing")

    def stable_index(self):
        """The common index of the three largest sizes, or ``None``."""
        top = self.results[-3:]
        if len(top) < 3:
            return None
        if len({r.index for r in top}) != 1:
            return None
        if not top[-1].gap > 0 or top[-1].gap < GAP_RATIO * top[0].gap:
            return None
        return top[-1].index

    def to_json(self) -> dict:
        return {"sizes": list(self.sizes), "svd_threshold": self.svd_threshold,
                "kernel_dims": [r.dim_ker for r in self.results],
                "cokernel_dims": [r.dim_coker for r in self.results],
                "sigma_min": [r.sigma_min for r in self.results],
                "gap": [r.gap for r in self.results]}


TAIL = 16


def _null_and_gap(mat, threshold):
    s = np.linalg.svd(mat, compute_uv=False)
    smax = s[0] if s.size and s[0] > 0 else 1.0
    null = int(np.count_nonzero(s <= threshold * smax))
    gap = float(s[-null - 1]) if null < len(s) else 0.0
    return null, gap, float(s[-1]), tuple(float(x) for x in s[::-1][:TAIL])


def section_sweep(f, sizes=DEFAULT_SIZES, threshold: float = 1e-8) -> SectionSweep:
    """Defect numbers of tall sections of ``T_f`` and ``T_f*`` across ``sizes``."""
    _check_circle(f)
    sweep = SectionSweep(sizes, threshold)
    coef = fourier_coefficients(f, _grid_size(2 * sweep.sizes[-1]))

    def one(M):
        nk, gk, sk, tk = _null_and_gap(_toeplitz_block(coef, 2 * M, M), threshold)
        nc, gc, sc, tc = _null_and_gap(_toeplitz_block(coef, 2 * M, M, adjoint=True), threshold)
        return SectionResult(M, nk, nc, min(sk, sc), min(gk, gc), tk, tc)

    sweep.results = map_ordered(one, sweep.sizes)
    return sweep


@dataclass
class IndexVerdict:
    analytic_index: object
    topological_index: WindingVector
    match: bool
    sweep: SectionSweep | None = None

    def to_json(self) -> dict:
        out = {"analytic_index": self.analytic_index,
               "k": None if self.topological_index is None else self.topological_index.to_json(),
               "match": self.match}
        if self.sweep is not None:
            out.update(self.sweep.to_json())
        return out


def _verdict(sweep, k):
    idx = sweep.stable_index()
    analytic = "unstable" if idx is None else int(idx)
    match = idx is not None and k is not None and idx == -sum(k)
    return IndexVerdict(analytic, k, bool(match), sweep)


def _circle_k(f, seed):
    try:
        return winding_vector(f, base_points=2, seed=seed).k
    except RuntimeError:
        return None


def finite_section_index(f: Symbol, sizes=DEFAULT_SIZES, threshold: float = 1e-8,
                         k=None, seed: int = 0) -> IndexVerdict:
    """Finite-section index of ``T_f`` on the circle compared with ``-winding(f)``."""
    sweep = section_sweep(f, sizes, threshold)
    if k is None:
        k = _circle_k(f, seed)
    elif not isinstance(k, WindingVector):
        k = WindingVector(k)
    return _verdict(sweep, k)


def block_index(F: MatrixSymbol, sizes=DEFAULT_SIZES, threshold: float = 1e-8,
                seed: int = 0) -> IndexVerdict:
    """Block finite-section index compared with ``-winding(det F)``."""
    return finite_section_index(F, sizes, threshold, _circle_k(det_symbol(F), seed), seed)


@dataclass
class U2Reduction:
    sector_residual: float
    cross_residual: float
    sectors: int
    circle_verdict: IndexVerdict
    k: WindingVector | None
    tol: float

    @property
    def sector_index(self):
        return self.circle_verdict.analytic_index

    @property
    def ok(self) -> bool:
        return (self.sector_residual <= self.tol and self.cross_residual <= self.tol
                and self.k is not None and self.sector_index == -sum(self.k))

    def to_json(self) -> dict:
        return {"sector_residual": self.sector_residual,
                "cross_residual": self.cross_residual, "sectors": self.sectors,
                "per_sector_index": self.sector_index,
                "k": None if self.k is None else self.k.to_json(),
                "match": self.ok, "circle": self.circle_verdict.to_json()}


def u2_reduction_check(f: Symbol, t: Truncation, tol: float = 1e-8,
                       sizes=DEFAULT_SIZES, seed: int = 0) -> U2Reduction:
    """Compare the compressed ``T_{f o N}`` on U(2) sector by sector with ``T_f``.

    Each ``(d, j, k)`` sector of the Hardy window must equal the circle
    section of size ``l_max + 1`` and distinct sectors must not couple.
    """
    _check_circle(f)
    if t.model != "u2":
        raise ValueError("u2_reduction_check needs a U(2) truncation")
    phi = compose_norm(U2, f)
    op = multiplication_matrix(phi, t, compress=True)
    circ = circle_sections(f, t.l_max + 1).matrix
    sectors = sorted({(b.d, b.j, b.k) for b in op.indices})
    pos = {s: op.positions(lambda b, s=s: (b.d, b.j, b.k) == s) for s in sectors}
    worst = 0.0
    mask = np.ones(op.matrix.shape, dtype=bool)
    for s, p in pos.items():
        worst = max(worst, float(np.abs(op.matrix[np.ix_(p, p)] - circ).max()))
        mask[np.ix_(p, p)] = False
    cross = float(np.abs(op.matrix[mask]).max()) if mask.any() else 0.0
    verdict = finite_section_index(f, sizes, seed=seed)
    try:
        k = winding_vector(phi, base_points=2, seed=seed).k
    except RuntimeError:
        k = None
    return U2Reduction(worst, cross, len(sectors), verdict, k, tol)


@dataclass
class FredholmReport:
    sizes: tuple
    sigma_min: list
    analytic_index: object
    bounded_below: bool
    decaying: bool

    def to_json(self) -> dict:
        return {"sizes": list(self.sizes), "sigma_min": self.sigma_min,
                "analytic_index": self.analytic_index,
                "bounded_below": self.bounded_below, "decaying": self.decaying}


def _tail(values, skip):
    return values[skip] if skip < len(values) else 0.0


def fredholm_proxy(f, sizes=(16, 32, 64, 128, 256), threshold: float = 1e-8,
                   floor: float = 0.1) -> FredholmReport:
    """Smallest singular value of the sections once index-induced null directions are removed.

    The defect numbers of the largest section are removed at every size, so
    slowly decaying kernel tails of small sections are not mistaken for
    small singular values. ``bounded_below`` holds when every value stays
    above ``floor``; ``decaying`` when the values shrink monotonically over
    the sweep and lose at least half their size between the first and last
    sizes.
    """
    sweep = section_sweep(f, sizes, threshold)
    idx = sweep.stable_index()
    nk, nc = sweep.results[-1].dim_ker, sweep.results[-1].dim_coker
    sig = [min(_tail(r.tail_ker, nk), _tail(r.tail_coker, nc)) for r in sweep.results]
    mono = all(b <= a * (1 + 1e-9) for a, b in zip(sig, sig[1:]))
    decaying = mono and sig[-1] < GAP_RATIO * sig[0]
    return FredholmReport(sweep.sizes, sig, "unstable" if idx is None else idx,
                          min(sig) >= floor, decaying)
