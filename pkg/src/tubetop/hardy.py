"""Hardy-space models on the circle and on U(2).

On U(2) the orthonormal basis is ``N**l * sqrt(d+1) * D^d_{jk}`` where
``D^d`` is the unitary action on degree-``d`` binary forms and ``N = det``.
Levels ``l >= 0`` span the Hardy space. On the circle the basis is ``z**l``.

Inner products are computed by product quadrature. Points of U(2) are
written ``u = lam * g`` with ``lam`` on a uniform circle grid and ``g`` in
SU(2) in Hopf coordinates ``a = sqrt(x) e^{i s}``, ``b = sqrt(1-x) e^{i t}``:
Gauss-Legendre in ``x`` and uniform grids in ``s`` and ``t``. The rule is
exact for polynomials in the entries and their conjugates up to the degree
it was sized for.
"""
from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import _backend
from .jordan import DomainFactor, ProductDomain
from .symbols import CIRCLE, Symbol, linear

__all__ = [
    "U2", "BasisIndex", "Truncation", "TruncatedOperator", "QuadratureError",
    "LeakError", "basis_eval", "u2_quadrature", "haar_quadrature_u2",
    "gram_matrix", "numerical_normalization", "multiplication_matrix", "extract_AB", "ABSplit",
]

U2 = ProductDomain((DomainFactor("I", 2),))

# degree assumed for symbols that are not polynomials on the boundary
DEFAULT_SYMBOL_DEGREE = 12


class QuadratureError(ValueError):
    """Explicit quadrature orders too small for a polynomial integrand."""


class LeakError(RuntimeError):
    """Multiplication by conj(l_u) left the two-level pattern."""


@dataclass(frozen=True, order=True)
class BasisIndex:
    l: int
    d: int = 0
    j: int = 0
    k: int = 0

    def __post_init__(self):
        if self.d < 0 or not (0 <= self.j <= self.d and 0 <= self.k <= self.d):
            raise ValueError(f"basis index out of range: {self}")


@dataclass(frozen=True)
class Truncation:
    """Finite window of basis functions plus quadrature orders.

    ``model`` is ``"circle"`` or ``"u2"``. Orders left as ``None`` are sized
    automatically from the window and the symbol's declared degree.
    """

    l_min: int
    l_max: int
    d_max: int = 0
    model: str = "u2"
    n_circle: int | None = None
    n_gauss: int | None = None
    n_azimuth: int | None = None

    def __post_init__(self):
        if not self.l_min <= 0 <= self.l_max:
            raise ValueError("need l_min <= 0 <= l_max")
        if self.model not in ("circle", "u2"):
            raise ValueError("model is 'circle' or 'u2'")
        if self.model == "circle" and self.d_max:
            raise ValueError("the circle model has no degree index")
        if self.d_max < 0:
            raise ValueError("d_max must be non-negative")

    def indices(self) -> list:
        if self.model == "circle":
            return [BasisIndex(l) for l in range(self.l_min, self.l_max + 1)]
        return [BasisIndex(l, d, j, k)
                for l in range(self.l_min, self.l_max + 1)
                for d in range(self.d_max + 1)
                for j in range(d + 1) for k in range(d + 1)]

    @property
    def domain(self) -> ProductDomain:
        return CIRCLE if self.model == "circle" else U2

    def basis_degree(self) -> int:
        """Largest polynomial degree (entries and conjugates) among basis functions."""
        lmax = max(-self.l_min, self.l_max)
        return lmax + self.d_max if self.model == "circle" else 2 * lmax + self.d_max

    def orders_for(self, symbol_degree: int) -> tuple:
        """``(n_circle, n_gauss, n_azimuth)`` exact for ``<basis, phi basis>``."""
        deg = 2 * self.basis_degree() + symbol_degree
        nc = deg + 1
        if self.model == "circle":
            return (self.n_circle or nc, 0, 0)
        return (self.n_circle or nc,
                self.n_gauss or max(self.d_max + 2, deg // 4 + 1),
                self.n_azimuth or deg + 1)

    def check_orders(self, symbol_degree: int) -> None:
        need = replace(self, n_circle=None, n_gauss=None, n_azimuth=None).orders_for(symbol_degree)
        have = self.orders_for(symbol_degree)
        if any(h < n for h, n in zip(have, need)):
            raise QuadratureError(
                f"quadrature orders {have} below {need} needed for degree {symbol_degree}")

    def to_json(self) -> dict:
        return {"model": self.model, "l_min": self.l_min, "l_max": self.l_max,
                "d_max": self.d_max, "n_circle": self.n_circle,
                "n_gauss": self.n_gauss, "n_azimuth": self.n_azimuth}


# -- basis evaluation ----------------------------------------------------------

def _basis_values(indices, pts, model):
    """Rows = basis functions, columns = points."""
    if model == "circle":
        lam = pts.reshape(-1)
        return np.stack([lam ** b.l for b in indices])
    det = pts[:, 0, 0] * pts[:, 1, 1] - pts[:, 0, 1] * pts[:, 1, 0]
    ds = sorted({b.d for b in indices})
    coeff = {d: _backend.sympow_matrices(pts, d) * np.sqrt(d + 1) for d in ds}
    ls = sorted({b.l for b in indices})
    powers = {l: det ** l for l in ls}
    return np.stack([powers[b.l] * coeff[b.d][:, b.j, b.k] for b in indices])


def basis_eval(b: BasisIndex, u, model: str = "u2"):
    """Value of the basis function ``b`` at ``u``.

    ``u`` may be an ``Element``/``BoundaryPoint`` or a raw batch of points.
    """
    if hasattr(u, "parts"):
        u = u.parts[0]
    arr = np.asarray(getattr(u, "coords", u), dtype=np.complex128)
    single = arr.size == 1 if model == "circle" else arr.ndim == 2
    if model == "circle":
        arr = arr.reshape(-1)
    else:
        arr = arr.reshape(-1, 2, 2)
        if not 0 <= b.j <= b.d or not 0 <= b.k <= b.d:
            raise ValueError(f"basis index out of range: {b}")
    out = _basis_values([b], arr, model)[0]
    return complex(out[0]) if single else out


# -- quadrature ----------------------------------------------------------------

@lru_cache(maxsize=32)
def u2_quadrature(n_circle: int, n_gauss: int, n_azimuth: int):
    """Nodes ``(Q, 2, 2)`` and weights ``(Q,)`` of the product rule on U(2)."""
    x, wx = np.polynomial.legendre.leggauss(n_gauss)
    x = 0.5 * (x + 1)
    wx = 0.5 * wx
    az = 2 * np.pi * np.arange(n_azimuth) / n_azimuth
    ph = 2 * np.pi * np.arange(n_circle) / n_circle
    X, S, T, P = np.meshgrid(x, az, az, ph, indexing="ij")
    W = np.broadcast_to(wx[:, None, None, None], X.shape) / (n_azimuth ** 2 * n_circle)
    a = np.sqrt(X) * np.exp(1j * S)
    b = np.sqrt(1 - X) * np.exp(1j * T)
    lam = np.exp(1j * P)
    u = np.empty(X.shape + (2, 2), dtype=np.complex128)
    u[..., 0, 0] = lam * a
    u[..., 0, 1] = -lam * np.conj(b)
    u[..., 1, 0] = lam * b
    u[..., 1, 1] = lam * np.conj(a)
    nodes = u.reshape(-1, 2, 2)
    weights = np.ascontiguousarray(W).reshape(-1)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def circle_quadrature(n: int):
    lam = np.exp(2j * np.pi * np.arange(n) / n)
    return lam, np.full(n, 1.0 / n)


def haar_quadrature_u2(f, orders=(9, 4, 9)) -> complex:
    """``int_{U(2)} f dmu`` for a vectorised ``f`` of ``(Q, 2, 2)`` arrays."""
    nodes, w = u2_quadrature(*orders)
    return complex(np.sum(w * np.asarray(f(nodes))))


def _nodes(t: Truncation, symbol_degree: int):
    if t.model == "circle":
        lam, w = circle_quadrature(t.orders_for(symbol_degree)[0])
        return lam.reshape(-1, 1, 1), w
    return u2_quadrature(*t.orders_for(symbol_degree))


def _assemble(t: Truncation, rows, cols, weight_fn, symbol_degree, chunk=8192):
    pts, w = _nodes(t, symbol_degree)
    out = np.zeros((len(rows), len(cols)), dtype=np.complex128)
    for s in range(0, len(w), chunk):
        p = pts[s:s + chunk]
        wp = w[s:s + chunk] * weight_fn(p)
        br = _basis_values(rows, p, t.model)
        bc = br if cols is rows else _basis_values(cols, p, t.model)
        out += (np.conj(br) * wp) @ bc.T
    return out


def gram_matrix(t: Truncation) -> np.ndarray:
    """L2 inner products of all basis functions in the window."""
    idx = t.indices()
    return _assemble(t, idx, idx, lambda p: 1.0, 0)


def numerical_normalization(d: int, orders=None) -> np.ndarray:
    """``1 / ||D^d_{jk}||`` by quadrature, for comparison with ``sqrt(d+1)``."""
    orders = orders or (2 * d + 1, d + 2, 2 * d + 1)
    nodes, w = u2_quadrature(*orders)
    D = _backend.sympow_matrices(nodes, d)
    return 1.0 / np.sqrt(np.einsum("q,qjk->jk", w, np.abs(D) ** 2))


# -- operators ------------------------------------------------------------------

@dataclass
class TruncatedOperator:
    truncation: Truncation
    matrix: np.ndarray
    indices: list
    hardy_compressed: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.indices)
        if self.matrix.shape != (n, n):
            raise ValueError("matrix shape does not match the basis enumeration")

    def positions(self, pred) -> np.ndarray:
        return np.array([i for i, b in enumerate(self.indices) if pred(b)], dtype=int)

    def block(self, row_pred, col_pred) -> np.ndarray:
        r, c = self.positions(row_pred), self.positions(col_pred)
        return self.matrix[np.ix_(r, c)]

    def header(self) -> dict:
        return {"schema": "tubetop.operator/1", "truncation": self.truncation.to_json(),
                "hardy_compressed": self.hardy_compressed, "symbol": self.meta,
                "shape": list(self.matrix.shape), "dtype": "complex128",
                "order": "row-major",
                "indices": [[b.l, b.d, b.j, b.k] for b in self.indices]}

    def dumps(self) -> str:
        """JSON header with the matrix base64-encoded inline."""
        h = self.header()
        h["encoding"] = "base64"
        h["data"] = base64.b64encode(
            np.ascontiguousarray(self.matrix, dtype="<c16").tobytes()).decode("ascii")
        return json.dumps(h, sort_keys=True)

    def dump_binary(self, path) -> None:
        """Header JSON at ``path``, raw little-endian complex128 at ``path + '.bin'``."""
        h = self.header()
        h["encoding"] = "binary"
        h["data_file"] = str(path) + ".bin"
        with open(str(path) + ".bin", "wb") as fh:
            fh.write(np.ascontiguousarray(self.matrix, dtype="<c16").tobytes())
        with open(path, "w") as fh:
            json.dump(h, fh, sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "TruncatedOperator":
        h = json.loads(text)
        if h.get("encoding") == "binary":
            raw = open(h["data_file"], "rb").read()
        else:
            raw = base64.b64decode(h["data"])
        m = np.frombuffer(raw, dtype="<c16").reshape(h["shape"]).copy()
        t = Truncation(**h["truncation"])
        idx = [BasisIndex(*b) for b in h["indices"]]
        return cls(t, m, idx, h["hardy_compressed"], h["symbol"])


def _symbol_degree(phi: Symbol, t: Truncation) -> int:
    if phi.degree is None:
        return DEFAULT_SYMBOL_DEGREE
    if any(o is not None for o in (t.n_circle, t.n_gauss, t.n_azimuth)):
        t.check_orders(phi.degree)
    return phi.degree


def multiplication_matrix(phi: Symbol, t: Truncation, compress: bool = False) -> TruncatedOperator:
    """Matrix of ``<basis_a, phi * basis_b>``; ``compress`` keeps only levels ``l >= 0``."""
    if phi.domain != t.domain:
        raise ValueError(f"symbol lives on {phi.domain}, truncation on {t.domain}")
    idx = t.indices()
    if compress:
        idx = [b for b in idx if b.l >= 0]
    deg = _symbol_degree(phi, t)
    m = _assemble(t, idx, idx, lambda p: phi.evaluate([p]), deg)
    return TruncatedOperator(t, m, idx, compress, phi.meta)


@dataclass
class ABSplit:
    A: np.ndarray
    B: np.ndarray
    leak: float
    indices: list
    operator: TruncatedOperator

    def shift_residual(self) -> float:
        """Distance of the full matrix from ``shift (x) A + 1 (x) B`` on interior levels."""
        op = self.operator
        t = op.truncation
        worst = 0.0
        for l in range(t.l_min, t.l_max + 1):
            for lr in range(t.l_min, t.l_max + 1):
                blk = op.block(lambda b, lr=lr: b.l == lr, lambda b, l=l: b.l == l)
                if lr == l - 1:
                    ref = self.A
                elif lr == l:
                    ref = self.B
                else:
                    ref = np.zeros_like(blk)
                worst = max(worst, float(np.abs(blk - ref).max()))
        return worst


def extract_AB(u, t: Truncation, leak_tol: float = 1e-8, raise_on_leak: bool = True) -> ABSplit:
    """Split multiplication by ``conj(l_u)`` on level 0 into level -1 and level 0 parts.

    ``conj(l_u) p = N**-1 A_u(p) + B_u(p)``; ``A`` is read off the level -1
    rows and ``B`` off the level 0 rows. ``leak`` is the largest singular value
    of what lands anywhere else, ignoring the top degree.
    """
    if t.model != "u2" or t.l_min > -1:
        raise ValueError("extract_AB needs a U(2) window containing level -1")
    u = np.asarray(getattr(u, "coords", u), dtype=np.complex128)
    phi = linear(U2, u).conj()
    op = multiplication_matrix(phi, t, compress=False)
    level0 = lambda b: b.l == 0
    A = op.block(lambda b: b.l == -1, level0)
    B = op.block(level0, level0)
    other = op.block(lambda b: b.l not in (-1, 0) and b.d < t.d_max,
                     lambda b: b.l == 0 and b.d < t.d_max)
    leak = float(np.linalg.norm(other, 2)) if other.size else 0.0
    if raise_on_leak and leak > leak_tol:
        raise LeakError(f"leak {leak:.3e} exceeds {leak_tol:.1e}")
    idx = [b for b in op.indices if b.l == 0]
    return ABSplit(A, B, leak, idx, op)
