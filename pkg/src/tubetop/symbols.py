"""Scalar and matrix symbols on product Shilov boundaries.

A symbol is a vectorised evaluator: it takes one raw array per factor, each
shaped ``(B, *factor.shape)``, and returns ``B`` complex values. Symbols
compose with ``*``, ``/``, ``**``, ``+`` and :meth:`Symbol.conj`, and every
symbol carries a JSON-able ``meta`` record of how it was built, so specs
round-trip through :func:`symbol_from_spec`.
"""
from __future__ import annotations

import numbers
from itertools import combinations_with_replacement

import numpy as np

from .jordan import (
    DomainFactor, Element, ProductDomain, generic_norm_arr, parse_domain,
    trace_inner_product,
)

__all__ = [
    "CIRCLE", "Symbol", "MatrixSymbol", "SymbolSpecError", "constant", "norm_pow",
    "exp_poly", "linear", "laurent", "compose_norm", "opaque",
    "symbol_from_spec", "matrix_from_spec", "det_symbol",
]

CIRCLE = ProductDomain((DomainFactor("I", 1),))


class SymbolSpecError(ValueError):
    """Malformed symbol specification."""


def _cplx_json(c):
    c = complex(c)
    return [c.real, c.imag] if c.imag else c.real


def _cplx_parse(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise SymbolSpecError(f"complex values are [re, im], got {v!r}")
        return complex(v[0], v[1])
    if isinstance(v, str):
        return complex(v.replace("i", "j"))
    return complex(v)


class Symbol:
    """A continuous function on the Shilov boundary of ``domain``.

    ``degree`` is the total polynomial degree in coordinates and their
    conjugates when the symbol restricts to such a polynomial on the
    boundary, ``None`` otherwise.
    """

    def __init__(self, domain, fn, meta, degree=None):
        self.domain = parse_domain(domain)
        self._fn = fn
        self.meta = meta
        self.degree = degree

    def evaluate(self, parts) -> np.ndarray:
        if len(parts) != len(self.domain):
            raise ValueError("need one array per factor")
        return np.asarray(self._fn(parts), dtype=np.complex128)

    def __call__(self, point) -> complex:
        """Evaluate at a ``BoundaryPoint`` (or a sequence of elements/arrays)."""
        parts = getattr(point, "parts", point)
        arrs = [np.asarray(getattr(p, "coords", p))[None] for p in parts]
        return complex(self.evaluate(arrs)[0])

    def __repr__(self):
        return f"Symbol({self.domain}, {self.meta.get('family')})"

    def _check(self, other):
        if other.domain != self.domain:
            raise ValueError("symbols live on different domains")

    def __mul__(self, other):
        if isinstance(other, numbers.Number):
            other = constant(self.domain, other)
        if not isinstance(other, Symbol):
            return NotImplemented
        self._check(other)
        a, b = self, other
        deg = None if a.degree is None or b.degree is None else a.degree + b.degree
        return Symbol(self.domain, lambda p: a.evaluate(p) * b.evaluate(p),
                      {"family": "product", "factors": [a.meta, b.meta]}, deg)

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, numbers.Number):
            other = constant(self.domain, other)
        if not isinstance(other, Symbol):
            return NotImplemented
        self._check(other)
        a, b = self, other
        deg = None if a.degree is None or b.degree is None else max(a.degree, b.degree)
        return Symbol(self.domain, lambda p: a.evaluate(p) + b.evaluate(p),
                      {"family": "sum", "terms": [a.meta, b.meta]}, deg)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __pow__(self, m: int):
        if not isinstance(m, numbers.Integral):
            return NotImplemented
        a = self
        m = int(m)
        deg = None
        if a.degree is not None and (m >= 0 or a.meta.get("unimodular")):
            deg = a.degree * abs(m)
        meta = {"family": "power", "base": a.meta, "exponent": m}
        if a.meta.get("unimodular"):
            meta["unimodular"] = True
        return Symbol(self.domain, lambda p: a.evaluate(p) ** m, meta, deg)

    def __truediv__(self, other):
        if isinstance(other, numbers.Number):
            return self * (1 / other)
        return self * other ** -1

    def conj(self):
        a = self
        return Symbol(self.domain, lambda p: np.conj(a.evaluate(p)),
                      {"family": "conj", "base": a.meta}, a.degree)


def constant(domain, value) -> Symbol:
    value = complex(value)
    meta = {"family": "constant", "value": _cplx_json(value)}
    return Symbol(domain, lambda p: np.full(len(p[0]), value), meta, 0)


def norm_pow(domain, k) -> Symbol:
    """``prod_j N_j(u_j) ** k_j``."""
    domain = parse_domain(domain)
    k = [int(x) for x in k]
    if len(k) != len(domain):
        raise SymbolSpecError(f"norm_pow needs {len(domain)} exponents, got {len(k)}")
    factors = domain.factors

    def fn(parts):
        out = np.ones(len(parts[0]), dtype=np.complex128)
        for f, z, kj in zip(factors, parts, k):
            if kj:
                out = out * generic_norm_arr(f, z) ** kj
        return out

    deg = sum(f.rank * abs(kj) for f, kj in zip(factors, k))
    return Symbol(domain, fn, {"family": "norm_pow", "k": k, "unimodular": True}, deg)


def _features(domain, parts):
    cols = []
    for f, z in zip(domain.factors, parts):
        c = f.coords(np.asarray(z)).reshape(len(z), -1)
        cols.append(c)
        cols.append(np.conj(c))
    return np.concatenate(cols, axis=1)


def exp_poly(domain, degree: int = 2, scale: float = 0.3, seed: int = 0) -> Symbol:
    """``exp(P)`` for a seeded random polynomial ``P`` in coordinates and conjugates.

    Coefficients are complex Gaussians scaled so ``|P| <= scale`` holds on
    average over the boundary.
    """
    domain = parse_domain(domain)
    nfeat = 2 * sum(f.dim for f in domain.factors)
    rng = np.random.default_rng(seed)
    monos = [m for deg in range(1, degree + 1)
             for m in combinations_with_replacement(range(nfeat), deg)]
    coef = (rng.standard_normal(len(monos)) + 1j * rng.standard_normal(len(monos)))
    coef *= scale / np.sqrt(2 * max(len(monos), 1))

    def poly(parts):
        w = _features(domain, parts)
        out = np.zeros(len(w), dtype=np.complex128)
        for c, m in zip(coef, monos):
            out += c * np.prod(w[:, list(m)], axis=1)
        return out

    meta = {"family": "exp_poly", "degree": int(degree), "scale": float(scale),
            "seed": int(seed)}
    return Symbol(domain, lambda p: np.exp(poly(p)), meta, None)


def linear(domain, u, c=0.0, factor: int = 0) -> Symbol:
    """``l_u(z_j) + c`` with ``l_u(z) = <z, u>`` the trace inner product."""
    domain = parse_domain(domain)
    f = domain.factors[factor]
    u_arr = np.asarray(getattr(u, "coords", u), dtype=np.complex128)
    ue = Element(f, u_arr)
    # l_u is linear in z, so it is determined by its values on the basis
    weights = np.array([trace_inner_product(Element(f, b, check=False), ue)
                        for b in f.basis()])
    c = complex(c)

    def fn(parts):
        z = f.coords(np.asarray(parts[factor])).reshape(len(parts[factor]), -1)
        return z @ weights + c

    meta = {"family": "linear", "factor": int(factor), "c": _cplx_json(c),
            "u": ue.to_json()}
    return Symbol(domain, fn, meta, 1)


def laurent(coeffs) -> Symbol:
    """``sum_n c_n z**n`` on the unit circle."""
    cs = {int(n): complex(v) for n, v in dict(coeffs).items()}

    def fn(parts):
        lam = np.asarray(parts[0]).reshape(len(parts[0]))
        out = np.zeros(len(lam), dtype=np.complex128)
        for n, c in cs.items():
            out += c * lam ** n
        return out

    meta = {"family": "laurent",
            "coeffs": {str(n): _cplx_json(c) for n, c in sorted(cs.items())}}
    deg = max((abs(n) for n in cs), default=0)
    return Symbol(CIRCLE, fn, meta, deg)


def compose_norm(domain, inner: Symbol, factor: int = 0) -> Symbol:
    """``u -> f(N_j(u_j))`` for a circle symbol ``f``."""
    domain = parse_domain(domain)
    if inner.domain != CIRCLE:
        raise SymbolSpecError("compose_norm needs a circle (I1) inner symbol")
    fac = domain.factors[factor]

    def fn(parts):
        nv = generic_norm_arr(fac, parts[factor])
        return inner.evaluate([nv.reshape(-1, 1, 1)])

    deg = None if inner.degree is None else inner.degree * fac.rank
    meta = {"family": "compose_norm", "factor": int(factor), "inner": inner.meta}
    return Symbol(domain, fn, meta, deg)


def opaque(domain, fn, name: str = "user", degree=None) -> Symbol:
    """Wrap an arbitrary vectorised evaluator; it does not round-trip to JSON."""
    return Symbol(domain, fn, {"family": "opaque", "name": name}, degree)


# -- spec parsing ----------------------------------------------------------

_ALLOWED = {
    "constant": {"value"},
    "norm_pow": {"k", "unimodular"},
    "exp_poly": {"degree", "scale", "seed"},
    "linear": {"u", "c", "factor"},
    "laurent": {"coeffs"},
    "compose_norm": {"inner", "factor"},
    "product": {"factors"},
    "sum": {"terms"},
    "power": {"base", "exponent", "unimodular"},
    "conj": {"base"},
    "det": {"matrix"},
}


def symbol_from_spec(spec: dict, domain) -> Symbol:
    """Build a :class:`Symbol` from a JSON spec on ``domain``."""
    domain = parse_domain(domain)
    if not isinstance(spec, dict) or "family" not in spec:
        raise SymbolSpecError(f"symbol spec needs a 'family' key: {spec!r}")
    fam = spec["family"]
    if fam == "matrix":
        raise SymbolSpecError("matrix specs build MatrixSymbol; use matrix_from_spec")
    if fam not in _ALLOWED:
        raise SymbolSpecError(f"unknown symbol family {fam!r}")
    extra = set(spec) - _ALLOWED[fam] - {"family"}
    if extra:
        raise SymbolSpecError(f"unknown fields for {fam}: {sorted(extra)}")
    try:
        if fam == "constant":
            return constant(domain, _cplx_parse(spec.get("value", 1.0)))
        if fam == "norm_pow":
            return norm_pow(domain, spec["k"])
        if fam == "exp_poly":
            return exp_poly(domain, int(spec.get("degree", 2)),
                            float(spec.get("scale", 0.3)), int(spec.get("seed", 0)))
        if fam == "linear":
            j = int(spec.get("factor", 0))
            u = spec["u"]
            if isinstance(u, dict):
                u = Element.from_json(u).coords
            else:
                u = np.asarray([[_cplx_parse(x) for x in row] for row in u]
                               if domain.factors[j].is_matrix
                               else [_cplx_parse(x) for x in u])
            return linear(domain, u, _cplx_parse(spec.get("c", 0.0)), j)
        if fam == "laurent":
            if domain != CIRCLE:
                raise SymbolSpecError("laurent symbols live on the circle (I1)")
            return laurent({k: _cplx_parse(v) for k, v in spec["coeffs"].items()})
        if fam == "compose_norm":
            return compose_norm(domain, symbol_from_spec(spec["inner"], CIRCLE),
                                int(spec.get("factor", 0)))
        if fam == "product":
            parts = [symbol_from_spec(s, domain) for s in spec["factors"]]
            if len(parts) == 1:
                return parts[0]
            out = parts[0]
            for s in parts[1:]:
                out = out * s
            return out
        if fam == "sum":
            terms = [symbol_from_spec(s, domain) for s in spec["terms"]]
            out = terms[0]
            for s in terms[1:]:
                out = out + s
            return out
        if fam == "power":
            return symbol_from_spec(spec["base"], domain) ** int(spec["exponent"])
        if fam == "det":
            return det_symbol(matrix_from_spec(spec["matrix"], domain))
        return symbol_from_spec(spec["base"], domain).conj()
    except KeyError as exc:
        raise SymbolSpecError(f"{fam} spec missing field {exc}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SymbolSpecError):
            raise
        raise SymbolSpecError(f"bad {fam} spec: {exc}") from None


class MatrixSymbol:
    """An ``M x M`` array of scalar symbols on a common domain."""

    def __init__(self, entries, meta=None):
        rows = [list(r) for r in entries]
        m = len(rows)
        if m == 0 or any(len(r) != m for r in rows):
            raise ValueError("matrix symbol needs a square, nonempty entry array")
        dom = rows[0][0].domain
        if any(e.domain != dom for r in rows for e in r):
            raise ValueError("matrix symbol entries must share a domain")
        self.domain = dom
        self.size = m
        self.entries = tuple(tuple(r) for r in rows)
        self.meta = meta or {"family": "matrix",
                             "entries": [[e.meta for e in r] for r in rows]}

    @property
    def degree(self):
        degs = [e.degree for r in self.entries for e in r]
        return None if any(d is None for d in degs) else max(degs)

    def evaluate(self, parts) -> np.ndarray:
        m = self.size
        vals = [[e.evaluate(parts) for e in r] for r in self.entries]
        out = np.empty((len(vals[0][0]), m, m), dtype=np.complex128)
        for i in range(m):
            for j in range(m):
                out[:, i, j] = vals[i][j]
        return out

    def __call__(self, point) -> np.ndarray:
        parts = getattr(point, "parts", point)
        arrs = [np.asarray(getattr(p, "coords", p))[None] for p in parts]
        return self.evaluate(arrs)[0]

    def __matmul__(self, other: "MatrixSymbol") -> "MatrixSymbol":
        m = self.size
        if other.size != m:
            raise ValueError("size mismatch")
        rows = []
        for i in range(m):
            row = []
            for j in range(m):
                acc = self.entries[i][0] * other.entries[0][j]
                for t in range(1, m):
                    acc = acc + self.entries[i][t] * other.entries[t][j]
                row.append(acc)
            rows.append(row)
        return MatrixSymbol(rows)

    @classmethod
    def diag(cls, symbols):
        symbols = list(symbols)
        dom = symbols[0].domain
        m = len(symbols)
        return cls([[symbols[i] if i == j else constant(dom, 0.0) for j in range(m)]
                    for i in range(m)])

    @classmethod
    def identity(cls, domain, m: int):
        return cls.diag([constant(domain, 1.0)] * m)


def matrix_from_spec(spec: dict, domain) -> MatrixSymbol:
    if not isinstance(spec, dict) or spec.get("family") != "matrix":
        raise SymbolSpecError("matrix spec needs family 'matrix'")
    extra = set(spec) - {"family", "entries"}
    if extra:
        raise SymbolSpecError(f"unknown fields for matrix: {sorted(extra)}")
    try:
        rows = [[symbol_from_spec(e, domain) for e in row] for row in spec["entries"]]
        return MatrixSymbol(rows)
    except KeyError:
        raise SymbolSpecError("matrix spec missing 'entries'") from None
    except ValueError as exc:
        if isinstance(exc, SymbolSpecError):
            raise
        raise SymbolSpecError(str(exc)) from None


def det_symbol(phi: MatrixSymbol) -> Symbol:
    """Pointwise determinant of a matrix symbol."""
    deg = phi.degree
    if deg is not None:
        deg *= phi.size
    return Symbol(phi.domain, lambda p: np.linalg.det(phi.evaluate(p)),
                  {"family": "det", "matrix": phi.meta}, deg)
