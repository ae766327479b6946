"""Jordan triple systems of the classical tube-type factors.

Four families are supported::

    I_n    n x n complex matrices                 rank n
    II_m   m x m antisymmetric matrices, m even   rank m/2
    III_n  n x n symmetric matrices               rank n
    IV_n   C^n, n >= 3 (spin factor)              rank 2

Matrix types carry the triple product ``(x y* z + z y* x) / 2``; the spin
factor carries ``(x.ȳ) z - (x.z) ȳ + (z.ȳ) x`` with ``a.b = sum a_j b_j``.

Most functions accept either :class:`Element` instances or raw arrays paired
with a :class:`DomainFactor`; the raw ``*_arr`` variants broadcast over
leading batch axes.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement, combinations

import numpy as np

from . import _backend

__all__ = [
    "DomainFactor", "ProductDomain", "Element", "Tolerances", "DEFAULT_TOL",
    "triple_product", "left_mult_matrix", "trace_inner_product",
    "quadratic_rep", "is_tripotent", "are_orthogonal", "generic_norm",
    "is_invertible", "is_maximal_tripotent", "in_domain", "pfaffian",
    "spin_domain_inequality", "standard_J", "parse_domain", "parse_factor",
]

_KINDS = ("I", "II", "III", "IV")


@dataclass(frozen=True)
class DomainFactor:
    """An irreducible classical tube-type factor.

    ``n`` is the matrix size for types I/II/III and the vector length for IV.
    """

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown factor type {self.kind!r}")
        if self.n < 1:
            raise ValueError("size parameter must be positive")
        if self.kind == "II" and (self.n % 2 or self.n < 2):
            raise ValueError("type II needs an even size >= 2")
        if self.kind == "IV" and self.n < 3:
            raise ValueError("type IV needs n >= 3")

    @property
    def rank(self) -> int:
        if self.kind == "II":
            return self.n // 2
        if self.kind == "IV":
            return 2
        return self.n

    @property
    def dim(self) -> int:
        """Complex dimension of the ambient space."""
        n = self.n
        return {"I": n * n, "II": n * (n - 1) // 2,
                "III": n * (n + 1) // 2, "IV": n}[self.kind]

    @property
    def shape(self) -> tuple:
        return (self.n,) if self.kind == "IV" else (self.n, self.n)

    @property
    def is_matrix(self) -> bool:
        return self.kind != "IV"

    @property
    def label(self) -> str:
        return f"{self.kind}{self.n}"

    def __str__(self):
        return self.label

    # -- coordinates ----------------------------------------------------
    @cached_property
    def _index_pairs(self):
        n = self.n
        if self.kind == "I":
            return [(a, b) for a in range(n) for b in range(n)]
        if self.kind == "II":
            return list(combinations(range(n), 2))
        if self.kind == "III":
            return list(combinations_with_replacement(range(n), 2))
        return [(a,) for a in range(n)]

    def basis(self) -> np.ndarray:
        """Standard coordinate basis, stacked as ``(dim, *shape)``."""
        out = np.zeros((self.dim,) + self.shape, dtype=np.complex128)
        for i, idx in enumerate(self._index_pairs):
            if self.kind == "IV":
                out[i, idx[0]] = 1
            elif self.kind == "I":
                out[i, idx[0], idx[1]] = 1
            elif self.kind == "II":
                a, b = idx
                out[i, a, b], out[i, b, a] = 1, -1
            else:
                a, b = idx
                out[i, a, b] = 1
                out[i, b, a] = 1
        return out

    def coords(self, z: np.ndarray) -> np.ndarray:
        """Coordinates of ``z`` (batched over leading axes) in :meth:`basis`."""
        z = np.asarray(z)
        if self.kind == "IV":
            return z
        rows = [p[0] for p in self._index_pairs]
        cols = [p[1] for p in self._index_pairs]
        return z[..., rows, cols]

    def from_coords(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=np.complex128)
        return np.tensordot(c, self.basis(), axes=([-1], [0]))

    def zeros(self) -> "Element":
        return Element(self, np.zeros(self.shape, dtype=np.complex128))

    def identity(self) -> "Element":
        """The canonical maximal tripotent with generic norm 1."""
        if self.kind == "IV":
            z = np.zeros(self.n, dtype=np.complex128)
            z[0] = 1
        elif self.kind == "II":
            z = standard_J(self.n)
        else:
            z = np.eye(self.n, dtype=np.complex128)
        return Element(self, z)


@dataclass(frozen=True)
class ProductDomain:
    """Ordered finite product of irreducible factors."""

    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("a product domain needs at least one factor")

    @property
    def ranks(self) -> tuple:
        return tuple(f.rank for f in self.factors)

    @property
    def rank(self) -> int:
        return sum(self.ranks)

    def __len__(self):
        return len(self.factors)

    @property
    def label(self) -> str:
        return "x".join(f.label for f in self.factors)

    def __str__(self):
        return self.label

    def to_json(self):
        return [f.label for f in self.factors]


_FACTOR_RE = re.compile(r"^(IV|III|II|I)(\d+)$")


def parse_factor(text: str) -> DomainFactor:
    m = _FACTOR_RE.match(text.strip())
    if not m:
        raise ValueError(f"cannot parse domain factor {text!r}")
    return DomainFactor(m.group(1), int(m.group(2)))


def parse_domain(spec) -> ProductDomain:
    """Parse ``"I2"``, ``"I2xIV3"``, ``"I1,I2"`` or a list of labels."""
    if isinstance(spec, ProductDomain):
        return spec
    if isinstance(spec, DomainFactor):
        return ProductDomain((spec,))
    if isinstance(spec, str):
        parts = [p for p in re.split(r"[x×,*\s]+", spec.strip()) if p]
    else:
        parts = list(spec)
    return ProductDomain(tuple(
        p if isinstance(p, DomainFactor) else parse_factor(p) for p in parts))


@dataclass(frozen=True)
class Tolerances:
    eq_tol: float = 1e-9
    psd_tol: float = 1e-10

    def __post_init__(self):
        if not (self.eq_tol > 0 and self.psd_tol > 0):
            raise ValueError("tolerances must be strictly positive")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True, eq=False)
class Element:
    """A point of the ambient space of one factor."""

    factor: DomainFactor
    coords: np.ndarray = field(repr=False)
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        z = np.asarray(self.coords, dtype=np.complex128)
        z.setflags(write=False)
        object.__setattr__(self, "coords", z)
        if z.shape != self.factor.shape:
            raise ValueError(
                f"shape {z.shape} does not match factor {self.factor} {self.factor.shape}")
        if self.check and self.factor.kind in ("II", "III"):
            sign = -1 if self.factor.kind == "II" else 1
            scale = max(1.0, float(np.linalg.norm(z)))
            if np.linalg.norm(z - sign * z.T) > 1e-9 * scale:
                raise ValueError(f"element is not {'anti' if sign < 0 else ''}symmetric")

    def _wrap(self, arr):
        return Element(self.factor, arr, check=False)

    def __add__(self, other):
        _same_factor(self, other)
        return self._wrap(self.coords + other.coords)

    def __sub__(self, other):
        _same_factor(self, other)
        return self._wrap(self.coords - other.coords)

    def __mul__(self, scalar):
        return self._wrap(self.coords * scalar)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self.coords)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def allclose(self, other, atol=1e-12) -> bool:
        return self.factor == other.factor and np.allclose(
            self.coords, other.coords, rtol=0, atol=atol)

    def to_json(self) -> dict:
        z = self.coords
        flat = np.stack([z.real, z.imag], axis=-1).reshape(-1).tolist()
        return {"factor": self.factor.label, "shape": list(z.shape), "data": flat}

    @classmethod
    def from_json(cls, obj: dict) -> "Element":
        factor = parse_factor(obj["factor"])
        data = np.asarray(obj["data"], dtype=float).reshape(-1, 2)
        z = (data[:, 0] + 1j * data[:, 1]).reshape(obj.get("shape", factor.shape))
        return cls(factor, z)


def _same_factor(*elems):
    f = elems[0].factor
    for e in elems[1:]:
        if e.factor != f:
            raise ValueError(f"factor mismatch: {f} vs {e.factor}")
    return f


# -- raw array kernels --------------------------------------------------

def _dot(a, b):
    return np.sum(a * b, axis=-1)


def triple_product_arr(kind: str, x, y, z):
    """``{xyz}`` on raw arrays, broadcasting over leading batch axes."""
    if kind == "IV":
        yb = np.conj(y)
        return (_dot(x, yb)[..., None] * z
                - _dot(x, z)[..., None] * yb
                + _dot(z, yb)[..., None] * x)
    ys = np.conj(np.swapaxes(y, -1, -2))
    return 0.5 * (x @ ys @ z + z @ ys @ x)


def generic_norm_arr(factor: DomainFactor, z):
    z = np.asarray(z, dtype=np.complex128)
    if factor.kind in ("I", "III"):
        return np.linalg.det(z)
    if factor.kind == "IV":
        return _dot(z, z)
    if z.ndim == 2:
        return pfaffian(z, check=False)
    if factor.n <= 8:
        return _pf_cofactor(z)
    flat = z.reshape((-1,) + z.shape[-2:])
    vals = np.array([pfaffian(a, check=False) for a in flat])
    return vals.reshape(z.shape[:-2])


# -- Element-level operations --------------------------------------------

def triple_product(x: Element, y: Element, z: Element) -> Element:
    """The Jordan triple product ``{xyz}``."""
    f = _same_factor(x, y, z)
    return Element(f, triple_product_arr(f.kind, x.coords, y.coords, z.coords), check=False)


def left_mult_matrix(x: Element, y: Element) -> np.ndarray:
    """Matrix of ``z -> {xyz}`` in the factor's standard coordinate basis."""
    f = _same_factor(x, y)
    basis = f.basis()
    images = triple_product_arr(f.kind, x.coords[None], y.coords[None], basis)
    # column i = coordinates of the image of basis vector i
    return f.coords(images).T.copy()


def trace_inner_product(x: Element, y: Element) -> complex:
    """``<x, y> = trace L(x, y)``."""
    return complex(np.trace(left_mult_matrix(x, y)))


def quadratic_rep(x: Element, z: Element) -> Element:
    """``Q_x z = {x z x}``."""
    return triple_product(x, z, x)


def is_tripotent(e: Element, tol: Tolerances = DEFAULT_TOL) -> bool:
    r = triple_product(e, e, e).coords - e.coords
    return bool(np.linalg.norm(r) <= tol.eq_tol * max(1.0, e.norm()))


def are_orthogonal(e1: Element, e2: Element, tol: Tolerances = DEFAULT_TOL) -> bool:
    return bool(triple_product(e1, e1, e2).norm() <= tol.eq_tol)


def generic_norm(z: Element) -> complex:
    """det for I/III, Pfaffian for II (normalised so Pf(J) = 1), z.z for IV."""
    return complex(generic_norm_arr(z.factor, z.coords))


def is_invertible(z: Element, tol: Tolerances = DEFAULT_TOL) -> bool:
    return abs(generic_norm(z)) > tol.eq_tol


def is_maximal_tripotent(e: Element, tol: Tolerances = DEFAULT_TOL) -> bool:
    # zero is a tripotent but never invertible, hence never maximal
    return is_tripotent(e, tol) and is_invertible(e, tol)


def in_domain(z: Element, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether ``1 - L(z, z)`` is positive definite."""
    op = np.eye(z.factor.dim) - left_mult_matrix(z, z)
    # L(z,z) is self-adjoint for the trace form, so the spectrum is real
    ev = np.linalg.eigvals(op).real
    return bool(ev.min() > tol.psd_tol)


def spin_domain_inequality(z) -> bool:
    """Closed-form membership test for the type IV domain.

    With ``z = s1 c1 + s2 c2`` (minimal tripotents, ``|c|^2 = 1/2``) the
    left side equals ``s1**2``, the squared spectral norm.
    """
    z = np.asarray(z, dtype=np.complex128)
    a = float(np.real(_dot(z, np.conj(z))))
    b = abs(_dot(z, z))
    return a + np.sqrt(max(a * a - b * b, 0.0)) < 1


# -- Pfaffian -------------------------------------------------------------

def standard_J(m: int) -> np.ndarray:
    """Block diagonal of ``m/2`` copies of ``[[0, 1], [-1, 0]]``."""
    if m % 2:
        raise ValueError("J needs even size")
    J = np.zeros((m, m), dtype=np.complex128)
    for a in range(0, m, 2):
        J[a, a + 1], J[a + 1, a] = 1, -1
    return J


def _pf_cofactor(a):
    n = a.shape[-1]
    if n == 0:
        return np.ones(a.shape[:-2], dtype=np.complex128)
    if n == 2:
        return a[..., 0, 1]
    total = 0
    rest = list(range(1, n))
    for pos, j in enumerate(rest):
        keep = [c for c in rest if c != j]
        minor = a[..., keep, :][..., :, keep]
        # expansion along row 0; sign alternates with the column position
        total = total + (-1) ** pos * a[..., 0, j] * _pf_cofactor(minor)
    return total


def pfaffian(a, tol: float = 1e-9, check: bool = True) -> complex:
    """Pfaffian of an antisymmetric matrix, with ``Pf(J) = 1``.

    Cofactor expansion up to 8 x 8, Parlett-Reid elimination above.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("pfaffian needs a square matrix")
    n = a.shape[0]
    if n % 2:
        raise ValueError("pfaffian needs even dimension")
    if check:
        scale = max(1.0, float(np.linalg.norm(a)))
        if np.linalg.norm(a + a.T) > tol * scale:
            raise ValueError("matrix is not antisymmetric")
    if n <= 8:
        return complex(_pf_cofactor(a))
    return complex(_backend.pfaffian_ltl(a))
