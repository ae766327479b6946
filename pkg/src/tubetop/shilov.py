"""Shilov boundaries of classical tube-type factors and their products.

The boundary of each factor is its set of maximal tripotents. Samplers here
cover the boundary and are validated by predicate, but only the type I
sampler is exactly Haar distributed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .jordan import (
    DEFAULT_TOL, DomainFactor, Element, ProductDomain, Tolerances,
    generic_norm, generic_norm_arr, is_maximal_tripotent, parse_domain,
    standard_J,
)

__all__ = [
    "BoundaryPoint", "BoundarySampleError", "haar_unitary", "sample_boundary",
    "sample_boundary_arr", "sample_product_boundary", "reduce_phase",
]


class BoundarySampleError(RuntimeError):
    """A sampled point failed the maximal-tripotent check."""


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(n: int, rng, size=None) -> np.ndarray:
    """Haar unitary(ies) from QR of a complex Ginibre matrix."""
    shape = (n, n) if size is None else (size, n, n)
    g = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    ph = d / np.abs(d)
    return q * ph[..., None, :]


def sample_boundary_arr(factor: DomainFactor, rng, size: int) -> np.ndarray:
    """``size`` boundary points of ``factor`` as a raw ``(size, *shape)`` array."""
    rng = _rng(rng)
    n = factor.n
    if factor.kind == "I":
        return haar_unitary(n, rng, size)
    if factor.kind == "III":
        v = haar_unitary(n, rng, size)
        return v @ np.swapaxes(v, -1, -2)
    if factor.kind == "II":
        v = haar_unitary(n, rng, size)
        return v @ standard_J(n) @ np.swapaxes(v, -1, -2)
    theta = rng.uniform(0, 2 * np.pi, size)
    x = rng.standard_normal((size, n))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    return np.exp(1j * theta)[:, None] * x


def sample_boundary(factor: DomainFactor, seed=None,
                    tol: Tolerances = DEFAULT_TOL) -> Element:
    """One validated boundary point of ``factor``."""
    z = sample_boundary_arr(factor, _rng(seed), 1)[0]
    e = Element(factor, z)
    if not is_maximal_tripotent(e, tol):
        raise BoundarySampleError(f"sampled point of {factor} is not a maximal tripotent")
    return e


@dataclass(frozen=True, eq=False)
class BoundaryPoint:
    """A point of a product Shilov boundary: one maximal tripotent per factor."""

    domain: ProductDomain
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if len(self.parts) != len(self.domain):
            raise ValueError("one part per factor required")
        for f, p in zip(self.domain.factors, self.parts):
            if p.factor != f:
                raise ValueError(f"part for {p.factor} placed on factor {f}")

    def validate(self, tol: Tolerances = DEFAULT_TOL, reduced: bool = False) -> None:
        for p in self.parts:
            if not is_maximal_tripotent(p, tol):
                raise BoundarySampleError(f"{p.factor} part is not a maximal tripotent")
            nv = generic_norm(p)
            if abs(abs(nv) - 1) > tol.eq_tol:
                raise BoundarySampleError(f"|N| = {abs(nv)} on the {p.factor} part")
            if reduced and abs(nv - 1) > tol.eq_tol:
                raise BoundarySampleError(f"N = {nv} on a reduced boundary point")

    def arrays(self) -> list:
        """Parts as batch-of-one raw arrays, the layout symbol evaluators take."""
        return [p.coords[None] for p in self.parts]

    def to_json(self) -> dict:
        return {"domain": self.domain.to_json(),
                "parts": [p.to_json() for p in self.parts]}

    @classmethod
    def from_json(cls, obj: dict) -> "BoundaryPoint":
        dom = parse_domain(obj["domain"])
        return cls(dom, tuple(Element.from_json(p) for p in obj["parts"]))


def sample_product_boundary(domain, seed=None, tol: Tolerances = DEFAULT_TOL) -> BoundaryPoint:
    """Independent per-factor samples assembled into a product boundary point."""
    domain = parse_domain(domain)
    rng = _rng(seed)
    return BoundaryPoint(domain, tuple(sample_boundary(f, rng, tol) for f in domain.factors))


def reduce_phase(e: Element, tol: Tolerances = DEFAULT_TOL):
    """Split a maximal tripotent as ``e = exp(i theta / r) * e0`` with ``N(e0) = 1``.

    Returns ``(e0, theta)`` with ``theta`` in ``[0, 2 pi)``.
    """
    if not is_maximal_tripotent(e, tol):
        raise ValueError("reduce_phase needs a maximal tripotent")
    nv = generic_norm(e)
    theta = float(np.angle(nv)) % (2 * np.pi)
    if np.isclose(theta, 2 * np.pi, rtol=0, atol=1e-15):
        theta = 0.0
    e0 = Element(e.factor, np.exp(-1j * theta / e.factor.rank) * e.coords, check=False)
    return e0, theta


def boundary_norms(factor: DomainFactor, pts: np.ndarray) -> np.ndarray:
    """Generic norm of a batch of raw boundary points."""
    return generic_norm_arr(factor, pts)

