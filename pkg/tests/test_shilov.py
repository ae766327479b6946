import numpy as np
import pytest

from tubetop.jordan import (
    DomainFactor, Element, generic_norm, is_maximal_tripotent, parse_domain, pfaffian,
)
from tubetop.jordan import generic_norm_arr, triple_product_arr
from tubetop.shilov import (
    BoundaryPoint, BoundarySampleError, haar_unitary, reduce_phase, sample_boundary,
    sample_boundary_arr, sample_product_boundary,
)
from tubetop.suites import FACTORS_SMALL


def test_type_i_samples_are_unitary():
    for seed in range(10):
        u = sample_boundary(DomainFactor("I", 2), seed).coords
        assert np.linalg.norm(u @ u.conj().T - np.eye(2)) <= 1e-10


def test_type_iv_samples_have_unimodular_square():
    for seed in range(10):
        z = sample_boundary(DomainFactor("IV", 3), seed).coords
        assert abs(abs(z @ z) - 1) <= 1e-10


def test_type_ii_samples_are_antisymmetric_with_unimodular_pfaffian():
    for seed in range(10):
        u = sample_boundary(DomainFactor("II", 4), seed).coords
        assert np.allclose(u, -u.T, atol=1e-12)
        assert abs(abs(pfaffian(u)) - 1) <= 1e-9


@pytest.mark.parametrize("f", FACTORS_SMALL, ids=str)
def test_thousand_samples_are_maximal_tripotents(f):
    pts = sample_boundary_arr(f, np.random.default_rng(1), 1000)
    assert np.abs(triple_product_arr(f.kind, pts, pts, pts) - pts).max() <= 1e-9
    assert np.abs(np.abs(generic_norm_arr(f, pts)) - 1).max() <= 1e-9


def test_samples_are_seed_deterministic():
    f = DomainFactor("III", 3)
    a = sample_boundary(f, 123).coords
    b = sample_boundary(f, 123).coords
    c = sample_boundary(f, 124).coords
    assert np.array_equal(a, b) and not np.allclose(a, c)
    assert sample_boundary(f, 2**64 - 1).factor == f


def test_haar_moments():
    # closed-form Haar moments on U(n): E|u11|^2 = 1/n, E|u11|^4 = 2/(n(n+1))
    rng = np.random.default_rng(0)
    n, count = 3, 40000
    u = haar_unitary(n, rng, count)
    a = np.abs(u[:, 0, 0]) ** 2
    assert abs(a.mean() - 1 / n) < 5 * a.std() / np.sqrt(count)
    b = a ** 2
    assert abs(b.mean() - 2 / (n * (n + 1))) < 5 * b.std() / np.sqrt(count)
    m = u[:, 0, 0] * np.conj(u[:, 1, 1])
    assert abs(m.mean()) < 5 * np.abs(m).std() / np.sqrt(count) + 1e-3
    # the determinant phase of a Haar unitary is uniform
    ph = np.angle(np.linalg.det(u))
    assert abs(np.exp(1j * ph).mean()) < 5 / np.sqrt(count)


def test_reduce_phase_examples():
    f = DomainFactor("I", 2)
    e = Element(f, np.diag([1, np.exp(1j * np.pi / 2)]))
    e0, th = reduce_phase(e)
    assert th == pytest.approx(np.pi / 2)
    assert e0.allclose(Element(f, np.diag([np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4)])))

    ident = f.identity()
    e0, th = reduce_phase(ident)
    assert th == 0 and e0.allclose(ident)

    g = DomainFactor("IV", 3)
    e0, th = reduce_phase(Element(g, np.exp(1j * np.pi / 4) * np.array([0, 1, 0])))
    assert th == pytest.approx(np.pi / 2)
    assert e0.allclose(Element(g, [0, 1, 0]))


@pytest.mark.parametrize("f", FACTORS_SMALL, ids=str)
def test_reduce_phase_lands_on_reduced_boundary(f):
    rng = np.random.default_rng(3)
    for _ in range(20):
        e = sample_boundary(f, rng)
        e0, th = reduce_phase(e)
        assert 0 <= th < 2 * np.pi
        assert generic_norm(e0) == pytest.approx(1, abs=1e-9)
        assert e0.allclose(Element(f, np.exp(-1j * th / f.rank) * e.coords, check=False))


def test_reduce_phase_rejects_non_maximal():
    f = DomainFactor("I", 2)
    with pytest.raises(ValueError):
        reduce_phase(Element(f, np.diag([1, 0])))


def test_product_sampling():
    p = sample_product_boundary("I1xI2", 5)
    assert abs(abs(p.parts[0].coords[0, 0]) - 1) <= 1e-12
    u = p.parts[1].coords
    assert np.allclose(u @ u.conj().T, np.eye(2))

    single = sample_product_boundary("III3", 7)
    assert np.array_equal(single.parts[0].coords,
                          sample_boundary(DomainFactor("III", 3), 7).coords)

    q = sample_product_boundary("IV3xIII2", 9)
    assert all(is_maximal_tripotent(x) for x in q.parts)
    q.validate()


def test_boundary_point_validation():
    d = parse_domain("I2")
    bad = BoundaryPoint(d, (Element(DomainFactor("I", 2), np.diag([1, 0.5])),))
    with pytest.raises(BoundarySampleError):
        bad.validate()
    with pytest.raises(ValueError):
        BoundaryPoint(d, (Element(DomainFactor("I", 3), np.eye(3)),))
    e = sample_product_boundary(d, 1)
    with pytest.raises(BoundarySampleError):
        e.validate(reduced=True)
    e0, _ = reduce_phase(e.parts[0])
    BoundaryPoint(d, (e0,)).validate(reduced=True)


def test_boundary_point_json_round_trip():
    p = sample_product_boundary("II4xIV3", 11)
    q = BoundaryPoint.from_json(p.to_json())
    assert q.domain == p.domain
    assert all(np.array_equal(a.coords, b.coords) for a, b in zip(p.parts, q.parts))
