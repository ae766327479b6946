from math import factorial

import numpy as np
import pytest

from tubetop.symbols import CIRCLE, MatrixSymbol, constant, laurent, norm_pow, opaque
from tubetop.toeplitz import (
    SectionSweep, block_index, block_sections, circle_sections, finite_section_index,
    fourier_coefficients, fredholm_proxy, section_sweep,
)


def z(n=1):
    return laurent({n: 1})


def exp_z(a):
    return opaque(CIRCLE, lambda p: np.exp(a * p[0].reshape(-1)), "exp")


def test_fourier_coefficients_match_laurent_coefficients():
    f = laurent({-2: 0.5, 0: 1, 3: 2j})
    c = fourier_coefficients(f, 64)
    expect = np.zeros(64, dtype=complex)
    expect[-2], expect[0], expect[3] = 0.5, 1, 2j
    assert np.allclose(c, expect, atol=1e-14)


def test_fourier_coefficients_of_exponential():
    # exp(a z) = sum a^n z^n / n!
    a = 0.7
    c = fourier_coefficients(exp_z(a), 64)
    assert np.allclose(c[:8], [a ** n / factorial(n) for n in range(8)], atol=1e-14)


def test_circle_section_examples():
    assert np.allclose(circle_sections(z(), 3).matrix, np.eye(3, k=-1))
    assert np.allclose(circle_sections(constant(CIRCLE, 1), 4).matrix, np.eye(4))
    assert np.allclose(circle_sections(z(-1), 3).matrix, np.eye(3, k=1))


def test_circle_sections_need_circle_symbol():
    with pytest.raises(ValueError):
        circle_sections(norm_pow("I2", [1]), 4)


def test_index_examples():
    v = finite_section_index(z())
    assert v.analytic_index == -1 and v.topological_index == (1,) and v.match
    assert finite_section_index(constant(CIRCLE, 1)).analytic_index == 0
    f = z(-2) * exp_z(0.3)
    v = finite_section_index(f, sizes=(64, 128, 256))
    assert v.analytic_index == 2 and v.topological_index == (-2,) and v.match


@pytest.mark.parametrize("k", [-3, -1, 0, 2, 4])
def test_pure_powers_have_exact_defects(k):
    # T_{z^k}: shift by k; its kernel has dimension max(-k, 0)
    sweep = section_sweep(z(k), sizes=(16, 32, 64))
    for r in sweep.results:
        assert (r.dim_ker, r.dim_coker) == (max(-k, 0), max(k, 0))


def test_invertible_symbol_with_zero_winding():
    assert finite_section_index(laurent({1: 1, 0: -2})).analytic_index == 0


def test_block_examples():
    one, zero = constant(CIRCLE, 1), constant(CIRCLE, 0)
    v = block_index(MatrixSymbol([[z(), zero], [zero, z()]]))
    assert v.analytic_index == -2 and v.match
    assert block_index(MatrixSymbol.identity(CIRCLE, 2)).analytic_index == 0
    v = block_index(MatrixSymbol([[z(), one], [zero, z(-1)]]))
    assert v.analytic_index == 0 and v.topological_index == (0,) and v.match
    v = block_index(MatrixSymbol.diag([z(), z(-1)]))
    assert v.analytic_index == 0 and v.match


def test_block_sections_layout():
    F = MatrixSymbol([[z(), constant(CIRCLE, 2)], [constant(CIRCLE, 3), z(-1)]])
    m = block_sections(F, 3).matrix
    # block (a, b) is F_hat(a - b)
    assert np.allclose(m[0:2, 0:2], [[0, 2], [3, 0]])
    assert np.allclose(m[2:4, 0:2], [[1, 0], [0, 0]])
    assert np.allclose(m[0:2, 2:4], [[0, 0], [0, 1]])


def test_vanishing_symbol_is_unstable():
    v = finite_section_index(laurent({1: 1, 0: -1}))
    assert v.analytic_index == "unstable" and not v.match


def test_fredholm_examples():
    r = fredholm_proxy(laurent({1: 1, 0: -2}), sizes=(16, 32, 64, 128))
    assert min(r.sigma_min) >= 0.9 and r.bounded_below
    r = fredholm_proxy(laurent({1: 1, 0: -1}))
    assert r.analytic_index == "unstable" and r.decaying and not r.bounded_below
    r = fredholm_proxy(constant(CIRCLE, 1))
    assert all(s == 1 for s in r.sigma_min)


def test_sweep_sizes_must_increase():
    with pytest.raises(ValueError):
        SectionSweep((64, 32, 128), 1e-8)


def test_sweep_is_deterministic_across_threads(monkeypatch):
    f = z(2) * exp_z(0.2)
    a = section_sweep(f).to_json()
    monkeypatch.setenv("TUBETOP_THREADS", "4")
    assert section_sweep(f).to_json() == a
