import os
import subprocess
import sys

import numpy as np
import pytest

from tubetop import _backend, _kernels_py
from tubetop.shilov import haar_unitary

try:
    from tubetop import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

needs_ext = pytest.mark.skipif(_compiled is None, reason="compiled kernels not built")


def test_backend_is_reported():
    assert _backend.BACKEND in ("cython", "python")
    if _compiled is not None and not os.environ.get("TUBETOP_PURE_PYTHON"):
        assert _backend.BACKEND == "cython"


def test_pure_python_override():
    env = dict(os.environ, TUBETOP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import tubetop; print(tubetop.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@pytest.mark.parametrize("d", [0, 1, 2, 3, 5])
def test_sympow_character_oracle(d):
    # trace of the degree-d symmetric power is h_d(eigenvalues)
    u = haar_unitary(2, np.random.default_rng(d), 20)
    D = _backend.sympow_matrices(u, d)
    ev = np.linalg.eigvals(u)
    h = sum(ev[:, 0] ** (d - m) * ev[:, 1] ** m for m in range(d + 1))
    assert np.allclose(np.trace(D, axis1=1, axis2=2), h)


@pytest.mark.parametrize("d", [1, 2, 4])
def test_sympow_is_unitary_representation(d):
    rng = np.random.default_rng(10 + d)
    u, v = haar_unitary(2, rng, 5), haar_unitary(2, rng, 5)
    Du, Dv, Duv = (_backend.sympow_matrices(x, d) for x in (u, v, u @ v))
    eye = np.eye(d + 1)
    assert np.allclose(Du @ np.conj(np.swapaxes(Du, 1, 2)), eye)
    assert np.allclose(Duv, Du @ Dv) or np.allclose(Duv, Dv @ Du)
    assert np.allclose(_backend.sympow_matrices(np.eye(2)[None], d)[0], eye)


def test_sympow_degree_one_is_the_matrix_itself():
    u = haar_unitary(2, np.random.default_rng(0), 3)
    D = _backend.sympow_matrices(u, 1)
    assert np.allclose(D, u) or np.allclose(D, np.swapaxes(u, 1, 2))


def test_phase_increments_python():
    z = np.exp(1j * np.linspace(0, 2 * np.pi, 9)) * np.array([1, 2, 1, 2, 1, 2, 1, 2, 1])
    inc, lo, hi = _kernels_py.phase_increments(z)
    assert np.allclose(inc, np.pi / 4)
    assert (lo, hi) == pytest.approx((1, 2))


@needs_ext
@pytest.mark.parametrize("d", [0, 1, 3, 6])
def test_sympow_parity(d):
    u = haar_unitary(2, np.random.default_rng(d), 50)
    u.setflags(write=False)
    assert np.allclose(_compiled.sympow_matrices(u, d), _kernels_py.sympow_matrices(u, d),
                       atol=1e-13)


@needs_ext
@pytest.mark.parametrize("m", [2, 4, 10, 16])
def test_pfaffian_parity(m):
    rng = np.random.default_rng(m)
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    a = a - a.T
    assert _compiled.pfaffian_ltl(a) == pytest.approx(_kernels_py.pfaffian_ltl(a), rel=1e-12)


@needs_ext
def test_phase_increment_parity():
    rng = np.random.default_rng(1)
    z = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
    a, b = _compiled.phase_increments(z), _kernels_py.phase_increments(z)
    assert np.allclose(a[0], b[0], atol=1e-14) and a[1:] == pytest.approx(b[1:])
