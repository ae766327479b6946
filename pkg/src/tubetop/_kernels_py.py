"""Pure numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` signature for signature; ``tubetop._backend``
picks one of the two at import time.
"""
from math import comb

import numpy as np


def sympow_matrices(u, d):
    """Unitary matrix coefficients of ``u`` acting on degree-``d`` binary forms.

    Parameters
    ----------
    u : ndarray, shape (B, 2, 2), complex
    d : int

    Returns
    -------
    ndarray, shape (B, d+1, d+1)
        ``out[b, j, k]`` is the ``(j, k)`` coefficient in the orthonormal
        basis ``sqrt(C(d, j)) x^(d-j) y^j``, for the action
        ``f(x, y) -> f((x, y) u)``.
    """
    u = np.asarray(u, dtype=np.complex128)
    nb = u.shape[0]
    out = np.zeros((nb, d + 1, d + 1), dtype=np.complex128)
    u00, u01 = u[:, 0, 0], u[:, 0, 1]
    u10, u11 = u[:, 1, 0], u[:, 1, 1]
    # precompute powers once; exponents never exceed d
    p00 = np.stack([u00**e for e in range(d + 1)])
    p01 = np.stack([u01**e for e in range(d + 1)])
    p10 = np.stack([u10**e for e in range(d + 1)])
    p11 = np.stack([u11**e for e in range(d + 1)])
    for k in range(d + 1):
        for a in range(d - k + 1):
            ca = comb(d - k, a)
            left = ca * p00[d - k - a] * p10[a]
            for b in range(k + 1):
                j = a + b
                out[:, j, k] += left * comb(k, b) * p01[k - b] * p11[b]
    scale = np.array([np.sqrt(comb(d, k)) for k in range(d + 1)])
    out *= scale[None, None, :] / scale[None, :, None]
    return out


def pfaffian_ltl(a):
    """Pfaffian of a complex antisymmetric matrix by Parlett-Reid elimination."""
    a = np.array(a, dtype=np.complex128, copy=True)
    n = a.shape[0]
    if n % 2:
        return 0j
    pf = 1.0 + 0j
    for k in range(0, n - 1, 2):
        kp = k + 1 + int(np.abs(a[k + 1:, k]).argmax())
        if kp != k + 1:
            a[[k + 1, kp], k:] = a[[kp, k + 1], k:]
            a[k:, [k + 1, kp]] = a[k:, [kp, k + 1]]
            pf = -pf
        if a[k + 1, k] == 0:
            return 0j
        pf *= a[k, k + 1]
        if k + 2 < n:
            tau = a[k, k + 2:] / a[k, k + 1]
            col = a[k + 2:, k + 1]
            a[k + 2:, k + 2:] += np.outer(tau, col) - np.outer(col, tau)
    return complex(pf)


def phase_increments(z):
    """Principal phase jumps between consecutive samples plus min and max modulus.

    Returns ``(increments, min_abs, max_abs)`` with ``increments[i]`` the
    argument of ``z[i+1] / z[i]`` in ``(-pi, pi]``.
    """
    z = np.asarray(z, dtype=np.complex128)
    mod = np.abs(z)
    inc = np.angle(z[1:] * np.conj(z[:-1]))
    return inc, float(mod.min()), float(mod.max())
