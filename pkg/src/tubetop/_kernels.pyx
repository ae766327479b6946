# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels. See ``_kernels_py`` for the contracts."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, atan2

cnp.import_array()


cdef double _binom(int n, int k) noexcept nogil:
    cdef double r = 1.0
    cdef int i
    if k < 0 or k > n:
        return 0.0
    for i in range(1, k + 1):
        r = r * (n - k + i) / i
    return r


def sympow_matrices(u, int d):
    cdef const double complex[:, :, ::1] uv = np.ascontiguousarray(u, dtype=np.complex128)
    cdef Py_ssize_t nb = uv.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] out = np.zeros((nb, d + 1, d + 1), dtype=np.complex128)
    cdef double complex[:, ::1] pw = np.empty((4, d + 1), dtype=np.complex128)
    cdef double[:, ::1] bin_ = np.empty((d + 1, d + 1), dtype=np.float64)
    cdef double[::1] scale = np.empty(d + 1, dtype=np.float64)
    cdef double complex[:, :, ::1] o = out
    cdef Py_ssize_t b, e, j, k, a, c
    cdef double complex left
    for a in range(d + 1):
        scale[a] = sqrt(_binom(d, a))
        for c in range(d + 1):
            bin_[a, c] = _binom(a, c)
    with nogil:
        for b in range(nb):
            pw[0, 0] = 1.0
            pw[1, 0] = 1.0
            pw[2, 0] = 1.0
            pw[3, 0] = 1.0
            for e in range(1, d + 1):
                pw[0, e] = pw[0, e - 1] * uv[b, 0, 0]
                pw[1, e] = pw[1, e - 1] * uv[b, 0, 1]
                pw[2, e] = pw[2, e - 1] * uv[b, 1, 0]
                pw[3, e] = pw[3, e - 1] * uv[b, 1, 1]
            for k in range(d + 1):
                for a in range(d - k + 1):
                    left = bin_[d - k, a] * pw[0, d - k - a] * pw[2, a]
                    for c in range(k + 1):
                        j = a + c
                        o[b, j, k] = o[b, j, k] + left * bin_[k, c] * pw[1, k - c] * pw[3, c]
            for j in range(d + 1):
                for k in range(d + 1):
                    o[b, j, k] = o[b, j, k] * (scale[k] / scale[j])
    return out


def pfaffian_ltl(a):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] arr = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef double complex[:, ::1] m = arr
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t k, i, j, kp
    cdef double best, cur
    cdef double complex pf = 1.0
    cdef double complex tmp, piv
    if n % 2:
        return 0j
    with nogil:
        for k in range(0, n - 1, 2):
            kp = k + 1
            best = -1.0
            for i in range(k + 1, n):
                cur = m[i, k].real * m[i, k].real + m[i, k].imag * m[i, k].imag
                if cur > best:
                    best = cur
                    kp = i
            if kp != k + 1:
                for j in range(k, n):
                    tmp = m[k + 1, j]
                    m[k + 1, j] = m[kp, j]
                    m[kp, j] = tmp
                for i in range(k, n):
                    tmp = m[i, k + 1]
                    m[i, k + 1] = m[i, kp]
                    m[i, kp] = tmp
                pf = -pf
            if m[k + 1, k] == 0:
                pf = 0
                break
            piv = m[k, k + 1]
            pf = pf * piv
            for i in range(k + 2, n):
                for j in range(k + 2, n):
                    m[i, j] = m[i, j] + (m[k, i] / piv) * m[j, k + 1] - m[i, k + 1] * (m[k, j] / piv)
    return complex(pf)


def phase_increments(z):
    cdef const double complex[::1] zv = np.ascontiguousarray(z, dtype=np.complex128)
    cdef Py_ssize_t n = zv.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] inc = np.empty(max(n - 1, 0), dtype=np.float64)
    cdef double[::1] iv = inc
    cdef Py_ssize_t i
    cdef double lo = 1e308, hi = 0.0, m, re, im
    with nogil:
        # compare squared moduli, take roots once at the end
        for i in range(n):
            m = zv[i].real * zv[i].real + zv[i].imag * zv[i].imag
            if m < lo:
                lo = m
            if m > hi:
                hi = m
        for i in range(n - 1):
            # arg(z[i+1] * conj(z[i]))
            re = zv[i + 1].real * zv[i].real + zv[i + 1].imag * zv[i].imag
            im = zv[i + 1].imag * zv[i].real - zv[i + 1].real * zv[i].imag
            iv[i] = atan2(im, re)
    return inc, sqrt(lo), sqrt(hi)
