# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled state-vector kernels: gate application, Born probabilities, collapse."""


def apply_1q(double complex[::1] v, int n, int q,
             double complex u00, double complex u01,
             double complex u10, double complex u11):
    cdef Py_ssize_t s = 1 << (n - 1 - q)
    cdef Py_ssize_t N = 1 << n
    cdef Py_ssize_t base, off, i0, i1
    cdef double complex x0, x1
    base = 0
    while base < N:
        for off in range(s):
            i0 = base + off
            i1 = i0 + s
            x0 = v[i0]
            x1 = v[i1]
            v[i0] = u00 * x0 + u01 * x1
            v[i1] = u10 * x0 + u11 * x1
        base += 2 * s


def apply_diag1q(double complex[::1] v, int n, int q,
                 double complex d0, double complex d1):
    cdef Py_ssize_t s = 1 << (n - 1 - q)
    cdef Py_ssize_t N = 1 << n
    cdef Py_ssize_t base, off, i0
    base = 0
    while base < N:
        for off in range(s):
            i0 = base + off
            v[i0] = v[i0] * d0
            v[i0 + s] = v[i0 + s] * d1
        base += 2 * s


def apply_cnot(double complex[::1] v, int n, int c, int t):
    cdef Py_ssize_t sc = 1 << (n - 1 - c)
    cdef Py_ssize_t st = 1 << (n - 1 - t)
    cdef Py_ssize_t N = 1 << n
    cdef Py_ssize_t i
    cdef double complex tmp
    for i in range(N):
        if (i & sc) != 0 and (i & st) == 0:
            tmp = v[i]
            v[i] = v[i | st]
            v[i | st] = tmp


def apply_phase_mask(double complex[::1] v, int n, Py_ssize_t mask,
                     double complex phase):
    cdef Py_ssize_t N = 1 << n
    cdef Py_ssize_t i
    for i in range(N):
        if (i & mask) == mask:
            v[i] = v[i] * phase


def z_prob(double complex[::1] v, int n, int q):
    cdef Py_ssize_t s = 1 << (n - 1 - q)
    cdef Py_ssize_t N = 1 << n
    cdef Py_ssize_t i
    cdef double p = 0.0
    cdef double complex a
    for i in range(N):
        if i & s:
            a = v[i]
            p += a.real * a.real + a.imag * a.imag
    return p


def project_z(double complex[::1] v, int n, int q, int outcome):
    cdef Py_ssize_t s = 1 << (n - 1 - q)
    cdef Py_ssize_t N = 1 << n
    cdef Py_ssize_t i
    cdef double p = 0.0
    cdef double complex a
    cdef bint keep_hi = outcome == 1
    for i in range(N):
        if ((i & s) != 0) == keep_hi:
            a = v[i]
            p += a.real * a.real + a.imag * a.imag
        else:
            v[i] = 0.0
    return p
