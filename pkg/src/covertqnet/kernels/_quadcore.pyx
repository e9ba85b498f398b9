# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gauss-Kronrod panel kernel for the detector correlation integrals."""

import numpy as np
from libc.math cimport exp, sin, cos, M_PI

cdef double[15] XK
cdef double[15] WK
cdef double[15] WG

XK[0] = -0.991455371120812639206854697526329
XK[1] = -0.949107912342758524526189684047851
XK[2] = -0.864864423359769072789712788640926
XK[3] = -0.741531185599394439863864773280788
XK[4] = -0.586087235467691130294144838258730
XK[5] = -0.405845151377397166906606412076961
XK[6] = -0.207784955007898467600689403773245
XK[7] = 0.0
XK[8] = 0.207784955007898467600689403773245
XK[9] = 0.405845151377397166906606412076961
XK[10] = 0.586087235467691130294144838258730
XK[11] = 0.741531185599394439863864773280788
XK[12] = 0.864864423359769072789712788640926
XK[13] = 0.949107912342758524526189684047851
XK[14] = 0.991455371120812639206854697526329

WK[0] = 0.022935322010529224963732008058970
WK[1] = 0.063092092629978553290700663189204
WK[2] = 0.104790010322250183839876322541518
WK[3] = 0.140653259715525918745189590510238
WK[4] = 0.169004726639267902826583426598550
WK[5] = 0.190350578064785409913256402421014
WK[6] = 0.204432940075298892414161999234649
WK[7] = 0.209482141084727828012999174891714
WK[8] = 0.204432940075298892414161999234649
WK[9] = 0.190350578064785409913256402421014
WK[10] = 0.169004726639267902826583426598550
WK[11] = 0.140653259715525918745189590510238
WK[12] = 0.104790010322250183839876322541518
WK[13] = 0.063092092629978553290700663189204
WK[14] = 0.022935322010529224963732008058970

WG[0] = 0.0
WG[1] = 0.129484966168869693270611432679082
WG[2] = 0.0
WG[3] = 0.279705391489276667901467771423780
WG[4] = 0.0
WG[5] = 0.381830050505118944950369775488975
WG[6] = 0.0
WG[7] = 0.417959183673469387755102040816327
WG[8] = 0.0
WG[9] = 0.381830050505118944950369775488975
WG[10] = 0.0
WG[11] = 0.279705391489276667901467771423780
WG[12] = 0.0
WG[13] = 0.129484966168869693270611432679082
WG[14] = 0.0


cdef inline double complex _f(int which, double x, double d, double ell):
    cdef double env, osc, ph, inv4pi
    inv4pi = 1.0 / (4.0 * M_PI)
    if which == 0:
        return x * exp(-0.5 * (x + d) * (x + d)) * inv4pi
    if ell == 0.0:
        osc = x
        ph = 0.0
    else:
        osc = sin(ell * x) / ell
        ph = ell * (d - x)
    if which == 1:
        env = exp(-0.5 * (x * x + d * d))
    else:
        env = exp(-0.5 * (x + d) * (x + d))
    env = env * osc * inv4pi
    return env * (cos(ph) + 1j * sin(ph))


def gk15_panels(int which, double[::1] a, double[::1] b, double d, double ell):
    """Batched K15/G7 sums for integrand `which` on panels [a_i, b_i]."""
    cdef Py_ssize_t m = a.shape[0]
    k15 = np.empty(m, dtype=np.complex128)
    g7 = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] kv = k15
    cdef double complex[::1] gv = g7
    cdef Py_ssize_t i, j
    cdef double c, h
    cdef double complex fk, fg, fv
    for i in range(m):
        c = 0.5 * (a[i] + b[i])
        h = 0.5 * (b[i] - a[i])
        fk = 0
        fg = 0
        for j in range(15):
            fv = _f(which, c + h * XK[j], d, ell)
            fk = fk + WK[j] * fv
            fg = fg + WG[j] * fv
        kv[i] = fk * h
        gv[i] = fg * h
    return k15, g7
